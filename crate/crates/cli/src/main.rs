use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

mod commands;
mod reproduce;

#[derive(Parser)]
#[command(name = "workbench", version, about = "Exact lattice and quadratic form computations")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants and constructions for a single lattice.
    #[command(subcommand)]
    Lattice(LatticeCmd),
    /// Binary quadratic forms `ax² + bxy + cy²`.
    #[command(subcommand)]
    Form(FormCmd),
    /// Cohomological Fourier–Mukai matrices on the rank-3 Mukai slice.
    #[command(subcommand)]
    Fm(FmCmd),
    #[command(subcommand)]
    Involution(InvolutionCmd),
    /// Recompute every stored constant and write report.json / report.md.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Clone)]
pub struct LatticeSource {
    /// JSON file with `{"gram": [[...]]}` or `{"name": "..."}`.
    #[arg(long, conflicts_with = "name")]
    pub input: Option<PathBuf>,
    /// Named lattice such as `E8(-2)`, `U(2)+E8(-1)` or `M(2)`.
    #[arg(long)]
    pub name: Option<String>,
}

#[derive(Subcommand)]
enum LatticeCmd {
    Info(LatticeSource),
    DiscForm(LatticeSource),
    /// Orthogonal complement of the span of `--basis` rows.
    Complement {
        #[command(flatten)]
        source: LatticeSource,
        /// JSON array of rows in lattice coordinates.
        #[arg(long)]
        basis: String,
    },
    /// Overlattice glued from isotropic elements of d(L).
    Overlattice {
        #[command(flatten)]
        source: LatticeSource,
        /// JSON array of elements, as coefficients on the generators printed by `disc-form`.
        #[arg(long)]
        glue: String,
    },
}

#[derive(Subcommand)]
enum FormCmd {
    Reduce {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        /// Reduce under GL₂(Z) instead of SL₂(Z) (definite forms).
        #[arg(long)]
        improper: bool,
    },
    Cycle {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
    },
    Equivalent {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        other: String,
        #[arg(long)]
        improper: bool,
    },
    Represents {
        #[arg(long, allow_hyphen_values = true)]
        form: String,
        #[arg(long, allow_hyphen_values = true)]
        value: String,
    },
}

#[derive(Subcommand)]
enum FmCmd {
    Matrix {
        /// `r0,s,d0,d1,l`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "solve")]
        params: Option<String>,
        /// `r0,s,d0`; `d1` and `l` are solved for.
        #[arg(long, allow_hyphen_values = true)]
        solve: Option<String>,
    },
    Twist {
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
        #[arg(long)]
        r0: i64,
        #[arg(long)]
        s: i64,
    },
    /// Checks `φ ι₁ D = D ι₂ φ` for `{"phi", "iota1", "iota2", "block": [start, end]}`.
    SkewCheck {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum InvolutionCmd {
    /// Eigenlattices of `{"gram" | "name", "action"}`.
    Eigen {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long, default_value = ".")]
    outdir: PathBuf,
    /// Only claims whose id contains this string.
    #[arg(long)]
    filter: Option<String>,
    /// Perturb the first integer in this claim's input.
    #[arg(long)]
    inject_fault: Option<String>,
}

#[derive(Debug)]
pub enum CliError {
    Parse(String),
    Precondition(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
        }
    }

    fn to_json(&self) -> Value {
        let (kind, message) = match self {
            CliError::Parse(m) => ("parse", m),
            CliError::Precondition(m) => ("precondition", m),
        };
        json!({ "error": { "kind": kind, "message": message, "exit_code": self.code() } })
    }
}

impl From<lattice_workbench::Error> for CliError {
    fn from(e: lattice_workbench::Error) -> Self {
        match e {
            lattice_workbench::Error::Parse(m) => CliError::Parse(m),
            other => CliError::Precondition(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Node cap for definite isometry searches, overridable by `WORKBENCH_NODE_CAP`.
pub fn node_cap() -> CliResult<u64> {
    match std::env::var("WORKBENCH_NODE_CAP") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("WORKBENCH_NODE_CAP=`{v}` is not a count"))),
        Err(_) => Ok(lattice_workbench::definite::DEFAULT_NODE_CAP),
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    let fmt = cli.format;
    let out = match cli.command {
        Command::Lattice(cmd) => match cmd {
            LatticeCmd::Info(src) => commands::lattice_info(&src)?,
            LatticeCmd::DiscForm(src) => commands::lattice_disc_form(&src)?,
            LatticeCmd::Complement { source, basis } => commands::lattice_complement(&source, &basis)?,
            LatticeCmd::Overlattice { source, glue } => commands::lattice_overlattice(&source, &glue)?,
        },
        Command::Form(cmd) => match cmd {
            FormCmd::Reduce { form, improper } => commands::form_reduce(&form, improper)?,
            FormCmd::Cycle { form } => commands::form_cycle(&form)?,
            FormCmd::Equivalent { form, other, improper } => {
                commands::form_equivalent(&form, &other, improper)?
            }
            FormCmd::Represents { form, value } => commands::form_represents(&form, &value)?,
        },
        Command::Fm(cmd) => match cmd {
            FmCmd::Matrix { params, solve } => commands::fm_matrix(params.as_deref(), solve.as_deref())?,
            FmCmd::Twist { n, r0, s } => commands::fm_twist(n, r0, s)?,
            FmCmd::SkewCheck { input } => commands::fm_skew_check(&input)?,
        },
        Command::Involution(InvolutionCmd::Eigen { input }) => commands::involution_eigen(&input)?,
        Command::Reproduce(args) => {
            let report = reproduce::run(
                &args.outdir,
                args.filter.as_deref(),
                args.inject_fault.as_deref(),
                node_cap()?,
            )?;
            let code = if report.all_passed() { 0 } else { 1 };
            match fmt {
                Format::Json => println!("{}", serde_json::to_string_pretty(&report.summary_json()).expect("json")),
                Format::Text => print!("{}", report.summary_text()),
            }
            return Ok(code);
        }
    };
    match fmt {
        Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("json")),
        Format::Text => print!("{}", out.text),
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code())
        }
    }
}
