use std::fmt::Write as _;
use std::path::Path;

use lattice_workbench::binary_forms::{
    equivalent, fm_partner_count, represents, square_roots_of_unity, BinaryForm,
};
use lattice_workbench::definite::{definite_isomorphic, IsometryOutcome};
use lattice_workbench::f2quad::{grassmannian_count, F2QuadraticSpace};
use lattice_workbench::genus::{
    primitive_embedding_criterion, stably_equivalent, unique_in_genus_criterion,
};
use lattice_workbench::involutions::{
    enriques_exists_singular, nikulin_triple, quotient_maps, skew_pair_certificate,
    verify_isometry, DEFAULT_SKEW_BOUND,
};
use lattice_workbench::io::{
    int_from_json, int_to_json, matrix_from_json, matrix_to_json, vector_to_json,
};
use lattice_workbench::lattice::discriminant_form;
use lattice_workbench::mukai::{
    orientation_slice_report, twist_matrix, yoshioka_inverse, yoshioka_matrix, FMParameters};
use lattice_workbench::{IntMatrix, Lattice};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::commands::{fm_report, lattice_info_json, named_lattice};
use crate::{CliError, CliResult};

const CONSTANTS: &str = include_str!("../data/paper_constants.json");

#[derive(Deserialize)]
struct Constants {
    version: u32,
    claims: Vec<StoredClaim>,
}

#[derive(Clone, Deserialize)]
struct StoredClaim {
    id: String,
    source: String,
    input: Value,
    expected: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClaimResult {
    pub id: String,
    pub source: String,
    pub expected: Value,
    pub computed: Value,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub constants_version: u32,
    pub filter: Option<String>,
    pub injected_fault: Option<String>,
    pub claims: Vec<ClaimResult>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.claims.iter().all(|c| c.status == Status::Pass)
    }

    fn counts(&self) -> (usize, usize) {
        let passed = self.claims.iter().filter(|c| c.status == Status::Pass).count();
        (passed, self.claims.len() - passed)
    }

    pub fn summary_json(&self) -> Value {
        let (passed, failed) = self.counts();
        let failing: Vec<&str> = self
            .claims
            .iter()
            .filter(|c| c.status != Status::Pass)
            .map(|c| c.id.as_str())
            .collect();
        json!({ "total": self.claims.len(), "passed": passed, "failed": failed, "failing": failing })
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        for c in &self.claims {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            writeln!(s, "[{tag}] {}", c.id).unwrap();
        }
        let (passed, failed) = self.counts();
        writeln!(s, "{passed} passed, {failed} failed").unwrap();
        s
    }

    fn markdown(&self) -> String {
        let (passed, failed) = self.counts();
        let mut s = String::from("# Reproduction report\n\n");
        writeln!(s, "{passed} of {} claims pass, {failed} fail.\n", self.claims.len()).unwrap();
        if let Some(f) = &self.filter {
            writeln!(s, "Filter: `{f}`\n").unwrap();
        }
        if let Some(f) = &self.injected_fault {
            writeln!(s, "Injected fault: `{f}`\n").unwrap();
        }
        s.push_str("| id | status | expected | computed |\n|---|---|---|---|\n");
        for c in &self.claims {
            writeln!(
                s,
                "| `{}` | {:?} | `{}` | `{}` |",
                c.id, c.status, c.expected, c.computed
            )
            .unwrap();
        }
        let notes: Vec<&ClaimResult> = self.claims.iter().filter(|c| c.note.is_some()).collect();
        if !notes.is_empty() {
            s.push_str("\n## Notes\n\n");
            for c in notes {
                writeln!(s, "- `{}`: {}", c.id, c.note.as_deref().unwrap_or_default()).unwrap();
            }
        }
        s
    }
}

/// Adds 2 to the first integer found depth-first (the `[0][0]` entry for a
/// Gram matrix, so symmetry and parity are kept).
fn perturb_first_integer(v: &mut Value) -> bool {
    match v {
        Value::Number(n) => match n.as_i64() {
            Some(x) => {
                *v = json!(x + 2);
                true
            }
            None => false,
        },
        Value::Array(items) => items.iter_mut().any(perturb_first_integer),
        Value::Object(map) => map.values_mut().any(perturb_first_integer),
        _ => false,
    }
}

fn field<'a>(input: &'a Value, key: &str) -> CliResult<&'a Value> {
    input
        .get(key)
        .ok_or_else(|| CliError::Parse(format!("constants: missing `{key}`")))
}

fn lattice_at(input: &Value, key: &str) -> CliResult<Lattice> {
    Ok(Lattice::new(matrix_from_json(field(input, key)?)?)?)
}

fn int_at(input: &Value, key: &str) -> CliResult<i64> {
    let v = int_from_json(field(input, key)?)?;
    i64::try_from(&v).map_err(|_| CliError::Precondition(format!("`{key}` = {v} is too large")))
}

fn ints(v: &Value) -> CliResult<Vec<i64>> {
    v.as_array()
        .ok_or_else(|| CliError::Parse("expected an array of integers".into()))?
        .iter()
        .map(|x| {
            let b = int_from_json(x)?;
            i64::try_from(&b).map_err(|_| CliError::Precondition(format!("{b} is too large")))
        })
        .collect()
}

fn params_at(input: &Value) -> CliResult<FMParameters> {
    let p = ints(field(input, "params")?)?;
    if p.len() != 5 {
        return Err(CliError::Parse("params must have 5 entries".into()));
    }
    Ok(FMParameters::new(p[0], p[1], p[2], p[3], p[4])?)
}

fn form_at(input: &Value, key: &str) -> CliResult<BinaryForm> {
    let v = ints(field(input, key)?)?;
    if v.len() != 3 {
        return Err(CliError::Parse(format!("`{key}` must be [a, b, c]")));
    }
    Ok(BinaryForm::new(v[0], v[1], v[2])?)
}

fn isomorphic(a: &Lattice, b: &Lattice, cap: u64) -> CliResult<Value> {
    if a.signature().is_positive_definite() || a.signature().is_negative_definite() {
        return Ok(match definite_isomorphic(a, b, cap)? {
            IsometryOutcome::Isometric(_) => json!(true),
            IsometryOutcome::NotIsometric(_) => json!(false),
            IsometryOutcome::Inconclusive { nodes } => json!(format!("inconclusive after {nodes} nodes")),
        });
    }
    if a.rank() == 2 && b.rank() == 2 {
        let (f, g) = (BinaryForm::from_gram(a.gram())?, BinaryForm::from_gram(b.gram())?);
        if f.discriminant() != g.discriminant() {
            return Ok(json!(false));
        }
        return Ok(json!(equivalent(&f, &g, true)?.is_some()));
    }
    Err(CliError::Precondition("isomorphism test needs a definite or binary pair".into()))
}

type Evaluated = (Value, Option<String>);

fn evaluate(id: &str, input: &Value, cap: u64) -> CliResult<Evaluated> {
    let plain = |v: Value| Ok((v, None));
    match id {
        "criteria.embedding-1-9" => {
            let t = ints(field(input, "target")?)?;
            if t.len() != 2 || t.iter().any(|x| *x < 0) {
                return Err(CliError::Parse("target must be [l+, l-]".into()));
            }
            let names = field(input, "lattices")?
                .as_array()
                .ok_or_else(|| CliError::Parse("lattices must be a list of names".into()))?;
            let mut all = (true, true);
            let mut per = Vec::new();
            for n in names {
                let name = n.as_str().ok_or_else(|| CliError::Parse("lattice name".into()))?;
                let l = named_lattice(name)?;
                let r = primitive_embedding_criterion(&l, (t[0] as usize, t[1] as usize))?;
                all = (all.0 && r.exists, all.1 && r.unique);
                per.push(format!("{name}: exists {}, unique {}", r.exists, r.unique));
            }
            Ok((json!({ "exists": all.0, "unique": all.1 }), Some(per.join("; "))))
        }
        "criteria.m2-unique-in-genus" => {
            let name = field(input, "name")?.as_str().unwrap_or_default();
            plain(json!(unique_in_genus_criterion(&named_lattice(name)?)?))
        }
        "e8.element-counts" => {
            let v = F2QuadraticSpace::from_discriminant(&lattice_at(input, "gram")?)?;
            let (q0, q1) = v.element_counts();
            plain(json!({ "q0": q0, "q1": q1 }))
        }
        "e8.subspaces" => {
            let v = F2QuadraticSpace::from_discriminant(&lattice_at(input, "gram")?)?;
            let c = v.classify_2d_subspaces();
            let mut out = serde_json::to_value(c).expect("serializable");
            out["total"] = json!(c.total());
            plain(out)
        }
        "e8.grassmannian" => {
            let (k, n) = (int_at(input, "k")?, int_at(input, "n")?);
            let (k, n) = (
                u32::try_from(k).map_err(|_| CliError::Precondition("k < 0".into()))?,
                u32::try_from(n).map_err(|_| CliError::Precondition("n < 0".into()))?,
            );
            plain(int_to_json(&BigInt::from(grassmannian_count(k, n)?)))
        }
        "e8.quotient-maps" => {
            let factor = BigInt::from(int_at(input, "factor")?);
            let qm = quotient_maps();
            let (gd, gc) = (qm.domain.gram(), qm.codomain.gram());
            plain(json!({
                "push_pull": &qm.push * &qm.pull == IntMatrix::identity(22).scale(&factor),
                "pullback_scales": &(&qm.pull.transpose() * gd) * &qm.pull == gc.scale(&factor),
                "adjoint": &qm.push.transpose() * gc == gd * &qm.pull,
            }))
        }
        "enriques.rank10-pair" => {
            let a = lattice_at(input, "first")?.direct_sum(&Lattice::e8());
            let b = lattice_at(input, "second")?;
            let (da, db) = (a.det(), b.det());
            let dets = format!("determinants {da} and {db}");
            if da != db {
                return Ok((
                    json!({ "isometric": Value::Null }),
                    Some(format!("{dets}: the two lattices are not labeled consistently")),
                ));
            }
            Ok((json!({ "isometric": isomorphic(&a, &b, cap)? }), Some(dets)))
        }
        "enriques.singular-table" => {
            let cases = field(input, "cases")?
                .as_array()
                .ok_or_else(|| CliError::Parse("cases must be a list".into()))?;
            let out: Vec<bool> = cases
                .iter()
                .map(|c| Ok(enriques_exists_singular(&matrix_from_json(field(c, "gram")?)?)?))
                .collect::<CliResult<_>>()?;
            plain(json!(out))
        }
        "fm.degree12-matrix" => {
            let p = params_at(input)?;
            let r = fm_report(&p)?;
            // kernel rows up to sign, first nonzero entry positive
            let fixed = orientation_slice_report(&yoshioka_matrix(&p))?.fixed;
            let rows: Vec<Value> = fixed
                .to_rows()
                .into_iter()
                .map(|row| {
                    let neg = row.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
                    let row: Vec<BigInt> = row.into_iter().map(|x| if neg { -x } else { x }).collect();
                    vector_to_json(&row)
                })
                .collect();
            plain(json!({ "matrix": r["matrix"], "det": r["det"], "fixed": rows }))
        }
        "fm.image" => {
            let m = yoshioka_matrix(&params_at(input)?);
            let v: Vec<BigInt> = ints(field(input, "vector")?)?.into_iter().map(BigInt::from).collect();
            if v.len() != 3 {
                return Err(CliError::Parse("vector must have 3 entries".into()));
            }
            plain(vector_to_json(&m.mul_vec(&v)))
        }
        "fm.inverse" => {
            let p = params_at(input)?;
            plain(json!((&yoshioka_matrix(&p) * &yoshioka_inverse(&p)).is_identity()))
        }
        "fm.twist" => {
            let p = params_at(input)?;
            let mut ok = true;
            for n in ints(field(input, "twists")?)? {
                let q = FMParameters::new(p.r0, p.s, p.d0, p.d1 + n * p.r0, p.l + n * p.s * p.d0)?;
                ok &= &twist_matrix(n, p.r0, p.s) * &yoshioka_matrix(&p) == yoshioka_matrix(&q);
            }
            plain(json!(ok))
        }
        "forms.definite-inequivalent" | "forms.gauss-cycle" => {
            let (f, g) = (form_at(input, "first")?, form_at(input, "second")?);
            let d = f.discriminant();
            if d != g.discriminant() {
                return plain(json!({ "discriminant": Value::Null }));
            }
            if id == "forms.gauss-cycle" {
                let p = equivalent(&f, &g, false)?;
                let verified = p.as_ref().is_some_and(|p| f.act(p) == g);
                plain(json!({ "discriminant": int_to_json(&d), "properly_equivalent": verified }))
            } else {
                let p = equivalent(&f, &g, true)?;
                plain(json!({ "discriminant": int_to_json(&d), "equivalent": p.is_some() }))
            }
        }
        "forms.no-two" => {
            let f = BinaryForm::from_gram(&matrix_from_json(field(input, "gram")?)?)?;
            let m = BigInt::from(int_at(input, "value")?);
            plain(json!(represents(&f, &m)?))
        }
        "inv.enriques-triple" => {
            let name = field(input, "name")?.as_str().unwrap_or_default();
            let t = nikulin_triple(&named_lattice(name)?, 22)?;
            plain(json!({ "r": t.r, "a": t.a, "delta": t.delta, "enriques": t.enriques }))
        }
        "lattice.e8-minus-2-disc" => {
            let name = field(input, "name")?.as_str().unwrap_or_default();
            let form = discriminant_form(&named_lattice(name)?);
            plain(json!({ "orders": form.orders().iter().map(int_to_json).collect::<Vec<_>>() }))
        }
        "lattice.u-info" => {
            let info = lattice_info_json(&lattice_at(input, "gram")?);
            plain(json!({ "signature": info["signature"], "det": info["det"], "even": info["even"] }))
        }
        "partners.count" => {
            let ds = ints(field(input, "d")?)?;
            let out: Vec<u64> = ds
                .iter()
                .map(|&d| u64::try_from(d).map(fm_partner_count))
                .collect::<Result<_, _>>()
                .map_err(|_| CliError::Precondition("d must be positive".into()))?;
            plain(json!(out))
        }
        "partners.roots-24" => {
            let n = u64::try_from(int_at(input, "n")?)
                .map_err(|_| CliError::Precondition("n must be positive".into()))?;
            let roots = square_roots_of_unity(n);
            let note = (n % 4 == 0).then(|| {
                format!(
                    "{} classes of square roots of 1 mod {n}, while the partner count for d = {} is {}",
                    roots.len(),
                    n / 4,
                    fm_partner_count(n / 4)
                )
            });
            Ok((json!(roots), note))
        }
        "skew.certificate" => {
            let (a, b) = (lattice_at(input, "first")?, lattice_at(input, "second")?);
            let p = skew_pair_certificate(&a, &b, DEFAULT_SKEW_BOUND)?;
            let u = Lattice::hyperbolic();
            let (g1, g2) = (a.direct_sum(&u), b.direct_sum(&u));
            Ok((
                json!({ "verified": verify_isometry(&p, g2.gram(), g1.gram()) }),
                Some(format!("certificate {}", matrix_to_json(&p))),
            ))
        }
        "skew.regression-map" => {
            let u = Lattice::hyperbolic();
            let g1 = lattice_at(input, "first")?.direct_sum(&u);
            let g2 = lattice_at(input, "second")?.direct_sum(&u);
            let p = matrix_from_json(field(input, "images")?)?.transpose();
            plain(json!(verify_isometry(&p, g2.gram(), g1.gram())))
        }
        "stable.a1-a2" | "stable.rational-quotients" => {
            let (a, b) = (lattice_at(input, "first")?, lattice_at(input, "second")?);
            plain(json!({
                "stably_equivalent": stably_equivalent(&a, &b)?,
                "isomorphic": isomorphic(&a, &b, cap)?,
            }))
        }
        other => Err(CliError::Precondition(format!("no evaluator for claim `{other}`"))),
    }
}

fn load() -> Constants {
    serde_json::from_str(CONSTANTS).expect("bundled constants are valid JSON")
}

/// All claim ids, sorted.
#[cfg(test)]
fn claim_ids() -> Vec<String> {
    let mut ids: Vec<String> = load().claims.into_iter().map(|c| c.id).collect();
    ids.sort();
    ids
}

pub fn run(outdir: &Path, filter: Option<&str>, fault: Option<&str>, cap: u64) -> CliResult<Report> {
    let constants = load();
    let mut claims: Vec<StoredClaim> = constants
        .claims
        .into_iter()
        .filter(|c| filter.map_or(true, |f| c.id.contains(f)))
        .collect();
    claims.sort_by(|a, b| a.id.cmp(&b.id));
    if claims.is_empty() {
        return Err(CliError::Precondition(format!(
            "no claims match filter `{}`",
            filter.unwrap_or_default()
        )));
    }
    if let Some(f) = fault {
        let target = claims
            .iter_mut()
            .find(|c| c.id == f)
            .ok_or_else(|| CliError::Precondition(format!("no selected claim with id `{f}`")))?;
        if !perturb_first_integer(&mut target.input) {
            return Err(CliError::Precondition(format!("claim `{f}` has no numeric input to perturb")));
        }
    }

    let results = claims
        .into_iter()
        .map(|c| {
            let (computed, note, status) = match evaluate(&c.id, &c.input, cap) {
                Ok((v, note)) => {
                    let status = if v == c.expected { Status::Pass } else { Status::Fail };
                    (v, note, status)
                }
                Err(e) => (e.to_json(), None, Status::Error),
            };
            ClaimResult {
                id: c.id,
                source: c.source,
                expected: c.expected,
                computed,
                status,
                note,
            }
        })
        .collect();

    let report = Report {
        constants_version: constants.version,
        filter: filter.map(str::to_string),
        injected_fault: fault.map(str::to_string),
        claims: results,
    };
    std::fs::create_dir_all(outdir)
        .map_err(|e| CliError::Precondition(format!("cannot create {}: {e}", outdir.display())))?;
    let write = |name: &str, body: String| {
        std::fs::write(outdir.join(name), body)
            .map_err(|e| CliError::Precondition(format!("cannot write {name}: {e}")))
    };
    write("report.json", serde_json::to_string_pretty(&report).expect("serializable") + "\n")?;
    write("report.md", report.markdown())?;
    Ok(report)
}
