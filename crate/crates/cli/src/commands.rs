use std::fmt::Write as _;
use std::path::Path;

use lattice_workbench::binary_forms::{
    equivalent, gauss_cycle, reduce_definite, reduce_indefinite, representation, BinaryForm,
};
use lattice_workbench::involutions::nikulin_triple;
use lattice_workbench::io::{
    int_from_json, int_to_json, involution_from_json, lattice_from_json, matrix_from_json,
    matrix_to_json,
};
use lattice_workbench::lattice::{discriminant_form, overlattice, standard_lattice};
use lattice_workbench::mukai::{
    orientation_slice_report, preserves_pairing, slice_gram, twist_matrix, verify_skew_functional,
    yoshioka_inverse, yoshioka_matrix, FMParameters,
};
use lattice_workbench::{IntMatrix, Lattice, Sublattice};
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::{CliError, CliResult, LatticeSource};

pub struct Output {
    pub json: Value,
    pub text: String,
}

pub fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))
}

fn parse_json(text: &str) -> CliResult<Value> {
    serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))
}

/// Direct sum of `+`-separated standard names, e.g. `U(2)+E8(-2)`.
pub fn named_lattice(name: &str) -> CliResult<Lattice> {
    let mut parts = name.split('+');
    let first = parts.next().unwrap_or_default();
    let mut l = standard_lattice(first)?;
    for p in parts {
        l = l.direct_sum(&standard_lattice(p)?);
    }
    Ok(l.with_label(name))
}

fn load_lattice(src: &LatticeSource) -> CliResult<Lattice> {
    match (&src.input, &src.name) {
        (Some(path), _) => Ok(lattice_from_json(&read_file(path)?)?),
        (None, Some(name)) => named_lattice(name),
        (None, None) => Err(CliError::Parse("either --input or --name is required".into())),
    }
}

fn integers(text: &str, expected: usize) -> CliResult<Vec<i64>> {
    let vals: Vec<i64> = text
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Parse(format!("`{text}` is not a comma-separated list of integers")))?;
    if vals.len() != expected {
        return Err(CliError::Parse(format!("expected {expected} integers, got `{text}`")));
    }
    Ok(vals)
}

fn parse_form(text: &str) -> CliResult<BinaryForm> {
    let v = integers(text, 3)?;
    Ok(BinaryForm::new(v[0], v[1], v[2])?)
}

fn form_json(f: &BinaryForm) -> Value {
    json!([int_to_json(&f.a), int_to_json(&f.b), int_to_json(&f.c)])
}

fn matrix_text(m: &IntMatrix) -> String {
    let rows: Vec<String> = m
        .to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
        .map(|r| format!("[{r}]"))
        .collect();
    format!("[{}]", rows.join(", "))
}

pub fn lattice_info_json(l: &Lattice) -> Value {
    let s = l.signature();
    json!({
        "label": l.label(),
        "rank": l.rank(),
        "signature": [s.plus, s.minus],
        "nullity": s.zero,
        "det": int_to_json(&l.det()),
        "even": l.is_even(),
        "unimodular": l.is_unimodular(),
    })
}

pub fn lattice_info(src: &LatticeSource) -> CliResult<Output> {
    let l = load_lattice(src)?;
    let s = l.signature();
    let mut text = String::new();
    if let Some(label) = l.label() {
        writeln!(text, "lattice    {label}").unwrap();
    }
    writeln!(text, "rank       {}", l.rank()).unwrap();
    writeln!(text, "signature  ({}, {})", s.plus, s.minus).unwrap();
    writeln!(text, "det        {}", l.det()).unwrap();
    writeln!(text, "even       {}", l.is_even()).unwrap();
    writeln!(text, "unimodular {}", l.is_unimodular()).unwrap();
    Ok(Output { json: lattice_info_json(&l), text })
}

pub fn lattice_disc_form(src: &LatticeSource) -> CliResult<Output> {
    let l = load_lattice(src)?;
    if l.det() == BigInt::from(0) {
        return Err(CliError::Precondition("lattice is degenerate".into()));
    }
    let form = discriminant_form(&l);
    let orders: Vec<Value> = form.orders().iter().map(int_to_json).collect();
    let q: Option<Vec<String>> = form
        .quadratic_values()
        .map(|qs| qs.iter().map(|x| x.to_string()).collect());
    let b: Vec<Vec<String>> = form
        .bilinear_table()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect();
    let mut text = String::new();
    let group: Vec<String> = form.orders().iter().map(|o| format!("Z/{o}")).collect();
    writeln!(
        text,
        "d(L) = {}  (order {})",
        if group.is_empty() { "0".to_string() } else { group.join(" + ") },
        form.order()
    )
    .unwrap();
    if let Some(q) = &q {
        writeln!(text, "q on generators (mod 2): {}", q.join(", ")).unwrap();
    }
    for (i, row) in b.iter().enumerate() {
        writeln!(text, "b[{i}] (mod 1): {}", row.join(", ")).unwrap();
    }
    Ok(Output {
        json: json!({
            "orders": orders,
            "invariant_factors": form.invariant_factors().iter().map(int_to_json).collect::<Vec<_>>(),
            "quadratic": q,
            "bilinear": b,
        }),
        text,
    })
}

pub fn lattice_complement(src: &LatticeSource, basis: &str) -> CliResult<Output> {
    let l = load_lattice(src)?;
    let rows = matrix_from_json(&parse_json(basis)?)?;
    let sub = Sublattice::new(l, rows)?;
    let perp = sub.orthogonal_complement();
    let gram = perp.induced_gram();
    let text = format!(
        "complement rank {}\nbasis {}\ngram  {}\n",
        perp.rank(),
        matrix_text(perp.basis()),
        matrix_text(&gram)
    );
    Ok(Output {
        json: json!({
            "rank": perp.rank(),
            "basis": matrix_to_json(perp.basis()),
            "gram": matrix_to_json(&gram),
            "sublattice_saturated": sub.is_saturated(),
        }),
        text,
    })
}

pub fn lattice_overlattice(src: &LatticeSource, glue: &str) -> CliResult<Output> {
    let l = load_lattice(src)?;
    let h = matrix_from_json(&parse_json(glue)?)?.to_rows();
    let ov = overlattice(&l, &h)?;
    let basis: Vec<Vec<String>> = (0..ov.basis.rows())
        .map(|i| ov.basis.row(i).iter().map(|x| x.to_string()).collect())
        .collect();
    let text = format!(
        "overlattice det {}\ngram {}\n",
        ov.lattice.det(),
        matrix_text(ov.lattice.gram())
    );
    Ok(Output {
        json: json!({
            "gram": matrix_to_json(ov.lattice.gram()),
            "det": int_to_json(&ov.lattice.det()),
            "basis": basis,
        }),
        text,
    })
}

pub fn form_reduce(form: &str, improper: bool) -> CliResult<Output> {
    let f = parse_form(form)?;
    let (r, p) = if f.is_definite() {
        reduce_definite(&f, improper)?
    } else {
        reduce_indefinite(&f)?
    };
    Ok(Output {
        json: json!({
            "form": form_json(&f),
            "discriminant": int_to_json(&f.discriminant()),
            "reduced": form_json(&r),
            "transform": matrix_to_json(&p),
        }),
        text: format!("{f} -> {r} via {}\n", matrix_text(&p)),
    })
}

pub fn form_cycle(form: &str) -> CliResult<Output> {
    let f = parse_form(form)?;
    let cycle = gauss_cycle(&f)?;
    let mut text = String::new();
    for g in &cycle.forms {
        writeln!(text, "{g}").unwrap();
    }
    Ok(Output {
        json: json!({
            "discriminant": int_to_json(&f.discriminant()),
            "length": cycle.forms.len(),
            "forms": cycle.forms.iter().map(form_json).collect::<Vec<_>>(),
        }),
        text,
    })
}

pub fn form_equivalent(form: &str, other: &str, improper: bool) -> CliResult<Output> {
    let (f, g) = (parse_form(form)?, parse_form(other)?);
    let p = equivalent(&f, &g, improper)?;
    let text = match &p {
        Some(p) => format!("equivalent via {}\n", matrix_text(p)),
        None => "not equivalent\n".to_string(),
    };
    Ok(Output {
        json: json!({
            "equivalent": p.is_some(),
            "transform": p.as_ref().map(matrix_to_json),
        }),
        text,
    })
}

pub fn form_represents(form: &str, value: &str) -> CliResult<Output> {
    let f = parse_form(form)?;
    let m: BigInt = value
        .trim()
        .parse()
        .map_err(|_| CliError::Parse(format!("`{value}` is not an integer")))?;
    let r = representation(&f, &m)?;
    let text = match &r {
        Some((x, y)) => format!("{f} represents {m} at ({x}, {y})\n"),
        None => format!("{f} does not represent {m}\n"),
    };
    Ok(Output {
        json: json!({
            "represents": r.is_some(),
            "witness": r.as_ref().map(|(x, y)| json!([int_to_json(x), int_to_json(y)])),
        }),
        text,
    })
}

pub fn fm_report(p: &FMParameters) -> CliResult<Value> {
    let m = yoshioka_matrix(p);
    let rep = orientation_slice_report(&m)?;
    Ok(json!({
        "params": [p.r0, p.s, p.d0, p.d1, p.l],
        "two_d": p.two_d(),
        "matrix": matrix_to_json(&m),
        "inverse": matrix_to_json(&yoshioka_inverse(p)),
        "det": int_to_json(&rep.det),
        "fixed": matrix_to_json(&rep.fixed),
        "preserves_pairing": preserves_pairing(&m, &slice_gram(p.two_d())),
    }))
}

pub fn fm_matrix(params: Option<&str>, solve: Option<&str>) -> CliResult<Output> {
    let p = match (params, solve) {
        (Some(t), _) => {
            let v = integers(t, 5)?;
            FMParameters::new(v[0], v[1], v[2], v[3], v[4])?
        }
        (None, Some(t)) => {
            let v = integers(t, 3)?;
            FMParameters::solve(v[0], v[1], v[2])?
        }
        (None, None) => return Err(CliError::Parse("either --params or --solve is required".into())),
    };
    let json = fm_report(&p)?;
    let text = format!(
        "params (r0, s, d0, d1, l) = ({}, {}, {}, {}, {})\nmatrix {}\ndet    {}\n",
        p.r0,
        p.s,
        p.d0,
        p.d1,
        p.l,
        matrix_text(&yoshioka_matrix(&p)),
        json["det"]
    );
    Ok(Output { json, text })
}

pub fn fm_twist(n: i64, r0: i64, s: i64) -> CliResult<Output> {
    let m = twist_matrix(n, r0, s);
    let two_d = 2 * r0 * s;
    Ok(Output {
        json: json!({
            "matrix": matrix_to_json(&m),
            "preserves_pairing": preserves_pairing(&m, &slice_gram(two_d)),
        }),
        text: format!("{}\n", matrix_text(&m)),
    })
}

pub fn fm_skew_check(input: &Path) -> CliResult<Output> {
    let v = parse_json(&read_file(input)?)?;
    let field = |k: &str| -> CliResult<IntMatrix> {
        let x = v
            .get(k)
            .ok_or_else(|| CliError::Parse(format!("missing `{k}`")))?;
        Ok(matrix_from_json(x)?)
    };
    let (phi, i1, i2) = (field("phi")?, field("iota1")?, field("iota2")?);
    let block = v
        .get("block")
        .and_then(Value::as_array)
        .filter(|b| b.len() == 2)
        .ok_or_else(|| CliError::Parse("`block` must be [start, end]".into()))?;
    let bound = |x: &Value| -> CliResult<usize> {
        let b = int_from_json(x)?;
        usize::try_from(&b).map_err(|_| CliError::Parse(format!("bad block bound {b}")))
    };
    let r = verify_skew_functional(&phi, &i1, &i2, bound(&block[0])?..bound(&block[1])?)?;
    Ok(Output {
        json: serde_json::to_value(r).expect("serializable"),
        text: format!("holds {}\nholds for -phi {}\n", r.holds, r.holds_for_negative),
    })
}

pub fn involution_eigen(input: &Path) -> CliResult<Output> {
    let il = involution_from_json(&read_file(input)?)?;
    let (plus, minus) = il.eigenlattices();
    let rank = il.lattice().rank();
    let part = |s: &Sublattice| -> CliResult<Value> {
        let l = s.lattice()?;
        let mut info = lattice_info_json(&l);
        info["basis"] = matrix_to_json(s.basis());
        info["gram"] = matrix_to_json(l.gram());
        Ok(info)
    };
    let triple = plus
        .lattice()
        .ok()
        .and_then(|s| nikulin_triple(&s, rank).ok())
        .map(|t| serde_json::to_value(t).expect("serializable"));
    let mut text = format!(
        "invariant rank {}, gram {}\nanti-invariant rank {}, gram {}\n",
        plus.rank(),
        matrix_text(&plus.induced_gram()),
        minus.rank(),
        matrix_text(&minus.induced_gram())
    );
    if let Some(t) = &triple {
        writeln!(text, "(r, a, delta) = ({}, {}, {})", t["r"], t["a"], t["delta"]).unwrap();
    }
    Ok(Output {
        json: json!({
            "invariant": part(&plus)?,
            "anti_invariant": part(&minus)?,
            "nikulin_triple": triple,
        }),
        text,
    })
}
