//! JSON interchange: scalars as strings, matrices as row-major arrays,
//! metrics as `{"diag": [...]}` or upper-triangle `[i, j, value]` entries
//! with 1-based indices.

use std::path::Path;

use nilsol_core::extension::{CorrespondenceReport, Decomposition, ExtensionResult};
use nilsol_core::lie::{to_notation, DerivationBasis, StructuralReport};
use nilsol_core::metric::{EinsteinCheck, MetricLieAlgebra, RicciData};
use nilsol_core::soliton::{NikolayevskyResult, SolitonCertificate, Table1Result};
use nilsol_core::{parse_structure, LieAlgebra, Matrix, Scalar, Signature, Vector};
use serde_json::{json, Value};
use thiserror::Error;

use crate::expr::{eval, Bindings, ExprError};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Core(#[from] nilsol_core::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, FormatError>;

fn shape(msg: impl Into<String>) -> FormatError {
    FormatError::Shape(msg.into())
}

pub fn scalar_json(s: &Scalar) -> Value {
    Value::String(s.to_string())
}

pub fn vector_json(v: &[Scalar]) -> Value {
    Value::Array(v.iter().map(scalar_json).collect())
}

pub fn matrix_json(m: &Matrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector_json(r)).collect())
}

pub fn signature_json(s: &Signature) -> Value {
    json!([s.positive, s.negative, s.zero])
}

pub fn algebra_json(l: &LieAlgebra) -> Value {
    let constants: Vec<Value> = l
        .nonzero_constants()
        .into_iter()
        .filter(|(i, j, _, _)| i < j)
        .map(|(i, j, k, c)| json!([i + 1, j + 1, k + 1, c.to_string()]))
        .collect();
    if l.is_exact() {
        json!({ "dim": l.dim(), "notation": to_notation(l), "brackets": constants })
    } else {
        json!({ "dim": l.dim(), "brackets": constants })
    }
}

fn scalar_value(v: &Value, vars: &Bindings) -> Result<Scalar> {
    match v {
        Value::String(s) => Ok(eval(s, vars)?),
        Value::Number(n) => Ok(eval(&n.to_string(), vars)?),
        other => Err(shape(format!("expected a scalar, found {other}"))),
    }
}

fn index(v: &Value, n: usize) -> Result<usize> {
    let i = v.as_u64().ok_or_else(|| shape(format!("expected an index, found {v}")))? as usize;
    if i == 0 || i > n {
        return Err(shape(format!("index {i} out of range 1..={n}")));
    }
    Ok(i - 1)
}

/// Algebra from a notation string or `{"dim", "brackets": [[i, j, k, c], ...]}`
/// meaning `[e_i, e_j]` has coefficient `c` on `e_k`.
pub fn parse_algebra(v: &Value, vars: &Bindings) -> Result<LieAlgebra> {
    match v {
        Value::String(s) => Ok(parse_structure(s)?),
        Value::Object(o) => {
            if let Some(Value::String(s)) = o.get("notation") {
                return Ok(parse_structure(s)?);
            }
            let n = o.get("dim").and_then(Value::as_u64).ok_or_else(|| shape("algebra needs \"dim\""))? as usize;
            let mut entries = Vec::new();
            for b in o.get("brackets").and_then(Value::as_array).ok_or_else(|| shape("algebra needs \"brackets\""))? {
                let b = b.as_array().filter(|b| b.len() == 4).ok_or_else(|| shape("bracket entries are [i, j, k, c]"))?;
                entries.push((index(&b[0], n)?, index(&b[1], n)?, index(&b[2], n)?, scalar_value(&b[3], vars)?));
            }
            Ok(LieAlgebra::from_constants(n, &entries)?)
        }
        other => Err(shape(format!("expected an algebra, found {other}"))),
    }
}

fn entry_list(list: &[Value], n: usize, vars: &Bindings, symmetric: bool) -> Result<Matrix> {
    let mut m = Matrix::zeros(n, n);
    for e in list {
        let e = e.as_array().filter(|e| e.len() == 3).ok_or_else(|| shape("entries are [i, j, value]"))?;
        let (i, j) = (index(&e[0], n)?, index(&e[1], n)?);
        let x = scalar_value(&e[2], vars)?;
        m.set(i, j, x.clone());
        if symmetric {
            m.set(j, i, x);
        }
    }
    Ok(m)
}

fn is_entry_list(list: &[Value]) -> bool {
    list.iter().all(|e| matches!(e.as_array(), Some(a) if a.len() == 3 && a[0].is_u64() && a[1].is_u64()))
}

fn matrix_value(v: &Value, n: usize, vars: &Bindings, symmetric: bool) -> Result<Matrix> {
    match v {
        Value::Object(o) => {
            if let Some(d) = o.get("diag") {
                let d = d.as_array().ok_or_else(|| shape("\"diag\" must be a list"))?;
                if d.len() != n {
                    return Err(shape(format!("\"diag\" has {} entries, expected {n}", d.len())));
                }
                let d = d.iter().map(|x| scalar_value(x, vars)).collect::<Result<Vec<_>>>()?;
                let mut m = Matrix::diag(&d);
                if let Some(Value::Array(extra)) = o.get("entries") {
                    let e = entry_list(extra, n, vars, symmetric)?;
                    m = &m + &e;
                }
                return Ok(m);
            }
            match o.get("entries") {
                Some(Value::Array(list)) => entry_list(list, n, vars, symmetric),
                _ => Err(shape("matrix object needs \"diag\" or \"entries\"")),
            }
        }
        Value::Array(list) if list.is_empty() => Ok(Matrix::zeros(n, n)),
        Value::Array(list) if is_entry_list(list) => entry_list(list, n, vars, symmetric),
        Value::Array(rows) => {
            if rows.len() != n {
                return Err(shape(format!("matrix has {} rows, expected {n}", rows.len())));
            }
            let mut out = Vec::with_capacity(n);
            for r in rows {
                let r = r.as_array().filter(|r| r.len() == n).ok_or_else(|| shape(format!("rows must have {n} entries")))?;
                out.push(r.iter().map(|x| scalar_value(x, vars)).collect::<Result<Vec<_>>>()?);
            }
            Ok(Matrix::from_rows(out))
        }
        other => Err(shape(format!("expected a matrix, found {other}"))),
    }
}

/// Endomorphism: rows, `{"diag": [...]}` or `{"entries": [[row, col, value]]}`.
pub fn parse_matrix(v: &Value, n: usize, vars: &Bindings) -> Result<Matrix> {
    matrix_value(v, n, vars, false)
}

/// Gram matrix: rows, `{"diag": [...]}` or upper-triangle `[i, j, value]` entries.
pub fn parse_metric(v: &Value, n: usize, vars: &Bindings) -> Result<Matrix> {
    matrix_value(v, n, vars, true)
}

pub fn parse_vector(v: &Value, n: usize, vars: &Bindings) -> Result<Vector> {
    let list = v.as_array().filter(|l| l.len() == n).ok_or_else(|| shape(format!("expected a vector of length {n}")))?;
    list.iter().map(|x| scalar_value(x, vars)).collect()
}

/// Unit vectors for a list of 1-based indices, or explicit coordinate vectors.
pub fn parse_basis(v: &Value, n: usize, vars: &Bindings) -> Result<Vec<Vector>> {
    let list = v.as_array().ok_or_else(|| shape("expected a list of basis vectors"))?;
    list.iter()
        .map(|x| {
            if x.is_u64() {
                let i = index(x, n)?;
                Ok((0..n).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect())
            } else {
                parse_vector(x, n, vars)
            }
        })
        .collect()
}

/// Read a command-line value: inline JSON, `@path` to a JSON file, or plain text.
pub fn read_arg(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(Path::new(path))
            .map_err(|source| FormatError::Io { path: path.to_string(), source }),
        None => Ok(arg.to_string()),
    }
}

/// Metric from the command line: `diag:1,1,-1`, `entries:1,1,1;2,3,1/2`, JSON, or `@file`.
pub fn parse_metric_arg(arg: &str, n: usize) -> Result<Matrix> {
    let text = read_arg(arg)?;
    let text = text.trim();
    let vars = Bindings::new();
    if let Some(rest) = text.strip_prefix("diag:") {
        let d: Vec<Value> = rest.split(',').map(|s| Value::String(s.trim().to_string())).collect();
        return parse_metric(&json!({ "diag": d }), n, &vars);
    }
    if let Some(rest) = text.strip_prefix("entries:") {
        let mut list = Vec::new();
        for item in rest.split(';').filter(|s| !s.trim().is_empty()) {
            let parts: Vec<&str> = item.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(shape(format!("metric entry {item:?} is not i,j,value")));
            }
            let i: u64 = parts[0].parse().map_err(|_| shape(format!("bad index {:?}", parts[0])))?;
            let j: u64 = parts[1].parse().map_err(|_| shape(format!("bad index {:?}", parts[1])))?;
            list.push(json!([i, j, parts[2]]));
        }
        return parse_metric(&Value::Array(list), n, &vars);
    }
    let v: Value = serde_json::from_str(text)?;
    parse_metric(&v, n, &vars)
}

/// Algebra from the command line: notation, JSON, or `@file`.
pub fn parse_algebra_arg(arg: &str) -> Result<LieAlgebra> {
    let text = read_arg(arg)?;
    let text = text.trim();
    if text.starts_with('{') {
        let v: Value = serde_json::from_str(text)?;
        parse_algebra(&v, &Bindings::new())
    } else {
        Ok(parse_structure(text)?)
    }
}

pub fn structure_json(r: &StructuralReport) -> Value {
    let dims = |s: &[Vec<Vector>]| s.iter().map(Vec::len).collect::<Vec<_>>();
    json!({
        "lower_central_series_dims": dims(&r.lower_central_series),
        "derived_series_dims": dims(&r.derived_series),
        "center": r.center.iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
        "is_nilpotent": r.is_nilpotent,
        "nilpotency_step": r.nilpotency_step,
        "is_solvable": r.is_solvable,
        "is_unimodular": r.is_unimodular,
    })
}

pub fn ricci_json(r: &RicciData, e: &EinsteinCheck) -> Value {
    json!({
        "ric": matrix_json(r.ric.as_matrix()),
        "ricci_operator": matrix_json(&r.ricci_operator),
        "scal": scalar_json(&r.scal),
        "h": vector_json(&r.h),
        "einstein": e.is_einstein,
        "lambda": e.lambda.as_ref().map(scalar_json),
    })
}

pub fn certificate_json(c: &SolitonCertificate) -> Value {
    json!({
        "lambda": scalar_json(&c.lambda),
        "D": matrix_json(&c.d),
        "type": c.soliton_type.to_string(),
        "solution_space_dim": c.solution_space_dim,
        "noteworthy": c.noteworthy,
        "checks": {
            "tr_d_sq_identity": c.checks.tr_d_sq_identity,
            "tr_ric_sq_identity": c.checks.tr_ric_sq_identity,
            "d_self_adjoint": c.checks.d_self_adjoint,
            "d_is_derivation": c.checks.d_is_derivation,
        },
    })
}

pub fn nikolayevsky_json(r: &NikolayevskyResult, t: &Table1Result, nice: bool) -> Value {
    json!({
        "N": matrix_json(&r.n),
        "N_diag": vector_json(&r.n.diagonal()),
        "eigenvalues": r.eigenvalues.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
        "n_dim": t.n_basis.len(),
        "intersection_dim": t.intersection.len(),
        "intersection_basis": t.intersection.iter().map(matrix_json).collect::<Vec<_>>(),
        "nice": nice,
    })
}

pub fn derivations_json(d: &DerivationBasis) -> Value {
    json!({
        "dim": d.dim(),
        "basis": d.basis.iter().map(matrix_json).collect::<Vec<_>>(),
        "traces": vector_json(&d.traces()),
        "trace_form": matrix_json(d.gram_tr.as_matrix()),
        "null_space_dim": d.null_basis.len(),
    })
}

pub fn decomposition_json(d: &Decomposition) -> Value {
    let f = &d.flags;
    json!({
        "flags": {
            "is_standard": f.is_standard,
            "is_orthogonal": f.is_orthogonal,
            "ideal_nondegenerate": f.ideal_nondegenerate,
            "is_pseudo_iwasawa": f.is_pseudo_iwasawa,
            "each_adx_normal": f.each_adx_normal,
            "each_adx_star_is_derivation": f.each_adx_star_is_derivation,
        },
        "violation": d.violation,
        "h": vector_json(&d.h),
        "ad_complement": d.ad_complement.iter().map(matrix_json).collect::<Vec<_>>(),
    })
}

pub fn metric_algebra_json(m: &MetricLieAlgebra) -> Value {
    json!({
        "algebra": algebra_json(m.algebra()),
        "metric": matrix_json(m.metric().gram().as_matrix()),
        "signature": signature_json(&m.metric().signature()),
    })
}

pub fn extension_json(e: &ExtensionResult) -> Value {
    json!({
        "kind": e.kind.to_string(),
        "extended": metric_algebra_json(&e.extended),
        "decomposition": decomposition_json(&e.decomposition),
        "verification": {
            "einstein": e.verification.einstein,
            "lambda": e.verification.lambda.as_ref().map(scalar_json),
            "signature": signature_json(&e.verification.signature),
        },
    })
}

pub fn correspondence_json(r: &CorrespondenceReport) -> Value {
    json!({
        "einstein": r.einstein,
        "lambda": r.lambda.as_ref().map(scalar_json),
        "nilsoliton_condition": r.nilsoliton_condition,
        "trace_condition": r.trace_condition,
        "restriction_lambda": r.restriction_lambda.as_ref().map(scalar_json),
        "D": matrix_json(&r.d),
        "restriction_type": r.restriction_type.to_string(),
        "consistent": r.consistent,
        "corollary": r.corollary.map(|c| format!("{c:?}")),
        "corollary_holds": r.corollary_holds,
        "nilradical_is_ideal": r.nilradical_is_ideal,
    })
}
