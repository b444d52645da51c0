use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lie::algebra::unit_vectors;
use crate::lie::{derivations, semidirect, SemidirectSpec};
use crate::linalg::{coordinates, signature, solve_linear, Matrix, Signature, SymMatrix, Vector};
use crate::metric::{adjoint_of, einstein_check, MetricLieAlgebra};
use crate::scalar::Scalar;
use crate::soliton::{SolitonCertificate, SolitonType};

use super::{analyze_decomposition, close, label, negligible, negligible_matrix, precondition, Decomposition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtensionKind {
    Iwasawa,
    RankOneNil4,
    RankOneNil3,
    RicciFlatNil1,
    RicciFlatNil2,
    NonIwasawa,
}

impl core::fmt::Display for ExtensionKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        core::fmt::Debug::fmt(self, f)
    }
}

/// Einstein test on the extended algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct Verification {
    pub einstein: bool,
    pub lambda: Option<Scalar>,
    pub signature: Signature,
}

/// `g ⋊ a` with its metric, the decomposition `g ⊕ a` and the Einstein test.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionResult {
    pub extended: MetricLieAlgebra,
    pub decomposition: Decomposition,
    pub kind: ExtensionKind,
    pub verification: Verification,
}

/// `Tr(A_i A_j)`, symmetric by construction.
fn trace_form(ms: &[Matrix]) -> Matrix {
    let k = ms.len();
    let mut t = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = (&ms[i] * &ms[j]).trace();
            t.set(j, i, v.clone());
            t.set(i, j, v);
        }
    }
    t
}

fn nondegenerate(m: &Matrix) -> bool {
    signature(&SymMatrix::symmetrize(m)).is_nondegenerate()
}

fn is_self_adjoint(m: &MetricLieAlgebra, f: &Matrix) -> bool {
    close(&adjoint_of(m.metric(), f), f)
}

fn check_derivations(m: &MetricLieAlgebra, a: &[Matrix], self_adjoint: bool) -> Result<()> {
    let n = m.dim();
    for (i, x) in a.iter().enumerate() {
        if x.rows() != n || x.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: x.rows() });
        }
        if !m.algebra().is_derivation(x) {
            return Err(Error::NotDerivation(label(i)));
        }
        if self_adjoint && !is_self_adjoint(m, x) {
            return Err(precondition(format!("{} is not self-adjoint", label(i))));
        }
    }
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            if !negligible_matrix(&a[i].commutator(&a[j])) {
                return Err(Error::NotCommuting(format!("{} and {}", label(i), label(j))));
            }
        }
    }
    Ok(())
}

fn span_coordinates(a: &[Matrix], d: &Matrix) -> Option<Vector> {
    let cols: Vec<Vector> = a.iter().map(Matrix::vectorize).collect();
    coordinates(&cols, &d.vectorize())
}

fn check_a_metric(a_metric: &Matrix, k: usize) -> Result<()> {
    if a_metric.rows() != k || a_metric.cols() != k {
        return Err(Error::DimensionMismatch { expected: k, found: a_metric.rows() });
    }
    if !close(a_metric, &a_metric.transpose()) {
        return Err(Error::NotSymmetric);
    }
    Ok(())
}

/// Build `g ⋊ a` with metric `⟨,⟩_g ⊕ a_gram`, where `a` acts by `acting`.
fn assemble(g: &MetricLieAlgebra, acting: Vec<Matrix>, a_gram: &Matrix, kind: ExtensionKind) -> Result<ExtensionResult> {
    let n = g.dim();
    let k = acting.len();
    let algebra = semidirect(&SemidirectSpec::new(g.algebra().clone(), acting))?;
    let gram = g.metric().gram().as_matrix().direct_sum(&SymMatrix::symmetrize(a_gram));
    let extended = MetricLieAlgebra::from_gram(algebra, gram)?;
    let e = unit_vectors(n + k);
    let decomposition = analyze_decomposition(&extended, &e[..n], &e[n..])?;
    let check = einstein_check(&extended);
    let verification =
        Verification { einstein: check.is_einstein, lambda: check.lambda, signature: extended.metric().signature() };
    Ok(ExtensionResult { extended, decomposition, kind, verification })
}

/// `g ⋊ (a ⊕ ℝH)` with `ad H = 0`, `⟨H, H⟩ = 0` and `⟨X, H⟩ = Tr X`.
fn assemble_with_h(
    g: &MetricLieAlgebra,
    mut acting: Vec<Matrix>,
    a_metric: &Matrix,
    kind: ExtensionKind,
) -> Result<ExtensionResult> {
    let n = g.dim();
    let k = acting.len();
    let traces: Vec<Scalar> = acting.iter().map(Matrix::trace).collect();
    // the metric must be nondegenerate on the trace-free part of a
    let functional = Matrix::from_rows(alloc::vec![traces.clone()]);
    let a0 = functional.kernel();
    let restricted = Matrix::from_fn(a0.len(), a0.len(), |i, j| {
        let w = a_metric.mul_vec(&a0[j]);
        a0[i].iter().zip(&w).map(|(x, y)| x * y).sum()
    });
    if !nondegenerate(&restricted) {
        return Err(precondition("a_metric is degenerate on the trace-free part of a"));
    }
    let gram = Matrix::from_fn(k + 1, k + 1, |i, j| match (i < k, j < k) {
        (true, true) => a_metric.get(i, j).clone(),
        (true, false) => traces[i].clone(),
        (false, true) => traces[j].clone(),
        (false, false) => Scalar::zero(),
    });
    acting.push(Matrix::zeros(n, n));
    assemble(g, acting, &gram, kind)
}

/// Extension by a space of self-adjoint derivations containing `D`, with
/// metric `−(1/λ) Tr(XY)` on `a`.
pub fn extend_iwasawa(m: &MetricLieAlgebra, cert: &SolitonCertificate, a_basis: &[Matrix]) -> Result<ExtensionResult> {
    let lambda = &cert.lambda;
    if negligible(lambda) {
        return Err(precondition("lambda must be nonzero"));
    }
    check_derivations(m, a_basis, true)?;
    if span_coordinates(a_basis, &cert.d).is_none() {
        return Err(precondition("D is not in the span of a_basis"));
    }
    let t = trace_form(a_basis);
    if !nondegenerate(&t) {
        return Err(precondition("trace form is degenerate on a"));
    }
    let inv = lambda.inv().ok_or_else(|| precondition("lambda must be nonzero"))?;
    assemble(m, a_basis.to_vec(), &t.scale(&(-inv)), ExtensionKind::Iwasawa)
}

/// `g ⋊_D ℝe₀` with `⟨e₀, e₀⟩ = Tr D`.
pub fn extend_rank_one_nil4(m: &MetricLieAlgebra, cert: &SolitonCertificate) -> Result<ExtensionResult> {
    if cert.soliton_type != SolitonType::Nil4 {
        return Err(precondition(format!("expected a Nil4 soliton, found {}", cert.soliton_type)));
    }
    let tr = cert.d.trace();
    if negligible(&tr) {
        return Err(precondition("Tr D = 0"));
    }
    assemble(m, alloc::vec![cert.d.clone()], &Matrix::diag(&[tr]), ExtensionKind::RankOneNil4)
}

/// `g ⋊_ψ ℝe₀` over an Einstein `g` with `⟨e₀, e₀⟩ = −(1/λ) Tr ψ²`.
pub fn extend_rank_one_nil3(m: &MetricLieAlgebra, psi: &Matrix) -> Result<ExtensionResult> {
    let lambda = einstein_check(m).lambda.ok_or_else(|| precondition("metric is not Einstein"))?;
    if negligible(&lambda) {
        return Err(precondition("lambda must be nonzero"));
    }
    check_derivations(m, core::slice::from_ref(psi), true)?;
    let tr2 = (psi * psi).trace();
    if negligible(&tr2) {
        return Err(precondition("Tr psi^2 = 0"));
    }
    let inv = lambda.inv().ok_or_else(|| precondition("lambda must be nonzero"))?;
    assemble(m, alloc::vec![psi.clone()], &Matrix::diag(&[-(tr2 * inv)]), ExtensionKind::RankOneNil3)
}

/// Ricci-flat extension of a `Nil1` or `Nil2` soliton by self-adjoint
/// derivations on which the trace form vanishes.
///
/// For `Nil1` with some derivation of nonzero trace, a central `H` is
/// adjoined after the given basis.
pub fn extend_ricci_flat(
    m: &MetricLieAlgebra,
    cert: &SolitonCertificate,
    a_basis: &[Matrix],
    a_metric: &Matrix,
) -> Result<ExtensionResult> {
    let k = a_basis.len();
    check_derivations(m, a_basis, true)?;
    check_a_metric(a_metric, k)?;
    if !negligible_matrix(&trace_form(a_basis)) {
        return Err(precondition("trace form is not zero on a"));
    }
    let traces: Vec<Scalar> = a_basis.iter().map(Matrix::trace).collect();
    let trace_free = traces.iter().all(negligible);
    match cert.soliton_type {
        SolitonType::Nil1 if trace_free => {
            if !nondegenerate(a_metric) {
                return Err(precondition("a_metric is degenerate"));
            }
            assemble(m, a_basis.to_vec(), a_metric, ExtensionKind::RicciFlatNil1)
        }
        SolitonType::Nil1 => assemble_with_h(m, a_basis.to_vec(), a_metric, ExtensionKind::RicciFlatNil1),
        SolitonType::Nil2 => {
            let c = span_coordinates(a_basis, &cert.d).ok_or_else(|| precondition("D is not in the span of a_basis"))?;
            if trace_free {
                return Err(precondition("a contains no derivation with nonzero trace"));
            }
            let pairing = a_metric.transpose().mul_vec(&c);
            if !pairing.iter().zip(&traces).all(|(p, t)| negligible(&(p - t))) {
                return Err(precondition("a_metric does not satisfy <D, X> = Tr X"));
            }
            if !nondegenerate(a_metric) {
                return Err(precondition("a_metric is degenerate"));
            }
            assemble(m, a_basis.to_vec(), a_metric, ExtensionKind::RicciFlatNil2)
        }
        t => Err(precondition(format!("expected a Nil1 or Nil2 soliton, found {t}"))),
    }
}

/// Whether a self-adjoint derivation `X` commuting with `D` exists with
/// `Tr X ≠ 0` and `Tr X² = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct CompanionAnalysis {
    /// Basis of the self-adjoint derivations commuting with `D`.
    pub candidates: Vec<Matrix>,
    /// `Tr(X_i X_j)` on the candidates.
    pub trace_form: Matrix,
    pub exists: bool,
}

/// Decide whether a `Nil2` soliton admits the companion derivation needed by
/// a Ricci-flat extension.
pub fn ricci_flat_companion(m: &MetricLieAlgebra, d: &Matrix) -> Result<CompanionAnalysis> {
    if !m.is_exact() {
        return Err(Error::ApproxBackend("ricci_flat_companion"));
    }
    let n = m.dim();
    let der = derivations(m.algebra());
    let k = der.dim();
    // linear conditions f* = f and [f, D] = 0 on the coefficients
    let images: Vec<(Matrix, Matrix)> =
        der.basis.iter().map(|x| (&adjoint_of(m.metric(), x) - x, x.commutator(d))).collect();
    let rows = 2 * n * n;
    let a = Matrix::from_fn(rows, k, |r, c| {
        let (block, idx) = (r / (n * n), r % (n * n));
        let mtx = if block == 0 { &images[c].0 } else { &images[c].1 };
        mtx.get(idx / n, idx % n).clone()
    });
    let candidates: Vec<Matrix> = if k == 0 { Vec::new() } else { a.kernel().iter().map(|c| der.combine(c)).collect() };
    let q = trace_form(&candidates);
    let ell: Vec<Scalar> = candidates.iter().map(Matrix::trace).collect();
    let sig = signature(&SymMatrix::symmetrize(&q));
    let exists = if sig.positive > 0 && sig.negative > 0 {
        // isotropic vectors of an indefinite form span the whole space
        ell.iter().any(|t| !t.is_zero())
    } else {
        q.kernel().iter().any(|v| !v.iter().zip(&ell).map(|(x, y)| x * y).sum::<Scalar>().is_zero())
    };
    Ok(CompanionAnalysis { candidates, trace_form: q, exists })
}

/// Extension by a space `a` of commuting derivations whose self-adjoint
/// parts are derivations commuting with `a`.
///
/// Dispatches on `λ`, `D` and the traces: for `λ ≠ 0` the metric on `a` is
/// `−(1/λ) Tr(X^s Y^s)` and `a_metric` is ignored; otherwise `a_metric` is
/// required, and when `D = 0` with some trace nonzero a central `H` is
/// adjoined as in the Ricci-flat construction.
pub fn extend_non_iwasawa(
    m: &MetricLieAlgebra,
    cert: &SolitonCertificate,
    a_basis: &[Matrix],
    a_metric: Option<&Matrix>,
) -> Result<ExtensionResult> {
    let k = a_basis.len();
    check_derivations(m, a_basis, false)?;
    let half = Scalar::ratio(1, 2);
    let syms: Vec<Matrix> = a_basis.iter().map(|f| (f + &adjoint_of(m.metric(), f)).scale(&half)).collect();
    for (i, s) in syms.iter().enumerate() {
        if !m.algebra().is_derivation(s) {
            return Err(Error::NotDerivation(format!("self-adjoint part of {}", label(i))));
        }
        for (j, f) in a_basis.iter().enumerate() {
            if !negligible_matrix(&s.commutator(f)) {
                return Err(Error::NotCommuting(format!("self-adjoint part of {} and {}", label(i), label(j))));
            }
        }
    }
    let s_form = trace_form(&syms);
    let lambda = &cert.lambda;
    if !negligible(lambda) {
        if span_coordinates(&syms, &cert.d).is_none() {
            return Err(precondition("D is not in the span of the self-adjoint parts"));
        }
        if !nondegenerate(&s_form) {
            return Err(precondition("<,>_s is degenerate on a"));
        }
        let inv = lambda.inv().ok_or_else(|| precondition("lambda must be nonzero"))?;
        return assemble(m, a_basis.to_vec(), &s_form.scale(&(-inv)), ExtensionKind::NonIwasawa);
    }
    if !negligible_matrix(&s_form) {
        return Err(precondition("lambda = 0 requires <,>_s = 0 on a"));
    }
    let a_metric = a_metric.ok_or_else(|| precondition("a_metric is required when lambda = 0"))?;
    check_a_metric(a_metric, k)?;
    let traces: Vec<Scalar> = a_basis.iter().map(Matrix::trace).collect();
    if !negligible_matrix(&cert.d) {
        // some c with Σ c_i f_i^s = D and a_metric c = Tr
        let n2 = m.dim() * m.dim();
        let sv: Vec<Vector> = syms.iter().map(Matrix::vectorize).collect();
        let dv = cert.d.vectorize();
        let a = Matrix::from_fn(n2 + k, k, |r, c| if r < n2 { sv[c][r].clone() } else { a_metric.get(r - n2, c).clone() });
        let b: Vec<Scalar> = dv.into_iter().chain(traces.iter().cloned()).collect();
        if solve_linear(&a, &b).is_err() {
            return Err(precondition("no H in a with H^s = D and <H, X> = Tr X"));
        }
        if !nondegenerate(a_metric) {
            return Err(precondition("a_metric is degenerate"));
        }
        return assemble(m, a_basis.to_vec(), a_metric, ExtensionKind::NonIwasawa);
    }
    if traces.iter().all(negligible) {
        if !nondegenerate(a_metric) {
            return Err(precondition("a_metric is degenerate"));
        }
        return assemble(m, a_basis.to_vec(), a_metric, ExtensionKind::NonIwasawa);
    }
    assemble_with_h(m, a_basis.to_vec(), a_metric, ExtensionKind::NonIwasawa)
}
