//! Nilsoliton metrics and Nikolayevsky derivations.

mod nikolayevsky;

use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::lie::{derivations, structure::is_nilpotent};
use crate::linalg::{is_nilpotent_matrix, solve_linear, Matrix};
use crate::metric::{adjoint_of, MetricLieAlgebra};
use crate::scalar::Scalar;

pub use nikolayevsky::{
    classify_derivation, nikolayevsky, table1_search, DerivationClass, NikolayevskyResult, Table1Result,
};

/// Approximate entries below this are treated as zero when classifying.
pub const APPROX_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SolitonType {
    /// `λ = 0`, `D = 0`.
    Nil1,
    /// `λ = 0`, `D ≠ 0`.
    Nil2,
    /// `λ ≠ 0`, `D = 0`.
    Nil3,
    /// `λ ≠ 0`, `D ≠ 0`.
    Nil4,
    NotSoliton,
}

impl SolitonType {
    pub fn classify(lambda: &Scalar, d: &Matrix) -> Self {
        match (lambda.is_zero(), d.is_zero()) {
            (true, true) => SolitonType::Nil1,
            (true, false) => SolitonType::Nil2,
            (false, true) => SolitonType::Nil3,
            (false, false) => SolitonType::Nil4,
        }
    }
}

impl fmt::Display for SolitonType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SolitonType::Nil1 => "Nil1",
            SolitonType::Nil2 => "Nil2",
            SolitonType::Nil3 => "Nil3",
            SolitonType::Nil4 => "Nil4",
            SolitonType::NotSoliton => "NotSoliton",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolitonChecks {
    /// `Tr D² = −λ Tr D`.
    pub tr_d_sq_identity: bool,
    /// `Tr Ric² = λ Tr Ric`.
    pub tr_ric_sq_identity: bool,
    pub d_self_adjoint: bool,
    pub d_is_derivation: bool,
}

impl SolitonChecks {
    pub fn all(&self) -> bool {
        self.tr_d_sq_identity && self.tr_ric_sq_identity && self.d_self_adjoint && self.d_is_derivation
    }
}

/// Solution of `Ric = λ id + D` with `D ∈ Der(g)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolitonCertificate {
    pub lambda: Scalar,
    pub d: Matrix,
    pub soliton_type: SolitonType,
    /// Dimension of the affine family of solutions `(λ, D)`.
    pub solution_space_dim: usize,
    pub checks: SolitonChecks,
    /// Set for a `Nil4` soliton with nilpotent `D`, for which no example is known.
    pub noteworthy: bool,
}

fn zero_like(exact: bool) -> Scalar {
    if exact {
        Scalar::zero()
    } else {
        Scalar::approx(0.0)
    }
}

fn same(a: &Scalar, b: &Scalar, exact: bool) -> bool {
    if exact {
        a == b
    } else {
        a.approx_eq(b, APPROX_THRESHOLD)
    }
}

/// Solve the nilsoliton equation for a nilpotent metric Lie algebra.
pub fn solve_nilsoliton(m: &MetricLieAlgebra) -> Result<SolitonCertificate> {
    let l = m.algebra();
    if !is_nilpotent(l) {
        return Err(Error::NotNilpotent);
    }
    let n = l.dim();
    let exact = m.is_exact();
    let der = derivations(l);
    let ric = &m.ricci().ricci_operator;
    let k = der.dim();
    // unknowns (λ, a_1, …, a_k); one equation per matrix entry
    let a = Matrix::from_fn(n * n, k + 1, |r, c| {
        let (i, j) = (r / n, r % n);
        if c == 0 {
            if i == j {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        } else {
            der.basis[c - 1].get(i, j).clone()
        }
    });
    let a = if exact { a } else { a.to_approx() };
    let b = ric.vectorize();
    let sol = match solve_linear(&a, &b) {
        Ok(s) => s,
        Err(Error::Inconsistent) => {
            return Ok(SolitonCertificate {
                lambda: zero_like(exact),
                d: Matrix::zeros(n, n),
                soliton_type: SolitonType::NotSoliton,
                solution_space_dim: 0,
                checks: SolitonChecks::default(),
                noteworthy: false,
            })
        }
        Err(e) => return Err(e),
    };
    let mut x = sol.particular;
    // prefer the representative with λ = 0 when λ is free
    if let Some(kv) = sol.kernel.iter().find(|v| !v[0].is_zero()) {
        let t = &x[0] / &kv[0];
        for (xi, ki) in x.iter_mut().zip(kv) {
            *xi -= &t * ki;
        }
    }
    let mut lambda = x[0].clone();
    let mut d = der.combine(&x[1..]);
    if !exact {
        lambda = lambda.threshold(APPROX_THRESHOLD);
        d = d.threshold(APPROX_THRESHOLD);
    }
    if d.rows() == 0 {
        d = Matrix::zeros(n, n);
    }
    let checks = soliton_checks(m, &lambda, &d);
    let soliton_type = SolitonType::classify(&lambda, &d);
    let noteworthy = soliton_type == SolitonType::Nil4 && is_nilpotent_matrix(&d);
    Ok(SolitonCertificate { lambda, d, soliton_type, solution_space_dim: sol.kernel.len(), checks, noteworthy })
}

/// The identities any nilsoliton `(λ, D)` must satisfy.
pub fn soliton_checks(m: &MetricLieAlgebra, lambda: &Scalar, d: &Matrix) -> SolitonChecks {
    let exact = m.is_exact() && lambda.is_exact() && d.is_exact();
    let ric = &m.ricci().ricci_operator;
    let star = adjoint_of(m.metric(), d);
    let self_adjoint = if exact { star == *d } else { star.approx_eq(d, APPROX_THRESHOLD) };
    let tr_d = d.trace();
    let tr_ric = ric.trace();
    SolitonChecks {
        tr_d_sq_identity: same(&(d * d).trace(), &(-(lambda * &tr_d)), exact),
        tr_ric_sq_identity: same(&(ric * ric).trace(), &(lambda * &tr_ric), exact),
        d_self_adjoint: self_adjoint,
        d_is_derivation: m.algebra().is_derivation(d),
    }
}

/// `Tr(Ric ∘ X)` for each element of a derivation basis; all vanish on a
/// nilpotent metric Lie algebra.
pub fn ricci_derivation_pairings(m: &MetricLieAlgebra) -> Vec<Scalar> {
    let ric = &m.ricci().ricci_operator;
    derivations(m.algebra()).basis.iter().map(|x| (ric * x).trace()).collect()
}
