//! Standard decompositions of solvable metric Lie algebras and Einstein
//! extensions of nilsolitons.

mod build;
mod correspondence;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lie::{semidirect, LieAlgebra, SemidirectSpec};
use crate::linalg::{coordinates, has_real_spectrum, signature, Matrix, SymMatrix, Vector};
use crate::metric::{adjoint_of, mean_curvature_vector, restrict_to, standard_violation, MetricLieAlgebra, PseudoMetric};
use crate::scalar::Scalar;

pub use build::{
    extend_iwasawa, extend_non_iwasawa, extend_rank_one_nil3, extend_rank_one_nil4, extend_ricci_flat,
    ricci_flat_companion, CompanionAnalysis, ExtensionKind, ExtensionResult, Verification,
};
pub use correspondence::{verify_correspondence, CorollaryCase, CorrespondenceReport};

/// Tolerance for comparisons involving the approximate backend.
pub const EXTENSION_TOL: f64 = 1e-9;

pub(crate) fn close(a: &Matrix, b: &Matrix) -> bool {
    if a.is_exact() && b.is_exact() {
        a == b
    } else {
        a.approx_eq(b, EXTENSION_TOL)
    }
}

pub(crate) fn negligible(x: &Scalar) -> bool {
    x.is_zero_tol(EXTENSION_TOL)
}

pub(crate) fn negligible_matrix(m: &Matrix) -> bool {
    m.is_zero_tol(EXTENSION_TOL * m.max_abs().max(1.0))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DecompositionFlags {
    pub is_standard: bool,
    pub is_orthogonal: bool,
    pub ideal_nondegenerate: bool,
    pub is_pseudo_iwasawa: bool,
    pub each_adx_normal: bool,
    /// Each `(ad X)*` is a derivation of `g` commuting with `ad a`.
    pub each_adx_star_is_derivation: bool,
}

/// A splitting `g̃ = g ⊕ a` of a metric Lie algebra with its properties.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub parent: MetricLieAlgebra,
    pub ideal_basis: Vec<Vector>,
    pub complement_basis: Vec<Vector>,
    pub flags: DecompositionFlags,
    /// `⟨H, v⟩ = Tr ad v`.
    pub h: Vector,
    /// First failed condition of a standard decomposition.
    pub violation: Option<String>,
    /// `ad X` restricted to `g`, in the ideal basis, for each complement vector;
    /// empty unless `g` is a nondegenerate ideal.
    pub ad_complement: Vec<Matrix>,
}

impl Decomposition {
    /// `g` as a metric Lie algebra in the ideal basis.
    pub fn ideal(&self) -> Result<MetricLieAlgebra> {
        let l = restrict_to(self.parent.algebra(), &self.ideal_basis)?;
        MetricLieAlgebra::new(l, PseudoMetric::new(gram_block(&self.parent, &self.ideal_basis, &self.ideal_basis))?)
    }

    /// Gram matrix of the metric on `a` in the complement basis.
    pub fn complement_gram(&self) -> Matrix {
        gram_block(&self.parent, &self.complement_basis, &self.complement_basis).into_matrix()
    }

    /// Columns: the ideal basis, then the complement basis.
    pub fn change(&self) -> Matrix {
        let mut cols = self.ideal_basis.clone();
        cols.extend_from_slice(&self.complement_basis);
        Matrix::from_columns(&cols)
    }
}

fn gram_block(m: &MetricLieAlgebra, a: &[Vector], b: &[Vector]) -> SymMatrix {
    let block = Matrix::from_fn(a.len(), b.len(), |i, j| m.metric().inner(&a[i], &b[j]));
    SymMatrix::symmetrize(&block)
}

/// `ad x` on the span of `ideal`, in that basis.
fn restricted_ad(l: &LieAlgebra, ideal: &[Vector], x: &[Scalar]) -> Option<Matrix> {
    let mut cols = Vec::with_capacity(ideal.len());
    for u in ideal {
        cols.push(coordinates(ideal, &l.bracket(x, u).ok()?)?);
    }
    Some(Matrix::from_columns(&cols))
}

/// Compute every flag of the decomposition and the vector `H`.
pub fn analyze_decomposition(m: &MetricLieAlgebra, ideal: &[Vector], complement: &[Vector]) -> Result<Decomposition> {
    let l = m.algebra();
    let n = l.dim();
    let mut cols = ideal.to_vec();
    cols.extend_from_slice(complement);
    if cols.len() != n || Matrix::from_columns(&cols).rank() != n {
        return Err(Error::NotDirectSum);
    }
    let is_orthogonal = ideal.iter().all(|u| complement.iter().all(|x| m.metric().inner(u, x).is_zero()));
    let ideal_gram = gram_block(m, ideal, ideal);
    let ideal_nondegenerate = signature(&ideal_gram).is_nondegenerate();
    let violation = standard_violation(m, ideal, complement);
    let is_standard = violation.is_none();

    let mut flags = DecompositionFlags { is_standard, is_orthogonal, ideal_nondegenerate, ..Default::default() };
    let mut ad_complement = Vec::new();
    if ideal_nondegenerate && l.is_ideal(ideal) {
        let metric = PseudoMetric::new(ideal_gram)?;
        let restricted = restrict_to(l, ideal)?;
        for x in complement {
            ad_complement.push(restricted_ad(l, ideal, x).ok_or_else(|| Error::Internal(String::from("ideal")))?);
        }
        let stars: Vec<Matrix> = ad_complement.iter().map(|f| adjoint_of(&metric, f)).collect();
        flags.each_adx_normal = ad_complement.iter().zip(&stars).all(|(f, s)| negligible_matrix(&f.commutator(s)));
        flags.each_adx_star_is_derivation = stars.iter().all(|s| {
            restricted.is_derivation(s) && ad_complement.iter().all(|f| negligible_matrix(&s.commutator(f)))
        });
        flags.is_pseudo_iwasawa = is_standard && ad_complement.iter().zip(&stars).all(|(f, s)| close(f, s));
    }
    Ok(Decomposition {
        parent: m.clone(),
        ideal_basis: ideal.to_vec(),
        complement_basis: complement.to_vec(),
        flags,
        h: mean_curvature_vector(m),
        violation,
        ad_complement,
    })
}

/// The algebra `g ⋊ a` where each `X ∈ a` acts by the self-adjoint part of
/// `ad X`, with the same metric tensor.
pub fn azencott_wilson(d: &Decomposition) -> Result<MetricLieAlgebra> {
    if !d.flags.is_standard {
        return Err(Error::NotStandard(d.violation.clone().unwrap_or_default()));
    }
    if !d.flags.each_adx_normal {
        return Err(Error::Precondition(String::from("ad X is not normal for some X in a")));
    }
    if !d.flags.each_adx_star_is_derivation {
        return Err(Error::Precondition(String::from("(ad X)* is not a derivation of g commuting with ad a")));
    }
    let ideal = d.ideal()?;
    let half = Scalar::ratio(1, 2);
    let chi: Vec<Matrix> =
        d.ad_complement.iter().map(|f| (f + &adjoint_of(ideal.metric(), f)).scale(&half)).collect();
    let adapted = semidirect(&SemidirectSpec::new(ideal.algebra().clone(), chi))?;
    let p = d.change();
    let algebra = if p == Matrix::identity(p.rows()) {
        adapted
    } else {
        let pinv = p.inverse().ok_or(Error::NotDirectSum)?;
        adapted.change_basis(&pinv)?
    };
    MetricLieAlgebra::new(algebra, d.parent.metric().clone())
}

/// Every `ad e_i` has real spectrum.
pub fn is_completely_solvable(l: &LieAlgebra) -> Result<bool> {
    for a in l.ads() {
        if !has_real_spectrum(&a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn label(i: usize) -> String {
    format!("a_basis[{i}]")
}

#[cfg(test)]
mod tests;
