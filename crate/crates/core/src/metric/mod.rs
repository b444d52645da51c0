//! Indefinite metrics on Lie algebras and their Ricci curvature.

mod ricci;
mod split;

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::fmt;

use once_cell::race::OnceBox;

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::{signature, Matrix, Signature, SymMatrix, Vector};
use crate::scalar::Scalar;

pub use ricci::{einstein_check, ricci_koszul, ricci_operator_rank_one, ricci_structural, ricci_structural_h, EinsteinCheck};
pub use split::{restrict_to, ricci_standard_split, standard_violation, StandardSplit};

/// A nondegenerate symmetric bilinear form with cached inverse and signature.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoMetric {
    gram: SymMatrix,
    inverse: Matrix,
    signature: Signature,
}

impl PseudoMetric {
    pub fn new(gram: SymMatrix) -> Result<Self> {
        let signature = signature(&gram);
        if !signature.is_nondegenerate() {
            return Err(Error::DegenerateMetric);
        }
        let inverse = gram.inverse().ok_or(Error::DegenerateMetric)?;
        Ok(PseudoMetric { gram, inverse, signature })
    }

    pub fn euclidean(n: usize) -> Self {
        PseudoMetric::new(SymMatrix::identity(n)).unwrap()
    }

    pub fn diagonal(d: &[Scalar]) -> Result<Self> {
        PseudoMetric::new(SymMatrix::diag(d))
    }

    pub fn gram(&self) -> &SymMatrix {
        &self.gram
    }

    pub fn inverse(&self) -> &Matrix {
        &self.inverse
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn dim(&self) -> usize {
        self.gram.order()
    }

    pub fn is_exact(&self) -> bool {
        self.gram.is_exact()
    }

    pub fn inner(&self, u: &[Scalar], v: &[Scalar]) -> Scalar {
        let gv = self.gram.mul_vec(v);
        u.iter().zip(&gv).map(|(a, b)| a * b).sum()
    }

    pub fn flat(&self, v: &[Scalar]) -> Vector {
        self.gram.mul_vec(v)
    }

    pub fn sharp(&self, a: &[Scalar]) -> Vector {
        self.inverse.mul_vec(a)
    }

    pub fn to_approx(&self) -> Self {
        PseudoMetric {
            gram: SymMatrix::new(self.gram.to_approx()).unwrap(),
            inverse: self.inverse.to_approx(),
            signature: self.signature,
        }
    }
}

/// Ricci tensor, Ricci operator, scalar curvature, mean-curvature vector and Killing form.
#[derive(Clone, Debug, PartialEq)]
pub struct RicciData {
    pub ric: SymMatrix,
    pub ricci_operator: Matrix,
    pub scal: Scalar,
    /// `⟨H, v⟩ = Tr ad v`.
    pub h: Vector,
    pub killing: SymMatrix,
}

/// A Lie algebra with a metric; the Ricci data is computed once and cached.
pub struct MetricLieAlgebra {
    algebra: LieAlgebra,
    metric: PseudoMetric,
    ricci: OnceBox<RicciData>,
}

impl MetricLieAlgebra {
    pub fn new(algebra: LieAlgebra, metric: PseudoMetric) -> Result<Self> {
        if algebra.dim() != metric.dim() {
            return Err(Error::DimensionMismatch { expected: algebra.dim(), found: metric.dim() });
        }
        Ok(MetricLieAlgebra { algebra, metric, ricci: OnceBox::new() })
    }

    pub fn from_gram(algebra: LieAlgebra, gram: Matrix) -> Result<Self> {
        MetricLieAlgebra::new(algebra, PseudoMetric::new(SymMatrix::new(gram)?)?)
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn metric(&self) -> &PseudoMetric {
        &self.metric
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn is_exact(&self) -> bool {
        self.algebra.is_exact() && self.metric.is_exact()
    }

    /// Ricci data from the structural formula, memoised.
    pub fn ricci(&self) -> &RicciData {
        self.ricci.get_or_init(|| Box::new(ricci_structural(self)))
    }

    pub fn to_approx(&self) -> Self {
        MetricLieAlgebra::new(self.algebra.to_approx(), self.metric.to_approx()).unwrap()
    }
}

impl Clone for MetricLieAlgebra {
    fn clone(&self) -> Self {
        let out = MetricLieAlgebra::new(self.algebra.clone(), self.metric.clone()).unwrap();
        if let Some(r) = self.ricci.get() {
            let _ = out.ricci.set(Box::new(r.clone()));
        }
        out
    }
}

impl PartialEq for MetricLieAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.metric == other.metric
    }
}

impl fmt::Debug for MetricLieAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricLieAlgebra").field("algebra", &self.algebra).field("metric", &self.metric).finish()
    }
}

/// Metric adjoint and its symmetric and antisymmetric parts.
#[derive(Clone, Debug, PartialEq)]
pub struct Adjoint {
    pub star: Matrix,
    pub sym: Matrix,
    pub anti: Matrix,
}

/// `f* = G⁻¹ fᵀ G`.
pub fn adjoint_of(metric: &PseudoMetric, f: &Matrix) -> Matrix {
    &(metric.inverse() * &f.transpose()) * metric.gram().as_matrix()
}

pub fn metric_adjoint(m: &MetricLieAlgebra, f: &Matrix) -> Adjoint {
    let star = adjoint_of(m.metric(), f);
    let half = Scalar::ratio(1, 2);
    let sym = (f + &star).scale(&half);
    let anti = (f - &star).scale(&half);
    Adjoint { star, sym, anti }
}

/// `⟨f, g⟩ = Tr(g* ∘ f)`.
pub fn endo_inner_with(metric: &PseudoMetric, f: &Matrix, g: &Matrix) -> Scalar {
    (&adjoint_of(metric, g) * f).trace()
}

pub fn endo_inner(m: &MetricLieAlgebra, f: &Matrix, g: &Matrix) -> Scalar {
    endo_inner_with(m.metric(), f, g)
}

/// `B(x, y) = Tr(ad x ∘ ad y)`.
pub fn killing_form(l: &LieAlgebra) -> SymMatrix {
    crate::lie::derivation::trace_gram(&l.ads())
}

/// `H` with `⟨H, v⟩ = Tr ad v`.
pub fn mean_curvature_vector(m: &MetricLieAlgebra) -> Vector {
    let t: Vec<Scalar> = m.algebra().ads().iter().map(Matrix::trace).collect();
    m.metric().sharp(&t)
}
