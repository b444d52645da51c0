use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lie::{structure::is_nilpotent, LieAlgebra};
use crate::linalg::{coordinates, signature, Matrix, SymMatrix, Vector};
use crate::metric::{adjoint_of, endo_inner_with, MetricLieAlgebra, PseudoMetric, RicciData};
use crate::scalar::Scalar;

/// Structure constants of the subalgebra spanned by `basis`, in that basis.
pub fn restrict_to(l: &LieAlgebra, basis: &[Vector]) -> Result<LieAlgebra> {
    let k = basis.len();
    let mut entries = Vec::new();
    for a in 0..k {
        for b in a + 1..k {
            let br = l.bracket(&basis[a], &basis[b])?;
            let c = coordinates(basis, &br).ok_or_else(|| Error::Precondition(String::from("span is not a subalgebra")))?;
            for (m, v) in c.into_iter().enumerate() {
                if !v.is_zero() {
                    entries.push((a, b, m, v));
                }
            }
        }
    }
    LieAlgebra::from_constants(k, &entries)
}

/// A standard decomposition `g̃ = g ⊕⊥ a` expressed in an adapted basis.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardSplit {
    /// Columns: the basis of `g`, then the basis of `a`.
    pub change: Matrix,
    /// `g` with the restricted metric.
    pub ideal: MetricLieAlgebra,
    /// `φ_s` with `[v, x_s] = φ_s(v)`, in the basis of `g`.
    pub phis: Vec<Matrix>,
    /// Gram matrix of the metric on `a`.
    pub a_gram: SymMatrix,
}

fn gram_block(m: &MetricLieAlgebra, a: &[Vector], b: &[Vector]) -> Matrix {
    Matrix::from_fn(a.len(), b.len(), |i, j| m.metric().inner(&a[i], &b[j]))
}

impl StandardSplit {
    /// Validate and express the decomposition; errors name the failing condition.
    pub fn new(m: &MetricLieAlgebra, ideal: &[Vector], complement: &[Vector]) -> Result<Self> {
        let l = m.algebra();
        let n = l.dim();
        let bad = |s: &str| Error::NotStandard(String::from(s));
        let mut cols = ideal.to_vec();
        cols.extend_from_slice(complement);
        if cols.len() != n {
            return Err(bad("dimensions do not add up"));
        }
        let change = Matrix::from_columns(&cols);
        if change.rank() != n {
            return Err(Error::NotDirectSum);
        }
        if !l.is_ideal(ideal) {
            return Err(bad("g is not an ideal"));
        }
        if !l.bracket_span(complement, complement).is_empty() {
            return Err(bad("a is not abelian"));
        }
        if !gram_block(m, ideal, complement).is_zero() {
            return Err(bad("g and a are not orthogonal"));
        }
        let g_gram = SymMatrix::new(gram_block(m, ideal, ideal))?;
        let a_gram = SymMatrix::new(gram_block(m, complement, complement))?;
        if !signature(&g_gram).is_nondegenerate() || !signature(&a_gram).is_nondegenerate() {
            return Err(bad("metric restricted to g or a is degenerate"));
        }
        let restricted = restrict_to(l, ideal)?;
        if !is_nilpotent(&restricted) {
            return Err(bad("g is not nilpotent"));
        }
        let mut phis = Vec::with_capacity(complement.len());
        for x in complement {
            let mut columns = Vec::with_capacity(ideal.len());
            for u in ideal {
                let br = l.bracket(u, x)?;
                columns.push(coordinates(ideal, &br).ok_or_else(|| bad("g is not an ideal"))?);
            }
            phis.push(Matrix::from_columns(&columns));
        }
        let ideal = MetricLieAlgebra::new(restricted, PseudoMetric::new(g_gram)?)?;
        Ok(StandardSplit { change, ideal, phis, a_gram })
    }

    pub fn rank(&self) -> usize {
        self.phis.len()
    }

    /// Inverse Gram matrix `A^{sr}` of `a`; `ε_s` for an orthonormal basis.
    pub fn a_inverse(&self) -> Matrix {
        self.a_gram.inverse().expect("nondegenerate")
    }

    /// `H = −Σ A^{sr} (Tr φ_r) x_s`, in the adapted basis.
    pub fn h_adapted(&self) -> Vector {
        let k = self.rank();
        let n = self.ideal.dim();
        let ai = self.a_inverse();
        let tr: Vec<Scalar> = self.phis.iter().map(Matrix::trace).collect();
        let mut out = alloc::vec![Scalar::zero(); n + k];
        for s in 0..k {
            out[n + s] = -(0..k).map(|r| ai.get(s, r) * &tr[r]).sum::<Scalar>();
        }
        out
    }

    /// `ad H` restricted to `g`: `Σ A^{sr} (Tr φ_r) φ_s`.
    pub fn ad_h_on_ideal(&self) -> Matrix {
        let k = self.rank();
        let n = self.ideal.dim();
        let ai = self.a_inverse();
        let mut acc = Matrix::zeros(n, n);
        for s in 0..k {
            for r in 0..k {
                let c = ai.get(s, r) * &self.phis[r].trace();
                if !c.is_zero() {
                    acc = &acc + &self.phis[s].scale(&c);
                }
            }
        }
        acc
    }

    /// The Ricci tensor of `g̃` in the adapted basis, assembled from `g` and the `φ_s`.
    pub fn ricci_adapted(&self) -> Matrix {
        let g = &self.ideal;
        let metric = g.metric();
        let n = g.dim();
        let k = self.rank();
        let ai = self.a_inverse();
        let half = Scalar::ratio(1, 2);
        let stars: Vec<Matrix> = self.phis.iter().map(|p| adjoint_of(metric, p)).collect();
        let tr: Vec<Scalar> = self.phis.iter().map(Matrix::trace).collect();
        let gm = metric.gram().as_matrix();
        // bilinear form ⟨f v, h w⟩ as a matrix: fᵀ G h
        let pair = |f: &Matrix, h: &Matrix| -> Matrix { &(&f.transpose() * gm) * h };
        let mut top = g.ricci().ric.as_matrix().clone();
        for s in 0..k {
            for r in 0..k {
                let a = ai.get(s, r);
                if a.is_zero() {
                    continue;
                }
                let quad = &pair(&stars[s], &stars[r]) - &pair(&self.phis[s], &self.phis[r]);
                let lin = &pair(&self.phis[s], &Matrix::identity(n)) + &pair(&Matrix::identity(n), &self.phis[s]);
                let term = &quad - &lin.scale(&tr[r]);
                top = &top + &term.scale(&(a * &half));
            }
        }
        let ads = g.algebra().ads();
        Matrix::from_fn(n + k, n + k, |i, j| match (i < n, j < n) {
            (true, true) => top.get(i, j).clone(),
            (true, false) => endo_inner_with(metric, &ads[i], &self.phis[j - n]) * &half,
            (false, true) => endo_inner_with(metric, &ads[j], &self.phis[i - n]) * &half,
            (false, false) => {
                let (s, r) = (i - n, j - n);
                -(endo_inner_with(metric, &self.phis[s], &self.phis[r]) + (&self.phis[s] * &self.phis[r]).trace()) * &half
            }
        })
    }
}

/// Ricci data of `g̃` computed through a standard decomposition.
pub fn ricci_standard_split(m: &MetricLieAlgebra, ideal: &[Vector], complement: &[Vector]) -> Result<RicciData> {
    let split = StandardSplit::new(m, ideal, complement)?;
    let pinv = split.change.inverse().ok_or(Error::NotDirectSum)?;
    let ric = &(&pinv.transpose() * &split.ricci_adapted()) * &pinv;
    Ok(super::ricci::assemble(m.metric(), m.algebra(), ric))
}

/// First violated condition of a standard decomposition, if any.
pub fn standard_violation(m: &MetricLieAlgebra, ideal: &[Vector], complement: &[Vector]) -> Option<String> {
    match StandardSplit::new(m, ideal, complement) {
        Ok(_) => None,
        Err(Error::NotStandard(s)) => Some(s),
        Err(e) => Some(format!("{e}")),
    }
}
