use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

/// A finite-dimensional real Lie algebra in a fixed basis `e_1..e_n`.
///
/// Structure constants are stored densely with `[e_i, e_j] = Σ_k c^k_{ij} e_k`,
/// antisymmetric in `i, j`. Indices are zero-based in the API.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    c: Vec<Scalar>,
}

impl LieAlgebra {
    pub fn abelian(dim: usize) -> Self {
        LieAlgebra { dim, c: vec![Scalar::zero(); dim * dim * dim] }
    }

    /// Build from entries `(i, j, k, c^k_{ij})`; repeated entries accumulate and
    /// `c^k_{ji}` is filled in. The Jacobi identity is verified.
    pub fn from_constants(dim: usize, entries: &[(usize, usize, usize, Scalar)]) -> Result<Self> {
        let mut l = LieAlgebra::abelian(dim);
        for (i, j, k, v) in entries {
            for idx in [*i, *j, *k] {
                if idx >= dim {
                    return Err(Error::IndexOutOfRange { index: idx + 1, dim });
                }
            }
            if i == j {
                if v.is_zero() {
                    continue;
                }
                return Err(Error::Precondition(format!("bracket [e{0}, e{0}] must vanish", i + 1)));
            }
            let a = l.idx(*i, *j, *k);
            l.c[a] += v;
            let b = l.idx(*j, *i, *k);
            l.c[b] -= v;
        }
        l.unify();
        l.check_jacobi()?;
        Ok(l)
    }

    /// Build from the adjoint matrices `ad e_i`, checking antisymmetry and Jacobi.
    pub fn from_ad(ads: &[Matrix]) -> Result<Self> {
        let dim = ads.len();
        let mut l = LieAlgebra::abelian(dim);
        for (i, m) in ads.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.rows() });
            }
            for j in 0..dim {
                for k in 0..dim {
                    let a = l.idx(i, j, k);
                    l.c[a] = m.get(k, j).clone();
                }
            }
        }
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    if l.c[l.idx(i, j, k)] != -&l.c[l.idx(j, i, k)] {
                        return Err(Error::Precondition(format!("brackets not antisymmetric at (e{}, e{})", i + 1, j + 1)));
                    }
                }
            }
        }
        l.unify();
        l.check_jacobi()?;
        Ok(l)
    }

    fn unify(&mut self) {
        if self.c.iter().any(|x| !x.is_exact()) {
            for x in self.c.iter_mut() {
                *x = x.to_approx();
            }
        }
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_exact(&self) -> bool {
        self.c.iter().all(Scalar::is_exact)
    }

    /// `c^k_{ij}`.
    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Scalar {
        &self.c[self.idx(i, j, k)]
    }

    /// Nonzero constants `(i, j, k, c^k_{ij})` with `i < j`.
    pub fn nonzero_constants(&self) -> Vec<(usize, usize, usize, Scalar)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = self.constant(i, j, k);
                    if !v.is_zero() {
                        out.push((i, j, k, v.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn bracket_basis(&self, i: usize, j: usize) -> Vector {
        (0..self.dim).map(|k| self.constant(i, j, k).clone()).collect()
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Result<Vector> {
        let n = self.dim;
        for v in [x, y] {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        let mut out = vec![Scalar::zero(); n];
        for i in 0..n {
            if x[i].is_zero_tol(0.0) {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero_tol(0.0) || i == j {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constant(i, j, k);
                    if !c.is_zero_tol(0.0) {
                        *o += &(&xy * c);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad e_i`.
    pub fn ad(&self, i: usize) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |k, j| self.constant(i, j, k).clone())
    }

    /// Matrix of `ad x`.
    pub fn ad_vec(&self, x: &[Scalar]) -> Matrix {
        let n = self.dim;
        let mut m = Matrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if !xi.is_zero_tol(0.0) {
                m = &m + &self.ad(i).scale(xi);
            }
        }
        m
    }

    pub fn ads(&self) -> Vec<Matrix> {
        (0..self.dim).map(|i| self.ad(i)).collect()
    }

    /// First triple violating the Jacobi identity.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let n = self.dim;
        let e = |i: usize| -> Vector { (0..n).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect() };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let t1 = self.bracket(&self.bracket_basis(i, j), &e(k)).unwrap();
                    let t2 = self.bracket(&self.bracket_basis(j, k), &e(i)).unwrap();
                    let t3 = self.bracket(&self.bracket_basis(k, i), &e(j)).unwrap();
                    if (0..n).any(|a| !(&(&t1[a] + &t2[a]) + &t3[a]).is_zero()) {
                        return Some((i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        None
    }

    fn check_jacobi(&self) -> Result<()> {
        match self.jacobi_violation() {
            Some((i, j, k)) => Err(Error::Jacobi(i, j, k)),
            None => Ok(()),
        }
    }

    /// All structure constants negated; isomorphic via `x ↦ -x`.
    pub fn negated(&self) -> Self {
        LieAlgebra { dim: self.dim, c: self.c.iter().map(|x| -x).collect() }
    }

    pub fn to_approx(&self) -> Self {
        LieAlgebra { dim: self.dim, c: self.c.iter().map(Scalar::to_approx).collect() }
    }

    /// Rewrite in the basis given by the columns of `p`.
    pub fn change_basis(&self, p: &Matrix) -> Result<Self> {
        let n = self.dim;
        if p.rows() != n || p.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: p.rows() });
        }
        let pinv = p.inverse().ok_or_else(|| Error::Precondition("change of basis is singular".into()))?;
        let cols: Vec<Vector> = (0..n).map(|j| p.column(j)).collect();
        let mut l = LieAlgebra::abelian(n);
        for a in 0..n {
            for b in a + 1..n {
                let br = pinv.mul_vec(&self.bracket(&cols[a], &cols[b])?);
                for (k, v) in br.into_iter().enumerate() {
                    let i1 = l.idx(a, b, k);
                    let i2 = l.idx(b, a, k);
                    l.c[i2] = -&v;
                    l.c[i1] = v;
                }
            }
        }
        l.unify();
        Ok(l)
    }

    /// `D[x,y] - [Dx,y] - [x,Dy]` vanishes on all basis pairs.
    pub fn is_derivation(&self, d: &Matrix) -> bool {
        let n = self.dim;
        if d.rows() != n || d.cols() != n {
            return false;
        }
        let cols: Vec<Vector> = (0..n).map(|j| d.column(j)).collect();
        for i in 0..n {
            for j in i + 1..n {
                let lhs = d.mul_vec(&self.bracket_basis(i, j));
                let mut e_i = vec![Scalar::zero(); n];
                e_i[i] = Scalar::one();
                let mut e_j = vec![Scalar::zero(); n];
                e_j[j] = Scalar::one();
                let a = self.bracket(&cols[i], &e_j).unwrap();
                let b = self.bracket(&e_i, &cols[j]).unwrap();
                if (0..n).any(|k| !(&(&lhs[k] - &a[k]) - &b[k]).is_zero()) {
                    return false;
                }
            }
        }
        true
    }

    /// Span of all brackets `[a, b]` with `a`, `b` drawn from the given bases.
    pub fn bracket_span(&self, a: &[Vector], b: &[Vector]) -> Vec<Vector> {
        let mut out = Vec::new();
        for x in a {
            for y in b {
                let v = self.bracket(x, y).unwrap();
                if v.iter().any(|s| !s.is_zero()) {
                    out.push(v);
                }
            }
        }
        crate::linalg::span_basis(&out, self.dim)
    }

    /// True when the span of `basis` is closed under brackets.
    pub fn is_subalgebra(&self, basis: &[Vector]) -> bool {
        self.bracket_span(basis, basis).iter().all(|v| crate::linalg::in_span(basis, v))
    }

    /// True when the span of `basis` is an ideal.
    pub fn is_ideal(&self, basis: &[Vector]) -> bool {
        let all = self.standard_basis();
        self.bracket_span(&all, basis).iter().all(|v| crate::linalg::in_span(basis, v))
    }

    pub fn standard_basis(&self) -> Vec<Vector> {
        unit_vectors(self.dim)
    }
}

/// The standard basis of `ℝⁿ`.
pub fn unit_vectors(n: usize) -> Vec<Vector> {
    (0..n).map(|i| (0..n).map(|k| if k == i { Scalar::one() } else { Scalar::zero() }).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn heisenberg() -> LieAlgebra {
        LieAlgebra::from_constants(3, &[(0, 1, 2, Scalar::int(-1))]).unwrap()
    }

    #[test]
    fn heisenberg_brackets() {
        let h = heisenberg();
        assert_eq!(h.bracket_basis(0, 1), vec![Scalar::zero(), Scalar::zero(), Scalar::int(-1)]);
        assert_eq!(h.bracket_basis(1, 0), vec![Scalar::zero(), Scalar::zero(), Scalar::int(1)]);
        let x = vec![Scalar::int(1), Scalar::int(2), Scalar::int(3)];
        assert!(h.bracket(&x, &x).unwrap().iter().all(Scalar::is_zero));
        assert!(h.bracket(&x, &x[..2]).is_err());
    }

    #[test]
    fn abelian_brackets_vanish() {
        let a = LieAlgebra::abelian(4);
        let x: Vector = (0..4).map(Scalar::int).collect();
        let y: Vector = (0..4).map(|i| Scalar::int(i * i)).collect();
        assert!(a.bracket(&x, &y).unwrap().iter().all(Scalar::is_zero));
    }

    #[test]
    fn jacobi_failure_is_reported() {
        // [e1,e2]=e3, [e2,e3]=e1, [e1,e3]=e1 breaks Jacobi
        let r = LieAlgebra::from_constants(
            3,
            &[(0, 1, 2, Scalar::one()), (1, 2, 0, Scalar::one()), (0, 2, 0, Scalar::one())],
        );
        assert!(matches!(r, Err(Error::Jacobi(..))));
    }

    #[test]
    fn change_basis_round_trip() {
        let h = heisenberg();
        let p = Matrix::from_i64(&[&[1, 1, 0], &[0, 1, 0], &[2, 0, 1]]);
        let h2 = h.change_basis(&p).unwrap();
        assert!(h2.jacobi_violation().is_none());
        let back = h2.change_basis(&p.inverse().unwrap()).unwrap();
        assert_eq!(back, h);
    }

    #[test]
    fn ad_round_trip() {
        let h = heisenberg();
        assert_eq!(LieAlgebra::from_ad(&h.ads()).unwrap(), h);
    }
}
