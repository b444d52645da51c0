use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lie::LieAlgebra;
use crate::linalg::{span_basis, Matrix, Vector};
use crate::scalar::Scalar;

/// `g ⋊ a` with `a` abelian, spanned by new directions `e_{n+1}, …`.
///
/// The acting matrices are `ad e_{n+s}` restricted to `g`: `[e_{n+s}, v] = X_s v`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemidirectSpec {
    pub base: LieAlgebra,
    pub acting: Vec<Matrix>,
    pub labels: Vec<String>,
}

impl SemidirectSpec {
    pub fn new(base: LieAlgebra, acting: Vec<Matrix>) -> Self {
        let n = base.dim();
        let labels = (0..acting.len()).map(|s| format!("e{}", n + s + 1)).collect();
        SemidirectSpec { base, acting, labels }
    }

    pub fn validate(&self) -> Result<()> {
        for (s, x) in self.acting.iter().enumerate() {
            if !self.base.is_derivation(x) {
                return Err(Error::NotDerivation(format!("acting matrix {}", s + 1)));
            }
        }
        for s in 0..self.acting.len() {
            for r in s + 1..self.acting.len() {
                if !self.acting[s].commutator(&self.acting[r]).is_zero() {
                    return Err(Error::NotCommuting(format!("acting matrices {} and {}", s + 1, r + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.base.dim() + self.acting.len()
    }
}

/// Build `g ⋊ a`.
pub fn semidirect(spec: &SemidirectSpec) -> Result<LieAlgebra> {
    spec.validate()?;
    let n = spec.base.dim();
    let mut entries = Vec::new();
    for (i, j, k, v) in spec.base.nonzero_constants() {
        entries.push((i, j, k, v));
    }
    for (s, x) in spec.acting.iter().enumerate() {
        for b in 0..n {
            for a in 0..n {
                let v = x.get(a, b);
                if !v.is_zero() {
                    entries.push((n + s, b, a, v.clone()));
                }
            }
        }
    }
    LieAlgebra::from_constants(spec.dim(), &entries)
}

/// Nilradical of `g ⋊ a` for nilpotent `g`: `g` plus the elements of `a`
/// acting nilpotently.
///
/// For a commuting family, `Σ t_s X_s` is nilpotent exactly when it is
/// trace-orthogonal to the associative algebra the family generates, a
/// linear condition on `t`.
pub fn nilradical(spec: &SemidirectSpec) -> Result<Vec<Vector>> {
    spec.validate()?;
    if !crate::lie::structure::is_nilpotent(&spec.base) {
        return Err(Error::NotNilpotent);
    }
    let n = spec.base.dim();
    let k = spec.acting.len();
    let total = n + k;
    let assoc = associative_closure(&spec.acting, n);
    let m = Matrix::from_fn(assoc.len(), k, |r, s| (&spec.acting[s] * &assoc[r]).trace());
    let coeffs = if assoc.is_empty() { crate::lie::algebra::unit_vectors(k) } else { m.kernel() };
    let mut out: Vec<Vector> = (0..n)
        .map(|i| (0..total).map(|j| if j == i { Scalar::one() } else { Scalar::zero() }).collect())
        .collect();
    for c in coeffs {
        let mut v = alloc::vec![Scalar::zero(); total];
        for (s, cs) in c.into_iter().enumerate() {
            v[n + s] = cs;
        }
        out.push(v);
    }
    Ok(span_basis(&out, total))
}

fn associative_closure(gens: &[Matrix], n: usize) -> Vec<Matrix> {
    let mut basis: Vec<Vector> = Vec::new();
    let mut mats: Vec<Matrix> = Vec::new();
    let mut frontier: Vec<Matrix> = gens.to_vec();
    while let Some(m) = frontier.pop() {
        let v = m.vectorize();
        let mut trial = basis.clone();
        trial.push(v);
        if span_basis(&trial, n * n).len() > basis.len() {
            basis.push(m.vectorize());
            for g in gens {
                frontier.push(&m * g);
            }
            mats.push(m);
        }
    }
    mats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{parse_structure, structure};

    fn diag(xs: &[i64]) -> Matrix {
        Matrix::diag(&xs.iter().map(|&x| Scalar::int(x)).collect::<Vec<_>>())
    }

    #[test]
    fn heisenberg_by_diagonal() {
        let h = parse_structure("(0,0,e^{12})").unwrap();
        let spec = SemidirectSpec::new(h.clone(), alloc::vec![diag(&[1, 1, 2])]);
        let g = semidirect(&spec).unwrap();
        assert_eq!(g.dim(), 4);
        assert!(g.jacobi_violation().is_none());
        assert_eq!(g.bracket_basis(3, 2), alloc::vec![Scalar::zero(), Scalar::zero(), Scalar::int(2), Scalar::zero()]);
        for (i, j, k, v) in h.nonzero_constants() {
            assert_eq!(g.constant(i, j, k), &v);
        }
        assert_eq!(nilradical(&spec).unwrap().len(), 3);
    }

    #[test]
    fn trivial_extension() {
        let spec = SemidirectSpec::new(LieAlgebra::abelian(3), alloc::vec![]);
        assert_eq!(semidirect(&spec).unwrap(), LieAlgebra::abelian(3));
        assert_eq!(nilradical(&spec).unwrap().len(), 3);
    }

    #[test]
    fn nilpotent_action_gives_whole_algebra() {
        let x = Matrix::from_i64(&[&[0, 1, 0], &[0, 0, 0], &[0, 0, 0]]);
        let spec = SemidirectSpec::new(LieAlgebra::abelian(3), alloc::vec![x]);
        let g = semidirect(&spec).unwrap();
        assert!(structure::is_nilpotent(&g));
        assert_eq!(nilradical(&spec).unwrap().len(), 4);
    }

    #[test]
    fn mixed_action() {
        let spec = SemidirectSpec::new(
            LieAlgebra::abelian(2),
            alloc::vec![diag(&[1, 0]), Matrix::from_i64(&[&[1, 0], &[0, 0]]).scale(&Scalar::int(2))],
        );
        // X_2 - 2 X_1 = 0 acts nilpotently
        assert_eq!(nilradical(&spec).unwrap().len(), 3);
    }

    #[test]
    fn rejects_non_derivation() {
        let h = parse_structure("(0,0,e^{12})").unwrap();
        let spec = SemidirectSpec::new(h, alloc::vec![diag(&[1, 1, 1])]);
        assert!(matches!(semidirect(&spec), Err(Error::NotDerivation(_))));
    }
}
