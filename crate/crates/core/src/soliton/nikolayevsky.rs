use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lie::derivation::combine;
use crate::lie::{derivations, DerivationBasis, LieAlgebra};
use crate::linalg::{is_nilpotent_matrix, jordan_chevalley, rational_eigenvalues, solve_linear, Matrix};
use crate::scalar::{Rational, Scalar};

/// A Nikolayevsky derivation together with the data used to find it.
#[derive(Clone, Debug, PartialEq)]
pub struct NikolayevskyResult {
    pub n: Matrix,
    /// A solution of `Tr(N X) = Tr X` before taking the semisimple part.
    pub raw_solution: Matrix,
    /// Basis of the radical `n` of the trace form on `Der(g)`.
    pub n_basis: Vec<Matrix>,
    /// Eigenvalues of `N` with multiplicity, in increasing order.
    pub eigenvalues: Vec<Rational>,
}

fn expand(roots: Vec<(Rational, usize)>) -> Vec<Rational> {
    let mut out: Vec<Rational> = roots.into_iter().flat_map(|(r, m)| core::iter::repeat(r).take(m)).collect();
    out.sort();
    out
}

fn satisfies_trace_condition(der: &DerivationBasis, d: &Matrix) -> bool {
    der.basis.iter().all(|x| (d * x).trace() == x.trace())
}

/// Solve `Tr(N X) = Tr X` among the diagonal derivations; such a solution is
/// unique when it exists.
fn diagonal_solution(l: &LieAlgebra, der: &DerivationBasis) -> Option<Matrix> {
    let n = l.dim();
    let units: Vec<Matrix> = (0..n).map(|i| Matrix::unit(n, i, i)).collect();
    // diagonal d is a derivation iff (d_i + d_j − d_k) c^k_{ij} = 0
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                if !l.constant(i, j, k).is_zero() {
                    let mut row = alloc::vec![Scalar::zero(); n];
                    row[i] += Scalar::one();
                    row[j] += Scalar::one();
                    row[k] -= Scalar::one();
                    rows.push(row);
                }
            }
        }
    }
    let diag_basis: Vec<Matrix> = if rows.is_empty() {
        units
    } else {
        Matrix::from_rows(rows).kernel().iter().map(|v| Matrix::diag(v)).collect()
    };
    if diag_basis.is_empty() {
        return None;
    }
    let a = Matrix::from_fn(der.dim(), diag_basis.len(), |i, j| (&diag_basis[j] * &der.basis[i]).trace());
    let sol = solve_linear(&a, &der.traces()).ok()?;
    Some(combine(&diag_basis, &sol.particular, n))
}

/// Nikolayevsky derivation of an algebra over the exact backend.
pub fn nikolayevsky(l: &LieAlgebra) -> Result<NikolayevskyResult> {
    if !l.is_exact() {
        return Err(Error::ApproxBackend("nikolayevsky"));
    }
    let n = l.dim();
    let der = derivations(l);
    let sol = solve_linear(&der.gram_tr, &der.traces()).map_err(|e| match e {
        Error::Inconsistent => Error::Internal(String::from("trace system has no solution")),
        e => e,
    })?;
    let raw = if der.dim() == 0 { Matrix::zeros(n, n) } else { der.combine(&sol.particular) };
    let nik = match diagonal_solution(l, &der) {
        Some(d) => d,
        None => jordan_chevalley(&raw)?.semisimple,
    };
    if !l.is_derivation(&nik) || !satisfies_trace_condition(&der, &nik) {
        return Err(Error::Internal(String::from("semisimple part fails the Nikolayevsky conditions")));
    }
    let eigenvalues = rational_eigenvalues(&nik)?
        .map(expand)
        .ok_or_else(|| Error::Internal(String::from("irrational Nikolayevsky eigenvalues")))?;
    Ok(NikolayevskyResult { n: nik, raw_solution: raw, n_basis: der.null_basis, eigenvalues })
}

/// How a soliton derivation sits relative to the Nikolayevsky derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationClass {
    pub consistent: bool,
    /// Semisimple and nilpotent parts of `D̃ = −D/λ` (of `D` when `λ = 0`).
    pub ds: Matrix,
    pub dn: Matrix,
    pub diagnostics: Vec<String>,
}

fn in_null_space(der: &DerivationBasis, x: &Matrix) -> bool {
    der.basis.iter().all(|y| (x * y).trace().is_zero())
}

/// Check `D` against the dichotomy for nilsoliton derivations.
pub fn classify_derivation(l: &LieAlgebra, d: &Matrix, lambda: &Scalar) -> Result<DerivationClass> {
    if !l.is_derivation(d) {
        return Err(Error::NotDerivation(String::from("D")));
    }
    let n = l.dim();
    let der = derivations(l);
    let mut diagnostics = Vec::new();
    if lambda.is_zero() {
        if !is_nilpotent_matrix(d) {
            diagnostics.push(String::from("lambda = 0 but D is not nilpotent"));
        }
        if !in_null_space(&der, d) {
            diagnostics.push(String::from("lambda = 0 but D is not in the null space of the trace form"));
        }
        return Ok(DerivationClass { consistent: diagnostics.is_empty(), ds: Matrix::zeros(n, n), dn: d.clone(), diagnostics });
    }
    let inv = lambda.inv().expect("nonzero");
    let tilde = d.scale(&(-inv));
    if !satisfies_trace_condition(&der, &tilde) {
        diagnostics.push(String::from("-D/lambda fails Tr(DX) = Tr(X)"));
    }
    let jc = jordan_chevalley(&tilde)?;
    if !l.is_derivation(&jc.semisimple) {
        diagnostics.push(String::from("semisimple part is not a derivation"));
    }
    if !in_null_space(&der, &jc.nilpotent) {
        diagnostics.push(String::from("nilpotent part is not in the null space of the trace form"));
    }
    let reference = nikolayevsky(l)?;
    match rational_eigenvalues(&jc.semisimple)? {
        Some(ev) if expand(ev.clone()) == reference.eigenvalues => {}
        Some(_) => diagnostics.push(String::from("eigenvalues differ from the Nikolayevsky derivation")),
        None => diagnostics.push(format!("irrational eigenvalues in {}", "the semisimple part")),
    }
    Ok(DerivationClass { consistent: diagnostics.is_empty(), ds: jc.semisimple, dn: jc.nilpotent, diagnostics })
}

/// Nikolayevsky derivation and `Z(N) ∩ n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Table1Result {
    pub n: Matrix,
    pub n_basis: Vec<Matrix>,
    pub intersection: Vec<Matrix>,
}

/// Centraliser of `N` inside the null space of the trace form.
pub fn table1_search(l: &LieAlgebra) -> Result<Table1Result> {
    let nik = nikolayevsky(l)?;
    let dim = l.dim();
    let z = &nik.n_basis;
    let intersection = if z.is_empty() {
        Vec::new()
    } else {
        let brackets: Vec<_> = z.iter().map(|x| nik.n.commutator(x).vectorize()).collect();
        let a = Matrix::from_columns(&brackets);
        a.kernel().iter().map(|c| combine(z, c, dim)).collect()
    };
    Ok(Table1Result { n: nik.n, n_basis: nik.n_basis, intersection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::parse_structure;
    use crate::scalar::{rat, Scalar as S};

    fn diag_q(num: &[i64], den: i64) -> Matrix {
        Matrix::diag(&num.iter().map(|&x| S::ratio(x, den)).collect::<Vec<_>>())
    }

    #[test]
    fn h257() {
        let l = parse_structure("(0,0,0,0,e^{12},e^{34},e^{13}+e^{25})").unwrap();
        let t = table1_search(&l).unwrap();
        assert_eq!(t.n, diag_q(&[2, 1, 2, 2, 3, 4, 4], 3));
        assert_eq!(t.intersection.len(), 1);
        let x = &t.intersection[0];
        assert!(crate::linalg::in_span(&[x.vectorize()], &Matrix::unit(7, 3, 2).vectorize()));
    }

    #[test]
    fn abelian_is_identity() {
        let r = nikolayevsky(&LieAlgebra::abelian(3)).unwrap();
        assert_eq!(r.n, Matrix::identity(3));
        assert!(r.n_basis.is_empty());
        assert!(table1_search(&LieAlgebra::abelian(3)).unwrap().intersection.is_empty());
    }

    #[test]
    fn five_dim_example() {
        let r = nikolayevsky(&parse_structure("(0,0,0,e^{12},e^{13})").unwrap()).unwrap();
        assert_eq!(r.n, diag_q(&[2, 3, 3, 5, 5], 4));
        assert_eq!(r.eigenvalues, [2, 3, 3, 5, 5].iter().map(|&x| rat(x, 4)).collect::<Vec<_>>());
    }

    #[test]
    fn d147() {
        let l = parse_structure("(0,0,0,e^{12},e^{23},-e^{13},e^{26}+e^{16}+e^{15}-2e^{34})").unwrap();
        let t = table1_search(&l).unwrap();
        assert_eq!(t.n, diag_q(&[1, 1, 1, 2, 2, 2, 3], 2));
        assert_eq!(t.intersection.len(), 1);
        let printed = &Matrix::unit(7, 1, 0) - &Matrix::unit(7, 4, 5);
        assert!(crate::linalg::in_span(&[t.intersection[0].vectorize()], &printed.vectorize()));
    }

    #[test]
    fn heisenberg_classification() {
        let h = parse_structure("(0,0,e^{12})").unwrap();
        let c = classify_derivation(&h, &Matrix::diag(&[1, 1, 2].map(S::int)), &S::ratio(-3, 2)).unwrap();
        assert!(c.consistent, "{:?}", c.diagnostics);
        assert_eq!(c.ds, diag_q(&[2, 2, 4], 3));
        assert!(c.dn.is_zero());
    }

    #[test]
    fn zero_derivation_trivially_consistent() {
        let h = parse_structure("(0,0,e^{12})").unwrap();
        assert!(classify_derivation(&h, &Matrix::zeros(3, 3), &S::zero()).unwrap().consistent);
    }

    #[test]
    fn non_derivation_rejected() {
        let h = parse_structure("(0,0,e^{12})").unwrap();
        assert!(classify_derivation(&h, &Matrix::identity(3), &S::one()).is_err());
    }
}
