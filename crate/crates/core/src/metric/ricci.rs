use alloc::vec::Vec;

use crate::lie::LieAlgebra;
use crate::linalg::{Matrix, SymMatrix, Vector};
use crate::metric::{endo_inner_with, killing_form, MetricLieAlgebra, PseudoMetric, RicciData};
use crate::scalar::Scalar;

/// `dα(x, y) = −α([x, y])` as an antisymmetric coefficient matrix.
fn d_covector(l: &LieAlgebra, alpha: &[Scalar]) -> Matrix {
    let n = l.dim();
    Matrix::from_fn(n, n, |i, j| {
        let mut acc = Scalar::zero();
        for k in 0..n {
            let c = l.constant(i, j, k);
            if !c.is_zero() && !alpha[k].is_zero() {
                acc -= c * &alpha[k];
            }
        }
        acc
    })
}

/// Induced product on 2-forms, normalised so that `⟨α∧β, γ∧δ⟩` is the
/// Gram determinant of `α, β` against `γ, δ`.
fn two_form_inner(gi: &Matrix, a: &Matrix, b: &Matrix) -> Scalar {
    // ½ Σ a_ij b_kl g^ik g^jl
    let t = &(gi * b) * gi;
    let mut acc = Scalar::zero();
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let x = a.get(i, j);
            if !x.is_zero() {
                acc += x * t.get(i, j);
            }
        }
    }
    acc * Scalar::ratio(1, 2)
}

/// `v ⌟ ω` as a covector.
fn contract(v: &[Scalar], omega: &Matrix) -> Vector {
    omega.transpose().mul_vec(v)
}

fn traces(l: &LieAlgebra) -> Vector {
    l.ads().iter().map(Matrix::trace).collect()
}

pub(super) fn assemble(metric: &PseudoMetric, l: &LieAlgebra, ric: Matrix) -> RicciData {
    let ric = SymMatrix::symmetrize(&ric);
    let ricci_operator = metric.inverse() * ric.as_matrix();
    let scal = ricci_operator.trace();
    RicciData { ric, ricci_operator, scal, h: metric.sharp(&traces(l)), killing: killing_form(l) }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum HTerm {
    Forms,
    Brackets,
}

fn structural(m: &MetricLieAlgebra, variant: HTerm) -> RicciData {
    let l = m.algebra();
    let metric = m.metric();
    let n = l.dim();
    let gi = metric.inverse();
    let basis = l.standard_basis();
    let flats: Vec<Vector> = basis.iter().map(|v| metric.flat(v)).collect();
    let ds: Vec<Matrix> = flats.iter().map(|a| d_covector(l, a)).collect();
    let ads = l.ads();
    let t = traces(l);
    let h = metric.sharp(&t);
    let ad_h = l.ad_vec(&h);
    let killing = killing_form(l);
    let half = Scalar::ratio(1, 2);
    let ric = Matrix::from_fn(n, n, |v, w| {
        let t1 = two_form_inner(gi, &ds[v], &ds[w]);
        let t2 = endo_inner_with(metric, &ads[v], &ads[w]);
        let t3 = match variant {
            HTerm::Forms => {
                let mut form = contract(&basis[v], &ds[w]);
                for (x, y) in form.iter_mut().zip(contract(&basis[w], &ds[v])) {
                    *x += y;
                }
                let sharp = metric.sharp(&form);
                -t.iter().zip(&sharp).map(|(a, b)| a * b).sum::<Scalar>()
            }
            // ⟨[v,H],w⟩ + ⟨[w,H],v⟩ with [v,H] = −ad H (v)
            HTerm::Brackets => {
                let hv = ad_h.column(v);
                let hw = ad_h.column(w);
                -(metric.inner(&hv, &basis[w]) + metric.inner(&hw, &basis[v]))
            }
        };
        (t1 - t2 + t3 - killing.get(v, w)) * &half
    });
    assemble(metric, l, ric)
}

/// Ricci data from the exterior-differential formula.
pub fn ricci_structural(m: &MetricLieAlgebra) -> RicciData {
    structural(m, HTerm::Forms)
}

/// Same formula with the divergence term written through brackets with `H`.
pub fn ricci_structural_h(m: &MetricLieAlgebra) -> RicciData {
    structural(m, HTerm::Brackets)
}

/// Ricci data from the Levi-Civita connection.
pub fn ricci_koszul(m: &MetricLieAlgebra) -> RicciData {
    let l = m.algebra();
    let metric = m.metric();
    let n = l.dim();
    let g = metric.gram();
    let gi = metric.inverse();
    let half = Scalar::ratio(1, 2);
    // ⟨[e_i,e_j], e_k⟩
    let br = |i: usize, j: usize, k: usize| -> Scalar {
        (0..n).filter(|&m| !l.constant(i, j, m).is_zero()).map(|m| l.constant(i, j, m) * g.get(m, k)).sum()
    };
    // (L_i)_{lj}: ∇_{e_i} e_j = Σ_l (L_i)_{lj} e_l
    let conn: Vec<Matrix> = (0..n)
        .map(|i| {
            let lower = Matrix::from_fn(n, n, |j, k| (br(i, j, k) - br(j, k, i) + br(k, i, j)) * &half);
            gi * &lower.transpose()
        })
        .collect();
    let curvature = |a: usize, x: usize| -> Matrix {
        let mut r = conn[a].commutator(&conn[x]);
        for (c, lc) in conn.iter().enumerate() {
            let k = l.constant(a, x, c);
            if !k.is_zero() {
                r = &r - &lc.scale(k);
            }
        }
        r
    };
    let rs: Vec<Vec<Matrix>> = (0..n).map(|a| (0..n).map(|x| curvature(a, x)).collect()).collect();
    let ric = Matrix::from_fn(n, n, |x, y| (0..n).map(|a| rs[a][x].get(a, y).clone()).sum());
    assemble(metric, l, ric)
}

/// Rank-one extension `g ⋊ ℝe₀`, `[v, e₀] = φ(v)`, with `⟨e₀, e₀⟩ = c`.
///
/// Returns the Ricci operator of the extension in the basis `(basis of g, e₀)`
/// from the Ricci operator of `g` and `φ`. The column of `e₀` over `g` is
/// the metric transpose of the `e₀` row.
pub fn ricci_operator_rank_one(g: &MetricLieAlgebra, phi: &Matrix, c: &Scalar) -> Matrix {
    let n = g.dim();
    let metric = g.metric();
    let eps = c.inv().expect("nondegenerate e0");
    let half = Scalar::ratio(1, 2);
    let star = crate::metric::adjoint_of(metric, phi);
    let tr = phi.trace();
    let block = &g.ricci().ricci_operator + &(&phi.commutator(&star) - &(phi + &star).scale(&tr)).scale(&(&eps * &half));
    let ads = g.algebra().ads();
    let row: Vec<Scalar> = ads.iter().map(|a| endo_inner_with(metric, a, phi) * &half).collect();
    let col = metric.sharp(&row);
    let corner = -(endo_inner_with(metric, phi, phi) + (phi * phi).trace()) * &half * &eps;
    Matrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
        (true, true) => block.get(i, j).clone(),
        (false, true) => &row[j] * &eps,
        (true, false) => col[i].clone(),
        (false, false) => corner.clone(),
    })
}

/// Outcome of an Einstein test.
#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinCheck {
    pub is_einstein: bool,
    pub lambda: Option<Scalar>,
}

/// `Ric = λ id` with `λ = scal / dim`.
pub fn einstein_check(m: &MetricLieAlgebra) -> EinsteinCheck {
    let r = m.ricci();
    let n = m.dim();
    if n == 0 {
        return EinsteinCheck { is_einstein: true, lambda: Some(Scalar::zero()) };
    }
    let lambda = &r.scal / &Scalar::int(n as i64);
    let diff = &r.ricci_operator - &Matrix::identity(n).scale(&lambda);
    let ok = if diff.is_exact() {
        diff.is_zero()
    } else {
        diff.is_zero_tol(crate::scalar::DEFAULT_TOL * r.ricci_operator.max_abs().max(1.0))
    };
    EinsteinCheck { is_einstein: ok, lambda: ok.then_some(lambda) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::parse_structure;
    use crate::scalar::Scalar as S;

    fn metric_lie(text: &str, gram: Matrix) -> MetricLieAlgebra {
        MetricLieAlgebra::from_gram(parse_structure(text).unwrap(), gram).unwrap()
    }

    #[test]
    fn heisenberg_ricci() {
        for g3 in [S::int(1), S::int(2), S::int(-1), S::ratio(-7, 3)] {
            let m = metric_lie("(0,0,e^{12})", Matrix::diag(&[S::one(), S::one(), g3.clone()]));
            let h = &g3 * &S::ratio(1, 2);
            let expected = Matrix::diag(&[-h.clone(), -h.clone(), h]);
            assert_eq!(m.ricci().ricci_operator, expected);
            assert_eq!(ricci_koszul(&m), *m.ricci());
            assert_eq!(ricci_structural_h(&m), *m.ricci());
        }
    }

    #[test]
    fn abelian_is_flat() {
        let m = MetricLieAlgebra::new(LieAlgebra::abelian(3), PseudoMetric::diagonal(&[1, -1, 2].map(S::int)).unwrap())
            .unwrap();
        assert!(m.ricci().ric.is_zero());
        assert!(ricci_koszul(&m).ric.is_zero());
        assert_eq!(einstein_check(&m).lambda, Some(S::zero()));
    }

    #[test]
    fn family_einstein_when_g2_is_g3_squared_over_g1() {
        let text = "(e^{14},-e^{24},-2e^{12},0)";
        for (g1, g2, g3) in [(1, 1, 1), (2, 8, 4), (3, 3, 3)] {
            let mut gram = Matrix::diag(&[S::int(g1), S::int(g2), S::zero(), S::zero()]);
            gram.set(2, 3, S::int(g3));
            gram.set(3, 2, S::int(g3));
            let m = metric_lie(text, gram);
            assert_eq!(einstein_check(&m).is_einstein, g2 * g1 == g3 * g3, "{g1} {g2} {g3}");
            assert_eq!(ricci_koszul(&m), *m.ricci());
        }
    }

    #[test]
    fn lambda_minus_twelve_over_g1() {
        for g1 in [1, 2, -3] {
            let mut gram = Matrix::diag(&[S::int(g1), S::int(7), S::zero(), S::zero()]);
            gram.set(2, 3, S::int(-5));
            gram.set(3, 2, S::int(-5));
            let m = metric_lie("(0,2e^{12},e^{13},3e^{14}+e^{23})", gram);
            let e = einstein_check(&m);
            assert_eq!(e.lambda, Some(S::ratio(-12, g1)));
            assert_eq!(ricci_koszul(&m), *m.ricci());
        }
    }

    #[test]
    fn aff_times_aff() {
        let text = "(-e^{12}-e^{13}-e^{14},2e^{34},-2e^{34},0)";
        let mut gram = Matrix::diag(&[S::one(), S::one(), S::zero(), S::zero()]);
        gram.set(2, 3, S::one());
        gram.set(3, 2, S::one());
        let m = metric_lie(text, gram);
        assert!(!einstein_check(&m).is_einstein);
        assert_eq!(m.ricci().ricci_operator.get(0, 0), &S::int(-5));
        let m = metric_lie(text, Matrix::diag(&[1, 1, -1, 1].map(S::int)));
        assert_eq!(einstein_check(&m).lambda, Some(S::int(-3)));
    }

    #[test]
    fn euclidean_heisenberg_not_einstein() {
        let m = metric_lie("(0,0,e^{12})", Matrix::identity(3));
        assert_eq!(einstein_check(&m), EinsteinCheck { is_einstein: false, lambda: None });
        assert!(m.ricci().h.iter().all(S::is_zero));
    }

    #[test]
    fn approx_backend_agrees() {
        let m = metric_lie("(0,2e^{12},e^{13},3e^{14}+e^{23})", Matrix::diag(&[S::int(2), S::one(), S::one(), S::one()]));
        let a = m.to_approx();
        assert!(a.ricci().ric.approx_eq(&m.ricci().ric, 1e-12));
        assert!(ricci_koszul(&a).ric.approx_eq(&m.ricci().ric, 1e-12));
    }

    #[test]
    fn rank_one_operator_heisenberg() {
        let h = metric_lie("(0,0,e^{12})", Matrix::diag(&[S::one(), S::one(), S::int(-2)]));
        let phi = Matrix::from_i64(&[&[1, 2, 0], &[0, 1, 0], &[0, 0, 2]]);
        let c = S::int(-3);
        let spec = crate::lie::SemidirectSpec::new(h.algebra().clone(), alloc::vec![-&phi]);
        let ext = crate::lie::semidirect(&spec).unwrap();
        let gram = h.metric().gram().direct_sum(&Matrix::diag(&[c.clone()]));
        let big = MetricLieAlgebra::from_gram(ext, gram).unwrap();
        assert_eq!(ricci_operator_rank_one(&h, &phi, &c), big.ricci().ricci_operator);
    }
}
