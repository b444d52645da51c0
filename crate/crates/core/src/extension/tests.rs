use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::lie::algebra::unit_vectors;
use crate::lie::parse_structure;
use crate::metric::einstein_check;
use crate::scalar::Scalar as S;
use crate::soliton::{solve_nilsoliton, SolitonType};

fn ml(text: &str, gram: Matrix) -> MetricLieAlgebra {
    MetricLieAlgebra::from_gram(parse_structure(text).unwrap(), gram).unwrap()
}

fn sym(n: usize, entries: &[(usize, usize, S)]) -> Matrix {
    let mut g = Matrix::zeros(n, n);
    for (i, j, v) in entries {
        g.set(*i, *j, v.clone());
        g.set(*j, *i, v.clone());
    }
    g
}

fn pick(n: usize, idx: &[usize]) -> Vec<Vector> {
    let e = unit_vectors(n);
    idx.iter().map(|&i| e[i].clone()).collect()
}

fn diag(xs: &[i64]) -> Matrix {
    Matrix::diag(&xs.iter().map(|&x| S::int(x)).collect::<Vec<_>>())
}

#[test]
fn degenerate_derived_algebra() {
    let m = ml("(e^{14},-e^{24},-2e^{12},0)", sym(4, &[(0, 0, S::one()), (1, 1, S::int(4)), (2, 3, S::int(2))]));
    assert!(einstein_check(&m).is_einstein);
    let d = analyze_decomposition(&m, &pick(4, &[0, 1, 2]), &pick(4, &[3])).unwrap();
    assert!(!d.flags.ideal_nondegenerate);
    assert!(!d.flags.is_standard);
    assert!(azencott_wilson(&d).is_err());
}

#[test]
fn normal_but_adjoint_not_derivation() {
    let m = ml("(0,2e^{12},e^{13},3e^{14}+e^{23})", sym(4, &[(0, 0, S::int(2)), (1, 1, S::int(7)), (2, 3, S::int(-5))]));
    let d = analyze_decomposition(&m, &pick(4, &[1, 2, 3]), &pick(4, &[0])).unwrap();
    assert!(d.flags.is_standard);
    assert!(d.flags.each_adx_normal);
    assert!(!d.flags.each_adx_star_is_derivation);
    assert!(!d.flags.is_pseudo_iwasawa);
    assert!(azencott_wilson(&d).is_err());
    assert_eq!(verify_correspondence(&d), Err(Error::NotPseudoIwasawa));
}

#[test]
fn non_normal_rejected() {
    let l = LieAlgebra::from_constants(
        4,
        &[(0, 3, 0, S::int(-2)), (1, 3, 1, S::int(-5)), (1, 3, 2, S::int(6)), (2, 3, 2, S::one())],
    )
    .unwrap();
    let m = MetricLieAlgebra::from_gram(l, diag(&[1, 1, -1, 1])).unwrap();
    assert_eq!(einstein_check(&m).lambda, Some(S::int(-12)));
    let d = analyze_decomposition(&m, &pick(4, &[0, 1, 2]), &pick(4, &[3])).unwrap();
    assert!(d.flags.is_standard);
    assert!(!d.flags.each_adx_normal);
    assert!(!d.flags.each_adx_star_is_derivation);
    assert!(azencott_wilson(&d).is_err());
}

fn nine_dim() -> MetricLieAlgebra {
    let g = parse_structure("(0,0,0,e^{12},e^{13},e^{24},e^{15}+e^{23},e^{26}+e^{14})").unwrap();
    let x = diag(&[0, 0, 1, 0, 1, 0, 1, 0]);
    let l = semidirect(&SemidirectSpec::new(g, vec![x])).unwrap();
    MetricLieAlgebra::from_gram(l, diag(&[1, 2, -1, 3, 1, -2, 1, 5, 1])).unwrap()
}

#[test]
fn pseudo_iwasawa_depends_on_complement() {
    let m = nine_dim();
    let d = analyze_decomposition(&m, &pick(9, &[0, 1, 2, 3, 4, 5, 6, 7]), &pick(9, &[8])).unwrap();
    assert!(d.flags.is_pseudo_iwasawa);
    for a in [[0, 8], [1, 8]] {
        let ideal: Vec<usize> = (0..9).filter(|i| !a.contains(i)).collect();
        let d = analyze_decomposition(&m, &pick(9, &ideal), &pick(9, &a)).unwrap();
        assert!(d.flags.is_standard);
        assert!(!d.flags.is_pseudo_iwasawa);
    }
}

#[test]
fn not_a_direct_sum() {
    let m = nine_dim();
    assert_eq!(analyze_decomposition(&m, &pick(9, &[0, 1]), &pick(9, &[1])), Err(Error::NotDirectSum));
}

#[test]
fn unimodular_ricci_flat_is_not_pseudo_iwasawa() {
    for g23 in [1, -3] {
        let m = ml("(0,e^{12},-e^{13})", sym(3, &[(0, 0, S::one()), (1, 2, S::int(g23))]));
        assert!(m.ricci().ric.is_zero());
        let d = analyze_decomposition(&m, &pick(3, &[1, 2]), &pick(3, &[0])).unwrap();
        assert!(d.flags.is_standard);
        assert!(d.h.iter().all(|x| x.is_zero()));
        // ad e1 is skew with respect to e2 ⊙ e3
        assert_eq!(adjoint_of(d.ideal().unwrap().metric(), &d.ad_complement[0]), d.ad_complement[0].scale(&S::int(-1)));
        assert!(!d.flags.is_pseudo_iwasawa);
        assert_eq!(verify_correspondence(&d), Err(Error::NotPseudoIwasawa));
    }
}

#[test]
fn unimodular_diagonal_fails_trace_condition() {
    let m = ml("(0,e^{12},-e^{13})", diag(&[1, 1, 1]));
    let d = analyze_decomposition(&m, &pick(3, &[1, 2]), &pick(3, &[0])).unwrap();
    assert!(d.flags.is_pseudo_iwasawa);
    let r = verify_correspondence(&d).unwrap();
    assert!(r.nilsoliton_condition);
    assert_eq!(r.restriction_type, SolitonType::Nil1);
    assert_eq!(r.restriction_lambda, None);
    assert!(!r.einstein);
    assert!(r.consistent);
}

#[test]
fn isotropic_mean_curvature() {
    let m = ml("(0,0,e^{13},e^{24})", diag(&[1, -1, 1, 1]));
    let d = analyze_decomposition(&m, &pick(4, &[2, 3]), &pick(4, &[0, 1])).unwrap();
    assert!(d.flags.is_pseudo_iwasawa);
    assert_eq!(d.h, vec![S::int(-1), S::one(), S::zero(), S::zero()]);
    assert!(m.metric().inner(&d.h, &d.h).is_zero());
    let r = verify_correspondence(&d).unwrap();
    assert!(!r.einstein);
    assert!(r.consistent);
    assert!(r.corollary.is_none());
}

fn heisenberg(g3: i64) -> MetricLieAlgebra {
    ml("(0,0,e^{12})", diag(&[1, 1, g3]))
}

#[test]
fn rank_one_heisenberg() {
    let m = heisenberg(1);
    let cert = solve_nilsoliton(&m).unwrap();
    let ext = extend_rank_one_nil4(&m, &cert).unwrap();
    assert_eq!(ext.kind, ExtensionKind::RankOneNil4);
    assert_eq!(ext.extended.metric().gram().get(3, 3), &S::int(4));
    assert_eq!(ext.verification.lambda, Some(S::ratio(-3, 2)));
    assert_eq!(ext.verification.signature, crate::linalg::Signature { positive: 4, negative: 0, zero: 0 });
    assert!(ext.decomposition.flags.is_pseudo_iwasawa);
    let r = verify_correspondence(&ext.decomposition).unwrap();
    assert!(r.consistent);
    assert_eq!(r.restriction_lambda, Some(cert.lambda.clone()));
    assert_eq!(r.d, cert.d);
    assert_eq!(r.corollary, Some(CorollaryCase::NonUnimodularNil4));
    assert_eq!(r.corollary_holds, Some(true));
    assert_eq!(r.nilradical_is_ideal, Some(true));
}

#[test]
fn rank_one_matches_rank_one_ricci_formula() {
    let m = heisenberg(-1);
    let cert = solve_nilsoliton(&m).unwrap();
    let ext = extend_rank_one_nil4(&m, &cert).unwrap();
    let c = cert.d.trace();
    let phi = cert.d.scale(&S::int(-1));
    assert_eq!(crate::metric::ricci_operator_rank_one(&m, &phi, &c), ext.extended.ricci().ricci_operator);
    assert_eq!(ext.verification.lambda, Some(S::ratio(3, 2)));
    assert_eq!(ext.verification.signature.negative, 2);
}

#[test]
fn rank_one_requires_nil4() {
    let m = ml("(0,0,e^{12},e^{13})", sym(4, &[(0, 0, S::one()), (2, 2, S::int(2)), (1, 3, S::int(3))]));
    let cert = solve_nilsoliton(&m).unwrap();
    assert_eq!(cert.soliton_type, SolitonType::Nil2);
    assert!(extend_rank_one_nil4(&m, &cert).is_err());
}

fn five_dim() -> MetricLieAlgebra {
    let g = sym(5, &[(0, 0, S::one()), (1, 2, S::one()), (3, 4, S::ratio(-1, 2))]);
    ml("(0,0,0,e^{12},e^{13})", g)
}

fn five_dim_a() -> Vec<Matrix> {
    let e6 = diag(&[-1, 1, 1, 0, 0]);
    let e7 = diag(&[1, 0, 0, 1, 1]);
    let mut e8 = Matrix::zeros(5, 5);
    for (i, j) in [(1, 2), (2, 1), (3, 4), (4, 3)] {
        e8.set(i, j, S::one());
    }
    vec![e6, e7, e8]
}

#[test]
fn iwasawa_eight_dim() {
    let m = five_dim();
    let cert = solve_nilsoliton(&m).unwrap();
    assert_eq!(cert.lambda, S::one());
    let n = Matrix::diag(&[2, 3, 3, 5, 5].map(|x| S::ratio(x, 4)));
    assert_eq!(cert.d, n.scale(&S::int(-1)));
    let ext = extend_iwasawa(&m, &cert, &five_dim_a()).unwrap();
    let printed = parse_structure("(-e^{16}+e^{17},e^{26}+e^{38},e^{36}+e^{28},e^{12}+e^{47}+e^{58},e^{13}+e^{57}+e^{48},0,0,0)")
        .unwrap();
    assert_eq!(ext.extended.algebra(), &printed);
    let mut gram = m.metric().gram().as_matrix().direct_sum(&sym(3, &[(0, 0, S::int(-3)), (0, 1, S::one()), (1, 1, S::int(-3)), (2, 2, S::int(-4))]));
    gram.set(5, 6, S::one());
    assert_eq!(ext.extended.metric().gram().as_matrix(), &gram);
    assert_eq!(ext.verification.lambda, Some(S::one()));
    let r = verify_correspondence(&ext.decomposition).unwrap();
    assert!(r.consistent);
    assert_eq!(r.d, cert.d);
    assert_eq!(r.nilradical_is_ideal, Some(true));
}

#[test]
fn iwasawa_minimal_a() {
    let m = five_dim();
    let cert = solve_nilsoliton(&m).unwrap();
    let ext = extend_iwasawa(&m, &cert, &[cert.d.clone()]).unwrap();
    assert_eq!(ext.extended.dim(), 6);
    assert_eq!(ext.verification.lambda, Some(S::one()));
}

#[test]
fn iwasawa_rejects_nilpotent_derivation() {
    let m = five_dim();
    let cert = solve_nilsoliton(&m).unwrap();
    let mut hat = Matrix::zeros(5, 5);
    hat.set(2, 1, S::one());
    hat.set(4, 3, S::one());
    let err = extend_iwasawa(&m, &cert, &[cert.d.clone(), hat]).unwrap_err();
    assert!(matches!(err, Error::Precondition(ref s) if s.contains("degenerate")), "{err:?}");
}

#[test]
fn iwasawa_rejects_missing_d() {
    let m = five_dim();
    let cert = solve_nilsoliton(&m).unwrap();
    assert!(extend_iwasawa(&m, &cert, &five_dim_a()[2..]).is_err());
}

#[test]
fn ricci_flat_heisenberg() {
    let m = ml("(0,0,e^{12})", sym(3, &[(0, 2, S::one()), (1, 1, S::one())]));
    let cert = solve_nilsoliton(&m).unwrap();
    assert_eq!(cert.soliton_type, SolitonType::Nil1);
    let mut d1 = Matrix::zeros(3, 3);
    d1.set(1, 0, S::one());
    d1.set(2, 1, S::one());
    let d2 = Matrix::unit(3, 2, 0);
    for (g4, g45, g5) in [(1, 0, 1), (2, 3, -1), (0, 1, 0)] {
        let a_metric = sym(2, &[(0, 0, S::int(g4)), (0, 1, S::int(g45)), (1, 1, S::int(g5))]);
        let ext = extend_ricci_flat(&m, &cert, &[d1.clone(), d2.clone()], &a_metric).unwrap();
        assert!(ext.extended.ricci().ric.is_zero());
        assert!(crate::lie::structure::is_nilpotent(ext.extended.algebra()));
        // the printed algebra acts by −D_i
        let flip = diag(&[1, 1, 1, -1, -1]);
        let printed = parse_structure("(0,e^{41},e^{42}+e^{51}+e^{12},0,0)").unwrap();
        assert_eq!(ext.extended.algebra().change_basis(&flip).unwrap(), printed);
        let r = verify_correspondence(&ext.decomposition).unwrap();
        assert!(r.consistent);
        assert_eq!(r.corollary, Some(CorollaryCase::UnimodularNil1));
    }
}

fn nil2_five(g1: i64, g3: i64) -> MetricLieAlgebra {
    let g2 = -2 * g1;
    ml(
        "(0,0,0,0,e^{12})",
        sym(5, &[(0, 0, S::int(g1)), (1, 1, S::int(g2)), (2, 2, S::int(2 * g3)), (3, 4, S::int(2 * g1 * g2))]),
    )
}

#[test]
fn ricci_flat_nil2_seven_dim() {
    for (g1, g3) in [(1, 1), (2, -3)] {
        let m = nil2_five(g1, g3);
        let cert = solve_nilsoliton(&m).unwrap();
        assert_eq!(cert.soliton_type, SolitonType::Nil2);
        assert_eq!(cert.d, Matrix::unit(5, 4, 3));
        let mut x = Matrix::zeros(5, 5);
        x.set(1, 0, S::one());
        x.set(0, 1, S::int(-2));
        x.set(2, 2, S::int(2));
        assert!(ricci_flat_companion(&m, &cert.d).unwrap().exists);
        let a_metric = sym(2, &[(0, 1, S::int(2))]);
        let ext = extend_ricci_flat(&m, &cert, &[cert.d.clone(), x], &a_metric).unwrap();
        assert_eq!(ext.kind, ExtensionKind::RicciFlatNil2);
        assert!(ext.extended.ricci().ric.is_zero());
        assert!(!crate::lie::structure::is_unimodular(ext.extended.algebra()));
        let expected = parse_structure("(2e^{72},-e^{71},-2e^{73},0,e^{12}+e^{46},0,0)").unwrap();
        assert_eq!(ext.extended.algebra(), &expected);
        let r = verify_correspondence(&ext.decomposition).unwrap();
        assert!(r.consistent);
        assert_eq!(r.corollary, Some(CorollaryCase::Nil2));
        assert_eq!(r.corollary_holds, Some(true));
        assert_eq!(r.d, cert.d);
    }
}

#[test]
fn printed_seven_dim_fails_jacobi() {
    assert!(parse_structure("(2e^{72},-e^{71},-2e^{73},-e^{63},e^{12},0,0)").is_err());
}

#[test]
fn nil2_without_companion() {
    let m = ml("(0,0,e^{12},e^{13})", sym(4, &[(0, 0, S::one()), (2, 2, S::int(2)), (1, 3, S::int(3))]));
    let cert = solve_nilsoliton(&m).unwrap();
    let companion = ricci_flat_companion(&m, &cert.d).unwrap();
    assert_eq!(companion.candidates.len(), 2);
    assert!(!companion.exists);
    let x = diag(&[0, 1, 1, 1]);
    let a_metric = sym(2, &[(0, 1, S::one()), (1, 1, S::one())]);
    let err = extend_ricci_flat(&m, &cert, &[cert.d.clone(), x], &a_metric).unwrap_err();
    assert!(matches!(err, Error::Precondition(ref s) if s.contains("trace form")), "{err:?}");
}

#[test]
fn nil1_mixed_case_adjoins_h() {
    let sqrt2 = S::int(2).sqrt().unwrap();
    let m = MetricLieAlgebra::from_gram(LieAlgebra::abelian(3), sym(3, &[(0, 1, S::one()), (2, 2, S::one())])).unwrap();
    let cert = solve_nilsoliton(&m).unwrap();
    let mut x = Matrix::zeros(3, 3);
    x.set(1, 0, S::one());
    x.set(0, 1, S::int(-1));
    x.set(2, 2, sqrt2.clone());
    let ext = extend_ricci_flat(&m, &cert, &[x.clone()], &Matrix::zeros(1, 1)).unwrap();
    assert_eq!(ext.extended.dim(), 5);
    assert!(ext.extended.ricci().ric.is_zero_tol(1e-20));
    assert!(close(&Matrix::from_columns(&[ext.decomposition.h.clone()]), &Matrix::from_columns(&[pick(5, &[4])[0].clone()])));
    let r = verify_correspondence(&ext.decomposition).unwrap();
    assert!(r.consistent);
    assert_eq!(r.corollary, Some(CorollaryCase::CentralHNil1));
    assert_eq!(r.corollary_holds, Some(true));
    // the non-Iwasawa constructor treats the same data as its fourth case
    let other = extend_non_iwasawa(&m, &cert, &[x], Some(&Matrix::zeros(1, 1))).unwrap();
    assert_eq!(other.extended, ext.extended);
}

fn heisenberg_phi(k: i64) -> Matrix {
    Matrix::from_i64(&[&[1, k, 0], &[-k, 1, 0], &[0, 0, 2]])
}

#[test]
fn non_iwasawa_heisenberg() {
    for g3 in [1, -1] {
        let m = heisenberg(g3);
        let cert = solve_nilsoliton(&m).unwrap();
        let ext = extend_non_iwasawa(&m, &cert, &[heisenberg_phi(1)], None).unwrap();
        assert_eq!(ext.kind, ExtensionKind::NonIwasawa);
        assert_eq!(ext.extended.metric().gram().get(3, 3), &S::int(4 * g3));
        assert_eq!(ext.verification.lambda, Some(S::ratio(-3 * g3, 2)));
        assert!(ext.decomposition.flags.is_standard);
        assert!(!ext.decomposition.flags.is_pseudo_iwasawa);
        let aw = azencott_wilson(&ext.decomposition).unwrap();
        assert_eq!(aw.ricci().ric, ext.extended.ricci().ric);
        assert_eq!(aw.metric(), ext.extended.metric());
        assert!(!is_completely_solvable(ext.extended.algebra()).unwrap());
        assert!(is_completely_solvable(aw.algebra()).unwrap());
        let sym_ext = extend_iwasawa(&m, &cert, &[heisenberg_phi(0)]).unwrap();
        assert_eq!(aw, sym_ext.extended);
    }
}

#[test]
fn non_iwasawa_with_self_adjoint_a_is_iwasawa() {
    let m = five_dim();
    let cert = solve_nilsoliton(&m).unwrap();
    let a = five_dim_a();
    let x = extend_non_iwasawa(&m, &cert, &a, None).unwrap();
    let y = extend_iwasawa(&m, &cert, &a).unwrap();
    assert_eq!(x.extended, y.extended);
}

#[test]
fn non_iwasawa_rejects_bad_symmetric_part() {
    let m = heisenberg(1);
    let cert = solve_nilsoliton(&m).unwrap();
    let mut phi = heisenberg_phi(1);
    phi.set(0, 1, S::int(2));
    assert!(extend_non_iwasawa(&m, &cert, &[phi], None).is_err());
}

fn six_dim_standard(g2: i64, g4: i64) -> MetricLieAlgebra {
    ml(
        "(0,-e^{12},-e^{12}+e^{13},0,0,e^{15})",
        sym(6, &[(0, 3, S::one()), (1, 1, S::int(-g2)), (1, 2, S::int(g2)), (4, 5, S::int(g4))]),
    )
}

#[test]
fn azencott_wilson_six_dim() {
    for (g2, g4) in [(1, 1), (2, -3)] {
        let m = six_dim_standard(g2, g4);
        assert!(m.ricci().ric.is_zero());
        let d = analyze_decomposition(&m, &pick(6, &[1, 2, 4, 5]), &pick(6, &[0, 3])).unwrap();
        assert!(d.flags.is_standard && !d.flags.is_pseudo_iwasawa);
        let expected_ad = Matrix::from_i64(&[&[1, 0, 0, 0], &[1, -1, 0, 0], &[0, 0, 0, 0], &[0, 0, -1, 0]]);
        assert_eq!(d.ad_complement[0], expected_ad);
        let aw = azencott_wilson(&d).unwrap();
        assert_eq!(aw.algebra(), &parse_structure("(0,0,0,0,0,e^{15})").unwrap());
        assert_eq!(aw.metric(), m.metric());
        assert_eq!(aw.ricci().ric, m.ricci().ric);
        let again = analyze_decomposition(&aw, &d.ideal_basis, &d.complement_basis).unwrap();
        assert!(again.flags.is_pseudo_iwasawa);
    }
}

#[test]
fn azencott_wilson_identity_on_pseudo_iwasawa() {
    let m = heisenberg(1);
    let cert = solve_nilsoliton(&m).unwrap();
    let ext = extend_rank_one_nil4(&m, &cert).unwrap();
    assert_eq!(azencott_wilson(&ext.decomposition).unwrap(), ext.extended);
}

#[test]
fn azencott_wilson_non_adapted_basis() {
    let m = six_dim_standard(1, 1);
    let e = unit_vectors(6);
    let mixed: Vector = e[0].iter().zip(&e[3]).map(|(a, b)| a + b).collect();
    let d = analyze_decomposition(&m, &pick(6, &[1, 2, 4, 5]), &[mixed, e[3].clone()]).unwrap();
    let aw = azencott_wilson(&d).unwrap();
    assert_eq!(aw.ricci().ric, m.ricci().ric);
}

#[test]
fn nil3_rank_one() {
    let m = ml("(0,0,e^{12})", diag(&[1, 1, 1]));
    assert!(extend_rank_one_nil3(&m, &diag(&[1, 1, 2])).is_err());
    let flat = MetricLieAlgebra::new(LieAlgebra::abelian(2), PseudoMetric::euclidean(2)).unwrap();
    assert!(extend_rank_one_nil3(&flat, &diag(&[1, 0])).is_err());
}
