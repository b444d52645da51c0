use nilsol_core::extension::*;
use nilsol_core::lie::algebra::unit_vectors;
use nilsol_core::lie::structure::is_nilpotent;
use nilsol_core::lie::{semidirect, SemidirectSpec};
use nilsol_core::linalg::{is_semisimple_matrix, Signature};
use nilsol_core::metric::{einstein_check, MetricLieAlgebra};
use nilsol_core::soliton::{solve_nilsoliton, SolitonType};
use nilsol_core::{parse_structure, LieAlgebra, Matrix, Scalar as S, Vector};

fn ml(text: &str, gram: Matrix) -> MetricLieAlgebra {
    MetricLieAlgebra::from_gram(parse_structure(text).unwrap(), gram).unwrap()
}

fn sym_set(g: &mut Matrix, i: usize, j: usize, v: S) {
    g.set(i, j, v.clone());
    g.set(j, i, v);
}

fn diag_i(xs: &[i64]) -> Matrix {
    Matrix::diag(&xs.iter().map(|&x| S::int(x)).collect::<Vec<_>>())
}

fn kondo_tamaru(n: usize, lam: i64, xi: &S) -> MetricLieAlgebra {
    let lam = S::int(lam);
    let mut g = Matrix::zeros(n, n);
    for i in 0..n - 2 {
        g.set(i, i, S::one());
    }
    let (a, b) = (n - 2, n - 1);
    sym_set(&mut g, 0, a, -xi.clone());
    sym_set(&mut g, 0, b, -lam.clone());
    g.set(a, a, &S::one() + &(xi * xi));
    sym_set(&mut g, a, b, &lam * xi);
    g.set(b, b, &(&lam * &lam) - &S::one());
    let text = format!("({}e^{{12}})", "0,".repeat(n - 1));
    ml(&text, g)
}

fn kt_pairs() -> Vec<(i64, S)> {
    let s3 = S::int(3).sqrt().unwrap();
    vec![(0, S::zero()), (1, S::zero()), (1, S::one()), (2, S::zero()), (2, s3), (2, S::int(2))]
}

#[test]
fn kondo_tamaru_types() {
    for n in [4, 5] {
        let mut types = Vec::new();
        let mut nil4_lambdas = Vec::new();
        for (lam, xi) in kt_pairs() {
            let m = kondo_tamaru(n, lam, &xi);
            assert_eq!(m.metric().signature(), Signature { positive: n - 1, negative: 1, zero: 0 });
            let c = solve_nilsoliton(&m).unwrap();
            assert!(c.checks.all());
            if c.soliton_type == SolitonType::Nil4 {
                nil4_lambdas.push(c.lambda.clone());
                let ext = extend_rank_one_nil4(&m, &c).unwrap();
                let expected = if c.lambda.signum() > 0 { (n - 1, 2) } else { (n, 1) };
                let sig = ext.verification.signature;
                assert_eq!((sig.positive, sig.negative), expected);
                assert_eq!(ext.verification.lambda, Some(c.lambda.clone()));
            }
            if c.soliton_type == SolitonType::Nil2 && m.is_exact() {
                assert!(!ricci_flat_companion(&m, &c.d).unwrap().exists);
            }
            types.push(c.soliton_type);
        }
        use SolitonType::*;
        assert_eq!(types, vec![Nil4, Nil1, Nil2, Nil4, Nil2, Nil4]);
        assert_eq!(nil4_lambdas, vec![S::ratio(3, 2), S::ratio(27, 2), S::ratio(-9, 2)]);
    }
}

#[test]
fn kondo_tamaru_ricci_flat_extension() {
    for n in [4, 5] {
        let m = kondo_tamaru(n, 1, &S::zero());
        let cert = solve_nilsoliton(&m).unwrap();
        let mut x = Matrix::zeros(n, n);
        x.set(n - 2, 0, S::one());
        x.set(n - 1, n - 2, S::int(-1));
        for (sign, expected) in [(1, (n, 1)), (-1, (n - 1, 2))] {
            let ext = extend_ricci_flat(&m, &cert, &[x.clone()], &diag_i(&[sign])).unwrap();
            assert_eq!(ext.kind, ExtensionKind::RicciFlatNil1);
            assert!(is_nilpotent(ext.extended.algebra()));
            assert!(ext.extended.ricci().ric.as_matrix().is_zero());
            let sig = ext.verification.signature;
            assert_eq!((sig.positive, sig.negative), expected);
        }
    }
}

fn sqrt249() -> S {
    S::int(249).sqrt().unwrap()
}

fn einstein_nine() -> MetricLieAlgebra {
    let r = sqrt249();
    let lin = |a: i64, b: i64, d: i64| (&S::int(a) + &(&S::int(b) * &r)) / S::int(d);
    let g = [
        S::one(),
        &S::ratio(-3, 16) * &(&r + &S::int(9)),
        lin(731, -47, 2205),
        lin(131253, -8321, 463050),
        lin(-731, 47, 735),
        &S::ratio(9, 16) * &(&(&S::int(5) * &r) + &S::int(73)),
        &S::int(16) * &lin(-5256379, 333103, 170170875),
        &S::ratio(2, 105) * &(&S::int(183) - &(&S::int(11) * &r)),
        &S::int(4) * &lin(131253, -8321, 231525),
    ];
    let l = parse_structure("(0,0,0,0,e^{13}+e^{24},-e^{12},e^{34},e^{15}+e^{23}+e^{46},e^{14}+e^{27}+e^{35})").unwrap();
    MetricLieAlgebra::from_gram(l.to_approx(), Matrix::diag(&g)).unwrap()
}

#[test]
fn einstein_nilpotent_extends_unimodularly() {
    let m = einstein_nine();
    let check = einstein_check(&m);
    assert!(check.lambda.unwrap().approx_eq(&S::ratio(1, 2), 1e-9));
    let psi = diag_i(&[-1, -2, 1, 2, 0, -3, 3, -1, 1]).to_approx();
    let ext = extend_rank_one_nil3(&m, &psi).unwrap();
    assert_eq!(ext.kind, ExtensionKind::RankOneNil3);
    assert!(ext.extended.metric().gram().get(9, 9).approx_eq(&S::int(-60), 1e-9));
    assert!(ext.verification.lambda.clone().unwrap().approx_eq(&S::ratio(1, 2), 1e-9));
    let printed = parse_structure(
        "(-e^{1,10},-2e^{2,10},e^{3,10},2e^{4,10},e^{24}+e^{13},-3e^{6,10}-e^{12},3e^{7,10}+e^{34},\
         e^{46}+e^{15}+e^{23}-e^{8,10},e^{27}+e^{35}+e^{14}+e^{9,10},0)",
    )
    .unwrap();
    assert_eq!(ext.extended.algebra(), &printed.to_approx());
    let r = verify_correspondence(&ext.decomposition).unwrap();
    assert!(r.consistent);
    assert!(ext.decomposition.h.iter().all(|x| x.is_zero_tol(1e-9)));
    assert_eq!(r.corollary, Some(CorollaryCase::UnimodularNil3));
    assert_eq!(r.corollary_holds, Some(true));
}

fn h257(g5: S, g7: S) -> MetricLieAlgebra {
    let mut g = Matrix::zeros(7, 7);
    g.set(0, 0, &(&g5 * &g5) / &g7);
    g.set(1, 1, &(&S::int(3) * &g7) / &(&S::int(2) * &g5));
    sym_set(&mut g, 2, 3, S::one());
    g.set(4, 4, g5);
    g.set(5, 5, S::ratio(-2, 3));
    g.set(6, 6, g7);
    ml("(0,0,0,0,e^{12},e^{34},e^{13}+e^{25})", g)
}

#[test]
fn h257_extension_has_non_semisimple_mean_curvature() {
    for (g5, g7) in [(1, 1), (2, -3), (-1, 5)] {
        let (g5, g7) = (S::int(g5), S::int(g7));
        let m = h257(g5.clone(), g7.clone());
        let ric = &m.ricci().ricci_operator;
        assert_eq!(ric.get(3, 2), &-(&(&g7 * &g7) / &(&S::int(2) * &(&g5 * &g5))));
        let cert = solve_nilsoliton(&m).unwrap();
        assert_eq!(cert.lambda, S::int(-1));
        let ext = extend_rank_one_nil4(&m, &cert).unwrap();
        assert_eq!(ext.verification.lambda, Some(S::int(-1)));
        let r = verify_correspondence(&ext.decomposition).unwrap();
        assert!(r.consistent && r.corollary_holds == Some(true));
        assert_eq!(r.d, cert.d);
        assert!(!is_semisimple_matrix(&r.d).unwrap());
        let sig = ext.verification.signature;
        assert_eq!(sig.negative, m.metric().signature().negative);
    }
}

fn five_dim() -> MetricLieAlgebra {
    let mut g = diag_i(&[1, 0, 0, 0, 0]);
    sym_set(&mut g, 1, 2, S::one());
    sym_set(&mut g, 3, 4, S::ratio(-1, 2));
    ml("(0,0,0,e^{12},e^{13})", g)
}

fn eight_dim_a(skew: bool) -> Vec<Matrix> {
    let mut e8 = Matrix::zeros(5, 5);
    let s = if skew { -1 } else { 1 };
    e8.set(2, 1, S::one());
    e8.set(1, 2, S::int(s));
    e8.set(4, 3, S::one());
    e8.set(3, 4, S::int(s));
    vec![diag_i(&[-1, 1, 1, 0, 0]), diag_i(&[1, 0, 0, 1, 1]), e8]
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..1 << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

#[test]
fn iwasawa_intermediate_subalgebras_are_einstein() {
    let m = five_dim();
    let cert = solve_nilsoliton(&m).unwrap();
    let ext = extend_iwasawa(&m, &cert, &eight_dim_a(false)).unwrap();
    let e = unit_vectors(8);
    let mut h: Vector = vec![S::zero(); 8];
    h[5] = S::ratio(3, 4);
    h[6] = S::ratio(5, 4);
    let ideal: Vec<Vector> = e[..5].to_vec();
    // subalgebras between g ⋊ span{H} and g ⋊ a, spanned by H and coordinate vectors of a
    for extra in subsets(3) {
        let mut complement = vec![h.clone()];
        complement.extend(extra.iter().map(|&i| e[5 + i].clone()));
        let basis: Vec<Vector> = ideal.iter().chain(&complement).cloned().collect();
        let sub = nilsol_core::metric::restrict_to(ext.extended.algebra(), &basis);
        let rank = Matrix::from_columns(&basis).rank();
        if rank != basis.len() {
            continue;
        }
        let sub = sub.unwrap();
        let gram = Matrix::from_fn(basis.len(), basis.len(), |i, j| ext.extended.metric().inner(&basis[i], &basis[j]));
        let Ok(sm) = MetricLieAlgebra::from_gram(sub, gram) else { continue };
        assert_eq!(einstein_check(&sm).lambda, Some(S::one()), "{extra:?}");
        let n = basis.len();
        let d = analyze_decomposition(&sm, &unit_vectors(n)[..5], &unit_vectors(n)[5..]).unwrap();
        assert!(d.flags.is_pseudo_iwasawa);
    }
    let minimal = extend_iwasawa(&m, &cert, &[cert.d.clone()]).unwrap();
    assert_eq!(minimal.decomposition.h, vec![S::zero(), S::zero(), S::zero(), S::zero(), S::zero(), S::one()]);
}

#[test]
fn choice_of_a_changes_complete_solvability() {
    let m = five_dim();
    let cert = solve_nilsoliton(&m).unwrap();
    let sym = extend_iwasawa(&m, &cert, &eight_dim_a(false)).unwrap();
    let skew = extend_iwasawa(&m, &cert, &eight_dim_a(true)).unwrap();
    assert_eq!(skew.verification.lambda, Some(S::one()));
    assert!(is_completely_solvable(sym.extended.algebra()).unwrap());
    assert!(!is_completely_solvable(skew.extended.algebra()).unwrap());
}

fn nice_eight() -> MetricLieAlgebra {
    let c = S::ratio(3, 2).cbrt();
    let c2 = &c * &c;
    let g3 = S::approx(1.0);
    let g = [
        &S::ratio(1, 10) * &c,
        &S::ratio(1, 10) * &c2,
        g3.clone(),
        S::ratio(9, 100),
        -(&g3 * &c),
        &S::ratio(-9, 125) * &c2,
        &g3 * &c2,
        &S::ratio(27, 250) * &c,
    ];
    let l = parse_structure("(0,0,0,e^{12},e^{13},e^{24},e^{15}+e^{23},e^{26}+e^{14})").unwrap();
    MetricLieAlgebra::from_gram(l.to_approx(), Matrix::diag(&g)).unwrap()
}

#[test]
fn nice_nilsoliton_extends() {
    let m = nice_eight();
    let cert = solve_nilsoliton(&m).unwrap();
    assert_eq!(cert.soliton_type, SolitonType::Nil4);
    assert!(cert.lambda.approx_eq(&S::one(), 1e-9));
    let d = diag_i(&[0, 0, -1, 0, -1, 0, -1, 0]).to_approx();
    assert!(cert.d.approx_eq(&d, 1e-9));
    let ext = extend_rank_one_nil4(&m, &cert).unwrap();
    assert!(ext.verification.lambda.clone().unwrap().approx_eq(&S::one(), 1e-9));
    let r = verify_correspondence(&ext.decomposition).unwrap();
    assert!(r.consistent);
}

#[test]
fn joined_nilsolitons_extend_together() {
    let base = parse_structure("(0,0,e^{12},0,0,e^{45},e^{46})").unwrap();
    for (g1, g4, g5) in [(1, 1, 1), (2, -1, 3), (-3, 2, -1)] {
        let (g1, g4, g5) = (S::int(g1), S::int(g4), S::int(g5));
        let mut g = Matrix::zeros(7, 7);
        sym_set(&mut g, 0, 1, g1.clone());
        g.set(2, 2, &S::ratio(2, 3) * &(&g1 * &g1));
        g.set(3, 3, g4.clone());
        g.set(4, 4, g5.clone());
        g.set(5, 5, &S::ratio(-2, 3) * &(&g4 * &g5));
        g.set(6, 6, &S::ratio(4, 9) * &(&(&g4 * &g4) * &g5));
        let m = MetricLieAlgebra::from_gram(base.clone(), g).unwrap();
        let cert = solve_nilsoliton(&m).unwrap();
        assert_eq!(cert.lambda, S::one());
        let d1 = [2, 2, 4].map(|x| S::ratio(-x, 3));
        let d2 = [1, 2, 3, 4].map(|x| S::ratio(-x, 3));
        let expected: Vec<S> = d1.iter().chain(&d2).cloned().collect();
        assert_eq!(cert.d, Matrix::diag(&expected));
        let ext = extend_rank_one_nil4(&m, &cert).unwrap();
        assert_eq!(ext.extended.metric().gram().get(7, 7), &S::int(-6));
        assert_eq!(ext.verification.lambda, Some(S::one()));
    }
}

#[test]
fn ricci_flat_extension_by_nilpotent_derivation() {
    let mut g = Matrix::zeros(4, 4);
    sym_set(&mut g, 0, 2, S::one());
    sym_set(&mut g, 1, 3, S::one());
    let m = ml("(0,0,e^{12},e^{12})", g);
    let cert = solve_nilsoliton(&m).unwrap();
    assert_eq!(cert.soliton_type, SolitonType::Nil1);
    let dp = Matrix::from_i64(&[&[-1, -1, 0, 0], &[1, 1, 0, 0], &[0, 0, -1, 1], &[0, 0, -1, 1]]);
    for g5 in [1, -2] {
        let ext = extend_ricci_flat(&m, &cert, &[dp.clone()], &diag_i(&[g5])).unwrap();
        assert!(ext.extended.ricci().ric.as_matrix().is_zero());
        // D' squares to zero, so the extension stays nilpotent
        assert!(dp.pow(2).is_zero());
        assert!(is_nilpotent(ext.extended.algebra()));
        assert!(nilsol_core::lie::structure::is_unimodular(ext.extended.algebra()));
    }
}

#[test]
fn semidirect_of_trivial_action_is_direct_sum() {
    let l = semidirect(&SemidirectSpec::new(LieAlgebra::abelian(2), vec![Matrix::zeros(2, 2)])).unwrap();
    assert_eq!(l, LieAlgebra::abelian(3));
}
