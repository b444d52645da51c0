use crate::error::{Error, Result};
use crate::lie::{nilradical, SemidirectSpec};
use crate::linalg::{signature, Matrix, SymMatrix, Vector};
use crate::metric::{einstein_check, restrict_to, MetricLieAlgebra, PseudoMetric};
use crate::scalar::Scalar;
use crate::soliton::SolitonType;

use super::{close, negligible, negligible_matrix, restricted_ad, Decomposition};

/// Which alternative of the structure results an Einstein instance falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorollaryCase {
    /// `λ ≠ 0`, `H = 0`, `g` Einstein.
    UnimodularNil3,
    /// `λ ≠ 0`, `⟨H, H⟩ ≠ 0`.
    NonUnimodularNil4,
    /// `λ = 0`, `H = 0`.
    UnimodularNil1,
    /// `λ = 0`, `H ≠ 0`, `ad H = 0`.
    CentralHNil1,
    /// `λ = 0`, `ad H ≠ 0`.
    Nil2,
}

/// Both sides of the Einstein/nilsoliton correspondence, evaluated separately.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceReport {
    pub einstein: bool,
    pub lambda: Option<Scalar>,
    /// `Ric_g = λ id + ad H` for some `λ`.
    pub nilsoliton_condition: bool,
    /// `Tr(ad X ad Y) = −λ ⟨X, Y⟩` on `a` for some `λ`.
    pub trace_condition: bool,
    /// The common `λ` of both conditions, when they hold.
    pub restriction_lambda: Option<Scalar>,
    /// `ad H` on `g` in the ideal basis.
    pub d: Matrix,
    pub restriction: MetricLieAlgebra,
    pub restriction_type: SolitonType,
    /// Einstein holds exactly when both conditions hold, with the same `λ`.
    pub consistent: bool,
    pub corollary: Option<CorollaryCase>,
    pub corollary_holds: Option<bool>,
    /// `g` is the nilradical; checked when `λ ≠ 0` on the exact backend.
    pub nilradical_is_ideal: Option<bool>,
}

fn scalar_multiple_of_identity(m: &Matrix) -> Option<Scalar> {
    let n = m.rows();
    if n == 0 {
        return None;
    }
    let l = m.get(0, 0).clone();
    close(m, &Matrix::identity(n).scale(&l)).then_some(l)
}

/// `λ` with `t = −λ a`, for a nondegenerate `a`.
fn trace_ratio(t: &Matrix, a: &Matrix) -> Option<Scalar> {
    let k = a.rows();
    if k == 0 {
        return None;
    }
    let (i, j) = (0..k).flat_map(|i| (0..k).map(move |j| (i, j))).find(|&(i, j)| !a.get(i, j).is_zero())?;
    let l = -(t.get(i, j) / a.get(i, j));
    close(t, &a.scale(&(-l.clone()))).then_some(l)
}

fn same_scalar(a: &Scalar, b: &Scalar) -> bool {
    if a.is_exact() && b.is_exact() {
        a == b
    } else {
        a.approx_eq(b, super::EXTENSION_TOL)
    }
}

fn sub_metric_lie(m: &MetricLieAlgebra, basis: &[Vector]) -> Result<MetricLieAlgebra> {
    let l = restrict_to(m.algebra(), basis)?;
    let g = Matrix::from_fn(basis.len(), basis.len(), |i, j| m.metric().inner(&basis[i], &basis[j]));
    MetricLieAlgebra::new(l, PseudoMetric::new(SymMatrix::symmetrize(&g))?)
}

/// Check both directions of the correspondence on a pseudo-Iwasawa decomposition.
pub fn verify_correspondence(d: &Decomposition) -> Result<CorrespondenceReport> {
    if !d.flags.is_pseudo_iwasawa {
        return Err(Error::NotPseudoIwasawa);
    }
    let m = &d.parent;
    let l = m.algebra();
    let restriction = d.ideal()?;
    let k = d.complement_basis.len();
    let ad_h = restricted_ad(l, &d.ideal_basis, &d.h).ok_or(Error::NotPseudoIwasawa)?;
    let ric = &restriction.ricci().ricci_operator;

    let lambda1 = scalar_multiple_of_identity(&(ric - &ad_h));
    let xs = &d.ad_complement;
    let t = Matrix::from_fn(k, k, |i, j| (&xs[i] * &xs[j]).trace());
    let a_gram = d.complement_gram();
    let lambda2 = trace_ratio(&t, &a_gram);

    let nilsoliton_condition = lambda1.is_some();
    let trace_condition = k == 0 || lambda2.is_some();
    let restriction_lambda = match (&lambda1, &lambda2) {
        (Some(a), Some(b)) if same_scalar(a, b) => Some(a.clone()),
        (Some(a), None) if k == 0 => Some(a.clone()),
        _ => None,
    };
    let right = restriction_lambda.is_some();

    let check = einstein_check(m);
    let consistent = match (&check.lambda, &restriction_lambda) {
        (Some(a), Some(b)) => same_scalar(a, b),
        (None, None) => true,
        _ => false,
    } && check.is_einstein == right;

    let restriction_type = match &lambda1 {
        Some(lam) => SolitonType::classify(lam, &ad_h),
        None => SolitonType::NotSoliton,
    };

    let mut report = CorrespondenceReport {
        einstein: check.is_einstein,
        lambda: check.lambda.clone(),
        nilsoliton_condition,
        trace_condition,
        restriction_lambda,
        d: ad_h,
        restriction,
        restriction_type,
        consistent,
        corollary: None,
        corollary_holds: None,
        nilradical_is_ideal: None,
    };
    if let Some(lambda) = &check.lambda {
        corollaries(d, lambda, &t, &mut report)?;
    }
    Ok(report)
}

fn corollaries(d: &Decomposition, lambda: &Scalar, t: &Matrix, report: &mut CorrespondenceReport) -> Result<()> {
    let m = &d.parent;
    let h = &d.h;
    let unimodular = h.iter().all(negligible);
    let ad_h = &report.d;
    let ric = &report.restriction.ricci().ricci_operator;
    let n = ad_h.rows();
    if !negligible(lambda) {
        if unimodular {
            report.corollary = Some(CorollaryCase::UnimodularNil3);
            report.corollary_holds = Some(close(ric, &Matrix::identity(n).scale(lambda)));
        } else {
            report.corollary = Some(CorollaryCase::NonUnimodularNil4);
            let hh = m.metric().inner(h, h);
            let mut basis = d.ideal_basis.clone();
            basis.push(h.clone());
            let sub_einstein = sub_metric_lie(m, &basis)
                .map(|s| einstein_check(&s).lambda.is_some_and(|l| same_scalar(&l, lambda)))
                .unwrap_or(false);
            let holds = !negligible(&hh)
                && !negligible(&ad_h.trace())
                && report.restriction_type == SolitonType::Nil4
                && sub_einstein;
            report.corollary_holds = Some(holds);
        }
        if m.is_exact() {
            let spec = SemidirectSpec::new(report.restriction.algebra().clone(), d.ad_complement.clone());
            report.nilradical_is_ideal = Some(nilradical(&spec)?.len() == d.ideal_basis.len());
        }
        return Ok(());
    }
    let flat_on_a = negligible_matrix(t);
    let ric_is_d = close(ric, ad_h);
    if unimodular {
        report.corollary = Some(CorollaryCase::UnimodularNil1);
        report.corollary_holds = Some(flat_on_a && ric_is_d && negligible_matrix(ric));
        return Ok(());
    }
    report.corollary = Some(if negligible_matrix(ad_h) { CorollaryCase::CentralHNil1 } else { CorollaryCase::Nil2 });
    // a companion X with Tr ad X ≠ 0 spans a nondegenerate plane with H
    let companion = d.complement_basis.iter().zip(&d.ad_complement).find(|(_, x)| !negligible(&x.trace()));
    let companion_ok = match companion {
        Some((x, adx)) => {
            let mut basis = d.ideal_basis.clone();
            basis.push(h.clone());
            basis.push(x.clone());
            let plane = Matrix::from_fn(2, 2, |i, j| m.metric().inner(&basis[n + i], &basis[n + j]));
            let nondegenerate = signature(&SymMatrix::symmetrize(&plane)).is_nondegenerate();
            let sub_flat = sub_metric_lie(m, &basis).map(|s| negligible_matrix(&s.ricci().ric)).unwrap_or(false);
            nondegenerate && negligible(&(adx * adx).trace()) && sub_flat
        }
        None => false,
    };
    report.corollary_holds = Some(flat_on_a && ric_is_d && companion_ok);
    Ok(())
}
