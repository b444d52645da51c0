use alloc::vec::Vec;

use crate::lie::algebra::unit_vectors;
use crate::lie::LieAlgebra;
use crate::linalg::{Matrix, Vector};
use crate::scalar::Scalar;

/// Series, center and the basic structural predicates of a Lie algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct StructuralReport {
    /// `g_0 = g, g_{k+1} = [g, g_k]` until it stabilises.
    pub lower_central_series: Vec<Vec<Vector>>,
    /// `g^0 = g, g^{k+1} = [g^k, g^k]` until it stabilises.
    pub derived_series: Vec<Vec<Vector>>,
    pub derived_algebra: Vec<Vector>,
    pub center: Vec<Vector>,
    pub is_nilpotent: bool,
    /// Least `s` with `g_s = 0`, for nilpotent algebras.
    pub nilpotency_step: Option<usize>,
    pub is_solvable: bool,
    pub is_unimodular: bool,
}

fn series(l: &LieAlgebra, derived: bool) -> Vec<Vec<Vector>> {
    let all = unit_vectors(l.dim());
    let mut out = alloc::vec![all.clone()];
    loop {
        let last = out.last().unwrap();
        let next = if derived { l.bracket_span(last, last) } else { l.bracket_span(&all, last) };
        let stable = next.len() == last.len();
        let empty = next.is_empty();
        if stable {
            break;
        }
        out.push(next);
        if empty {
            break;
        }
    }
    out
}

pub fn lower_central_series(l: &LieAlgebra) -> Vec<Vec<Vector>> {
    series(l, false)
}

pub fn center(l: &LieAlgebra) -> Vec<Vector> {
    let n = l.dim();
    // row (j, k): Σ_i x_i c^k_{ij}
    let m = Matrix::from_fn(n * n, n, |r, i| l.constant(i, r / n, r % n).clone());
    m.kernel()
}

pub fn is_nilpotent(l: &LieAlgebra) -> bool {
    lower_central_series(l).last().is_some_and(|s| s.is_empty()) || l.dim() == 0
}

pub fn is_unimodular(l: &LieAlgebra) -> bool {
    (0..l.dim()).all(|i| l.ad(i).trace().is_zero())
}

pub fn structural_report(l: &LieAlgebra) -> StructuralReport {
    let lcs = lower_central_series(l);
    let ds = series(l, true);
    let is_nilpotent = lcs.last().is_some_and(|s| s.is_empty());
    let is_solvable = ds.last().is_some_and(|s| s.is_empty());
    StructuralReport {
        derived_algebra: ds.get(1).cloned().unwrap_or_else(|| ds[0].clone()),
        nilpotency_step: is_nilpotent.then(|| lcs.len() - 1),
        center: center(l),
        is_nilpotent,
        is_solvable,
        is_unimodular: is_unimodular(l),
        lower_central_series: lcs,
        derived_series: ds,
    }
}

/// Every `[e_i, e_j]` and every `e_i ⌟ de^j` has at most one nonzero component
/// in the given basis.
pub fn is_nice(l: &LieAlgebra) -> bool {
    let n = l.dim();
    let at_most_one = |it: &mut dyn Iterator<Item = &Scalar>| it.filter(|x| !x.is_zero()).count() <= 1;
    for i in 0..n {
        for j in 0..n {
            if !at_most_one(&mut (0..n).map(|k| l.constant(i, j, k))) {
                return false;
            }
            // e_i ⌟ de^j = -Σ_m c^j_{im} e^m
            if !at_most_one(&mut (0..n).map(|m| l.constant(i, m, j))) {
                return false;
            }
        }
    }
    true
}
