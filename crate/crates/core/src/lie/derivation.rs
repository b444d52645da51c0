use alloc::vec::Vec;

use crate::lie::LieAlgebra;
use crate::linalg::{is_nilpotent_matrix, Matrix, SymMatrix, Vector};
use crate::scalar::Scalar;

/// A basis of `Der(g)` with its trace form and the radical `n` of that form.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationBasis {
    pub basis: Vec<Matrix>,
    /// `Tr(X_i X_j)`.
    pub gram_tr: SymMatrix,
    /// Basis of the radical of `gram_tr` on `Der(g)`, as matrices.
    pub null_basis: Vec<Matrix>,
}

impl DerivationBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// `Tr(X_i)` for each basis element.
    pub fn traces(&self) -> Vector {
        self.basis.iter().map(Matrix::trace).collect()
    }

    /// `Σ c_i X_i`.
    pub fn combine(&self, coeffs: &[Scalar]) -> Matrix {
        let n = self.basis.first().map_or(0, Matrix::rows);
        combine(&self.basis, coeffs, n)
    }

    /// Coordinates of a derivation in this basis.
    pub fn coordinates(&self, d: &Matrix) -> Option<Vector> {
        let cols: Vec<Vector> = self.basis.iter().map(Matrix::vectorize).collect();
        crate::linalg::coordinates(&cols, &d.vectorize())
    }

    pub fn contains(&self, d: &Matrix) -> bool {
        self.coordinates(d).is_some()
    }
}

pub(crate) fn combine(ms: &[Matrix], coeffs: &[Scalar], n: usize) -> Matrix {
    let mut acc = Matrix::zeros(n, n);
    for (m, c) in ms.iter().zip(coeffs) {
        if !c.is_zero_tol(0.0) {
            acc = &acc + &m.scale(c);
        }
    }
    acc
}

/// Trace-form Gram matrix `Tr(A_i A_j)`.
pub fn trace_gram(ms: &[Matrix]) -> SymMatrix {
    let k = ms.len();
    SymMatrix::new(Matrix::from_fn(k, k, |i, j| (&ms[i] * &ms[j]).trace())).expect("trace form is symmetric")
}

/// Solve `D[e_i,e_j] = [De_i,e_j] + [e_i,De_j]` for all `D`.
pub fn derivations(l: &LieAlgebra) -> DerivationBasis {
    let n = l.dim();
    let var = |a: usize, b: usize| a * n + b;
    let mut rows: Vec<Vector> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in 0..n {
                let mut row = alloc::vec![Scalar::zero(); n * n];
                for m in 0..n {
                    // D[e_i,e_j] component k: Σ_m D_{km} c^m_{ij}
                    let c = l.constant(i, j, m);
                    if !c.is_zero() {
                        row[var(k, m)] += c;
                    }
                    // [De_i, e_j]_k = Σ_m D_{mi} c^k_{mj}
                    let c = l.constant(m, j, k);
                    if !c.is_zero() {
                        row[var(m, i)] -= c;
                    }
                    // [e_i, De_j]_k = Σ_m D_{mj} c^k_{im}
                    let c = l.constant(i, m, k);
                    if !c.is_zero() {
                        row[var(m, j)] -= c;
                    }
                }
                if row.iter().any(|x| !x.is_zero()) {
                    rows.push(row);
                }
            }
        }
    }
    let kernel = if rows.is_empty() {
        crate::lie::algebra::unit_vectors(n * n)
    } else {
        Matrix::from_rows(rows).kernel()
    };
    let basis: Vec<Matrix> = kernel.iter().map(|v| Matrix::from_vector(n, n, v)).collect();
    let gram_tr = trace_gram(&basis);
    let null_basis: Vec<Matrix> = gram_tr.kernel().iter().map(|c| combine(&basis, c, n)).collect();
    debug_assert!(
        !crate::lie::structure::is_nilpotent(l) || null_basis.iter().all(is_nilpotent_matrix),
        "radical of the trace form contains a non-nilpotent derivation"
    );
    DerivationBasis { basis, gram_tr, null_basis }
}
