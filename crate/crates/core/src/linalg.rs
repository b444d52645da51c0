//! Dense matrices over [`Scalar`] and the kernels built on them.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Index, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::{Rational, Scalar, DEFAULT_TOL};

pub type Vector = Vec<Scalar>;

/// Row-major dense matrix. All entries share one backend.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    fn from_data(rows: usize, cols: usize, mut data: Vec<Scalar>) -> Self {
        if data.iter().any(|x| !x.is_exact()) {
            for x in data.iter_mut() {
                if x.is_exact() {
                    *x = x.to_approx();
                }
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Scalar::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { Scalar::one() } else { Scalar::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::from_data(rows, cols, data)
    }

    /// Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        Matrix::from_data(r, c, rows.into_iter().flatten().collect())
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| Scalar::int(x)).collect()).collect())
    }

    pub fn diag(d: &[Scalar]) -> Self {
        let n = d.len();
        Matrix::from_fn(n, n, |i, j| if i == j { d[i].clone() } else { Scalar::zero() })
    }

    /// The elementary matrix `e^j ⊗ e_i`, mapping `e_j` to `e_i`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        Matrix::from_fn(n, n, |a, b| if a == i && b == j { Scalar::one() } else { Scalar::zero() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vector]) -> Self {
        let r = cols.first().map_or(0, |c| c.len());
        Matrix::from_fn(r, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_exact(&self) -> bool {
        self.data.iter().all(Scalar::is_exact)
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        let exact = self.is_exact();
        let idx = i * self.cols + j;
        match (exact, v.is_exact()) {
            (true, false) => {
                self.data[idx] = v;
                *self = Matrix::from_data(self.rows, self.cols, core::mem::take(&mut self.data));
            }
            (false, true) => self.data[idx] = v.to_approx(),
            _ => self.data[idx] = v,
        }
    }

    pub fn row(&self, i: usize) -> Vector {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vector> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn to_approx(&self) -> Self {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(Scalar::to_approx).collect() }
    }

    pub fn map(&self, f: impl FnMut(&Scalar) -> Scalar) -> Self {
        Matrix::from_data(self.rows, self.cols, self.data.iter().map(f).collect())
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        self.map(|x| x * s)
    }

    pub fn trace(&self) -> Scalar {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn diagonal(&self) -> Vector {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vector {
        assert_eq!(v.len(), self.cols, "dimension mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                let mut acc = Scalar::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = self.get(i, j);
                    if !a.is_zero_tol(0.0) && !x.is_zero_tol(0.0) {
                        acc += a * x;
                    }
                }
                acc
            })
            .collect()
    }

    /// `self * other - other * self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    pub fn pow(&self, k: usize) -> Matrix {
        (0..k).fold(Matrix::identity(self.rows), |acc, _| &acc * self)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn is_zero_tol(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_zero_tol(tol))
    }

    pub fn approx_eq(&self, other: &Matrix, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Replace approximate entries with `|x| <= tol` by zero.
    pub fn threshold(&self, tol: f64) -> Matrix {
        self.map(|x| x.threshold(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Flatten row-major into a vector.
    pub fn vectorize(&self) -> Vector {
        self.data.clone()
    }

    pub fn from_vector(rows: usize, cols: usize, v: &[Scalar]) -> Matrix {
        Matrix::from_data(rows, cols, v.to_vec())
    }

    /// Principal submatrix on the given indices.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let (r, c) = (self.rows + other.rows, self.cols + other.cols);
        Matrix::from_fn(r, c, |i, j| {
            if i < self.rows && j < self.cols {
                self.get(i, j).clone()
            } else if i >= self.rows && j >= self.cols {
                other.get(i - self.rows, j - self.cols).clone()
            } else {
                Scalar::zero()
            }
        })
    }

    fn pivot_tol(&self) -> f64 {
        DEFAULT_TOL * 1f64.max(self.max_abs())
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let exact = m.is_exact();
        let tol = if exact { 0.0 } else { self.pivot_tol() };
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let pick = if exact {
                (r..m.rows).find(|&i| !m.get(i, c).is_zero_tol(0.0))
            } else {
                (r..m.rows)
                    .filter(|&i| !m.get(i, c).is_zero_tol(tol))
                    .max_by(|&a, &b| m.get(a, c).to_f64().abs().total_cmp(&m.get(b, c).to_f64().abs()))
            };
            let Some(p) = pick else { continue };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("nonzero pivot");
            for j in 0..m.cols {
                let v = m.get(r, j) * &inv;
                m.data[r * m.cols + j] = v;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m.get(i, c).clone();
                if f.is_zero_tol(0.0) {
                    continue;
                }
                for j in 0..m.cols {
                    let pr = m.get(r, j);
                    if pr.is_zero_tol(0.0) {
                        continue;
                    }
                    let v = m.get(i, j) - &(&f * pr);
                    m.data[i * m.cols + j] = v;
                }
                if !exact {
                    m.data[i * m.cols + c] = Scalar::approx(0.0);
                }
            }
            pivots.push(c);
            r += 1;
        }
        if !exact {
            m = m.map(|x| x.threshold(tol));
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of `{x : A x = 0}`.
    pub fn kernel(&self) -> Vec<Vector> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let zero = if self.is_exact() { Scalar::zero() } else { Scalar::approx(0.0) };
        free.iter()
            .map(|&f| {
                let mut v = vec![zero.clone(); self.cols];
                v[f] = Scalar::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f);
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                Scalar::one()
            } else {
                Scalar::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(Matrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    pub fn determinant(&self) -> Scalar {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Scalar::one();
        for c in 0..n {
            let p = (c..n).find(|&i| !m.get(i, c).is_zero_tol(0.0));
            let Some(p) = p else { return Scalar::zero() };
            if p != c {
                m.swap_rows(p, c);
                det = -det;
            }
            let pv = m.get(c, c).clone();
            det = &det * &pv;
            let inv = pv.inv().unwrap();
            for i in c + 1..n {
                let f = m.get(i, c) * &inv;
                if f.is_zero_tol(0.0) {
                    continue;
                }
                for j in c..n {
                    let v = m.get(i, j) - &(&f * m.get(c, j));
                    m.data[i * n + j] = v;
                }
            }
        }
        det
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        self.get(i, j)
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in matrix product");
        let mut data = vec![Scalar::zero(); self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero_tol(0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero_tol(0.0) {
                        continue;
                    }
                    data[i * rhs.cols + j] += a * b;
                }
            }
        }
        Matrix::from_data(self.rows, rhs.cols, data)
    }
}

impl Mul for Matrix {
    type Output = Matrix;
    fn mul(self, rhs: Matrix) -> Matrix {
        &self * &rhs
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &'a Matrix) -> Matrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "dimension mismatch in matrix sum");
        Matrix::from_data(self.rows, self.cols, self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect())
    }
}

impl Add for Matrix {
    type Output = Matrix;
    fn add(self, rhs: Matrix) -> Matrix {
        &self + &rhs
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &'a Matrix) -> Matrix {
        assert!(self.rows == rhs.rows && self.cols == rhs.cols, "dimension mismatch in matrix difference");
        Matrix::from_data(self.rows, self.cols, self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect())
    }
}

impl Sub for Matrix {
    type Output = Matrix;
    fn sub(self, rhs: Matrix) -> Matrix {
        &self - &rhs
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        self.map(|x| -x)
    }
}

impl Neg for Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        -&self
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.rows {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// A symmetric matrix, validated on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare);
        }
        if !m.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        Ok(SymMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        SymMatrix(Matrix::identity(n))
    }

    pub fn diag(d: &[Scalar]) -> Self {
        SymMatrix(Matrix::diag(d))
    }

    /// Symmetrize `(m + mᵀ)/2`.
    pub fn symmetrize(m: &Matrix) -> Self {
        let s = (m + &m.transpose()).scale(&Scalar::ratio(1, 2));
        SymMatrix(s)
    }

    pub fn order(&self) -> usize {
        self.0.rows()
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }
}

impl core::ops::Deref for SymMatrix {
    type Target = Matrix;
    fn deref(&self) -> &Matrix {
        &self.0
    }
}

/// Particular solution and kernel basis of a linear system.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearSolution {
    pub particular: Vector,
    pub kernel: Vec<Vector>,
}

/// Solve `A x = b`, free variables set to zero in the particular solution.
pub fn solve_linear(a: &Matrix, b: &[Scalar]) -> Result<LinearSolution> {
    if b.len() != a.rows() {
        return Err(Error::DimensionMismatch { expected: a.rows(), found: b.len() });
    }
    let n = a.cols();
    let aug = Matrix::from_fn(a.rows(), n + 1, |i, j| if j < n { a.get(i, j).clone() } else { b[i].clone() });
    let (r, pivots) = aug.rref();
    if pivots.last() == Some(&n) {
        return Err(Error::Inconsistent);
    }
    let zero = if aug.is_exact() { Scalar::zero() } else { Scalar::approx(0.0) };
    let mut x = vec![zero; n];
    for (row, &p) in pivots.iter().enumerate() {
        x[p] = r.get(row, n).clone();
    }
    Ok(LinearSolution { particular: x, kernel: a.kernel() })
}

/// Row-reduced basis of the span of the given vectors.
pub fn span_basis(vectors: &[Vector], dim: usize) -> Vec<Vector> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = Matrix::from_rows(vectors.to_vec());
    debug_assert_eq!(m.cols(), dim);
    let (r, pivots) = m.rref();
    (0..pivots.len()).map(|i| r.row(i)).collect()
}

/// Coordinates of `v` in the given basis, if it lies in the span.
pub fn coordinates(basis: &[Vector], v: &[Scalar]) -> Option<Vector> {
    if basis.is_empty() {
        return v.iter().all(Scalar::is_zero).then(Vec::new);
    }
    let a = Matrix::from_columns(basis);
    solve_linear(&a, v).ok().map(|s| s.particular)
}

/// True when `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vector], v: &[Scalar]) -> bool {
    coordinates(basis, v).is_some()
}

/// Characteristic and minimal polynomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharMinPoly {
    pub charpoly: Poly,
    pub minpoly: Poly,
}

fn exact_entries(m: &Matrix, op: &'static str) -> Result<Vec<Rational>> {
    m.entries()
        .iter()
        .map(|x| x.as_rational().cloned().ok_or(Error::ApproxBackend(op)))
        .collect()
}

/// Characteristic polynomial `det(t - M)` by Faddeev–LeVerrier.
pub fn charpoly(m: &Matrix) -> Result<Poly> {
    if !m.is_square() {
        return Err(Error::NotSquare);
    }
    exact_entries(m, "charpoly")?;
    let n = m.rows();
    let mut coeffs = vec![Rational::zero(); n + 1];
    coeffs[n] = Rational::one();
    let mut mk = Matrix::zeros(n, n);
    for k in 1..=n {
        let c_prev = Scalar::Exact(coeffs[n - k + 1].clone());
        mk = &(m * &mk) + &Matrix::identity(n).scale(&c_prev);
        let t = (m * &mk).trace();
        let c = -(t / Scalar::int(k as i64));
        coeffs[n - k] = c.as_rational().unwrap().clone();
    }
    Ok(Poly::new(coeffs))
}

/// Minimal polynomial via the first linear dependence among `I, M, M², …`.
pub fn minpoly(m: &Matrix) -> Result<Poly> {
    if !m.is_square() {
        return Err(Error::NotSquare);
    }
    exact_entries(m, "minpoly")?;
    let n = m.rows();
    let mut powers = vec![Matrix::identity(n).vectorize()];
    let mut cur = Matrix::identity(n);
    for d in 1..=n {
        cur = &cur * m;
        let target = cur.vectorize();
        let a = Matrix::from_columns(&powers);
        if let Ok(sol) = solve_linear(&a, &target) {
            let mut coeffs: Vec<Rational> = sol.particular.iter().map(|x| -x.as_rational().unwrap().clone()).collect();
            coeffs.push(Rational::one());
            return Ok(Poly::new(coeffs));
        }
        powers.push(target);
        debug_assert!(d < n);
    }
    Err(Error::Internal("minimal polynomial search exceeded the order".into()))
}

pub fn char_min_poly(m: &Matrix) -> Result<CharMinPoly> {
    Ok(CharMinPoly { charpoly: charpoly(m)?, minpoly: minpoly(m)? })
}

/// Evaluate a rational polynomial at a square matrix.
pub fn eval_poly(p: &Poly, m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut acc = Matrix::zeros(n, n);
    for c in p.coeffs().iter().rev() {
        acc = &(&acc * m) + &Matrix::identity(n).scale(&Scalar::Exact(c.clone()));
    }
    acc
}

/// Jordan–Chevalley parts `M = S + N`.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanChevalley {
    pub semisimple: Matrix,
    pub nilpotent: Matrix,
}

/// Semisimple and nilpotent parts by Newton iteration on the squarefree
/// part of the characteristic polynomial.
pub fn jordan_chevalley(m: &Matrix) -> Result<JordanChevalley> {
    let p = charpoly(m)?;
    let q = p.squarefree_part();
    let dq = q.derivative();
    let mut s = m.clone();
    loop {
        let r = eval_poly(&q, &s);
        if r.is_zero() {
            break;
        }
        let d = eval_poly(&dq, &s)
            .inverse()
            .ok_or_else(|| Error::Internal("singular Newton step in Jordan-Chevalley".into()))?;
        s = &s - &(&r * &d);
    }
    let nilpotent = m - &s;
    Ok(JordanChevalley { semisimple: s, nilpotent })
}

/// `Mⁿ = 0`; the approximate backend compares against a scaled tolerance.
pub fn is_nilpotent_matrix(m: &Matrix) -> bool {
    let n = m.rows();
    if m.is_exact() {
        return m.pow(n).is_zero_tol(0.0);
    }
    let scale = num_traits::float::FloatCore::powi(1f64.max(m.max_abs()), n as i32);
    m.pow(n).is_zero_tol(DEFAULT_TOL * scale)
}

/// Squarefree minimal polynomial.
pub fn is_semisimple_matrix(m: &Matrix) -> Result<bool> {
    Ok(minpoly(m)?.is_squarefree())
}

/// Eigenvalues with algebraic multiplicity, when all are rational.
pub fn rational_eigenvalues(m: &Matrix) -> Result<Option<Vec<(Rational, usize)>>> {
    Ok(charpoly(m)?.split_roots())
}

/// True when every eigenvalue is real.
pub fn has_real_spectrum(m: &Matrix) -> Result<bool> {
    Ok(charpoly(m)?.all_roots_real())
}

/// Signature `(p, q, r)` of a symmetric form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

impl Signature {
    pub fn is_nondegenerate(&self) -> bool {
        self.zero == 0
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.positive, self.negative, self.zero)
    }
}

/// Exact forms use Descartes' rule on the characteristic polynomial; the
/// approximate backend uses congruence diagonalisation.
pub fn signature(g: &SymMatrix) -> Signature {
    if g.is_exact() {
        let p = charpoly(g).expect("exact square matrix");
        let r = p.zero_multiplicity();
        let reduced = Poly::new(p.coeffs()[r..].to_vec());
        Signature { positive: reduced.sign_changes(), negative: reduced.reflect().sign_changes(), zero: r }
    } else {
        congruence_signature(g)
    }
}

/// Signature by symmetric Gaussian elimination `PᵀGP`.
pub fn congruence_signature(g: &Matrix) -> Signature {
    let n = g.rows();
    let mut m = g.clone();
    let tol = if m.is_exact() { 0.0 } else { m.pivot_tol() };
    let mut sig = Signature { positive: 0, negative: 0, zero: 0 };
    let mut active: Vec<usize> = (0..n).collect();
    while let Some(&first) = active.first() {
        let mut piv = active
            .iter()
            .copied()
            .filter(|&i| !m.get(i, i).is_zero_tol(tol))
            .max_by(|&a, &b| m.get(a, a).to_f64().abs().total_cmp(&m.get(b, b).to_f64().abs()));
        if piv.is_none() {
            let pair = active
                .iter()
                .flat_map(|&i| active.iter().map(move |&j| (i, j)))
                .find(|&(i, j)| i != j && !m.get(i, j).is_zero_tol(tol));
            match pair {
                Some((i, j)) => {
                    for k in 0..n {
                        let v = m.get(i, k) + m.get(j, k);
                        m.set(i, k, v);
                    }
                    for k in 0..n {
                        let v = m.get(k, i) + m.get(k, j);
                        m.set(k, i, v);
                    }
                    piv = Some(i);
                }
                None => {
                    sig.zero += active.len();
                    break;
                }
            }
        }
        let p = piv.unwrap_or(first);
        let d = m.get(p, p).clone();
        if d.signum() > 0 {
            sig.positive += 1;
        } else {
            sig.negative += 1;
        }
        active.retain(|&i| i != p);
        let inv = d.inv().unwrap();
        for &i in &active {
            let f = m.get(i, p) * &inv;
            for &j in &active {
                let v = m.get(i, j) - &(&f * m.get(p, j));
                m.set(i, j, v);
            }
        }
        for &i in &active {
            m.set(i, p, Scalar::zero());
            m.set(p, i, Scalar::zero());
        }
    }
    sig
}
