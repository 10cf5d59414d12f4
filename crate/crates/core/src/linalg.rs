//! Dense complex-matrix kernel.
//!
//! Everything here works on small row-major matrices (dimensions up to a few
//! dozen). The Hermitian eigensolver is a cyclic complex Jacobi iteration,
//! which is accurate to a few ulps at these sizes and needs no external
//! LAPACK. Matrix square roots, the self-adjoint polar decomposition and the
//! trace norm are all spectral functions built on top of it.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{mismatch, Error, Result};
use crate::scalar::Real;

/// Absolute Hermiticity tolerance, scaled by `max(1, ||h||_F)`.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues of a PSD input may dip this far below zero before rejection.
pub const PSD_CLIP: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Empty);
        }
        if data.len() != rows * cols {
            return Err(Error::BadShape { rows, cols, len: data.len() });
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite { row: k / cols, col: k % cols });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows(rows: Vec<Vec<Complex<T>>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != m) {
            return Err(mismatch("row length", m, bad.len()));
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    /// Builds a real matrix from nested rows of `f64`.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex::new(T::lit(x), T::zero())).collect())
                .collect(),
        )
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| Complex::zero())
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { Complex::one() } else { Complex::zero() })
    }

    /// Diagonal matrix with real entries.
    pub fn diag_real(values: &[T]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(values[i], T::zero())
            } else {
                Complex::zero()
            }
        })
    }

    /// Column vector holding `ket`.
    pub fn column(ket: &[Complex<T>]) -> Self {
        Self::from_fn(ket.len(), 1, |i, _| ket[i])
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

    /// Side length of a square matrix.
    pub fn dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    pub fn as_slice(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| f(z)).collect() }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|z| z * s)
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|z| z * s)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().map(|z| z.norm()).fold(T::zero(), T::max)
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<Complex<T>> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(mismatch(
                "trace_product",
                format!("{}x{}", self.cols, self.rows),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        let mut acc = Complex::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        Ok(acc)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(mismatch(
                "matrix product",
                format!("{} rows", self.cols),
                format!("{} rows", other.rows),
            ));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    fn same_shape(&self, other: &Self, context: &'static str) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(mismatch(
                context,
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", other.rows, other.cols),
            ));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "matrix sum")?;
        Ok(self.zip(other, |a, b| a + b))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other, "matrix difference")?;
        Ok(self.zip(other, |a, b| a - b))
    }

    fn zip(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `(self + self†) / 2`, used on intermediates that are Hermitian in
    /// exact arithmetic.
    pub fn hermitian_part(&self) -> Self {
        let half = T::lit(0.5);
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * half)
    }

    /// Largest `|m[i,j] - conj(m[j,i])|`; infinite for non-square input.
    pub fn max_asymmetry(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Hermiticity check at the default scaled tolerance.
    pub fn hermitian_check(&self) -> HermitianCheck<T> {
        let tolerance = T::tol(HERMITIAN_TOL) * T::one().max(self.frobenius_norm());
        HermitianCheck { max_asymmetry: self.max_asymmetry(), tolerance }
    }

    /// Matrix-vector product.
    pub fn apply(&self, ket: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if ket.len() != self.cols {
            return Err(mismatch("matrix-vector product", self.cols, ket.len()));
        }
        Ok((0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * ket[j]).sum())
            .collect())
    }

    /// `<ket| self |ket>`.
    pub fn expectation(&self, ket: &[Complex<T>]) -> Result<Complex<T>> {
        let image = self.apply(ket)?;
        Ok(inner(ket, &image))
    }

    /// `||self - other||_F`, or infinity when shapes differ.
    pub fn distance(&self, other: &Self) -> T {
        match self.try_sub(other) {
            Ok(d) => d.frobenius_norm(),
            Err(_) => T::infinity(),
        }
    }

    /// `||self† self - I||_F`.
    pub fn unitarity_defect(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        (&self.adjoint() * self).distance(&Self::identity(self.rows))
    }
}

impl<T> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

// Operator impls panic on shape mismatch; the `try_*` methods return errors.
impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_mul(rhs).expect("matrix product shape")
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_add(rhs).expect("matrix sum shape")
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: Self) -> ComplexMatrix<T> {
        self.try_sub(rhs).expect("matrix difference shape")
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

impl<T: fmt::Debug> fmt::Debug for ComplexMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for row in self.data.chunks(self.cols) {
            writeln!(f, "  {row:?}")?;
        }
        write!(f, "]")
    }
}

/// Result of a Hermiticity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianCheck<T> {
    pub max_asymmetry: T,
    pub tolerance: T,
}

impl<T: Real> HermitianCheck<T> {
    pub fn passes(&self) -> bool {
        self.max_asymmetry <= self.tolerance
    }

    pub(crate) fn into_result(self, what: &'static str) -> Result<()> {
        if self.passes() {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                what,
                asymmetry: self.max_asymmetry.to_f64().unwrap_or(f64::INFINITY),
                tolerance: self.tolerance.to_f64().unwrap_or(0.0),
            })
        }
    }
}

/// `<a|b>`, conjugate-linear in the first argument.
pub fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn ket_norm<T: Real>(ket: &[Complex<T>]) -> T {
    ket.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

/// `|ket><ket|`.
pub fn outer<T: Real>(ket: &[Complex<T>]) -> ComplexMatrix<T> {
    let n = ket.len();
    ComplexMatrix::from_fn(n, n, |i, j| ket[i] * ket[j].conj())
}

/// Kronecker product kron(a, b)[(i,k),(j,l)] = a[i,j] * b[k,l].
pub fn tensor<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Kronecker product of two kets.
pub fn tensor_ket<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Vec<Complex<T>> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Traces out `which` from an operator on a `dim_first * dim_second` space,
/// returning the reduced operator on the other factor.
pub fn partial_trace<T: Real>(
    m: &ComplexMatrix<T>,
    dim_first: usize,
    dim_second: usize,
    which: Factor,
) -> Result<ComplexMatrix<T>> {
    let n = dim_first * dim_second;
    if dim_first == 0 || dim_second == 0 || m.rows != n || m.cols != n {
        return Err(mismatch(
            "partial_trace",
            format!("{n}x{n}"),
            format!("{}x{}", m.rows, m.cols),
        ));
    }
    Ok(match which {
        Factor::Second => ComplexMatrix::from_fn(dim_first, dim_first, |i, j| {
            (0..dim_second).map(|k| m[(i * dim_second + k, j * dim_second + k)]).sum()
        }),
        Factor::First => ComplexMatrix::from_fn(dim_second, dim_second, |k, l| {
            (0..dim_first).map(|i| m[(i * dim_second + k, i * dim_second + l)]).sum()
        }),
    })
}

/// `ab - ba`.
pub fn commutator<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let n = a.dim()?;
    if b.rows != n || b.cols != n {
        return Err(mismatch("commutator", format!("{n}x{n}"), format!("{}x{}", b.rows, b.cols)));
    }
    Ok(&(a * b) - &(b * a))
}

/// Spectral decomposition `h = V diag(values) V†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T> {
    /// Ascending.
    pub values: Vec<T>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// Eigenvector `k` as a ket.
    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        (0..self.vectors.rows).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `V diag(f(λ)) V†`.
    pub fn apply_fn(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.values.len();
        let fv: Vec<T> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| v[(i, k)] * v[(j, k)].conj() * fv[k]).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.apply_fn(|x| x)
    }

    pub fn max_abs_value(&self) -> T {
        self.values.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Rejects inputs failing the scaled Hermiticity tolerance; accepted inputs
/// are treated through their Hermitian part.
pub fn eig_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<HermitianEigen<T>> {
    let n = h.dim()?;
    h.hermitian_check().into_result("eigensolver input")?;
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::<T>::identity(n);
    let scale = a.frobenius_norm();
    let threshold = T::epsilon() * T::lit(0.5) * scale;

    let mut converged = n == 1 || scale.is_zero();
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        let off = off_diagonal_norm(&a);
        converged = off <= threshold;
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    let n = a.rows;
    let mut s = T::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One Jacobi rotation zeroing `a[p,q]`: `a <- J† a J`, `v <- v J`.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g <= T::min_positive_value() {
        return;
    }
    let phase = apq / g;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (g + g);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let back = phase.conj();
    // J restricted to (p, q): [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
    let j_pp = Complex::new(c, T::zero());
    let j_pq = Complex::new(s, T::zero());
    let j_qp = back * (-s);
    let j_qq = back * c;

    let n = a.rows;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = Complex::zero();
    a[(q, p)] = Complex::zero();
    a[(p, p)] = Complex::new(app - t * g, T::zero());
    a[(q, q)] = Complex::new(aqq + t * g, T::zero());
}

/// Principal square root of a PSD matrix. Eigenvalues in `[-1e-12, 0)` are
/// clipped to zero; anything more negative is rejected.
pub fn sqrt_psd<T: Real>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = eig_hermitian(h)?;
    sqrt_from_eigen(&eig, "sqrt_psd input")
}

pub(crate) fn sqrt_from_eigen<T: Real>(
    eig: &HermitianEigen<T>,
    what: &'static str,
) -> Result<ComplexMatrix<T>> {
    let clip = T::tol(PSD_CLIP);
    if let Some(&bad) = eig.values.iter().find(|&&x| x < -clip) {
        return Err(Error::NotPositive { what, eigenvalue: bad.to_f64().unwrap_or(f64::NAN) });
    }
    Ok(eig.apply_fn(|x| x.max(T::zero()).sqrt()).hermitian_part())
}

/// Self-adjoint polar decomposition `w h = |h|` of a Hermitian `h`.
#[derive(Debug, Clone)]
pub struct SelfAdjointPolar<T> {
    /// Self-adjoint unitary: `sign(h)` on the support, identity on the kernel.
    pub w: ComplexMatrix<T>,
    /// `|h|`.
    pub absval: ComplexMatrix<T>,
}

/// Eigenvalues with `|λ| <= KERNEL_TOL * max(1, max|λ|)` count as kernel.
pub const KERNEL_TOL: f64 = 1e-12;

pub fn polar_selfadjoint<T: Real>(h: &ComplexMatrix<T>) -> Result<SelfAdjointPolar<T>> {
    let eig = eig_hermitian(h)?;
    let cut = T::tol(KERNEL_TOL) * T::one().max(eig.max_abs_value());
    let w = eig
        .apply_fn(|x| if x < -cut { -T::one() } else { T::one() })
        .hermitian_part();
    let absval = eig.apply_fn(T::abs).hermitian_part();
    Ok(SelfAdjointPolar { w, absval })
}

/// Sum of singular values of a square matrix.
///
/// Hermitian and anti-Hermitian inputs use their spectrum directly; other
/// matrices go through the eigenvalues of `m† m`.
pub fn trace_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    m.dim()?;
    if m.hermitian_check().passes() {
        let eig = eig_hermitian(m)?;
        return Ok(eig.values.iter().map(|x| x.abs()).sum());
    }
    let rotated = m.scale(Complex::new(T::zero(), -T::one()));
    if rotated.hermitian_check().passes() {
        let eig = eig_hermitian(&rotated)?;
        return Ok(eig.values.iter().map(|x| x.abs()).sum());
    }
    let gram = (&m.adjoint() * m).hermitian_part();
    let eig = eig_hermitian(&gram)?;
    Ok(eig.values.iter().map(|&x| x.max(T::zero()).sqrt()).sum())
}

/// Pauli matrices and other fixed qubit operators.
pub mod pauli {
    use super::*;

    fn c<T: Real>(re: f64, im: f64) -> Complex<T> {
        Complex::new(T::lit(re), T::lit(im))
    }

    pub fn identity<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::identity(2)
    }

    pub fn x<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_rows(vec![vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]])
            .expect("2x2")
    }

    pub fn y<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::from_rows(vec![vec![c(0., 0.), c(0., -1.)], vec![c(0., 1.), c(0., 0.)]])
            .expect("2x2")
    }

    pub fn z<T: Real>() -> ComplexMatrix<T> {
        ComplexMatrix::diag_real(&[T::one(), -T::one()])
    }

    /// Looks up `I`, `X`, `Y` or `Z`.
    pub fn by_name<T: Real>(name: &str) -> Option<ComplexMatrix<T>> {
        match name {
            "I" => Some(identity()),
            "X" => Some(x()),
            "Y" => Some(y()),
            "Z" => Some(z()),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn close(a: &M, b: &M, tol: f64) -> bool {
        a.distance(b) <= tol
    }

    #[test]
    fn tensor_identities() {
        let i2 = M::identity(2);
        assert_eq!(tensor(&i2, &i2), M::identity(4));
        let zi = tensor(&pauli::z(), &i2);
        assert_eq!(zi, M::diag_real(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn tensor_x_z_blocks() {
        // [[0, Z], [Z, 0]] written out by hand
        let expected = M::from_real_rows(&[
            &[0., 0., 1., 0.],
            &[0., 0., 0., -1.],
            &[1., 0., 0., 0.],
            &[0., -1., 0., 0.],
        ])
        .unwrap();
        assert_eq!(tensor(&pauli::x(), &pauli::z()), expected);
    }

    #[test]
    fn partial_trace_examples() {
        let zi = tensor(&pauli::z(), &M::identity(2)).scale_real(0.5);
        let r = partial_trace(&zi, 2, 2, Factor::Second).unwrap();
        assert!(close(&r, &pauli::z(), 1e-15));

        let mixed = M::identity(4).scale_real(0.25);
        let r = partial_trace(&mixed, 2, 2, Factor::First).unwrap();
        assert!(close(&r, &M::identity(2).scale_real(0.5), 1e-15));

        let s = 0.5f64.sqrt();
        let phi = vec![c(s, 0.), c(0., 0.), c(0., 0.), c(s, 0.)];
        let r = partial_trace(&outer(&phi), 2, 2, Factor::Second).unwrap();
        assert!(close(&r, &M::identity(2).scale_real(0.5), 1e-15));
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = M::identity(4);
        assert!(matches!(
            partial_trace(&m, 2, 3, Factor::First),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_trace_unequal_factors() {
        let a = M::from_real_rows(&[&[1., 2.], &[3., 4.]]).unwrap();
        let b = M::diag_real(&[1.0, 2.0, 3.0]);
        let ab = tensor(&a, &b);
        let r = partial_trace(&ab, 2, 3, Factor::Second).unwrap();
        assert!(close(&r, &a.scale_real(6.0), 1e-12));
        let r = partial_trace(&ab, 2, 3, Factor::First).unwrap();
        assert!(close(&r, &b.scale_real(5.0), 1e-12));
    }

    #[test]
    fn eig_of_z_and_x() {
        let e = eig_hermitian(&pauli::z::<f64>()).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
        // eigenvector for -1 is |1>
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.vectors[(0, 1)].norm() - 1.0).abs() < 1e-15);

        let e = eig_hermitian(&pauli::x::<f64>()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15 && (e.values[1] - 1.0).abs() < 1e-15);
        let s = 0.5f64.sqrt();
        // Hadamard columns up to phase: |-> for -1, |+> for +1
        let minus = e.vector(0);
        let plus = e.vector(1);
        assert!((inner(&[c(s, 0.), c(-s, 0.)], &minus).norm() - 1.0).abs() < 1e-14);
        assert!((inner(&[c(s, 0.), c(s, 0.)], &plus).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_of_zero() {
        let e = eig_hermitian(&M::zeros(3, 3)).unwrap();
        assert_eq!(e.values, vec![0.0; 3]);
        assert!(e.vectors.unitarity_defect() < 1e-15);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = M::from_real_rows(&[&[0., 1.], &[0., 0.]]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::NotHermitian { .. })));
        let r = M::zeros(2, 3);
        assert!(matches!(eig_hermitian(&r), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn eig_complex_entries() {
        let h = M::from_rows(vec![
            vec![c(2., 0.), c(1., 1.), c(0., -0.5)],
            vec![c(1., -1.), c(-1., 0.), c(0.3, 0.2)],
            vec![c(0., 0.5), c(0.3, -0.2), c(0.5, 0.)],
        ])
        .unwrap();
        let e = eig_hermitian(&h).unwrap();
        assert!(e.reconstruct().distance(&h) < 1e-13);
        assert!(e.vectors.unitarity_defect() < 1e-13);
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn sqrt_examples() {
        let half = M::identity(2).scale_real(0.5);
        let r = sqrt_psd(&half).unwrap();
        assert!(close(&r, &M::identity(2).scale_real(0.5f64.sqrt()), 1e-15));
        let r = sqrt_psd(&M::diag_real(&[4.0, 9.0])).unwrap();
        assert!(close(&r, &M::diag_real(&[2.0, 3.0]), 1e-15));
    }

    #[test]
    fn sqrt_clips_and_rejects() {
        let tiny = M::diag_real(&[1.0, -5e-13]);
        let r = sqrt_psd(&tiny).unwrap();
        assert_eq!(r[(1, 1)], c(0., 0.));
        let bad = M::diag_real(&[1.0, -1e-9]);
        assert!(matches!(sqrt_psd(&bad), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn polar_examples() {
        let p = polar_selfadjoint(&M::diag_real(&[2.0, -3.0])).unwrap();
        assert!(close(&p.w, &M::diag_real(&[1.0, -1.0]), 1e-15));
        assert!(close(&p.absval, &M::diag_real(&[2.0, 3.0]), 1e-15));

        let p = polar_selfadjoint(&M::zeros(2, 2)).unwrap();
        assert_eq!(p.w, M::identity(2));
        assert_eq!(p.absval, M::zeros(2, 2));

        let y = pauli::y::<f64>();
        let p = polar_selfadjoint(&y).unwrap();
        assert!(close(&p.w, &y, 1e-14));
        assert!(close(&p.absval, &M::identity(2), 1e-14));
    }

    #[test]
    fn polar_kernel_is_identity() {
        let p = polar_selfadjoint(&M::diag_real(&[0.0, -2.0, 0.0])).unwrap();
        assert_eq!(p.w, M::diag_real(&[1.0, -1.0, 1.0]));
    }

    #[test]
    fn trace_norm_examples() {
        assert!((trace_norm(&pauli::y::<f64>()).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(trace_norm(&M::zeros(3, 3)).unwrap(), 0.0);
        assert!((trace_norm(&M::diag_real(&[2.0, -3.0, 0.0])).unwrap() - 5.0).abs() < 1e-15);
        assert!(matches!(trace_norm(&M::zeros(2, 3)), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn trace_norm_of_non_normal() {
        // nilpotent [[0, 2], [0, 0]] has singular values (2, 0)
        let m = M::from_real_rows(&[&[0., 2.], &[0., 0.]]).unwrap();
        assert!((trace_norm(&m).unwrap() - 2.0).abs() < 1e-12);
        // anti-Hermitian iY
        let iy = pauli::y::<f64>().scale(c(0., 1.));
        assert!((trace_norm(&iy).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn commutator_examples() {
        let zx = commutator(&pauli::z(), &pauli::x()).unwrap();
        assert!(close(&zx, &pauli::y().scale(c(0., 2.)), 1e-15));
        assert_eq!(commutator(&pauli::z::<f64>(), &pauli::z()).unwrap(), M::zeros(2, 2));
        assert_eq!(commutator(&M::identity(2), &pauli::x()).unwrap(), M::zeros(2, 2));
        assert!(commutator(&M::identity(2), &M::identity(3)).is_err());
    }

    #[test]
    fn constructor_validation() {
        assert!(matches!(M::new(0, 2, vec![]), Err(Error::Empty)));
        assert!(matches!(M::new(2, 2, vec![c(0., 0.); 3]), Err(Error::BadShape { .. })));
        let mut data = vec![c(0., 0.); 4];
        data[3] = c(f64::NAN, 0.);
        assert!(matches!(M::new(2, 2, data), Err(Error::NonFinite { row: 1, col: 1 })));
    }

    #[test]
    fn hermitian_check_reports() {
        let mut m = pauli::x::<f64>();
        m[(0, 1)] = c(1.0 + 1e-6, 0.);
        let chk = m.hermitian_check();
        assert!(!chk.passes());
        assert!((chk.max_asymmetry - 1e-6).abs() < 1e-12);
        assert!(pauli::y::<f64>().hermitian_check().passes());
    }

    #[test]
    fn generic_over_f32() {
        let h = ComplexMatrix::<f32>::from_rows(vec![
            vec![Complex::new(1.0, 0.0), Complex::new(0.5, 0.5)],
            vec![Complex::new(0.5, -0.5), Complex::new(-2.0, 0.0)],
        ])
        .unwrap();
        let e = eig_hermitian(&h).unwrap();
        assert!(e.reconstruct().distance(&h) < 1e-5);
        let p = polar_selfadjoint(&h).unwrap();
        assert!((&p.w * &h).distance(&p.absval) < 1e-5);
    }
}
