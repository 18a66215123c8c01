//! Complex matrices over [`Scalar`], so that exact constructions stay exact.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::linalg::CMat;
use crate::scalar::{Backend, QSqrt2, Scalar};

/// Tolerance for float-mode matrix predicates.
pub const MATRIX_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("register mismatch: {0}")]
    Register(String),
    #[error("matrix mixes exact and float entries")]
    MixedBackend,
}

/// `re + i·im`.
#[derive(Clone, Debug, PartialEq)]
pub struct CScalar {
    pub re: Scalar,
    pub im: Scalar,
}

impl CScalar {
    pub fn new(re: Scalar, im: Scalar) -> Self {
        CScalar { re, im }
    }

    pub fn real(re: Scalar) -> Self {
        let im = Scalar::zero(re.backend());
        CScalar { re, im }
    }

    pub fn zero(backend: Backend) -> Self {
        CScalar::real(Scalar::zero(backend))
    }

    pub fn one(backend: Backend) -> Self {
        CScalar::real(Scalar::one(backend))
    }

    pub fn from_c64(z: C64) -> Self {
        CScalar { re: Scalar::Float(z.re), im: Scalar::Float(z.im) }
    }

    pub fn exact(re: QSqrt2) -> Self {
        CScalar::real(Scalar::Exact(re))
    }

    pub fn to_c64(&self) -> C64 {
        C64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn backend(&self) -> Backend {
        if self.re.is_exact() && self.im.is_exact() {
            Backend::Exact
        } else {
            Backend::Float
        }
    }

    pub fn conj(&self) -> CScalar {
        CScalar { re: self.re.clone(), im: -&self.im }
    }

    pub fn is_zero_within(&self, eps: f64) -> bool {
        self.re.is_zero_within(eps) && self.im.is_zero_within(eps)
    }

    pub fn approx_eq(&self, other: &CScalar, eps: f64) -> bool {
        self.re.approx_eq(&other.re, eps) && self.im.approx_eq(&other.im, eps)
    }

    pub fn scale(&self, s: &Scalar) -> CScalar {
        CScalar { re: &self.re * s, im: &self.im * s }
    }

    pub fn to_backend(&self, backend: Backend) -> Option<CScalar> {
        Some(CScalar { re: self.re.to_backend(backend)?, im: self.im.to_backend(backend)? })
    }
}

impl<'a> Add<&'a CScalar> for &'a CScalar {
    type Output = CScalar;
    fn add(self, rhs: &CScalar) -> CScalar {
        CScalar { re: &self.re + &rhs.re, im: &self.im + &rhs.im }
    }
}

impl<'a> Sub<&'a CScalar> for &'a CScalar {
    type Output = CScalar;
    fn sub(self, rhs: &CScalar) -> CScalar {
        CScalar { re: &self.re - &rhs.re, im: &self.im - &rhs.im }
    }
}

impl<'a> Mul<&'a CScalar> for &'a CScalar {
    type Output = CScalar;
    fn mul(self, rhs: &CScalar) -> CScalar {
        // Skip the imaginary products when both sides are real; keeps exact
        // arithmetic cheap for the real constructions.
        if self.im.is_zero_within(0.0) && rhs.im.is_zero_within(0.0) {
            let re = &self.re * &rhs.re;
            let im = Scalar::zero(re.backend());
            return CScalar { re, im };
        }
        CScalar { re: &(&self.re * &rhs.re) - &(&self.im * &rhs.im), im: &(&self.re * &rhs.im) + &(&self.im * &rhs.re) }
    }
}

impl Neg for &CScalar {
    type Output = CScalar;
    fn neg(self) -> CScalar {
        CScalar { re: -&self.re, im: -&self.im }
    }
}

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    backend: Backend,
    data: Vec<CScalar>,
}

/// Indices with the first register most significant.
pub(crate) fn digits_msb(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

pub(crate) fn index_msb(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &r)| acc * r + d)
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize, backend: Backend) -> Self {
        Matrix { rows, cols, backend, data: vec![CScalar::zero(backend); rows * cols] }
    }

    pub fn identity(n: usize, backend: Backend) -> Self {
        let mut m = Matrix::zeros(n, n, backend);
        for i in 0..n {
            m.data[i * n + i] = CScalar::one(backend);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> CScalar) -> Result<Self, MatrixError> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix::from_data(rows, cols, data)
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<CScalar>) -> Result<Self, MatrixError> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(MatrixError::Dimension(format!("{} entries for {rows}x{cols}", data.len())));
        }
        let backend = data[0].backend();
        if data.iter().any(|z| z.backend() != backend) {
            return Err(MatrixError::MixedBackend);
        }
        Ok(Matrix { rows, cols, backend, data })
    }

    /// Real matrix from row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: Vec<Scalar>) -> Result<Self, MatrixError> {
        Matrix::from_data(rows, cols, entries.into_iter().map(CScalar::real).collect())
    }

    /// Real exact matrix from `QSqrt2` entries.
    pub fn from_exact(rows: usize, cols: usize, entries: Vec<QSqrt2>) -> Self {
        Matrix::from_real(rows, cols, entries.into_iter().map(Scalar::Exact).collect()).expect("exact entries")
    }

    pub fn from_cmat(m: &CMat) -> Self {
        Matrix {
            rows: m.rows(),
            cols: m.cols(),
            backend: Backend::Float,
            data: m.data().iter().map(|&z| CScalar::from_c64(z)).collect(),
        }
    }

    pub fn to_cmat(&self) -> CMat {
        CMat::from_vec(self.rows, self.cols, self.data.iter().map(CScalar::to_c64).collect())
    }

    /// `|v⟩⟨v|` for a column vector `v`.
    pub fn ket_projector(v: &[CScalar]) -> Result<Self, MatrixError> {
        let n = v.len();
        Matrix::from_fn(n, n, |i, j| &v[i] * &v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn data(&self) -> &[CScalar] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> &CScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CScalar) {
        if v.backend() != self.backend {
            self.backend = Backend::Float;
        }
        self.data[i * self.cols + j] = v;
        if self.backend == Backend::Float {
            self.force_float();
        }
    }

    fn force_float(&mut self) {
        for z in &mut self.data {
            if z.backend() == Backend::Exact {
                *z = z.to_backend(Backend::Float).expect("exact to float");
            }
        }
    }

    pub fn to_backend(&self, backend: Backend) -> Option<Matrix> {
        let data = self.data.iter().map(|z| z.to_backend(backend)).collect::<Option<Vec<_>>>()?;
        Some(Matrix { rows: self.rows, cols: self.cols, backend, data })
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    fn eps(&self) -> f64 {
        match self.backend {
            Backend::Exact => 0.0,
            Backend::Float => MATRIX_EPS,
        }
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj()).expect("nonempty")
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone()).expect("nonempty")
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        let data: Vec<CScalar> = self.data.iter().map(|z| z.scale(s)).collect();
        Matrix::from_data(self.rows, self.cols, data).expect("same shape")
    }

    pub fn trace(&self) -> CScalar {
        let mut acc = CScalar::zero(self.backend);
        for i in 0..self.rows.min(self.cols) {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    pub fn kron(&self, other: &Matrix) -> Matrix {
        let (r2, c2) = (other.rows, other.cols);
        Matrix::from_fn(self.rows * r2, self.cols * c2, |i, j| self.get(i / r2, j / c2) * other.get(i % r2, j % c2))
            .expect("nonempty")
    }

    pub fn try_mul(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        if self.cols != rhs.rows {
            return Err(MatrixError::Dimension(format!("{}x{} times {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        let backend = if self.backend == Backend::Exact && rhs.backend == Backend::Exact {
            Backend::Exact
        } else {
            Backend::Float
        };
        let mut out = vec![CScalar::zero(backend); self.rows * rhs.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero_within(0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = rhs.get(k, j);
                    if b.is_zero_within(0.0) {
                        continue;
                    }
                    let cell = &mut out[i * rhs.cols + j];
                    *cell = &*cell + &(a * b);
                }
            }
        }
        Matrix::from_data(self.rows, rhs.cols, out)
    }

    fn zip(&self, rhs: &Matrix, f: impl Fn(&CScalar, &CScalar) -> CScalar) -> Result<Matrix, MatrixError> {
        if (self.rows, self.cols) != (rhs.rows, rhs.cols) {
            return Err(MatrixError::Dimension(format!("{}x{} vs {}x{}", self.rows, self.cols, rhs.rows, rhs.cols)));
        }
        let data: Vec<CScalar> = self.data.iter().zip(&rhs.data).map(|(a, b)| f(a, b)).collect();
        let mut m = Matrix { rows: self.rows, cols: self.cols, backend: Backend::Exact, data };
        if m.data.iter().any(|z| z.backend() == Backend::Float) {
            m.backend = Backend::Float;
            m.force_float();
        }
        Ok(m)
    }

    pub fn try_add(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        self.zip(rhs, |a, b| a + b)
    }

    pub fn try_sub(&self, rhs: &Matrix) -> Result<Matrix, MatrixError> {
        self.zip(rhs, |a, b| a - b)
    }

    /// Exact equality when both are exact, otherwise entrywise within `eps`.
    pub fn approx_eq(&self, other: &Matrix, eps: f64) -> bool {
        (self.rows, self.cols) == (other.rows, other.cols)
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b, eps))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.to_cmat().max_abs_diff(&other.to_cmat())
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.approx_eq(&self.adjoint(), self.eps())
    }

    pub fn is_projector(&self) -> bool {
        self.is_hermitian() && self.approx_eq(&(self * self), self.eps())
    }

    pub fn is_unitary(&self) -> bool {
        self.is_square() && (&self.adjoint() * self).approx_eq(&Matrix::identity(self.rows, self.backend), self.eps())
    }

    /// Positive semidefiniteness; exact `LDL*` elimination in exact mode,
    /// eigenvalues ≥ −1e-9 in float mode.
    pub fn is_psd(&self) -> bool {
        if !self.is_hermitian() {
            return false;
        }
        match self.backend {
            Backend::Float => self.to_cmat().is_psd(MATRIX_EPS),
            Backend::Exact => exact_psd(self),
        }
    }

    /// Reorders tensor factors: the result acts on `dims[perm[0]] ⊗ dims[perm[1]] ⊗ …`.
    pub fn permute_registers(&self, dims: &[usize], perm: &[usize]) -> Result<Matrix, MatrixError> {
        let total: usize = dims.iter().product();
        if !self.is_square() || self.rows != total {
            return Err(MatrixError::Register(format!("matrix is {}x{}, registers total {total}", self.rows, self.cols)));
        }
        let mut seen = vec![false; dims.len()];
        if perm.len() != dims.len() || perm.iter().any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(MatrixError::Register(format!("{perm:?} is not a permutation of {} registers", dims.len())));
        }
        let map = permutation_map(dims, perm);
        Matrix::from_fn(total, total, |i, j| self.get(map[i], map[j]).clone())
    }

    /// Traces out the registers listed in `traced`; the rest keep their order.
    pub fn partial_trace(&self, dims: &[usize], traced: &[usize]) -> Result<Matrix, MatrixError> {
        let total: usize = dims.iter().product();
        if !self.is_square() || self.rows != total {
            return Err(MatrixError::Register(format!("matrix is {}x{}, registers total {total}", self.rows, self.cols)));
        }
        if let Some(&t) = traced.iter().find(|&&t| t >= dims.len()) {
            return Err(MatrixError::Register(format!("register {t} out of range")));
        }
        let keep: Vec<usize> = (0..dims.len()).filter(|k| !traced.contains(k)).collect();
        let kdims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
        let kd: usize = kdims.iter().product();
        let mut out = vec![CScalar::zero(self.backend); kd * kd];
        let digits: Vec<Vec<usize>> = (0..total).map(|i| digits_msb(i, dims)).collect();
        let kidx: Vec<usize> =
            digits.iter().map(|d| index_msb(&keep.iter().map(|&k| d[k]).collect::<Vec<_>>(), &kdims)).collect();
        for i in 0..total {
            for j in 0..total {
                if traced.iter().any(|&t| digits[i][t] != digits[j][t]) {
                    continue;
                }
                let v = self.get(i, j);
                if v.is_zero_within(0.0) {
                    continue;
                }
                let cell = &mut out[kidx[i] * kd + kidx[j]];
                *cell = &*cell + v;
            }
        }
        Matrix::from_data(kd, kd, out)
    }
}

/// `map[new_index] = old_index` for a register permutation.
pub(crate) fn permutation_map(dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let total: usize = dims.iter().product();
    (0..total)
        .map(|n| {
            let nd = digits_msb(n, &new_dims);
            let mut od = vec![0; dims.len()];
            for (k, &p) in perm.iter().enumerate() {
                od[p] = nd[k];
            }
            index_msb(&od, dims)
        })
        .collect()
}

fn exact_psd(m: &Matrix) -> bool {
    let n = m.rows;
    let mut a: Vec<CScalar> = m.data.clone();
    for k in 0..n {
        let d = a[k * n + k].re.clone();
        match d.sign_within(0.0) {
            std::cmp::Ordering::Less => return false,
            std::cmp::Ordering::Equal => {
                if (k + 1..n).any(|j| !a[k * n + j].is_zero_within(0.0)) {
                    return false;
                }
            }
            std::cmp::Ordering::Greater => {
                for i in k + 1..n {
                    let lik = a[i * n + k].clone();
                    if lik.is_zero_within(0.0) {
                        continue;
                    }
                    for j in k + 1..n {
                        let t = (&lik * &a[k * n + j]).scale(&(Scalar::one(Backend::Exact) / &d));
                        a[i * n + j] = &a[i * n + j] - &t;
                    }
                }
            }
        }
    }
    true
}

/// Kronecker product of a list, left to right.
pub fn tensor(factors: &[Matrix]) -> Result<Matrix, MatrixError> {
    let (first, rest) = factors.split_first().ok_or_else(|| MatrixError::Dimension("empty tensor product".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, m| acc.kron(m)))
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.try_mul(rhs).expect("dimension mismatch in product")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        self.try_add(rhs).expect("dimension mismatch in sum")
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        self.try_sub(rhs).expect("dimension mismatch in difference")
    }
}

/// JSON form: row-major real and imaginary parts.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Scalar>,
    #[serde(default)]
    pub im: Option<Vec<Scalar>>,
}

impl From<&Matrix> for MatrixJson {
    fn from(m: &Matrix) -> Self {
        let re = m.data.iter().map(|z| z.re.clone()).collect();
        let all_real = m.data.iter().all(|z| z.im.is_zero_within(0.0));
        let im = if all_real { None } else { Some(m.data.iter().map(|z| z.im.clone()).collect()) };
        MatrixJson { rows: m.rows, cols: m.cols, re, im }
    }
}

impl TryFrom<MatrixJson> for Matrix {
    type Error = MatrixError;
    fn try_from(j: MatrixJson) -> Result<Matrix, MatrixError> {
        let n = j.rows * j.cols;
        if j.re.len() != n {
            return Err(MatrixError::Dimension(format!("re has {} entries, expected {n}", j.re.len())));
        }
        let data: Vec<CScalar> = match j.im {
            None => j.re.into_iter().map(CScalar::real).collect(),
            Some(im) => {
                if im.len() != n {
                    return Err(MatrixError::Dimension(format!("im has {} entries, expected {n}", im.len())));
                }
                j.re.into_iter().zip(im).map(|(r, i)| CScalar::new(r, i)).collect()
            }
        };
        Matrix::from_data(j.rows, j.cols, data)
    }
}

impl Serialize for Matrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        MatrixJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Matrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = MatrixJson::deserialize(d)?;
        Matrix::try_from(j).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::constructions::phi_plus;

    fn ex(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d, Backend::Exact)
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = phi_plus();
        let r = rho.partial_trace(&[2, 2], &[1]).unwrap();
        assert_eq!(r, Matrix::identity(2, Backend::Exact).scale(&ex(1, 2)));
        let l = rho.partial_trace(&[2, 2], &[0]).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn partial_trace_of_product() {
        let rho = Matrix::from_real(2, 2, vec![ex(1, 3), ex(1, 5), ex(1, 5), ex(2, 3)]).unwrap();
        let sigma = Matrix::from_real(3, 3, vec![ex(1, 1), ex(0, 1), ex(0, 1), ex(0, 1), ex(2, 1), ex(0, 1), ex(0, 1), ex(0, 1), ex(4, 1)]).unwrap();
        let p = rho.kron(&sigma);
        assert_eq!(p.partial_trace(&[2, 3], &[1]).unwrap(), rho.scale(&ex(7, 1)));
        assert_eq!(p.partial_trace(&[2, 3], &[0]).unwrap(), sigma);
    }

    #[test]
    fn permutation_swaps_kron_factors() {
        let a = Matrix::from_real(2, 2, vec![ex(1, 1), ex(2, 1), ex(3, 1), ex(4, 1)]).unwrap();
        let b = Matrix::from_real(3, 3, (0..9).map(|k| ex(k, 7)).collect()).unwrap();
        let ab = a.kron(&b);
        assert_eq!(ab.permute_registers(&[2, 3], &[1, 0]).unwrap(), b.kron(&a));
        assert!(ab.permute_registers(&[2, 3], &[0, 0]).is_err());
    }

    #[test]
    fn exact_predicates() {
        let rho = phi_plus();
        assert!(rho.is_hermitian() && rho.is_psd() && rho.scale(&ex(2, 1)).is_hermitian());
        assert!(rho.is_projector());
        let neg = Matrix::from_real(2, 2, vec![ex(1, 1), ex(2, 1), ex(2, 1), ex(1, 1)]).unwrap();
        assert!(!neg.is_psd());
        let singular = Matrix::from_real(2, 2, vec![ex(0, 1), ex(1, 1), ex(1, 1), ex(0, 1)]).unwrap();
        assert!(!singular.is_psd());
        let x = Matrix::from_real(2, 2, vec![ex(0, 1), ex(1, 1), ex(1, 1), ex(0, 1)]).unwrap();
        assert!(x.is_unitary());
    }

    #[test]
    fn json_round_trip() {
        let m = Matrix::from_data(1, 2, vec![CScalar::new(ex(1, 2), ex(0, 1)), CScalar::new(ex(0, 1), ex(-1, 3))]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"rows":1,"cols":2,"re":["1/2","0"],"im":["0","-1/3"]}"#);
        let back: Matrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<Matrix>(r#"{"rows":2,"cols":2,"re":["1"]}"#).is_err());
    }
}
