//! Dense complex `f64` matrices and a Hermitian eigensolver.
//!
//! Sizes here are tiny (a few hundred rows at most), so everything is a
//! plain row-major `Vec`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Off-diagonal threshold for the Jacobi iteration.
pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("Jacobi iteration did not converge (off-diagonal norm {0:e})")]
    NotConverged(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        CMat::from_fn(n, n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        CMat { rows, cols, data }
    }

    /// Column vector.
    pub fn column_vector(v: &[C64]) -> Self {
        CMat { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    /// `|u⟩⟨v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        CMat::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// `|v⟩⟨v|`.
    pub fn projector(v: &[C64]) -> Self {
        CMat::outer(v, v)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_column(&mut self, j: usize, v: &[C64]) {
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn scale_re(&self, s: f64) -> CMat {
        self.scale(C64::new(s, 0.0))
    }

    pub fn kron(&self, other: &CMat) -> CMat {
        let (r2, c2) = (other.rows, other.cols);
        CMat::from_fn(self.rows * r2, self.cols * c2, |i, j| self[(i / r2, j / c2)] * other[(i % r2, j % c2)])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (&self.adjoint() * self).max_abs_diff(&CMat::identity(self.rows)) <= tol
    }

    /// `‖M² − M‖ ≤ tol` and Hermitian.
    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (self * self).max_abs_diff(self) <= tol
    }

    pub fn is_psd(&self, tol: f64) -> bool {
        match eigh(self) {
            Ok(e) => e.values.iter().all(|&v| v >= -tol),
            Err(_) => false,
        }
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum()).collect()
    }

    /// Numerical rank: eigenvalues of a Hermitian matrix above `tol`.
    pub fn hermitian_rank(&self, tol: f64) -> Result<usize, LinalgError> {
        Ok(eigh(self)?.values.iter().filter(|&&v| v.abs() > tol).count())
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl<'a> Mul<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl<'a> Add<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl<'a> Sub<&'a CMat> for &'a CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

pub fn dot(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn kron_vec(u: &[C64], v: &[C64]) -> Vec<C64> {
    u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect()
}

pub fn basis_vector(n: usize, k: usize) -> Vec<C64> {
    let mut v = vec![C64::new(0.0, 0.0); n];
    v[k] = C64::new(1.0, 0.0);
    v
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct Eigh {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: CMat,
    pub sweeps: usize,
}

/// Cyclic complex Jacobi: each pivot is first made real by a diagonal phase,
/// then annihilated by a real plane rotation.
pub fn eigh(m: &CMat) -> Result<Eigh, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare(m.rows, m.cols));
    }
    let n = m.rows;
    let scale = m.frobenius().max(1.0);
    let dev = m.hermitian_deviation();
    if dev > 1e-9 * scale {
        return Err(LinalgError::NotHermitian(dev));
    }
    // Symmetrize to remove rounding asymmetry.
    let mut a = CMat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = CMat::identity(n);
    let off = |a: &CMat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > JACOBI_TOL * scale {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(LinalgError::NotConverged(off(&a)));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag < 1e-300 {
                    continue;
                }
                // Phase so that (D† A D)_pq = |a_pq|.
                let dq = (apq / mag).conj();
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let theta = (aqq - app) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // G = D·R restricted to the (p, q) plane.
                let gpp = C64::new(c, 0.0);
                let gpq = C64::new(s, 0.0);
                let gqp = dq * (-s);
                let gqq = dq * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * gpp + akq * gqp;
                    a[(k, q)] = akp * gpq + akq * gqq;
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * gpp + vkq * gqp;
                    v[(k, q)] = vkp * gpq + vkq * gqq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = gpp.conj() * apk + gqp.conj() * aqk;
                    a[(q, k)] = gpq.conj() * apk + gqq.conj() * aqk;
                }
                a[(p, q)] = C64::new(0.0, 0.0);
                a[(q, p)] = C64::new(0.0, 0.0);
                a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.partial_cmp(&a[(i, i)].re).unwrap());
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMat::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(Eigh { values, vectors, sweeps })
}

/// `f(M) = V f(Λ) V†` for a Hermitian `M`.
pub fn hermitian_fn(m: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat, LinalgError> {
    let e = eigh(m)?;
    let n = m.rows;
    let fv: Vec<f64> = e.values.iter().map(|&x| f(x)).collect();
    Ok(CMat::from_fn(n, n, |i, j| (0..n).map(|k| e.vectors[(i, k)] * fv[k] * e.vectors[(j, k)].conj()).sum()))
}

pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Ginibre matrix with standard complex Gaussian entries.
pub fn random_ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_vec(rows, cols, (0..rows * cols).map(|_| random_complex(rng)).collect())
}

/// Haar-ish random unit vector.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| random_complex(rng)).collect();
    let s = norm(&v);
    v.into_iter().map(|x| x / s).collect()
}

/// Random density matrix `G G† / tr(G G†)`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = random_ginibre(n, n, rng);
    let m = &g * &g.adjoint();
    let t = m.trace().re;
    m.scale_re(1.0 / t)
}

/// Random unitary from Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMat {
    let g = random_ginibre(n, n, rng);
    let mut q = CMat::zeros(n, n);
    for j in 0..n {
        let mut c = g.column(j);
        for k in 0..j {
            let qk = q.column(k);
            let r = dot(&qk, &c);
            for (ci, qi) in c.iter_mut().zip(&qk) {
                *ci -= r * qi;
            }
        }
        let s = norm(&c);
        q.set_column(j, &c.iter().map(|x| x / s).collect::<Vec<_>>());
    }
    q
}

/// Random `k`-outcome POVM on `C^d`: `S^{-1/2} G_i† G_i S^{-1/2}` with `S = Σ G_i† G_i`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, k: usize, rng: &mut R) -> Vec<CMat> {
    let gs: Vec<CMat> = (0..k).map(|_| {
        let g = random_ginibre(d, d, rng);
        &g.adjoint() * &g
    }).collect();
    let s = gs.iter().skip(1).fold(gs[0].clone(), |acc, g| &acc + g);
    let w = hermitian_fn(&s, |x| 1.0 / x.sqrt()).expect("Hermitian");
    gs.iter()
        .map(|g| {
            let e = &(&w * g) * &w;
            (&e + &e.adjoint()).scale_re(0.5)
        })
        .collect()
}
