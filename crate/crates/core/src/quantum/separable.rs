//! Measurements whose elements are positive sums of rank-one product projectors.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::matrix::{CScalar, Matrix, MATRIX_EPS};
use super::strategy::Povm;
use super::QuantumError;
use crate::linalg::{eigh, CMat};
use crate::scalar::{Backend, Scalar};

/// `c · R^A ⊗ R^C`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SepTerm {
    pub coeff: Scalar,
    pub ra: Matrix,
    pub rc: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SeparableMeasurement {
    pub a_dim: usize,
    pub c_dim: usize,
    /// `elements[k]` lists the terms of outcome `k`; an empty list is the zero element.
    pub elements: Vec<Vec<SepTerm>>,
}

impl SeparableMeasurement {
    /// Product computational-basis terms `Σ_{(i,j) ∈ support} |i⟩⟨i| ⊗ |j⟩⟨j|`.
    pub fn from_basis_supports(a_dim: usize, c_dim: usize, supports: &[Vec<(usize, usize)>]) -> Self {
        let proj = |d: usize, k: usize| {
            let mut m = Matrix::zeros(d, d, Backend::Exact);
            m.set(k, k, CScalar::one(Backend::Exact));
            m
        };
        let elements = supports
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&(i, j)| SepTerm { coeff: Scalar::one(Backend::Exact), ra: proj(a_dim, i), rc: proj(c_dim, j) })
                    .collect()
            })
            .collect();
        SeparableMeasurement { a_dim, c_dim, elements }
    }

    pub fn element(&self, k: usize) -> Matrix {
        let d = self.a_dim * self.c_dim;
        let terms = &self.elements[k];
        let backend = if terms.iter().all(|t| t.coeff.is_exact() && t.ra.backend() == Backend::Exact && t.rc.backend() == Backend::Exact) {
            Backend::Exact
        } else {
            Backend::Float
        };
        terms.iter().fold(Matrix::zeros(d, d, backend), |acc, t| &acc + &t.ra.kron(&t.rc).scale(&t.coeff))
    }

    pub fn to_povm(&self) -> Povm {
        Povm::new((0..self.elements.len()).map(|k| self.element(k)).collect()).expect("same shapes")
    }

    /// `0 < c ≤ 1`, each `R` a rank-one projector, and the elements form a POVM.
    pub fn validate(&self) -> Result<(), QuantumError> {
        let one = Scalar::one(Backend::Exact);
        for (k, terms) in self.elements.iter().enumerate() {
            for t in terms {
                let c_ok = t.coeff.sign_within(0.0) == std::cmp::Ordering::Greater && t.coeff.to_f64() <= 1.0 + MATRIX_EPS;
                if !c_ok {
                    return Err(QuantumError::Invalid(format!("element {k}: coefficient {} outside (0, 1]", t.coeff)));
                }
                for (r, d) in [(&t.ra, self.a_dim), (&t.rc, self.c_dim)] {
                    let tr = r.trace().re;
                    if r.rows() != d || !r.is_projector() || !tr.approx_eq(&one, MATRIX_EPS) {
                        return Err(QuantumError::Invalid(format!("element {k}: factor is not a rank-one projector on C^{d}")));
                    }
                }
            }
        }
        self.to_povm().check()
    }

    /// Merges outcomes: new outcome `i` is the sum of the old outcomes in `groups[i]`.
    pub fn bin(&self, groups: &[Vec<usize>]) -> SeparableMeasurement {
        let elements = groups.iter().map(|g| g.iter().flat_map(|&k| self.elements[k].clone()).collect()).collect();
        SeparableMeasurement { a_dim: self.a_dim, c_dim: self.c_dim, elements }
    }
}

/// `(λ, R)` with `E = Σ λ R`; exact for diagonal exact input, spectral otherwise.
fn rank_one_terms(e: &Matrix) -> Result<Vec<(Scalar, Matrix)>, QuantumError> {
    let d = e.rows();
    let diagonal = (0..d).all(|i| (0..d).all(|j| i == j || e.get(i, j).is_zero_within(0.0)));
    if e.backend() == Backend::Exact && diagonal {
        let mut out = Vec::new();
        for k in 0..d {
            let v = &e.get(k, k).re;
            if !v.is_zero_within(0.0) {
                let mut r = Matrix::zeros(d, d, Backend::Exact);
                r.set(k, k, CScalar::one(Backend::Exact));
                out.push((v.clone(), r));
            }
        }
        return Ok(out);
    }
    let eig = eigh(&e.to_cmat())?;
    let mut out = Vec::new();
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam > 1e-12 {
            let v = eig.vectors.column(k);
            out.push((Scalar::Float(lam.min(1.0)), Matrix::from_cmat(&CMat::projector(&v))));
        }
    }
    Ok(out)
}

/// Bob measures `P` on his Alice-side register; on outcome `0` he then
/// measures `S` on his Charlie-side register, on outcome `1` he measures `T`.
/// The four outcomes are `P⁰⊗S⁰, P⁰⊗S¹, P¹⊗T⁰, P¹⊗T¹`.
pub fn cascade_to_separable(p: &Povm, s: &Povm, t: &Povm) -> Result<SeparableMeasurement, QuantumError> {
    for (name, m) in [("P", p), ("S", s), ("T", t)] {
        if m.outcomes() != 2 {
            return Err(QuantumError::Invalid(format!("{name} must be binary")));
        }
        m.check()?;
    }
    if s.dim() != t.dim() {
        return Err(QuantumError::Invalid("S and T act on different dimensions".into()));
    }
    let mut elements = Vec::new();
    for (a, second) in [(0, s), (1, t)] {
        let pa = rank_one_terms(&p.elements()[a])?;
        for b in 0..2 {
            let sb = rank_one_terms(&second.elements()[b])?;
            let mut terms = Vec::new();
            for (l, ra) in &pa {
                for (m, rc) in &sb {
                    terms.push(SepTerm { coeff: l * m, ra: ra.clone(), rc: rc.clone() });
                }
            }
            elements.push(terms);
        }
    }
    Ok(SeparableMeasurement { a_dim: p.dim(), c_dim: s.dim(), elements })
}

/// Transpose of the second tensor factor of an operator on `C^da ⊗ C^dc`.
pub fn partial_transpose(m: &CMat, da: usize, dc: usize) -> CMat {
    CMat::from_fn(da * dc, da * dc, |r, c| {
        let (i, k) = (r / dc, r % dc);
        let (j, l) = (c / dc, c % dc);
        m[(i * dc + l, j * dc + k)]
    })
}

/// Smallest eigenvalue of the partial transpose of `m / tr(m)`.
pub fn ppt_min_eigenvalue(m: &Matrix, da: usize, dc: usize) -> Result<f64, QuantumError> {
    let c = m.to_cmat();
    let tr = c.trace().re;
    if tr.abs() < 1e-15 {
        return Err(QuantumError::ZeroProbability);
    }
    let pt = partial_transpose(&c.scale(C64::new(1.0 / tr, 0.0)), da, dc);
    Ok(*eigh(&pt)?.values.last().expect("nonempty"))
}

/// Positive partial transpose within 1e-9; decides separability for 2×2 and 2×3.
pub fn is_ppt(m: &Matrix, da: usize, dc: usize) -> Result<bool, QuantumError> {
    Ok(ppt_min_eigenvalue(m, da, dc)? >= -MATRIX_EPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_state, random_unitary};
    use crate::quantum::constructions::{phi_plus, sigma_x, sigma_z};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_binary_povm(d: usize, rng: &mut ChaCha8Rng) -> Povm {
        // U diag(λ) U† and its complement.
        let u = random_unitary(d, rng);
        let lam: Vec<f64> = (0..d).map(|k| [0.2, 0.9, 0.55, 0.1][k % 4]).collect();
        let e0 = CMat::from_fn(d, d, |i, j| (0..d).map(|k| u[(i, k)] * lam[k] * u[(j, k)].conj()).sum());
        let e1 = &CMat::identity(d) - &e0;
        Povm::new(vec![Matrix::from_cmat(&e0), Matrix::from_cmat(&e1)]).unwrap()
    }

    #[test]
    fn projective_inputs_give_product_projectors() {
        let m = cascade_to_separable(&sigma_z(), &sigma_z(), &sigma_z()).unwrap();
        m.validate().unwrap();
        assert_eq!(m.elements.len(), 4);
        for (k, terms) in m.elements.iter().enumerate() {
            assert_eq!(terms.len(), 1);
            assert!(m.element(k).is_projector());
        }
        let mx = cascade_to_separable(&sigma_z(), &sigma_z(), &sigma_x()).unwrap();
        mx.validate().unwrap();
        assert!(mx.to_povm().is_projective());
    }

    #[test]
    fn binning_keeps_separable_form() {
        let m = cascade_to_separable(&sigma_z(), &sigma_z(), &sigma_x()).unwrap();
        let b = m.bin(&[vec![0], vec![1], vec![2, 3]]);
        b.validate().unwrap();
        assert_eq!(b.elements[2].len(), 2);
        let summed = &m.element(2) + &m.element(3);
        assert!(b.element(2).approx_eq(&summed, 1e-12));
    }

    #[test]
    fn cascade_matches_sequential_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = random_binary_povm(2, &mut rng);
        let s = random_binary_povm(3, &mut rng);
        let t = random_binary_povm(3, &mut rng);
        let sep = cascade_to_separable(&p, &s, &t).unwrap();
        sep.validate().unwrap();
        let sqrt_p: Vec<CMat> = p
            .elements()
            .iter()
            .map(|e| crate::linalg::hermitian_fn(&e.to_cmat(), |x| x.max(0.0).sqrt()).unwrap())
            .collect();
        for _ in 0..20 {
            let psi = random_state(6, &mut rng);
            let rho = CMat::projector(&psi);
            for a in 0..2 {
                // Lüders update on A, then measure the second POVM on C.
                let k = sqrt_p[a].kron(&CMat::identity(3));
                let post = &(&k * &rho) * &k.adjoint();
                let second = if a == 0 { &s } else { &t };
                for b in 0..2 {
                    let f = CMat::identity(2).kron(&second.elements()[b].to_cmat());
                    let seq = (&f * &post).trace().re;
                    let direct = (&sep.element(2 * a + b).to_cmat() * &rho).trace().re;
                    assert!((seq - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn bell_projector_is_not_ppt() {
        assert!(!is_ppt(&phi_plus(), 2, 2).unwrap());
        let v = ppt_min_eigenvalue(&phi_plus(), 2, 2).unwrap();
        assert!((v + 0.5).abs() < 1e-12);
        let sep = SeparableMeasurement::from_basis_supports(2, 2, &[vec![(0, 0), (1, 1)], vec![(0, 1), (1, 0)]]);
        sep.validate().unwrap();
        assert!(is_ppt(&sep.element(0), 2, 2).unwrap());
    }

    #[test]
    fn invalid_terms_rejected() {
        let mut m = SeparableMeasurement::from_basis_supports(2, 2, &[vec![(0, 0), (1, 1)], vec![(0, 1), (1, 0)]]);
        m.elements[0][0].coeff = Scalar::from_ratio(3, 2, Backend::Exact);
        assert!(m.validate().is_err());
        let two = Matrix::identity(2, Backend::Exact);
        let mut m2 = SeparableMeasurement::from_basis_supports(2, 2, &[vec![(0, 0), (1, 1)], vec![(0, 1), (1, 0)]]);
        m2.elements[0][0].ra = two;
        assert!(m2.validate().is_err());
    }
}
