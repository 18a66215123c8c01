use num_complex::Complex64 as C64;

use super::QuantumError;
use crate::linalg::{eigh, norm, CMat};

#[derive(Clone, Debug)]
pub struct Schmidt {
    /// Descending, strictly positive.
    pub coefficients: Vec<f64>,
    pub left: Vec<Vec<C64>>,
    pub right: Vec<Vec<C64>>,
}

impl Schmidt {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// `Σ λ_l |u_l⟩ ⊗ |v_l⟩`.
    pub fn reconstruct(&self) -> Vec<C64> {
        let (d1, d2) = (self.left.first().map_or(0, Vec::len), self.right.first().map_or(0, Vec::len));
        let mut out = vec![C64::new(0.0, 0.0); d1 * d2];
        for ((l, u), v) in self.coefficients.iter().zip(&self.left).zip(&self.right) {
            for i in 0..d1 {
                for j in 0..d2 {
                    out[i * d2 + j] += u[i] * v[j] * *l;
                }
            }
        }
        out
    }
}

/// Schmidt form of a unit vector on `C^d1 ⊗ C^d2` (first factor most significant).
pub fn schmidt_decompose(psi: &[C64], d1: usize, d2: usize) -> Result<Schmidt, QuantumError> {
    if psi.len() != d1 * d2 {
        return Err(QuantumError::Invalid(format!("vector of length {} is not on {d1}x{d2}", psi.len())));
    }
    let n = norm(psi);
    if (n - 1.0).abs() > 1e-9 {
        return Err(QuantumError::NotUnit(n));
    }
    let m = CMat::from_vec(d1, d2, psi.to_vec());
    let eig = eigh(&(&m * &m.adjoint()))?;
    let mut out = Schmidt { coefficients: Vec::new(), left: Vec::new(), right: Vec::new() };
    for (k, &ev) in eig.values.iter().enumerate() {
        // Eigenvalues of MM† carry absolute noise near 1e-16.
        if ev <= 1e-14 {
            continue;
        }
        let s = ev.sqrt();
        let u = eig.vectors.column(k);
        let v: Vec<C64> = (0..d2).map(|j| (0..d1).map(|i| u[i].conj() * m[(i, j)]).sum::<C64>() / s).collect();
        out.coefficients.push(s);
        out.left.push(u);
        out.right.push(v);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dot, kron_vec, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn bell_state_is_flat() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [C64::new(h, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(h, 0.0)];
        let s = schmidt_decompose(&psi, 2, 2).unwrap();
        assert_eq!(s.rank(), 2);
        for l in &s.coefficients {
            assert!((l - h).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_has_rank_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let psi = kron_vec(&random_state(2, &mut rng), &random_state(3, &mut rng));
        let s = schmidt_decompose(&psi, 2, 3).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.coefficients[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_states_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (d1, d2) in [(4, 4), (2, 3), (3, 2)] {
            let psi = random_state(d1 * d2, &mut rng);
            let s = schmidt_decompose(&psi, d1, d2).unwrap();
            assert!(max_diff(&s.reconstruct(), &psi) < 1e-9);
            assert!(s.coefficients.windows(2).all(|w| w[0] >= w[1]));
            for side in [&s.left, &s.right] {
                for a in 0..side.len() {
                    for b in 0..side.len() {
                        let want = if a == b { 1.0 } else { 0.0 };
                        assert!((dot(&side[a], &side[b]) - want).norm() < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_non_unit() {
        let psi = [C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        assert!(matches!(schmidt_decompose(&psi, 2, 2), Err(QuantumError::NotUnit(_))));
    }
}
