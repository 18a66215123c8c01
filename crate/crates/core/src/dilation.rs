//! Projective dilations of POVMs through an isometry `ξ ↦ ξ ⊗ |0⟩` onto an
//! enlarged tensor factor. Float arithmetic throughout, tolerance 1e-9.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::linalg::{dot, eigh, norm, CMat, LinalgError};
use crate::quantum::{Matrix, Povm, QuantumError, QuantumStrategy, Register, RegisterLayout, Source};

pub const DILATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DilationError {
    #[error("invalid POVM: {0}")]
    InvalidPovm(String),
    #[error("columns are not orthonormal (deviation {0:e})")]
    NotIsometric(f64),
    #[error("{what} check failed: deviation {error:e}")]
    Verification { what: &'static str, error: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Quantum(#[from] QuantumError),
}

pub type Result<T> = std::result::Result<T, DilationError>;

/// `R_k = Σ_l |x_{k,l}⟩⟨x_{k,l}|`.
#[derive(Clone, Debug)]
pub struct Rank1Decomposition {
    pub dim: usize,
    /// `vectors[k][l]`; every outcome has the same count `L`.
    pub vectors: Vec<Vec<Vec<C64>>>,
}

impl Rank1Decomposition {
    pub fn outcomes(&self) -> usize {
        self.vectors.len()
    }

    pub fn per_outcome(&self) -> usize {
        self.vectors.first().map_or(0, Vec::len)
    }

    pub fn element(&self, k: usize) -> CMat {
        self.vectors[k].iter().fold(CMat::zeros(self.dim, self.dim), |acc, x| &acc + &CMat::outer(x, x))
    }

    /// `‖Σ_{k,l} |x⟩⟨x| − I‖_max`.
    pub fn completeness_error(&self) -> f64 {
        let s = (0..self.outcomes()).fold(CMat::zeros(self.dim, self.dim), |acc, k| &acc + &self.element(k));
        s.max_abs_diff(&CMat::identity(self.dim))
    }
}

fn check_povm(elements: &[CMat]) -> Result<usize> {
    let d = elements.first().ok_or_else(|| DilationError::InvalidPovm("no elements".into()))?.rows();
    let mut sum = CMat::zeros(d, d);
    for (k, e) in elements.iter().enumerate() {
        if e.rows() != d || e.cols() != d {
            return Err(DilationError::InvalidPovm(format!("element {k} has the wrong shape")));
        }
        if !e.is_psd(DILATION_TOL) {
            return Err(DilationError::InvalidPovm(format!("element {k} is not PSD")));
        }
        sum = &sum + e;
    }
    let dev = sum.max_abs_diff(&CMat::identity(d));
    if dev > DILATION_TOL {
        return Err(DilationError::InvalidPovm(format!("elements sum to identity only within {dev:e}")));
    }
    Ok(d)
}

fn is_projective(elements: &[CMat]) -> bool {
    elements.iter().all(|e| e.is_projector(DILATION_TOL))
}

/// Scaled eigenvectors of each element, `L` = largest rank unless given. An
/// element of rank `r < L` spreads its smallest eigenvector over `L − r + 1`
/// equal copies; zero elements get zero vectors.
pub fn rank1_decompose(elements: &[CMat], min_l: Option<usize>) -> Result<Rank1Decomposition> {
    let d = check_povm(elements)?;
    let mut parts = Vec::with_capacity(elements.len());
    for e in elements {
        let eig = eigh(e)?;
        let v: Vec<Vec<C64>> = eig
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| l > 1e-12)
            .map(|(k, &l)| eig.vectors.column(k).into_iter().map(|z| z * l.sqrt()).collect())
            .collect();
        parts.push(v);
    }
    let l = parts.iter().map(Vec::len).max().unwrap_or(0).max(min_l.unwrap_or(0)).max(1);
    let vectors = parts
        .into_iter()
        .map(|mut v| {
            if v.is_empty() {
                return vec![vec![C64::new(0.0, 0.0); d]; l];
            }
            let extra = l - v.len();
            if extra > 0 {
                let last = v.pop().expect("nonempty");
                let s = 1.0 / ((extra + 1) as f64).sqrt();
                v.extend(std::iter::repeat_n(last.iter().map(|z| z * s).collect::<Vec<_>>(), extra + 1));
            }
            v
        })
        .collect();
    let dec = Rank1Decomposition { dim: d, vectors };
    let err = dec.completeness_error();
    if err > DILATION_TOL {
        return Err(DilationError::Verification { what: "rank-one completeness", error: err });
    }
    Ok(dec)
}

/// Completes a `K×d` matrix with orthonormal columns to a `K×K` unitary,
/// keeping the given columns first.
pub fn extend_isometric_columns(m: &CMat) -> Result<CMat> {
    let (k, d) = (m.rows(), m.cols());
    let dev = (&m.adjoint() * m).max_abs_diff(&CMat::identity(d));
    if d > k || dev > DILATION_TOL {
        return Err(DilationError::NotIsometric(dev));
    }
    let mut basis: Vec<Vec<C64>> = (0..d).map(|j| m.column(j)).collect();
    while basis.len() < k {
        // Pivot on the standard basis vector with the largest residual.
        let residual = |i: usize| {
            let mut r = crate::linalg::basis_vector(k, i);
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &r);
                    for (ri, bi) in r.iter_mut().zip(b) {
                        *ri -= c * bi;
                    }
                }
            }
            r
        };
        let (best, _) = (0..k)
            .map(|i| (i, norm(&residual(i))))
            .fold((0, -1.0), |acc, (i, n)| if n > acc.1 { (i, n) } else { acc });
        let r = residual(best);
        let n = norm(&r);
        basis.push(r.into_iter().map(|z| z / n).collect());
    }
    let mut u = CMat::zeros(k, k);
    for (j, b) in basis.iter().enumerate() {
        u.set_column(j, b);
    }
    Ok(u)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct DilationReport {
    pub projector_error: f64,
    pub orthogonality_error: f64,
    pub completeness_error: f64,
    /// `‖V*V − I‖`.
    pub isometry_error: f64,
    /// `‖VV* − I ⊗ |0⟩⟨0|‖`.
    pub range_error: f64,
    /// `max_k ‖R_k − V*P_kV‖`.
    pub reconstruction_error: f64,
    /// `‖V*P^⊥V‖`, zero when there is no complement.
    pub complement_error: f64,
    /// `max ‖V*y − x‖`; zero for a trivial dilation.
    pub vector_error: f64,
    pub passed: bool,
}

impl DilationReport {
    fn max(&self) -> f64 {
        [
            self.projector_error,
            self.orthogonality_error,
            self.completeness_error,
            self.isometry_error,
            self.range_error,
            self.reconstruction_error,
            self.complement_error,
            self.vector_error,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct DilationResult {
    /// Projectors on `H ⊗ G`, `H` the more significant factor.
    pub pvm: Vec<CMat>,
    /// `(d·r) × d`, `V ξ = ξ ⊗ |0⟩`.
    pub isometry: CMat,
    pub ancilla_dim: usize,
    pub report: DilationReport,
}

/// `V ξ = ξ ⊗ |0⟩` from `C^d` into `C^d ⊗ C^r`.
pub fn ancilla_isometry(d: usize, r: usize) -> CMat {
    CMat::from_fn(d * r, d, |i, j| if i == j * r { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}

fn verify(elements: &[CMat], pvm: &[CMat], v: &CMat, extra: (f64, f64)) -> DilationReport {
    let (d, n) = (v.cols(), v.rows());
    let r = n / d;
    let mut rep = DilationReport { complement_error: extra.0, vector_error: extra.1, ..Default::default() };
    let mut sum = CMat::zeros(n, n);
    for (k, p) in pvm.iter().enumerate() {
        rep.projector_error = rep.projector_error.max((p * p).max_abs_diff(p)).max(p.hermitian_deviation());
        for q in &pvm[k + 1..] {
            rep.orthogonality_error = rep.orthogonality_error.max((p * q).max_abs_diff(&CMat::zeros(n, n)));
        }
        sum = &sum + p;
        let back = &(&v.adjoint() * p) * v;
        rep.reconstruction_error = rep.reconstruction_error.max(back.max_abs_diff(&elements[k]));
    }
    rep.completeness_error = sum.max_abs_diff(&CMat::identity(n));
    rep.isometry_error = (&v.adjoint() * v).max_abs_diff(&CMat::identity(d));
    let mut zero = CMat::zeros(r, r);
    zero[(0, 0)] = C64::new(1.0, 0.0);
    rep.range_error = (v * &v.adjoint()).max_abs_diff(&CMat::identity(d).kron(&zero));
    rep.passed = rep.max() <= DILATION_TOL;
    rep
}

/// A `K`-outcome PVM on `H ⊗ C^{KL−d+1}` with `R_k = V*P_kV`. Projective input
/// gives the trivial dilation with a one-dimensional ancilla.
pub fn dilate_povm(elements: &[CMat], min_l: Option<usize>) -> Result<DilationResult> {
    let d = check_povm(elements)?;
    if is_projective(elements) && min_l.is_none() {
        let v = CMat::identity(d);
        let report = verify(elements, elements, &v, (0.0, 0.0));
        return Ok(DilationResult { pvm: elements.to_vec(), isometry: v, ancilla_dim: 1, report });
    }
    let dec = rank1_decompose(elements, min_l)?;
    let (kk, l) = (dec.outcomes(), dec.per_outcome());
    let n = kk * l;
    let r = n - d + 1;
    // Rows of X are orthonormal, so X† extends to a unitary [X† | W].
    let xs: Vec<&Vec<C64>> = dec.vectors.iter().flatten().collect();
    let xd = CMat::from_fn(n, d, |j, h| xs[j][h].conj());
    let u = extend_isometric_columns(&xd)?;
    let ys: Vec<Vec<C64>> = (0..n)
        .map(|j| {
            let mut y = vec![C64::new(0.0, 0.0); d * r];
            for h in 0..d {
                y[h * r] = xs[j][h];
            }
            // η = |0⟩ in H, φ_j = conj of row j of W on |1⟩…|r−1⟩ in G.
            for g in 1..r {
                y[g] += u[(j, d + g - 1)].conj();
            }
            y
        })
        .collect();
    let mut pvm: Vec<CMat> = (0..kk)
        .map(|k| (0..l).fold(CMat::zeros(d * r, d * r), |acc, i| &acc + &CMat::projector(&ys[k * l + i])))
        .collect();
    let covered = pvm.iter().fold(CMat::zeros(d * r, d * r), |acc, p| &acc + p);
    let perp = &CMat::identity(d * r) - &covered;
    pvm[kk - 1] = &pvm[kk - 1] + &perp;
    let v = ancilla_isometry(d, r);
    let complement = (&(&v.adjoint() * &perp) * &v).max_abs_diff(&CMat::zeros(d, d));
    let vector = ys.iter().zip(&xs).map(|(y, x)| {
        let back = v.adjoint().mul_vec(y);
        back.iter().zip(x.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    });
    let vector = vector.fold(0.0, f64::max);
    let mut report = verify(elements, &pvm, &v, (complement, vector));
    report.projector_error = report.projector_error.max((&perp * &perp).max_abs_diff(&perp));
    report.passed = report.max() <= DILATION_TOL;
    if !report.passed {
        return Err(DilationError::Verification { what: "dilation", error: report.max() });
    }
    Ok(DilationResult { pvm, isometry: v, ancilla_dim: r, report })
}

/// Projective measurements for several settings on one enlarged space.
#[derive(Clone, Debug)]
pub struct MultiDilation {
    /// `pvms[x]` acts on `H ⊗ K_0 ⊗ … ⊗ K_{n−1}`.
    pub pvms: Vec<Vec<CMat>>,
    /// `V_A ξ = ξ ⊗ |0⟩ ⊗ … ⊗ |0⟩`.
    pub isometry: CMat,
    pub ancilla_dims: Vec<usize>,
    /// `max_{x,a} ‖E_{x,a} − V_A* E″_{x,a} V_A‖`.
    pub reconstruction_error: f64,
    pub projector_error: f64,
}

impl MultiDilation {
    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dims.iter().product()
    }
}

/// Dilates the settings one after another. Setting `x` is first lifted to
/// the current space as `W E W* + δ_{a,0}(I − WW*)`, then dilated; earlier
/// PVMs are tensored with the identity on the new factor.
pub fn dilate_settings(povms: &[Vec<CMat>]) -> Result<MultiDilation> {
    let k = povms.iter().map(Vec::len).max().ok_or_else(|| DilationError::InvalidPovm("no settings".into()))?;
    let d = check_povm(&povms[0])?;
    let padded: Vec<Vec<CMat>> = povms
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p.resize(k, CMat::zeros(d, d));
            p
        })
        .collect();
    let mut w = CMat::identity(d);
    let mut pvms: Vec<Vec<CMat>> = Vec::new();
    let mut dims = Vec::new();
    for e in &padded {
        if check_povm(e)? != d {
            return Err(DilationError::InvalidPovm("settings act on different dimensions".into()));
        }
        let cur = w.rows();
        let rest = &CMat::identity(cur) - &(&w * &w.adjoint());
        let lifted: Vec<CMat> = e
            .iter()
            .enumerate()
            .map(|(a, ea)| {
                let m = &(&w * ea) * &w.adjoint();
                if a == 0 {
                    &m + &rest
                } else {
                    m
                }
            })
            .collect();
        let res = dilate_povm(&lifted, None)?;
        let r = res.ancilla_dim;
        let id = CMat::identity(r);
        for p in &mut pvms {
            for e in p.iter_mut() {
                *e = e.kron(&id);
            }
        }
        pvms.push(res.pvm);
        w = &res.isometry * &w;
        dims.push(r);
    }
    let mut recon: f64 = 0.0;
    let mut proj: f64 = 0.0;
    for (e, p) in padded.iter().zip(&pvms) {
        for (ea, pa) in e.iter().zip(p) {
            recon = recon.max((&(&w.adjoint() * pa) * &w).max_abs_diff(ea));
            proj = proj.max((pa * pa).max_abs_diff(pa));
        }
    }
    if recon.max(proj) > DILATION_TOL {
        return Err(DilationError::Verification { what: "multi-setting dilation", error: recon.max(proj) });
    }
    Ok(MultiDilation { pvms, isometry: w, ancilla_dims: dims, reconstruction_error: recon, projector_error: proj })
}

/// Two-setting form: `(pvm₀, pvm₁, V_A)`.
pub fn dilate_two_settings(p0: &[CMat], p1: &[CMat]) -> Result<(Vec<CMat>, Vec<CMat>, CMat)> {
    let mut m = dilate_settings(&[p0.to_vec(), p1.to_vec()])?;
    let second = m.pvms.pop().expect("two settings");
    let first = m.pvms.pop().expect("two settings");
    Ok((first, second, m.isometry))
}

/// Replaces one party's POVMs by their dilation. The ancilla becomes a new
/// register after the party's last register, prepared in `|0⟩` as part of the
/// source holding the party's first register.
pub fn dilate_party_in_strategy(strategy: &QuantumStrategy, party: usize) -> Result<(QuantumStrategy, MultiDilation)> {
    strategy.validate()?;
    let regs = strategy.layout.party_registers(party);
    let (&first, &last) = match (regs.first(), regs.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Err(DilationError::InvalidPovm(format!("party {party} owns no registers"))),
    };
    let povms: Vec<Vec<CMat>> = strategy.povms[party].iter().map(|p| p.elements().iter().map(Matrix::to_cmat).collect()).collect();
    let md = dilate_settings(&povms)?;
    let r = md.ancilla_dim();
    let at = last + 1;
    let mut registers: Vec<Register> = strategy.layout.registers().to_vec();
    let name = format!("{}_anc", registers[first].name);
    registers.insert(at, Register { name, dim: r, owner: party });
    let layout = RegisterLayout::new(strategy.layout.parties(), registers)?;
    let shift = |i: usize| if i >= at { i + 1 } else { i };
    let mut ket0 = CMat::zeros(r, r);
    ket0[(0, 0)] = C64::new(1.0, 0.0);
    let sources = strategy
        .sources
        .iter()
        .map(|s| {
            let mut registers: Vec<usize> = s.registers.iter().map(|&i| shift(i)).collect();
            let mut state = s.state.to_backend(crate::Backend::Float).expect("to float");
            if s.registers.contains(&first) {
                registers.push(at);
                state = Matrix::from_cmat(&state.to_cmat().kron(&ket0));
            }
            Source { registers, state }
        })
        .collect();
    let mut povm_lists: Vec<Vec<Povm>> = strategy
        .povms
        .iter()
        .map(|ps| ps.iter().map(|p| p.to_backend(crate::Backend::Float).expect("to float")).collect())
        .collect();
    povm_lists[party] = md
        .pvms
        .iter()
        .map(|p| Povm::new(p.iter().map(Matrix::from_cmat).collect()).map_err(DilationError::from))
        .collect::<Result<Vec<_>>>()?;
    let out = QuantumStrategy { layout, sources, povms: povm_lists };
    out.validate()?;
    Ok((out, md))
}

/// `{(2/3)|φ_i⟩⟨φ_i|}` with real unit vectors `φ_i` at angles 0°, 120°, 240°.
pub fn trine_povm() -> Vec<CMat> {
    (0..3)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / 3.0;
            let v = [C64::new(t.cos(), 0.0), C64::new(t.sin(), 0.0)];
            CMat::projector(&v).scale_re(2.0 / 3.0)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_povm, random_state};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn prob(m: &CMat, psi: &[C64]) -> f64 {
        dot(psi, &m.mul_vec(psi)).re
    }

    fn computational(d: usize) -> Vec<CMat> {
        (0..d).map(|k| CMat::projector(&crate::linalg::basis_vector(d, k))).collect()
    }

    #[test]
    fn qubit_pvm_decomposes_into_basis() {
        let dec = rank1_decompose(&computational(2), None).unwrap();
        assert_eq!(dec.per_outcome(), 1);
        for k in 0..2 {
            let v = &dec.vectors[k][0];
            assert!((v[k].norm() - 1.0).abs() < 1e-12 && v[1 - k].norm() < 1e-12);
        }
    }

    #[test]
    fn trine_vectors_have_weight_two_thirds() {
        let dec = rank1_decompose(&trine_povm(), None).unwrap();
        assert_eq!((dec.outcomes(), dec.per_outcome()), (3, 1));
        for k in 0..3 {
            assert!((norm(&dec.vectors[k][0]).powi(2) - 2.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_two_element_splits() {
        let e0 = CMat::from_fn(3, 3, |i, j| if i == j && i < 2 { C64::new(0.5, 0.0) } else { C64::new(0.0, 0.0) });
        let e1 = &CMat::identity(3) - &e0;
        let dec = rank1_decompose(&[e0.clone(), e1.clone()], None).unwrap();
        assert_eq!(dec.per_outcome(), 3);
        assert!(dec.element(0).max_abs_diff(&e0) < 1e-12);
        assert!(dec.element(1).max_abs_diff(&e1) < 1e-12);
        assert!(dec.vectors.iter().flatten().all(|v| norm(v) > 0.1));
    }

    #[test]
    fn extension_of_identity_columns() {
        let m = CMat::from_fn(3, 2, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
        let u = extend_isometric_columns(&m).unwrap();
        assert!(u.max_abs_diff(&CMat::identity(3)) < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let v = random_state(2, &mut rng);
        let u = extend_isometric_columns(&CMat::column_vector(&v)).unwrap();
        assert!(u.is_unitary(1e-12));
        assert_eq!(u.column(0), v);
        let bad = CMat::from_fn(2, 1, |_, _| C64::new(1.0, 0.0));
        assert!(matches!(extend_isometric_columns(&bad), Err(DilationError::NotIsometric(_))));
    }

    #[test]
    fn trine_completion_against_gram_schmidt() {
        // Columns of the 3×2 matrix of trine components are orthonormal.
        let dec = rank1_decompose(&trine_povm(), None).unwrap();
        let xd = CMat::from_fn(3, 2, |k, h| dec.vectors[k][0][h].conj());
        let u = extend_isometric_columns(&xd).unwrap();
        assert!(u.is_unitary(1e-12));
        // The completing column is fixed up to phase: the normalized cross product.
        let (a, b) = (xd.column(0), xd.column(1));
        let cross = [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]];
        let overlap = dot(&cross.map(|z| z.conj()), &u.column(2)).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projective_input_is_trivial() {
        let res = dilate_povm(&computational(3), None).unwrap();
        assert_eq!(res.ancilla_dim, 1);
        assert!(res.report.passed);
    }

    #[test]
    fn trine_dilation_preserves_statistics() {
        let res = dilate_povm(&trine_povm(), None).unwrap();
        assert_eq!(res.ancilla_dim, 2);
        assert!(res.report.passed);
        assert!(res.report.complement_error < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let trine = trine_povm();
        for _ in 0..100 {
            let psi = random_state(2, &mut rng);
            let up = res.isometry.mul_vec(&psi);
            for (e, p) in trine.iter().zip(&res.pvm) {
                assert!((prob(e, &psi) - prob(p, &up)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn random_povm_dilations_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (d, k) in [(2, 2), (2, 4), (3, 3), (4, 2)] {
            let e = random_povm(d, k, &mut rng);
            let res = dilate_povm(&e, None).unwrap();
            assert!(res.report.passed, "{d} {k}: {:?}", res.report);
            assert_eq!(res.ancilla_dim, k * d - d + 1);
        }
    }

    #[test]
    fn two_settings_trine_and_sigma_z() {
        let (p0, p1, v) = dilate_two_settings(&trine_povm(), &computational(2)).unwrap();
        assert_eq!(p0.len(), 3);
        assert_eq!(p1.len(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let z = computational(2);
        for _ in 0..100 {
            let psi = random_state(2, &mut rng);
            let up = v.mul_vec(&psi);
            // V_A ξ = ξ ⊗ 0 ⊗ 0.
            let r = up.len() / 2;
            assert!((up[0] - psi[0]).norm() < 1e-12 && (up[r] - psi[1]).norm() < 1e-12);
            for (e, p) in trine_povm().iter().zip(&p0) {
                assert!((prob(e, &psi) - prob(p, &up)).abs() < 1e-9);
            }
            for (e, p) in z.iter().zip(&p1) {
                assert!((prob(e, &psi) - prob(p, &up)).abs() < 1e-9);
            }
        }
        for p in p0.iter().chain(&p1) {
            assert!(p.is_projector(1e-9));
        }
    }

    #[test]
    fn three_settings() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let mut z = computational(2);
        z.push(CMat::zeros(2, 2));
        let mut r = random_povm(2, 2, &mut rng);
        r.push(CMat::zeros(2, 2));
        let md = dilate_settings(&[trine_povm(), z, r]).unwrap();
        assert!(md.reconstruction_error < 1e-9);
        assert_eq!(md.pvms.len(), 3);
        // The lifted σ_z measurement is already projective.
        assert_eq!(md.ancilla_dims[..2], [2, 1]);
    }

    #[test]
    fn rejects_non_psd() {
        let mut e = computational(2);
        e[0] = e[0].scale_re(1.5);
        e[1] = &CMat::identity(2) - &e[0];
        assert!(matches!(dilate_povm(&e, None), Err(DilationError::InvalidPovm(_))));
    }
}
