//! Numerical probe of the CHSH / correlation tradeoff for strategies whose
//! Bob `Y = 1` measurement is separable.

use rayon::prelude::*;
use serde::Serialize;

use super::constructions::{bipartite_network_layout, bipartite_network_sources, diagonal_observable, extend_right, phi_plus, sigma_x, sigma_z, trivial_state};
use super::matrix::{CScalar, Matrix};
use super::separable::{SepTerm, SeparableMeasurement};
use super::strategy::{behavior_from_strategy, Povm, QuantumStrategy};
use super::QuantumError;
use crate::behavior::chsh_value;
use crate::scalar::{Backend, QSqrt2, Scalar};

const PROBE_EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct ProbeCase {
    pub name: String,
    pub strategy: QuantumStrategy,
    /// Bob's `Y = 1` POVM as a separable measurement across `B_a | B_c`.
    pub bob_y1: SeparableMeasurement,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeRow {
    pub name: String,
    pub p_b0_given_y1: Scalar,
    /// `None` when `P(B=0|Y=1) = 0`.
    pub conditional_chsh: Option<Scalar>,
    pub p_a_eq_b_given_x0_y0: Scalar,
    pub p_a_neq_b_given_x0_y0: Scalar,
    /// `P(B=0|Y=1) / 2`.
    pub bound: Scalar,
    /// Conditional CHSH equals `2√2` within 1e-9.
    pub applicable: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeReport {
    pub rows: Vec<ProbeRow>,
    pub passed: bool,
}

fn check_case(case: &ProbeCase) -> Result<(), QuantumError> {
    let s = &case.strategy;
    if s.layout.parties() != 3 || !s.is_bipartite_product() {
        return Err(QuantumError::Invalid(format!("{}: not a three-party bipartite-source strategy", case.name)));
    }
    let regs = s.layout.party_registers(1);
    let dims: Vec<usize> = regs.iter().map(|&r| s.layout.registers()[r].dim).collect();
    if dims != [case.bob_y1.a_dim, case.bob_y1.c_dim] {
        return Err(QuantumError::Invalid(format!("{}: Bob's registers {dims:?} do not match the separable cut", case.name)));
    }
    case.bob_y1.validate()?;
    let povm = s.povms.get(1).and_then(|p| p.get(1)).ok_or_else(|| QuantumError::Invalid(format!("{}: Bob has no Y = 1", case.name)))?;
    let sep = case.bob_y1.to_povm();
    if povm.outcomes() != sep.outcomes() || povm.elements().iter().zip(sep.elements()).any(|(a, b)| !a.approx_eq(b, PROBE_EPS)) {
        return Err(QuantumError::Invalid(format!("{}: Bob's Y = 1 POVM differs from the separable form", case.name)));
    }
    Ok(())
}

pub fn probe_case(case: &ProbeCase) -> Result<ProbeRow, QuantumError> {
    check_case(case)?;
    let b = behavior_from_strategy(&case.strategy)?;
    let backend = b.backend();
    let p_b0 = b.event_probability(&[0, 1, 0], |o| o[1] == 0);
    let conditional_chsh = if p_b0.is_zero_within(PROBE_EPS) {
        None
    } else {
        Some(chsh_value(&b.condition(1, 1, 0)?.behavior)?)
    };
    let eq = b.event_probability(&[0, 0, 0], |o| o[0] == o[1]);
    let neq = Scalar::one(backend) - &eq;
    let bound = &p_b0 * &Scalar::from_ratio(1, 2, backend);
    let target = Scalar::Exact(QSqrt2::from_parts(0, 1, 2, 1));
    let applicable = conditional_chsh.as_ref().is_some_and(|c| (c.to_f64() - target.to_f64()).abs() <= PROBE_EPS);
    let holds = !applicable || neq.to_f64() >= bound.to_f64() - PROBE_EPS;
    Ok(ProbeRow {
        name: case.name.clone(),
        p_b0_given_y1: p_b0,
        conditional_chsh,
        p_a_eq_b_given_x0_y0: eq,
        p_a_neq_b_given_x0_y0: neq,
        bound,
        applicable,
        holds,
    })
}

/// Evaluates every case; the row order follows the input.
pub fn qb2_tradeoff_probe(cases: &[ProbeCase]) -> Result<ProbeReport, QuantumError> {
    let rows = cases.par_iter().map(probe_case).collect::<Result<Vec<_>, _>>()?;
    let passed = rows.iter().all(|r| r.holds);
    Ok(ProbeReport { rows, passed })
}

fn ex(n: i64, d: i64) -> Scalar {
    Scalar::from_ratio(n, d, Backend::Exact)
}

fn basis_proj(d: usize, k: usize) -> Matrix {
    let mut m = Matrix::zeros(d, d, Backend::Exact);
    m.set(k, k, CScalar::one(Backend::Exact));
    m
}

fn id(d: usize) -> Matrix {
    Matrix::identity(d, Backend::Exact)
}

/// `Σ_k |k⟩⟨k| ⊗ M_k` (control first) or `Σ_k M_k ⊗ |k⟩⟨k|`.
fn controlled(ms: &[Matrix], control_first: bool) -> Matrix {
    let d = ms.len();
    let n = ms[0].rows() * d;
    ms.iter().enumerate().fold(Matrix::zeros(n, n, Backend::Exact), |acc, (k, m)| {
        let term = if control_first { basis_proj(d, k).kron(m) } else { m.kron(&basis_proj(d, k)) };
        &acc + &term
    })
}

/// Alice and Charlie share `|Φ+⟩`; Bob has no quantum system and reports
/// `B = 0` with probability `q` for `Y = 1`, always `B = 0` for `Y = 0`.
pub fn independent_bob_case(q: Scalar) -> ProbeCase {
    let layout = bipartite_network_layout([1, 2, 1, 1, 2, 1]);
    let sources = bipartite_network_sources(trivial_state(), trivial_state(), phi_plus());
    let one = Scalar::one(Backend::Exact);
    let rest = &one - &q;
    let term = |c: &Scalar| {
        if c.is_zero_within(0.0) {
            vec![]
        } else {
            vec![SepTerm { coeff: c.clone(), ra: id(1), rc: id(1) }]
        }
    };
    let bob_y1 = SeparableMeasurement { a_dim: 1, c_dim: 1, elements: vec![term(&q), term(&rest)] };
    let certain = Povm::new(vec![id(1), Matrix::zeros(1, 1, Backend::Exact)]).expect("1x1");
    let strategy = QuantumStrategy {
        layout,
        sources,
        povms: vec![vec![sigma_z(), sigma_x()], vec![certain, bob_y1.to_povm()], vec![diagonal_observable(1), diagonal_observable(-1)]],
    };
    ProbeCase { name: format!("independent-bob q={q}"), strategy, bob_y1 }
}

/// Alice–Bob and Bob–Charlie each share `|Φ+⟩`, which Alice and Charlie
/// measure in the computational basis to pick one of two Alice–Charlie Bell
/// pairs for CHSH. Bob's `Y = 1` reports the parity of his two qubits.
pub fn two_pair_case() -> ProbeCase {
    let layout = bipartite_network_layout([2, 4, 2, 2, 4, 2]);
    let mut ac = vec![CScalar::zero(Backend::Exact); 16];
    for i in 0..4 {
        ac[i * 4 + i] = CScalar::real(ex(1, 2));
    }
    let ac = Matrix::ket_projector(&ac).expect("16-dim");
    let sources = bipartite_network_sources(phi_plus(), phi_plus(), ac);
    let local = |p: &Povm, control_first: bool| {
        let elements = p
            .elements()
            .iter()
            .map(|e| {
                let on_pair = [e.kron(&id(2)), id(2).kron(e)];
                controlled(&on_pair, control_first)
            })
            .collect();
        Povm::new(elements).expect("same shapes")
    };
    let bob_y1 = SeparableMeasurement::from_basis_supports(2, 2, &[vec![(0, 0), (1, 1)], vec![(0, 1), (1, 0)]]);
    let strategy = QuantumStrategy {
        layout,
        sources,
        povms: vec![
            vec![local(&sigma_z(), true), local(&sigma_x(), true)],
            vec![extend_right(&sigma_z(), 2), bob_y1.to_povm()],
            vec![local(&diagonal_observable(1), false), local(&diagonal_observable(-1), false)],
        ],
    };
    ProbeCase { name: "two-pairs".into(), strategy, bob_y1 }
}

/// Alice and Bob share `cos θ|00⟩ + sin θ|11⟩` with `cos θ = c`; Alice plays
/// CHSH on an Alice–Charlie `|Φ+⟩` when her half reads 0 and outputs 1
/// otherwise; Bob reads his half in the computational basis for both settings.
pub fn tilted_case(c: QSqrt2, s: QSqrt2) -> ProbeCase {
    let q = &c * &c;
    let layout = bipartite_network_layout([2, 2, 2, 1, 2, 1]);
    let z = CScalar::zero(Backend::Exact);
    let ab = Matrix::ket_projector(&[CScalar::exact(c), z.clone(), z, CScalar::exact(s)]).expect("4-dim");
    let sources = bipartite_network_sources(ab, trivial_state(), phi_plus());
    let alice = |p: &Povm| {
        let elements = (0..2)
            .map(|a| {
                let fallback = if a == 1 { id(2) } else { Matrix::zeros(2, 2, Backend::Exact) };
                controlled(&[p.elements()[a].clone(), fallback], true)
            })
            .collect();
        Povm::new(elements).expect("4x4")
    };
    let bob_y1 = SeparableMeasurement::from_basis_supports(2, 1, &[vec![(0, 0)], vec![(1, 0)]]);
    let strategy = QuantumStrategy {
        layout,
        sources,
        povms: vec![
            vec![alice(&sigma_z()), alice(&sigma_x())],
            vec![sigma_z(), bob_y1.to_povm()],
            vec![diagonal_observable(1), diagonal_observable(-1)],
        ],
    };
    ProbeCase { name: format!("tilted cos2={q}"), strategy, bob_y1 }
}

/// The built-in family: independent Bob for `q ∈ {1/4, 1/2, 1}` and `q = 0`,
/// the two-pair strategy, and tilted states with `cos²θ ∈ {9/25, 1/2, 16/25, 1}`.
pub fn tradeoff_family() -> Vec<ProbeCase> {
    let mut v: Vec<ProbeCase> = [(1, 4), (1, 2), (1, 1), (0, 1)].iter().map(|&(n, d)| independent_bob_case(ex(n, d))).collect();
    v.push(two_pair_case());
    let h = QSqrt2::from_parts(0, 1, 1, 2);
    for (cs, sn) in [
        (QSqrt2::from_ratio(3, 5), QSqrt2::from_ratio(4, 5)),
        (h.clone(), h),
        (QSqrt2::from_ratio(4, 5), QSqrt2::from_ratio(3, 5)),
        (QSqrt2::one(), QSqrt2::zero()),
    ] {
        v.push(tilted_case(cs, sn));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn independent_bob_rows() {
        for (n, d) in [(1, 4), (1, 2), (1, 1)] {
            let r = probe_case(&independent_bob_case(ex(n, d))).unwrap();
            assert_eq!(r.p_b0_given_y1, ex(n, d));
            assert!(r.applicable);
            assert_eq!(r.p_a_neq_b_given_x0_y0, ex(1, 2));
            assert!(r.holds);
        }
    }

    #[test]
    fn bob_never_zero_is_vacuous() {
        let r = probe_case(&independent_bob_case(ex(0, 1))).unwrap();
        assert_eq!(r.bound, ex(0, 1));
        assert_eq!(r.conditional_chsh, None);
        assert!(!r.applicable && r.holds);
    }

    #[test]
    fn two_pair_row() {
        let r = probe_case(&two_pair_case()).unwrap();
        assert_eq!(r.p_b0_given_y1, ex(1, 2));
        assert_eq!(r.conditional_chsh, Some(Scalar::Exact(QSqrt2::from_parts(0, 1, 2, 1))));
        assert_eq!(r.p_a_neq_b_given_x0_y0, ex(1, 2));
        assert!(r.holds);
    }

    #[test]
    fn tilted_rows_saturate() {
        for case in tradeoff_family().into_iter().filter(|c| c.name.starts_with("tilted")) {
            let r = probe_case(&case).unwrap();
            assert!(r.applicable, "{}", r.name);
            assert_eq!(r.p_a_neq_b_given_x0_y0, r.bound, "{}", r.name);
            assert!(r.holds);
        }
    }

    #[test]
    fn whole_family_passes() {
        let rep = qb2_tradeoff_probe(&tradeoff_family()).unwrap();
        assert_eq!(rep.rows.len(), 9);
        assert!(rep.passed);
        assert!(rep.rows.iter().filter(|r| r.applicable).count() >= 3);
    }

    #[test]
    fn mismatched_separable_form_rejected() {
        let mut c = two_pair_case();
        c.bob_y1 = c.bob_y1.bin(&[vec![1], vec![0]]);
        assert!(probe_case(&c).is_err());
    }
}
