//! The explicit quantum strategies. All entries lie in ℚ[√2].

use super::layout::RegisterLayout;
use super::matrix::{CScalar, Matrix};
use super::strategy::{behavior_from_strategy, Povm, QuantumStrategy, Source};
use super::QuantumError;
use crate::behavior::Behavior;
use crate::scalar::{Backend, QSqrt2, Scalar};

fn q(n: i64, d: i64) -> QSqrt2 {
    QSqrt2::from_ratio(n, d)
}

/// `1/√2 = √2/2`.
fn inv_sqrt2() -> QSqrt2 {
    QSqrt2::from_parts(0, 1, 1, 2)
}

fn exact_vec(v: &[QSqrt2]) -> Vec<CScalar> {
    v.iter().cloned().map(CScalar::exact).collect()
}

/// Bell vectors on two qubits, indexed `Φ+, Ψ−, Φ−, Ψ+`.
pub fn bell_vector(k: usize) -> Vec<CScalar> {
    let h = inv_sqrt2();
    let z = q(0, 1);
    let v = match k {
        0 => [h.clone(), z.clone(), z.clone(), h],
        1 => [z.clone(), h.clone(), -h, z],
        2 => [h.clone(), z.clone(), z.clone(), -h],
        3 => [z.clone(), h.clone(), h, z],
        _ => panic!("Bell index {k} out of range"),
    };
    exact_vec(&v)
}

pub fn bell_projector(k: usize) -> Matrix {
    Matrix::ket_projector(&bell_vector(k)).expect("4-dim")
}

/// `|Φ+⟩⟨Φ+|`.
pub fn phi_plus() -> Matrix {
    bell_projector(0)
}

/// `(|0…0⟩ + |1…1⟩)/√2` on `n` qubits.
pub fn ghz_projector(n: usize) -> Matrix {
    let d = 1 << n;
    let mut v = vec![q(0, 1); d];
    v[0] = inv_sqrt2();
    v[d - 1] = inv_sqrt2();
    Matrix::ket_projector(&exact_vec(&v)).expect("nonempty")
}

/// Eigenprojectors `{(I + n·σ)/2, (I − n·σ)/2}` of `n_z σ_z + n_x σ_x`.
pub fn qubit_observable(nz: QSqrt2, nx: QSqrt2) -> Povm {
    let half = q(1, 2);
    let proj = |s: i64| {
        let s = q(s, 1);
        let a = &half * &(QSqrt2::one() + &s * &nz);
        let b = &half * &(&s * &nx);
        let d = &half * &(QSqrt2::one() - &s * &nz);
        Matrix::from_exact(2, 2, vec![a, b.clone(), b, d])
    };
    Povm::new(vec![proj(1), proj(-1)]).expect("2x2")
}

pub fn sigma_z() -> Povm {
    qubit_observable(q(1, 1), q(0, 1))
}

pub fn sigma_x() -> Povm {
    qubit_observable(q(0, 1), q(1, 1))
}

/// `(σ_z + σ_x)/√2` for `sign = 1`, `(σ_z − σ_x)/√2` for `sign = −1`.
pub fn diagonal_observable(sign: i64) -> Povm {
    qubit_observable(inv_sqrt2(), QSqrt2::from_int(sign) * inv_sqrt2())
}

/// Elementwise `P_k ⊗ Q_l` for outcome `2k + l`.
pub fn product_povm(p: &Povm, q: &Povm) -> Povm {
    let mut elements = Vec::new();
    for a in p.elements() {
        for b in q.elements() {
            elements.push(a.kron(b));
        }
    }
    Povm::new(elements).expect("same shapes")
}

/// `E ↦ E ⊗ I_d` for each element.
pub fn extend_right(p: &Povm, d: usize) -> Povm {
    let id = Matrix::identity(d, p.elements()[0].backend());
    Povm::new(p.elements().iter().map(|e| e.kron(&id)).collect()).expect("same shapes")
}

/// `E ↦ I_d ⊗ E` for each element.
pub fn extend_left(p: &Povm, d: usize) -> Povm {
    let id = Matrix::identity(d, p.elements()[0].backend());
    Povm::new(p.elements().iter().map(|e| id.kron(e)).collect()).expect("same shapes")
}

/// Six-register layout `A_b, A_c, B_a, B_c, C_a, C_b` (register `P_q` is held
/// by `P` and shared with `Q`), with sources on `A_b B_a`, `B_c C_b`, `A_c C_a`.
///
/// `dims` lists the register dimensions in that order.
pub fn bipartite_network_layout(dims: [usize; 6]) -> RegisterLayout {
    RegisterLayout::from_triples(
        3,
        &[
            ("A_b", dims[0], 0),
            ("A_c", dims[1], 0),
            ("B_a", dims[2], 1),
            ("B_c", dims[3], 1),
            ("C_a", dims[4], 2),
            ("C_b", dims[5], 2),
        ],
    )
    .expect("valid layout")
}

/// Sources on `A_b B_a`, `B_c C_b`, `A_c C_a` for [`bipartite_network_layout`].
pub fn bipartite_network_sources(ab: Matrix, bc: Matrix, ac: Matrix) -> Vec<Source> {
    vec![
        Source { registers: vec![0, 2], state: ab },
        Source { registers: vec![3, 5], state: bc },
        Source { registers: vec![1, 4], state: ac },
    ]
}

/// `[[1]]`, the state of a one-dimensional source.
pub fn trivial_state() -> Matrix {
    Matrix::identity(1, Backend::Exact)
}

/// Bell pairs between Alice–Bob and Bob–Charlie; Bob's `Y = 1` is the
/// two-outcome test `{Φ+, I − Φ+}` on his two qubits.
pub fn build_theorem1_strategy() -> QuantumStrategy {
    let layout = bipartite_network_layout([2, 1, 2, 2, 1, 2]);
    let sources = bipartite_network_sources(phi_plus(), phi_plus(), trivial_state());
    let bell = phi_plus();
    let rest = &Matrix::identity(4, Backend::Exact) - &bell;
    QuantumStrategy {
        layout,
        sources,
        povms: vec![
            vec![sigma_z(), sigma_x()],
            vec![extend_right(&sigma_z(), 2), Povm::new(vec![bell, rest]).expect("4x4")],
            vec![diagonal_observable(1), diagonal_observable(-1)],
        ],
    }
}

/// One three-qubit GHZ source; Bob measures `σ_z` for `Y = 0` and `σ_x` for `Y = 1`.
pub fn build_ghz_strategy() -> Result<(QuantumStrategy, Behavior), QuantumError> {
    let layout = RegisterLayout::from_triples(3, &[("A", 2, 0), ("B", 2, 1), ("C", 2, 2)])?;
    let s = QuantumStrategy {
        layout,
        sources: vec![Source { registers: vec![0, 1, 2], state: ghz_projector(3) }],
        povms: vec![
            vec![sigma_z(), sigma_x()],
            vec![sigma_z(), sigma_x()],
            vec![diagonal_observable(1), diagonal_observable(-1)],
        ],
    };
    let b = behavior_from_strategy(&s)?;
    Ok((s, b))
}

/// Bell pairs between Alice–Bob and Bob–Charlie.
///
/// Bob's outcome is `b = 2·B_A + B_C`. For `Y ∈ {0,1}` he measures
/// `(σ_z ± σ_x)/√2` on the Alice half and `σ_z` / `σ_x` on the Charlie half;
/// for `Y = 2` he measures in the Bell basis `Φ+, Ψ−, Φ−, Ψ+`.
pub fn build_rabello_quantum_strategy() -> QuantumStrategy {
    let layout = bipartite_network_layout([2, 1, 2, 2, 1, 2]);
    let sources = bipartite_network_sources(phi_plus(), phi_plus(), trivial_state());
    let bell = Povm::new((0..4).map(bell_projector).collect()).expect("4x4");
    QuantumStrategy {
        layout,
        sources,
        povms: vec![
            vec![sigma_z(), sigma_x()],
            vec![product_povm(&diagonal_observable(1), &sigma_z()), product_povm(&diagonal_observable(-1), &sigma_x()), bell],
            vec![diagonal_observable(1), diagonal_observable(-1)],
        ],
    }
}

/// Exact scalar shorthand for tests and examples.
pub fn exact(n: i64, d: i64) -> Scalar {
    Scalar::Exact(q(n, d))
}
