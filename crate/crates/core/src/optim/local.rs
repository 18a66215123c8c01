//! Deterministic strategies and local-polytope membership.

use serde::Serialize;

use super::lp::{scalar_to_rational, solve_lp, Constraint, ExactField, LinearProgram, LpOutcome, Relation};
use super::{OptimError, Result};
use crate::behavior::{Behavior, Scenario};
use crate::scalar::{Backend, QSqrt2, Scalar};

/// Party `p` answers setting `s` with `maps[p][s]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeterministicVertex {
    pub maps: Vec<Vec<usize>>,
}

impl DeterministicVertex {
    pub fn behavior(&self, scenario: &Scenario) -> Behavior {
        Behavior::deterministic(scenario.clone(), &self.maps, Backend::Exact).expect("maps fit the scenario")
    }

    /// Index of the single outcome tuple with probability 1 under `settings`.
    pub fn outcome_index(&self, scenario: &Scenario, settings: &[usize]) -> usize {
        let o: Vec<usize> = settings.iter().enumerate().map(|(p, &s)| self.maps[p][s]).collect();
        scenario.outcome_index(&o)
    }
}

pub fn vertex_count(scenario: &Scenario) -> u128 {
    (0..scenario.parties())
        .map(|p| (scenario.outcomes()[p] as u128).saturating_pow(scenario.settings()[p] as u32))
        .fold(1u128, |a, b| a.saturating_mul(b))
}

/// Every map `setting → outcome` of one party, lexicographic.
fn party_maps(settings: usize, outcomes: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..settings {
        out = out.into_iter().flat_map(|m| (0..outcomes).map(move |o| [m.clone(), vec![o]].concat())).collect();
    }
    out
}

/// All deterministic strategies, lexicographic with party 0 most significant.
pub fn enumerate_vertices(scenario: &Scenario) -> Result<Vec<DeterministicVertex>> {
    let count = vertex_count(scenario);
    if count > 1_000_000 {
        return Err(OptimError::TooManyVertices(count));
    }
    let per_party: Vec<Vec<Vec<usize>>> =
        (0..scenario.parties()).map(|p| party_maps(scenario.settings()[p], scenario.outcomes()[p])).collect();
    let mut out: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for maps in &per_party {
        out = out.into_iter().flat_map(|v| maps.iter().map(move |m| [v.clone(), vec![m.clone()]].concat())).collect();
    }
    Ok(out.into_iter().map(|maps| DeterministicVertex { maps }).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VertexWeight {
    pub vertex: usize,
    pub maps: Vec<Vec<usize>>,
    pub weight: QSqrt2,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum LocalityCertificate {
    /// Nonzero weights of a decomposition into vertices.
    Weights { weights: Vec<VertexWeight> },
    /// Functional `f` in table order with `f·P > 0 ≥ f·D` for every vertex `D`.
    Functional { functional: Vec<QSqrt2>, value: QSqrt2 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalityVerdict {
    pub local: bool,
    pub vertices: usize,
    /// Field the LP was solved over: `rational` or `sqrt2`.
    pub field: &'static str,
    pub certificate: LocalityCertificate,
    pub certificate_verified: bool,
}

fn entry_as<F: ExactField>(s: &Scalar, conv: &impl Fn(&QSqrt2) -> F) -> F {
    conv(s.as_exact().expect("exact entry"))
}

/// `Σλ = 1` then one row per table entry. Only entries of the vertex are
/// touched, so rows are filled column by column.
fn membership_lp<F: ExactField>(b: &Behavior, vertices: &[DeterministicVertex], conv: impl Fn(&QSqrt2) -> F) -> LinearProgram<F> {
    let sc = b.scenario();
    let nv = vertices.len();
    let mut rows: Vec<Constraint<F>> = Vec::with_capacity(sc.len() + 1);
    rows.push(Constraint::new(vec![F::one(); nv], Relation::Eq, F::one()));
    for e in b.entries() {
        rows.push(Constraint::new(vec![F::zero(); nv], Relation::Eq, entry_as(e, &conv)));
    }
    let no = sc.n_outcome_tuples();
    for (v, vert) in vertices.iter().enumerate() {
        for (si, s) in sc.setting_tuples().enumerate() {
            rows[1 + si * no + vert.outcome_index(sc, &s)].coeffs[v] = F::one();
        }
    }
    LinearProgram::feasibility(nv, rows)
}

fn verdict_from<F: ExactField>(b: &Behavior, vertices: &[DeterministicVertex], out: LpOutcome<F>) -> Result<LocalityCertificate> {
    match out {
        LpOutcome::Optimal { x, .. } => Ok(LocalityCertificate::Weights {
            weights: x
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(v, w)| VertexWeight { vertex: v, maps: vertices[v].maps.clone(), weight: w.to_qsqrt2() })
                .collect(),
        }),
        LpOutcome::Infeasible { farkas } => {
            // Fold the normalization row into the first setting block.
            let no = b.scenario().n_outcome_tuples();
            let y0 = farkas[0].to_qsqrt2();
            let functional: Vec<QSqrt2> = farkas[1..]
                .iter()
                .enumerate()
                .map(|(e, y)| {
                    let f = -y.to_qsqrt2();
                    if e < no {
                        f - &y0
                    } else {
                        f
                    }
                })
                .collect();
            let value = b.entries().iter().zip(&functional).map(|(p, f)| p.as_exact().expect("exact") * f).sum();
            Ok(LocalityCertificate::Functional { functional, value })
        }
        LpOutcome::Unbounded { .. } => Err(OptimError::Unexpected("feasibility problem reported unbounded".into())),
    }
}

/// Decides membership in the local polytope with an exact LP. Rational
/// tables are solved over ℚ, others over ℚ[√2].
pub fn is_local(b: &Behavior) -> Result<LocalityVerdict> {
    if b.backend() != Backend::Exact {
        return Err(OptimError::FloatInput);
    }
    let report = b.validate();
    if !report.passed {
        return Err(OptimError::InvalidBehavior(format!("{report:?}")));
    }
    let vertices = enumerate_vertices(b.scenario())?;
    let rational = b.entries().iter().all(|e| scalar_to_rational(e).is_some());
    let (field, certificate) = if rational {
        let lp = membership_lp(b, &vertices, |q| q.rational_part().clone());
        ("rational", verdict_from(b, &vertices, solve_lp(&lp)?)?)
    } else {
        let lp = membership_lp(b, &vertices, |q| q.clone());
        ("sqrt2", verdict_from(b, &vertices, solve_lp(&lp)?)?)
    };
    check_locality_certificate(b, &certificate).map_err(OptimError::Certificate)?;
    Ok(LocalityVerdict {
        local: matches!(certificate, LocalityCertificate::Weights { .. }),
        vertices: vertices.len(),
        field,
        certificate,
        certificate_verified: true,
    })
}

/// Independent check: rebuilds every vertex table and tests the certificate
/// against `b` in [`Scalar`] arithmetic.
pub fn check_locality_certificate(b: &Behavior, cert: &LocalityCertificate) -> std::result::Result<(), String> {
    let sc = b.scenario();
    let vertices = enumerate_vertices(sc).map_err(|e| e.to_string())?;
    let zero = Scalar::zero(Backend::Exact);
    match cert {
        LocalityCertificate::Weights { weights } => {
            let mut total = zero.clone();
            let mut acc = vec![zero.clone(); sc.len()];
            for w in weights {
                let v = vertices.get(w.vertex).ok_or_else(|| format!("unknown vertex {}", w.vertex))?;
                if v.maps != w.maps {
                    return Err(format!("vertex {} maps differ", w.vertex));
                }
                if w.weight.is_negative() {
                    return Err(format!("negative weight on vertex {}", w.vertex));
                }
                let ws = Scalar::exact(w.weight.clone());
                total += &ws;
                for (a, d) in acc.iter_mut().zip(v.behavior(sc).entries()) {
                    *a += &ws * d;
                }
            }
            if total != Scalar::one(Backend::Exact) {
                return Err(format!("weights sum to {total}"));
            }
            if let Some(i) = (0..sc.len()).find(|&i| acc[i] != b.entries()[i]) {
                return Err(format!("entry {i}: mixture {} vs behavior {}", acc[i], b.entries()[i]));
            }
        }
        LocalityCertificate::Functional { functional, value } => {
            if functional.len() != sc.len() {
                return Err("functional has the wrong length".into());
            }
            let apply = |t: &Behavior| -> Scalar {
                t.entries().iter().zip(functional).fold(zero.clone(), |acc, (p, f)| acc + p * &Scalar::exact(f.clone()))
            };
            let on_b = apply(b);
            if on_b != Scalar::exact(value.clone()) || !value.is_positive() {
                return Err(format!("functional on the behavior is {on_b}, reported {value}"));
            }
            for (i, v) in vertices.iter().enumerate() {
                let fv = apply(&v.behavior(sc));
                if fv > zero {
                    return Err(format!("functional is {fv} on vertex {i}"));
                }
            }
        }
    }
    Ok(())
}
