//! Largest conditional CHSH value of `p·B + Σ μ_v D_v` over mixtures with
//! local vertices `D_v`, as a single LP after the Charnes–Cooper change of
//! variables `u = w / P(E)`, `t = 1 / P(E)`.

use std::cmp::Ordering;

use serde::Serialize;

use super::local::{enumerate_vertices, DeterministicVertex, VertexWeight};
use super::lp::{scalar_to_rational, solve_lp, Constraint, ExactField, LinearProgram, LpOutcome, Relation};
use super::{OptimError, Result};
use crate::behavior::{chsh_value, mix, Behavior, Scenario};
use crate::scalar::{Backend, QSqrt2, Scalar};

/// `party` obtains `outcome` on `setting`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConditioningEvent {
    pub party: usize,
    pub setting: usize,
    pub outcome: usize,
}

/// `P(o_i = o_j | s_i, s_j) = 1` for every setting of the other parties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AgreementConstraint {
    pub parties: [usize; 2],
    pub settings: [usize; 2],
}

/// Per-component linear data of the fractional program. Component 0 is `B`,
/// component `1 + v` is vertex `v`.
#[derive(Clone, Debug)]
pub struct MixtureProgram {
    pub vertices: Vec<DeterministicVertex>,
    pub components: Vec<Behavior>,
    /// `Σ (−1)^{xz} Σ (−1)^{a⊕c} Q(a, e, c | x, s_E, z)`.
    pub numerators: Vec<QSqrt2>,
    /// `Q(E)` at the remaining parties' setting 0.
    pub denominators: Vec<QSqrt2>,
    /// One row per agreement constraint and setting tuple: `Q(o_i = o_j | s)`.
    pub agreement: Vec<Vec<QSqrt2>>,
}

fn exact(s: &Scalar) -> QSqrt2 {
    s.as_exact().expect("exact entry").clone()
}

/// Builds the fractional program; requires an exact, valid, no-signaling `b`
/// whose other two parties form a binary two-setting scenario.
pub fn mixture_program(b: &Behavior, event: ConditioningEvent, constraints: &[AgreementConstraint]) -> Result<MixtureProgram> {
    if b.backend() != Backend::Exact {
        return Err(OptimError::FloatInput);
    }
    let sc = b.scenario();
    if !b.validate().passed || !b.no_signaling_check().passed {
        return Err(OptimError::InvalidBehavior("behavior must be a valid no-signaling table".into()));
    }
    if event.party >= sc.parties() || event.setting >= sc.settings()[event.party] || event.outcome >= sc.outcomes()[event.party] {
        return Err(OptimError::InvalidBehavior("conditioning event out of range".into()));
    }
    let rest: Vec<usize> = (0..sc.parties()).filter(|&p| p != event.party).collect();
    if sc.restrict(&rest) != Scenario::bipartite_binary() {
        return Err(OptimError::InvalidBehavior("remaining parties must form the binary two-setting scenario".into()));
    }
    for c in constraints {
        let [i, j] = c.parties;
        if i == j || i >= sc.parties() || j >= sc.parties() || c.settings[0] >= sc.settings()[i] || c.settings[1] >= sc.settings()[j] {
            return Err(OptimError::InvalidBehavior(format!("bad agreement constraint {c:?}")));
        }
    }
    let vertices = enumerate_vertices(sc)?;
    let mut components = vec![b.clone()];
    components.extend(vertices.iter().map(|v| v.behavior(sc)));

    let full = |x: usize, z: usize| {
        let mut s = vec![0; sc.parties()];
        s[event.party] = event.setting;
        s[rest[0]] = x;
        s[rest[1]] = z;
        s
    };
    let numerator = |q: &Behavior| -> QSqrt2 {
        let mut n = QSqrt2::zero();
        for x in 0..2 {
            for z in 0..2 {
                let s = full(x, z);
                let sign = if x * z == 1 { -1 } else { 1 };
                let e = q.event_probability(&s, |o| o[event.party] == event.outcome && o[rest[0]] == o[rest[1]])
                    - q.event_probability(&s, |o| o[event.party] == event.outcome && o[rest[0]] != o[rest[1]]);
                n += QSqrt2::from_int(sign) * exact(&e);
            }
        }
        n
    };
    let denominator = |q: &Behavior| exact(&q.event_probability(&full(0, 0), |o| o[event.party] == event.outcome));
    let mut agreement = Vec::new();
    for c in constraints {
        let [i, j] = c.parties;
        for s in sc.setting_tuples().filter(|s| s[i] == c.settings[0] && s[j] == c.settings[1]) {
            agreement.push(components.iter().map(|q| exact(&q.event_probability(&s, |o| o[i] == o[j]))).collect());
        }
    }
    Ok(MixtureProgram {
        numerators: components.iter().map(numerator).collect(),
        denominators: components.iter().map(denominator).collect(),
        vertices,
        components,
        agreement,
    })
}

impl MixtureProgram {
    /// Variables `u_0 … u_n, t`: maximize `N·u` with `D·u = 1`, `Σu = t`
    /// and `G·u = t` for each agreement row.
    pub fn charnes_cooper<F: ExactField>(&self, conv: impl Fn(&QSqrt2) -> F) -> LinearProgram<F> {
        let k = self.components.len();
        let with_t = |coeffs: &[QSqrt2], t: F| -> Vec<F> {
            let mut row: Vec<F> = coeffs.iter().map(&conv).collect();
            row.push(t);
            row
        };
        let mut rows = vec![
            Constraint::new(with_t(&self.denominators, F::zero()), Relation::Eq, F::one()),
            Constraint::new(with_t(&vec![QSqrt2::one(); k], F::one().negated()), Relation::Eq, F::zero()),
        ];
        for g in &self.agreement {
            rows.push(Constraint::new(with_t(g, F::one().negated()), Relation::Eq, F::zero()));
        }
        LinearProgram { n_vars: k + 1, objective: with_t(&self.numerators, F::zero()), constraints: rows }
    }

    fn is_rational(&self) -> bool {
        self.numerators.iter().chain(&self.denominators).chain(self.agreement.iter().flatten()).all(QSqrt2::is_rational)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixtureOptimum {
    pub optimum: QSqrt2,
    /// Weight of the input behavior.
    pub p: QSqrt2,
    pub local_weights: Vec<VertexWeight>,
    pub event_probability: QSqrt2,
    /// Sign of `optimum − 2√2`.
    #[serde(serialize_with = "ser_ordering")]
    pub versus_tsirelson: Ordering,
    /// The witness mixture rebuilt, conditioned and scored from scratch.
    pub witness_chsh: QSqrt2,
    pub field: &'static str,
}

fn ser_ordering<S: serde::Serializer>(o: &Ordering, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    })
}

fn optimum_from<F: ExactField>(prog: &MixtureProgram, lp: &LinearProgram<F>) -> Result<(QSqrt2, Vec<QSqrt2>)> {
    match solve_lp(lp)? {
        LpOutcome::Optimal { x, value, .. } => {
            let t = x.last().expect("t").clone();
            let w = x[..prog.components.len()].iter().map(|u| u.over(&t).to_qsqrt2()).collect();
            Ok((value.to_qsqrt2(), w))
        }
        LpOutcome::Infeasible { .. } => Err(OptimError::Infeasible),
        LpOutcome::Unbounded { .. } => Err(OptimError::Unexpected("fractional program reported unbounded".into())),
    }
}

pub fn max_mixture_conditional_chsh(
    b: &Behavior,
    event: ConditioningEvent,
    constraints: &[AgreementConstraint],
) -> Result<MixtureOptimum> {
    let prog = mixture_program(b, event, constraints)?;
    let (field, (optimum, w)) = if prog.is_rational() && b.entries().iter().all(|e| scalar_to_rational(e).is_some()) {
        ("rational", optimum_from(&prog, &prog.charnes_cooper(|q| q.rational_part().clone()))?)
    } else {
        ("sqrt2", optimum_from(&prog, &prog.charnes_cooper(|q| q.clone()))?)
    };
    let comps: Vec<(Scalar, Behavior)> = w
        .iter()
        .zip(&prog.components)
        .filter(|(wi, _)| !wi.is_zero())
        .map(|(wi, q)| (Scalar::exact(wi.clone()), q.clone()))
        .collect();
    let mixed = mix(&comps)?;
    let cond = mixed.condition(event.party, event.setting, event.outcome)?;
    let witness_chsh = exact(&chsh_value(&cond.behavior)?);
    if witness_chsh != optimum {
        return Err(OptimError::Certificate(format!("witness mixture scores {witness_chsh}, LP optimum {optimum}")));
    }
    let tsirelson = QSqrt2::from_parts(0, 1, 2, 1);
    Ok(MixtureOptimum {
        versus_tsirelson: (&optimum - &tsirelson).signum(),
        p: w[0].clone(),
        local_weights: w[1..]
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(v, x)| VertexWeight { vertex: v, maps: prog.vertices[v].maps.clone(), weight: x.clone() })
            .collect(),
        event_probability: exact(&cond.event_probability),
        optimum,
        witness_chsh,
        field,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::{theorem1_behavior, theorem2_behavior};

    const BOB_B0_Y1: ConditioningEvent = ConditioningEvent { party: 1, setting: 1, outcome: 0 };

    #[test]
    fn local_behavior_stays_below_two() {
        let b = Behavior::uniform(Scenario::tripartite_binary(), Backend::Exact);
        let out = max_mixture_conditional_chsh(&b, BOB_B0_Y1, &[]).unwrap();
        assert_eq!(out.optimum, QSqrt2::from_int(2));
    }

    #[test]
    fn theorem2_unconstrained_reaches_four() {
        let out = max_mixture_conditional_chsh(&theorem2_behavior(), BOB_B0_Y1, &[]).unwrap();
        assert_eq!(out.optimum, QSqrt2::from_int(4));
        assert_eq!(out.p, QSqrt2::one());
        assert_eq!(out.versus_tsirelson, Ordering::Greater);
    }

    #[test]
    fn theorem1_mixtures_over_sqrt2() {
        let out = max_mixture_conditional_chsh(&theorem1_behavior(), BOB_B0_Y1, &[]).unwrap();
        assert_eq!(out.field, "sqrt2");
        assert_eq!(out.optimum, QSqrt2::from_parts(0, 1, 2, 1));
        assert_eq!(out.versus_tsirelson, Ordering::Equal);
    }

    #[test]
    fn malformed_constraint_rejected() {
        let c = AgreementConstraint { parties: [0, 0], settings: [0, 0] };
        assert!(matches!(max_mixture_conditional_chsh(&theorem2_behavior(), BOB_B0_Y1, &[c]), Err(OptimError::InvalidBehavior(_))));
    }
}
