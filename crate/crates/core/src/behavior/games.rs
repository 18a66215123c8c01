//! CHSH functionals and the two tripartite games.

use serde::Serialize;

use super::{Behavior, BehaviorError, Result, Scenario};
use crate::scalar::{Backend, QSqrt2, Scalar, FLOAT_EPS};

fn sign(bit: usize) -> i64 {
    if bit & 1 == 0 {
        1
    } else {
        -1
    }
}

fn require(b: &Behavior, expected: &Scenario) -> Result<()> {
    if b.scenario() != expected {
        return Err(BehaviorError::WrongScenario { expected: expected.to_string(), found: b.scenario().to_string() });
    }
    Ok(())
}

/// `S_{αβγ} = Σ_{x,z} (−1)^{xz ⊕ αx ⊕ βz ⊕ γ} E_{xz}`; the eight relabelings of CHSH.
pub fn chsh_variant_value(b: &Behavior, alpha: usize, beta: usize, gamma: usize) -> Result<Scalar> {
    require(b, &Scenario::bipartite_binary())?;
    let mut s = Scalar::zero(b.backend());
    for x in 0..2 {
        for z in 0..2 {
            let mut e = Scalar::zero(b.backend());
            for a in 0..2 {
                for c in 0..2 {
                    let p = b.get(&[a, c], &[x, z]);
                    if a ^ c == 0 {
                        e += p;
                    } else {
                        e -= p;
                    }
                }
            }
            let k = sign((x * z) ^ (alpha * x) ^ (beta * z) ^ gamma);
            s += Scalar::from_ratio(k, 1, b.backend()) * e;
        }
    }
    Ok(s)
}

/// `S = Σ_{x,z} (−1)^{xz} E_{xz}` with `E_{xz} = Σ_{a,c} (−1)^{a⊕c} P(a,c|x,z)`.
pub fn chsh_value(b: &Behavior) -> Result<Scalar> {
    chsh_variant_value(b, 0, 0, 0)
}

/// Largest of the eight CHSH variants and its `(α, β, γ)`.
pub fn max_chsh_variant(b: &Behavior) -> Result<(Scalar, (usize, usize, usize))> {
    let mut best: Option<(Scalar, (usize, usize, usize))> = None;
    for v in 0..8 {
        let key = (v & 1, (v >> 1) & 1, (v >> 2) & 1);
        let s = chsh_variant_value(b, key.0, key.1, key.2)?;
        if best.as_ref().is_none_or(|(m, _)| s > *m) {
            best = Some((s, key));
        }
    }
    Ok(best.expect("eight variants"))
}

/// Which CHSH value counts as maximal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChshThreshold {
    /// `2√2`
    Quantum,
    /// `4`
    NoSignaling,
}

impl ChshThreshold {
    pub fn value(self) -> QSqrt2 {
        match self {
            ChshThreshold::Quantum => QSqrt2::from_parts(0, 1, 2, 1),
            ChshThreshold::NoSignaling => QSqrt2::from_int(4),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub p_b0_given_y1: Scalar,
    /// CHSH of Alice–Charlie given `Y = 1, B = 0`; absent when that event is impossible.
    pub conditional_chsh: Option<Scalar>,
    pub p_a_eq_b_given_x0_y0: Scalar,
    pub positive_event: bool,
    pub maximal_chsh: bool,
    pub perfect_correlation: bool,
    pub threshold: ChshThreshold,
    pub passed: bool,
}

/// Checks `P(B=0|Y=1) > 0`, CHSH of `P_{Y=1,B=0}(AC|XZ)` at the threshold and
/// `P(A=B|X=0,Y=0) = 1` on a no-signaling (3,2,2) behavior.
pub fn theorem1_conditions_check(b: &Behavior, threshold: ChshThreshold) -> Result<Theorem1Report> {
    require(b, &Scenario::tripartite_binary())?;
    let ns = b.no_signaling_check();
    if !ns.passed {
        return Err(BehaviorError::Signaling(format!("residual {}", ns.worst_residual)));
    }
    let backend = b.backend();
    let p_b0 = b.event_probability(&[0, 1, 0], |o| o[1] == 0);
    let conditional_chsh = match b.condition(1, 1, 0) {
        Ok(c) => Some(chsh_value(&c.behavior)?),
        Err(BehaviorError::ZeroProbabilityEvent) => None,
        Err(e) => return Err(e),
    };
    let p_eq = b.event_probability(&[0, 0, 0], |o| o[0] == o[1]);
    let target = match backend {
        Backend::Exact => Scalar::Exact(threshold.value()),
        Backend::Float => Scalar::Float(threshold.value().to_f64()),
    };
    let positive_event = p_b0.sign_within(FLOAT_EPS) == std::cmp::Ordering::Greater;
    let maximal_chsh = conditional_chsh.as_ref().is_some_and(|s| s.approx_eq(&target, FLOAT_EPS));
    let perfect_correlation = p_eq.approx_eq(&Scalar::one(backend), FLOAT_EPS);
    Ok(Theorem1Report {
        p_b0_given_y1: p_b0,
        conditional_chsh,
        p_a_eq_b_given_x0_y0: p_eq,
        positive_event,
        maximal_chsh,
        perfect_correlation,
        threshold,
        passed: positive_event && maximal_chsh && perfect_correlation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubgameScore {
    pub label: String,
    /// Win probability conditioned on Bob's setting; absent if that setting has zero weight.
    pub value: Option<Scalar>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RabelloReport {
    pub overall: Scalar,
    /// `Y=0:AB, Y=0:BC, Y=1:AB, Y=1:BC, Y=2:AC`.
    pub subgames: Vec<SubgameScore>,
    /// Aggregates over Bob's settings 0 and 1.
    pub ab_score: Option<Scalar>,
    pub bc_score: Option<Scalar>,
}

impl RabelloReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("subgame,value\n");
        let fmt = |v: &Option<Scalar>| v.as_ref().map(|s| s.to_string()).unwrap_or_default();
        for s in &self.subgames {
            out.push_str(&format!("{},{}\n", s.label, fmt(&s.value)));
        }
        out.push_str(&format!("AB,{}\nBC,{}\noverall,{}\n", fmt(&self.ab_score), fmt(&self.bc_score), self.overall));
        out
    }
}

/// Bob's outcome `b` encodes `(B_A, B_C) = (b >> 1, b & 1)`.
fn bob_bits(b: usize) -> (usize, usize) {
    (b >> 1, b & 1)
}

/// Whether outcomes `o = (a, b, c)` win at settings `s = (x, y, z)`, with `b = 2·B_A + B_C`.
pub fn rabello_win(s: &[usize], o: &[usize]) -> bool {
    let (x, y, z) = (s[0], s[1], s[2]);
    let (a, c) = (o[0], o[2]);
    let (ba, bc) = bob_bits(o[1]);
    if y < 2 {
        a ^ ba == x * y && c ^ bc == z * y
    } else {
        a ^ c == (x * z) ^ (x * ba) ^ bc
    }
}

/// Win probabilities of the game on (3,[2,3,2],[2,4,2]).
///
/// For `Y ∈ {0,1}` the round is won when both `A⊕B_A = XY` and `C⊕B_C = ZY`
/// hold; for `Y = 2` when `A⊕C = XZ ⊕ X·B_A ⊕ B_C`. `inputs` gives the
/// weight of each setting tuple in scenario order (uniform if `None`).
pub fn rabello_game_value(b: &Behavior, inputs: Option<&[Scalar]>) -> Result<RabelloReport> {
    let scen = Scenario::rabello();
    require(b, &scen)?;
    let backend = b.backend();
    let weights: Vec<Scalar> = match inputs {
        Some(w) => {
            if w.len() != scen.n_setting_tuples() {
                return Err(BehaviorError::InvalidWeights(format!("expected {} input weights", scen.n_setting_tuples())));
            }
            let total = w.iter().fold(Scalar::zero(backend), |a, x| a + x);
            if w.iter().any(|x| x.sign_within(FLOAT_EPS) == std::cmp::Ordering::Less)
                || !total.approx_eq(&Scalar::one(backend), FLOAT_EPS)
            {
                return Err(BehaviorError::InvalidWeights(format!("input distribution not normalized (sum {total})")));
            }
            w.to_vec()
        }
        None => vec![Scalar::from_ratio(1, scen.n_setting_tuples() as i64, backend); scen.n_setting_tuples()],
    };

    let zero = || Scalar::zero(backend);
    let mut overall = zero();
    // Per Y: (weight, AB, BC) or (weight, AC).
    let mut y_weight = [zero(), zero(), zero()];
    let mut ab = [zero(), zero()];
    let mut bc = [zero(), zero()];
    let mut ac = zero();
    for (si, s) in scen.setting_tuples().enumerate() {
        let (x, y, z) = (s[0], s[1], s[2]);
        let w = &weights[si];
        y_weight[y] += w;
        let mut p_ab = zero();
        let mut p_bc = zero();
        let mut p_win = zero();
        for (oi, p) in b.block(&s).iter().enumerate() {
            let o = scen.outcome_tuple(oi);
            let (a, c) = (o[0], o[2]);
            let (ba, bcbit) = bob_bits(o[1]);
            if y < 2 {
                let win_ab = a ^ ba == x * y;
                let win_bc = c ^ bcbit == z * y;
                if win_ab {
                    p_ab += p;
                }
                if win_bc {
                    p_bc += p;
                }
                if win_ab && win_bc {
                    p_win += p;
                }
            } else if rabello_win(&s, &o) {
                p_win += p;
            }
        }
        overall += w * &p_win;
        if y < 2 {
            ab[y] += w * &p_ab;
            bc[y] += w * &p_bc;
        } else {
            ac += w * &p_win;
        }
    }
    let norm = |num: &Scalar, den: &Scalar| num.checked_div(den);
    let mut subgames = Vec::new();
    for y in 0..2 {
        subgames.push(SubgameScore { label: format!("Y={y}:AB"), value: norm(&ab[y], &y_weight[y]) });
        subgames.push(SubgameScore { label: format!("Y={y}:BC"), value: norm(&bc[y], &y_weight[y]) });
    }
    subgames.push(SubgameScore { label: "Y=2:AC".into(), value: norm(&ac, &y_weight[2]) });
    let w01 = &y_weight[0] + &y_weight[1];
    Ok(RabelloReport {
        overall,
        subgames,
        ab_score: norm(&(&ab[0] + &ab[1]), &w01),
        bc_score: norm(&(&bc[0] + &bc[1]), &w01),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d, Backend::Exact)
    }

    fn pr_box() -> Behavior {
        Behavior::from_fn(Scenario::bipartite_binary(), |o, s| q(((o[0] ^ o[1]) == s[0] * s[1]) as i64, 2)).unwrap()
    }

    #[test]
    fn chsh_landmarks() {
        assert_eq!(chsh_value(&pr_box()).unwrap(), q(4, 1));
        let det = Behavior::deterministic(Scenario::bipartite_binary(), &[vec![0, 0], vec![0, 0]], Backend::Exact).unwrap();
        assert_eq!(chsh_value(&det).unwrap(), q(2, 1));
        let tsirelson = Behavior::from_fn(Scenario::bipartite_binary(), |o, s| {
            let sg = sign(o[0] ^ o[1] ^ (s[0] * s[1]));
            Scalar::exact(QSqrt2::from_parts(2, 8, sg, 8))
        })
        .unwrap();
        assert_eq!(chsh_value(&tsirelson).unwrap(), Scalar::exact(QSqrt2::from_parts(0, 1, 2, 1)));
    }

    #[test]
    fn chsh_wrong_scenario() {
        let b = Behavior::uniform(Scenario::tripartite_binary(), Backend::Exact);
        assert!(matches!(chsh_value(&b), Err(BehaviorError::WrongScenario { .. })));
    }

    #[test]
    fn chsh_variants_of_pr_box() {
        let (m, key) = max_chsh_variant(&pr_box()).unwrap();
        assert_eq!(m, q(4, 1));
        assert_eq!(key, (0, 0, 0));
        assert_eq!(chsh_variant_value(&pr_box(), 0, 0, 1).unwrap(), q(-4, 1));
    }

    #[test]
    fn uniform_fails_theorem1_conditions() {
        let b = Behavior::uniform(Scenario::tripartite_binary(), Backend::Exact);
        let r = theorem1_conditions_check(&b, ChshThreshold::Quantum).unwrap();
        assert!(!r.passed);
        assert_eq!(r.conditional_chsh, Some(q(0, 1)));
        assert_eq!(r.p_b0_given_y1, q(1, 2));
    }

    #[test]
    fn all_zero_rabello_by_enumeration() {
        let det = Behavior::deterministic(Scenario::rabello(), &[vec![0, 0], vec![0, 0, 0], vec![0, 0]], Backend::Exact)
            .unwrap();
        let r = rabello_game_value(&det, None).unwrap();
        // Brute force over the 12 input tuples.
        let mut wins = 0;
        for x in 0..2 {
            for y in 0..3 {
                for z in 0..2 {
                    let ok = if y < 2 { x * y == 0 && z * y == 0 } else { x * z == 0 };
                    wins += ok as i64;
                }
            }
        }
        assert_eq!(r.overall, q(wins, 12));
        assert_eq!(r.overall, q(2, 3));
        let vals: Vec<Scalar> = r.subgames.iter().map(|s| s.value.clone().unwrap()).collect();
        assert_eq!(vals, vec![q(1, 1), q(1, 1), q(1, 2), q(1, 2), q(3, 4)]);
        assert_eq!(r.ab_score, Some(q(3, 4)));
        assert!(r.to_csv().contains("Y=2:AC,3/4"));
    }

    #[test]
    fn rabello_input_distribution_checked() {
        let b = Behavior::uniform(Scenario::rabello(), Backend::Exact);
        assert!(rabello_game_value(&b, Some(&vec![q(1, 11); 12])).is_err());
        assert!(rabello_game_value(&b, Some(&[q(1, 1)])).is_err());
        let mut w = vec![q(0, 1); 12];
        w[0] = q(1, 1);
        let r = rabello_game_value(&b, Some(&w)).unwrap();
        assert!(r.subgames[2].value.is_none());
        assert_eq!(r.subgames[0].value, Some(q(1, 2)));
    }
}
