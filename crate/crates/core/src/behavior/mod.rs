//! Behaviors `P(outcomes | settings)` over a finite Bell scenario.
//!
//! A [`Behavior`] stores one dense table of [`Scalar`]s. The flat index is
//! `setting_index * n_outcome_tuples + outcome_index`, where both tuple
//! indices are mixed-radix with party 0 varying fastest.

mod games;
mod hierarchy;
mod io;
mod reduce;

pub use games::{
    chsh_value, chsh_variant_value, max_chsh_variant, rabello_game_value, rabello_win, theorem1_conditions_check,
    ChshThreshold, RabelloReport, SubgameScore, Theorem1Report,
};
pub use hierarchy::{hierarchy_report, ConditionalChsh, HierarchyReport, Landmarks, LocalitySummary, UNDECIDED_CLASSES};
pub use io::{behavior_from_json, behavior_to_json, marginals_csv, table_csv, BehaviorJson};
pub use reduce::{add_single_outcome_setting, drop_single_setting_party, simulate_with_shared_lambda, SharedLambda};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::{Backend, Scalar, FLOAT_EPS};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BehaviorError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("table has {found} entries, scenario requires {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("entries mix exact and float values")]
    MixedBackend,
    #[error("party {0} out of range")]
    PartyOutOfRange(usize),
    #[error("setting {setting} out of range for party {party}")]
    SettingOutOfRange { party: usize, setting: usize },
    #[error("outcome {outcome} out of range for party {party}")]
    OutcomeOutOfRange { party: usize, outcome: usize },
    #[error("behavior signals: {0}")]
    Signaling(String),
    #[error("conditioning event has zero probability")]
    ZeroProbabilityEvent,
    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("operation requires scenario {expected}, found {found}")]
    WrongScenario { expected: String, found: String },
    #[error("party {party} has {settings} settings, expected exactly one")]
    NotSingleSetting { party: usize, settings: usize },
    #[error("invalid behavior: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, BehaviorError>;

/// Numbers of settings and outcomes per party.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ScenarioRepr", into = "ScenarioRepr")]
pub struct Scenario {
    settings: Vec<usize>,
    outcomes: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ScenarioRepr {
    parties: usize,
    settings: Vec<usize>,
    outcomes: Vec<usize>,
}

impl TryFrom<ScenarioRepr> for Scenario {
    type Error = BehaviorError;
    fn try_from(r: ScenarioRepr) -> Result<Self> {
        if r.parties != r.settings.len() || r.parties != r.outcomes.len() {
            return Err(BehaviorError::InvalidScenario(format!(
                "parties = {} but {} setting counts and {} outcome counts",
                r.parties,
                r.settings.len(),
                r.outcomes.len()
            )));
        }
        Scenario::new(r.settings, r.outcomes)
    }
}

impl From<Scenario> for ScenarioRepr {
    fn from(s: Scenario) -> Self {
        ScenarioRepr { parties: s.settings.len(), settings: s.settings, outcomes: s.outcomes }
    }
}

impl Scenario {
    pub fn new(settings: Vec<usize>, outcomes: Vec<usize>) -> Result<Self> {
        if settings.is_empty() {
            return Err(BehaviorError::InvalidScenario("at least one party required".into()));
        }
        if settings.len() != outcomes.len() {
            return Err(BehaviorError::InvalidScenario("settings and outcomes lengths differ".into()));
        }
        if settings.iter().chain(&outcomes).any(|&c| c == 0) {
            return Err(BehaviorError::InvalidScenario("all counts must be at least 1".into()));
        }
        Ok(Scenario { settings, outcomes })
    }

    /// Three parties, two binary settings each.
    pub fn tripartite_binary() -> Self {
        Scenario { settings: vec![2, 2, 2], outcomes: vec![2, 2, 2] }
    }

    /// Two parties, two binary settings each.
    pub fn bipartite_binary() -> Self {
        Scenario { settings: vec![2, 2], outcomes: vec![2, 2] }
    }

    /// Bob has three settings with four outcomes each.
    pub fn rabello() -> Self {
        Scenario { settings: vec![2, 3, 2], outcomes: vec![2, 4, 2] }
    }

    pub fn parties(&self) -> usize {
        self.settings.len()
    }

    pub fn settings(&self) -> &[usize] {
        &self.settings
    }

    pub fn outcomes(&self) -> &[usize] {
        &self.outcomes
    }

    pub fn n_setting_tuples(&self) -> usize {
        self.settings.iter().product()
    }

    pub fn n_outcome_tuples(&self) -> usize {
        self.outcomes.iter().product()
    }

    pub fn len(&self) -> usize {
        self.n_setting_tuples() * self.n_outcome_tuples()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn setting_index(&self, settings: &[usize]) -> usize {
        mixed_index(settings, &self.settings)
    }

    pub fn outcome_index(&self, outcomes: &[usize]) -> usize {
        mixed_index(outcomes, &self.outcomes)
    }

    pub fn setting_tuple(&self, idx: usize) -> Vec<usize> {
        mixed_digits(idx, &self.settings)
    }

    pub fn outcome_tuple(&self, idx: usize) -> Vec<usize> {
        mixed_digits(idx, &self.outcomes)
    }

    pub fn setting_tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.n_setting_tuples()).map(|i| self.setting_tuple(i))
    }

    pub fn outcome_tuples(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.n_outcome_tuples()).map(|i| self.outcome_tuple(i))
    }

    pub fn index(&self, outcomes: &[usize], settings: &[usize]) -> usize {
        self.setting_index(settings) * self.n_outcome_tuples() + self.outcome_index(outcomes)
    }

    /// Scenario restricted to `keep`, in the given order.
    pub fn restrict(&self, keep: &[usize]) -> Scenario {
        Scenario {
            settings: keep.iter().map(|&p| self.settings[p]).collect(),
            outcomes: keep.iter().map(|&p| self.outcomes[p]).collect(),
        }
    }

    fn check_party(&self, party: usize) -> Result<()> {
        if party >= self.parties() {
            Err(BehaviorError::PartyOutOfRange(party))
        } else {
            Ok(())
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{:?},{:?})", self.parties(), self.settings, self.outcomes)
    }
}

pub(crate) fn mixed_index(digits: &[usize], radices: &[usize]) -> usize {
    debug_assert_eq!(digits.len(), radices.len());
    digits.iter().zip(radices).rev().fold(0, |acc, (&d, &r)| {
        debug_assert!(d < r);
        acc * r + d
    })
}

pub(crate) fn mixed_digits(mut idx: usize, radices: &[usize]) -> Vec<usize> {
    radices
        .iter()
        .map(|&r| {
            let d = idx % r;
            idx /= r;
            d
        })
        .collect()
}

/// Sum of scalars in the given backend.
pub(crate) fn sum_scalars<'a>(backend: Backend, xs: impl IntoIterator<Item = &'a Scalar>) -> Scalar {
    xs.into_iter().fold(Scalar::zero(backend), |acc, x| acc + x)
}

fn approx_eq(a: &Scalar, b: &Scalar) -> bool {
    a.approx_eq(b, FLOAT_EPS)
}

/// Settings-conditional outcome distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior {
    scenario: Scenario,
    backend: Backend,
    entries: Vec<Scalar>,
}

/// Result of [`Behavior::validate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub nonnegative: bool,
    pub normalized: bool,
    /// Most negative entry, or zero.
    pub worst_negative: Scalar,
    /// Largest `|Σ_outcomes P − 1|` over setting tuples.
    pub worst_normalization: Scalar,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoSignalingViolation {
    /// Parties whose outcomes were summed out.
    pub summed_out: Vec<usize>,
    pub settings: Vec<usize>,
}

/// Result of [`Behavior::no_signaling_check`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NoSignalingReport {
    pub passed: bool,
    pub worst_residual: Scalar,
    pub worst: Option<NoSignalingViolation>,
    pub tolerance: f64,
}

/// Behavior of the other parties given one party's setting and outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalBehavior {
    pub behavior: Behavior,
    /// `(party, setting, outcome)` in the parent's indexing.
    pub event: (usize, usize, usize),
    pub event_probability: Scalar,
    /// Parent party indices of the remaining parties.
    pub remaining: Vec<usize>,
}

impl Behavior {
    pub fn new(scenario: Scenario, entries: Vec<Scalar>) -> Result<Self> {
        if entries.len() != scenario.len() {
            return Err(BehaviorError::DimensionMismatch { expected: scenario.len(), found: entries.len() });
        }
        let backend = entries[0].backend();
        if entries.iter().any(|e| e.backend() != backend) {
            return Err(BehaviorError::MixedBackend);
        }
        Ok(Behavior { scenario, backend, entries })
    }

    /// Builds `P(o|s) = f(o, s)`. All values must share one backend.
    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(&[usize], &[usize]) -> Scalar) -> Result<Self> {
        let mut entries = Vec::with_capacity(scenario.len());
        for s in scenario.setting_tuples() {
            for o in scenario.outcome_tuples() {
                entries.push(f(&o, &s));
            }
        }
        Behavior::new(scenario, entries)
    }

    pub fn uniform(scenario: Scenario, backend: Backend) -> Self {
        let n = scenario.n_outcome_tuples() as i64;
        let v = Scalar::from_ratio(1, n, backend);
        let entries = vec![v; scenario.len()];
        Behavior { scenario, backend, entries }
    }

    /// Deterministic behavior: party `p` on setting `s` outputs `maps[p][s]`.
    pub fn deterministic(scenario: Scenario, maps: &[Vec<usize>], backend: Backend) -> Result<Self> {
        if maps.len() != scenario.parties() {
            return Err(BehaviorError::InvalidScenario("one outcome map per party required".into()));
        }
        for (p, m) in maps.iter().enumerate() {
            if m.len() != scenario.settings[p] {
                return Err(BehaviorError::SettingOutOfRange { party: p, setting: m.len() });
            }
            if let Some(&o) = m.iter().find(|&&o| o >= scenario.outcomes[p]) {
                return Err(BehaviorError::OutcomeOutOfRange { party: p, outcome: o });
            }
        }
        Behavior::from_fn(scenario, |o, s| {
            let hit = o.iter().zip(s).enumerate().all(|(p, (&op, &sp))| maps[p][sp] == op);
            Scalar::from_ratio(hit as i64, 1, backend)
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Scalar> {
        self.entries
    }

    pub fn get(&self, outcomes: &[usize], settings: &[usize]) -> &Scalar {
        &self.entries[self.scenario.index(outcomes, settings)]
    }

    /// Entries for one setting tuple, indexed by outcome tuple.
    pub fn block(&self, settings: &[usize]) -> &[Scalar] {
        let n = self.scenario.n_outcome_tuples();
        let start = self.scenario.setting_index(settings) * n;
        &self.entries[start..start + n]
    }

    /// Converts exact entries to floats; float to exact is refused.
    pub fn to_backend(&self, backend: Backend) -> Result<Behavior> {
        let entries = self
            .entries
            .iter()
            .map(|e| e.to_backend(backend))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| BehaviorError::Invalid("cannot convert float entries to exact".into()))?;
        Behavior::new(self.scenario.clone(), entries)
    }

    /// Probability that `pred(outcomes)` holds on setting tuple `settings`.
    pub fn event_probability(&self, settings: &[usize], pred: impl Fn(&[usize]) -> bool) -> Scalar {
        let mut acc = Scalar::zero(self.backend);
        for (i, p) in self.block(settings).iter().enumerate() {
            if pred(&self.scenario.outcome_tuple(i)) {
                acc += p;
            }
        }
        acc
    }

    pub fn validate(&self) -> ValidationReport {
        let zero = Scalar::zero(self.backend);
        let one = Scalar::one(self.backend);
        let mut worst_negative = zero.clone();
        for e in &self.entries {
            if *e < worst_negative {
                worst_negative = e.clone();
            }
        }
        let mut worst_normalization = zero.clone();
        let n = self.scenario.n_outcome_tuples();
        for chunk in self.entries.chunks(n) {
            let r = (sum_scalars(self.backend, chunk) - &one).abs();
            worst_normalization = worst_normalization.max(r);
        }
        let nonnegative = worst_negative.sign_within(FLOAT_EPS) != std::cmp::Ordering::Less;
        let normalized = worst_normalization.is_zero_within(FLOAT_EPS);
        ValidationReport {
            passed: nonnegative && normalized,
            nonnegative,
            normalized,
            worst_negative,
            worst_normalization,
            tolerance: self.tolerance(),
        }
    }

    fn tolerance(&self) -> f64 {
        match self.backend {
            Backend::Exact => 0.0,
            Backend::Float => FLOAT_EPS,
        }
    }

    /// Marginal over `keep` on setting tuple `settings`, indexed by the kept
    /// outcome tuple (first kept party fastest).
    pub fn marginal_block(&self, keep: &[usize], settings: &[usize]) -> Vec<Scalar> {
        let radices: Vec<usize> = keep.iter().map(|&p| self.scenario.outcomes[p]).collect();
        let mut out = vec![Scalar::zero(self.backend); radices.iter().product()];
        for (i, p) in self.block(settings).iter().enumerate() {
            let o = self.scenario.outcome_tuple(i);
            let k: Vec<usize> = keep.iter().map(|&q| o[q]).collect();
            out[mixed_index(&k, &radices)] += p;
        }
        out
    }

    /// Worst deviation of the `keep` marginal across settings of the other parties.
    fn marginal_residual(&self, keep: &[usize]) -> (Scalar, Option<Vec<usize>>) {
        let mut worst = Scalar::zero(self.backend);
        let mut at = None;
        for s in self.scenario.setting_tuples() {
            let mut reference = s.clone();
            for (p, r) in reference.iter_mut().enumerate() {
                if !keep.contains(&p) {
                    *r = 0;
                }
            }
            if reference == s {
                continue;
            }
            let a = self.marginal_block(keep, &s);
            let b = self.marginal_block(keep, &reference);
            for (x, y) in a.iter().zip(&b) {
                let d = (x - y).abs();
                if d > worst {
                    worst = d;
                    at = Some(s.clone());
                }
            }
        }
        (worst, at)
    }

    /// Checks that every marginal is independent of the settings of the
    /// parties summed out, for every nonempty proper subset of parties.
    pub fn no_signaling_check(&self) -> NoSignalingReport {
        let n = self.scenario.parties();
        let mut worst = Scalar::zero(self.backend);
        let mut violation = None;
        for mask in 1..(1usize << n) - 1 {
            let keep: Vec<usize> = (0..n).filter(|p| mask & (1 << p) == 0).collect();
            let (r, at) = self.marginal_residual(&keep);
            if r > worst {
                worst = r;
                violation = at.map(|settings| NoSignalingViolation {
                    summed_out: (0..n).filter(|p| mask & (1 << p) != 0).collect(),
                    settings,
                });
            }
        }
        NoSignalingReport {
            passed: worst.is_zero_within(FLOAT_EPS),
            worst_residual: worst,
            worst: violation,
            tolerance: self.tolerance(),
        }
    }

    /// Marginal behavior of the parties in `keep` (distinct, any order).
    ///
    /// Fails if that marginal depends on the settings of the dropped parties.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Behavior> {
        self.check_distinct(keep)?;
        if keep.is_empty() {
            return Err(BehaviorError::InvalidScenario("must keep at least one party".into()));
        }
        let (r, _) = self.marginal_residual(keep);
        if !r.is_zero_within(FLOAT_EPS) {
            return Err(BehaviorError::Signaling(format!("marginal over {keep:?} depends on dropped settings (residual {r})")));
        }
        let sub = self.scenario.restrict(keep);
        let mut entries = Vec::with_capacity(sub.len());
        for s in sub.setting_tuples() {
            let mut full = vec![0; self.scenario.parties()];
            for (i, &p) in keep.iter().enumerate() {
                full[p] = s[i];
            }
            entries.extend(self.marginal_block(keep, &full));
        }
        Behavior::new(sub, entries)
    }

    fn check_distinct(&self, parties: &[usize]) -> Result<()> {
        for (i, &p) in parties.iter().enumerate() {
            self.scenario.check_party(p)?;
            if parties[..i].contains(&p) {
                return Err(BehaviorError::InvalidScenario(format!("party {p} listed twice")));
            }
        }
        Ok(())
    }

    /// Conditions on `party` obtaining `outcome` with `setting`.
    pub fn condition(&self, party: usize, setting: usize, outcome: usize) -> Result<ConditionalBehavior> {
        self.scenario.check_party(party)?;
        if setting >= self.scenario.settings[party] {
            return Err(BehaviorError::SettingOutOfRange { party, setting });
        }
        if outcome >= self.scenario.outcomes[party] {
            return Err(BehaviorError::OutcomeOutOfRange { party, outcome });
        }
        if self.scenario.parties() == 1 {
            return Err(BehaviorError::InvalidScenario("cannot condition a single-party behavior".into()));
        }
        let remaining: Vec<usize> = (0..self.scenario.parties()).filter(|&p| p != party).collect();
        let sub = self.scenario.restrict(&remaining);
        let mut event_probability: Option<Scalar> = None;
        let mut entries = Vec::with_capacity(sub.len());
        for s in sub.setting_tuples() {
            let full = insert_at(&s, party, setting);
            let pe = self.event_probability(&full, |o| o[party] == outcome);
            match &event_probability {
                None => {
                    if pe.is_zero_within(FLOAT_EPS) {
                        return Err(BehaviorError::ZeroProbabilityEvent);
                    }
                    event_probability = Some(pe.clone());
                }
                Some(e) if !approx_eq(e, &pe) => {
                    return Err(BehaviorError::Signaling(format!(
                        "event probability varies with other settings ({e} vs {pe})"
                    )));
                }
                Some(_) => {}
            }
            for o in sub.outcome_tuples() {
                let fo = insert_at(&o, party, outcome);
                entries.push(self.get(&fo, &full) / &pe);
            }
        }
        Ok(ConditionalBehavior {
            behavior: Behavior::new(sub, entries)?,
            event: (party, setting, outcome),
            event_probability: event_probability.expect("at least one setting tuple"),
            remaining,
        })
    }
}

pub(crate) fn insert_at(xs: &[usize], pos: usize, v: usize) -> Vec<usize> {
    let mut out = xs.to_vec();
    out.insert(pos, v);
    out
}

/// Entrywise convex combination `Σ w_i B_i`.
pub fn mix(components: &[(Scalar, Behavior)]) -> Result<Behavior> {
    let (_, first) = components.first().ok_or_else(|| BehaviorError::InvalidWeights("empty mixture".into()))?;
    let backend = if components.iter().all(|(w, b)| w.is_exact() && b.backend == Backend::Exact) {
        Backend::Exact
    } else {
        Backend::Float
    };
    let mut total = Scalar::zero(backend);
    for (w, b) in components {
        if b.scenario != first.scenario {
            return Err(BehaviorError::ScenarioMismatch(format!("{} vs {}", b.scenario, first.scenario)));
        }
        if w.sign_within(FLOAT_EPS) == std::cmp::Ordering::Less {
            return Err(BehaviorError::InvalidWeights(format!("negative weight {w}")));
        }
        total += w;
    }
    if !approx_eq(&total, &Scalar::one(backend)) {
        return Err(BehaviorError::InvalidWeights(format!("weights sum to {total}")));
    }
    let mut entries = vec![Scalar::zero(backend); first.entries.len()];
    for (w, b) in components {
        for (acc, e) in entries.iter_mut().zip(&b.entries) {
            *acc += w * e;
        }
    }
    Behavior::new(first.scenario.clone(), entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::QSqrt2;

    fn q(n: i64, d: i64) -> Scalar {
        Scalar::from_ratio(n, d, Backend::Exact)
    }

    #[test]
    fn index_order_party0_fastest() {
        let s = Scenario::tripartite_binary();
        assert_eq!(s.outcome_index(&[1, 0, 0]), 1);
        assert_eq!(s.outcome_index(&[0, 1, 0]), 2);
        assert_eq!(s.index(&[0, 0, 0], &[1, 0, 0]), 8);
        assert_eq!(s.setting_tuple(5), vec![1, 0, 1]);
        let r = Scenario::rabello();
        assert_eq!(r.len(), 12 * 16);
        for i in 0..r.n_setting_tuples() {
            assert_eq!(r.setting_index(&r.setting_tuple(i)), i);
        }
    }

    #[test]
    fn scenario_rejects_zero_counts() {
        assert!(Scenario::new(vec![2, 0], vec![2, 2]).is_err());
        assert!(Scenario::new(vec![], vec![]).is_err());
    }

    #[test]
    fn uniform_validates() {
        let b = Behavior::uniform(Scenario::tripartite_binary(), Backend::Exact);
        assert!(b.validate().passed);
        assert!(b.no_signaling_check().passed);
    }

    #[test]
    fn negative_entry_fails_validation() {
        let mut e = Behavior::uniform(Scenario::tripartite_binary(), Backend::Exact).into_entries();
        e[0] = q(-1, 8);
        e[1] = q(3, 8);
        let b = Behavior::new(Scenario::tripartite_binary(), e).unwrap();
        let r = b.validate();
        assert!(!r.passed && !r.nonnegative && r.normalized);
        assert_eq!(r.worst_negative, q(-1, 8));
    }

    #[test]
    fn dimension_mismatch() {
        let e = vec![q(1, 2); 3];
        assert!(matches!(
            Behavior::new(Scenario::bipartite_binary(), e),
            Err(BehaviorError::DimensionMismatch { expected: 16, found: 3 })
        ));
    }

    #[test]
    fn bob_copying_alice_setting_signals() {
        let b = Behavior::from_fn(Scenario::tripartite_binary(), |o, s| {
            if o[1] == s[0] {
                q(1, 4)
            } else {
                q(0, 1)
            }
        })
        .unwrap();
        assert!(b.validate().passed);
        let r = b.no_signaling_check();
        assert!(!r.passed);
        assert_eq!(r.worst_residual, q(1, 1));
        assert!(b.marginalize(&[1]).is_err());
        assert!(b.marginalize(&[0, 2]).is_ok());
    }

    #[test]
    fn condition_uniform() {
        let b = Behavior::uniform(Scenario::rabello(), Backend::Exact);
        let c = b.condition(1, 2, 3).unwrap();
        assert_eq!(c.event_probability, q(1, 4));
        assert_eq!(c.behavior, Behavior::uniform(Scenario::bipartite_binary(), Backend::Exact));
        assert_eq!(c.remaining, vec![0, 2]);
    }

    #[test]
    fn condition_zero_event_is_error() {
        let b = Behavior::deterministic(Scenario::tripartite_binary(), &[vec![0, 0], vec![0, 0], vec![0, 0]], Backend::Exact)
            .unwrap();
        assert_eq!(b.condition(1, 1, 1).unwrap_err(), BehaviorError::ZeroProbabilityEvent);
    }

    #[test]
    fn mix_half_half() {
        let s = Scenario::bipartite_binary();
        let d0 = Behavior::deterministic(s.clone(), &[vec![0, 0], vec![0, 0]], Backend::Exact).unwrap();
        let d1 = Behavior::deterministic(s.clone(), &[vec![1, 1], vec![1, 1]], Backend::Exact).unwrap();
        let m = mix(&[(q(1, 2), d0.clone()), (q(1, 2), d1)]).unwrap();
        assert_eq!(*m.get(&[0, 0], &[1, 0]), q(1, 2));
        assert_eq!(*m.get(&[1, 1], &[0, 1]), q(1, 2));
        assert_eq!(*m.get(&[0, 1], &[0, 0]), q(0, 1));
        assert_eq!(mix(&[(q(1, 1), d0.clone())]).unwrap(), d0);
        assert!(mix(&[(q(1, 2), d0.clone())]).is_err());
        assert!(mix(&[(q(1, 1), d0), (q(0, 1), Behavior::uniform(Scenario::tripartite_binary(), Backend::Exact))]).is_err());
    }

    #[test]
    fn float_backend_tolerates_rounding() {
        let s = Scenario::bipartite_binary();
        let b = Behavior::from_fn(s, |_, _| Scalar::Float(0.25 + 1e-14)).unwrap();
        assert!(b.validate().passed);
        let exact = Behavior::uniform(Scenario::bipartite_binary(), Backend::Exact);
        let f = exact.to_backend(Backend::Float).unwrap();
        assert_eq!(f.backend(), Backend::Float);
        assert!(f.to_backend(Backend::Exact).is_err());
    }

    #[test]
    fn marginalize_reorders() {
        let b = Behavior::from_fn(Scenario::new(vec![1, 1], vec![2, 3]).unwrap(), |o, _| {
            Scalar::exact(QSqrt2::from_int((o[0] * 3 + o[1]) as i64)) / q(15, 1)
        })
        .unwrap();
        let m = b.marginalize(&[1]).unwrap();
        assert_eq!(m.entries(), &[q(3, 15), q(5, 15), q(7, 15)]);
        let swapped = b.marginalize(&[1, 0]).unwrap();
        assert_eq!(*swapped.get(&[2, 1], &[0, 0]), *b.get(&[1, 2], &[0, 0]));
    }
}
