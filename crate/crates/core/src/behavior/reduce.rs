//! Scenario reductions: removing a one-setting party through shared
//! randomness, and adding a trivial setting.

use super::{insert_at, mix, Behavior, BehaviorError, Result, Scenario};
use crate::scalar::{Scalar, FLOAT_EPS};

/// A one-setting party replaced by a shared classical variable `Λ`.
///
/// Branch `(a, w, P)` says: with probability `w` the party reports `a` and
/// the others follow `P`.
#[derive(Clone, Debug, PartialEq)]
pub struct SharedLambda {
    pub party: usize,
    pub n_outcomes: usize,
    pub branches: Vec<(usize, Scalar, Behavior)>,
}

/// Splits `b` into `P(A = a)` and the conditionals `P(rest | A = a)` for the
/// one-setting `party`. Zero-weight outcomes are omitted.
pub fn drop_single_setting_party(b: &Behavior, party: usize) -> Result<SharedLambda> {
    let scen = b.scenario();
    if party >= scen.parties() {
        return Err(BehaviorError::PartyOutOfRange(party));
    }
    if scen.settings()[party] != 1 {
        return Err(BehaviorError::NotSingleSetting { party, settings: scen.settings()[party] });
    }
    let marginal = b.marginalize(&[party])?;
    let mut branches = Vec::new();
    for (a, w) in marginal.block(&[0]).iter().enumerate() {
        if w.is_zero_within(FLOAT_EPS) {
            continue;
        }
        let c = b.condition(party, 0, a)?;
        branches.push((a, w.clone(), c.behavior));
    }
    Ok(SharedLambda { party, n_outcomes: scen.outcomes()[party], branches })
}

/// Rebuilds the full behavior from a [`SharedLambda`] decomposition.
pub fn simulate_with_shared_lambda(sl: &SharedLambda) -> Result<Behavior> {
    let (_, _, first) = sl.branches.first().ok_or_else(|| BehaviorError::InvalidWeights("no branches".into()))?;
    if let Some(&(a, _, _)) = sl.branches.iter().find(|(a, _, _)| *a >= sl.n_outcomes) {
        return Err(BehaviorError::OutcomeOutOfRange { party: sl.party, outcome: a });
    }
    let rest = first.scenario();
    if sl.party > rest.parties() {
        return Err(BehaviorError::PartyOutOfRange(sl.party));
    }
    // Weight and scenario validation.
    mix(&sl.branches.iter().map(|(_, w, p)| (w.clone(), p.clone())).collect::<Vec<_>>())?;
    let scen = Scenario::new(insert_at(rest.settings(), sl.party, 1), insert_at(rest.outcomes(), sl.party, sl.n_outcomes))?;
    let backend = if sl.branches.iter().all(|(_, w, p)| w.is_exact() && p.backend() == crate::scalar::Backend::Exact) {
        crate::scalar::Backend::Exact
    } else {
        crate::scalar::Backend::Float
    };
    Behavior::from_fn(scen, |o, s| {
        let mut o_rest = o.to_vec();
        let a = o_rest.remove(sl.party);
        let mut s_rest = s.to_vec();
        s_rest.remove(sl.party);
        let mut acc = Scalar::zero(backend);
        for (ai, w, p) in &sl.branches {
            if *ai == a {
                acc += w * p.get(&o_rest, &s_rest);
            }
        }
        acc
    })
}

/// Adds a new last setting to `party` whose only possible outcome is `0`.
///
/// On the new setting the other parties follow their marginal, which equals
/// their behavior given `source_setting`.
pub fn add_single_outcome_setting(b: &Behavior, party: usize, source_setting: usize) -> Result<Behavior> {
    let scen = b.scenario();
    if party >= scen.parties() {
        return Err(BehaviorError::PartyOutOfRange(party));
    }
    let m = scen.settings()[party];
    if source_setting >= m {
        return Err(BehaviorError::SettingOutOfRange { party, setting: source_setting });
    }
    let ns = b.no_signaling_check();
    if !ns.passed {
        return Err(BehaviorError::Signaling(format!("residual {}", ns.worst_residual)));
    }
    let mut settings = scen.settings().to_vec();
    settings[party] += 1;
    let ext = Scenario::new(settings, scen.outcomes().to_vec())?;
    let backend = b.backend();
    Behavior::from_fn(ext, |o, s| {
        if s[party] < m {
            return b.get(o, s).clone();
        }
        if o[party] != 0 {
            return Scalar::zero(backend);
        }
        let mut src = s.to_vec();
        src[party] = source_setting;
        let mut acc = Scalar::zero(backend);
        for a in 0..scen.outcomes()[party] {
            let mut oo = o.to_vec();
            oo[party] = a;
            acc += b.get(&oo, &src);
        }
        acc
    })
}
