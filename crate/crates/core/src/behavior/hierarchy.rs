//! The decidable part of the class hierarchy for one behavior.

use serde::Serialize;

use super::{max_chsh_variant, Behavior, BehaviorError, Result, Scenario};
use crate::optim::{is_local, LocalityVerdict};
use crate::scalar::{Backend, Scalar};

/// Classes this tool does not decide.
pub const UNDECIDED_CLASSES: [&str; 4] = ["QB2", "Q2", "NS2", "GPT2"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionalChsh {
    /// `(party, setting, outcome)`; `None` for an unconditioned two-party table.
    pub event: Option<(usize, usize, usize)>,
    pub event_probability: Scalar,
    /// `(α, β, γ)` of the best relabeling.
    pub variant: (usize, usize, usize),
    pub value: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Landmarks {
    pub exceeds_local_bound: bool,
    pub exceeds_quantum_bound: bool,
    pub reaches_nonsignaling_bound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LocalitySummary {
    pub local: bool,
    pub certificate_verified: bool,
    pub vertices: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HierarchyReport {
    pub no_signaling: bool,
    /// `None` in float mode, where the LP is not run.
    pub locality: Option<LocalitySummary>,
    pub best_conditional_chsh: Option<ConditionalChsh>,
    pub landmarks: Option<Landmarks>,
    pub undecided: Vec<String>,
}

fn candidates(b: &Behavior) -> Vec<ConditionalChsh> {
    let sc = b.scenario();
    let mut out = Vec::new();
    if *sc == Scenario::bipartite_binary() {
        if let Ok((value, variant)) = max_chsh_variant(b) {
            out.push(ConditionalChsh { event: None, event_probability: Scalar::one(b.backend()), variant, value });
        }
        return out;
    }
    for p in 0..sc.parties() {
        let rest: Vec<usize> = (0..sc.parties()).filter(|&q| q != p).collect();
        if sc.restrict(&rest) != Scenario::bipartite_binary() {
            continue;
        }
        for s in 0..sc.settings()[p] {
            for o in 0..sc.outcomes()[p] {
                let Ok(c) = b.condition(p, s, o) else { continue };
                let (value, variant) = max_chsh_variant(&c.behavior).expect("bipartite binary");
                out.push(ConditionalChsh { event: Some((p, s, o)), event_probability: c.event_probability, variant, value });
            }
        }
    }
    out
}

/// No-signaling verdict, local-polytope membership (exact mode only) and the
/// best CHSH value over single-party conditioning events.
pub fn hierarchy_report(b: &Behavior) -> Result<HierarchyReport> {
    let v = b.validate();
    if !v.passed {
        return Err(BehaviorError::Invalid(format!("{v:?}")));
    }
    let no_signaling = b.no_signaling_check().passed;
    let locality = match b.backend() {
        Backend::Exact => {
            let LocalityVerdict { local, certificate_verified, vertices, .. } =
                is_local(b).map_err(|e| BehaviorError::Invalid(e.to_string()))?;
            Some(LocalitySummary { local, certificate_verified, vertices })
        }
        Backend::Float => None,
    };
    let best = if no_signaling {
        candidates(b).into_iter().reduce(|best, c| if c.value > best.value { c } else { best })
    } else {
        None
    };
    let landmarks = best.as_ref().map(|c| {
        let bk = b.backend();
        let eps = crate::scalar::FLOAT_EPS;
        let above = |t: Scalar| (c.value.clone() - t).sign_within(eps) == std::cmp::Ordering::Greater;
        Landmarks {
            exceeds_local_bound: above(Scalar::from_ratio(2, 1, bk)),
            exceeds_quantum_bound: above(Scalar::from_ratio(2, 1, bk) * Scalar::sqrt2(bk)),
            reaches_nonsignaling_bound: c.value.approx_eq(&Scalar::from_ratio(4, 1, bk), eps),
        }
    });
    Ok(HierarchyReport {
        no_signaling,
        locality,
        best_conditional_chsh: best,
        landmarks,
        undecided: UNDECIDED_CLASSES.iter().map(|c| format!("{c}: not decided by this tool")).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::QSqrt2;
    use crate::targets::{pr_box, theorem1_behavior, theorem2_behavior};

    #[test]
    fn theorem1_is_nonlocal_at_tsirelson() {
        let r = hierarchy_report(&theorem1_behavior()).unwrap();
        assert!(r.no_signaling);
        assert!(!r.locality.unwrap().local);
        let best = r.best_conditional_chsh.unwrap();
        assert_eq!(best.value, Scalar::exact(QSqrt2::from_parts(0, 1, 2, 1)));
        let l = r.landmarks.unwrap();
        assert!(l.exceeds_local_bound && !l.exceeds_quantum_bound);
    }

    #[test]
    fn theorem2_reaches_four() {
        let r = hierarchy_report(&theorem2_behavior()).unwrap();
        assert!(!r.locality.unwrap().local);
        assert_eq!(r.best_conditional_chsh.unwrap().value, Scalar::from_ratio(4, 1, Backend::Exact));
        assert!(r.landmarks.unwrap().reaches_nonsignaling_bound);
    }

    #[test]
    fn uniform_is_local() {
        let r = hierarchy_report(&Behavior::uniform(Scenario::tripartite_binary(), Backend::Exact)).unwrap();
        assert!(r.locality.unwrap().local);
        assert_eq!(r.undecided.len(), 4);
        assert!(!r.landmarks.unwrap().exceeds_local_bound);
    }

    #[test]
    fn bipartite_table_scored_directly() {
        let r = hierarchy_report(&pr_box()).unwrap();
        let best = r.best_conditional_chsh.unwrap();
        assert_eq!(best.event, None);
        assert_eq!(best.value, Scalar::from_ratio(4, 1, Backend::Exact));
    }
}
