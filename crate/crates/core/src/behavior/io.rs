//! JSON and CSV forms of behaviors.

use serde::{Deserialize, Serialize};

use super::{Behavior, BehaviorError, Result, Scenario};
use crate::scalar::{Backend, Scalar};

/// On-disk layout; `entries` is the flat table in canonical order.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BehaviorJson {
    pub scenario: Scenario,
    pub backend: Backend,
    pub entries: Vec<Scalar>,
}

impl From<&Behavior> for BehaviorJson {
    fn from(b: &Behavior) -> Self {
        BehaviorJson { scenario: b.scenario().clone(), backend: b.backend(), entries: b.entries().to_vec() }
    }
}

impl TryFrom<BehaviorJson> for Behavior {
    type Error = BehaviorError;
    fn try_from(j: BehaviorJson) -> Result<Behavior> {
        if let Some(i) = j.entries.iter().position(|e| e.backend() != j.backend) {
            return Err(BehaviorError::Invalid(format!(
                "entries[{i}] is {} but backend is {}",
                j.entries[i].backend(),
                j.backend
            )));
        }
        if j.entries.is_empty() {
            return Err(BehaviorError::DimensionMismatch { expected: j.scenario.len(), found: 0 });
        }
        Behavior::new(j.scenario, j.entries)
    }
}

pub fn behavior_to_json(b: &Behavior) -> String {
    serde_json::to_string_pretty(&BehaviorJson::from(b)).expect("behavior serializes")
}

/// Parses and dimension-checks a behavior document. Errors carry serde's
/// line/column diagnostics.
pub fn behavior_from_json(text: &str) -> Result<Behavior> {
    let j: BehaviorJson = serde_json::from_str(text).map_err(|e| BehaviorError::Invalid(format!("schema: {e}")))?;
    Behavior::try_from(j)
}

/// Full table: one row per (settings, outcomes).
pub fn table_csv(b: &Behavior) -> String {
    let scen = b.scenario();
    let n = scen.parties();
    let mut out = String::new();
    let head: Vec<String> = (0..n).map(|p| format!("s{p}")).chain((0..n).map(|p| format!("o{p}"))).collect();
    out.push_str(&head.join(","));
    out.push_str(",p\n");
    for s in scen.setting_tuples() {
        for o in scen.outcome_tuples() {
            let cells: Vec<String> = s.iter().chain(&o).map(|v| v.to_string()).collect();
            out.push_str(&format!("{},{}\n", cells.join(","), b.get(&o, &s)));
        }
    }
    out
}

/// Single-party marginals `P(o_p | s)` for every full setting tuple.
pub fn marginals_csv(b: &Behavior) -> String {
    let scen = b.scenario();
    let mut out = String::from("party,settings,outcome,p\n");
    for s in scen.setting_tuples() {
        let tag: Vec<String> = s.iter().map(|v| v.to_string()).collect();
        for p in 0..scen.parties() {
            for (o, v) in b.marginal_block(&[p], &s).iter().enumerate() {
                out.push_str(&format!("{p},{},{o},{v}\n", tag.join(" ")));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_exact_and_float() {
        let b = Behavior::uniform(Scenario::bipartite_binary(), Backend::Exact);
        let text = behavior_to_json(&b);
        assert!(text.contains("\"1/4\""));
        assert_eq!(behavior_from_json(&text).unwrap(), b);
        let f = b.to_backend(Backend::Float).unwrap();
        assert_eq!(behavior_from_json(&behavior_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn schema_errors() {
        assert!(behavior_from_json("{").is_err());
        let bad = r#"{"scenario":{"parties":2,"settings":[2,2],"outcomes":[2,2]},"backend":"exact","entries":["1/4"]}"#;
        assert!(matches!(behavior_from_json(bad), Err(BehaviorError::DimensionMismatch { .. })));
        let mixed = r#"{"scenario":{"parties":1,"settings":[1],"outcomes":[2]},"backend":"exact","entries":["1/2",0.5]}"#;
        assert!(behavior_from_json(mixed).is_err());
        let parties = r#"{"scenario":{"parties":3,"settings":[1],"outcomes":[2]},"backend":"exact","entries":["1/2","1/2"]}"#;
        assert!(behavior_from_json(parties).is_err());
    }

    #[test]
    fn csv_shapes() {
        let b = Behavior::uniform(Scenario::bipartite_binary(), Backend::Exact);
        let t = table_csv(&b);
        assert_eq!(t.lines().count(), 17);
        assert!(t.starts_with("s0,s1,o0,o1,p\n0,0,0,0,1/4"));
        let m = marginals_csv(&b);
        assert_eq!(m.lines().count(), 1 + 4 * 2 * 2);
    }
}
