//! Wirings of PR boxes and shared random bits.
//!
//! Each box, given inputs `(x, y)`, outputs `(r, r ⊕ xy)` with `r` uniform.
//! Box inputs and party outcomes are affine over GF(2) in the bits the
//! party has received, chosen per setting of the party.

pub mod fixtures;
pub mod sampler;
pub mod search;

pub use fixtures::{build_theorem2_network, build_theorem3_network, load_fixture, search_theorem2, search_theorem3, theorem2_family, theorem3_family, NetworkFixture};
pub use sampler::{chi_square, sample_counts, ChiSquare};
pub use search::{matches_target, search_wiring, FreeSlot, SearchOutcome, Side, Slot, WiringFamily};

use serde::{Deserialize, Serialize};

use crate::behavior::{Behavior, BehaviorError, Scenario};
use crate::scalar::{Backend, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetError {
    #[error("causality violation: {0}")]
    Causality(String),
    #[error("invalid network: {0}")]
    Invalid(String),
    #[error(transparent)]
    Behavior(#[from] BehaviorError),
}

pub type Result<T> = std::result::Result<T, NetError>;

/// A bit available to a party.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitRef {
    /// Shared random bit `k`.
    Shared(usize),
    /// The party's own output of box `j`.
    Box(usize),
}

/// `constant ⊕ ⨁ terms`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Affine {
    pub constant: u8,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<BitRef>,
}

impl Affine {
    pub fn constant(c: u8) -> Self {
        Affine { constant: c, terms: vec![] }
    }

    pub fn bit(r: BitRef) -> Self {
        Affine { constant: 0, terms: vec![r] }
    }

    pub fn xor(terms: &[BitRef]) -> Self {
        Affine { constant: 0, terms: terms.to_vec() }
    }
}

/// One affine function per setting of the owning party.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputWire(pub Vec<Affine>);

impl InputWire {
    /// Input equal to the party's setting (binary settings).
    pub fn setting() -> Self {
        InputWire(vec![Affine::constant(0), Affine::constant(1)])
    }

    /// Per-setting constants.
    pub fn constants(cs: &[u8]) -> Self {
        InputWire(cs.iter().map(|&c| Affine::constant(c)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrBox {
    pub left: usize,
    pub right: usize,
    pub left_input: InputWire,
    pub right_input: InputWire,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxNetwork {
    pub scenario: Scenario,
    /// Holders of each shared bit.
    #[serde(default)]
    pub shared_bits: Vec<Vec<usize>>,
    /// Evaluation order.
    pub boxes: Vec<PrBox>,
    /// `outcomes[party][setting]`: outcome bits, most significant first.
    pub outcomes: Vec<Vec<Vec<Affine>>>,
}

fn outcome_bits(n: usize) -> Option<usize> {
    n.is_power_of_two().then(|| n.trailing_zeros() as usize)
}

impl BoxNetwork {
    /// Bits `party` may read before box `before` (all boxes when `None`).
    fn check_ref(&self, party: usize, r: BitRef, before: Option<usize>, what: &str) -> Result<()> {
        match r {
            BitRef::Shared(k) => {
                if !self.shared_bits.get(k).is_some_and(|h| h.contains(&party)) {
                    return Err(NetError::Causality(format!("{what}: party {party} does not hold shared bit {k}")));
                }
            }
            BitRef::Box(j) => {
                let b = self.boxes.get(j).ok_or_else(|| NetError::Invalid(format!("{what}: unknown box {j}")))?;
                if b.left != party && b.right != party {
                    return Err(NetError::Causality(format!("{what}: party {party} has no side of box {j}")));
                }
                if before.is_some_and(|i| j >= i) {
                    return Err(NetError::Causality(format!("{what}: box {j} is not earlier")));
                }
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.scenario.parties();
        for (k, h) in self.shared_bits.iter().enumerate() {
            if h.iter().any(|&p| p >= n) {
                return Err(NetError::Invalid(format!("shared bit {k} held by unknown party")));
            }
        }
        for (j, b) in self.boxes.iter().enumerate() {
            if b.left >= n || b.right >= n || b.left == b.right {
                return Err(NetError::Invalid(format!("box {j} sides ({}, {})", b.left, b.right)));
            }
            for (p, w, side) in [(b.left, &b.left_input, "left"), (b.right, &b.right_input, "right")] {
                if w.0.len() != self.scenario.settings()[p] {
                    return Err(NetError::Invalid(format!("box {j} {side} input needs one function per setting of party {p}")));
                }
                for f in &w.0 {
                    if f.constant > 1 {
                        return Err(NetError::Invalid(format!("box {j} {side} constant {}", f.constant)));
                    }
                    for &r in &f.terms {
                        self.check_ref(p, r, Some(j), &format!("box {j} {side} input"))?;
                    }
                }
            }
        }
        if self.outcomes.len() != n {
            return Err(NetError::Invalid("one outcome map per party required".into()));
        }
        for (p, maps) in self.outcomes.iter().enumerate() {
            let bits = outcome_bits(self.scenario.outcomes()[p])
                .ok_or_else(|| NetError::Invalid(format!("party {p} outcome count is not a power of two")))?;
            if maps.len() != self.scenario.settings()[p] {
                return Err(NetError::Invalid(format!("party {p} needs one outcome map per setting")));
            }
            for m in maps {
                if m.len() != bits {
                    return Err(NetError::Invalid(format!("party {p} outcome map needs {bits} bits")));
                }
                for f in m {
                    if f.constant > 1 {
                        return Err(NetError::Invalid(format!("party {p} outcome constant {}", f.constant)));
                    }
                    for &r in &f.terms {
                        self.check_ref(p, r, None, &format!("party {p} outcome"))?;
                    }
                }
            }
        }
        Ok(())
    }

    /// Number of uniform bits summed over: shared bits plus one per box.
    pub fn random_bits(&self) -> usize {
        self.shared_bits.len() + self.boxes.len()
    }

    pub(crate) fn read(&self, party: usize, r: BitRef, shared: &[u8], outs: &[(u8, u8)]) -> u8 {
        match r {
            BitRef::Shared(k) => shared[k],
            BitRef::Box(j) => {
                if self.boxes[j].left == party {
                    outs[j].0
                } else {
                    outs[j].1
                }
            }
        }
    }

    pub(crate) fn apply(&self, party: usize, f: &Affine, shared: &[u8], outs: &[(u8, u8)]) -> u8 {
        f.terms.iter().fold(f.constant, |acc, &r| acc ^ self.read(party, r, shared, outs))
    }

    /// Box inputs `(x, y)` of box `j` at `settings` given earlier outputs.
    pub(crate) fn box_inputs(&self, j: usize, settings: &[usize], shared: &[u8], outs: &[(u8, u8)]) -> (u8, u8) {
        let b = &self.boxes[j];
        (
            self.apply(b.left, &b.left_input.0[settings[b.left]], shared, outs),
            self.apply(b.right, &b.right_input.0[settings[b.right]], shared, outs),
        )
    }

    pub(crate) fn outcome_index(&self, settings: &[usize], shared: &[u8], outs: &[(u8, u8)]) -> usize {
        let mut o = Vec::with_capacity(self.outcomes.len());
        for (p, maps) in self.outcomes.iter().enumerate() {
            let v = maps[settings[p]].iter().fold(0usize, |acc, f| (acc << 1) | self.apply(p, f, shared, outs) as usize);
            o.push(v);
        }
        self.scenario.outcome_index(&o)
    }

    /// Counts over the `2^random_bits` equally likely internal outcomes.
    pub fn block_counts(&self, settings: &[usize]) -> Vec<u64> {
        let ns = self.shared_bits.len();
        let nb = self.boxes.len();
        let mut counts = vec![0u64; self.scenario.n_outcome_tuples()];
        let mut shared = vec![0u8; ns];
        let mut outs = vec![(0u8, 0u8); nb];
        for r in 0u64..(1u64 << (ns + nb)) {
            for (k, s) in shared.iter_mut().enumerate() {
                *s = ((r >> k) & 1) as u8;
            }
            for j in 0..nb {
                let (x, y) = self.box_inputs(j, settings, &shared, &outs);
                let a = ((r >> (ns + j)) & 1) as u8;
                outs[j] = (a, a ^ (x & y));
            }
            counts[self.outcome_index(settings, &shared, &outs)] += 1;
        }
        counts
    }

    pub fn block(&self, settings: &[usize]) -> Vec<Scalar> {
        let total = 1i64 << self.random_bits();
        self.block_counts(settings).into_iter().map(|c| Scalar::from_ratio(c as i64, total, Backend::Exact)).collect()
    }

    /// The same network with boxes in the order `order[0], order[1], …`.
    pub fn reorder_boxes(&self, order: &[usize]) -> Result<BoxNetwork> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != (0..self.boxes.len()).collect::<Vec<_>>() {
            return Err(NetError::Invalid("order is not a permutation of the boxes".into()));
        }
        let mut pos = vec![0; order.len()];
        for (new, &old) in order.iter().enumerate() {
            pos[old] = new;
        }
        let remap = |f: &Affine| Affine {
            constant: f.constant,
            terms: f.terms.iter().map(|r| if let BitRef::Box(j) = r { BitRef::Box(pos[*j]) } else { *r }).collect(),
        };
        let wire = |w: &InputWire| InputWire(w.0.iter().map(remap).collect());
        let net = BoxNetwork {
            scenario: self.scenario.clone(),
            shared_bits: self.shared_bits.clone(),
            boxes: order
                .iter()
                .map(|&j| {
                    let b = &self.boxes[j];
                    PrBox { left: b.left, right: b.right, left_input: wire(&b.left_input), right_input: wire(&b.right_input) }
                })
                .collect(),
            outcomes: self.outcomes.iter().map(|ms| ms.iter().map(|m| m.iter().map(remap).collect()).collect()).collect(),
        };
        net.validate()?;
        Ok(net)
    }
}

/// The exact behavior of a network, in dyadic rationals.
pub fn evaluate(net: &BoxNetwork) -> Result<Behavior> {
    net.validate()?;
    let mut entries = Vec::with_capacity(net.scenario.len());
    for s in net.scenario.setting_tuples() {
        entries.extend(net.block(&s));
    }
    Ok(Behavior::new(net.scenario.clone(), entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::pr_box;

    fn single_box() -> BoxNetwork {
        BoxNetwork {
            scenario: Scenario::bipartite_binary(),
            shared_bits: vec![],
            boxes: vec![PrBox { left: 0, right: 1, left_input: InputWire::setting(), right_input: InputWire::setting() }],
            outcomes: vec![vec![vec![Affine::bit(BitRef::Box(0))]; 2], vec![vec![Affine::bit(BitRef::Box(0))]; 2]],
        }
    }

    #[test]
    fn single_box_is_pr_table() {
        assert_eq!(evaluate(&single_box()).unwrap(), pr_box());
    }

    #[test]
    fn constant_outputs_are_deterministic() {
        let net = BoxNetwork {
            scenario: Scenario::bipartite_binary(),
            shared_bits: vec![],
            boxes: vec![],
            outcomes: vec![vec![vec![Affine::constant(1)]; 2], vec![vec![Affine::constant(0)], vec![Affine::constant(1)]]],
        };
        let b = evaluate(&net).unwrap();
        let det = Behavior::deterministic(Scenario::bipartite_binary(), &[vec![1, 1], vec![0, 1]], Backend::Exact).unwrap();
        assert_eq!(b, det);
    }

    #[test]
    fn shared_bit_equals_box_with_zero_inputs() {
        let read = |r| vec![vec![Affine::bit(r)]; 2];
        let with_bit = BoxNetwork {
            scenario: Scenario::bipartite_binary(),
            shared_bits: vec![vec![0, 1]],
            boxes: vec![],
            outcomes: vec![read(BitRef::Shared(0)), read(BitRef::Shared(0))],
        };
        let with_box = BoxNetwork {
            scenario: Scenario::bipartite_binary(),
            shared_bits: vec![],
            boxes: vec![PrBox { left: 0, right: 1, left_input: InputWire::constants(&[0, 0]), right_input: InputWire::constants(&[0, 0]) }],
            outcomes: vec![read(BitRef::Box(0)), read(BitRef::Box(0))],
        };
        let b = evaluate(&with_bit).unwrap();
        assert_eq!(b, evaluate(&with_box).unwrap());
        let half = Scalar::from_ratio(1, 2, Backend::Exact);
        assert_eq!(*b.get(&[0, 0], &[1, 1]), half);
        assert_eq!(*b.get(&[0, 1], &[0, 1]), Scalar::zero(Backend::Exact));
    }

    #[test]
    fn causality_checked() {
        let mut net = single_box();
        net.boxes[0].left_input.0[1] = Affine::bit(BitRef::Box(0));
        assert!(matches!(evaluate(&net), Err(NetError::Causality(_))));
        let mut net = single_box();
        net.outcomes[0][0][0] = Affine::bit(BitRef::Shared(0));
        assert!(matches!(evaluate(&net), Err(NetError::Causality(_))));
    }

    #[test]
    fn json_round_trip() {
        let net = single_box();
        let js = serde_json::to_string(&net).unwrap();
        assert!(js.contains(r#"{"box":0}"#));
        let back: BoxNetwork = serde_json::from_str(&js).unwrap();
        assert_eq!(back, net);
    }
}
