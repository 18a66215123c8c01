//! Shared generators for the integration tests.
#![allow(dead_code)]

use gmnl::nsbox::{Affine, BitRef, BoxNetwork, InputWire, PrBox};
use gmnl::Scenario;
use rand::seq::IndexedRandom;
use rand::Rng;

/// Bits `party` may read before box `before` (all boxes when `None`).
fn readable(net: &BoxNetwork, party: usize, before: Option<usize>) -> Vec<BitRef> {
    let mut refs: Vec<BitRef> =
        (0..net.shared_bits.len()).filter(|&k| net.shared_bits[k].contains(&party)).map(BitRef::Shared).collect();
    let end = before.unwrap_or(net.boxes.len());
    refs.extend((0..end).filter(|&j| net.boxes[j].left == party || net.boxes[j].right == party).map(BitRef::Box));
    refs
}

fn random_affine<R: Rng>(refs: &[BitRef], wired: bool, rng: &mut R) -> Affine {
    let terms = if wired { refs.iter().copied().filter(|_| rng.random_bool(0.5)).collect() } else { vec![] };
    Affine { constant: rng.random_range(0..2), terms }
}

/// Random tripartite network. With `wired == false` every input is a
/// per-setting constant.
pub fn random_network<R: Rng>(rng: &mut R, wired: bool) -> BoxNetwork {
    let scenario = if rng.random_bool(0.5) { Scenario::tripartite_binary() } else { Scenario::rabello() };
    let n_boxes = rng.random_range(1..=4);
    let n_shared = rng.random_range(0..=2);
    let pairs = [(0, 1), (1, 0), (0, 2), (2, 0), (1, 2), (2, 1)];
    let mut net = BoxNetwork {
        scenario: scenario.clone(),
        shared_bits: (0..n_shared).map(|_| (0..3).filter(|_| rng.random_bool(0.6)).collect()).collect(),
        boxes: Vec::new(),
        outcomes: Vec::new(),
    };
    for j in 0..n_boxes {
        let &(l, r) = pairs.choose(rng).unwrap();
        let wire = |p: usize, rng: &mut R| {
            let refs = readable(&net, p, Some(j));
            InputWire((0..scenario.settings()[p]).map(|_| random_affine(&refs, wired, rng)).collect())
        };
        let left_input = wire(l, rng);
        let right_input = wire(r, rng);
        net.boxes.push(PrBox { left: l, right: r, left_input, right_input });
    }
    net.outcomes = (0..3)
        .map(|p| {
            let refs = readable(&net, p, None);
            let bits = scenario.outcomes()[p].trailing_zeros() as usize;
            (0..scenario.settings()[p])
                .map(|_| (0..bits).map(|_| random_affine(&refs, true, rng)).collect())
                .collect()
        })
        .collect();
    net
}

