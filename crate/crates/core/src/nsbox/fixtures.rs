//! The two reference networks. Their wirings were produced by
//! [`search_wiring`] over the families below and are stored as JSON; loading
//! re-verifies them against the closed-form targets.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::search::{matches_target, search_wiring, FreeSlot, SearchOutcome, Side, Slot, WiringFamily};
use super::{evaluate, Affine, BitRef, BoxNetwork, InputWire, NetError, PrBox, Result};
use crate::behavior::{rabello_game_value, rabello_win, Behavior, Scenario};
use crate::scalar::{Backend, Scalar};
use crate::targets::theorem2_behavior;

const THEOREM2_JSON: &str = include_str!("../../fixtures/theorem2_network.json");
const THEOREM3_JSON: &str = include_str!("../../fixtures/theorem3_network.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFixture {
    pub name: String,
    pub note: String,
    pub network: BoxNetwork,
}

fn free(slot: Slot, refs: &[BitRef]) -> FreeSlot {
    FreeSlot { slot, refs: refs.to_vec() }
}

fn input(box_id: usize, side: Side) -> Slot {
    Slot::Input { box_id, side }
}

fn placeholder(settings: usize) -> InputWire {
    InputWire(vec![Affine::constant(0); settings])
}

/// Box 0 joins Charlie (left, input `Z`) and Alice (right, input `X`); box 1
/// joins Alice and Bob. Outcomes are Alice's and Bob's sides of box 1 and
/// Charlie's side of box 0. Free: both inputs of box 1.
pub fn theorem2_family() -> WiringFamily {
    let base = BoxNetwork {
        scenario: Scenario::tripartite_binary(),
        shared_bits: vec![],
        boxes: vec![
            PrBox { left: 2, right: 0, left_input: InputWire::setting(), right_input: InputWire::setting() },
            PrBox { left: 0, right: 1, left_input: placeholder(2), right_input: placeholder(2) },
        ],
        outcomes: vec![
            vec![vec![Affine::bit(BitRef::Box(1))]; 2],
            vec![vec![Affine::bit(BitRef::Box(1))]; 2],
            vec![vec![Affine::bit(BitRef::Box(0))]; 2],
        ],
    };
    let free = vec![free(input(1, Side::Left), &[BitRef::Box(0)]), free(input(1, Side::Right), &[])];
    WiringFamily { base, free }
}

/// Box 0 joins Alice and Charlie; boxes 1, 2 join Alice and Bob; boxes 3, 4
/// join Bob and Charlie; shared bit 0 is held by Alice and Bob. Outcome maps
/// and Bob's box-1 input `(0, 1, 0)` are fixed; every other input is free,
/// with masks allowed only where listed.
pub fn theorem3_family() -> WiringFamily {
    let xor = |js: &[usize]| Affine::xor(&js.iter().map(|&j| BitRef::Box(j)).collect::<Vec<_>>());
    let bob = vec![
        vec![xor(&[1, 2]), xor(&[3, 4])],
        vec![xor(&[1, 2]), xor(&[3, 4])],
        vec![Affine::bit(BitRef::Shared(0)), xor(&[1, 2, 3, 4])],
    ];
    let base = BoxNetwork {
        scenario: Scenario::rabello(),
        shared_bits: vec![vec![0, 1]],
        boxes: vec![
            PrBox { left: 0, right: 2, left_input: placeholder(2), right_input: placeholder(2) },
            PrBox { left: 0, right: 1, left_input: placeholder(2), right_input: InputWire::constants(&[0, 1, 0]) },
            PrBox { left: 0, right: 1, left_input: placeholder(2), right_input: placeholder(3) },
            PrBox { left: 1, right: 2, left_input: placeholder(3), right_input: placeholder(2) },
            PrBox { left: 1, right: 2, left_input: placeholder(3), right_input: placeholder(2) },
        ],
        outcomes: vec![vec![vec![xor(&[1, 2])]; 2], bob, vec![vec![xor(&[3, 4])]; 2]],
    };
    let free = vec![
        free(input(0, Side::Left), &[]),
        free(input(0, Side::Right), &[]),
        free(input(1, Side::Left), &[]),
        free(input(2, Side::Left), &[BitRef::Shared(0), BitRef::Box(0)]),
        free(input(2, Side::Right), &[]),
        free(input(3, Side::Left), &[]),
        free(input(3, Side::Right), &[]),
        free(input(4, Side::Left), &[]),
        free(input(4, Side::Right), &[BitRef::Box(0), BitRef::Box(3)]),
    ];
    WiringFamily { base, free }
}

fn one() -> Scalar {
    Scalar::one(Backend::Exact)
}

fn rabello_perfect(b: &Behavior) -> bool {
    rabello_game_value(b, None).is_ok_and(|r| r.overall == one())
}

fn rabello_block(scen: &Scenario) -> impl Fn(&[usize], &[Scalar]) -> bool + Sync + '_ {
    move |s, block| block.iter().enumerate().all(|(i, p)| p.is_zero_within(0.0) || rabello_win(s, &scen.outcome_tuple(i)))
}

pub fn search_theorem2() -> Result<SearchOutcome> {
    let target = theorem2_behavior();
    let block = matches_target(&target);
    search_wiring(&theorem2_family(), &block, &|b: &Behavior| *b == target)
}

pub fn search_theorem3() -> Result<SearchOutcome> {
    let scen = Scenario::rabello();
    let block = rabello_block(&scen);
    search_wiring(&theorem3_family(), &block, &rabello_perfect)
}

fn parse(js: &str) -> Result<NetworkFixture> {
    let f: NetworkFixture = serde_json::from_str(js).map_err(|e| NetError::Invalid(format!("fixture: {e}")))?;
    f.network.validate()?;
    Ok(f)
}

/// `theorem2` or `theorem3`, from `dir/<name>_network.json` or the embedded copy.
pub fn load_fixture(name: &str, dir: Option<&Path>) -> Result<NetworkFixture> {
    let text = match dir {
        Some(d) => std::fs::read_to_string(d.join(format!("{name}_network.json")))
            .map_err(|e| NetError::Invalid(format!("reading fixture {name}: {e}")))?,
        None => match name {
            "theorem2" => THEOREM2_JSON.to_string(),
            "theorem3" => THEOREM3_JSON.to_string(),
            _ => return Err(NetError::Invalid(format!("unknown fixture {name}"))),
        },
    };
    parse(&text)
}

/// The stored network checked to reproduce the closed-form target exactly.
pub fn build_theorem2_network() -> Result<BoxNetwork> {
    let f = load_fixture("theorem2", None)?;
    if evaluate(&f.network)? != theorem2_behavior() {
        return Err(NetError::Invalid("theorem2 fixture does not reproduce the target behavior".into()));
    }
    Ok(f.network)
}

/// The stored network checked to win the game with probability 1.
pub fn build_theorem3_network() -> Result<BoxNetwork> {
    let f = load_fixture("theorem3", None)?;
    if !rabello_perfect(&evaluate(&f.network)?) {
        return Err(NetError::Invalid("theorem3 fixture does not win with probability 1".into()));
    }
    Ok(f.network)
}

/// Fixture records for the current search results.
pub fn regenerate() -> Result<Vec<NetworkFixture>> {
    let mut out = Vec::new();
    for (name, res, note) in [
        ("theorem2", search_theorem2()?, "reconstruction: lowest wiring in the two-box family reproducing the closed form"),
        ("theorem3", search_theorem3()?, "reconstruction: lowest wiring in the five-box family winning with probability 1"),
    ] {
        let network = res.network.ok_or_else(|| NetError::Invalid(format!("{name}: search found no wiring")))?;
        out.push(NetworkFixture { name: name.into(), note: note.into(), network });
    }
    Ok(out)
}
