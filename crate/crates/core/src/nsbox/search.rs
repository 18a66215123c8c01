//! Exhaustive search over affine wirings.
//!
//! Free slots are grouped into atoms `(party, setting)`: an atom fixes the
//! affine function at that setting for every free slot owned by the party.
//! Atoms are ordered by setting, then party. A candidate is the vector of
//! atom choices; candidates are visited in lexicographic order (first atom
//! most significant) and the lowest accepted one is returned. Each option of
//! a slot with `m` allowed references is a code `c < 2^(m+1)`: bit 0 is the
//! constant, bit `i + 1` includes reference `i`.

use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate, Affine, BitRef, BoxNetwork, NetError, Result};
use crate::behavior::Behavior;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Slot {
    Input { box_id: usize, side: Side },
    Outcome { party: usize, bit: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FreeSlot {
    pub slot: Slot,
    /// References allowed in the XOR mask.
    pub refs: Vec<BitRef>,
}

/// A base network whose free slots are overwritten during the search.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WiringFamily {
    pub base: BoxNetwork,
    pub free: Vec<FreeSlot>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchOutcome {
    pub network: Option<BoxNetwork>,
    /// Atom choices of the returned network.
    pub choice: Option<Vec<usize>>,
    /// Size of the candidate space, as a decimal string.
    pub candidates: String,
}

struct Plan {
    /// `(party, setting)` in visiting order.
    atoms: Vec<(usize, usize)>,
    /// Free-slot indices owned by each atom's party.
    slots: Vec<Vec<usize>>,
    options: Vec<usize>,
    /// Setting tuples completed by each atom.
    checks: Vec<Vec<Vec<usize>>>,
}

impl WiringFamily {
    fn owner(&self, slot: Slot) -> Result<usize> {
        match slot {
            Slot::Input { box_id, side } => {
                let b = self.base.boxes.get(box_id).ok_or_else(|| NetError::Invalid(format!("free slot on unknown box {box_id}")))?;
                Ok(if side == Side::Left { b.left } else { b.right })
            }
            Slot::Outcome { party, .. } => Ok(party),
        }
    }

    fn plan(&self) -> Result<Plan> {
        self.base.validate()?;
        let sc = &self.base.scenario;
        let n = sc.parties();
        let max_s = sc.settings().iter().copied().max().unwrap_or(0);
        let mut atoms = Vec::new();
        for s in 0..max_s {
            for p in 0..n {
                if s < sc.settings()[p] {
                    atoms.push((p, s));
                }
            }
        }
        let owners = self.free.iter().map(|f| self.owner(f.slot)).collect::<Result<Vec<_>>>()?;
        for (f, &o) in self.free.iter().zip(&owners) {
            if f.refs.len() > 16 {
                return Err(NetError::Invalid("too many references in one slot".into()));
            }
            if let Slot::Outcome { party, bit } = f.slot {
                if bit >= self.base.outcomes[party][0].len() {
                    return Err(NetError::Invalid(format!("party {party} has no outcome bit {bit}")));
                }
            }
            let before = match f.slot {
                Slot::Input { box_id, .. } => Some(box_id),
                Slot::Outcome { .. } => None,
            };
            for &r in &f.refs {
                self.base.check_ref(o, r, before, "free slot")?;
            }
        }
        let slots: Vec<Vec<usize>> =
            atoms.iter().map(|&(p, _)| (0..self.free.len()).filter(|&i| owners[i] == p).collect()).collect();
        let options = slots
            .iter()
            .map(|ss| ss.iter().try_fold(1usize, |acc, &i| acc.checked_mul(1 << (self.free[i].refs.len() + 1))))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| NetError::Invalid("atom option count overflows".into()))?;
        let pos = |p: usize, s: usize| atoms.iter().position(|&a| a == (p, s)).expect("atom");
        let mut checks = vec![Vec::new(); atoms.len()];
        for t in sc.setting_tuples() {
            let last = (0..n).map(|p| pos(p, t[p])).max().expect("parties");
            checks[last].push(t);
        }
        Ok(Plan { atoms, slots, options, checks })
    }

    fn decode(&self, slot: usize, code: usize) -> Affine {
        let refs = &self.free[slot].refs;
        Affine {
            constant: (code & 1) as u8,
            terms: refs.iter().enumerate().filter(|(i, _)| code >> (i + 1) & 1 == 1).map(|(_, &r)| r).collect(),
        }
    }

    fn apply(&self, plan: &Plan, net: &mut BoxNetwork, atom: usize, mut opt: usize) {
        let (_, s) = plan.atoms[atom];
        for &i in &plan.slots[atom] {
            let radix = 1 << (self.free[i].refs.len() + 1);
            let f = self.decode(i, opt % radix);
            opt /= radix;
            match self.free[i].slot {
                Slot::Input { box_id, side } => {
                    let b = &mut net.boxes[box_id];
                    let w = if side == Side::Left { &mut b.left_input } else { &mut b.right_input };
                    w.0[s] = f;
                }
                Slot::Outcome { party, bit } => net.outcomes[party][s][bit] = f,
            }
        }
    }
}

struct Searcher<'a, B, A> {
    family: &'a WiringFamily,
    plan: Plan,
    block_ok: &'a B,
    accept: &'a A,
}

impl<B, A> Searcher<'_, B, A>
where
    B: Fn(&[usize], &[Scalar]) -> bool + Sync,
    A: Fn(&Behavior) -> bool + Sync,
{
    fn blocks_ok(&self, net: &BoxNetwork, atom: usize) -> bool {
        self.plan.checks[atom].iter().all(|s| (self.block_ok)(s, &net.block(s)))
    }

    fn dfs(&self, net: &mut BoxNetwork, atom: usize, choice: &mut Vec<usize>) -> Option<Vec<usize>> {
        if atom == self.plan.atoms.len() {
            let b = evaluate(net).ok()?;
            return (self.accept)(&b).then(|| choice.clone());
        }
        for opt in 0..self.plan.options[atom] {
            self.family.apply(&self.plan, net, atom, opt);
            if self.blocks_ok(net, atom) {
                choice.push(opt);
                if let Some(found) = self.dfs(net, atom + 1, choice) {
                    return Some(found);
                }
                choice.pop();
            }
        }
        None
    }
}

/// First candidate, in the documented order, whose every setting block
/// satisfies `block_ok` and whose full behavior satisfies `accept`.
pub fn search_wiring<B, A>(family: &WiringFamily, block_ok: &B, accept: &A) -> Result<SearchOutcome>
where
    B: Fn(&[usize], &[Scalar]) -> bool + Sync,
    A: Fn(&Behavior) -> bool + Sync,
{
    let plan = family.plan()?;
    let candidates = plan
        .options
        .iter()
        .fold(num_bigint::BigUint::from(1u8), |acc, &o| acc * num_bigint::BigUint::from(o))
        .to_string();
    let searcher = Searcher { family, plan, block_ok, accept };
    let found = if searcher.plan.atoms.is_empty() {
        searcher.dfs(&mut family.base.clone(), 0, &mut Vec::new())
    } else {
        (0..searcher.plan.options[0]).into_par_iter().find_map_first(|opt| {
            let mut net = family.base.clone();
            searcher.family.apply(&searcher.plan, &mut net, 0, opt);
            if !searcher.blocks_ok(&net, 0) {
                return None;
            }
            let mut choice = vec![opt];
            searcher.dfs(&mut net, 1, &mut choice)
        })
    };
    let network = found.as_ref().map(|choice| {
        let mut net = family.base.clone();
        for (atom, &opt) in choice.iter().enumerate() {
            family.apply(&searcher.plan, &mut net, atom, opt);
        }
        net
    });
    Ok(SearchOutcome { network, choice: found, candidates })
}

/// Block predicate: equality with the corresponding block of `target`.
pub fn matches_target(target: &Behavior) -> impl Fn(&[usize], &[Scalar]) -> bool + Sync + '_ {
    move |s, block| target.block(s) == block
}
