//! Monte-Carlo simulation of a network, sampling each box from its table.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::Serialize;

use super::{BoxNetwork, Result};
use crate::behavior::Behavior;

/// `samples` runs for every setting tuple; `counts[setting_index][outcome_index]`.
pub fn sample_counts<R: Rng + ?Sized>(net: &BoxNetwork, samples: u64, rng: &mut R) -> Result<Vec<Vec<u64>>> {
    net.validate()?;
    // P(a, b | x, y) over (a, b) = 00, 01, 10, 11.
    let table: Vec<WeightedIndex<u32>> = (0..4)
        .map(|xy| {
            let p = (xy >> 1) & xy & 1;
            let w: Vec<u32> = (0..4).map(|ab| (((ab >> 1) ^ (ab & 1)) == p) as u32).collect();
            WeightedIndex::new(w).expect("two nonzero weights")
        })
        .collect();
    let mut out = Vec::with_capacity(net.scenario.n_setting_tuples());
    let mut shared = vec![0u8; net.shared_bits.len()];
    let mut outs = vec![(0u8, 0u8); net.boxes.len()];
    for s in net.scenario.setting_tuples() {
        let mut counts = vec![0u64; net.scenario.n_outcome_tuples()];
        for _ in 0..samples {
            for b in shared.iter_mut() {
                *b = rng.random::<bool>() as u8;
            }
            for j in 0..net.boxes.len() {
                let (x, y) = net.box_inputs(j, &s, &shared, &outs);
                let ab = table[((x << 1) | y) as usize].sample(rng);
                outs[j] = ((ab >> 1) as u8, (ab & 1) as u8);
            }
            counts[net.outcome_index(&s, &shared, &outs)] += 1;
        }
        out.push(counts);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    /// `df + 3√(2·df)`.
    pub threshold: f64,
    /// Samples observed in cells of probability zero.
    pub impossible: u64,
    pub passed: bool,
}

/// Pearson statistic of `counts` against `b`, summed over setting tuples.
pub fn chi_square(b: &Behavior, counts: &[Vec<u64>], samples: u64) -> ChiSquare {
    let n = samples as f64;
    let mut stat = 0.0;
    let mut df = 0;
    let mut impossible = 0;
    for (si, s) in b.scenario().setting_tuples().enumerate() {
        let mut cells = 0;
        for (p, &c) in b.block(&s).iter().zip(&counts[si]) {
            let p = p.to_f64();
            if p > 0.0 {
                let e = n * p;
                stat += (c as f64 - e).powi(2) / e;
                cells += 1;
            } else {
                impossible += c;
            }
        }
        df += cells.max(1) - 1;
    }
    let threshold = df as f64 + 3.0 * (2.0 * df as f64).sqrt();
    ChiSquare { statistic: stat, df, threshold, impossible, passed: impossible == 0 && stat <= threshold }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::Scenario;
    use crate::nsbox::{evaluate, Affine, BitRef, InputWire, PrBox};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pr_box_sampling_agrees() {
        let net = BoxNetwork {
            scenario: Scenario::bipartite_binary(),
            shared_bits: vec![],
            boxes: vec![PrBox { left: 0, right: 1, left_input: InputWire::setting(), right_input: InputWire::setting() }],
            outcomes: vec![vec![vec![Affine::bit(BitRef::Box(0))]; 2], vec![vec![Affine::bit(BitRef::Box(0))]; 2]],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let counts = sample_counts(&net, 20_000, &mut rng).unwrap();
        let chi = chi_square(&evaluate(&net).unwrap(), &counts, 20_000);
        assert_eq!(chi.df, 4);
        assert!(chi.passed, "{chi:?}");
    }
}
