//! Read simulation over a symbol erasure channel.
//!
//! Every block draws its own random write unit, erasure pattern and target
//! sub-block from a ChaCha stream keyed by `(seed, block index)`, so results do not
//! depend on thread scheduling.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::galois::Elem;
use crate::mbic::{global_decode, local_read, ErasurePattern, Layout, Message, M};

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub erase_prob: f64,
    pub blocks: u64,
    pub seed: u64,
    /// Relative frequency of reads per sub-block.
    pub workload: [f64; M],
}

impl SimConfig {
    pub fn new(erase_prob: f64, blocks: u64, seed: u64) -> Self {
        SimConfig {
            erase_prob,
            blocks,
            seed,
            workload: [1.0; M],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.erase_prob) {
            return Err(Error::InvalidParams(format!(
                "erasure probability {} not in [0, 1]",
                self.erase_prob
            )));
        }
        if self.workload.iter().any(|w| !w.is_finite() || *w < 0.0)
            || self.workload.iter().sum::<f64>() <= 0.0
        {
            return Err(Error::InvalidParams(
                "workload weights must be nonnegative with positive sum".into(),
            ));
        }
        Ok(())
    }
}

/// Exact counts over simulated reads (one read per block).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SimStats {
    pub reads: u64,
    pub local_success: u64,
    pub escalations: u64,
    /// Escalated reads recovered by the global decoder.
    pub global_success: u64,
    pub unrecoverable: u64,
    /// Decoded data differing from what was written (expected 0).
    pub wrong_data: u64,
}

impl SimStats {
    fn merge(self, o: Self) -> Self {
        SimStats {
            reads: self.reads + o.reads,
            local_success: self.local_success + o.local_success,
            escalations: self.escalations + o.escalations,
            global_success: self.global_success + o.global_success,
            unrecoverable: self.unrecoverable + o.unrecoverable,
            wrong_data: self.wrong_data + o.wrong_data,
        }
    }

    fn rate(&self, x: u64) -> f64 {
        if self.reads == 0 {
            0.0
        } else {
            x as f64 / self.reads as f64
        }
    }

    pub fn local_success_rate(&self) -> f64 {
        self.rate(self.local_success)
    }

    pub fn escalation_rate(&self) -> f64 {
        self.rate(self.escalations)
    }

    /// Fraction of escalated reads that the global decoder recovered.
    pub fn global_success_rate(&self) -> f64 {
        if self.escalations == 0 {
            0.0
        } else {
            self.global_success as f64 / self.escalations as f64
        }
    }

    pub fn unrecoverable_rate(&self) -> f64 {
        self.rate(self.unrecoverable)
    }

    pub fn lines(&self) -> Vec<String> {
        vec![
            format!("reads={}", self.reads),
            format!("local_success={}", self.local_success),
            format!("escalations={}", self.escalations),
            format!("global_success={}", self.global_success),
            format!("unrecoverable={}", self.unrecoverable),
            format!("wrong_data={}", self.wrong_data),
            format!("local_success_rate={:.6}", self.local_success_rate()),
            format!("escalation_rate={:.6}", self.escalation_rate()),
            format!("global_success_rate={:.6}", self.global_success_rate()),
            format!("unrecoverable_rate={:.6}", self.unrecoverable_rate()),
        ]
    }
}

fn simulate_block(
    layout: &Layout,
    cfg: &SimConfig,
    chooser: &WeightedIndex<f64>,
    block: u64,
) -> SimStats {
    let params = layout.params();
    let (n, k, q) = (params.n(), params.k(), params.field().order());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(block);

    let symbols: Vec<Elem> = (0..M * k).map(|_| rng.gen_range(0..q) as Elem).collect();
    let message = Message::from_symbols(k, symbols).expect("length 3k");
    let mut word = layout.encode(&message).expect("valid message");
    let mask: Vec<bool> = (0..M * n).map(|_| rng.gen_bool(cfg.erase_prob)).collect();
    let pattern = ErasurePattern::from_mask(n, mask).expect("length 3n");
    // Erased positions hold garbage.
    for i in pattern.indices() {
        word.symbols_mut()[i] = rng.gen_range(0..q) as Elem;
    }
    let j = chooser.sample(&mut rng);

    let mut stats = SimStats {
        reads: 1,
        ..SimStats::default()
    };
    match local_read(layout, j, word.sub_block(j), pattern.sub_block(j)) {
        Ok(data) => {
            stats.local_success = 1;
            stats.wrong_data = (data != message.sub_unit(j)) as u64;
        }
        Err(_) => {
            stats.escalations = 1;
            match global_decode(layout, &word, &pattern) {
                Ok(dec) => {
                    stats.global_success = 1;
                    stats.wrong_data = (dec.message.sub_unit(j) != message.sub_unit(j)) as u64;
                }
                Err(_) => stats.unrecoverable = 1,
            }
        }
    }
    stats
}

/// Simulates `cfg.blocks` reads; deterministic in `cfg`.
pub fn simulate(layout: &Layout, cfg: &SimConfig) -> Result<SimStats> {
    cfg.validate()?;
    let chooser =
        WeightedIndex::new(cfg.workload).map_err(|e| Error::InvalidParams(e.to_string()))?;
    Ok((0..cfg.blocks)
        .into_par_iter()
        .map(|b| simulate_block(layout, cfg, &chooser, b))
        .reduce(SimStats::default, SimStats::merge))
}
