use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpellOp {
    Deletion,
    Insertion,
    Replacement,
    Transposition,
}

/// Per-character spelling noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpellNoiseConfig {
    /// Probability that a given character triggers an error.
    pub rate: f64,
    /// Relative weights of the four operations, in [`SpellOp`] order.
    pub op_weights: [f64; 4],
    /// Characters drawn for insertion and replacement.
    pub alphabet: String,
}

impl Default for SpellNoiseConfig {
    fn default() -> Self {
        Self::revision()
    }
}

impl SpellNoiseConfig {
    const ALPHABET: &'static str = "abcdefghijklmnopqrstuvwxyz ";

    /// 0.003 per character, the four operations equally likely.
    pub fn revision() -> Self {
        SpellNoiseConfig { rate: 0.003, op_weights: [0.25; 4], alphabet: Self::ALPHABET.into() }
    }

    /// 0.005 per character split evenly over insertion, deletion and
    /// transposition.
    pub fn round_trip() -> Self {
        let third = 1.0 / 3.0;
        SpellNoiseConfig { rate: 0.005, op_weights: [third, third, 0.0, third], alphabet: Self::ALPHABET.into() }
    }

    pub fn disabled() -> Self {
        SpellNoiseConfig { rate: 0.0, ..Self::revision() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.rate) {
            return Err(Error::config(format!("spelling rate {} outside [0, 1]", self.rate)));
        }
        if self.op_weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::config("spelling op weights must be non-negative"));
        }
        let total: f64 = self.op_weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::config(format!("spelling op weights sum to {total}, expected 1")));
        }
        let needs_alphabet = self.op_weights[1] > 0.0 || self.op_weights[2] > 0.0;
        if needs_alphabet && self.alphabet.is_empty() {
            return Err(Error::config("insertion/replacement need a non-empty alphabet"));
        }
        Ok(())
    }

    fn pick_op(&self, u: f64) -> SpellOp {
        const OPS: [SpellOp; 4] = [SpellOp::Deletion, SpellOp::Insertion, SpellOp::Replacement, SpellOp::Transposition];
        let mut acc = 0.0;
        for (op, w) in OPS.iter().zip(self.op_weights) {
            acc += w;
            if u < acc {
                return *op;
            }
        }
        // Rounding left u at or above the total; take the last non-zero op.
        OPS.iter().zip(self.op_weights).rev().find(|(_, w)| *w > 0.0).map_or(SpellOp::Deletion, |(op, _)| *op)
    }
}

pub fn corrupt_spelling(text: &str, config: &SpellNoiseConfig, rng: &mut impl Rng) -> String {
    corrupt_spelling_counted(text, config, rng).0
}

/// Bernoulli draws made and errors triggered by one corruption pass.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SpellCounts {
    /// Characters that drew a trigger decision. A transposition consumes the
    /// following character without a draw.
    pub trials: usize,
    pub triggers: usize,
}

/// Like [`corrupt_spelling`], also returning draw and trigger counts.
pub fn corrupt_spelling_counted(text: &str, config: &SpellNoiseConfig, rng: &mut impl Rng) -> (String, SpellCounts) {
    if config.rate <= 0.0 || text.is_empty() {
        return (text.to_owned(), SpellCounts::default());
    }
    let alphabet: Vec<char> = config.alphabet.chars().collect();
    let chars: Vec<char> = text.chars().collect();
    let mut out = String::with_capacity(text.len() + 8);
    let mut counts = SpellCounts::default();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        counts.trials += 1;
        if !rng.gen_bool(config.rate.min(1.0)) {
            out.push(c);
            i += 1;
            continue;
        }
        counts.triggers += 1;
        match config.pick_op(rng.gen::<f64>()) {
            SpellOp::Deletion => {}
            SpellOp::Insertion => {
                out.push(alphabet[rng.gen_range(0..alphabet.len())]);
                out.push(c);
            }
            SpellOp::Replacement => out.push(alphabet[rng.gen_range(0..alphabet.len())]),
            SpellOp::Transposition => {
                if let Some(&next) = chars.get(i + 1) {
                    out.push(next);
                    out.push(c);
                    i += 1;
                } else {
                    out.push(c);
                }
            }
        }
        i += 1;
    }
    (out, counts)
}
