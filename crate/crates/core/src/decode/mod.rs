//! Iterative decoding with cost-ratio thresholding.
//!
//! A [`Scorer`] produces an n-best list for one input. [`iterative_decode`]
//! re-feeds its own output, accepting a rewrite only when the best
//! non-identity hypothesis is cheap relative to the identity.

mod ensemble;
mod reference;
mod remote;

pub use ensemble::{
    ensemble_distributions, ensemble_scorer, BeamSearchScorer, EnsembleMode, EnsembleModel, StepDistribution,
    StepModel, EOS,
};
pub use reference::{BigramModel, ReferenceScorer, DEFAULT_CHANNEL_PENALTY};
pub use remote::RemoteScorer;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_BEAM: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub text: String,
    /// Negative log probability of `text` given the input.
    pub cost: f64,
}

impl Hypothesis {
    pub fn new(text: impl Into<String>, cost: f64) -> Self {
        Hypothesis { text: text.into(), cost }
    }
}

/// Returns at most `beam` hypotheses in ascending cost order.
pub trait Scorer: Send + Sync {
    fn nbest(&self, input: &str, beam: usize) -> Result<Vec<Hypothesis>>;
}

impl<S: Scorer + ?Sized> Scorer for &S {
    fn nbest(&self, input: &str, beam: usize) -> Result<Vec<Hypothesis>> {
        (**self).nbest(input, beam)
    }
}

impl<S: Scorer + ?Sized> Scorer for Box<S> {
    fn nbest(&self, input: &str, beam: usize) -> Result<Vec<Hypothesis>> {
        (**self).nbest(input, beam)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecodeConfig {
    pub beam: usize,
    pub threshold: f64,
    pub max_iter: usize,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig { beam: DEFAULT_BEAM, threshold: 1.0, max_iter: 4 }
    }
}

impl DecodeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.beam == 0 {
            return Err(Error::config("beam must be at least 1"));
        }
        if self.max_iter == 0 {
            return Err(Error::config("max_iter must be at least 1"));
        }
        if !(self.threshold > 0.0) {
            return Err(Error::config(format!("threshold {} must be positive", self.threshold)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub output: String,
    /// Scorer calls made, including the one that reached the fixpoint.
    pub iterations: usize,
    /// `trajectory[0]` is the input, `trajectory[k]` the output of iteration
    /// `k`. A trailing fixpoint is not repeated.
    pub trajectory: Vec<String>,
}

impl DecodeOutcome {
    /// Output after `k` iterations, as if `max_iter` had been `k`.
    pub fn output_after(&self, k: usize) -> &str {
        &self.trajectory[k.min(self.trajectory.len() - 1)]
    }
}

/// One step: picks the rewrite or keeps `input`.
pub fn decode_step(input: &str, nbest: &[Hypothesis], threshold: f64) -> String {
    let mut identity_cost = f64::INFINITY;
    let mut best: Option<&Hypothesis> = None;
    for h in nbest {
        if h.text == input {
            identity_cost = identity_cost.min(h.cost);
        } else if best.is_none_or(|b| h.cost < b.cost) {
            best = Some(h);
        }
    }
    match best {
        Some(h) if h.cost / identity_cost < threshold => h.text.clone(),
        _ => input.to_owned(),
    }
}

pub fn iterative_decode_traced(input: &str, scorer: &impl Scorer, config: &DecodeConfig) -> Result<DecodeOutcome> {
    config.validate()?;
    let mut trajectory = vec![input.to_owned()];
    let mut iterations = 0;
    for iteration in 1..=config.max_iter {
        let current = trajectory.last().expect("trajectory starts non-empty");
        let nbest =
            scorer.nbest(current, config.beam).map_err(|e| Error::Scorer { iteration, message: e.to_string() })?;
        let next = decode_step(current, &nbest, config.threshold);
        iterations = iteration;
        if next == *current {
            break;
        }
        trajectory.push(next);
    }
    let output = trajectory.last().cloned().unwrap_or_default();
    Ok(DecodeOutcome { output, iterations, trajectory })
}

pub fn iterative_decode(input: &str, scorer: &impl Scorer, config: &DecodeConfig) -> Result<String> {
    iterative_decode_traced(input, scorer, config).map(|o| o.output)
}

#[cfg(test)]
mod tests {
    use std::collections::HashMap;

    use super::*;

    /// Replays canned n-best lists keyed by input.
    struct Scripted(HashMap<String, Vec<Hypothesis>>);

    impl Scorer for Scripted {
        fn nbest(&self, input: &str, beam: usize) -> Result<Vec<Hypothesis>> {
            let mut list = self.0.get(input).cloned().unwrap_or_else(|| vec![Hypothesis::new(input, 0.5)]);
            list.truncate(beam);
            Ok(list)
        }
    }

    struct Broken;

    impl Scorer for Broken {
        fn nbest(&self, _: &str, _: usize) -> Result<Vec<Hypothesis>> {
            Err(Error::Provider("down".into()))
        }
    }

    fn fixed(identity: f64, other: f64) -> Scripted {
        Scripted(HashMap::from([(
            "in".to_owned(),
            vec![Hypothesis::new("out", other), Hypothesis::new("in", identity)],
        )]))
    }

    fn config(threshold: f64, max_iter: usize) -> DecodeConfig {
        DecodeConfig { beam: 4, threshold, max_iter }
    }

    #[test]
    fn ratio_against_threshold() {
        let s = fixed(2.0, 1.0);
        assert_eq!(iterative_decode("in", &s, &config(0.9, 1)).unwrap(), "out");
        assert_eq!(iterative_decode("in", &s, &config(0.4, 1)).unwrap(), "in");
        // strict comparison
        assert_eq!(iterative_decode("in", &s, &config(0.5, 1)).unwrap(), "in");
    }

    #[test]
    fn missing_identity_costs_infinity() {
        let s = Scripted(HashMap::from([("in".to_owned(), vec![Hypothesis::new("out", 40.0)])]));
        assert_eq!(iterative_decode("in", &s, &config(1e-6, 1)).unwrap(), "out");
    }

    #[test]
    fn only_identity_in_list() {
        let s = Scripted(HashMap::new());
        let out = iterative_decode_traced("abc", &s, &config(100.0, 5)).unwrap();
        assert_eq!(out.output, "abc");
        assert_eq!(out.iterations, 1);
        assert_eq!(out.trajectory, vec!["abc"]);
    }

    #[test]
    fn empty_list_keeps_input() {
        struct Empty;
        impl Scorer for Empty {
            fn nbest(&self, _: &str, _: usize) -> Result<Vec<Hypothesis>> {
                Ok(Vec::new())
            }
        }
        assert_eq!(iterative_decode("x", &Empty, &config(1.0, 3)).unwrap(), "x");
    }

    #[test]
    fn error_carries_iteration() {
        match iterative_decode("x", &Broken, &config(1.0, 3)) {
            Err(Error::Scorer { iteration: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        let mut chain = HashMap::new();
        chain.insert("a".to_owned(), vec![Hypothesis::new("b", 0.1), Hypothesis::new("a", 1.0)]);
        struct Then(Scripted);
        impl Scorer for Then {
            fn nbest(&self, input: &str, beam: usize) -> Result<Vec<Hypothesis>> {
                if input == "b" {
                    return Err(Error::Provider("late".into()));
                }
                self.0.nbest(input, beam)
            }
        }
        match iterative_decode("a", &Then(Scripted(chain)), &config(1.0, 3)) {
            Err(Error::Scorer { iteration: 2, message }) => assert!(message.contains("late")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn max_iter_bounds_rewrites() {
        let mut chain = HashMap::new();
        for (from, to) in [("a", "b"), ("b", "c"), ("c", "d")] {
            chain.insert(from.to_owned(), vec![Hypothesis::new(to, 0.1), Hypothesis::new(from, 1.0)]);
        }
        let s = Scripted(chain);
        let out = iterative_decode_traced("a", &s, &config(1.0, 2)).unwrap();
        assert_eq!(out.output, "c");
        assert_eq!(out.iterations, 2);
        let full = iterative_decode_traced("a", &s, &config(1.0, 10)).unwrap();
        assert_eq!(full.output, "d");
        assert_eq!(full.iterations, 4);
        assert_eq!(full.output_after(2), "c");
        assert_eq!(full.output_after(9), "d");
        assert_eq!(iterative_decode("d", &s, &config(1.0, 10)).unwrap(), "d");
    }

    #[test]
    fn config_validation() {
        assert!(config(1.0, 0).validate().is_err());
        assert!(config(0.0, 1).validate().is_err());
        assert!(DecodeConfig { beam: 0, ..DecodeConfig::default() }.validate().is_err());
        assert_eq!(DecodeConfig::default().beam, 4);
    }
}
