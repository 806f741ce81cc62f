use crate::example::ExamplePair;
use crate::rng::{self, stream};

/// Keeping 1% of identity pairs.
pub const DEFAULT_IDENTITY_KEEP_PROB: f64 = 0.01;

/// Drops identity pairs with probability `1 - keep_prob`; other pairs always
/// pass. The decision for the `i`-th record depends only on `(seed, i)`.
pub fn downsample_identities<I>(pairs: I, keep_prob: f64, seed: u64) -> impl Iterator<Item = ExamplePair>
where
    I: IntoIterator<Item = ExamplePair>,
{
    pairs
        .into_iter()
        .enumerate()
        .filter_map(move |(i, pair)| keep_identity(&pair, keep_prob, seed, &[i as u64]).then_some(pair))
}

pub(crate) fn keep_identity(pair: &ExamplePair, keep_prob: f64, seed: u64, keys: &[u64]) -> bool {
    if !pair.is_identity {
        return true;
    }
    let mut k = Vec::with_capacity(keys.len() + 1);
    k.push(stream::IDENTITY);
    k.extend_from_slice(keys);
    rng::unit_draw(seed, &k) < keep_prob
}

/// Expected identity share after downsampling an input whose identity share
/// is `q`.
pub fn expected_identity_share(q: f64, keep_prob: f64) -> f64 {
    let kept = q * keep_prob;
    if kept + (1.0 - q) == 0.0 {
        return 0.0;
    }
    kept / (kept + 1.0 - q)
}
