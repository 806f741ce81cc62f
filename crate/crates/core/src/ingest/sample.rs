use rand::seq::index;

use super::{Page, RevisionPair};
use crate::rng::{self, stream};

pub const DEFAULT_DOWNSAMPLE_BASE: f64 = 1.5;

/// Number of consecutive revision pairs kept for a page with `n` revisions:
/// `floor(log_base(n))`, capped at `n - 1`. Pages with fewer than two
/// revisions have no pairs.
pub fn sampled_pair_count(n: u64, base: f64) -> u64 {
    assert!(base > 1.0, "downsample base must exceed 1, got {base}");
    if n < 2 {
        return 0;
    }
    let x = n as f64;
    let mut k = (x.ln() / base.ln()).floor().max(0.0) as u64;
    // Correct for ln rounding right at integer powers of the base.
    while k > 0 && base.powf(k as f64) > x {
        k -= 1;
    }
    while base.powf((k + 1) as f64) <= x {
        k += 1;
    }
    k.min(n - 1)
}

/// Draws `sampled_pair_count(n, base)` consecutive pairs uniformly without
/// replacement, returned in chronological order. The draw depends only on
/// `(seed, page_id)`.
pub fn sample_revision_pairs(page: &Page, base: f64, seed: u64) -> Vec<RevisionPair<'_>> {
    let n = page.n();
    if n < 2 {
        return Vec::new();
    }
    let k = sampled_pair_count(n as u64, base) as usize;
    let mut rng = rng::rng_for(seed, &[stream::PAIR_SAMPLING, page.page_id]);
    let mut picked = index::sample(&mut rng, n - 1, k).into_vec();
    picked.sort_unstable();
    picked
        .into_iter()
        .map(|i| RevisionPair { page_id: page.page_id, older: &page.revisions[i], newer: &page.revisions[i + 1] })
        .collect()
}
