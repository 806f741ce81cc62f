use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::PipelineConfig;
use crate::error::Result;
use crate::example::{ExamplePair, Provenance};
use crate::extract::{align, cut_examples, extract_text, filter_example, FilterVerdict, PairOrigin};
use crate::ingest::{sample_revision_pairs, DumpReader, Page};
use crate::noise::{corrupt_spelling, keep_identity};
use crate::rng::{self, stream};
use crate::subword::Segmenter;
use crate::text::{tokens, word_count};

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ExtractSummary {
    pub pages_read: u64,
    pub pages_skipped_oversize: u64,
    pub revisions_skipped: u64,
    pub revision_pairs: u64,
    pub examples_cut: u64,
    pub dropped_too_long: u64,
    pub dropped_edit_distance: u64,
    pub identities_dropped: u64,
    pub sentences: u64,
    pub words: u64,
    pub source_words: u64,
    pub identities: u64,
    pub identity_fraction: f64,
}

#[derive(Default)]
struct PageOutput {
    examples: Vec<ExamplePair>,
    discarded: Vec<String>,
    revision_pairs: u64,
    examples_cut: u64,
    dropped_too_long: u64,
    dropped_edit_distance: u64,
}

fn process_page(page: &Page, config: &PipelineConfig, segmenter: &impl Segmenter) -> PageOutput {
    let seed = config.global_seed;
    let mut out = PageOutput::default();
    for pair in sample_revision_pairs(page, config.ingest.downsample_base, seed) {
        out.revision_pairs += 1;
        let old = extract_text(&pair.older.text);
        let new = extract_text(&pair.newer.text);
        let (old_tokens, new_tokens) = (tokens(&old), tokens(&new));
        let spans = align(&old_tokens, &new_tokens);
        let origin =
            PairOrigin { page_id: page.page_id, older_rev: pair.older.revision_id, newer_rev: pair.newer.revision_id };
        let pair_key = [page.page_id, origin.older_rev];
        let cuts = cut_examples(
            &spans,
            &old_tokens,
            &new_tokens,
            config.extract.p_cut,
            rng::derive_seed(seed, &pair_key),
            origin,
            Provenance::Revision,
        );
        for (k, example) in cuts.into_iter().enumerate() {
            out.examples_cut += 1;
            let keys = [page.page_id, origin.older_rev, k as u64];
            let mut spell_rng = rng::rng_for(seed, &[stream::SPELLING, keys[0], keys[1], keys[2]]);
            let source = corrupt_spelling(&example.source, &config.noise.spelling, &mut spell_rng);
            let example = example.with_source(source);
            match filter_example(&example, config.extract.max_wordpieces, config.extract.max_edit_distance, segmenter) {
                FilterVerdict::Keep => {}
                FilterVerdict::TooLong => {
                    out.dropped_too_long += 1;
                    continue;
                }
                FilterVerdict::TooManyEdits => {
                    out.dropped_edit_distance += 1;
                    continue;
                }
            }
            if keep_identity(&example, config.noise.keep_prob, seed, &keys) {
                out.examples.push(example);
            } else {
                out.discarded.push(example.target);
            }
        }
    }
    out
}

/// Runs ingestion, alignment, cutting, noising and filtering over a dump,
/// writing example pairs as JSON Lines in page order. Targets of identity
/// pairs dropped by downsampling go to `discarded`, one per line.
pub fn run_extract_revisions<R: BufRead>(
    config: &PipelineConfig,
    dump: R,
    out: &mut impl Write,
    mut discarded: Option<&mut dyn Write>,
    segmenter: &(impl Segmenter + Sync),
) -> Result<ExtractSummary> {
    config.validate()?;
    let pool = super::worker_pool(config.workers)?;
    let batch_size = pool.current_num_threads().max(1) * 2;
    let mut reader = DumpReader::new(dump, config.ingest.max_page_bytes);
    let mut summary = ExtractSummary::default();
    loop {
        let batch: Vec<Page> = reader.by_ref().take(batch_size).collect::<Result<_>>()?;
        if batch.is_empty() {
            break;
        }
        let outputs: Vec<PageOutput> =
            pool.install(|| batch.par_iter().map(|p| process_page(p, config, segmenter)).collect());
        for page in outputs {
            summary.revision_pairs += page.revision_pairs;
            summary.examples_cut += page.examples_cut;
            summary.dropped_too_long += page.dropped_too_long;
            summary.dropped_edit_distance += page.dropped_edit_distance;
            summary.identities_dropped += page.discarded.len() as u64;
            for example in &page.examples {
                writeln!(out, "{}", example.to_json_line())?;
                summary.sentences += 1;
                summary.words += word_count(&example.target) as u64;
                summary.source_words += word_count(&example.source) as u64;
                summary.identities += u64::from(example.is_identity);
            }
            if let Some(w) = discarded.as_deref_mut() {
                for text in &page.discarded {
                    writeln!(w, "{text}")?;
                }
            }
        }
    }
    out.flush()?;
    let stats = reader.stats();
    summary.pages_read = stats.pages_read;
    summary.pages_skipped_oversize = stats.pages_skipped_oversize;
    summary.revisions_skipped = stats.revisions_skipped;
    summary.identity_fraction = super::fraction(summary.identities, summary.sentences);
    Ok(summary)
}
