//! Revision text extraction, alignment, cutting and filtering.

mod align;
mod cut;
mod filter;
mod wikitext;

pub use align::{align, AlignmentSpan, SpanKind};
pub use cut::{cut_examples, PairOrigin, DEFAULT_CUT_PROBABILITY};
pub use filter::{filter_example, FilterVerdict, DEFAULT_MAX_WORDPIECES};
pub use wikitext::extract_text;
