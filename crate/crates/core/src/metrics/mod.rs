//! Edit extraction, edit-matching precision and recall, F-beta, and GLEU.

mod edits;
mod gleu;
mod m2;
mod score;

pub use edits::{apply_edits, extract_edits, Edit};
pub use gleu::{corpus_gleu, gleu, gleu_stats, GleuStats, DEFAULT_MAX_ORDER};
pub use m2::{parse_m2, read_m2, GoldEdit, M2Sentence};
pub use score::{f_beta, score_edits, MetricReport, DEFAULT_BETA};
