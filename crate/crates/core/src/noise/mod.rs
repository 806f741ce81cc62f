//! Spelling corruption, identity downsampling and probabilistic edit rules.

mod identity;
mod rules;
mod spelling;

pub(crate) use identity::keep_identity;
pub use identity::{downsample_identities, expected_identity_share, DEFAULT_IDENTITY_KEEP_PROB};
pub use rules::{apply_edit_rules, extract_edit_rules, EditRule, RuleExtractionConfig, RuleIndex};
pub use spelling::{corrupt_spelling, corrupt_spelling_counted, SpellCounts, SpellNoiseConfig, SpellOp};
