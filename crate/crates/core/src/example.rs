use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Revision,
    RoundTrip,
}

/// One source/target training pair. Serialised as one JSON Lines record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExamplePair {
    pub source: String,
    pub target: String,
    pub page_id: u64,
    pub older_rev: u64,
    pub newer_rev: u64,
    pub is_identity: bool,
    pub provenance: Provenance,
}

impl ExamplePair {
    pub fn new(
        source: String,
        target: String,
        page_id: u64,
        older_rev: u64,
        newer_rev: u64,
        provenance: Provenance,
    ) -> Self {
        let is_identity = source == target;
        ExamplePair { source, target, page_id, older_rev, newer_rev, is_identity, provenance }
    }

    /// Replaces the source side, keeping `is_identity` consistent.
    pub fn with_source(mut self, source: String) -> Self {
        self.is_identity = source == self.target;
        self.source = source;
        self
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("ExamplePair serialises")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_field_names() {
        let pair = ExamplePair::new("a b".into(), "a c".into(), 7, 1, 2, Provenance::Revision);
        assert_eq!(
            pair.to_json_line(),
            r#"{"source":"a b","target":"a c","page_id":7,"older_rev":1,"newer_rev":2,"is_identity":false,"provenance":"revision"}"#
        );
        let rt = ExamplePair::new("x".into(), "x".into(), 0, 0, 0, Provenance::RoundTrip);
        assert!(rt.to_json_line().contains(r#""is_identity":true,"provenance":"round_trip""#));
    }

    #[test]
    fn with_source_updates_identity_flag() {
        let pair = ExamplePair::new("a".into(), "a".into(), 0, 0, 0, Provenance::Revision);
        assert!(pair.is_identity);
        let pair = pair.with_source("b".into());
        assert!(!pair.is_identity);
    }
}
