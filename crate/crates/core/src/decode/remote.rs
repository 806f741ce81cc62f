use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{Hypothesis, Scorer};
use crate::error::{Error, Result};

#[derive(Serialize)]
struct NbestRequest<'a> {
    input: &'a str,
    beam: usize,
}

#[derive(Deserialize)]
struct NbestResponse {
    nbest: Vec<Hypothesis>,
}

/// Scorer served over HTTP: `POST {"input", "beam"} -> {"nbest": [...]}`.
pub struct RemoteScorer {
    endpoint: String,
    agent: ureq::Agent,
}

impl RemoteScorer {
    pub fn new(endpoint: impl Into<String>, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        RemoteScorer { endpoint: endpoint.into(), agent }
    }
}

impl Scorer for RemoteScorer {
    fn nbest(&self, input: &str, beam: usize) -> Result<Vec<Hypothesis>> {
        let response: NbestResponse = self
            .agent
            .post(&self.endpoint)
            .send_json(&NbestRequest { input, beam })
            .map_err(|e| Error::Provider(e.to_string()))?
            .body_mut()
            .read_json()
            .map_err(|e| Error::Provider(e.to_string()))?;
        let mut nbest = response.nbest;
        if nbest.iter().any(|h| !(h.cost.is_finite() && h.cost >= 0.0)) {
            return Err(Error::Provider("remote scorer returned an invalid cost".into()));
        }
        nbest.sort_by(|a, b| a.cost.total_cmp(&b.cost));
        nbest.truncate(beam);
        Ok(nbest)
    }
}
