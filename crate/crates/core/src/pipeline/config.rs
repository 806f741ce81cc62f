use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::decode::DecodeConfig;
use crate::error::{Error, Result};
use crate::extract::{DEFAULT_CUT_PROBABILITY, DEFAULT_MAX_WORDPIECES};
use crate::ingest::{DEFAULT_DOWNSAMPLE_BASE, DEFAULT_MAX_PAGE_BYTES};
use crate::noise::{SpellNoiseConfig, DEFAULT_IDENTITY_KEEP_PROB};
use crate::rtt::{RttConfig, DEFAULT_IDENTITY_FRACTION};

pub const DEFAULT_TOKEN_ENV: &str = "GECGEN_PROVIDER_TOKEN";

/// Everything that influences pipeline output. Loaded from TOML; every
/// section and field is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct PipelineConfig {
    pub global_seed: u64,
    /// Worker threads; 0 uses one per available core. Never affects output.
    pub workers: usize,
    pub ingest: IngestSettings,
    pub extract: ExtractSettings,
    pub noise: NoiseSettings,
    pub rtt: RttSettings,
    pub decode: DecodeConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSettings {
    pub max_page_bytes: u64,
    pub downsample_base: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractSettings {
    pub p_cut: f64,
    pub max_wordpieces: usize,
    pub max_edit_distance: Option<usize>,
    /// Merges file used to count wordpieces; whitespace words otherwise.
    pub subword_model: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSettings {
    pub spelling: SpellNoiseConfig,
    pub keep_prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RttSettings {
    pub bridge_lang: String,
    pub identity_fraction: f64,
    pub spelling: SpellNoiseConfig,
    /// JSON Lines of edit rules applied after translation.
    pub edit_rules: Option<PathBuf>,
    pub provider: ProviderSettings,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderSettings {
    pub endpoint: Option<String>,
    /// JSON array of mock phrase entries; takes precedence over `endpoint`.
    pub mock_table: Option<PathBuf>,
    /// Environment variable holding a bearer token.
    pub token_env: String,
    pub timeout_secs: u64,
    pub max_in_flight: usize,
}

impl Default for IngestSettings {
    fn default() -> Self {
        IngestSettings { max_page_bytes: DEFAULT_MAX_PAGE_BYTES, downsample_base: DEFAULT_DOWNSAMPLE_BASE }
    }
}

impl Default for ExtractSettings {
    fn default() -> Self {
        ExtractSettings {
            p_cut: DEFAULT_CUT_PROBABILITY,
            max_wordpieces: DEFAULT_MAX_WORDPIECES,
            max_edit_distance: None,
            subword_model: None,
        }
    }
}

impl Default for NoiseSettings {
    fn default() -> Self {
        NoiseSettings { spelling: SpellNoiseConfig::revision(), keep_prob: DEFAULT_IDENTITY_KEEP_PROB }
    }
}

impl Default for RttSettings {
    fn default() -> Self {
        RttSettings {
            bridge_lang: "ja".into(),
            identity_fraction: DEFAULT_IDENTITY_FRACTION,
            spelling: SpellNoiseConfig::round_trip(),
            edit_rules: None,
            provider: ProviderSettings::default(),
        }
    }
}

impl Default for ProviderSettings {
    fn default() -> Self {
        ProviderSettings {
            endpoint: None,
            mock_table: None,
            token_env: DEFAULT_TOKEN_ENV.into(),
            timeout_secs: 60,
            max_in_flight: 8,
        }
    }
}

fn probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::config(format!("{name} = {p} is not a probability")))
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ingest.downsample_base > 1.0) {
            return Err(Error::config("ingest.downsample_base must exceed 1"));
        }
        if self.ingest.max_page_bytes == 0 {
            return Err(Error::config("ingest.max_page_bytes must be positive"));
        }
        probability("extract.p_cut", self.extract.p_cut)?;
        probability("noise.keep_prob", self.noise.keep_prob)?;
        self.noise.spelling.validate()?;
        self.rtt_config().validate()?;
        if self.rtt.provider.max_in_flight == 0 {
            return Err(Error::config("rtt.provider.max_in_flight must be positive"));
        }
        self.decode.validate()
    }

    pub fn rtt_config(&self) -> RttConfig {
        RttConfig {
            bridge_lang: self.rtt.bridge_lang.clone(),
            identity_fraction: self.rtt.identity_fraction,
            spell_noise: self.rtt.spelling.clone(),
        }
    }

    /// SHA-256 of the canonical JSON form of the resolved configuration.
    /// The worker count is left out since it cannot change any output.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(&PipelineConfig { workers: 0, ..self.clone() }).expect("config serialises");
        hex::encode(Sha256::digest(canonical))
    }
}
