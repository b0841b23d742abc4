//! Run configuration: what a command was asked to do, hashed into its outputs.

use std::collections::BTreeMap;

use anyhow::{Context, Result};
use cfraj_core::budget::{DigitBudget, DEFAULT_CYLINDER_BUDGET, DEFAULT_ENUMERATION_BUDGET};
use cfraj_core::lambda::{LambdaConfig, NuParams};
use cfraj_core::Profile;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const TOOL: &str = "cfraj";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    pub digits: u64,
    pub cylinders: u64,
    pub enumeration: u64,
    pub samples: usize,
}

impl Budgets {
    pub fn current(samples: usize) -> Self {
        Budgets {
            digits: DigitBudget::global().0,
            cylinders: DEFAULT_CYLINDER_BUDGET,
            enumeration: DEFAULT_ENUMERATION_BUDGET,
            samples,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<NuParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaConfig>,
    pub profile: Profile,
    pub seed: u64,
    pub budgets: Budgets,
    /// Command-specific arguments in canonical string form.
    #[serde(default)]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl RunConfig {
    pub fn new(command: &str, profile: Profile, seed: u64, samples: usize) -> Self {
        RunConfig {
            command: command.to_string(),
            nu: None,
            lambda: None,
            profile,
            seed,
            budgets: Budgets::current(samples),
            params: BTreeMap::new(),
            output: None,
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.insert(key.to_string(), value.to_string());
        self
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string(self).context("serializing run config")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing run config")
    }

    /// SHA-256 of the canonical JSON with the output path left out, so the
    /// same run written to different places carries the same hash.
    pub fn hash(&self) -> Result<String> {
        let mut c = self.clone();
        c.output = None;
        let digest = Sha256::digest(c.to_json()?.as_bytes());
        Ok(hex::encode(digest))
    }

    /// One-line provenance stamp for text outputs.
    pub fn stamp(&self) -> Result<String> {
        Ok(format!("{TOOL} {VERSION} config_hash={}", self.hash()?))
    }
}

/// SHA-256 of raw bytes, for inputs read from files.
pub fn file_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
