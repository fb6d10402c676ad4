//! JSON parameter store keyed by state label and separation.
//!
//! Each document has the layout
//!
//! ```json
//! { "label": "(0,0,0,+)", "designation": "1sσg", "R": 2.0,
//!   "params": { "alpha": …, "gamma": …, "a1": …, "a2": …, "b2": …, "b3": …, "p": … },
//!   "energy": -1.205…, "p": 1.485…, "A": 0.811…,
//!   "meta": { "git_rev": "…", "rule_N": 64 } }
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::trialfn::TrialParams;
use crate::variational::OptimizationResult;

/// Environment variable naming the store directory.
pub const DATA_DIR_VAR: &str = "TWOCENTER_DATA_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreMeta {
    pub git_rev: String,
    #[serde(rename = "rule_N")]
    pub rule_n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredParams {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub designation: Option<String>,
    #[serde(rename = "R")]
    pub r: f64,
    pub params: TrialParams,
    pub energy: f64,
    pub p: f64,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    pub meta: StoreMeta,
}

impl StoredParams {
    pub fn from_result(res: &OptimizationResult, a: Option<f64>, rule_n: usize) -> Self {
        StoredParams {
            label: res.label.to_string(),
            designation: res.label.designation().map(str::to_string),
            r: res.setup.r,
            params: res.params.clone(),
            energy: res.energy.e_total,
            p: res.energy.p,
            a,
            meta: StoreMeta { git_rev: git_rev().to_string(), rule_n },
        }
    }

    /// File name used inside the store directory.
    pub fn file_name(&self) -> String {
        let key = self.label.parse::<crate::model::StateLabel>().map(|l| l.key()).unwrap_or_else(|_| self.label.clone());
        format!("{}_R{}.json", key, self.r)
    }
}

/// Revision baked in at build time through `TWOCENTER_GIT_REV`, else "unknown".
pub fn git_rev() -> &'static str {
    option_env!("TWOCENTER_GIT_REV").unwrap_or("unknown")
}

/// Store directory from the environment, defaulting to `./twocenter-data`.
pub fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_VAR).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("twocenter-data"))
}

pub fn to_json(doc: &StoredParams) -> Result<String> {
    Ok(serde_json::to_string_pretty(doc)? + "\n")
}

pub fn save(dir: &Path, doc: &StoredParams) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(doc.file_name());
    fs::write(&path, to_json(doc)?)?;
    Ok(path)
}

pub fn load(path: &Path) -> Result<StoredParams> {
    Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
}
