//! Effective selection config: built-in defaults, then the TOML file, then
//! command-line flags.

use std::path::Path;

use lasvm_core::SelectionConfig;

use crate::error::{CliError, Result};
use crate::SelectFlags;

pub fn load_file(path: &Path) -> Result<SelectionConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|source| CliError::Toml {
        path: path.to_owned(),
        source,
    })
}

pub fn apply_flags(mut cfg: SelectionConfig, f: &SelectFlags) -> SelectionConfig {
    if let Some(v) = f.t1_offset {
        cfg.t1_offset = v;
    }
    if let Some(v) = f.t2 {
        cfg.removal_threshold = v;
    }
    if let Some(v) = f.delta {
        cfg.step_size = Some(v);
    }
    if let Some(v) = f.pool_size {
        cfg.pool_size = v;
    }
    if let Some(v) = f.budget {
        cfg.iteration_budget = Some(v);
    }
    if let Some(v) = f.min_features {
        cfg.min_features = v;
    }
    if let Some(v) = f.seed {
        cfg.seed = v;
    }
    if let Some(v) = f.svm_c {
        cfg.svm.c = v;
    }
    if let Some(v) = f.svm_epochs {
        cfg.svm.max_epochs = v;
    }
    if let Some(v) = f.svm_tolerance {
        cfg.svm.tolerance = v;
    }
    if f.recalibrate {
        cfg.recalibrate = true;
    }
    if let Some(v) = f.normal_quota {
        cfg.subset.normal_quota = v;
    }
    if let Some(v) = f.dos_quota {
        cfg.subset.dos_quota = v;
    }
    if let Some(v) = f.timing_repeats {
        cfg.timing_repeats = v;
    }
    cfg
}

pub fn resolve(file: Option<&Path>, flags: &SelectFlags) -> Result<SelectionConfig> {
    let base = match file {
        Some(path) => load_file(path)?,
        None => SelectionConfig::default(),
    };
    let cfg = apply_flags(base, flags);
    cfg.validate()?;
    Ok(cfg)
}
