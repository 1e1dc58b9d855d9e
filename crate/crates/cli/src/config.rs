//! Run configuration: defaults, key=value config file, CLI overrides.
//! Precedence: CLI flag > config file > default. The resolved configuration
//! is serialized into every output artifact for provenance.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::Cli;

#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub form: String,
    pub n_max: usize,
    pub out_dir: PathBuf,
    pub cache_dir: PathBuf,
    pub workers: usize,
    pub target_accuracy: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            form: "delta".into(),
            n_max: 100_000,
            out_dir: PathBuf::from("out"),
            cache_dir: PathBuf::from("cache"),
            workers: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
            target_accuracy: 1e-10,
        }
    }
}

impl RunConfig {
    pub fn resolve(cli: &Cli) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &cli.config {
            let entries = parse_config_file(path)?;
            for (key, value) in entries {
                match key.as_str() {
                    "form" => cfg.form = value,
                    "n_max" => cfg.n_max = value.parse()?,
                    "out_dir" => cfg.out_dir = PathBuf::from(value),
                    "cache_dir" => cfg.cache_dir = PathBuf::from(value),
                    "workers" => cfg.workers = value.parse()?,
                    "target_accuracy" => cfg.target_accuracy = value.parse()?,
                    other => anyhow::bail!(twistl::Error::Validation(format!(
                        "unknown config key \"{other}\""
                    ))),
                }
            }
        }
        if let Some(v) = &cli.form {
            cfg.form = v.clone();
        }
        if let Some(v) = cli.n_max {
            cfg.n_max = v;
        }
        if let Some(v) = &cli.out_dir {
            cfg.out_dir = v.clone();
        }
        if let Some(v) = &cli.cache_dir {
            cfg.cache_dir = v.clone();
        }
        if let Some(v) = cli.workers {
            cfg.workers = v;
        }
        if let Some(v) = cli.target_accuracy {
            cfg.target_accuracy = v;
        }
        if cfg.workers == 0 {
            anyhow::bail!(twistl::Error::Validation("workers must be >= 1".into()));
        }
        if !(cfg.target_accuracy > 0.0 && cfg.target_accuracy < 1e-4) {
            anyhow::bail!(twistl::Error::Validation(
                "target_accuracy must lie in (0, 1e-4)".into()
            ));
        }
        Ok(cfg)
    }
}

fn parse_config_file(path: &Path) -> anyhow::Result<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        twistl::Error::Validation(format!("cannot read config {}: {e}", path.display()))
    })?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            anyhow::bail!(twistl::Error::Validation(format!(
                "config line {} is not key=value: {line}",
                lineno + 1
            )));
        };
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

/// Parse helper kept crate-local for tests.
#[allow(dead_code)]
pub fn parse_for_tests(text: &str) -> HashMap<String, String> {
    text.lines()
        .filter_map(|l| {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                return None;
            }
            l.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        })
        .collect()
}
