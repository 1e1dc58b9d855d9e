//! Artifact emission: atomic writes (temp + rename), provenance headers, and
//! the 17-significant-digit float format used for reproducibility diffing.

use std::path::PathBuf;

use serde::Serialize;

use crate::config::RunConfig;

/// 17 significant digits: round-trips any f64 exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub struct OutputSink {
    dir: PathBuf,
}

#[derive(Serialize)]
struct JsonEnvelope<'a, T: Serialize> {
    config: &'a RunConfig,
    timestamp: String,
    payload: &'a T,
}

fn timestamp() -> String {
    // seconds since the epoch; the only field reports may differ in
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    now.to_string()
}

impl OutputSink {
    pub fn new(cfg: &RunConfig) -> anyhow::Result<OutputSink> {
        std::fs::create_dir_all(&cfg.out_dir)?;
        Ok(OutputSink {
            dir: cfg.out_dir.clone(),
        })
    }

    fn write_atomic(&self, name: &str, bytes: &[u8]) -> anyhow::Result<PathBuf> {
        let path = self.dir.join(name);
        let tmp = self.dir.join(format!("{name}.tmp"));
        std::fs::write(&tmp, bytes)?;
        std::fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(
        &self,
        name: &str,
        payload: &T,
        cfg: &RunConfig,
    ) -> anyhow::Result<PathBuf> {
        let env = JsonEnvelope {
            config: cfg,
            timestamp: timestamp(),
            payload,
        };
        let mut bytes = serde_json::to_vec_pretty(&env)?;
        bytes.push(b'\n');
        self.write_atomic(name, &bytes)
    }

    pub fn write_csv(&self, name: &str, rows: &[String], cfg: &RunConfig) -> anyhow::Result<PathBuf> {
        let mut text = String::new();
        text.push_str(&format!(
            "# config: {}\n# timestamp: {}\n",
            serde_json::to_string(cfg)?,
            timestamp()
        ));
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        self.write_atomic(name, text.as_bytes())
    }
}
