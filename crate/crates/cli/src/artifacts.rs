//! Deterministic artifact writers. Every file carries a header block with
//! the tool version, a hash of the resolved configuration, and the seed, so
//! identical inputs reproduce identical bytes.

use std::path::{Path, PathBuf};

use serde::Serialize;

use rrlab_core::error::{Error, Result};
use rrlab_core::geometry::RatePolytope;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// FNV-1a over the canonical config string.
pub fn config_hash(config: &str) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in config.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub version: String,
    pub config_hash: String,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl Meta {
    pub fn new<C: Serialize>(config: &C, seed: u64) -> Meta {
        let config = serde_json::to_value(config).expect("config serializes");
        let canon = serde_json::to_string(&config).expect("value serializes");
        Meta { version: VERSION.to_string(), config_hash: config_hash(&canon), seed, config }
    }

    fn csv_header(&self) -> String {
        let config = serde_json::to_string(&self.config).expect("value serializes");
        format!(
            "# rrlab v{}\n# config_hash={}\n# seed={}\n# config={}\n",
            self.version, self.config_hash, self.seed, config
        )
    }
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, meta: &Meta, body: &T) -> Result<PathBuf> {
    #[derive(Serialize)]
    struct Wrapper<'a, T> {
        meta: &'a Meta,
        #[serde(flatten)]
        body: &'a T,
    }
    let path = dir.join(name);
    let text = serde_json::to_string_pretty(&Wrapper { meta, body })
        .map_err(|e| Error::InvalidInput(format!("serialize {name}: {e}")))?;
    std::fs::write(&path, text + "\n")
        .map_err(|e| Error::InvalidInput(format!("write {}: {e}", path.display())))?;
    Ok(path)
}

/// Vertex CSV: counter-clockwise `(R1, R2)` rows; the empty region is the
/// literal line `EMPTY`.
pub fn write_vertices_csv(
    dir: &Path,
    name: &str,
    meta: &Meta,
    poly: &RatePolytope,
) -> Result<PathBuf> {
    let mut text = meta.csv_header();
    text.push_str("r1,r2\n");
    if poly.is_empty() {
        text.push_str("EMPTY\n");
    } else {
        for (r1, r2) in &poly.vertices {
            text.push_str(&format!("{r1},{r2}\n"));
        }
    }
    let path = dir.join(name);
    std::fs::write(&path, text)
        .map_err(|e| Error::InvalidInput(format!("write {}: {e}", path.display())))?;
    Ok(path)
}

/// Covering CSV with one row per rate offset.
pub fn write_covering_csv(
    dir: &Path,
    name: &str,
    meta: &Meta,
    results: &[rrlab_core::covering::CoveringResult],
) -> Result<PathBuf> {
    let mut text = meta.csv_header();
    text.push_str("offset,n,trials,successes,success_rate\n");
    for r in results {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            r.offset, r.n, r.trials, r.successes, r.success_rate
        ));
    }
    let path = dir.join(name);
    std::fs::write(&path, text)
        .map_err(|e| Error::InvalidInput(format!("write {}: {e}", path.display())))?;
    Ok(path)
}
