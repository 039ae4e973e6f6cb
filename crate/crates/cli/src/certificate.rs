use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "qsym";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Self-contained record of one check: the parameters that reproduce it and
/// every value it computed.
#[derive(Serialize)]
pub struct Certificate<'a, P: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    /// Unix seconds; `SOURCE_DATE_EPOCH` pins it.
    pub timestamp: u64,
    pub kind: &'static str,
    pub parameters: &'a P,
    pub report: &'a R,
    pub verdict: bool,
}

impl<'a, P: Serialize, R: Serialize> Certificate<'a, P, R> {
    pub fn new(kind: &'static str, parameters: &'a P, report: &'a R, verdict: bool) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            timestamp: timestamp(),
            kind,
            parameters,
            report,
            verdict,
        }
    }

    pub fn to_json(&self) -> Result<String, String> {
        serde_json::to_string_pretty(self)
            .map(|s| s + "\n")
            .map_err(|e| e.to_string())
    }
}

pub fn timestamp() -> u64 {
    if let Some(pinned) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse().ok())
    {
        return pinned;
    }
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// File name derived from the SHA-256 of the compact parameter JSON.
pub fn content_name<P: Serialize>(kind: &str, parameters: &P) -> Result<String, String> {
    let bytes = serde_json::to_vec(parameters).map_err(|e| e.to_string())?;
    let mut hasher = Sha256::new();
    hasher.update(kind.as_bytes());
    hasher.update(b"\0");
    hasher.update(&bytes);
    let digest = hasher.finalize();
    Ok(format!("{}.json", hex::encode(&digest[..8])))
}

/// Writes `contents` to `dir/name` through a temporary file and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, String> {
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let io = |e: std::io::Error| format!("writing {}: {e}", target.display());
    let mut file = fs::File::create(&tmp).map_err(io)?;
    file.write_all(contents.as_bytes()).map_err(io)?;
    file.sync_all().map_err(io)?;
    fs::rename(&tmp, &target).map_err(io)?;
    Ok(target)
}
