//! Run manifests: a stable digest over every simulation-affecting
//! parameter, for tagging output files and spotting config drift.

use std::fmt;
use std::time::{SystemTime, UNIX_EPOCH};

use sha2::{Digest, Sha256};
use vofdm_core::montecarlo::SweepSpec;

#[derive(Debug, Clone)]
pub struct RunManifest {
    pub config_hash: String,
    pub out_path: String,
    pub timestamp_unix: u64,
    pub summary: String,
}

impl RunManifest {
    pub fn new(spec: &SweepSpec, out_path: &str) -> Self {
        let timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            config_hash: config_hash(spec),
            out_path: out_path.to_string(),
            timestamp_unix,
            summary: canonical_string(spec),
        }
    }
}

impl fmt::Display for RunManifest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# config_hash = {}", self.config_hash)?;
        writeln!(f, "# out = {}", self.out_path)?;
        writeln!(f, "# timestamp_unix = {}", self.timestamp_unix)?;
        write!(f, "# {}", self.summary)
    }
}

/// Canonical parameter string; any change to it changes the hash.
fn canonical_string(spec: &SweepSpec) -> String {
    let shifts: Vec<String> = spec.cfg.delta_bar.iter().map(|d| d.to_string()).collect();
    let grid: Vec<String> = spec.snr_grid_db.iter().map(|s| format!("{s}")).collect();
    format!(
        "n={} k={} nt={} l={} gamma={} delta_bar={} rate_bits={} mode={} detector={} snr_db=[{}] max_trials={} target_errors={} seed={} noiseless={}",
        spec.cfg.n,
        spec.cfg.k,
        spec.cfg.nt,
        spec.cfg.l,
        spec.cfg.gamma,
        shifts.join(","),
        spec.cfg.rate_bits,
        spec.mode.as_str(),
        spec.detector.as_str(),
        grid.join(","),
        spec.max_trials,
        spec.target_errors,
        spec.master_seed,
        spec.noiseless
    )
}

pub fn config_hash(spec: &SweepSpec) -> String {
    let digest = Sha256::digest(canonical_string(spec).as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}
