//! IO, file formats, and the parallel sweep harness for the CDD-V-OFDM
//! simulator.
//!
//! Everything numeric lives in `vofdm-core`; this crate adds the config
//! file format, channel dump/load, CSV output, worker-parallel sweeps with
//! reproducible counts, runtime verification suites, and the `vofdm` CLI.

pub mod channel_io;
pub mod config_file;
pub mod csvout;
pub mod manifest;
pub mod sweep;
pub mod verify;

use thiserror::Error;

/// Errors surfaced by the IO and orchestration layer.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] vofdm_core::Error),
    #[error("{0}")]
    Invalid(String),
}

pub type SimResult<T> = Result<T, SimError>;
