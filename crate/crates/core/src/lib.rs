//! Baseband simulation core for cyclic-delay-diversity vector OFDM
//! (CDD-V-OFDM).
//!
//! Vector OFDM groups `K` consecutive symbols into vectors and applies the
//! `N`-point IDFT/DFT component-wise, turning an ISI channel into `N`
//! constant `K x K` matrix subchannels. Cyclic delay diversity transmits a
//! cyclically delayed copy of the same block from every antenna, so the
//! whole multi-antenna link collapses to a single equivalent ISI channel
//! that carries both spatial and multipath diversity.
//!
//! Module map:
//!
//! * [`config`] - system parameters and validation,
//! * [`constellation`] - Gray-labeled unit-power symbol alphabets,
//! * [`modem`] - the transmit chain and its receive front-end,
//! * [`channel`] - multipath MIMO channel and the equivalent-channel math,
//! * [`receiver`] - per-subcarrier MMSE/ML detection,
//! * [`montecarlo`] - seeded SER estimation and diversity-order fitting.
//!
//! The crate is `no_std` (with `alloc`): everything is a pure function over
//! in-memory buffers, and every operation that draws randomness takes an
//! explicit seed. IO, file formats, the CLI, and the parallel sweep harness
//! live in the companion `vofdm-sim` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod channel;
pub mod config;
pub mod constellation;
mod error;
mod fft;
pub mod linalg;
pub mod modem;
pub mod montecarlo;
pub mod receiver;
pub mod seed;

pub use error::{Error, Result};
pub use num_complex::Complex64;
