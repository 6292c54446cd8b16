//! System parameters and validation.
//!
//! Symbols follow the usual V-OFDM conventions: `N` vector subcarriers of
//! `K` symbols each, `N_t` transmit antennas, per-antenna channel length
//! `L` taps, cyclic prefix of `Gamma` vectors, and a vector-level cyclic
//! delay `delta_bar[m]` per antenna.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Raw system parameters, as read from a config file or built in code.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// Number of vector subcarriers (component-wise DFT size).
    pub n: usize,
    /// Vector size: symbols per vector.
    pub k: usize,
    /// Transmit antenna count (a single receive antenna is assumed).
    pub nt: usize,
    /// ISI channel length per antenna, in taps.
    pub l: usize,
    /// Cyclic prefix length, in vectors.
    pub gamma: usize,
    /// Vector-level cyclic delay per antenna; entry 0 must be 0.
    pub delta_bar: Vec<usize>,
    /// Transmission rate, bits per symbol.
    pub rate_bits: u32,
    /// Operating SNR rho (linear, not dB).
    pub rho: f64,
}

impl SystemConfig {
    /// Config with the default CP length `Gamma = ceil(L/K) + 1` and the
    /// minimal non-overlapping delays `delta_bar[m] = m * ceil(L/K)`.
    pub fn new(n: usize, k: usize, nt: usize, l: usize, rate_bits: u32) -> Self {
        let per_antenna = if k == 0 { 0 } else { l.div_ceil(k) };
        SystemConfig {
            n,
            k,
            nt,
            l,
            gamma: per_antenna + 1,
            delta_bar: (0..nt).map(|m| m * per_antenna).collect(),
            rate_bits,
            rho: 1.0,
        }
    }

    pub fn with_gamma(mut self, gamma: usize) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_shifts(mut self, delta_bar: Vec<usize>) -> Self {
        self.delta_bar = delta_bar;
        self
    }

    pub fn with_rho(mut self, rho: f64) -> Self {
        self.rho = rho;
        self
    }

    /// Check every invariant and compute the derived fields.
    pub fn validate(&self) -> Result<ValidatedConfig> {
        self.check_positive()?;
        if !self.n.is_multiple_of(self.k) {
            return Err(Error::NotDivisible {
                n: self.n,
                k: self.k,
            });
        }
        let required = self.l.div_ceil(self.k);
        if self.gamma < required {
            return Err(Error::CpTooShort {
                gamma: self.gamma,
                required,
            });
        }
        if self.gamma >= self.n {
            return Err(Error::PrefixTooLong {
                gamma: self.gamma,
                n: self.n,
            });
        }
        if self.delta_bar.len() != self.nt {
            return Err(Error::ShiftCountMismatch {
                expected: self.nt,
                actual: self.delta_bar.len(),
            });
        }
        if self.delta_bar[0] != 0 {
            return Err(Error::FirstShiftNonzero {
                shift: self.delta_bar[0],
            });
        }
        for &shift in &self.delta_bar {
            if shift >= self.n {
                return Err(Error::ShiftOutOfRange {
                    shift,
                    n: self.n,
                });
            }
        }
        Ok(ValidatedConfig {
            full_diversity_shifts: self.shifts_give_full_diversity(),
            delta: self.delta_bar.iter().map(|&d| d * self.k).collect(),
            n0: self.n / self.k,
            raw: self.clone(),
        })
    }

    /// Like [`validate`](Self::validate), but additionally reject antenna
    /// counts beyond the full-diversity capacity `floor(N*K/L)`.
    pub fn validate_full_diversity(&self) -> Result<ValidatedConfig> {
        self.check_positive()?;
        let max = self.n * self.k / self.l;
        if self.nt > max {
            return Err(Error::TooManyAntennas { nt: self.nt, max });
        }
        self.validate()
    }

    fn check_positive(&self) -> Result<()> {
        for (name, value) in [
            ("n", self.n),
            ("k", self.k),
            ("nt", self.nt),
            ("l", self.l),
            ("gamma", self.gamma),
        ] {
            if value == 0 {
                return Err(Error::NonPositive { name });
            }
        }
        if self.rate_bits == 0 {
            return Err(Error::NonPositive { name: "rate_bits" });
        }
        if self.rho.is_nan() || self.rho <= 0.0 {
            return Err(Error::NonPositive { name: "rho" });
        }
        Ok(())
    }

    /// True iff `delta_bar[m] = m * delta` for some integer `delta` with
    /// `ceil(L/K) <= delta <= N/N_t`. Shifts are integer vector counts, so
    /// the left end of the interval is rounded up.
    fn shifts_give_full_diversity(&self) -> bool {
        let min_delta = self.l.div_ceil(self.k);
        if self.nt == 1 {
            return min_delta <= self.n;
        }
        let delta = self.delta_bar[1];
        if delta < min_delta || delta * self.nt > self.n {
            return false;
        }
        self.delta_bar
            .iter()
            .enumerate()
            .all(|(m, &d)| d == m * delta)
    }
}

/// A [`SystemConfig`] that passed validation, plus derived quantities.
///
/// Immutable after construction; safe to share across workers.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidatedConfig {
    raw: SystemConfig,
    n0: usize,
    delta: Vec<usize>,
    full_diversity_shifts: bool,
}

impl ValidatedConfig {
    pub fn n(&self) -> usize {
        self.raw.n
    }

    pub fn k(&self) -> usize {
        self.raw.k
    }

    pub fn nt(&self) -> usize {
        self.raw.nt
    }

    pub fn l(&self) -> usize {
        self.raw.l
    }

    pub fn gamma(&self) -> usize {
        self.raw.gamma
    }

    pub fn rate_bits(&self) -> u32 {
        self.raw.rate_bits
    }

    pub fn rho(&self) -> f64 {
        self.raw.rho
    }

    /// Vector-level delays, one per antenna.
    pub fn delta_bar(&self) -> &[usize] {
        &self.raw.delta_bar
    }

    /// Symbol-level delays `delta[m] = K * delta_bar[m]`.
    pub fn delta(&self) -> &[usize] {
        &self.delta
    }

    /// `N_0 = N / K`: vectors per channel polyphase.
    pub fn n0(&self) -> usize {
        self.n0
    }

    /// True iff the delays satisfy the full-diversity progression.
    pub fn full_diversity_shifts(&self) -> bool {
        self.full_diversity_shifts
    }

    /// Payload length `N * K` in symbols.
    pub fn nk(&self) -> usize {
        self.raw.n * self.raw.k
    }

    /// Transmitted frame length `(N + Gamma) * K` in samples.
    pub fn frame_len(&self) -> usize {
        (self.raw.n + self.raw.gamma) * self.raw.k
    }

    /// Shortest admissible CP, `ceil(L/K)` vectors.
    pub fn min_cp_len(&self) -> usize {
        self.raw.l.div_ceil(self.raw.k)
    }

    /// Per-antenna amplitude scale `1/sqrt(N_t)` (total transmit power 1).
    pub fn antenna_scale(&self) -> f64 {
        (self.raw.nt as f64).sqrt().recip()
    }

    /// Copy of the raw parameters.
    pub fn to_system_config(&self) -> SystemConfig {
        self.raw.clone()
    }

    /// Same parameters at a different operating SNR.
    pub fn with_rho(&self, rho: f64) -> ValidatedConfig {
        assert!(rho > 0.0, "rho must be positive");
        let mut out = self.clone();
        out.raw.rho = rho;
        out
    }
}
