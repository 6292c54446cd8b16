//! Transmit chain and receive front-end.
//!
//! TX: block the payload into `K`-vectors, component-wise IDFT of size `N`,
//! per-antenna cyclic delay of whole vectors, CP insertion, `1/sqrt(N_t)`
//! amplitude scale. RX front-end: CP removal and component-wise DFT.
//!
//! The per-antenna cyclic shift is applied post-IDFT in the time domain,
//! exactly as the chain orders it; it is a *delay*, so antenna `m`'s
//! equivalent channel is the CIR placed at symbol offset `K * delta_bar[m]`
//! (see [`crate::channel::build_equivalent_channel`]).

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::config::ValidatedConfig;
use crate::fft;
use crate::{Error, Result};

/// `N` vectors of `K` symbols each; flat layout `data[k + n*K]` so that
/// flattening reproduces the source sequence exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorBlock {
    data: Vec<Complex64>,
    k: usize,
}

impl VectorBlock {
    pub fn from_flat(data: Vec<Complex64>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::NonPositive { name: "k" });
        }
        if !data.len().is_multiple_of(k) {
            return Err(Error::LengthMismatch {
                expected: data.len().next_multiple_of(k),
                actual: data.len(),
            });
        }
        Ok(VectorBlock { data, k })
    }

    /// Number of vectors.
    pub fn n(&self) -> usize {
        self.data.len() / self.k
    }

    /// Symbols per vector.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn vector(&self, n: usize) -> &[Complex64] {
        &self.data[n * self.k..(n + 1) * self.k]
    }

    pub fn as_flat(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<Complex64> {
        self.data
    }
}

/// Block a symbol sequence into `K`-vectors: `vectors[n][k] = seq[k + n*K]`.
pub fn block_into_vectors(seq: &[Complex64], k: usize) -> Result<VectorBlock> {
    VectorBlock::from_flat(seq.to_vec(), k)
}

/// Component-wise IDFT of size `N`, unitary normalization `1/sqrt(N)`:
/// `out_k(q) = (1/sqrt(N)) * sum_n in_k(n) exp(+j 2 pi n q / N)`.
pub fn component_idft(vb: &VectorBlock) -> VectorBlock {
    component_transform(vb, false)
}

/// Component-wise DFT of size `N`; inverse of [`component_idft`].
pub fn component_dft(vb: &VectorBlock) -> VectorBlock {
    component_transform(vb, true)
}

fn component_transform(vb: &VectorBlock, forward: bool) -> VectorBlock {
    let (n, k) = (vb.n(), vb.k());
    let scale = (n as f64).sqrt().recip();
    let mut out = vb.clone();
    let mut scratch = Vec::with_capacity(n);
    for comp in 0..k {
        scratch.clear();
        scratch.extend((0..n).map(|q| vb.data[q * k + comp]));
        fft::transform(&mut scratch, forward);
        for (q, &sample) in scratch.iter().enumerate() {
            out.data[q * k + comp] = sample * scale;
        }
    }
    out
}

/// Cyclic delay by `delta_bar` whole vectors: output vector `q` is input
/// vector `(q - delta_bar) mod N`.
pub fn cyclic_shift_vectors(vb: &VectorBlock, delta_bar: usize) -> Result<VectorBlock> {
    let (n, k) = (vb.n(), vb.k());
    if delta_bar >= n {
        return Err(Error::ShiftOutOfRange {
            shift: delta_bar,
            n,
        });
    }
    let mut data = Vec::with_capacity(vb.data.len());
    for q in 0..n {
        let src = (q + n - delta_bar) % n;
        data.extend_from_slice(vb.vector(src));
    }
    Ok(VectorBlock { data, k })
}

/// Prepend the last `Gamma` vectors and flatten: `(N + Gamma) * K` samples.
pub fn add_cyclic_prefix(vb: &VectorBlock, gamma: usize) -> Result<Vec<Complex64>> {
    let n = vb.n();
    if gamma >= n {
        return Err(Error::PrefixTooLong { gamma, n });
    }
    let k = vb.k();
    let mut out = Vec::with_capacity((n + gamma) * k);
    out.extend_from_slice(&vb.data[(n - gamma) * k..]);
    out.extend_from_slice(&vb.data);
    Ok(out)
}

/// Drop the first `Gamma * K` samples and block the remaining `N * K`.
pub fn remove_cyclic_prefix(seq: &[Complex64], cfg: &ValidatedConfig) -> Result<VectorBlock> {
    if seq.len() != cfg.frame_len() {
        return Err(Error::LengthMismatch {
            expected: cfg.frame_len(),
            actual: seq.len(),
        });
    }
    block_into_vectors(&seq[cfg.gamma() * cfg.k()..], cfg.k())
}

/// Full transmit chain: one CP-prefixed frame per antenna, each scaled by
/// `1/sqrt(N_t)` so the summed transmit power stays 1.
pub fn transmit_frames(
    payload: &[Complex64],
    cfg: &ValidatedConfig,
) -> Result<Vec<Vec<Complex64>>> {
    if payload.len() != cfg.nk() {
        return Err(Error::LengthMismatch {
            expected: cfg.nk(),
            actual: payload.len(),
        });
    }
    let time = component_idft(&block_into_vectors(payload, cfg.k())?);
    let scale = cfg.antenna_scale();
    cfg.delta_bar()
        .iter()
        .map(|&shift| {
            let shifted = cyclic_shift_vectors(&time, shift)?;
            let mut frame = add_cyclic_prefix(&shifted, cfg.gamma())?;
            for sample in &mut frame {
                *sample *= scale;
            }
            Ok(frame)
        })
        .collect()
}
