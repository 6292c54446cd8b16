//! Frequency-domain receiver.
//!
//! After CP removal and the component-wise DFT, subcarrier `q` obeys the
//! constant linear model `y(q) = H_eqv(q) x(q) + w(q)`. The `K x K` matrix
//! `H_eqv(q) = U_q^H diag(H_{q}, H_{q+N}, ..., H_{q+(K-1)N}) U_q` couples
//! the `K` aliases of subcarrier `q` in the `N*K`-point spectrum of the
//! equivalent channel; `U_q` has entry
//! `(1/sqrt(K)) exp(-j 2 pi m (q + s N) / (N K))` at row `s`, column `m`.
//! The `1/sqrt(N_t)` transmit scale is folded into the diagonal here so the
//! model describes the physical end-to-end link.
//!
//! Detection is linear MMSE per subcarrier followed by symbol-by-symbol
//! nearest-candidate decisions against bias-scaled candidates, with joint
//! ML over all `2^(R K)` candidate vectors as a small-`K` reference.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::EquivalentChannel;
use crate::config::ValidatedConfig;
use crate::constellation::Constellation;
use crate::linalg::CMat;
use crate::modem::VectorBlock;
use crate::{Error, Result};

/// Candidate-count cap for the exhaustive ML search.
pub const ML_SEARCH_LIMIT: u64 = 65_536;

/// The unitary factors `U_q` for all `N` subcarriers; they depend only on
/// `(N, K)`, so sweeps reuse one basis across trials.
#[derive(Debug, Clone)]
pub struct SubcarrierBasis {
    mats: Vec<CMat>,
}

impl SubcarrierBasis {
    pub fn new(n: usize, k: usize) -> Self {
        let nk = (n * k) as f64;
        let scale = (k as f64).sqrt().recip();
        let mats = (0..n)
            .map(|q| {
                CMat::from_fn(k, |s, m| {
                    let angle = -2.0 * core::f64::consts::PI * (m * (q + s * n)) as f64 / nk;
                    Complex64::new(angle.cos() * scale, angle.sin() * scale)
                })
            })
            .collect();
        SubcarrierBasis { mats }
    }

    pub fn unitary(&self, q: usize) -> &CMat {
        &self.mats[q]
    }

    pub fn n(&self) -> usize {
        self.mats.len()
    }
}

/// Per-subcarrier channel: unitary factor, diagonal spectrum samples, and
/// the dense matrix `H_eqv(q) = U_q^H diag U_q`.
#[derive(Debug, Clone)]
pub struct SubcarrierChannel {
    /// Subcarrier index `0..N`.
    pub q: usize,
    /// Unitary factor `U_q`.
    pub unitary: CMat,
    /// Spectrum samples `H_{q+kN}` on the diagonal (transmit scale included).
    pub diag: Vec<Complex64>,
    /// Dense matrix `H_eqv(q)`.
    pub matrix: CMat,
}

/// Build all `N` subcarrier channels from an equivalent channel.
pub fn subcarrier_matrices(
    eq: &EquivalentChannel,
    cfg: &ValidatedConfig,
) -> Vec<SubcarrierChannel> {
    subcarrier_matrices_with(eq, cfg, &SubcarrierBasis::new(cfg.n(), cfg.k()))
}

/// As [`subcarrier_matrices`], reusing a precomputed basis.
pub fn subcarrier_matrices_with(
    eq: &EquivalentChannel,
    cfg: &ValidatedConfig,
    basis: &SubcarrierBasis,
) -> Vec<SubcarrierChannel> {
    let (n, k) = (cfg.n(), cfg.k());
    debug_assert_eq!(eq.spectrum().len(), n * k);
    debug_assert_eq!(basis.n(), n);
    let scale = cfg.antenna_scale();
    (0..n)
        .map(|q| {
            let unitary = basis.unitary(q).clone();
            let diag: Vec<Complex64> =
                (0..k).map(|s| eq.spectrum()[q + s * n] * scale).collect();
            let matrix = unitary.hermitian().mul(&unitary.scale_rows(&diag));
            SubcarrierChannel {
                q,
                unitary,
                diag,
                matrix,
            }
        })
        .collect()
}

/// MMSE matrices `W_q = (H^H H + rho^-1 I)^-1 H^H` for every subcarrier,
/// plus the detection biases `C_{qK+k}`.
#[derive(Debug, Clone)]
pub struct EqualizerBank {
    /// One `K x K` equalizer per subcarrier.
    pub w: Vec<CMat>,
    /// Bias per symbol slot, `N*K` entries; identical within a subcarrier
    /// since the bias sum runs over the whole vector.
    pub c: Vec<f64>,
}

impl EqualizerBank {
    pub fn n(&self) -> usize {
        self.w.len()
    }

    pub fn k(&self) -> usize {
        if self.w.is_empty() {
            0
        } else {
            self.w[0].n()
        }
    }
}

/// Build the MMSE bank at operating SNR `rho` (linear; `inf` gives the
/// zero-forcing limit with bias exactly 1).
pub fn equalizer_bank(chans: &[SubcarrierChannel], rho: f64) -> Result<EqualizerBank> {
    let rho_inv = if rho.is_infinite() { 0.0 } else { rho.recip() };
    let mut w = Vec::with_capacity(chans.len());
    let mut c = Vec::with_capacity(chans.len());
    for chan in chans {
        let k = chan.matrix.n();
        let h_herm = chan.matrix.hermitian();
        let mut normal = h_herm.mul(&chan.matrix);
        for i in 0..k {
            normal[(i, i)] += Complex64::new(rho_inv, 0.0);
        }
        w.push(normal.solve(&h_herm)?);

        let bias = if rho_inv == 0.0 {
            1.0
        } else {
            chan.diag
                .iter()
                .map(|d| {
                    let p = d.norm_sqr();
                    p / (p + rho_inv)
                })
                .sum::<f64>()
                / k as f64
        };
        c.extend(core::iter::repeat_n(bias, k));
    }
    Ok(EqualizerBank { w, c })
}

/// Apply the bank: `est(q) = W_q y(q)` for every subcarrier.
pub fn mmse_equalize(rx: &VectorBlock, bank: &EqualizerBank) -> Result<VectorBlock> {
    if rx.n() != bank.n() || rx.k() != bank.k() {
        return Err(Error::DimensionMismatch {
            expected: bank.n() * bank.k(),
            actual: rx.n() * rx.k(),
        });
    }
    let mut data = Vec::with_capacity(rx.n() * rx.k());
    for q in 0..rx.n() {
        data.extend(bank.w[q].matvec(rx.vector(q)));
    }
    VectorBlock::from_flat(data, rx.k())
}

/// Symbol-by-symbol decisions: slot `qK+k` picks
/// `argmin_i | C_{qK+k} x(i) - est_k(q) |^2`, ties to the lowest index.
pub fn detect_symbols(
    est: &VectorBlock,
    bank: &EqualizerBank,
    constellation: &Constellation,
) -> Vec<usize> {
    let points = constellation.points();
    est.as_flat()
        .iter()
        .zip(&bank.c)
        .map(|(&y, &bias)| nearest_scaled(points, bias, y))
        .collect()
}

fn nearest_scaled(points: &[Complex64], bias: f64, y: Complex64) -> usize {
    let mut best = 0usize;
    let mut best_dist = f64::INFINITY;
    for (i, &p) in points.iter().enumerate() {
        let dist = (p * bias - y).norm_sqr();
        if dist < best_dist {
            best_dist = dist;
            best = i;
        }
    }
    best
}

/// Joint ML detection: per subcarrier, exhaustively minimize
/// `|| y(q) - H_eqv(q) x ||^2` over all `2^(R K)` candidate vectors.
///
/// Candidates are ordered lexicographically (slot 0 is the most significant
/// digit); exact ties resolve to the lowest candidate number.
pub fn ml_detect(
    rx: &VectorBlock,
    chans: &[SubcarrierChannel],
    constellation: &Constellation,
) -> Result<Vec<usize>> {
    let k = rx.k();
    let m = constellation.len() as u64;
    let candidates = m.checked_pow(k as u32).unwrap_or(u64::MAX);
    if k > 4 || candidates > ML_SEARCH_LIMIT {
        return Err(Error::SearchTooLarge {
            candidates,
            limit: ML_SEARCH_LIMIT,
        });
    }
    if rx.n() != chans.len() {
        return Err(Error::DimensionMismatch {
            expected: chans.len(),
            actual: rx.n(),
        });
    }
    let points = constellation.points();
    let mut out = Vec::with_capacity(rx.n() * k);
    let mut symbols = alloc::vec![Complex64::new(0.0, 0.0); k];
    for (q, chan) in chans.iter().enumerate() {
        let y = rx.vector(q);
        let mut best_code = 0u64;
        let mut best_dist = f64::INFINITY;
        for code in 0..candidates {
            let mut rem = code;
            for slot in (0..k).rev() {
                symbols[slot] = points[(rem % m) as usize];
                rem /= m;
            }
            let image = chan.matrix.matvec(&symbols);
            let dist: f64 = y
                .iter()
                .zip(&image)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum();
            if dist < best_dist {
                best_dist = dist;
                best_code = code;
            }
        }
        let mut rem = best_code;
        let base = out.len();
        out.resize(base + k, 0usize);
        for slot in (0..k).rev() {
            out[base + slot] = (rem % m) as usize;
            rem /= m;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_equivalent_channel, ChannelSet};
    use crate::config::SystemConfig;
    use crate::modem::block_into_vectors;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn identity_channel(cfg: &ValidatedConfig) -> Vec<SubcarrierChannel> {
        let mut taps = vec![c(0.0, 0.0); cfg.l()];
        taps[0] = c(1.0, 0.0);
        let ch = ChannelSet::new(vec![taps]).unwrap();
        subcarrier_matrices(&build_equivalent_channel(&ch, cfg), cfg)
    }

    #[test]
    fn basis_is_unitary() {
        for (n, k) in [(4usize, 1usize), (8, 2), (8, 4), (6, 3)] {
            let basis = SubcarrierBasis::new(n, k);
            for q in 0..n {
                let u = basis.unitary(q);
                let prod = u.mul(&u.hermitian());
                let eye = CMat::identity(k);
                for r in 0..k {
                    for col in 0..k {
                        assert!((prod[(r, col)] - eye[(r, col)]).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn k1_subcarrier_matrix_is_the_scalar_gain() {
        let cfg = SystemConfig::new(8, 1, 1, 3, 1).validate().unwrap();
        let ch = ChannelSet::new(vec![vec![c(0.3, -0.2), c(0.1, 0.4), c(-0.5, 0.0)]]).unwrap();
        let eq = build_equivalent_channel(&ch, &cfg);
        let chans = subcarrier_matrices(&eq, &cfg);
        for (q, chan) in chans.iter().enumerate() {
            assert!((chan.matrix[(0, 0)] - eq.spectrum()[q]).norm() < 1e-13);
        }
    }

    #[test]
    fn flat_channel_gives_identity_matrices() {
        let cfg = SystemConfig::new(8, 2, 1, 4, 1).validate().unwrap();
        for chan in identity_channel(&cfg) {
            for r in 0..2 {
                for col in 0..2 {
                    let expect = if r == col { 1.0 } else { 0.0 };
                    assert!((chan.matrix[(r, col)] - c(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn subcarrier_matrix_is_normal_with_diag_eigenvalues() {
        let cfg = SystemConfig::new(8, 4, 2, 6, 1)
            .with_shifts(vec![0, 2])
            .validate()
            .unwrap();
        let ch = crate::channel::generate_rayleigh_channels(&cfg, 17);
        let chans = subcarrier_matrices(&build_equivalent_channel(&ch, &cfg), &cfg);
        for chan in &chans {
            let h = &chan.matrix;
            // Normality: H H^H == H^H H.
            let a = h.mul(&h.hermitian());
            let b = h.hermitian().mul(h);
            for r in 0..4 {
                for col in 0..4 {
                    assert!((a[(r, col)] - b[(r, col)]).norm() < 1e-10);
                }
            }
            // Columns of U^H are eigenvectors with the diagonal eigenvalues.
            let u_herm = chan.unitary.hermitian();
            for (i, &lambda) in chan.diag.iter().enumerate() {
                let v: Vec<Complex64> = (0..4).map(|r| u_herm[(r, i)]).collect();
                let hv = h.matvec(&v);
                for r in 0..4 {
                    assert!((hv[r] - lambda * v[r]).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn zero_forcing_limit_on_identity_channel() {
        let cfg = SystemConfig::new(8, 2, 1, 4, 1).validate().unwrap();
        let chans = identity_channel(&cfg);
        let bank = equalizer_bank(&chans, f64::INFINITY).unwrap();
        for q in 0..8 {
            for r in 0..2 {
                for col in 0..2 {
                    let expect = if r == col { 1.0 } else { 0.0 };
                    assert!((bank.w[q][(r, col)] - c(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
        assert!(bank.c.iter().all(|&b| b == 1.0));
        // Pass-through equalization.
        let seq: Vec<Complex64> = (0..16).map(|i| c(i as f64, -(i as f64))).collect();
        let rx = block_into_vectors(&seq, 2).unwrap();
        let est = mmse_equalize(&rx, &bank).unwrap();
        for (a, b) in est.as_flat().iter().zip(&seq) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn scalar_mmse_matches_closed_form() {
        // K=1: W = conj(h) / (|h|^2 + 1/rho).
        let cfg = SystemConfig::new(8, 1, 1, 2, 1).validate().unwrap();
        let ch = ChannelSet::new(vec![vec![c(0.7, -0.3), c(0.2, 0.5)]]).unwrap();
        let eq = build_equivalent_channel(&ch, &cfg);
        let chans = subcarrier_matrices(&eq, &cfg);
        for rho in [0.5, 2.0, 100.0] {
            let bank = equalizer_bank(&chans, rho).unwrap();
            for (q, chan) in chans.iter().enumerate() {
                let h = chan.matrix[(0, 0)];
                let expect = h.conj() / (h.norm_sqr() + 1.0 / rho);
                assert!((bank.w[q][(0, 0)] - expect).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn mmse_matrix_matches_independent_dense_solve() {
        // Gauss-Jordan with full row operations, coded separately from CMat.
        fn gauss_solve(a: &CMat, b: &CMat) -> CMat {
            let n = a.n();
            let mut aug: Vec<Vec<Complex64>> = (0..n)
                .map(|r| {
                    (0..2 * n)
                        .map(|col| if col < n { a[(r, col)] } else { b[(r, col - n)] })
                        .collect()
                })
                .collect();
            for col in 0..n {
                let pivot = (col..n)
                    .max_by(|&x, &y| {
                        aug[x][col]
                            .norm_sqr()
                            .partial_cmp(&aug[y][col].norm_sqr())
                            .unwrap()
                    })
                    .unwrap();
                aug.swap(col, pivot);
                let inv = aug[col][col].inv();
                for entry in &mut aug[col] {
                    *entry *= inv;
                }
                for r in 0..n {
                    if r != col {
                        let factor = aug[r][col];
                        let pivot_row = aug[col].clone();
                        for (entry, &p) in aug[r].iter_mut().zip(&pivot_row) {
                            *entry -= factor * p;
                        }
                    }
                }
            }
            CMat::from_fn(n, |r, cc| aug[r][n + cc])
        }

        let cfg = SystemConfig::new(8, 2, 2, 4, 1)
            .with_shifts(vec![0, 2])
            .validate()
            .unwrap();
        let ch = crate::channel::generate_rayleigh_channels(&cfg, 23);
        let chans = subcarrier_matrices(&build_equivalent_channel(&ch, &cfg), &cfg);
        let rho = 5.0;
        let bank = equalizer_bank(&chans, rho).unwrap();
        for (q, chan) in chans.iter().enumerate() {
            let h = &chan.matrix;
            let mut normal = h.hermitian().mul(h);
            for i in 0..2 {
                normal[(i, i)] += c(1.0 / rho, 0.0);
            }
            let oracle = gauss_solve(&normal, &h.hermitian());
            for r in 0..2 {
                for col in 0..2 {
                    assert!((bank.w[q][(r, col)] - oracle[(r, col)]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn unit_magnitude_spectrum_at_rho_one_gives_half_bias() {
        // All |H| = 1 and rho = 1 -> C = 1/2 everywhere.
        let cfg = SystemConfig::new(8, 2, 1, 4, 1).validate().unwrap();
        let chans = identity_channel(&cfg);
        let bank = equalizer_bank(&chans, 1.0).unwrap();
        for &bias in &bank.c {
            assert!((bias - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn equalized_diagonal_equals_bias() {
        // diag(W_q H_q) must be real, equal across slots, and equal to C.
        let cfg = SystemConfig::new(16, 4, 2, 8, 2)
            .with_shifts(vec![0, 2])
            .validate()
            .unwrap();
        let ch = crate::channel::generate_rayleigh_channels(&cfg, 31);
        let chans = subcarrier_matrices(&build_equivalent_channel(&ch, &cfg), &cfg);
        let bank = equalizer_bank(&chans, 3.0).unwrap();
        for (q, chan) in chans.iter().enumerate() {
            let prod = bank.w[q].mul(&chan.matrix);
            let bias = bank.c[q * 4];
            for i in 0..4 {
                let d = prod[(i, i)];
                assert!(d.im.abs() < 1e-10, "imag part {}", d.im);
                assert!((d.re - bias).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn detection_recovers_symbols_on_flat_channel() {
        let cfg = SystemConfig::new(8, 2, 1, 4, 2).validate().unwrap();
        let cons = Constellation::new(2).unwrap();
        let chans = identity_channel(&cfg);
        let bank = equalizer_bank(&chans, 10.0).unwrap();
        let indices: Vec<usize> = (0..16).map(|i| i % 4).collect();
        let seq: Vec<Complex64> = indices.iter().map(|&i| cons.points()[i]).collect();
        let rx = block_into_vectors(&seq, 2).unwrap();
        let est = mmse_equalize(&rx, &bank).unwrap();
        assert_eq!(detect_symbols(&est, &bank, &cons), indices);
    }

    #[test]
    fn detection_breaks_ties_to_lowest_index() {
        let cons = Constellation::new(1).unwrap();
        // Equidistant from +1 and -1.
        let bank = EqualizerBank {
            w: vec![CMat::identity(1)],
            c: vec![1.0],
        };
        let est = block_into_vectors(&[c(0.0, 0.7)], 1).unwrap();
        assert_eq!(detect_symbols(&est, &bank, &cons), vec![0]);
    }

    #[test]
    fn ml_detects_exactly_at_zero_noise() {
        let cfg = SystemConfig::new(8, 2, 2, 4, 1)
            .with_shifts(vec![0, 2])
            .validate()
            .unwrap();
        let cons = Constellation::new(1).unwrap();
        let ch = crate::channel::generate_rayleigh_channels(&cfg, 41);
        let chans = subcarrier_matrices(&build_equivalent_channel(&ch, &cfg), &cfg);
        let indices: Vec<usize> = (0..16).map(|i| (i * 7) % 2).collect();
        let mut data = Vec::new();
        for q in 0..8 {
            let x: Vec<Complex64> = (0..2).map(|k| cons.points()[indices[q * 2 + k]]).collect();
            data.extend(chans[q].matrix.matvec(&x));
        }
        let rx = block_into_vectors(&data, 2).unwrap();
        assert_eq!(ml_detect(&rx, &chans, &cons).unwrap(), indices);
    }

    #[test]
    fn ml_k1_is_scalar_nearest_neighbor() {
        let cfg = SystemConfig::new(8, 1, 1, 2, 2).validate().unwrap();
        let cons = Constellation::new(2).unwrap();
        let ch = crate::channel::generate_rayleigh_channels(&cfg, 43);
        let chans = subcarrier_matrices(&build_equivalent_channel(&ch, &cfg), &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let data: Vec<Complex64> =
            (0..8).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let rx = block_into_vectors(&data, 1).unwrap();
        let got = ml_detect(&rx, &chans, &cons).unwrap();
        for q in 0..8 {
            let h = chans[q].matrix[(0, 0)];
            let best = cons
                .points()
                .iter()
                .enumerate()
                .min_by(|(_, &a), (_, &b)| {
                    (data[q] - h * a)
                        .norm_sqr()
                        .partial_cmp(&(data[q] - h * b).norm_sqr())
                        .unwrap()
                })
                .unwrap()
                .0;
            assert_eq!(got[q], best);
        }
    }

    #[test]
    fn ml_matches_independent_enumeration_k2_bpsk() {
        // Duplicate implementation: explicit 4-candidate loop.
        let cfg = SystemConfig::new(8, 2, 2, 4, 1)
            .with_shifts(vec![0, 2])
            .validate()
            .unwrap();
        let cons = Constellation::new(1).unwrap();
        let ch = crate::channel::generate_rayleigh_channels(&cfg, 47);
        let chans = subcarrier_matrices(&build_equivalent_channel(&ch, &cfg), &cfg);
        let mut rng = ChaCha8Rng::seed_from_u64(48);
        let data: Vec<Complex64> =
            (0..16).map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let rx = block_into_vectors(&data, 2).unwrap();
        let got = ml_detect(&rx, &chans, &cons).unwrap();

        let pts = cons.points();
        for q in 0..8 {
            let y = rx.vector(q);
            let mut best = (f64::INFINITY, [0usize, 0]);
            for i0 in 0..2 {
                for i1 in 0..2 {
                    let image = chans[q].matrix.matvec(&[pts[i0], pts[i1]]);
                    let dist = (y[0] - image[0]).norm_sqr() + (y[1] - image[1]).norm_sqr();
                    if dist < best.0 {
                        best = (dist, [i0, i1]);
                    }
                }
            }
            assert_eq!(&got[q * 2..q * 2 + 2], &best.1);
        }
    }

    #[test]
    fn ml_guard_rejects_large_searches() {
        let cfg = SystemConfig::new(8, 8, 1, 8, 4).validate().unwrap();
        let cons = Constellation::new(4).unwrap();
        let ch = crate::channel::generate_rayleigh_channels(&cfg, 51);
        let chans = subcarrier_matrices(&build_equivalent_channel(&ch, &cfg), &cfg);
        let rx = block_into_vectors(&vec![c(0.0, 0.0); 64], 8).unwrap();
        assert!(matches!(
            ml_detect(&rx, &chans, &cons),
            Err(Error::SearchTooLarge { .. })
        ));
    }

    #[test]
    fn equalize_rejects_mismatched_dimensions() {
        let cfg = SystemConfig::new(8, 2, 1, 4, 1).validate().unwrap();
        let bank = equalizer_bank(&identity_channel(&cfg), 1.0).unwrap();
        let rx = block_into_vectors(&[c(0.0, 0.0); 12], 2).unwrap();
        assert!(matches!(
            mmse_equalize(&rx, &bank),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
