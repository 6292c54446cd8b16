//! Multipath MIMO channel and the equivalent-SISO-channel math.
//!
//! Each transmit antenna sees an independent `L`-tap CIR. Because every
//! antenna sends a cyclically delayed copy of the same block, the whole
//! link behaves like single-antenna transmission over one equivalent
//! channel: each CIR placed at symbol offset `K * delta_bar[m]` in a
//! length-`N*K` cyclic buffer, then summed. With non-overlapping placements
//! the equivalent channel concatenates all antennas' taps, which is where
//! the combined spatial and multipath diversity comes from.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::ValidatedConfig;
use crate::fft;
use crate::linalg::CMat;
use crate::{Error, Result};

/// Per-antenna channel impulse responses, all of the same length `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    cirs: Vec<Vec<Complex64>>,
}

impl ChannelSet {
    pub fn new(cirs: Vec<Vec<Complex64>>) -> Result<Self> {
        if cirs.is_empty() || cirs[0].is_empty() {
            return Err(Error::NonPositive { name: "cirs" });
        }
        let l = cirs[0].len();
        for cir in &cirs {
            if cir.len() != l {
                return Err(Error::LengthMismatch {
                    expected: l,
                    actual: cir.len(),
                });
            }
        }
        Ok(ChannelSet { cirs })
    }

    /// Number of transmit antennas.
    pub fn nt(&self) -> usize {
        self.cirs.len()
    }

    /// Taps per CIR.
    pub fn taps(&self) -> usize {
        self.cirs[0].len()
    }

    pub fn cir(&self, m: usize) -> &[Complex64] {
        &self.cirs[m]
    }

    pub fn cirs(&self) -> &[Vec<Complex64>] {
        &self.cirs
    }
}

/// Draw `N_t x L` i.i.d. CN(0, 1) taps; deterministic given the seed.
///
/// Draw order is fixed (antenna-major, tap-minor, re before im), so a seed
/// pins the whole realization.
pub fn generate_rayleigh_channels(cfg: &ValidatedConfig, seed: u64) -> ChannelSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = core::f64::consts::FRAC_1_SQRT_2;
    let cirs = (0..cfg.nt())
        .map(|_| {
            (0..cfg.l())
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * scale, im * scale)
                })
                .collect()
        })
        .collect();
    ChannelSet { cirs }
}

/// Apply the MIMO channel to one frame per antenna and add receiver noise.
///
/// Output is `sum_m h^m (*) frame_m` (linear convolution truncated to the
/// frame length) plus i.i.d. circular complex Gaussian noise with
/// `E|w|^2 = noise_std^2` per sample. Deterministic given the seed; the
/// seed is not consumed when `noise_std == 0`.
pub fn apply_mimo_channel(
    frames: &[Vec<Complex64>],
    ch: &ChannelSet,
    noise_std: f64,
    seed: u64,
) -> Result<Vec<Complex64>> {
    if frames.len() != ch.nt() {
        return Err(Error::DimensionMismatch {
            expected: ch.nt(),
            actual: frames.len(),
        });
    }
    let frame_len = frames[0].len();
    for frame in frames {
        if frame.len() != frame_len {
            return Err(Error::LengthMismatch {
                expected: frame_len,
                actual: frame.len(),
            });
        }
    }
    let mut out = vec![Complex64::new(0.0, 0.0); frame_len];
    for (frame, cir) in frames.iter().zip(ch.cirs()) {
        for (lag, &tap) in cir.iter().enumerate() {
            if lag >= frame_len {
                break;
            }
            for t in lag..frame_len {
                out[t] += tap * frame[t - lag];
            }
        }
    }
    if noise_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = noise_std * core::f64::consts::FRAC_1_SQRT_2;
        for sample in &mut out {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *sample += Complex64::new(re * scale, im * scale);
        }
    }
    Ok(out)
}

/// The equivalent SISO channel of the whole multi-antenna link, with its
/// polyphase decomposition and `N*K`-point spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentChannel {
    taps: Vec<Complex64>,
    polyphases: Vec<Vec<Complex64>>,
    spectrum: Vec<Complex64>,
    k: usize,
}

impl EquivalentChannel {
    /// Length-`N*K` equivalent impulse response.
    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    /// Polyphase `s`: taps `s, s+K, s+2K, ...` (length `N`).
    pub fn polyphase(&self, s: usize) -> &[Complex64] {
        &self.polyphases[s]
    }

    pub fn polyphases(&self) -> &[Vec<Complex64>] {
        &self.polyphases
    }

    /// `H_l = sum_t h_eqv(t) exp(-j 2 pi t l / (N*K))`, `l = 0..N*K`.
    pub fn spectrum(&self) -> &[Complex64] {
        &self.spectrum
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.taps.len() / self.k
    }
}

/// Sum of all antennas' CIRs, each cyclically placed at symbol offset
/// `K * delta_bar[m]` in a length-`N*K` buffer.
pub fn build_equivalent_channel(ch: &ChannelSet, cfg: &ValidatedConfig) -> EquivalentChannel {
    let nk = cfg.nk();
    let k = cfg.k();
    let mut taps = vec![Complex64::new(0.0, 0.0); nk];
    for (m, cir) in ch.cirs().iter().enumerate() {
        let offset = cfg.delta()[m];
        for (lag, &tap) in cir.iter().enumerate() {
            taps[(offset + lag) % nk] += tap;
        }
    }
    let polyphases = (0..k)
        .map(|s| (0..cfg.n()).map(|t| taps[s + t * k]).collect())
        .collect();
    let mut spectrum = taps.clone();
    fft::transform(&mut spectrum, true);
    EquivalentChannel {
        taps,
        polyphases,
        spectrum,
        k,
    }
}

/// Blocked z-domain form of the equivalent channel: entry `(r, c)` is the
/// polyphase `((r - c)) mod K` as a polynomial in `z^-1`, with an extra
/// `z^-1` factor on the strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudocirculantMatrix {
    k: usize,
    polyphases: Vec<Vec<Complex64>>,
}

impl PseudocirculantMatrix {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Coefficient list of entry `(r, c)` (constant term first) and whether
    /// the entry carries the extra `z^-1` factor.
    pub fn entry(&self, r: usize, c: usize) -> (&[Complex64], bool) {
        let idx = (r + self.k - c) % self.k;
        (&self.polyphases[idx], r < c)
    }

    /// Evaluate the matrix at a point `z`.
    pub fn eval(&self, z: Complex64) -> CMat {
        let z_inv = z.inv();
        CMat::from_fn(self.k, |r, c| {
            let (coeffs, delayed) = self.entry(r, c);
            let mut acc = Complex64::new(0.0, 0.0);
            for &coef in coeffs.iter().rev() {
                acc = acc * z_inv + coef;
            }
            if delayed {
                acc * z_inv
            } else {
                acc
            }
        })
    }
}

/// Arrange the polyphases of an equivalent channel in pseudocirculant form.
pub fn build_pseudocirculant(eq: &EquivalentChannel) -> PseudocirculantMatrix {
    PseudocirculantMatrix {
        k: eq.k(),
        polyphases: eq.polyphases.clone(),
    }
}

/// Which antenna pairs have intersecting placed CIR supports.
///
/// Supports are the declared intervals `[K*delta_bar[m], K*delta_bar[m]+L)`
/// mod `N*K`; a realized zero tap still counts as occupied.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapReport {
    /// Antenna index pairs `(a, b)`, `a < b`, whose supports intersect.
    pub overlapping_pairs: Vec<(usize, usize)>,
    /// True iff no pair overlaps.
    pub full_diversity: bool,
}

pub fn check_overlap(cfg: &ValidatedConfig) -> OverlapReport {
    let nk = cfg.nk();
    let l = cfg.l();
    let mut overlapping_pairs = Vec::new();
    for a in 0..cfg.nt() {
        for b in a + 1..cfg.nt() {
            let start_a = cfg.delta()[a] % nk;
            let start_b = cfg.delta()[b] % nk;
            let forward = (start_b + nk - start_a) % nk;
            let backward = (start_a + nk - start_b) % nk;
            if forward < l || backward < l {
                overlapping_pairs.push((a, b));
            }
        }
    }
    OverlapReport {
        full_diversity: overlapping_pairs.is_empty(),
        overlapping_pairs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemConfig;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Distinguishable taps: antenna m, tap l -> (m+1) + j(l+1).
    fn marker_channel(nt: usize, l: usize) -> ChannelSet {
        ChannelSet::new(
            (0..nt)
                .map(|m| (0..l).map(|t| c((m + 1) as f64, (t + 1) as f64)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rayleigh_draws_are_seed_deterministic() {
        let cfg = SystemConfig::new(8, 2, 2, 4, 1).validate().unwrap();
        let a = generate_rayleigh_channels(&cfg, 99);
        let b = generate_rayleigh_channels(&cfg, 99);
        assert_eq!(a, b);
        let d = generate_rayleigh_channels(&cfg, 100);
        assert_ne!(a, d);
    }

    #[test]
    fn rayleigh_taps_have_unit_mean_power() {
        let cfg = SystemConfig::new(32, 2, 4, 32, 1)
            .with_shifts(alloc::vec![0, 1, 2, 3])
            .validate()
            .unwrap();
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..8000u64 {
            let ch = generate_rayleigh_channels(&cfg, seed);
            for cir in ch.cirs() {
                for tap in cir {
                    sum += tap.norm_sqr();
                    count += 1;
                }
            }
        }
        let mean = sum / count as f64;
        assert!((0.99..=1.01).contains(&mean), "mean tap power {mean}");
    }

    #[test]
    fn identity_channel_passes_frame_through() {
        let mut taps = vec![c(0.0, 0.0); 4];
        taps[0] = c(1.0, 0.0);
        let ch = ChannelSet::new(alloc::vec![taps]).unwrap();
        let frame: Vec<Complex64> = (0..10).map(|i| c(i as f64, -(i as f64))).collect();
        let out = apply_mimo_channel(core::slice::from_ref(&frame), &ch, 0.0, 0).unwrap();
        assert_eq!(out, frame);
    }

    #[test]
    fn opposite_channels_cancel() {
        let h0: Vec<Complex64> = (0..3).map(|i| c(1.0 + i as f64, 0.5)).collect();
        let h1: Vec<Complex64> = h0.iter().map(|t| -t).collect();
        let ch = ChannelSet::new(alloc::vec![h0, h1]).unwrap();
        let frame: Vec<Complex64> = (0..8).map(|i| c(i as f64, 1.0)).collect();
        let out = apply_mimo_channel(&[frame.clone(), frame], &ch, 0.0, 0).unwrap();
        assert!(out.iter().all(|s| s.norm() < 1e-14));
    }

    #[test]
    fn convolution_matches_shifted_copy_oracle() {
        // Independent oracle: y[t] = sum_m sum_l h^m[l] x^m[t-l], written as
        // a sum of lag-shifted copies.
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let rand_c = |rng: &mut rand_chacha::ChaCha8Rng| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        };
        let (nt, l, flen) = (3usize, 5usize, 40usize);
        let cirs: Vec<Vec<Complex64>> = (0..nt)
            .map(|_| (0..l).map(|_| rand_c(&mut rng)).collect())
            .collect();
        let frames: Vec<Vec<Complex64>> = (0..nt)
            .map(|_| (0..flen).map(|_| rand_c(&mut rng)).collect())
            .collect();
        let ch = ChannelSet::new(cirs.clone()).unwrap();
        let out = apply_mimo_channel(&frames, &ch, 0.0, 0).unwrap();

        let mut expect = vec![c(0.0, 0.0); flen];
        for m in 0..nt {
            for lag in 0..l {
                for t in 0..flen {
                    if t >= lag {
                        expect[t] += cirs[m][lag] * frames[m][t - lag];
                    }
                }
            }
        }
        for (a, b) in out.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn noise_is_seeded_and_scaled() {
        let ch = ChannelSet::new(alloc::vec![alloc::vec![c(1.0, 0.0)]]).unwrap();
        let frame = vec![c(0.0, 0.0); 20000];
        let a = apply_mimo_channel(core::slice::from_ref(&frame), &ch, 0.5, 7).unwrap();
        let b = apply_mimo_channel(core::slice::from_ref(&frame), &ch, 0.5, 7).unwrap();
        assert_eq!(a, b);
        let power: f64 = a.iter().map(|s| s.norm_sqr()).sum::<f64>() / a.len() as f64;
        assert!((power - 0.25).abs() < 0.01, "noise power {power}");
    }

    #[test]
    fn worked_example_equivalent_channel_layout() {
        // K=2, N=8, N_t=2, L=4, delta_bar=[0,2]: antenna 1 lands at offset 4.
        let cfg = SystemConfig::new(8, 2, 2, 4, 1)
            .with_gamma(3)
            .with_shifts(alloc::vec![0, 2])
            .validate()
            .unwrap();
        let ch = marker_channel(2, 4);
        let eq = build_equivalent_channel(&ch, &cfg);

        let mut expect = vec![c(0.0, 0.0); 16];
        expect[..4].copy_from_slice(ch.cir(0));
        expect[4..8].copy_from_slice(ch.cir(1));
        assert_eq!(eq.taps(), &expect[..]);

        // Polyphase 0: [h0(0), h0(2), h1(0), h1(2), 0, 0, 0, 0].
        let p0 = eq.polyphase(0);
        assert_eq!(
            &p0[..4],
            &[ch.cir(0)[0], ch.cir(0)[2], ch.cir(1)[0], ch.cir(1)[2]]
        );
        assert!(p0[4..].iter().all(|t| t.norm() == 0.0));
        // Polyphase 1: [h0(1), h0(3), h1(1), h1(3), 0, 0, 0, 0].
        let p1 = eq.polyphase(1);
        assert_eq!(
            &p1[..4],
            &[ch.cir(0)[1], ch.cir(0)[3], ch.cir(1)[1], ch.cir(1)[3]]
        );
        assert!(p1[4..].iter().all(|t| t.norm() == 0.0));
    }

    #[test]
    fn single_antenna_equivalent_channel_is_padded_cir() {
        let cfg = SystemConfig::new(8, 2, 1, 4, 1).validate().unwrap();
        let ch = marker_channel(1, 4);
        let eq = build_equivalent_channel(&ch, &cfg);
        assert_eq!(&eq.taps()[..4], ch.cir(0));
        assert!(eq.taps()[4..].iter().all(|t| t.norm() == 0.0));
        // Polyphases match the single-antenna blocked decomposition.
        assert_eq!(eq.polyphase(0)[0], ch.cir(0)[0]);
        assert_eq!(eq.polyphase(0)[1], ch.cir(0)[2]);
        assert_eq!(eq.polyphase(1)[0], ch.cir(0)[1]);
        assert_eq!(eq.polyphase(1)[1], ch.cir(0)[3]);
    }

    #[test]
    fn polyphases_and_spectrum_follow_their_definitions() {
        let cfg = SystemConfig::new(8, 4, 2, 6, 1)
            .with_shifts(alloc::vec![0, 2])
            .validate()
            .unwrap();
        let ch = generate_rayleigh_channels(&cfg, 3);
        let eq = build_equivalent_channel(&ch, &cfg);
        let nk = cfg.nk();
        for s in 0..cfg.k() {
            for t in 0..cfg.n() {
                assert_eq!(eq.polyphase(s)[t], eq.taps()[s + t * cfg.k()]);
            }
        }
        // Direct-evaluation oracle for the spectrum.
        for l in 0..nk {
            let mut acc = c(0.0, 0.0);
            for (t, &tap) in eq.taps().iter().enumerate() {
                let angle = -2.0 * core::f64::consts::PI * ((t * l) % nk) as f64 / nk as f64;
                acc += tap * c(angle.cos(), angle.sin());
            }
            assert!((eq.spectrum()[l] - acc).norm() < 1e-10);
        }
    }

    #[test]
    fn pseudocirculant_k1_is_the_full_polynomial() {
        let cfg = SystemConfig::new(8, 1, 1, 3, 1).validate().unwrap();
        let ch = marker_channel(1, 3);
        let eq = build_equivalent_channel(&ch, &cfg);
        let pc = build_pseudocirculant(&eq);
        let (coeffs, delayed) = pc.entry(0, 0);
        assert_eq!(coeffs, eq.taps());
        assert!(!delayed);
    }

    #[test]
    fn pseudocirculant_matches_worked_example_polynomials() {
        let cfg = SystemConfig::new(8, 2, 2, 4, 1)
            .with_gamma(3)
            .with_shifts(alloc::vec![0, 2])
            .validate()
            .unwrap();
        let ch = marker_channel(2, 4);
        let pc = build_pseudocirculant(&build_equivalent_channel(&ch, &cfg));

        // H_eqv0(z) = h0(0) + z^-1 h0(2) + z^-2 h1(0) + z^-3 h1(2).
        let (h0, d00) = pc.entry(0, 0);
        assert!(!d00);
        assert_eq!(
            &h0[..4],
            &[ch.cir(0)[0], ch.cir(0)[2], ch.cir(1)[0], ch.cir(1)[2]]
        );
        // Off-diagonal carries polyphase 1; upper triangle is delayed.
        let (h1_lower, d10) = pc.entry(1, 0);
        assert!(!d10);
        let (h1_upper, d01) = pc.entry(0, 1);
        assert!(d01);
        assert_eq!(h1_lower, h1_upper);
        assert_eq!(
            &h1_lower[..4],
            &[ch.cir(0)[1], ch.cir(0)[3], ch.cir(1)[1], ch.cir(1)[3]]
        );
    }

    #[test]
    fn overlap_examples() {
        let no = SystemConfig::new(8, 2, 2, 4, 1)
            .with_shifts(alloc::vec![0, 2])
            .validate()
            .unwrap();
        assert!(check_overlap(&no).full_diversity);

        let yes = SystemConfig::new(8, 2, 2, 4, 1)
            .with_shifts(alloc::vec![0, 1])
            .validate()
            .unwrap();
        let report = check_overlap(&yes);
        assert!(!report.full_diversity);
        assert_eq!(report.overlapping_pairs, alloc::vec![(0, 1)]);
    }

    #[test]
    fn overlap_matches_brute_force_support_enumeration() {
        // Exhaustive oracle at N=8, K=2, L=4 over all shift pairs.
        let (n, k, l) = (8usize, 2usize, 4usize);
        let nk = n * k;
        for d1 in 0..n {
            let cfg = SystemConfig::new(n, k, 2, l, 1)
                .with_shifts(alloc::vec![0, d1])
                .validate()
                .unwrap();
            let report = check_overlap(&cfg);
            let mut occupied = vec![0u32; nk];
            for m in 0..2 {
                for i in 0..l {
                    occupied[(cfg.delta()[m] + i) % nk] += 1;
                }
            }
            let brute_overlap = occupied.iter().any(|&c| c > 1);
            assert_eq!(report.full_diversity, !brute_overlap, "d1 = {d1}");
        }
    }

    #[test]
    fn full_diversity_shifts_imply_disjoint_supports() {
        // The Eq-38-style progression flag must imply no overlap.
        for (n, k, nt, l) in [(8, 2, 2, 4), (32, 2, 4, 8), (16, 4, 4, 8), (32, 32, 2, 2)] {
            let cfg = SystemConfig::new(n, k, nt, l, 1).validate().unwrap();
            if cfg.full_diversity_shifts() {
                assert!(check_overlap(&cfg).full_diversity, "({n},{k},{nt},{l})");
            }
        }
    }
}
