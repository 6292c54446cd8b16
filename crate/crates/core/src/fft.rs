//! Internal DFT engine.
//!
//! Radix-2 Cooley-Tukey for power-of-two lengths, direct evaluation
//! otherwise. No normalization is applied here; callers scale (the modem
//! uses the unitary 1/sqrt(N) convention, the channel spectrum is raw).

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

/// In-place unnormalized DFT. `forward` selects exp(-j...), else exp(+j...).
pub(crate) fn transform(data: &mut Vec<Complex64>, forward: bool) {
    let n = data.len();
    if n <= 1 {
        return;
    }
    if n.is_power_of_two() {
        fft_pow2(data, forward);
    } else {
        *data = dft_direct(data, forward);
    }
}

/// Twiddle table w^i = exp(sign * j 2 pi i / n) for i in 0..n/2.
fn twiddles(n: usize, forward: bool) -> Vec<Complex64> {
    let sign = if forward { -1.0 } else { 1.0 };
    (0..n / 2)
        .map(|i| {
            let angle = sign * 2.0 * PI * i as f64 / n as f64;
            Complex64::new(angle.cos(), angle.sin())
        })
        .collect()
}

fn fft_pow2(data: &mut [Complex64], forward: bool) {
    let n = data.len();
    let tw = twiddles(n, forward);

    // Bit-reversal permutation.
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j ^= bit;
        if i < j {
            data.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        let mut start = 0;
        while start < n {
            for i in 0..half {
                let w = tw[i * step];
                let u = data[start + i];
                let t = w * data[start + i + half];
                data[start + i] = u + t;
                data[start + i + half] = u - t;
            }
            start += len;
        }
        len <<= 1;
    }
}

fn dft_direct(data: &[Complex64], forward: bool) -> Vec<Complex64> {
    let n = data.len();
    let sign = if forward { -1.0 } else { 1.0 };
    (0..n)
        .map(|bin| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &x) in data.iter().enumerate() {
                // Reduce the phase index mod n to keep the angle small.
                let idx = (i * bin) % n;
                let angle = sign * 2.0 * PI * idx as f64 / n as f64;
                acc += x * Complex64::new(angle.cos(), angle.sin());
            }
            acc
        })
        .collect()
}
