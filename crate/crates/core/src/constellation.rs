//! Gray-labeled, unit-average-power symbol alphabets.
//!
//! Supported rates: 1 (BPSK), 2 (QPSK), 3 (8-PSK), 4 (16-QAM) and
//! 6 (64-QAM) bits per symbol. The point order is fixed so runs are
//! reproducible bit-exactly: index bits map Gray-coded to amplitude
//! levels (QAM) or to the phase walk (PSK).

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use num_complex::Complex64;

use crate::{Error, Result};

/// Symbol alphabet of size `2^rate_bits` with mean power 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    points: Vec<Complex64>,
    rate_bits: u32,
}

impl Constellation {
    pub fn new(rate_bits: u32) -> Result<Self> {
        let points = match rate_bits {
            1 => alloc::vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)],
            2 => qpsk(),
            3 => psk8(),
            4 => qam(rate_bits, gray_to_pam4, 10.0),
            6 => qam(rate_bits, gray_to_pam8, 42.0),
            rate => return Err(Error::UnsupportedRate { rate }),
        };
        Ok(Constellation { points, rate_bits })
    }

    pub fn rate_bits(&self) -> u32 {
        self.rate_bits
    }

    /// Candidate symbols, indexed by label.
    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn qpsk() -> Vec<Complex64> {
    // Bit b1 selects I, bit b0 selects Q; 0 -> +1, 1 -> -1.
    (0..4)
        .map(|i| {
            let re = if i & 0b10 == 0 { 1.0 } else { -1.0 };
            let im = if i & 0b01 == 0 { 1.0 } else { -1.0 };
            Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
        })
        .collect()
}

fn psk8() -> Vec<Complex64> {
    // Walk the circle; label position p with the Gray code p ^ (p >> 1) so
    // neighboring points differ in one bit.
    let mut points = alloc::vec![Complex64::new(0.0, 0.0); 8];
    for p in 0..8usize {
        let angle = 2.0 * PI * p as f64 / 8.0;
        points[p ^ (p >> 1)] = Complex64::new(angle.cos(), angle.sin());
    }
    points
}

/// Square QAM: the high half of the index bits selects the I level, the low
/// half the Q level, each Gray-coded; `power` is the unnormalized mean power.
fn qam(rate_bits: u32, level: fn(usize) -> f64, power: f64) -> Vec<Complex64> {
    let half = rate_bits / 2;
    let scale = power.sqrt().recip();
    (0..1usize << rate_bits)
        .map(|i| {
            let re = level(i >> half);
            let im = level(i & ((1 << half) - 1));
            Complex64::new(re * scale, im * scale)
        })
        .collect()
}

fn gray_to_pam4(bits: usize) -> f64 {
    match bits {
        0b00 => 3.0,
        0b01 => 1.0,
        0b11 => -1.0,
        _ => -3.0, // 0b10
    }
}

fn gray_to_pam8(bits: usize) -> f64 {
    match bits {
        0b000 => 7.0,
        0b001 => 5.0,
        0b011 => 3.0,
        0b010 => 1.0,
        0b110 => -1.0,
        0b111 => -3.0,
        0b101 => -5.0,
        _ => -7.0, // 0b100
    }
}
