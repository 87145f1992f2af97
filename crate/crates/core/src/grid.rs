//! Periodic spatial grid of circumference `2πL`, frequencies `ξ_j = j/L`.
//!
//! Coefficient vectors are stored in FFT order (`j = 0, 1, …, N/2−1, −N/2, …, −1`)
//! and normalized so that `‖u‖² = Σ_j |û_j|²` equals the mean of `|u(x)|²`.
//! The Nyquist slot `j = −N/2` has no real partner and is kept at zero.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct SpatialGrid {
    n_x: usize,
    length: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for SpatialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpatialGrid")
            .field("n_x", &self.n_x)
            .field("length", &self.length)
            .finish()
    }
}

impl PartialEq for SpatialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n_x == other.n_x && self.length == other.length
    }
}

impl SpatialGrid {
    /// `n_x` must be a power of two (1 is allowed for homogeneous runs).
    pub fn new(n_x: usize, length: f64) -> Result<Self> {
        if n_x == 0 || !n_x.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "N_x must be a power of two, got {n_x}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidParameter(format!("L must be positive, got {length}")));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n_x,
            length,
            forward: planner.plan_fft_forward(n_x),
            inverse: planner.plan_fft_inverse(n_x),
        })
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Signed integer index of FFT slot `idx`.
    pub fn wavenumber(&self, idx: usize) -> i64 {
        let n = self.n_x as i64;
        let i = idx as i64;
        if i < (n + 1) / 2 || n == 1 {
            i
        } else {
            i - n
        }
    }

    /// FFT slot of signed wavenumber `j`.
    pub fn slot(&self, j: i64) -> usize {
        j.rem_euclid(self.n_x as i64) as usize
    }

    pub fn frequency(&self, idx: usize) -> f64 {
        self.wavenumber(idx) as f64 / self.length
    }

    pub fn frequencies(&self) -> Vec<f64> {
        (0..self.n_x).map(|i| self.frequency(i)).collect()
    }

    /// Largest resolved `|ξ|` (the Nyquist slot excluded).
    pub fn max_frequency(&self) -> f64 {
        if self.n_x <= 2 {
            0.0
        } else {
            (self.n_x / 2 - 1) as f64 / self.length
        }
    }

    pub fn is_nyquist(&self, idx: usize) -> bool {
        self.n_x > 1 && idx == self.n_x / 2
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = 2.0 * std::f64::consts::PI * self.length / self.n_x as f64;
        (0..self.n_x).map(|i| i as f64 * h).collect()
    }

    /// Samples to normalized coefficients.
    pub fn forward(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(samples.len())?;
        let mut buf = samples.to_vec();
        self.forward.process(&mut buf);
        let scale = 1.0 / self.n_x as f64;
        buf.iter_mut().for_each(|c| *c *= scale);
        Ok(buf)
    }

    pub fn inverse(&self, coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(coeffs.len())?;
        let mut buf = coeffs.to_vec();
        self.inverse.process(&mut buf);
        Ok(buf)
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n_x {
            return Err(Error::LengthMismatch {
                expected: self.n_x,
                got,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fft_order_and_round_trip() {
        let g = SpatialGrid::new(8, 2.0).unwrap();
        let ks: Vec<i64> = (0..8).map(|i| g.wavenumber(i)).collect();
        assert_eq!(ks, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        assert_eq!(g.slot(-3), 5);
        assert!((g.frequency(1) - 0.5).abs() < 1e-15);
        assert!((g.max_frequency() - 1.5).abs() < 1e-15);

        let x = g.nodes();
        let u: Vec<Complex64> = x.iter().map(|&x| Complex64::new((x / 2.0).cos() + 0.25, 0.0)).collect();
        let c = g.forward(&u).unwrap();
        assert!((c[0].re - 0.25).abs() < 1e-14);
        assert!((c[1].re - 0.5).abs() < 1e-14 && (c[7].re - 0.5).abs() < 1e-14);
        let back = g.inverse(&c).unwrap();
        for (a, b) in back.iter().zip(&u) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(SpatialGrid::new(12, 1.0).is_err());
        assert!(SpatialGrid::new(8, 0.0).is_err());
        assert!(SpatialGrid::new(1, 1.0).is_ok());
    }
}
