//! Small numeric helpers shared across modules.

use crate::{Error, Result};

/// Uniform time grid on [0, t_up] with `n_steps` intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_up: f64,
    pub n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_up: f64, n_steps: usize) -> Result<Self> {
        if !(t_up > 0.0) || !t_up.is_finite() {
            return Err(Error::invalid(format!("t_up={t_up} must be positive")));
        }
        if n_steps == 0 {
            return Err(Error::invalid("time grid needs at least one step"));
        }
        Ok(TimeGrid { t_up, n_steps })
    }

    /// Grid from a requested step size; rounds to the nearest integer
    /// step count so the grid lands exactly on t_up.
    pub fn from_step(t_up: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::invalid(format!("dt={dt} must be positive")));
        }
        let n = (t_up / dt).round().max(1.0) as usize;
        TimeGrid::new(t_up, n)
    }

    pub fn step(&self) -> f64 {
        self.t_up / self.n_steps as f64
    }

    /// Number of sample points (n_steps + 1).
    pub fn len(&self) -> usize {
        self.n_steps + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn at(&self, i: usize) -> f64 {
        self.t_up * i as f64 / self.n_steps as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.at(i))
    }
}

/// Format a float with 17 significant digits, locale-independent.
///
/// All CSV output goes through this so that reruns are byte-identical.
pub fn fmt_g17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// Trapezoid rule on uniformly spaced samples with step `h`.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let interior: f64 = values[1..n - 1].iter().sum();
            h * (0.5 * values[0] + interior + 0.5 * values[n - 1])
        }
    }
}

/// SplitMix64 finalizer; bijective on u64.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trapezoid_linear_is_exact() {
        // int_0^2 (3t + 1) dt = 8
        let h = 0.25;
        let values: Vec<f64> = (0..9).map(|i| 3.0 * (i as f64) * h + 1.0).collect();
        assert!((trapezoid_uniform(&values, h) - 8.0).abs() < 1e-14);
        assert_eq!(trapezoid_uniform(&[], h), 0.0);
        assert_eq!(trapezoid_uniform(&[5.0], h), 0.0);
    }

    #[test]
    fn fmt_g17_roundtrips() {
        for &x in &[0.1, std::f64::consts::PI, 1.0 / 3.0, 1e-300, -42.5] {
            let s = fmt_g17(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{s}");
        }
    }

    #[test]
    fn splitmix_is_deterministic() {
        assert_eq!(splitmix64(0), splitmix64(0));
        assert_ne!(splitmix64(1), splitmix64(2));
    }
}
