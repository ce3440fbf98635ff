//! Random telegraph noise trajectories and the staggered site-energy rule.
//!
//! A trajectory is a two-state +-1 Markov process with symmetric switching
//! rate nu: zero mean, autocorrelation exp(-nu |t - t'|). One shared
//! trajectory drives every site; consecutive sites see opposite signs
//! (node 0 carries the positive sign).

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Telegraph-noise parameters: amplitude (energy) and switching rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RtnParams {
    pub omega: f64,
    pub nu: f64,
}

impl RtnParams {
    pub fn new(omega: f64, nu: f64) -> Result<Self> {
        if !(omega >= 0.0) || !omega.is_finite() {
            return Err(Error::invalid(format!("RTN amplitude omega={omega}")));
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::invalid(format!("RTN switching rate nu={nu}")));
        }
        Ok(RtnParams { omega, nu })
    }
}

/// One realization of the telegraph process on [0, t_up].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RtnTrajectory {
    pub initial_sign: i8,
    pub flip_times: Vec<f64>,
    pub t_up: f64,
}

impl RtnTrajectory {
    /// Validate the stored invariants (sign is +-1, flips strictly
    /// increasing inside (0, t_up)). Used when replaying from JSON.
    pub fn validate(&self) -> Result<()> {
        if self.initial_sign != 1 && self.initial_sign != -1 {
            return Err(Error::invalid("initial_sign must be +1 or -1"));
        }
        if !(self.t_up > 0.0) {
            return Err(Error::invalid("t_up must be positive"));
        }
        let mut prev = 0.0;
        for &t in &self.flip_times {
            if !(t > prev) || t >= self.t_up {
                return Err(Error::invalid("flip_times must be strictly increasing in (0, t_up)"));
            }
            prev = t;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trajectory serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let traj: RtnTrajectory =
            serde_json::from_str(text).map_err(|e| Error::parse("trajectory", e.to_string()))?;
        traj.validate()?;
        Ok(traj)
    }
}

/// Sample a trajectory: uniform initial sign and i.i.d. exponential
/// waiting times, truncated at `t_up`.
///
/// A sign-alternating process with flip rate g has autocorrelation
/// exp(-2 g |t - t'|); flips are therefore drawn at rate nu/2 so that
/// the process realizes the defining <a(t) a(t')> = exp(-nu |t - t'|).
pub fn sample_trajectory<R: Rng>(nu: f64, t_up: f64, rng: &mut R) -> Result<RtnTrajectory> {
    if !(nu > 0.0) || !nu.is_finite() {
        return Err(Error::invalid(format!("switching rate nu={nu}")));
    }
    if !(t_up > 0.0) || !t_up.is_finite() {
        return Err(Error::invalid(format!("horizon t_up={t_up}")));
    }
    let initial_sign = if rng.random_bool(0.5) { 1 } else { -1 };
    let rate = 0.5 * nu;
    let wait = Exp::new(rate).map_err(|e| Error::invalid(format!("Exp({rate}): {e}")))?;
    let mut flip_times = Vec::new();
    let mut t = wait.sample(rng);
    while t < t_up {
        flip_times.push(t);
        t += wait.sample(rng);
    }
    Ok(RtnTrajectory {
        initial_sign,
        flip_times,
        t_up,
    })
}

/// Value of the process at time `t`; right-continuous at flip times.
pub fn value_at(traj: &RtnTrajectory, t: f64) -> Result<i8> {
    if !(0.0..=traj.t_up).contains(&t) {
        return Err(Error::invalid(format!(
            "t={t} outside [0, {}]",
            traj.t_up
        )));
    }
    let flips = traj.flip_times.partition_point(|&ft| ft <= t);
    Ok(if flips % 2 == 0 {
        traj.initial_sign
    } else {
        -traj.initial_sign
    })
}

/// Staggered sign of node `n` (0-based): +1 for even indices.
pub fn site_sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Site energy eps0 + (-1)^n * Omega * alpha(t) for 0-based node `n`.
pub fn site_energy(n: usize, t: f64, traj: &RtnTrajectory, omega: f64, eps0: f64) -> Result<f64> {
    Ok(eps0 + site_sign(n) * omega * value_at(traj, t)? as f64)
}

/// Sample estimate of <alpha(t) alpha(t + lag)> averaged over the
/// trajectories and over a uniform time grid on [0, t_up - lag].
pub fn estimate_autocorrelation(trajectories: &[RtnTrajectory], lag: f64) -> Result<f64> {
    if trajectories.len() < 2 {
        return Err(Error::invalid("need at least 2 trajectories"));
    }
    let t_up = trajectories[0].t_up;
    if !(0.0..=t_up).contains(&lag) {
        return Err(Error::invalid(format!("lag={lag} outside [0, {t_up}]")));
    }
    let n_grid = 64usize;
    let span = t_up - lag;
    let mut total = 0.0;
    for traj in trajectories {
        for i in 0..n_grid {
            let t = if n_grid > 1 {
                span * i as f64 / (n_grid - 1) as f64
            } else {
                0.0
            };
            let a = value_at(traj, t)? as f64;
            let b = value_at(traj, t + lag)? as f64;
            total += a * b;
        }
    }
    Ok(total / (trajectories.len() * n_grid) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn samples(nu: f64, t_up: f64, count: usize, seed: u64) -> Vec<RtnTrajectory> {
        let mut r = rng(seed);
        (0..count)
            .map(|_| sample_trajectory(nu, t_up, &mut r).unwrap())
            .collect()
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_trajectory(1.0, std::f64::consts::PI, &mut rng(9)).unwrap();
        let b = sample_trajectory(1.0, std::f64::consts::PI, &mut rng(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tiny_rate_rarely_flips() {
        let trajs = samples(1e-6, std::f64::consts::PI, 10_000, 3);
        let with_flips = trajs.iter().filter(|t| !t.flip_times.is_empty()).count();
        assert!(
            (with_flips as f64) / 10_000.0 < 1e-4,
            "{with_flips} of 10000 had flips"
        );
    }

    #[test]
    fn mean_flip_count_matches_poisson_rate() {
        // flip rate nu/2: expected count pi/2; tolerance 0.1 is ~8 sigma
        let trajs = samples(1.0, std::f64::consts::PI, 10_000, 17);
        let mean =
            trajs.iter().map(|t| t.flip_times.len() as f64).sum::<f64>() / trajs.len() as f64;
        assert!(
            (mean - 0.5 * std::f64::consts::PI).abs() < 0.1,
            "mean flips {mean}"
        );
    }

    #[test]
    fn value_at_counts_flips() {
        let base = RtnTrajectory {
            initial_sign: 1,
            flip_times: vec![],
            t_up: 2.0,
        };
        assert_eq!(value_at(&base, 1.0).unwrap(), 1);

        let one = RtnTrajectory {
            initial_sign: 1,
            flip_times: vec![0.5],
            t_up: 2.0,
        };
        assert_eq!(value_at(&one, 0.6).unwrap(), -1);

        let two = RtnTrajectory {
            initial_sign: -1,
            flip_times: vec![0.5, 0.7],
            t_up: 2.0,
        };
        assert_eq!(value_at(&two, 1.0).unwrap(), -1);

        // right-continuity: at the flip time the post-flip sign applies
        assert_eq!(value_at(&one, 0.5).unwrap(), -1);
        assert_eq!(value_at(&one, 0.5 - 1e-12).unwrap(), 1);

        assert!(value_at(&one, -0.1).is_err());
        assert!(value_at(&one, 2.1).is_err());
    }

    #[test]
    fn site_energy_staggers_signs() {
        let traj = RtnTrajectory {
            initial_sign: 1,
            flip_times: vec![],
            t_up: 1.0,
        };
        assert_eq!(site_energy(0, 0.5, &traj, 10.0, 0.0).unwrap(), 10.0);
        assert_eq!(site_energy(1, 0.5, &traj, 10.0, 0.0).unwrap(), -10.0);
        assert_eq!(site_energy(4, 0.5, &traj, 0.0, 0.0).unwrap(), 0.0);
        assert_eq!(site_energy(3, 0.5, &traj, 0.0, 2.5).unwrap(), 2.5);
    }

    #[test]
    fn autocorrelation_matches_exponential_decay() {
        let trajs = samples(1.0, 8.0, 10_000, 21);
        assert_eq!(estimate_autocorrelation(&trajs, 0.0).unwrap(), 1.0);
        let c1 = estimate_autocorrelation(&trajs, 1.0).unwrap();
        assert!((c1 - (-1.0f64).exp()).abs() < 0.03, "C(1) = {c1}");
        let c4 = estimate_autocorrelation(&trajs, 4.0).unwrap();
        assert!((c4 - (-4.0f64).exp()).abs() < 0.03, "C(4) = {c4}");
    }

    #[test]
    fn autocorrelation_across_rates_within_three_se() {
        for &nu in &[0.1, 1.0, 10.0] {
            let trajs = samples(nu, 4.0, 4_000, 100 + nu as u64);
            for &lag in &[0.5, 1.0, 2.0] {
                // per-trajectory means are i.i.d.; use them for the SE
                let per_traj: Vec<f64> = trajs
                    .iter()
                    .map(|t| {
                        let single = [t.clone(), t.clone()];
                        estimate_autocorrelation(&single, lag).unwrap()
                    })
                    .collect();
                let n = per_traj.len() as f64;
                let mean = per_traj.iter().sum::<f64>() / n;
                let var =
                    per_traj.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
                let se = (var / n).sqrt();
                let expected = (-nu * lag).exp();
                assert!(
                    (mean - expected).abs() < 3.0 * se + 1e-9,
                    "nu={nu} lag={lag}: {mean} vs {expected} (se {se})"
                );
            }
        }
    }

    #[test]
    fn process_is_zero_mean_and_stationary() {
        let trajs = samples(1.0, std::f64::consts::PI, 10_000, 5);
        let n_grid = 16;
        for i in 0..n_grid {
            let t = std::f64::consts::PI * i as f64 / (n_grid - 1) as f64;
            let mut sum = 0.0;
            let mut plus = 0usize;
            for traj in &trajs {
                let v = value_at(traj, t).unwrap();
                sum += v as f64;
                if v > 0 {
                    plus += 1;
                }
            }
            let mean = sum / trajs.len() as f64;
            assert!(mean.abs() < 0.05, "t={t}: mean {mean}");
            // uniform sign at every t: binomial 4-sigma band
            let frac = plus as f64 / trajs.len() as f64;
            assert!((frac - 0.5).abs() < 0.02, "t={t}: P(+1) = {frac}");
        }
    }

    #[test]
    fn json_round_trip_and_validation() {
        let traj = sample_trajectory(2.0, 1.5, &mut rng(4)).unwrap();
        let text = traj.to_json();
        assert_eq!(RtnTrajectory::from_json(&text).unwrap(), traj);

        let bad = r#"{"initial_sign": 2, "flip_times": [], "t_up": 1.0}"#;
        assert!(RtnTrajectory::from_json(bad).is_err());
        let bad = r#"{"initial_sign": 1, "flip_times": [0.9, 0.5], "t_up": 1.0}"#;
        assert!(RtnTrajectory::from_json(bad).is_err());
        let bad = r#"{"initial_sign": 1, "flip_times": [1.5], "t_up": 1.0}"#;
        assert!(RtnTrajectory::from_json(bad).is_err());
    }
}
