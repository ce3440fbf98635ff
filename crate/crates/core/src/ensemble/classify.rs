//! Taxonomy of efficiency-vs-noise-amplitude curves.
//!
//! Curves are smoothed with a 3-point moving average (endpoints kept
//! raw), compressed into monotone segments whose prominence reaches the
//! significance threshold theta, and mapped onto the six named classes
//! plus FLAT/OTHER overflow labels.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::util::fmt_g17;
use crate::{Error, Result};

/// Monotone-segment class of an efficiency curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CurveClass {
    /// Monotonic decay.
    MD,
    /// Decreasing then increasing, ending below the noiseless value.
    DI,
    /// Decreasing then increasing, ending above the noiseless value.
    DI2,
    /// Increasing.
    I,
    /// Increasing then decreasing.
    ID,
    /// Increasing, decreasing, increasing again.
    IDI,
    /// Total variation below the significance threshold.
    FLAT,
    Other,
}

pub const ALL_CLASSES: [CurveClass; 8] = [
    CurveClass::MD,
    CurveClass::DI,
    CurveClass::DI2,
    CurveClass::I,
    CurveClass::ID,
    CurveClass::IDI,
    CurveClass::FLAT,
    CurveClass::Other,
];

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CurveClass::MD => "MD",
            CurveClass::DI => "DI",
            CurveClass::DI2 => "DI2",
            CurveClass::I => "I",
            CurveClass::ID => "ID",
            CurveClass::IDI => "IDI",
            CurveClass::FLAT => "FLAT",
            CurveClass::Other => "OTHER",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for CurveClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ALL_CLASSES
            .iter()
            .find(|c| c.to_string() == s)
            .copied()
            .ok_or_else(|| Error::parse("class", format!("unknown curve class `{s}`")))
    }
}

/// Efficiency sampled on an amplitude grid for one network realization.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyCurve {
    pub omegas: Vec<f64>,
    pub etas: Vec<f64>,
    pub realization: usize,
    pub class: Option<CurveClass>,
}

impl EfficiencyCurve {
    /// CSV with columns omega, eta (17 significant digits).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,eta\n");
        for (o, e) in self.omegas.iter().zip(&self.etas) {
            out.push_str(&format!("{},{}\n", fmt_g17(*o), fmt_g17(*e)));
        }
        out
    }
}

pub const DEFAULT_CLASS_THETA: f64 = 0.02;

/// Classify the amplitude dependence of a curve that starts at the
/// noiseless point (omega = 0) and has at least 5 samples.
pub fn classify_curve(curve: &EfficiencyCurve, theta: f64) -> Result<CurveClass> {
    if curve.omegas.len() != curve.etas.len() {
        return Err(Error::invalid("curve grids have different lengths"));
    }
    if curve.etas.len() < 5 {
        return Err(Error::invalid("classification needs at least 5 points"));
    }
    if curve.omegas[0] != 0.0 {
        return Err(Error::invalid("classification needs the noiseless point"));
    }
    if !(theta > 0.0) {
        return Err(Error::invalid("significance threshold must be positive"));
    }

    let y = smooth3(&curve.etas);
    let dirs = significant_directions(&y, theta);
    let eta0 = curve.etas[0];
    let eta_end = *curve.etas.last().expect("non-empty");

    Ok(match dirs.as_slice() {
        [] => CurveClass::FLAT,
        [-1] => CurveClass::MD,
        [1] => CurveClass::I,
        [-1, 1] => {
            if eta_end < eta0 - theta {
                CurveClass::DI
            } else if eta_end > eta0 + theta {
                CurveClass::DI2
            } else {
                CurveClass::Other
            }
        }
        [1, -1] => CurveClass::ID,
        [1, -1, 1] => CurveClass::IDI,
        _ => CurveClass::Other,
    })
}

/// 3-point moving average, endpoints kept raw so single-step features at
/// the curve ends survive.
fn smooth3(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut y = x.to_vec();
    for i in 1..n - 1 {
        y[i] = (x[i - 1] + x[i] + x[i + 1]) / 3.0;
    }
    y
}

/// Monotone directions of the segments whose prominence reaches theta.
fn significant_directions(y: &[f64], theta: f64) -> Vec<i8> {
    let mut dirs = Vec::new();
    let mut dir: i8 = 0;
    // running extremes: before the first segment both are tracked
    let mut low = y[0];
    let mut high = y[0];
    let mut cand = y[0];
    for &v in &y[1..] {
        match dir {
            0 => {
                if v >= low + theta {
                    dir = 1;
                    dirs.push(1);
                    cand = v;
                } else if v <= high - theta {
                    dir = -1;
                    dirs.push(-1);
                    cand = v;
                } else {
                    low = low.min(v);
                    high = high.max(v);
                }
            }
            1 => {
                if v > cand {
                    cand = v;
                } else if v <= cand - theta {
                    dir = -1;
                    dirs.push(-1);
                    cand = v;
                }
            }
            _ => {
                if v < cand {
                    cand = v;
                } else if v >= cand + theta {
                    dir = 1;
                    dirs.push(1);
                    cand = v;
                }
            }
        }
    }
    dirs
}

/// Per-k histogram over curve classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassDistribution {
    /// (k, class, count, fraction), k ascending, classes in canonical order.
    pub rows: Vec<(usize, CurveClass, usize, f64)>,
}

pub fn class_distribution(
    items: impl IntoIterator<Item = (usize, CurveClass)>,
) -> ClassDistribution {
    let mut per_k: BTreeMap<usize, BTreeMap<CurveClass, usize>> = BTreeMap::new();
    for (k, class) in items {
        *per_k.entry(k).or_default().entry(class).or_insert(0) += 1;
    }
    let mut rows = Vec::new();
    for (k, counts) in per_k {
        let total: usize = counts.values().sum();
        for class in ALL_CLASSES {
            let count = counts.get(&class).copied().unwrap_or(0);
            rows.push((k, class, count, count as f64 / total as f64));
        }
    }
    ClassDistribution { rows }
}

impl ClassDistribution {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,class,count,fraction\n");
        for &(k, class, count, fraction) in &self.rows {
            out.push_str(&format!("{k},{class},{count},{}\n", fmt_g17(fraction)));
        }
        out
    }

    pub fn fraction(&self, k: usize, class: CurveClass) -> f64 {
        self.rows
            .iter()
            .find(|&&(rk, rc, _, _)| rk == k && rc == class)
            .map(|&(_, _, _, f)| f)
            .unwrap_or(0.0)
    }

    pub fn observed_classes(&self, k: usize) -> Vec<CurveClass> {
        self.rows
            .iter()
            .filter(|&&(rk, _, count, _)| rk == k && count > 0)
            .map(|&(_, c, _, _)| c)
            .collect()
    }
}

/// Histogram of eta over realizations, one column per amplitude, plus the
/// per-amplitude ensemble mean.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyDistribution {
    pub omegas: Vec<f64>,
    pub bin_edges: Vec<f64>,
    /// counts[omega_idx][bin]
    pub counts: Vec<Vec<usize>>,
    pub mean_eta: Vec<f64>,
}

pub fn efficiency_distribution(
    curves: &[EfficiencyCurve],
    n_bins: usize,
) -> Result<EfficiencyDistribution> {
    if curves.is_empty() {
        return Err(Error::invalid("need at least one curve"));
    }
    if n_bins == 0 {
        return Err(Error::invalid("need at least one bin"));
    }
    let omegas = curves[0].omegas.clone();
    for c in curves {
        if c.omegas != omegas {
            return Err(Error::invalid("curves sampled on different grids"));
        }
    }
    let bin_edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 / n_bins as f64).collect();
    let mut counts = vec![vec![0usize; n_bins]; omegas.len()];
    let mut mean_eta = vec![0.0; omegas.len()];
    for c in curves {
        for (oi, &eta) in c.etas.iter().enumerate() {
            let bin = ((eta * n_bins as f64).floor() as usize).min(n_bins - 1);
            counts[oi][bin] += 1;
            mean_eta[oi] += eta;
        }
    }
    for m in &mut mean_eta {
        *m /= curves.len() as f64;
    }
    Ok(EfficiencyDistribution {
        omegas,
        bin_edges,
        counts,
        mean_eta,
    })
}

impl EfficiencyDistribution {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,bin_low,bin_high,count\n");
        for (oi, o) in self.omegas.iter().enumerate() {
            for b in 0..self.counts[oi].len() {
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    fmt_g17(*o),
                    fmt_g17(self.bin_edges[b]),
                    fmt_g17(self.bin_edges[b + 1]),
                    self.counts[oi][b]
                ));
            }
        }
        out
    }
}
