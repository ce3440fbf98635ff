//! Exponential integral Ei.

use crate::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CUTOFF: f64 = 40.0;
const MAX_TERMS: usize = 400;

/// Principal-value exponential integral Ei(x), x != 0.
///
/// Power series up to |x| = 40, asymptotic expansion beyond; negative
/// arguments go through E1 with a continued fraction for x < -1.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::Singularity(
            "Ei has a logarithmic singularity at x = 0".into(),
        ));
    }
    if !x.is_finite() {
        return Err(Error::invalid(format!("Ei argument {x}")));
    }
    if x > 0.0 {
        if x <= SERIES_CUTOFF {
            Ok(ei_series_positive(x))
        } else {
            Ok(ei_asymptotic(x))
        }
    } else {
        Ok(-e1(-x))
    }
}

/// Ei(x) = gamma + ln x + sum_k x^k / (k k!), all terms positive.
fn ei_series_positive(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..=MAX_TERMS {
        term *= x / k as f64;
        let contrib = term / k as f64;
        sum += contrib;
        if contrib < sum.abs() * 1e-17 {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

/// Ei(x) ~ e^x/x sum_k k!/x^k; truncated at the smallest term.
fn ei_asymptotic(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    for k in 1..=MAX_TERMS {
        let next = term * k as f64 / x;
        if next >= term {
            break; // divergent tail reached
        }
        term = next;
        sum += term;
        if term < sum * 1e-17 {
            break;
        }
    }
    x.exp() / x * sum
}

/// E1(y) for y > 0.
fn e1(y: f64) -> f64 {
    if y <= 1.0 {
        // alternating series, stable for small arguments
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..=MAX_TERMS {
            term *= -y / k as f64;
            let contrib = term / k as f64;
            sum += contrib;
            if contrib.abs() < 1e-18 {
                break;
            }
        }
        -EULER_GAMMA - y.ln() - sum
    } else {
        // modified Lentz continued fraction
        let tiny = 1e-300;
        let mut b = y + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..=MAX_TERMS {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-y).exp()
    }
}
