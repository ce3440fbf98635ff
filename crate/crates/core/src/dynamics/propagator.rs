//! Dense complex linear algebra: segment propagators, eigendecompositions,
//! and a scaled-series matrix exponential.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, Solve, UPLO};
use num_complex::Complex64 as C64;

use crate::noise::{value_at, RtnTrajectory};
use crate::{Error, Result};

pub type CMat = Array2<C64>;
pub type CVec = Array1<C64>;

pub fn adjoint(m: &CMat) -> CMat {
    m.t().mapv(|z| z.conj())
}

pub fn identity(n: usize) -> CMat {
    Array2::eye(n)
}

/// Eigendecomposition of a Hermitian matrix; eigenvectors are columns.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Array1<f64>,
    pub vectors: CMat,
}

pub fn eigh(h: &CMat) -> Result<HermitianEig> {
    let (values, vectors) = h
        .eigh(UPLO::Lower)
        .map_err(|e| Error::numeric("eigh", e.to_string()))?;
    Ok(HermitianEig { values, vectors })
}

impl HermitianEig {
    /// exp(-i H t) = V exp(-i lambda t) V^dagger.
    pub fn evolution(&self, t: f64) -> CMat {
        let phases: CVec = self
            .values
            .iter()
            .map(|&l| C64::from_polar(1.0, -l * t))
            .collect();
        let scaled = &self.vectors * &phases; // scales column j by phases[j]
        scaled.dot(&adjoint(&self.vectors))
    }
}

/// Unitary segment propagator exp(-i H delta) for Hermitian `h`.
pub fn segment_propagator(h: &CMat, delta: f64) -> Result<CMat> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::invalid(format!("segment length delta={delta}")));
    }
    Ok(eigh(h)?.evolution(delta))
}

/// Matrix exponential by scaling and squaring with a Taylor series.
///
/// The argument is scaled until its infinity norm is below 1/2, where the
/// series reaches machine precision in ~20 terms.
pub fn expm(a: &CMat) -> CMat {
    let n = a.nrows();
    let norm = a
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0f64, f64::max);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = C64::new(1.0 / f64::powi(2.0, s as i32), 0.0);
    let b = a * scale;

    let mut result = identity(n);
    let mut term = identity(n);
    for k in 1..=60 {
        term = term.dot(&b) / C64::new(k as f64, 0.0);
        result = result + &term;
        let tn: f64 = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if tn < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = result.dot(&result);
    }
    result
}

/// Eigendecomposition of a general complex matrix with a solve for the
/// initial-state coefficients; falls back to `expm` when the spectrum is
/// numerically defective.
pub struct GeneralEig {
    pub values: CVec,
    pub vectors: CMat,
}

pub fn eig_general(a: &CMat) -> Result<GeneralEig> {
    let (values, vectors) = a
        .eig()
        .map_err(|e| Error::numeric("eig", e.to_string()))?;
    Ok(GeneralEig { values, vectors })
}

impl GeneralEig {
    /// exp(-i A t) v0, or None when the eigenbasis is too ill-conditioned
    /// to represent v0.
    pub fn propagate(&self, v0: &CVec, t: f64) -> Option<CVec> {
        let coeffs = self.vectors.solve(v0).ok()?;
        // reconstruction residual flags near-defective eigenbases
        let recon = self.vectors.dot(&coeffs);
        let resid: f64 = recon
            .iter()
            .zip(v0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if resid > 1e-9 {
            return None;
        }
        let evolved: CVec = self
            .values
            .iter()
            .zip(coeffs.iter())
            .map(|(&mu, &c)| (-C64::i() * mu * t).exp() * c)
            .collect();
        Some(self.vectors.dot(&evolved))
    }
}

/// Flip times of `traj` strictly inside (a, b).
fn flips_between(traj: &RtnTrajectory, a: f64, b: f64) -> &[f64] {
    let lo = traj.flip_times.partition_point(|&t| t <= a);
    let hi = traj.flip_times.partition_point(|&t| t < b);
    &traj.flip_times[lo..hi]
}

/// Time-ordered trap-free propagator U(b, a) for a two-value telegraph
/// Hamiltonian, split exactly at flip times.
pub struct TelegraphDrive<'a> {
    pub plus: HermitianEig,
    pub minus: HermitianEig,
    pub traj: &'a RtnTrajectory,
}

impl TelegraphDrive<'_> {
    fn eig_at(&self, t: f64) -> Result<&HermitianEig> {
        Ok(if value_at(self.traj, t)? > 0 {
            &self.plus
        } else {
            &self.minus
        })
    }

    /// U(b, a) with a < b; later segments multiply from the left.
    pub fn propagator(&self, a: f64, b: f64) -> Result<CMat> {
        let flips = flips_between(self.traj, a, b);
        let mut u: Option<CMat> = None;
        let mut start = a;
        for &cut in flips.iter().chain(std::iter::once(&b)) {
            let cut = cut.min(b);
            if cut <= start {
                continue;
            }
            let seg = self.eig_at(start)?.evolution(cut - start);
            u = Some(match u {
                None => seg,
                Some(prev) => seg.dot(&prev),
            });
            start = cut;
        }
        Ok(u.unwrap_or_else(|| identity(self.plus.vectors.nrows())))
    }

    /// True when no flip interrupts (a, b), so a cached half-step
    /// propagator can be reused.
    pub fn is_uniform(&self, a: f64, b: f64) -> bool {
        flips_between(self.traj, a, b).is_empty()
    }

    pub fn sign_at(&self, t: f64) -> Result<i8> {
        value_at(self.traj, t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
        a.iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn zero_hamiltonian_gives_identity() {
        let h = CMat::zeros((3, 3));
        let u = segment_propagator(&h, 0.7).unwrap();
        assert!(max_abs_diff(&u, &identity(3)) < 1e-14);
    }

    #[test]
    fn propagators_compose() {
        let h = ndarray::array![
            [c(0.5, 0.0), c(2.0, 0.0), c(0.0, 0.0)],
            [c(2.0, 0.0), c(-0.3, 0.0), c(1.0, 0.0)],
            [c(0.0, 0.0), c(1.0, 0.0), c(0.1, 0.0)]
        ];
        let u1 = segment_propagator(&h, 0.3).unwrap();
        let u2 = segment_propagator(&h, 0.5).unwrap();
        let u12 = segment_propagator(&h, 0.8).unwrap();
        assert!(max_abs_diff(&u2.dot(&u1), &u12) < 1e-12);
        // unitarity
        let uu = adjoint(&u12).dot(&u12);
        assert!(max_abs_diff(&uu, &identity(3)) < 1e-12);
    }

    #[test]
    fn rabi_rotation_matches_closed_form() {
        // H = 2 X: exp(-i H d) = cos(2d) I - i sin(2d) X
        let h = ndarray::array![[c(0.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(0.0, 0.0)]];
        let d = std::f64::consts::FRAC_PI_4;
        let u = segment_propagator(&h, d).unwrap();
        let (cos, sin) = ((2.0 * d).cos(), (2.0 * d).sin());
        let expected = ndarray::array![
            [c(cos, 0.0), c(0.0, -sin)],
            [c(0.0, -sin), c(cos, 0.0)]
        ];
        assert!(max_abs_diff(&u, &expected) < 1e-12);
    }

    #[test]
    fn expm_matches_eigendecomposition() {
        let h = ndarray::array![
            [c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)],
            [c(2.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)],
            [c(0.0, 0.0), c(2.0, 0.0), c(-1.0, 0.0)]
        ];
        let t = 1.3;
        let via_eig = eigh(&h).unwrap().evolution(t);
        let arg = h.mapv(|z| -C64::i() * z * t);
        let via_series = expm(&arg);
        assert!(max_abs_diff(&via_eig, &via_series) < 1e-12);
    }

    #[test]
    fn general_eig_propagates_non_hermitian() {
        // H - i kappa |1><1| on a 2-site hop
        let h = ndarray::array![[c(0.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(0.0, -0.5)]];
        let eig = eig_general(&h).unwrap();
        let v0: CVec = ndarray::array![c(1.0, 0.0), c(0.0, 0.0)];
        let t = std::f64::consts::PI;
        let psi = eig.propagate(&v0, t).unwrap();
        let arg = h.mapv(|z| -C64::i() * z * t);
        let psi_series = expm(&arg).dot(&v0);
        for (a, b) in psi.iter().zip(psi_series.iter()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-11);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-11);
        }
    }

    #[test]
    fn telegraph_propagator_splits_at_flips() {
        use crate::noise::RtnTrajectory;
        let hp = ndarray::array![[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(-1.0, 0.0)]];
        let hm = ndarray::array![[c(-1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(1.0, 0.0)]];
        let traj = RtnTrajectory {
            initial_sign: 1,
            flip_times: vec![0.4],
            t_up: 1.0,
        };
        let drive = TelegraphDrive {
            plus: eigh(&hp).unwrap(),
            minus: eigh(&hm).unwrap(),
            traj: &traj,
        };
        let u = drive.propagator(0.0, 1.0).unwrap();
        let expected = eigh(&hm)
            .unwrap()
            .evolution(0.6)
            .dot(&eigh(&hp).unwrap().evolution(0.4));
        assert!(max_abs_diff(&u, &expected) < 1e-13);
        assert!(drive.is_uniform(0.5, 0.9));
        assert!(!drive.is_uniform(0.3, 0.5));
    }
}
