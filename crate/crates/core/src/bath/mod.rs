//! Structured thermal bath: spectral density, reorganization energy, and
//! polaron-frame correlation kernels.
//!
//! The spectral density is a broad lognormal background plus a damped
//! discrete vibrational mode. The polaron treatment is a one-parameter
//! interpolation with displacement fraction `f`: f = 0 leaves the bare
//! site-diagonal coupling (weak-coupling limit), f = 1 is the full
//! polaron. Hops are renormalized by B^2 and dressed by the phonon
//! propagator phi(t); the residual site-diagonal coupling scales with
//! (1 - f)^2. Every site sees the same bath, so kernels are tabulated
//! once and shared read-only across workers.

mod quad;
mod special;

pub use special::exp_integral_ei;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::util::{fmt_g17, TimeGrid};
use crate::{Error, Result};

/// Parameters of the composite spectral density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralParams {
    /// Background cutoff frequency (energy units).
    pub omega_c: f64,
    /// Background dispersion (dimensionless).
    pub sigma: f64,
    /// Background amplitude, 0.06 * x_f when built from the coupling scale.
    pub s_bg: f64,
    /// Vibrational amplitude, 0.025 * x_f.
    pub x_vib: f64,
    /// Ohmic damping factor.
    pub xi: f64,
    /// Ohmic cutoff (energy units).
    pub lambda: f64,
    /// Vibrational mode center (energy units).
    pub zeta: f64,
    /// Coupling scale.
    pub x_f: f64,
    /// Temperature (energy units).
    pub k_bt: f64,
}

impl SpectralParams {
    /// Standard parameter set, scaled by the coupling factor `x_f`.
    pub fn from_coupling(x_f: f64, k_bt: f64) -> Result<Self> {
        let p = SpectralParams {
            omega_c: 1.0,
            sigma: 0.7,
            s_bg: 0.06 * x_f,
            x_vib: 0.025 * x_f,
            xi: 0.3,
            lambda: 5.0,
            zeta: 5.0,
            x_f,
            k_bt,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("omega_c", self.omega_c),
            ("sigma", self.sigma),
            ("lambda", self.lambda),
            ("zeta", self.zeta),
            ("k_bt", self.k_bt),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name}={v} must be positive")));
            }
        }
        let non_negative = [
            ("s_bg", self.s_bg),
            ("x_vib", self.x_vib),
            ("xi", self.xi),
            ("x_f", self.x_f),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name}={v} must be non-negative")));
            }
        }
        Ok(())
    }

    /// Upper truncation for frequency quadratures; the integrands decay
    /// exponentially well before this point.
    fn omega_max(&self) -> f64 {
        50.0 * self
            .lambda
            .max(self.zeta)
            .max(self.omega_c * (4.0 * self.sigma).exp())
    }

    /// Seed points for the adaptive quadrature: the lognormal peak and
    /// the vibrational resonance.
    fn quad_seeds(&self) -> Vec<f64> {
        vec![
            0.01,
            0.1,
            self.omega_c * (-2.0 * self.sigma).exp(),
            self.omega_c,
            self.omega_c * (2.0 * self.sigma).exp(),
            0.5 * self.zeta,
            self.zeta - 2.0 * self.xi * self.zeta,
            self.zeta,
            self.zeta + 2.0 * self.xi * self.zeta,
            2.0 * self.zeta,
            5.0 * self.lambda.max(self.zeta),
            20.0 * self.lambda.max(self.zeta),
        ]
    }
}

/// Components of the spectral density at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralValue {
    pub background: f64,
    pub vibrational: f64,
    pub combined: f64,
}

/// Evaluate (J_bg, J_vib, J_com) at `omega > 0`.
pub fn spectral_density(omega: f64, p: &SpectralParams) -> Result<SpectralValue> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::invalid(format!("omega={omega} must be positive")));
    }
    let background = j_background(omega, p);
    let vibrational = j_vibrational(omega, p);
    Ok(SpectralValue {
        background,
        vibrational,
        combined: background + vibrational,
    })
}

fn j_background(omega: f64, p: &SpectralParams) -> f64 {
    let log_ratio = (omega / p.omega_c).ln() / p.sigma;
    (std::f64::consts::PI / 2.0).sqrt() * p.s_bg * omega / p.sigma * (-0.5 * log_ratio * log_ratio).exp()
}

fn j_ohmic(omega: f64, p: &SpectralParams) -> f64 {
    p.xi * omega * (-omega / p.lambda).exp()
}

fn j_vibrational(omega: f64, p: &SpectralParams) -> f64 {
    let ohm = j_ohmic(omega, p);
    let g = p.zeta - p.xi * p.lambda / std::f64::consts::PI
        + ohm * exp_integral_ei(omega / p.lambda).expect("omega > 0") / std::f64::consts::PI;
    p.x_vib * omega * omega * ohm / ((omega - g) * (omega - g) + ohm * ohm)
}

/// Mode effective frequency at omega -> 0 (the Ei term vanishes there).
fn g_at_zero(p: &SpectralParams) -> f64 {
    p.zeta - p.xi * p.lambda / std::f64::consts::PI
}

/// Which part of J enters the reorganization integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectralComponent {
    Background,
    Vibrational,
    Ohmic,
    Total,
}

/// Reorganization energy int_0^inf J(omega)/omega domega for the chosen
/// component, by adaptive quadrature to absolute tolerance 1e-8.
pub fn reorganization_energy(p: &SpectralParams, component: SpectralComponent) -> Result<f64> {
    p.validate()?;
    let seeds = p.quad_seeds();
    let f = |omega: f64| -> f64 {
        if omega <= 0.0 {
            // J/omega -> 0: the background dies off superpolynomially
            // and the vibrational part goes as omega^2
            return 0.0;
        }
        match component {
            SpectralComponent::Background => j_background(omega, p) / omega,
            SpectralComponent::Vibrational => j_vibrational(omega, p) / omega,
            SpectralComponent::Ohmic => j_ohmic(omega, p) / omega,
            SpectralComponent::Total => {
                (j_background(omega, p) + j_vibrational(omega, p)) / omega
            }
        }
    };
    quad::integrate(f, 0.0, p.omega_max(), 1e-8, &seeds)
}

const OMEGA_FLOOR: f64 = 1e-9;

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

/// Phonon propagator
/// phi(t) = f^2 int domega J_com/omega^2 [coth(omega/2kT) cos wt - i sin wt].
///
/// The omega -> 0 limit of the real integrand is finite and evaluated by
/// its limit formula 2 kT X xi / g(0)^2.
pub fn phonon_propagator(t: f64, f: f64, p: &SpectralParams) -> Result<Complex64> {
    validate_fraction(f)?;
    p.validate()?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("t={t} must be non-negative")));
    }
    if f == 0.0 || p.x_f == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let seeds = p.quad_seeds();
    let g0 = g_at_zero(p);
    let limit_re = 2.0 * p.k_bt * p.x_vib * p.xi / (g0 * g0);
    let re = quad::integrate(
        |w: f64| {
            if w < OMEGA_FLOOR {
                return limit_re;
            }
            let j = j_background(w, p) + j_vibrational(w, p);
            j / (w * w) * coth(w / (2.0 * p.k_bt)) * (w * t).cos()
        },
        0.0,
        p.omega_max(),
        1e-8,
        &seeds,
    )?;
    let im = if t == 0.0 {
        0.0
    } else {
        -quad::integrate(
            |w: f64| {
                if w < OMEGA_FLOOR {
                    return 0.0;
                }
                let j = j_background(w, p) + j_vibrational(w, p);
                j / (w * w) * (w * t).sin()
            },
            0.0,
            p.omega_max(),
            1e-8,
            &seeds,
        )?
    };
    let f2 = f * f;
    Ok(Complex64::new(f2 * re, f2 * im))
}

fn validate_fraction(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) || !f.is_finite() {
        return Err(Error::invalid(format!(
            "displacement fraction f={f} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Renormalization factor B = exp(-Re phi(0)/2) and the uniform polaron
/// site shift R = -f (2 - f) E_r(total).
pub fn renormalization_factor(f: f64, p: &SpectralParams) -> Result<(f64, f64)> {
    validate_fraction(f)?;
    let b = (-0.5 * phonon_propagator(0.0, f, p)?.re).exp();
    let shift = -f * (2.0 - f) * reorganization_energy(p, SpectralComponent::Total)?;
    Ok((b, shift))
}

/// Tabulated polaron-frame bath correlation kernels on a uniform grid.
///
/// C_z drives the site-diagonal residual coupling, C_X and C_Y the two
/// hop-fluctuation quadratures of each edge.
#[derive(Debug, Clone)]
pub struct BathKernels {
    pub f: f64,
    /// Hop renormalization factor B in (0, 1].
    pub b_factor: f64,
    /// Renormalized electronic coupling B^2 V.
    pub v_renorm: f64,
    /// Uniform polaron site shift (dropped from the Hamiltonian as a
    /// global phase, kept for reporting).
    pub site_shift: f64,
    pub e_r_total: f64,
    pub grid: TimeGrid,
    pub c_z: Vec<Complex64>,
    pub c_x: Vec<Complex64>,
    pub c_y: Vec<Complex64>,
}

/// Tabulate the kernels for displacement fraction `f` and bare coupling
/// `v` on `grid`.
pub fn tabulate_kernels(
    grid: TimeGrid,
    f: f64,
    v: f64,
    p: &SpectralParams,
) -> Result<BathKernels> {
    validate_fraction(f)?;
    p.validate()?;
    let (b_factor, site_shift) = renormalization_factor(f, p)?;
    let e_r_total = reorganization_energy(p, SpectralComponent::Total)?;
    let v_renorm = b_factor * b_factor * v;

    let seeds = p.quad_seeds();
    let zero = Complex64::new(0.0, 0.0);
    let one_minus_f_sq = (1.0 - f) * (1.0 - f);

    let mut c_z = Vec::with_capacity(grid.len());
    let mut c_x = Vec::with_capacity(grid.len());
    let mut c_y = Vec::with_capacity(grid.len());

    for t in grid.points() {
        // site-diagonal residual coupling
        let cz = if one_minus_f_sq == 0.0 || p.x_f == 0.0 {
            zero
        } else {
            let re = quad::integrate(
                |w: f64| {
                    if w < OMEGA_FLOOR {
                        return 0.0; // J coth -> 2 kT J/omega -> 0
                    }
                    let j = j_background(w, p) + j_vibrational(w, p);
                    j * coth(w / (2.0 * p.k_bt)) * (w * t).cos()
                },
                0.0,
                p.omega_max(),
                1e-8,
                &seeds,
            )?;
            let im = if t == 0.0 {
                0.0
            } else {
                -quad::integrate(
                    |w: f64| {
                        if w < OMEGA_FLOOR {
                            return 0.0;
                        }
                        let j = j_background(w, p) + j_vibrational(w, p);
                        j * (w * t).sin()
                    },
                    0.0,
                    p.omega_max(),
                    1e-8,
                    &seeds,
                )?
            };
            Complex64::new(one_minus_f_sq * re, one_minus_f_sq * im)
        };
        c_z.push(cz);

        // hop-fluctuation quadratures from the phonon propagator
        let (cx, cy) = if f == 0.0 || p.x_f == 0.0 {
            (zero, zero)
        } else {
            let phi = phonon_propagator(t, f, p)?;
            let v2 = Complex64::new(v_renorm * v_renorm, 0.0);
            (
                v2 * ((2.0 * phi).cosh() - 1.0),
                v2 * (2.0 * phi).sinh(),
            )
        };
        c_x.push(cx);
        c_y.push(cy);
    }

    Ok(BathKernels {
        f,
        b_factor,
        v_renorm,
        site_shift,
        e_r_total,
        grid,
        c_z,
        c_x,
        c_y,
    })
}

impl BathKernels {
    /// Debug CSV: t, Re/Im of each kernel, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re_c_z,im_c_z,re_c_x,im_c_x,re_c_y,im_c_y\n");
        for (i, t) in self.grid.points().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                fmt_g17(t),
                fmt_g17(self.c_z[i].re),
                fmt_g17(self.c_z[i].im),
                fmt_g17(self.c_x[i].re),
                fmt_g17(self.c_x[i].im),
                fmt_g17(self.c_y[i].re),
                fmt_g17(self.c_y[i].im),
            ));
        }
        out
    }
}
