//! Independent numerical Laplace inversion used to validate the kernels.
//!
//! Fourier-series inversion along the vertical line `Re s = σ₀`: with period
//! `T`, `f(t) ≈ e^{σ₀t}/T · [½F(σ₀) + Σ_k Re(F(σ₀ + ikπ/T) e^{ikπt/T})]`.
//! The period is tied to the evaluation time, `T = p·t` for an integer `p`,
//! so the phase `e^{ikπ/p}` repeats with sign `(−1)^j` over blocks of `p`
//! consecutive terms. The block sums form an alternating series, which is
//! accelerated by Euler (binomial) averaging of its partial sums.
//!
//! Aliasing from the periodic extension is of order `e^{−2(σ₀−ξ)T}`, so the
//! line is placed at `σ₀ = max(ξ_max, 0) + A/(2T)` with damping `A`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constitutive::ConstitutiveModel;
use crate::error::{Error, Result};
use crate::modes::{f_scaled_from_sm, ModeSet};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BromwichConfig {
    /// Largest real part of any singularity of the transform.
    pub xi_max: f64,
    /// `T = period_factor · t`; must be at least 3 so that `t < T/2`.
    pub period_factor: usize,
    /// Aliasing damping `A`: `σ₀ = max(ξ_max, 0) + A/(2T)`.
    pub damping: f64,
    pub n_terms: usize,
    pub euler_m: usize,
    /// Requested accuracy; inversions whose two Euler orders disagree by more
    /// than ten times this are rejected.
    pub tol: f64,
}

impl Default for BromwichConfig {
    fn default() -> Self {
        BromwichConfig {
            xi_max: 0.0,
            period_factor: 4,
            damping: 28.0,
            n_terms: 8192,
            euler_m: 32,
            tol: 1e-6,
        }
    }
}

impl BromwichConfig {
    /// Defaults with the line placed right of every pole in `modes`.
    pub fn for_modes(modes: &ModeSet) -> Self {
        BromwichConfig {
            xi_max: modes.xi_max(),
            ..Default::default()
        }
    }

    pub fn period(&self, t: f64) -> f64 {
        self.period_factor as f64 * t
    }

    pub fn sigma0(&self, t: f64) -> f64 {
        self.xi_max.max(0.0) + self.damping / (2.0 * self.period(t))
    }

    fn validate(&self) -> Result<()> {
        if self.period_factor < 3 {
            return Err(Error::InvalidParameter(format!(
                "period factor must be at least 3, got {}",
                self.period_factor
            )));
        }
        if self.n_terms < self.period_factor * (self.euler_m + 3) {
            return Err(Error::InvalidParameter(format!(
                "n_terms = {} too small for Euler order {}",
                self.n_terms, self.euler_m
            )));
        }
        if !(self.damping > 0.0) || !self.xi_max.is_finite() {
            return Err(Error::InvalidParameter("damping must be positive and xi_max finite".into()));
        }
        Ok(())
    }
}

/// Inverse transform value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub value: f64,
    pub error: f64,
}

fn euler_average(partial: &[f64], start: usize, m: usize) -> f64 {
    // Σ_k C(m,k) 2^{-m} S_{start+k}, with binomial weights built iteratively
    let mut weight = 0.5f64.powi(m as i32);
    let mut acc = 0.0;
    for k in 0..=m {
        acc += weight * partial[start + k];
        weight *= (m - k) as f64 / (k + 1) as f64;
    }
    acc
}

/// Inverse Laplace transform of `transform` at `t > 0`.
pub fn invert<F>(transform: F, cfg: &BromwichConfig, t: f64) -> Result<Inversion>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let inv = invert_unchecked(transform, cfg, t)?;
    if inv.error > 10.0 * cfg.tol.max(cfg.tol * inv.value.abs()) {
        return Err(Error::Accuracy {
            estimate: inv.error,
            target: cfg.tol,
        });
    }
    Ok(inv)
}

/// Extra damping of the second inversion used to measure aliasing.
const ALIAS_PROBE: f64 = 8.0;

/// As [`invert`] but returns the estimate without applying the tolerance gate.
///
/// The estimate adds the Euler-order disagreement, the round-off carried by
/// the partial sums, and the aliasing from the copies at `t + 2kT`. Aliasing
/// is measured by repeating the sum with `damping + 8`, which leaves the
/// value unchanged except for shrinking those copies by `e^{−8}`.
pub fn invert_unchecked<F>(transform: F, cfg: &BromwichConfig, t: f64) -> Result<Inversion>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    cfg.validate()?;
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("inversion time must be positive, got {t}")));
    }
    let main = bromwich_sum(&transform, cfg, t)?;
    let probe = bromwich_sum(
        &transform,
        &BromwichConfig {
            damping: cfg.damping + ALIAS_PROBE,
            ..*cfg
        },
        t,
    )?;
    Ok(Inversion {
        value: main.value,
        // main − probe = (1 − e^{−8})·aliasing, up to both sums' own errors
        error: main.error
            + probe.error
            + (main.value - probe.value).abs() / (1.0 - (-ALIAS_PROBE).exp()),
    })
}

/// Damped, Euler-accelerated trapezoidal sum; `error` omits aliasing.
fn bromwich_sum<F>(transform: &F, cfg: &BromwichConfig, t: f64) -> Result<Inversion>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let p = cfg.period_factor;
    let period = cfg.period(t);
    let sigma0 = cfg.sigma0(t);
    let blocks = cfg.n_terms / p;
    let step = std::f64::consts::PI / period;

    let terms: Vec<f64> = (0..blocks * p)
        .into_par_iter()
        .map(|k| -> Result<f64> {
            let s = Complex64::new(sigma0, k as f64 * step);
            let r = (k % p) as f64;
            let phase = Complex64::from_polar(1.0, r * std::f64::consts::PI / p as f64);
            let v = (transform(s)? * phase).re;
            if !v.is_finite() {
                return Err(Error::Evaluation(format!("transform not finite at s = {s}")));
            }
            Ok(if k == 0 { 0.5 * v } else { v })
        })
        .collect::<Result<_>>()?;

    let mut partial = Vec::with_capacity(blocks);
    let mut acc = 0.0;
    for (j, block) in terms.chunks(p).enumerate() {
        let b: f64 = block.iter().sum();
        acc += if j % 2 == 0 { b } else { -b };
        partial.push(acc);
    }
    let m = cfg.euler_m;
    let start = blocks - m - 3;
    let e_m = euler_average(&partial, start, m);
    let e_m2 = euler_average(&partial, start, m + 2);
    let scale = (sigma0 * t).exp() / period;
    // recursive summation rounds once per term and once per running sum
    let rounding = f64::EPSILON
        * (terms.iter().map(|v| v.abs()).sum::<f64>() + partial.iter().map(|v| v.abs()).sum::<f64>());
    Ok(Inversion {
        value: scale * e_m,
        error: scale * ((e_m - e_m2).abs() + rounding),
    })
}

/// `P̃(x, s)` assembled from the constitutive and characteristic pieces.
pub fn p_transform(model: &ConstitutiveModel, kappa: f64, x: f64, s: Complex64) -> Result<Complex64> {
    let m = model.m(s)?;
    let sm = s * m;
    let (fm, fscale) = f_scaled_from_sm(kappa, sm);
    let (num, nscale) = scaled_sinh(kappa * x * sm);
    Ok(m * num / fm * (nscale - fscale).exp() / s)
}

/// `σ̃_H(x, s)`.
pub fn sigma_transform(model: &ConstitutiveModel, kappa: f64, x: f64, s: Complex64) -> Result<Complex64> {
    let sm = model.sm(s)?;
    let (fm, fscale) = f_scaled_from_sm(kappa, sm);
    let (num, nscale) = scaled_cosh(kappa * x * sm);
    Ok(kappa * num / fm * (nscale - fscale).exp() / s)
}

// sinh z = mantissa · e^{scale}
fn scaled_sinh(z: Complex64) -> (Complex64, f64) {
    let sign = if z.re < 0.0 { -1.0 } else { 1.0 };
    let zp = z * sign;
    let m = Complex64::from_polar(0.5, zp.im) * (1.0 - (-2.0 * zp).exp()) * sign;
    (m, zp.re)
}

fn scaled_cosh(z: Complex64) -> (Complex64, f64) {
    let zp = if z.re < 0.0 { -z } else { z };
    let m = Complex64::from_polar(0.5, zp.im) * (1.0 + (-2.0 * zp).exp());
    (m, zp.re)
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("x must lie in [0, 1], got {x}")))
    }
}

/// Oracle for the displacement kernel `P(x, t)`.
pub fn oracle_p(model: &ConstitutiveModel, kappa: f64, x: f64, t: f64, cfg: &BromwichConfig) -> Result<Inversion> {
    check_x(x)?;
    if t < 0.0 {
        return Ok(Inversion { value: 0.0, error: 0.0 });
    }
    invert(|s| p_transform(model, kappa, x, s), cfg, t)
}

/// Oracle for the step-load stress `σ_H(x, t)`.
pub fn oracle_sigma_h(
    model: &ConstitutiveModel,
    kappa: f64,
    x: f64,
    t: f64,
    cfg: &BromwichConfig,
) -> Result<Inversion> {
    check_x(x)?;
    if t < 0.0 {
        return Ok(Inversion { value: 0.0, error: 0.0 });
    }
    invert(|s| sigma_transform(model, kappa, x, s), cfg, t)
}

/// Oracle for the step-load displacement `u(x, t) = ∫₀ᵗ P(x, τ) dτ`.
pub fn oracle_step_u(model: &ConstitutiveModel, kappa: f64, x: f64, t: f64, cfg: &BromwichConfig) -> Result<Inversion> {
    check_x(x)?;
    if t < 0.0 {
        return Ok(Inversion { value: 0.0, error: 0.0 });
    }
    invert(|s| Ok(p_transform(model, kappa, x, s)? / s), cfg, t)
}
