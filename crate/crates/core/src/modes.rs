//! Vibration modes of the rod with its tip body.
//!
//! The zeros of the characteristic function
//! `f(s) = sM sinh(κ sM) + κ cosh(κ sM)` all satisfy `sM(s) = iw` with
//! `tan(κw) = κ/w`. Frequencies are found on the real line first and then
//! lifted to complex poles by Newton iteration on `sM(s) − iw`.
//!
//! Mode `n` is the root with `κw ∈ (nπ, nπ + π/2)`, so `w_n ≈ nπ/κ`; the
//! fundamental mode carries index 0. Only the upper half-plane pole of each
//! conjugate pair is stored.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constitutive::{check_in_cut_plane, ConstitutiveModel};
use crate::error::{Error, Result};

const NEWTON_MAX_ITER: usize = 50;
const RESTARTS: usize = 10;
const SIMPLE_POLE_MIN_DENOM: f64 = 1e-6;
/// First mode index used to fit the residue tail law.
pub const TAIL_FIT_START: usize = 5;

/// One conjugate pole pair, represented by its upper half-plane member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    pub index: usize,
    /// Root of `tan(κw) = κ/w`.
    pub w: f64,
    /// Pole of the kernels, `s·M(s) = i·w`.
    pub s: Complex64,
    /// `d(sM)/ds` at the pole.
    pub dsm: Complex64,
    /// `(1+κ²) sin(κw) + κw cos(κw)`.
    pub denom: f64,
    /// `|f(s)|` at the accepted pole.
    pub residual: f64,
}

/// Fitted bound `|Res_n| ≤ K e^{a t} / n²` for each kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailLaw {
    pub k_displacement: f64,
    pub k_stress: f64,
    pub a: f64,
}

/// Options for building a [`ModeSet`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ModeOptions {
    /// Accept models that violate the analytic assumptions (the Hilfer fluid).
    pub allow_unsafe_model: bool,
}

#[derive(Debug, Clone)]
pub struct ModeSet {
    pub kappa: f64,
    pub model: ConstitutiveModel,
    /// Modes `0..=n_max`, ordered by index.
    pub modes: Vec<Mode>,
    pub n_max: usize,
    /// Indices whose pole could not be resolved as a simple, distinct pole.
    pub unresolved: Vec<usize>,
    pub tail: TailLaw,
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa.is_finite() && kappa > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")))
    }
}

/// `(1+κ²) sin(κw) + κw cos(κw)`; also `−d/dw [κ cos(κw) − w sin(κw)]`.
pub fn mode_denominator(kappa: f64, w: f64) -> f64 {
    let (sn, cs) = (kappa * w).sin_cos();
    (1.0 + kappa * kappa) * sn + kappa * w * cs
}

/// Frequencies `w_0 < w_1 < … < w_{n_max}` with `tan(κw) = κ/w`.
///
/// Each root is bracketed in `(nπ/κ, (n + ½)π/κ)`, bisected, and polished
/// with safeguarded Newton steps on the asymptote-free form
/// `κ cos(κw) − w sin(κw) = 0`.
pub fn find_frequencies(kappa: f64, n_max: usize) -> Result<Vec<f64>> {
    check_kappa(kappa)?;
    (0..=n_max).map(|n| frequency(kappa, n)).collect()
}

fn frequency(kappa: f64, n: usize) -> Result<f64> {
    let g = |w: f64| {
        let (sn, cs) = (kappa * w).sin_cos();
        kappa * cs - w * sn
    };
    let mut lo = n as f64 * PI / kappa;
    let mut hi = (n as f64 * PI + FRAC_PI_2) / kappa;
    let (mut g_lo, g_hi) = (g(lo), g(hi));
    if g_lo == 0.0 && n > 0 {
        return Ok(lo);
    }
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::Bracket { index: n, lo, hi });
    }
    // coarse bisection, then Newton kept inside the bracket
    for _ in 0..20 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm.signum() == g_lo.signum() {
            lo = mid;
            g_lo = gm;
        } else {
            hi = mid;
        }
    }
    let mut w = 0.5 * (lo + hi);
    for _ in 0..60 {
        let gw = g(w);
        if gw == 0.0 {
            break;
        }
        if gw.signum() == g_lo.signum() {
            lo = w;
        } else {
            hi = w;
        }
        let step = gw / -mode_denominator(kappa, w);
        let mut next = w - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - w).abs() <= 2.0 * f64::EPSILON * w.abs() {
            w = next;
            break;
        }
        w = next;
    }
    Ok(w)
}

/// Relative residual `|tan(κw) − κ/w| / (κ/w)`.
///
/// Rounding of `κw` alone contributes about `ε·κw·w/κ`, so this only reaches
/// 1e-12 for the first twenty or so modes; see [`frequency_residual`].
pub fn tan_residual(kappa: f64, w: f64) -> f64 {
    ((kappa * w).tan() - kappa / w).abs() / (kappa / w)
}

/// Scaled residual `|κ cos(κw) − w sin(κw)| / (κ + w)` of the smooth form,
/// which stays at rounding level for every mode.
pub fn frequency_residual(kappa: f64, w: f64) -> f64 {
    let (sn, cs) = (kappa * w).sin_cos();
    (kappa * cs - w * sn).abs() / (kappa + w)
}

fn newton_lift(
    model: &ConstitutiveModel,
    w: f64,
    start: Complex64,
    damping: f64,
) -> Option<Complex64> {
    let target = Complex64::new(0.0, w);
    let tol = 1e-10 * (1.0 + w);
    let mut s = start;
    let mut converged_steps = 0;
    for _ in 0..NEWTON_MAX_ITER {
        let g = model.sm(s).ok()? - target;
        let dg = model.d_sm(s).ok()?;
        if dg.norm() == 0.0 {
            return None;
        }
        let mut step = g / dg * damping;
        // stay in the open upper half-plane
        let mut tries = 0;
        while s.im - step.im <= 0.0 && tries < 60 {
            step *= 0.5;
            tries += 1;
        }
        s -= step;
        if g.norm() < tol {
            // a couple of extra quadratic steps to reach machine precision
            converged_steps += 1;
            if converged_steps >= 2 || step.norm() <= 4.0 * f64::EPSILON * s.norm() {
                break;
            }
        }
    }
    let g = model.sm(s).ok()? - target;
    (g.norm() < tol && s.im > 0.0).then_some(s)
}

/// Pole `s` in the upper half-plane with `s·M(s) = i·w`.
///
/// Newton from `i·w/c∞`; on failure, damped Newton from ten deterministic
/// perturbations of the start.
pub fn lift_to_pole(model: &ConstitutiveModel, kappa: f64, w: f64) -> Result<Complex64> {
    check_kappa(kappa)?;
    lift_with_guesses(model, w, &[], 0)
}

fn lift_with_guesses(
    model: &ConstitutiveModel,
    w: f64,
    extra: &[Complex64],
    index: usize,
) -> Result<Complex64> {
    if !(w > 0.0) {
        return Err(Error::InvalidParameter(format!("frequency must be positive, got {w}")));
    }
    if matches!(model, ConstitutiveModel::Elastic) {
        return Ok(Complex64::new(0.0, w));
    }
    let c_inf = model.limits().map(|l| l.c_inf).unwrap_or(1.0);
    let s0 = Complex64::new(0.0, w / c_inf);
    if let Some(s) = newton_lift(model, w, s0, 1.0) {
        return Ok(s);
    }
    for &g in extra {
        if let Some(s) = newton_lift(model, w, g, 1.0) {
            return Ok(s);
        }
    }
    for k in 0..RESTARTS {
        let phase = Complex64::from_polar(0.1, 2.0 * PI * k as f64 / RESTARTS as f64);
        let start = s0 * (1.0 + phase);
        if let Some(s) = newton_lift(model, w, start, 0.5) {
            return Ok(s);
        }
    }
    Err(Error::Convergence {
        index,
        reason: format!("no root of sM(s) = {w}i after {RESTARTS} restarts"),
    })
}

/// Scaled characteristic function: `f(s) = mantissa · e^{log_scale}`.
pub fn eval_f_scaled(model: &ConstitutiveModel, kappa: f64, s: Complex64) -> Result<(Complex64, f64)> {
    let sm = model.sm(s)?;
    Ok(f_scaled_from_sm(kappa, sm))
}

pub(crate) fn f_scaled_from_sm(kappa: f64, sm: Complex64) -> (Complex64, f64) {
    let z = sm * kappa;
    let sign = if z.re < 0.0 { -1.0 } else { 1.0 };
    let zp = z * sign;
    let e2 = (-2.0 * zp).exp();
    let body = sm * sign * (1.0 - e2) + kappa * (1.0 + e2);
    (Complex64::from_polar(0.5, zp.im) * body, zp.re)
}

/// `f(s) = sM(s) sinh(κ sM(s)) + κ cosh(κ sM(s))`.
pub fn eval_f(model: &ConstitutiveModel, kappa: f64, s: Complex64) -> Result<Complex64> {
    check_kappa(kappa)?;
    check_in_cut_plane(s)?;
    let (m, scale) = eval_f_scaled(model, kappa, s)?;
    let v = m * scale.exp();
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation(format!(
            "f overflows at s = {s} (exponent {scale:.1})"
        )))
    }
}

impl ModeSet {
    /// Frequencies, poles, derivative data and the fitted tail law for
    /// modes `0..=n_max`.
    pub fn build(model: &ConstitutiveModel, kappa: f64, n_max: usize) -> Result<ModeSet> {
        Self::build_with(model, kappa, n_max, ModeOptions::default())
    }

    pub fn build_with(
        model: &ConstitutiveModel,
        kappa: f64,
        n_max: usize,
        opts: ModeOptions,
    ) -> Result<ModeSet> {
        check_kappa(kappa)?;
        model.validate()?;
        if !model.is_pipeline_safe() && !opts.allow_unsafe_model {
            return Err(Error::InvalidParameter(format!(
                "model '{model}' violates the small-|s| limit assumption; \
                 enable the unsafe-model override to use it"
            )));
        }
        let freqs = find_frequencies(kappa, n_max)?;
        let first: Vec<Result<Complex64>> = freqs
            .par_iter()
            .enumerate()
            .map(|(n, &w)| lift_with_guesses(model, w, &[], n))
            .collect();

        let mut modes = Vec::with_capacity(freqs.len());
        let mut unresolved = Vec::new();
        let mut prev: Option<(f64, Complex64)> = None;
        for (n, (&w, lifted)) in freqs.iter().zip(first).enumerate() {
            // homotopy in w from the previous pole
            let lifted = lifted.or_else(|e| match prev {
                Some((pw, ps)) => lift_with_guesses(model, w, &[ps * (w / pw)], n),
                None => Err(e),
            });
            let s = match lifted {
                Ok(s) => s,
                Err(_) => {
                    unresolved.push(n);
                    continue;
                }
            };
            let dsm = model.d_sm(s)?;
            let denom = mode_denominator(kappa, w);
            let residual = eval_f(model, kappa, s).map(|f| f.norm()).unwrap_or(f64::INFINITY);
            let duplicate = modes
                .iter()
                .any(|m: &Mode| (m.s - s).norm() < 1e-8 * s.norm());
            if denom.abs() < SIMPLE_POLE_MIN_DENOM || duplicate {
                unresolved.push(n);
            }
            prev = Some((w, s));
            modes.push(Mode {
                index: n,
                w,
                s,
                dsm,
                denom,
                residual,
            });
        }
        let tail = fit_tail(kappa, &modes);
        Ok(ModeSet {
            kappa,
            model: *model,
            modes,
            n_max,
            unresolved,
            tail,
        })
    }

    /// Modes that enter the residue sums.
    pub fn resolved(&self) -> impl Iterator<Item = &Mode> {
        self.modes
            .iter()
            .filter(move |m| !self.unresolved.contains(&m.index))
    }

    /// Largest real part over the stored poles.
    pub fn xi_max(&self) -> f64 {
        self.modes.iter().map(|m| m.s.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// `2K e^{a t} / n_max`: the fitted bound summed over the conjugate
    /// pairs with index above `n_max`.
    pub fn tail_bound(&self, stress: bool, t: f64) -> f64 {
        let k = if stress {
            self.tail.k_stress
        } else {
            self.tail.k_displacement
        };
        2.0 * k * (self.tail.a * t.max(0.0)).exp() / self.n_max.max(1) as f64
    }

    /// A copy restricted to modes `0..=n_max`, with its own tail fit.
    pub fn truncated(&self, n_max: usize) -> ModeSet {
        let modes: Vec<Mode> = self.modes.iter().filter(|m| m.index <= n_max).copied().collect();
        let tail = fit_tail(self.kappa, &modes);
        ModeSet {
            kappa: self.kappa,
            model: self.model,
            unresolved: self.unresolved.iter().copied().filter(|&i| i <= n_max).collect(),
            modes,
            n_max: n_max.min(self.n_max),
            tail,
        }
    }

    /// CSV table: `n,w,re_s,im_s,re_dsm,im_dsm,denom,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,w,re_s,im_s,re_dsm,im_dsm,denom,residual\n");
        for m in &self.modes {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                m.index,
                fmt17(m.w),
                fmt17(m.s.re),
                fmt17(m.s.im),
                fmt17(m.dsm.re),
                fmt17(m.dsm.im),
                fmt17(m.denom),
                fmt17(m.residual)
            );
        }
        out
    }
}

/// 17 significant digits, locale-free.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Magnitude bounds of the residues of `P` and `σ_H` at a mode, without the
/// `e^{ξt}` and spatial factors.
pub fn residue_amplitudes(kappa: f64, m: &Mode) -> (f64, f64) {
    let base = m.denom.abs() * m.dsm.norm() * m.s.norm();
    (m.w / (base * m.s.norm()), kappa / base)
}

fn fit_tail(kappa: f64, modes: &[Mode]) -> TailLaw {
    let fit: Vec<&Mode> = {
        let v: Vec<&Mode> = modes.iter().filter(|m| m.index >= TAIL_FIT_START).collect();
        if v.is_empty() {
            modes.iter().filter(|m| m.index >= 1).collect()
        } else {
            v
        }
    };
    if fit.is_empty() {
        return TailLaw {
            k_displacement: 0.0,
            k_stress: 0.0,
            a: 0.0,
        };
    }
    let mut law = TailLaw {
        k_displacement: 0.0,
        k_stress: 0.0,
        a: f64::NEG_INFINITY,
    };
    for m in fit {
        let n2 = (m.index * m.index) as f64;
        let (ap, aq) = residue_amplitudes(kappa, m);
        law.k_displacement = law.k_displacement.max(ap * n2);
        law.k_stress = law.k_stress.max(aq * n2);
        law.a = law.a.max(m.s.re);
    }
    law
}

/// Winding count of `f` around the boundary of the disc `|s| ≤ radius`,
/// cut along the negative real axis.
#[derive(Debug, Clone, Copy)]
pub struct ZeroCount {
    pub winding: f64,
    pub zeros: i64,
}

/// Argument-principle count of the zeros of `f` inside `|s| ≤ radius`.
///
/// The contour runs counter-clockwise around the circle, back along the upper
/// edge of the cut, clockwise around a small circle at the origin and out
/// along the lower edge. Each piece starts with `n_boundary` samples and is
/// refined wherever the phase jumps by more than π/4.
pub fn count_zeros_in_disc(
    model: &ConstitutiveModel,
    kappa: f64,
    radius: f64,
    n_boundary: usize,
) -> Result<ZeroCount> {
    check_kappa(kappa)?;
    let eps = 1e-6 * radius.min(1.0);
    let phase = |r: f64, theta: f64| -> Result<f64> {
        let m = model.m_polar(r, theta)?;
        let sm = Complex64::from_polar(r, theta) * m;
        Ok(f_scaled_from_sm(kappa, sm).0.arg())
    };
    type Seg<'a> = Box<dyn Fn(f64) -> (f64, f64) + 'a>;
    let segments: Vec<Seg> = vec![
        Box::new(|u: f64| (radius, -PI + 2.0 * PI * u)),
        Box::new(|u: f64| (radius + (eps - radius) * u, PI)),
        Box::new(|u: f64| (eps, PI - 2.0 * PI * u)),
        Box::new(|u: f64| (eps + (radius - eps) * u, -PI)),
    ];
    let mut total = 0.0;
    for seg in &segments {
        let n = n_boundary.max(16);
        let mut u_prev = 0.0;
        let (r, th) = seg(0.0);
        let mut p_prev = phase(r, th)?;
        for i in 1..=n {
            let u = i as f64 / n as f64;
            total += trace(&phase, seg.as_ref(), u_prev, p_prev, u, 0)?;
            let (r, th) = seg(u);
            p_prev = phase(r, th)?;
            u_prev = u;
        }
    }
    let winding = total / (2.0 * PI);
    Ok(ZeroCount {
        winding,
        zeros: winding.round() as i64,
    })
}

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d < -PI {
        d += 2.0 * PI;
    }
    d
}

fn trace(
    phase: &dyn Fn(f64, f64) -> Result<f64>,
    seg: &dyn Fn(f64) -> (f64, f64),
    u0: f64,
    p0: f64,
    u1: f64,
    depth: usize,
) -> Result<f64> {
    let (r, th) = seg(u1);
    let p1 = phase(r, th)?;
    let d = wrap(p1 - p0);
    if d.abs() <= PI / 4.0 || depth >= 24 {
        return Ok(d);
    }
    let um = 0.5 * (u0 + u1);
    let (r, th) = seg(um);
    let pm = phase(r, th)?;
    Ok(trace(phase, seg, u0, p0, um, depth + 1)? + trace(phase, seg, um, pm, u1, depth + 1)?)
}
