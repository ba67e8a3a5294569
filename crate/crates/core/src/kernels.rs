//! Solution kernels: the impulse-response displacement `P(x, t)` and the
//! step-load stress `σ_H(x, t)`, each a branch-cut integral along the
//! negative real axis plus a residue series over the modes.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::constitutive::{ConstitutiveModel, CutSide};
use crate::error::{Error, Result};
use crate::modes::{find_frequencies, mode_denominator, Mode, ModeSet, TAIL_FIT_START};
use crate::oracle::{oracle_p, oracle_sigma_h, BromwichConfig};
use crate::quadrature::{integrate, Integral};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    DisplacementP,
    StressSigmaH,
}

impl KernelKind {
    /// Cut side used before calibration.
    pub fn default_side(self) -> CutSide {
        match self {
            KernelKind::DisplacementP => CutSide::Lower,
            KernelKind::StressSigmaH => CutSide::Upper,
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelKind::DisplacementP => "P",
            KernelKind::StressSigmaH => "sigma_H",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    /// Panel breakpoints on `(0, ∞)`, multiplied by `max(1, 1/t)`.
    pub q_split: Vec<f64>,
    pub rel_tol: f64,
    /// Truncation point for algebraically decaying integrands.
    pub q_max_static: f64,
    /// Panel budget per adaptive integration.
    pub max_panels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            q_split: vec![1e-3, 1.0, 10.0, 100.0],
            rel_tol: 1e-10,
            q_max_static: 1e6,
            max_panels: 400,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-3) {
            return Err(Error::InvalidParameter(format!(
                "quadrature rel_tol must lie in (0, 1e-3], got {}",
                self.rel_tol
            )));
        }
        if self.q_split.is_empty()
            || self.q_split.windows(2).any(|w| w[1] <= w[0])
            || self.q_split[0] <= 0.0
        {
            return Err(Error::InvalidParameter(
                "q_split must be positive and strictly increasing".into(),
            ));
        }
        if !(self.q_max_static.is_finite() && self.q_max_static > *self.q_split.last().unwrap()) {
            return Err(Error::InvalidParameter("q_max_static must exceed the last split".into()));
        }
        Ok(())
    }

    /// Truncation point of `∫ h(q) e^{−qt} dq` given `|h| ≤ bound` there.
    pub fn q_max(&self, t: f64, bound: f64, tol: f64) -> f64 {
        if t <= 0.0 {
            return self.q_max_static;
        }
        let q = (10.0 * bound.max(1.0) / tol).ln().max(1.0) / t;
        // the last split sits where e^{−qt} is already negligible, so small t may exceed the cap
        let lower = self.q_split.last().unwrap() * (1.0 / t).max(1.0);
        q.clamp(lower, self.q_max_static.max(lower))
    }
}

/// Per-sample status flags.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Flags {
    /// Error estimate above the requested tolerance.
    pub accuracy: bool,
    /// Some modes were excluded from the residue sum.
    pub unresolved_modes: bool,
}

impl Flags {
    pub fn is_clean(&self) -> bool {
        !self.accuracy && !self.unresolved_modes
    }

    pub fn merge(self, other: Flags) -> Flags {
        Flags {
            accuracy: self.accuracy || other.accuracy,
            unresolved_modes: self.unresolved_modes || other.unresolved_modes,
        }
    }
}

impl fmt::Display for Flags {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.accuracy {
            parts.push("accuracy");
        }
        if self.unresolved_modes {
            parts.push("unresolved_modes");
        }
        if parts.is_empty() {
            f.write_str("ok")
        } else {
            f.write_str(&parts.join("|"))
        }
    }
}

/// Kernel sample with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub error: f64,
    pub flags: Flags,
}

impl KernelValue {
    fn exact(value: f64) -> Self {
        KernelValue {
            value,
            error: 0.0,
            flags: Flags::default(),
        }
    }

    /// The value, or an accuracy error when the estimate missed the target.
    pub fn checked(&self, tol: f64) -> Result<f64> {
        if self.flags.accuracy {
            Err(Error::Accuracy {
                estimate: self.error,
                target: tol,
            })
        } else {
            Ok(self.value)
        }
    }
}

#[derive(Debug, Clone)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub modes: Arc<ModeSet>,
    pub quad: QuadratureConfig,
    /// Target absolute error per sample.
    pub tol: f64,
    /// Side of the negative real axis on which `M` is evaluated.
    pub side: CutSide,
}

fn check_x(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain(format!("x must lie in [0, 1], got {x}")))
    }
}

/// `r + conj(r)`; the imaginary parts cancel exactly.
fn pair_sum(r: Complex64) -> f64 {
    let pair = r + r.conj();
    assert_eq!(pair.im, 0.0, "conjugate pair left an imaginary part");
    pair.re
}

/// `e^z − 1` without cancellation for small `|z|`.
fn exp_m1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-3 {
        // Taylor series to well below rounding
        let mut term = z;
        let mut acc = z;
        for k in 2..12 {
            term *= z / k as f64;
            acc += term;
        }
        acc
    } else {
        z.exp() - 1.0
    }
}

impl KernelSpec {
    pub fn new(kind: KernelKind, modes: Arc<ModeSet>, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
        }
        Ok(KernelSpec {
            kind,
            modes,
            quad: QuadratureConfig::default(),
            tol,
            side: kind.default_side(),
        })
    }

    pub fn with_side(mut self, side: CutSide) -> Self {
        self.side = side;
        self
    }

    pub fn with_quadrature(mut self, quad: QuadratureConfig) -> Result<Self> {
        quad.validate()?;
        self.quad = quad;
        Ok(self)
    }

    pub fn model(&self) -> &ConstitutiveModel {
        &self.modes.model
    }

    pub fn kappa(&self) -> f64 {
        self.modes.kappa
    }

    fn expect(&self, kind: KernelKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "kernel spec is for {}, not {kind}",
                self.kind
            )))
        }
    }

    /// Ratio `sinh(κxqM)/f` (or `cosh`) on the cut, overflow-safe.
    fn cut_ratio(&self, x: f64, q: f64, cosh: bool) -> Result<(Complex64, Complex64)> {
        let kappa = self.kappa();
        let m = self.model().m_on_cut(q, self.side)?;
        let g = m * q;
        let z = g * kappa;
        let sign = if z.re < 0.0 { -1.0 } else { 1.0 };
        let zp = z * sign;
        let e2 = (-2.0 * zp).exp();
        let e2x = (-2.0 * x * zp).exp();
        let den = g * sign * (1.0 - e2) + kappa * (1.0 + e2);
        let lead = (-(1.0 - x) * zp).exp();
        let num = if cosh { lead * (1.0 + e2x) } else { lead * (1.0 - e2x) * sign };
        Ok((m, num / den))
    }

    /// `Im(M sinh(κxqM)/(qM sinh(κqM) + κ cosh(κqM))) / q` with `M = M(q e^{∓iπ})`.
    pub fn branch_cut_integrand_p(&self, x: f64, q: f64) -> Result<f64> {
        check_x(x)?;
        if !(q > 0.0) {
            return Err(Error::Domain(format!("cut abscissa must be positive, got {q}")));
        }
        let (m, ratio) = self.cut_ratio(x, q, false)?;
        finite((m * ratio).im / q, q)
    }

    /// `Im(cosh(κxqM)/(qM sinh(κqM) + κ cosh(κqM))) / q`.
    pub fn branch_cut_integrand_sigma(&self, x: f64, q: f64) -> Result<f64> {
        check_x(x)?;
        if !(q > 0.0) {
            return Err(Error::Domain(format!("cut abscissa must be positive, got {q}")));
        }
        let (_, ratio) = self.cut_ratio(x, q, true)?;
        finite(ratio.im / q, q)
    }

    fn integrand(&self, x: f64, q: f64) -> Result<f64> {
        match self.kind {
            KernelKind::DisplacementP => self.branch_cut_integrand_p(x, q),
            KernelKind::StressSigmaH => self.branch_cut_integrand_sigma(x, q),
        }
    }

    /// `∫₀^∞ h(q)·w(q) dq` for the kernel's cut integrand `h` and weight `w`.
    fn cut_integral(
        &self,
        x: f64,
        t: f64,
        weight: &(dyn Fn(f64) -> f64 + Sync),
        tol: f64,
        algebraic: bool,
    ) -> Result<Integral> {
        let scale = if t > 0.0 { (1.0 / t).max(1.0) } else { 1.0 };
        let splits: Vec<f64> = self.quad.q_split.iter().map(|b| b * scale).collect();
        let mut err: Option<Error> = None;
        let mut h = |q: f64| -> f64 {
            match self.integrand(x, q) {
                Ok(v) => v * weight(q),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        };
        let q_max = if algebraic {
            self.quad.q_max_static
        } else {
            let bound = splits.iter().map(|&q| h(q).abs()).fold(0.0, f64::max);
            self.quad.q_max(t, bound, tol)
        };
        let mut edges = vec![0.0];
        edges.extend(splits.iter().copied().filter(|&b| b < q_max));
        let mut b = *edges.last().unwrap();
        while b * 10.0 < q_max {
            b *= 10.0;
            edges.push(b);
        }
        edges.push(q_max);

        let n_panels = edges.len() - 1;
        let panel_tol = tol / n_panels as f64;
        let rel = self.quad.rel_tol;
        let max_panels = self.quad.max_panels;

        // first panel: q = q_a e^{−y}, y = v/(1−v), absorbs the q^{α−1} end
        let qa = edges[1];
        let mut total = integrate(
            |v: f64| {
                if v >= 1.0 {
                    return 0.0;
                }
                let y = v / (1.0 - v);
                let q = qa * (-y).exp();
                if q <= 0.0 {
                    return 0.0;
                }
                h(q) * q / ((1.0 - v) * (1.0 - v))
            },
            0.0,
            1.0,
            panel_tol,
            rel,
            max_panels,
        );
        for w in edges[1..].windows(2) {
            total = total + integrate(&mut h, w[0], w[1], panel_tol, rel, max_panels);
        }
        // neglected tail beyond q_max
        let h_end = h(q_max).abs();
        total.error += if algebraic || t <= 0.0 {
            h_end * q_max
        } else {
            h_end / t
        };
        if let Some(e) = err {
            return Err(e);
        }
        Ok(total)
    }

    fn residue_coefficient(&self, mode: &Mode, x: f64) -> Complex64 {
        let kappa = self.kappa();
        let kw = kappa * mode.w;
        let i = Complex64::new(0.0, 1.0);
        match self.kind {
            KernelKind::DisplacementP => {
                i * (mode.w * (kw * x).sin() / mode.denom) / (mode.s * mode.s * mode.dsm)
            }
            KernelKind::StressSigmaH => {
                -i * (kappa * (kw * x).cos() / mode.denom) / (mode.s * mode.dsm)
            }
        }
    }

    fn finish(&self, value: f64, error: f64) -> KernelValue {
        KernelValue {
            value,
            error,
            flags: Flags {
                accuracy: !(error <= self.tol),
                unresolved_modes: !self.modes.unresolved.is_empty(),
            },
        }
    }

    fn is_elastic(&self) -> bool {
        matches!(self.model(), ConstitutiveModel::Elastic)
    }

    /// Impulse-response displacement `P(x, t)`.
    pub fn eval_p(&self, x: f64, t: f64) -> Result<KernelValue> {
        self.expect(KernelKind::DisplacementP)?;
        check_x(x)?;
        if t < 0.0 || x == 0.0 {
            return Ok(KernelValue::exact(0.0));
        }
        self.eval_kernel(x, t)
    }

    /// Step-load stress `σ_H(x, t)`.
    pub fn eval_sigma_h(&self, x: f64, t: f64) -> Result<KernelValue> {
        self.expect(KernelKind::StressSigmaH)?;
        check_x(x)?;
        if t < 0.0 {
            return Ok(KernelValue::exact(0.0));
        }
        let k = self.eval_kernel(x, t)?;
        Ok(KernelValue {
            value: 1.0 + k.value,
            ..k
        })
    }

    fn eval_kernel(&self, x: f64, t: f64) -> Result<KernelValue> {
        let stress = self.kind == KernelKind::StressSigmaH;
        let tail = self.modes.tail_bound(stress, t);
        let mut value = 0.0;
        let mut error = tail;
        if !self.is_elastic() {
            let budget = (0.5 * self.tol).max(f64::MIN_POSITIVE);
            let integral = self.cut_integral(x, t, &|q| (-q * t).exp(), budget, false)?;
            let factor = if stress { self.kappa() / PI } else { 1.0 / PI };
            value += factor * integral.value;
            error += factor * integral.error;
        }
        for mode in self.modes.resolved() {
            let c = self.residue_coefficient(mode, x);
            value += pair_sum(c * (mode.s * t).exp());
        }
        Ok(self.finish(value, error))
    }

    /// Step-load displacement `u(x, t) = ∫₀ᵗ P(x, τ) dτ`, integrated in time
    /// term by term.
    pub fn eval_step_u(&self, x: f64, t: f64) -> Result<KernelValue> {
        self.expect(KernelKind::DisplacementP)?;
        check_x(x)?;
        if t <= 0.0 || x == 0.0 {
            return Ok(KernelValue::exact(0.0));
        }
        let mut value = 0.0;
        let last = self.modes.modes.last().map(|m| m.s.norm()).unwrap_or(1.0).max(1.0);
        let mut error = self.modes.tail_bound(false, t) * (1.0 + (-self.modes.tail.a * t).exp()) / last;
        if !self.is_elastic() {
            let budget = (0.5 * self.tol).max(f64::MIN_POSITIVE);
            let integral =
                self.cut_integral(x, t, &|q| -f64::exp_m1(-q * t) / q, budget, true)?;
            value += integral.value / PI;
            error += integral.error / PI;
        }
        for mode in self.modes.resolved() {
            let c = self.residue_coefficient(mode, x);
            value += pair_sum(c * exp_m1(mode.s * t) / mode.s);
        }
        Ok(self.finish(value, error))
    }

    /// Residue of mode `n` at `(x, t)`, upper half-plane member.
    pub fn residue(&self, mode: &Mode, x: f64, t: f64) -> Complex64 {
        self.residue_coefficient(mode, x) * (mode.s * t).exp()
    }
}

fn finite(v: f64, q: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation(format!("cut integrand not finite at q = {q}")))
    }
}

/// Outcome of choosing the cut side of each kernel against the oracle.
#[derive(Debug, Clone)]
pub struct Calibration {
    pub p_side: CutSide,
    pub sigma_side: CutSide,
    pub log: Vec<String>,
}

/// Probe points of the calibration.
pub const CALIBRATION_T: f64 = 0.1;
pub const CALIBRATION_X: [f64; 3] = [0.5, 0.75, 1.0];

/// Picks, for each kernel, the cut side whose value at `t = 0.1` best matches
/// the oracle on three x probes.
pub fn calibrate_cut_sides(modes: &Arc<ModeSet>, tol: f64) -> Result<Calibration> {
    let mut log = Vec::new();
    if matches!(modes.model, ConstitutiveModel::Elastic) {
        log.push("elastic model: branch-cut term vanishes, calibration n/a".to_string());
        return Ok(Calibration {
            p_side: KernelKind::DisplacementP.default_side(),
            sigma_side: KernelKind::StressSigmaH.default_side(),
            log,
        });
    }
    let cfg = BromwichConfig {
        tol: 1e-8,
        ..BromwichConfig::for_modes(modes)
    };
    let mut pick = |kind: KernelKind| -> Result<CutSide> {
        let base = KernelSpec::new(kind, modes.clone(), tol)?;
        let mut best = (kind.default_side(), f64::INFINITY);
        let mut devs = Vec::new();
        for side in [kind.default_side(), kind.default_side().flip()] {
            let spec = base.clone().with_side(side);
            let mut dev: f64 = 0.0;
            for &x in &CALIBRATION_X {
                let (k, o) = match kind {
                    KernelKind::DisplacementP => (
                        spec.eval_p(x, CALIBRATION_T)?.value,
                        oracle_p(&modes.model, modes.kappa, x, CALIBRATION_T, &cfg)?.value,
                    ),
                    KernelKind::StressSigmaH => (
                        spec.eval_sigma_h(x, CALIBRATION_T)?.value,
                        oracle_sigma_h(&modes.model, modes.kappa, x, CALIBRATION_T, &cfg)?.value,
                    ),
                };
                dev = dev.max((k - o).abs());
            }
            devs.push(format!("{side} side: max |kernel - oracle| = {dev:.3e}"));
            if dev < best.1 {
                best = (side, dev);
            }
        }
        log.push(format!(
            "{kind}: {}; {}; selected {} side",
            devs[0], devs[1], best.0
        ));
        Ok(best.0)
    };
    let p_side = pick(KernelKind::DisplacementP)?;
    let sigma_side = pick(KernelKind::StressSigmaH)?;
    Ok(Calibration {
        p_side,
        sigma_side,
        log,
    })
}

/// Truncated trigonometric series for the elastic rod (`M ≡ 1`).
#[derive(Debug, Clone)]
pub struct ElasticSeries {
    pub kappa: f64,
    w: Vec<f64>,
    denom: Vec<f64>,
}

/// Series value with the `k/n²` tail bound summed beyond the last term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
}

impl ElasticSeries {
    pub fn new(kappa: f64, n_terms: usize) -> Result<Self> {
        if n_terms == 0 {
            return Err(Error::InvalidParameter("n_terms must be at least 1".into()));
        }
        let w = find_frequencies(kappa, n_terms - 1)?;
        let denom = w.iter().map(|&w| mode_denominator(kappa, w)).collect();
        Ok(ElasticSeries { kappa, w, denom })
    }

    pub fn n_terms(&self) -> usize {
        self.w.len()
    }

    fn tail(&self, amplitude: impl Fn(usize) -> f64) -> f64 {
        let n = self.w.len();
        let start = if n > TAIL_FIT_START { TAIL_FIT_START } else { 1.min(n - 1) };
        let k = (start..n)
            .map(|i| amplitude(i) * (i * i) as f64)
            .fold(0.0, f64::max);
        k / n as f64
    }

    /// `2 Σ sin(κw_n x) sin(w_n t) / (w_n D_n)`.
    pub fn p(&self, x: f64, t: f64) -> SeriesValue {
        if t < 0.0 {
            return SeriesValue { value: 0.0, tail_bound: 0.0 };
        }
        let k = self.kappa;
        let value = 2.0
            * self
                .w
                .iter()
                .zip(&self.denom)
                .map(|(&w, &d)| (k * w * x).sin() * (w * t).sin() / (w * d))
                .sum::<f64>();
        SeriesValue {
            value,
            tail_bound: self.tail(|i| 2.0 / (self.w[i] * self.denom[i].abs())),
        }
    }

    /// `−2κ Σ cos(κw_n x) cos(w_n t) / (w_n D_n)`, without the step term.
    pub fn sigma_series(&self, x: f64, t: f64) -> SeriesValue {
        let k = self.kappa;
        let value = -2.0
            * k
            * self
                .w
                .iter()
                .zip(&self.denom)
                .map(|(&w, &d)| (k * w * x).cos() * (w * t).cos() / (w * d))
                .sum::<f64>();
        SeriesValue {
            value,
            tail_bound: self.tail(|i| 2.0 * k / (self.w[i] * self.denom[i].abs())),
        }
    }

    /// Step-load stress: `H(t)` plus the series.
    pub fn sigma_h(&self, x: f64, t: f64) -> SeriesValue {
        if t < 0.0 {
            return SeriesValue { value: 0.0, tail_bound: 0.0 };
        }
        let s = self.sigma_series(x, t);
        SeriesValue {
            value: 1.0 + s.value,
            ..s
        }
    }

    /// `|σ_H − 1| ≤ 2κ Σ 1/(w_n |D_n|)`.
    pub fn sigma_bound(&self) -> f64 {
        2.0 * self.kappa
            * self
                .w
                .iter()
                .zip(&self.denom)
                .map(|(&w, &d)| 1.0 / (w * d.abs()))
                .sum::<f64>()
    }
}

/// Elastic displacement kernel from its closed-form series.
pub fn elastic_p(kappa: f64, x: f64, t: f64, n_terms: usize) -> Result<SeriesValue> {
    check_x(x)?;
    Ok(ElasticSeries::new(kappa, n_terms)?.p(x, t))
}

/// Elastic step-load stress, `1 + series` for `t ≥ 0`.
pub fn elastic_sigma_h(kappa: f64, x: f64, t: f64, n_terms: usize) -> Result<SeriesValue> {
    check_x(x)?;
    Ok(ElasticSeries::new(kappa, n_terms)?.sigma_h(x, t))
}

/// The bare elastic stress series, with no step term.
pub fn elastic_sigma_series(kappa: f64, x: f64, t: f64, n_terms: usize) -> Result<SeriesValue> {
    check_x(x)?;
    Ok(ElasticSeries::new(kappa, n_terms)?.sigma_series(x, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zener() -> ConstitutiveModel {
        ConstitutiveModel::zener(0.5, 0.2, 0.6).unwrap()
    }

    fn spec(model: ConstitutiveModel, kind: KernelKind, n_max: usize) -> KernelSpec {
        let modes = Arc::new(ModeSet::build(&model, 1.0, n_max).unwrap());
        KernelSpec::new(kind, modes, 1e-6).unwrap()
    }

    #[test]
    fn elastic_integrands_vanish() {
        let p = spec(ConstitutiveModel::Elastic, KernelKind::DisplacementP, 4);
        let q = spec(ConstitutiveModel::Elastic, KernelKind::StressSigmaH, 4);
        for &qq in &[1e-4, 0.3, 1.0, 17.0, 500.0] {
            assert_eq!(p.branch_cut_integrand_p(0.7, qq).unwrap(), 0.0);
            assert_eq!(q.branch_cut_integrand_sigma(0.7, qq).unwrap(), 0.0);
        }
        let z = spec(ConstitutiveModel::zener(0.3, 0.4, 0.4).unwrap(), KernelKind::StressSigmaH, 4);
        assert_eq!(z.branch_cut_integrand_sigma(0.2, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn integrands_match_direct_evaluation() {
        let p = spec(zener(), KernelKind::DisplacementP, 4);
        assert_eq!(p.branch_cut_integrand_p(0.0, 3.0).unwrap(), 0.0);
        let m = zener().m_on_cut(1.0, CutSide::Lower).unwrap();
        let direct = (m * m.sinh() / (m * m.sinh() + m.cosh())).im;
        assert!((p.branch_cut_integrand_p(1.0, 1.0).unwrap() - direct).abs() < 1e-14);

        let q = spec(zener(), KernelKind::StressSigmaH, 4);
        let m = zener().m_on_cut(1.0, CutSide::Upper).unwrap();
        let f = m * m.sinh() + m.cosh();
        let direct = (1.0 / f).im;
        assert!((q.branch_cut_integrand_sigma(0.0, 1.0).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn integrand_domain() {
        let p = spec(zener(), KernelKind::DisplacementP, 4);
        assert!(matches!(p.branch_cut_integrand_p(0.5, 0.0), Err(Error::Domain(_))));
        assert!(matches!(p.branch_cut_integrand_p(1.5, 1.0), Err(Error::Domain(_))));
        assert!(p.branch_cut_integrand_p(1.0, 1e5).unwrap().is_finite());
    }

    #[test]
    fn causality_and_fixed_end() {
        let p = spec(zener(), KernelKind::DisplacementP, 16);
        let q = spec(zener(), KernelKind::StressSigmaH, 16);
        for t in [-1.0, -1e-9] {
            assert_eq!(p.eval_p(0.5, t).unwrap().value, 0.0);
            assert_eq!(q.eval_sigma_h(0.5, t).unwrap().value, 0.0);
            assert_eq!(p.eval_step_u(0.5, t).unwrap().value, 0.0);
        }
        for t in [0.0, 0.7, 3.0] {
            assert_eq!(p.eval_p(0.0, t).unwrap().value, 0.0);
        }
        assert!(p.eval_sigma_h(0.5, 1.0).is_err());
    }

    #[test]
    fn elastic_pipeline_matches_series() {
        let p = spec(ConstitutiveModel::Elastic, KernelKind::DisplacementP, 999);
        let q = spec(ConstitutiveModel::Elastic, KernelKind::StressSigmaH, 999);
        let series = ElasticSeries::new(1.0, 1000).unwrap();
        for &x in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            for i in 0..50 {
                let t = 0.2 * i as f64;
                let a = p.eval_p(x, t).unwrap().value;
                assert!((a - series.p(x, t).value).abs() < 1e-8);
                let b = q.eval_sigma_h(x, t).unwrap().value;
                assert!((b - series.sigma_h(x, t).value).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn elastic_series_trivial_values() {
        let s = ElasticSeries::new(1.0, 200).unwrap();
        assert_eq!(s.p(0.0, 1.3).value, 0.0);
        assert_eq!(s.p(0.6, 0.0).value, 0.0);
        let bound = s.sigma_bound();
        for &x in &[0.0, 0.5, 1.0] {
            assert!(s.sigma_series(x, 0.9).value.abs() <= bound);
        }
    }

    #[test]
    fn elastic_p_self_convergence() {
        let a = elastic_p(1.0, 1.0, PI, 1000).unwrap();
        let b = elastic_p(1.0, 1.0, PI, 10000).unwrap();
        assert!((a.value - b.value).abs() < 1e-4);
        assert!((a.value - b.value).abs() <= a.tail_bound);
    }

    #[test]
    fn elastic_sigma_initial_condition() {
        let s = elastic_sigma_series(1.0, 0.5, 0.0, 10000).unwrap();
        // the bare series starts at −1, the step term restores σ(x,0) = 0
        assert!((s.value + 1.0).abs() < 1e-2);
        let h = elastic_sigma_h(1.0, 0.5, 0.0, 10000).unwrap();
        assert!(h.value.abs() < 1e-2);
    }

    #[test]
    fn zener_p_matches_oracle() {
        let p = spec(zener(), KernelKind::DisplacementP, 128);
        let cfg = BromwichConfig::for_modes(&p.modes);
        let k = p.eval_p(1.0, 1.0).unwrap();
        let o = oracle_p(&zener(), 1.0, 1.0, 1.0, &cfg).unwrap();
        assert!((k.value - o.value).abs() < 1e-3 * o.value.abs().max(1.0), "{k:?} {o:?}");
    }

    #[test]
    fn zener_sigma_final_value() {
        let q = spec(zener(), KernelKind::StressSigmaH, 64);
        let v = q.eval_sigma_h(0.5, 200.0).unwrap();
        assert!((v.value - 1.0).abs() < 1e-3, "{v:?}");
    }

    #[test]
    fn small_s_amplitude_law() {
        // |P̃(x, s)| ≈ x|M(s)|² → c₀² x as s → 0⁺
        let z = zener();
        let s = Complex64::new(1e-6, 0.0);
        for &x in &[0.25, 1.0] {
            let v = crate::oracle::p_transform(&z, 1.0, x, s).unwrap();
            let c0 = z.limits().unwrap().c_0;
            assert!((v.norm() - c0 * c0 * x).abs() < 1e-3);
        }
    }

    #[test]
    fn calibration_selects_documented_sides() {
        let modes = Arc::new(ModeSet::build(&zener(), 1.0, 128).unwrap());
        let cal = calibrate_cut_sides(&modes, 1e-6).unwrap();
        assert_eq!(cal.p_side, CutSide::Lower);
        assert_eq!(cal.sigma_side, CutSide::Upper);
        assert_eq!(cal.log.len(), 2);
    }
}
