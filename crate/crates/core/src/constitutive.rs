//! Constitutive models and the modulus quotient `M(s)`.
//!
//! Every model is described by the square root of the ratio of the Laplace
//! symbols of its stress and strain operators,
//!
//! ```text
//! M(s) = sqrt( ∫ φσ(γ) s^γ dγ / ∫ φε(γ) s^γ dγ ),   s ∈ V = ℂ \ (−∞, 0]
//! ```
//!
//! evaluated on the principal branch. Points are handled in polar form
//! `s = r·e^{iθ}` with `θ ∈ [−π, π]`, so the two limits onto the negative
//! real axis (`θ = ±π`) come out of the same code path as interior points.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative distance from `s = 1/a` (or `1/b`) inside which the power-law
/// quotient switches to its Taylor expansion.
const REMOVABLE_SINGULARITY_RADIUS: f64 = 1e-4;

/// Relative tolerance for the Richardson check on finite-difference derivatives.
const DERIVATIVE_CHECK_TOL: f64 = 1e-6;

/// Material law of the rod.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConstitutiveModel {
    /// Hooke law, `M ≡ 1`.
    Elastic,
    /// Fractional Zener solid: `M² = (1 + a s^α) / (1 + b s^α)`.
    FractionalZener { alpha: f64, a: f64, b: f64 },
    /// Power-type distributed order: `φσ = a^γ`, `φε = b^γ`.
    PowerLaw { a: f64, b: f64 },
    /// Fluid-like law with three strain terms. Evaluatable, but outside the
    /// assumptions the kernels rely on.
    HilferFluid {
        a: f64,
        alpha: f64,
        b0: f64,
        b1: f64,
        b2: f64,
        beta0: f64,
        beta1: f64,
        beta2: f64,
    },
}

/// Side of the branch cut on the negative real axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CutSide {
    /// `s = q·e^{+iπ}`
    Upper,
    /// `s = q·e^{−iπ}`
    Lower,
}

impl CutSide {
    pub fn angle(self) -> f64 {
        match self {
            CutSide::Upper => PI,
            CutSide::Lower => -PI,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            CutSide::Upper => CutSide::Lower,
            CutSide::Lower => CutSide::Upper,
        }
    }
}

impl fmt::Display for CutSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CutSide::Upper => write!(f, "upper (q·e^{{+iπ}})"),
            CutSide::Lower => write!(f, "lower (q·e^{{−iπ}})"),
        }
    }
}

/// Limits of `M` at infinity (real part) and at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelLimits {
    pub c_inf: f64,
    pub c_0: f64,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn ordered_ab(a: f64, b: f64) -> Result<()> {
    if a > b {
        return Err(Error::InvalidParameter(format!(
            "a = {a} > b = {b} violates the thermodynamic restriction a <= b"
        )));
    }
    Ok(())
}

impl ConstitutiveModel {
    pub fn zener(alpha: f64, a: f64, b: f64) -> Result<Self> {
        let m = ConstitutiveModel::FractionalZener { alpha, a, b };
        m.validate()?;
        Ok(m)
    }

    pub fn power_law(a: f64, b: f64) -> Result<Self> {
        let m = ConstitutiveModel::PowerLaw { a, b };
        m.validate()?;
        Ok(m)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn hilfer(
        a: f64,
        alpha: f64,
        b0: f64,
        b1: f64,
        b2: f64,
        beta0: f64,
        beta1: f64,
        beta2: f64,
    ) -> Result<Self> {
        let m = ConstitutiveModel::HilferFluid {
            a,
            alpha,
            b0,
            b1,
            b2,
            beta0,
            beta1,
            beta2,
        };
        m.validate()?;
        Ok(m)
    }

    /// Checks the parameter restrictions of each family.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ConstitutiveModel::Elastic => Ok(()),
            ConstitutiveModel::FractionalZener { alpha, a, b } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "alpha must lie in (0, 1), got {alpha}"
                    )));
                }
                positive("a", a)?;
                positive("b", b)?;
                ordered_ab(a, b)
            }
            ConstitutiveModel::PowerLaw { a, b } => {
                positive("a", a)?;
                positive("b", b)?;
                ordered_ab(a, b)
            }
            ConstitutiveModel::HilferFluid {
                a,
                alpha,
                b0,
                b1,
                b2,
                beta0,
                beta1,
                beta2,
            } => {
                for (name, v) in [("a", a), ("b0", b0), ("b1", b1), ("b2", b2)] {
                    positive(name, v)?;
                }
                if !(0.0 < alpha && alpha < beta0 && beta0 < beta1 && beta1 < beta2 && beta2 <= 1.0)
                {
                    return Err(Error::InvalidParameter(format!(
                        "orders must satisfy 0 < alpha < beta0 < beta1 < beta2 <= 1, got \
                         {alpha}, {beta0}, {beta1}, {beta2}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Whether the mode and kernel pipelines accept this model without an
    /// explicit override.
    pub fn is_pipeline_safe(&self) -> bool {
        !matches!(self, ConstitutiveModel::HilferFluid { .. })
    }

    /// Analytic limits, where the family fixes them.
    pub fn limits(&self) -> Option<ModelLimits> {
        match *self {
            ConstitutiveModel::Elastic => Some(ModelLimits { c_inf: 1.0, c_0: 1.0 }),
            ConstitutiveModel::FractionalZener { a, b, .. } | ConstitutiveModel::PowerLaw { a, b } => {
                Some(ModelLimits {
                    c_inf: (a / b).sqrt(),
                    c_0: 1.0,
                })
            }
            ConstitutiveModel::HilferFluid { .. } => None,
        }
    }

    /// `M²` at `s = r·e^{iθ}`, `r > 0`, `θ ∈ [−π, π]`.
    fn m_squared_polar(&self, r: f64, theta: f64) -> Complex64 {
        let pow = |g: f64| Complex64::from_polar(r.powf(g), g * theta);
        match *self {
            ConstitutiveModel::Elastic => Complex64::new(1.0, 0.0),
            ConstitutiveModel::FractionalZener { alpha, a, b } => {
                let w = pow(alpha);
                if w.norm() > 1.0 {
                    let inv = w.inv();
                    (inv + a) / (inv + b)
                } else {
                    (1.0 + w * a) / (1.0 + w * b)
                }
            }
            ConstitutiveModel::PowerLaw { a, b } => {
                quotient_e(a * r, theta) / quotient_e(b * r, theta)
            }
            ConstitutiveModel::HilferFluid {
                a,
                alpha,
                b0,
                b1,
                b2,
                beta0,
                beta1,
                beta2,
            } => {
                let num = 1.0 + pow(alpha) * a;
                let den = pow(beta0) * b0 + pow(beta1) * b1 + pow(beta2) * b2;
                num / den
            }
        }
    }

    pub(crate) fn m_polar(&self, r: f64, theta: f64) -> Result<Complex64> {
        let m = self.m_squared_polar(r, theta).sqrt();
        if m.re.is_finite() && m.im.is_finite() {
            Ok(m)
        } else {
            Err(Error::Evaluation(format!(
                "M is not finite at |s| = {r:e}, arg s = {theta}"
            )))
        }
    }

    /// `M(s)` for `s` in the cut plane.
    pub fn m(&self, s: Complex64) -> Result<Complex64> {
        check_in_cut_plane(s)?;
        let (r, theta) = s.to_polar();
        self.m_polar(r, theta)
    }

    /// Limit of `M` onto the negative real axis at `s = −q` from the given side.
    pub fn m_on_cut(&self, q: f64, side: CutSide) -> Result<Complex64> {
        if !(q > 0.0) || !q.is_finite() {
            return Err(Error::Domain(format!("cut abscissa must be positive, got {q}")));
        }
        self.m_polar(q, side.angle())
    }

    /// `d(sM(s))/ds`.
    ///
    /// Analytic for every family except the power law, which uses a complex
    /// central difference with a Richardson consistency check.
    pub fn d_sm(&self, s: Complex64) -> Result<Complex64> {
        check_in_cut_plane(s)?;
        match *self {
            ConstitutiveModel::Elastic => Ok(Complex64::new(1.0, 0.0)),
            ConstitutiveModel::FractionalZener { alpha, a, b } => {
                let m = self.m(s)?;
                let (r, theta) = s.to_polar();
                let w = Complex64::from_polar(r.powf(alpha), alpha * theta);
                // s·(M²)' = α(a − b)w / (1 + b w)²
                let den = 1.0 + w * b;
                Ok(m + w * (alpha * (a - b)) / (m * den * den * 2.0))
            }
            ConstitutiveModel::HilferFluid {
                a,
                alpha,
                b0,
                b1,
                b2,
                beta0,
                beta1,
                beta2,
            } => {
                let m = self.m(s)?;
                let (r, theta) = s.to_polar();
                let pow = |g: f64| Complex64::from_polar(r.powf(g), g * theta);
                let num = 1.0 + pow(alpha) * a;
                let s_num = pow(alpha) * (a * alpha);
                let den = pow(beta0) * b0 + pow(beta1) * b1 + pow(beta2) * b2;
                let s_den =
                    pow(beta0) * (b0 * beta0) + pow(beta1) * (b1 * beta1) + pow(beta2) * (b2 * beta2);
                let s_m2 = (s_num * den - num * s_den) / (den * den);
                Ok(m + s_m2 / (m * 2.0))
            }
            ConstitutiveModel::PowerLaw { .. } => {
                let g = |z: Complex64| -> Result<Complex64> { Ok(z * self.m(z)?) };
                let h = (1e-8 * s.norm()).max(1e-6);
                let central = |h: f64| -> Result<Complex64> {
                    Ok((g(s + h)? - g(s - h)?) / (2.0 * h))
                };
                let d1 = central(h)?;
                let d2 = central(0.5 * h)?;
                let gap = (d1 - d2).norm();
                if gap > DERIVATIVE_CHECK_TOL * d2.norm() + 1e-12 {
                    return Err(Error::Evaluation(format!(
                        "finite-difference derivative of sM unstable at s = {s}: \
                         step-halving gap {gap:e}"
                    )));
                }
                Ok((d2 * 4.0 - d1) / 3.0)
            }
        }
    }

    /// `s·M(s)`, the quantity whose imaginary values locate the poles.
    pub fn sm(&self, s: Complex64) -> Result<Complex64> {
        Ok(s * self.m(s)?)
    }
}

/// `E(z) = (z − 1) / ln z` at `z = ρ·e^{iθ}`, with the removable singularity
/// at `z = 1` replaced by `1 + u/2 − u²/12`, `u = z − 1`.
fn quotient_e(rho: f64, theta: f64) -> Complex64 {
    let z = Complex64::from_polar(rho, theta);
    let u = z - 1.0;
    if u.norm() < REMOVABLE_SINGULARITY_RADIUS {
        1.0 + u * 0.5 - u * u / 12.0
    } else {
        u / Complex64::new(rho.ln(), theta)
    }
}

pub(crate) fn check_in_cut_plane(s: Complex64) -> Result<()> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite point {s}")));
    }
    if s.im == 0.0 && s.re <= 0.0 {
        return Err(Error::Domain(format!(
            "s = {} lies on the branch cut (−∞, 0]; use the cut-limit evaluation",
            s.re
        )));
    }
    Ok(())
}

impl fmt::Display for ConstitutiveModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ConstitutiveModel::Elastic => write!(f, "elastic"),
            ConstitutiveModel::FractionalZener { alpha, a, b } => {
                write!(f, "zener alpha={alpha} a={a} b={b}")
            }
            ConstitutiveModel::PowerLaw { a, b } => write!(f, "powerlaw a={a} b={b}"),
            ConstitutiveModel::HilferFluid {
                a,
                alpha,
                b0,
                b1,
                b2,
                beta0,
                beta1,
                beta2,
            } => write!(
                f,
                "hilfer a={a} alpha={alpha} b0={b0} b1={b1} b2={b2} beta0={beta0} \
                 beta1={beta1} beta2={beta2}"
            ),
        }
    }
}

impl FromStr for ConstitutiveModel {
    type Err = Error;

    /// Parses `elastic`, `zener alpha=.. a=.. b=..`, `powerlaw a=.. b=..`
    /// or `hilfer a=.. alpha=.. b0=.. b1=.. b2=.. beta0=.. beta1=.. beta2=..`.
    fn from_str(text: &str) -> Result<Self> {
        let mut words = text.split_whitespace();
        let kind = words
            .next()
            .ok_or_else(|| Error::InvalidParameter("empty model string".into()))?;
        let mut params: Vec<(String, f64)> = Vec::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected key=value, got '{w}'"))
            })?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("'{v}' is not a number for {k}")))?;
            if params.iter().any(|(p, _)| p == k) {
                return Err(Error::InvalidParameter(format!("duplicate parameter {k}")));
            }
            params.push((k.to_string(), v));
        }
        let expect = |names: &[&str]| -> Result<Vec<f64>> {
            for (k, _) in &params {
                if !names.contains(&k.as_str()) {
                    return Err(Error::InvalidParameter(format!(
                        "unknown parameter '{k}' for model '{kind}'"
                    )));
                }
            }
            names
                .iter()
                .map(|n| {
                    params
                        .iter()
                        .find(|(k, _)| k == n)
                        .map(|(_, v)| *v)
                        .ok_or_else(|| {
                            Error::InvalidParameter(format!("missing parameter '{n}' for '{kind}'"))
                        })
                })
                .collect()
        };
        match kind {
            "elastic" => {
                expect(&[])?;
                Ok(ConstitutiveModel::Elastic)
            }
            "zener" => {
                let p = expect(&["alpha", "a", "b"])?;
                ConstitutiveModel::zener(p[0], p[1], p[2])
            }
            "powerlaw" => {
                let p = expect(&["a", "b"])?;
                ConstitutiveModel::power_law(p[0], p[1])
            }
            "hilfer" => {
                let p = expect(&["a", "alpha", "b0", "b1", "b2", "beta0", "beta1", "beta2"])?;
                ConstitutiveModel::hilfer(p[0], p[1], p[2], p[3], p[4], p[5], p[6], p[7])
            }
            other => Err(Error::InvalidParameter(format!("unknown model '{other}'"))),
        }
    }
}

/// Sampled diagnostics for the analytic assumptions on `M`.
///
/// The checks are heuristics over a finite sample; they never abort a run.
#[derive(Debug, Clone)]
pub struct AssumptionReport {
    pub c_inf: f64,
    pub c_0: f64,
    /// Log-slope of `|M|` over the smallest sampled decade; zero for a finite `c₀`.
    pub small_s_slope: f64,
    /// Log-slope of `|M|` over the largest sampled decade; zero for a finite `c∞`.
    pub large_s_slope: f64,
    /// `max |Im M|` over the outer and the preceding third of the radii.
    pub im_outer: f64,
    pub im_middle: f64,
    pub a1: bool,
    pub min_d_sm: f64,
    pub a3: bool,
    /// `max |(s+θ)M(s+θ) − sM(s)| / θ` for `|s| ≥ 1`, `θ = 1e-3`.
    pub a4_lipschitz: f64,
    pub a4: bool,
    /// `max |s · Im M|` over the outer and the preceding decade.
    pub b_outer: f64,
    pub b_inner: f64,
    pub b: bool,
}

impl AssumptionReport {
    pub fn all_pass(&self) -> bool {
        self.a1 && self.a3 && self.a4
    }
}

impl fmt::Display for AssumptionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |b: bool| if b { "pass" } else { "FLAG" };
        writeln!(f, "c_inf (measured)   = {:.6e}", self.c_inf)?;
        writeln!(f, "c_0 (measured)     = {:.6e}", self.c_0)?;
        writeln!(
            f,
            "A1 [{}]: |M| log-slope small-s {:.3e}, large-s {:.3e}; max|Im M| outer {:.3e} vs middle {:.3e}",
            mark(self.a1),
            self.small_s_slope,
            self.large_s_slope,
            self.im_outer,
            self.im_middle
        )?;
        writeln!(f, "A3 [{}]: min |d(sM)/ds| = {:.3e}", mark(self.a3), self.min_d_sm)?;
        writeln!(
            f,
            "A4 [{}]: modulus of continuity / theta = {:.3e}",
            mark(self.a4),
            self.a4_lipschitz
        )?;
        write!(
            f,
            "B  [{}]: max|s Im M| outer decade {:.3e} vs previous {:.3e}",
            mark(self.b),
            self.b_outer,
            self.b_inner
        )
    }
}

const RAYS: [f64; 7] = [
    0.0,
    PI / 4.0,
    -PI / 4.0,
    PI / 2.0,
    -PI / 2.0,
    3.0 * PI / 4.0,
    -3.0 * PI / 4.0,
];

/// Samples `M` on seven rays at `n_samples` log-spaced radii in `[1/s_max, s_max]`.
pub fn check_assumptions(model: &ConstitutiveModel, s_max: f64, n_samples: usize) -> AssumptionReport {
    let s_max = s_max.max(1.0 + 1e-9);
    let n = n_samples.max(16);
    let lmax = s_max.ln();
    let radii: Vec<f64> = (0..n)
        .map(|i| (-lmax + 2.0 * lmax * i as f64 / (n - 1) as f64).exp())
        .collect();
    let finite = |z: Result<Complex64>| z.ok().filter(|z| z.re.is_finite() && z.im.is_finite());
    let at = |r: f64, th: f64| finite(model.m(Complex64::from_polar(r, th)));

    let mean_over_rays = |r: f64, g: &dyn Fn(Complex64) -> f64| -> f64 {
        let vals: Vec<f64> = RAYS.iter().filter_map(|&th| at(r, th)).map(g).collect();
        if vals.is_empty() {
            f64::NAN
        } else {
            vals.iter().sum::<f64>() / vals.len() as f64
        }
    };

    let r_small = radii[0];
    let r_large = radii[n - 1];
    let c_inf = mean_over_rays(r_large, &|m| m.re);
    let c_0 = mean_over_rays(r_small, &|m| m.norm());
    let slope = |r0: f64, r1: f64| {
        let m0 = mean_over_rays(r0, &|m| m.norm().ln());
        let m1 = mean_over_rays(r1, &|m| m.norm().ln());
        (m1 - m0) / (r1.ln() - r0.ln())
    };
    let small_s_slope = slope(r_small, r_small * 10.0);
    let large_s_slope = slope(r_large / 10.0, r_large);

    let max_im = |rs: &[f64]| {
        rs.iter()
            .flat_map(|&r| RAYS.iter().filter_map(move |&th| at(r, th)))
            .map(|m| m.im.abs())
            .fold(0.0_f64, f64::max)
    };
    let third = n / 3;
    let im_outer = max_im(&radii[n - third..]);
    let im_middle = max_im(&radii[n - 2 * third..n - third]);

    let slope_tol = 0.05;
    let a1 = c_inf.is_finite()
        && c_0.is_finite()
        && c_inf > 1e-3
        && c_0 > 1e-3
        && small_s_slope.abs() < slope_tol
        && large_s_slope.abs() < slope_tol
        && im_outer <= im_middle + 1e-12;

    let theta = 1e-3;
    let mut min_d_sm = f64::INFINITY;
    let mut lip = 0.0_f64;
    for &r in radii.iter().filter(|&&r| r >= 1.0) {
        for &th in &RAYS {
            let s = Complex64::from_polar(r, th);
            if let Ok(d) = model.d_sm(s) {
                min_d_sm = min_d_sm.min(d.norm());
            }
            let ds = Complex64::from_polar(theta, th);
            if let (Ok(g0), Ok(g1)) = (model.sm(s), model.sm(s + ds)) {
                lip = lip.max((g1 - g0).norm() / theta);
            }
        }
    }
    let a3 = min_d_sm.is_finite() && min_d_sm > 1e-3;
    let a4 = lip.is_finite() && lip < 1e3;

    let decade = |lo: f64, hi: f64| {
        radii
            .iter()
            .filter(|&&r| r >= lo && r <= hi)
            .flat_map(|&r| RAYS.iter().filter_map(move |&th| at(r, th).map(|m| r * m.im.abs())))
            .fold(0.0_f64, f64::max)
    };
    let b_outer = decade(r_large / 10.0, r_large);
    let b_inner = decade(r_large / 100.0, r_large / 10.0);
    let b = b_outer <= 2.0 * b_inner + 1e-12;

    AssumptionReport {
        c_inf,
        c_0,
        small_s_slope,
        large_s_slope,
        im_outer,
        im_middle,
        a1,
        min_d_sm,
        a3,
        a4_lipschitz: lip,
        a4,
        b_outer,
        b_inner,
        b,
    }
}
