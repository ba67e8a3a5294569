//! Tip-force signals and the displacement `u = F ∗ P` they produce.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use gauss_quad::jacobi::GaussJacobi;
use rayon::prelude::*;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};
use crate::kernels::{Flags, KernelKind, KernelSpec, KernelValue};

/// Relative change at which Simpson halving stops.
const SIMPSON_REL_TOL: f64 = 1e-4;
const SIMPSON_MIN_INTERVALS: usize = 16;
const SIMPSON_MAX_INTERVALS: usize = 1 << 13;
const JACOBI_DEGREE: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingSignal {
    Heaviside,
    Impulse,
    /// `amplitude · sin(ω t)` for `t ≥ 0`.
    Sinusoid { omega: f64, amplitude: f64 },
    /// `t^{α−1}/Γ(α)`, the inverse transform of `s^{−α}`.
    PowerStep { alpha: f64 },
    /// Linear interpolation of samples; the last value is held beyond the table.
    Tabulated { t: Vec<f64>, f: Vec<f64> },
    /// The inner signal shifted right by `delay ≥ 0`.
    Delayed { delay: f64, signal: Box<ForcingSignal> },
    /// Linear combination `Σ c_i F_i`.
    Sum(Vec<(f64, ForcingSignal)>),
}

impl ForcingSignal {
    pub fn sinusoid(omega: f64, amplitude: f64) -> Result<Self> {
        if !omega.is_finite() || !amplitude.is_finite() {
            return Err(Error::InvalidParameter("sinusoid parameters must be finite".into()));
        }
        Ok(ForcingSignal::Sinusoid { omega, amplitude })
    }

    pub fn power_step(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "power-step order must lie in (0, 1), got {alpha}"
            )));
        }
        Ok(ForcingSignal::PowerStep { alpha })
    }

    pub fn tabulated(t: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        if t.is_empty() || t.len() != f.len() {
            return Err(Error::InvalidParameter(
                "tabulated forcing needs matching, nonempty t and F columns".into(),
            ));
        }
        if t[0] != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tabulated forcing must start at t = 0, got {}",
                t[0]
            )));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("tabulated t grid must be strictly increasing".into()));
        }
        if t.iter().chain(&f).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("tabulated forcing has non-finite entries".into()));
        }
        Ok(ForcingSignal::Tabulated { t, f })
    }

    pub fn delayed(self, delay: f64) -> Result<Self> {
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(Error::InvalidParameter(format!("delay must be nonnegative, got {delay}")));
        }
        Ok(ForcingSignal::Delayed {
            delay,
            signal: Box::new(self),
        })
    }

    /// Two-column `t,F` CSV; a non-numeric first line is taken as a header.
    pub fn from_csv_str(text: &str, source: &str) -> Result<Self> {
        let mut t = Vec::new();
        let mut f = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let parsed = match cols.as_slice() {
                [a, b] => a.parse::<f64>().ok().zip(b.parse::<f64>().ok()),
                _ => None,
            };
            match parsed {
                Some((a, b)) => {
                    t.push(a);
                    f.push(b);
                }
                None if t.is_empty() && i == 0 => continue,
                None => {
                    return Err(Error::Config {
                        location: format!("{source}:{}", i + 1),
                        message: format!("expected two numeric columns 't,F', got '{line}'"),
                    })
                }
            }
        }
        Self::tabulated(t, f).map_err(|e| Error::Config {
            location: source.to_string(),
            message: e.to_string(),
        })
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_csv_str(&text, &path.display().to_string())
    }

    /// `F(t)`, zero for `t < 0`. The impulse has no pointwise values and
    /// evaluates to 0 everywhere.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        match self {
            ForcingSignal::Heaviside => 1.0,
            ForcingSignal::Impulse => 0.0,
            ForcingSignal::Sinusoid { omega, amplitude } => amplitude * (omega * t).sin(),
            ForcingSignal::PowerStep { alpha } => {
                if t == 0.0 {
                    f64::INFINITY
                } else {
                    t.powf(alpha - 1.0) / gamma(*alpha)
                }
            }
            ForcingSignal::Tabulated { t: ts, f } => {
                let k = ts.partition_point(|&s| s <= t);
                if k >= ts.len() {
                    return *f.last().unwrap();
                }
                let (t0, t1) = (ts[k - 1], ts[k]);
                f[k - 1] + (f[k] - f[k - 1]) * (t - t0) / (t1 - t0)
            }
            ForcingSignal::Delayed { delay, signal } => signal.eval(t - delay),
            ForcingSignal::Sum(parts) => parts.iter().map(|(c, s)| c * s.eval(t)).sum(),
        }
    }

    /// Points in `(0, t)` where the signal is not smooth.
    fn breakpoints(&self, t: f64, out: &mut Vec<f64>) {
        match self {
            ForcingSignal::Tabulated { t: ts, .. } => {
                out.extend(ts.iter().copied().filter(|&s| s > 0.0 && s < t))
            }
            ForcingSignal::Delayed { delay, signal } => {
                if *delay > 0.0 && *delay < t {
                    out.push(*delay);
                }
                let mut inner = Vec::new();
                signal.breakpoints(t - delay, &mut inner);
                out.extend(inner.into_iter().map(|s| s + delay));
            }
            ForcingSignal::Sum(parts) => parts.iter().for_each(|(_, s)| s.breakpoints(t, out)),
            _ => {}
        }
    }
}

/// `F(t)` for `t` real.
pub fn eval_f(signal: &ForcingSignal, t: f64) -> f64 {
    signal.eval(t)
}

impl fmt::Display for ForcingSignal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForcingSignal::Heaviside => write!(f, "heaviside"),
            ForcingSignal::Impulse => write!(f, "impulse"),
            ForcingSignal::Sinusoid { omega, amplitude } => {
                write!(f, "sinusoid omega={omega} amplitude={amplitude}")
            }
            ForcingSignal::PowerStep { alpha } => write!(f, "powerstep alpha={alpha}"),
            ForcingSignal::Tabulated { t, .. } => write!(f, "tabulated ({} samples)", t.len()),
            ForcingSignal::Delayed { delay, signal } => write!(f, "{signal} delayed by {delay}"),
            ForcingSignal::Sum(parts) => {
                let terms: Vec<String> = parts.iter().map(|(c, s)| format!("{c}*({s})")).collect();
                write!(f, "{}", terms.join(" + "))
            }
        }
    }
}

impl FromStr for ForcingSignal {
    type Err = Error;

    /// `heaviside`, `impulse`, `sinusoid omega= amplitude=`, `powerstep alpha=`.
    /// Tabulated signals are read from file with [`ForcingSignal::read_csv`].
    fn from_str(text: &str) -> Result<Self> {
        let mut words = text.split_whitespace();
        let head = words.next().unwrap_or("").to_ascii_lowercase();
        let mut kv = HashMap::new();
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| {
                Error::InvalidParameter(format!("expected key=value in forcing, got '{w}'"))
            })?;
            let v: f64 = v
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("forcing parameter {k} is not a number: '{v}'")))?;
            kv.insert(k.to_string(), v);
        }
        let mut take = |k: &str| {
            kv.remove(k)
                .ok_or_else(|| Error::InvalidParameter(format!("forcing '{head}' needs {k}=")))
        };
        let signal = match head.as_str() {
            "heaviside" | "step" => ForcingSignal::Heaviside,
            "impulse" | "delta" => ForcingSignal::Impulse,
            "sinusoid" => {
                let omega = take("omega")?;
                let amplitude = take("amplitude")?;
                ForcingSignal::sinusoid(omega, amplitude)?
            }
            "powerstep" => ForcingSignal::power_step(take("alpha")?)?,
            other => {
                return Err(Error::InvalidParameter(format!("unknown forcing '{other}'")));
            }
        };
        if let Some(k) = kv.keys().next() {
            return Err(Error::InvalidParameter(format!("unexpected forcing parameter '{k}'")));
        }
        Ok(signal)
    }
}

/// Memoized kernel samples for one composition.
struct KernelCache<'a> {
    spec: &'a KernelSpec,
    x: f64,
    stress: bool,
    values: HashMap<u64, KernelValue>,
}

impl<'a> KernelCache<'a> {
    fn eval(&self, t: f64) -> Result<KernelValue> {
        if self.stress {
            self.spec.eval_sigma_h(self.x, t)
        } else {
            self.spec.eval_p(self.x, t)
        }
    }

    fn fill(&mut self, ts: &[f64]) -> Result<()> {
        let missing: Vec<f64> = ts
            .iter()
            .copied()
            .filter(|t| !self.values.contains_key(&t.to_bits()))
            .collect();
        let computed: Vec<(u64, KernelValue)> = missing
            .par_iter()
            .map(|&t| Ok((t.to_bits(), self.eval(t)?)))
            .collect::<Result<_>>()?;
        self.values.extend(computed);
        Ok(())
    }

    fn get(&self, t: f64) -> KernelValue {
        self.values[&t.to_bits()]
    }
}

struct Accumulated {
    value: f64,
    error: f64,
    flags: Flags,
}

/// `∫_a^b F(τ) K(t − τ) dτ` by composite Simpson with Richardson halving.
fn simpson_piece(
    signal: &ForcingSignal,
    cache: &mut KernelCache,
    t: f64,
    a: f64,
    b: f64,
) -> Result<Accumulated> {
    let mut n = SIMPSON_MIN_INTERVALS;
    let mut prev: Option<f64> = None;
    loop {
        let h = (b - a) / n as f64;
        let taus: Vec<f64> = (0..=n).map(|i| if i == n { b } else { a + i as f64 * h }).collect();
        let lags: Vec<f64> = taus.iter().map(|&tau| t - tau).collect();
        cache.fill(&lags)?;
        let mut sum = 0.0;
        let mut kernel_err = 0.0;
        let mut flags = Flags::default();
        for (i, (&tau, &lag)) in taus.iter().zip(&lags).enumerate() {
            // one-sided limits at the piece ends
            let f = if i == 0 {
                signal.eval(tau + 1e-12 * (b - a)).min(f64::MAX)
            } else if i == n {
                signal.eval(tau - 1e-12 * (b - a))
            } else {
                signal.eval(tau)
            };
            let k = cache.get(lag);
            let w = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += w * f * k.value;
            kernel_err += w * f.abs() * k.error;
            flags = flags.merge(k.flags);
        }
        let value = sum * h / 3.0;
        let kernel_err = kernel_err * h / 3.0;
        if let Some(p) = prev {
            let change = (value - p).abs();
            if change <= SIMPSON_REL_TOL * value.abs() || change <= 1e-12 || n >= SIMPSON_MAX_INTERVALS {
                return Ok(Accumulated {
                    value,
                    error: change / 15.0 + kernel_err,
                    flags,
                });
            }
        }
        prev = Some(value);
        n *= 2;
    }
}

/// First panel of a power-step convolution, weight `τ^{α−1}` handled by
/// Gauss–Jacobi; returns the value and the difference to a half-degree rule.
fn jacobi_head(alpha: f64, cache: &mut KernelCache, t: f64, h: f64) -> Result<Accumulated> {
    let rule = |deg: usize| {
        GaussJacobi::new(deg, 0.0, alpha - 1.0)
            .map_err(|e| Error::InvalidParameter(format!("Gauss-Jacobi rule: {e}")))
    };
    let (fine, coarse) = (rule(JACOBI_DEGREE)?, rule(JACOBI_DEGREE / 2)?);
    let mut nodes = Vec::new();
    fine.integrate(0.0, h, |tau| {
        nodes.push(t - tau);
        0.0
    });
    coarse.integrate(0.0, h, |tau| {
        nodes.push(t - tau);
        0.0
    });
    cache.fill(&nodes)?;
    let scale = (0.5 * h).powf(alpha - 1.0) / gamma(alpha);
    let mut flags = Flags::default();
    let mut kernel_err = 0.0;
    let v_fine = fine.integrate(0.0, h, |tau| {
        let k = cache.get(t - tau);
        flags = flags.merge(k.flags);
        kernel_err += k.error;
        k.value
    }) * scale;
    let v_coarse = coarse.integrate(0.0, h, |tau| cache.get(t - tau).value) * scale;
    let mean_err = kernel_err / JACOBI_DEGREE as f64;
    Ok(Accumulated {
        value: v_fine,
        error: (v_fine - v_coarse).abs() + mean_err * h.powf(alpha) / (alpha * gamma(alpha)),
        flags,
    })
}

fn convolve(
    spec: &KernelSpec,
    signal: &ForcingSignal,
    x: f64,
    t: f64,
    stress: bool,
) -> Result<KernelValue> {
    let mut cache = KernelCache {
        spec,
        x,
        stress,
        values: HashMap::new(),
    };
    let mut edges = vec![0.0];
    let mut bps = Vec::new();
    signal.breakpoints(t, &mut bps);
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    edges.extend(bps);
    edges.push(t);

    let mut total = Accumulated {
        value: 0.0,
        error: 0.0,
        flags: Flags::default(),
    };
    let add = |acc: Accumulated, total: &mut Accumulated| {
        total.value += acc.value;
        total.error += acc.error;
        total.flags = total.flags.merge(acc.flags);
    };
    for (i, w) in edges.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        match signal {
            ForcingSignal::PowerStep { alpha } if i == 0 => {
                let h = (b - a) / 8.0;
                add(jacobi_head(*alpha, &mut cache, t, h)?, &mut total);
                add(simpson_piece(signal, &mut cache, t, h, b)?, &mut total);
            }
            _ => add(simpson_piece(signal, &mut cache, t, a, b)?, &mut total),
        }
    }
    Ok(KernelValue {
        value: total.value,
        error: total.error,
        flags: Flags {
            accuracy: total.flags.accuracy || !(total.error <= spec.tol.max(SIMPSON_REL_TOL * total.value.abs())),
            ..total.flags
        },
    })
}

fn combine(parts: &[(f64, KernelValue)]) -> KernelValue {
    let mut out = KernelValue {
        value: 0.0,
        error: 0.0,
        flags: Flags::default(),
    };
    for (c, v) in parts {
        out.value += c * v.value;
        out.error += c.abs() * v.error;
        out.flags = out.flags.merge(v.flags);
    }
    out
}

/// Displacement `u(x, t) = (F ∗ P)(x, t)`.
pub fn compose_u(spec: &KernelSpec, signal: &ForcingSignal, x: f64, t: f64) -> Result<KernelValue> {
    if spec.kind != KernelKind::DisplacementP {
        return Err(Error::InvalidParameter("compose_u needs a displacement kernel".into()));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
    }
    if t <= 0.0 {
        return Ok(KernelValue {
            value: 0.0,
            error: 0.0,
            flags: Flags::default(),
        });
    }
    match signal {
        ForcingSignal::Impulse => spec.eval_p(x, t),
        ForcingSignal::Heaviside => spec.eval_step_u(x, t),
        ForcingSignal::Delayed { delay, signal } => compose_u(spec, signal, x, t - delay),
        ForcingSignal::Sum(parts) => {
            let vals = parts
                .iter()
                .map(|(c, s)| Ok((*c, compose_u(spec, s, x, t)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(combine(&vals))
        }
        _ => convolve(spec, signal, x, t, false),
    }
}

/// Stress `σ(x, t) = d/dt (F ∗ σ_H)(x, t)` by central differences of the
/// composed signal; exact for the step, where it is `σ_H` itself.
pub fn compose_sigma(spec: &KernelSpec, signal: &ForcingSignal, x: f64, t: f64) -> Result<KernelValue> {
    if spec.kind != KernelKind::StressSigmaH {
        return Err(Error::InvalidParameter("compose_sigma needs a stress kernel".into()));
    }
    if t < 0.0 {
        return Ok(KernelValue {
            value: 0.0,
            error: 0.0,
            flags: Flags::default(),
        });
    }
    match signal {
        ForcingSignal::Heaviside => spec.eval_sigma_h(x, t),
        ForcingSignal::Impulse => Err(Error::InvalidParameter(
            "stress under impulse forcing is a distribution and is not represented".into(),
        )),
        ForcingSignal::Delayed { delay, signal } => compose_sigma(spec, signal, x, t - delay),
        ForcingSignal::Sum(parts) => {
            let vals = parts
                .iter()
                .map(|(c, s)| Ok((*c, compose_sigma(spec, s, x, t)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(combine(&vals))
        }
        _ => {
            let h = (1e-3f64).min(0.5 * t).max(1e-6);
            let plus = convolve(spec, signal, x, t + h, true)?;
            let minus = if t - h > 0.0 {
                convolve(spec, signal, x, t - h, true)?
            } else {
                KernelValue {
                    value: 0.0,
                    error: 0.0,
                    flags: Flags::default(),
                }
            };
            let error = (plus.error + minus.error) / (2.0 * h);
            Ok(KernelValue {
                value: (plus.value - minus.value) / (2.0 * h),
                error,
                flags: plus.flags.merge(minus.flags),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::ConstitutiveModel;
    use crate::modes::ModeSet;
    use std::sync::Arc;

    fn p_spec(model: ConstitutiveModel) -> KernelSpec {
        let modes = Arc::new(ModeSet::build(&model, 1.0, 64).unwrap());
        KernelSpec::new(KernelKind::DisplacementP, modes, 1e-6).unwrap()
    }

    #[test]
    fn signal_values() {
        assert_eq!(eval_f(&ForcingSignal::Heaviside, 2.0), 1.0);
        assert_eq!(eval_f(&ForcingSignal::Heaviside, -1.0), 0.0);
        let p = ForcingSignal::power_step(0.5).unwrap();
        assert!((eval_f(&p, 1.0) - 1.0 / std::f64::consts::PI.sqrt()).abs() < 1e-14);
        assert_eq!(eval_f(&p, -0.5), 0.0);
        let s = ForcingSignal::sinusoid(2.0, 3.0).unwrap();
        assert!((s.eval(0.4) - 3.0 * 0.8f64.sin()).abs() < 1e-15);
        let tab = ForcingSignal::tabulated(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 0.0]).unwrap();
        assert_eq!(tab.eval(0.5), 1.0);
        assert_eq!(tab.eval(2.0), 1.0);
        assert_eq!(tab.eval(10.0), 0.0);
        assert_eq!(tab.eval(-0.1), 0.0);
        let d = ForcingSignal::Heaviside.delayed(0.5).unwrap();
        assert_eq!(d.eval(0.4), 0.0);
        assert_eq!(d.eval(0.6), 1.0);
    }

    #[test]
    fn invalid_signals() {
        assert!(ForcingSignal::power_step(1.0).is_err());
        assert!(ForcingSignal::power_step(0.0).is_err());
        assert!(ForcingSignal::tabulated(vec![0.1, 1.0], vec![0.0, 1.0]).is_err());
        assert!(ForcingSignal::tabulated(vec![0.0, 1.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
        assert!(ForcingSignal::Heaviside.delayed(-1.0).is_err());
    }

    #[test]
    fn csv_with_and_without_header() {
        let a = ForcingSignal::from_csv_str("t,F\n0,0\n1,2.5\n", "a.csv").unwrap();
        let b = ForcingSignal::from_csv_str("0, 0\n1, 2.5\n", "b.csv").unwrap();
        assert_eq!(a, b);
        let err = ForcingSignal::from_csv_str("t,F\n0,0\n1,x\n", "c.csv").unwrap_err();
        match err {
            Error::Config { location, .. } => assert_eq!(location, "c.csv:3"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn grammar() {
        assert_eq!("heaviside".parse::<ForcingSignal>().unwrap(), ForcingSignal::Heaviside);
        assert_eq!(
            "powerstep alpha=0.5".parse::<ForcingSignal>().unwrap(),
            ForcingSignal::PowerStep { alpha: 0.5 }
        );
        assert!("sinusoid omega=1".parse::<ForcingSignal>().is_err());
        assert!("ramp".parse::<ForcingSignal>().is_err());
    }

    #[test]
    fn impulse_is_kernel() {
        let spec = p_spec(ConstitutiveModel::zener(0.5, 0.2, 0.6).unwrap());
        let u = compose_u(&spec, &ForcingSignal::Impulse, 0.7, 1.3).unwrap();
        assert_eq!(u.value, spec.eval_p(0.7, 1.3).unwrap().value);
    }

    #[test]
    fn tabulated_step_matches_heaviside() {
        let spec = p_spec(ConstitutiveModel::Elastic);
        let tab = ForcingSignal::tabulated(vec![0.0, 5.0], vec![1.0, 1.0]).unwrap();
        let a = compose_u(&spec, &tab, 1.0, 2.0).unwrap();
        let b = compose_u(&spec, &ForcingSignal::Heaviside, 1.0, 2.0).unwrap();
        assert!((a.value - b.value).abs() < 1e-4, "{a:?} {b:?}");
    }

    #[test]
    fn power_step_matches_oracle() {
        use crate::oracle::{invert, p_transform, BromwichConfig};
        let z = ConstitutiveModel::zener(0.5, 0.2, 0.6).unwrap();
        let spec = p_spec(z);
        let u = compose_u(&spec, &ForcingSignal::power_step(0.5).unwrap(), 1.0, 1.5).unwrap();
        let cfg = BromwichConfig::for_modes(&spec.modes);
        let o = invert(|s| Ok(p_transform(&z, 1.0, 1.0, s)? / s.sqrt()), &cfg, 1.5).unwrap();
        assert!((u.value - o.value).abs() < 1e-3 * o.value.abs().max(1.0), "{u:?} {o:?}");
    }
}
