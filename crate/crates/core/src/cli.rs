//! Run configuration, grid sweep and report writing behind the `fracrod`
//! command-line tool.
//!
//! A configuration is a flat `key = value` file (`#` starts a comment) whose
//! entries may be overridden from the command line. Recognized keys:
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `model` | constitutive model, e.g. `zener alpha=0.5 a=0.2 b=0.6` | `elastic` |
//! | `kappa` | mass ratio κ > 0 | `1` |
//! | `forcing` | `heaviside`, `impulse`, `sinusoid omega= amplitude=`, `powerstep alpha=`, `tabulated file=PATH` | `heaviside` |
//! | `x` / `nx` | explicit x list, or `nx` uniform points on [0, 1] | `nx = 5` |
//! | `t` / `tmax`, `nt` | explicit t list, or `nt` uniform points on [0, tmax] | `tmax = 10`, `nt = 11` |
//! | `outputs` | `displacement`, `stress` or both, comma separated | both |
//! | `n_max` | highest mode index | `64` |
//! | `tol` | absolute error target per sample, in [1e-10, 1e-2] | `1e-6` |
//! | `oracle_check` | compare every sample with the Laplace-inversion oracle | `false` |
//! | `strict` | exit with status 3 when an accuracy gate fails | `false` |
//! | `allow_unsafe_model` | run models that fail the analytic assumptions | `false` |
//! | `out` | output directory | `.` |

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::constitutive::{check_assumptions, ConstitutiveModel};
use crate::error::{Error, Result};
use crate::forcing::{compose_sigma, compose_u, ForcingSignal};
use crate::kernels::{calibrate_cut_sides, ElasticSeries, Flags, KernelKind, KernelSpec, KernelValue};
use crate::modes::{fmt17, ModeOptions, ModeSet};
use crate::oracle::{invert_unchecked, p_transform, sigma_transform, BromwichConfig};

/// Results CSV header.
pub const RESULTS_HEADER: &str = "x,t,quantity,value,error_estimate,flags";
/// Oracle agreement gate on `|eval − oracle| / max(|oracle|, 1)`.
pub const ORACLE_GATE: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Displacement,
    Stress,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Displacement => "displacement",
            Quantity::Stress => "stress",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: ConstitutiveModel,
    pub kappa: f64,
    pub forcing: ForcingSignal,
    pub x_grid: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub outputs: Vec<Quantity>,
    pub n_max: usize,
    pub tol: f64,
    pub oracle_check: bool,
    pub strict: bool,
    pub allow_unsafe_model: bool,
    pub out_dir: PathBuf,
}

/// One raw `key = value` entry with where it came from.
#[derive(Debug, Clone)]
struct Entry {
    value: String,
    location: String,
    order: usize,
}

fn config_err(location: &str, message: impl Into<String>) -> Error {
    Error::Config {
        location: location.to_string(),
        message: message.into(),
    }
}

fn uniform(n: usize, hi: f64) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect()
}

fn parse_list(e: &Entry) -> Result<Vec<f64>> {
    e.value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| config_err(&e.location, format!("'{s}' is not a number")))
        })
        .collect()
}

fn parse_num<T: std::str::FromStr>(e: &Entry, what: &str) -> Result<T> {
    e.value
        .trim()
        .parse()
        .map_err(|_| config_err(&e.location, format!("{what} expected, got '{}'", e.value)))
}

fn parse_bool(e: &Entry) -> Result<bool> {
    match e.value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(config_err(&e.location, format!("boolean expected, got '{other}'"))),
    }
}

const KEYS: [&str; 15] = [
    "model",
    "kappa",
    "forcing",
    "x",
    "nx",
    "t",
    "tmax",
    "nt",
    "outputs",
    "n_max",
    "tol",
    "oracle_check",
    "strict",
    "allow_unsafe_model",
    "out",
];

/// Accumulates entries from a file and from overrides, later ones winning.
#[derive(Debug, Default)]
pub struct ConfigBuilder {
    entries: HashMap<String, Entry>,
    counter: usize,
    base_dir: Option<PathBuf>,
}

impl ConfigBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the entries of a configuration file's text; `source` names the
    /// file in error messages and anchors relative paths.
    pub fn file_text(mut self, text: &str, source: &Path) -> Result<Self> {
        self.base_dir = source.parent().map(Path::to_path_buf);
        for (i, raw) in text.lines().enumerate() {
            let location = format!("{}:{}", source.display(), i + 1);
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(&location, format!("expected 'key = value', got '{line}'")))?;
            self = self.set(k.trim(), v.trim(), &location)?;
        }
        Ok(self)
    }

    pub fn file(self, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(&path.display().to_string(), format!("cannot read: {e}")))?;
        self.file_text(&text, path)
    }

    /// Sets `key` to `value`; `location` is reported on errors.
    pub fn set(mut self, key: &str, value: &str, location: &str) -> Result<Self> {
        let key = key.replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(config_err(location, format!("unknown key '{key}'")));
        }
        self.counter += 1;
        self.entries.insert(
            key,
            Entry {
                value: value.to_string(),
                location: location.to_string(),
                order: self.counter,
            },
        );
        Ok(self)
    }

    pub fn build(self) -> Result<RunConfig> {
        let get = |k: &str| self.entries.get(k);
        let model = match get("model") {
            Some(e) => {
                let m: ConstitutiveModel = e
                    .value
                    .parse()
                    .map_err(|err: Error| config_err(&e.location, strip(err)))?;
                m.validate().map_err(|err| config_err(&e.location, strip(err)))?;
                m
            }
            None => ConstitutiveModel::Elastic,
        };
        let kappa = match get("kappa") {
            Some(e) => {
                let k: f64 = parse_num(e, "number")?;
                if !(k > 0.0 && k.is_finite()) {
                    return Err(config_err(&e.location, format!("kappa must be positive, got {k}")));
                }
                k
            }
            None => 1.0,
        };
        let forcing = match get("forcing") {
            Some(e) => self.parse_forcing(e)?,
            None => ForcingSignal::Heaviside,
        };

        let newer = |a: Option<&Entry>, b: Option<&Entry>| match (a, b) {
            (Some(a), Some(b)) => a.order > b.order,
            (Some(_), None) => true,
            _ => false,
        };
        let x_grid = if newer(get("x"), get("nx")) {
            let e = get("x").unwrap();
            let xs = parse_list(e)?;
            check_grid(&xs, &e.location, Some(1.0))?;
            xs
        } else {
            let (n, loc) = match get("nx") {
                Some(e) => (parse_num::<usize>(e, "positive integer")?, e.location.clone()),
                None => (5, "nx".to_string()),
            };
            if n == 0 {
                return Err(config_err(&loc, "nx must be at least 1"));
            }
            uniform(n, 1.0)
        };
        let t_list_newer = match get("t") {
            Some(t) => [get("tmax"), get("nt")]
                .iter()
                .all(|o| o.map_or(true, |o| t.order > o.order)),
            None => false,
        };
        let t_grid = if t_list_newer {
            let e = get("t").unwrap();
            let ts = parse_list(e)?;
            check_grid(&ts, &e.location, None)?;
            ts
        } else {
            let tmax = match get("tmax") {
                Some(e) => {
                    let v: f64 = parse_num(e, "number")?;
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(config_err(&e.location, format!("tmax must be nonnegative, got {v}")));
                    }
                    v
                }
                None => 10.0,
            };
            let n = match get("nt") {
                Some(e) => {
                    let n: usize = parse_num(e, "positive integer")?;
                    if n == 0 {
                        return Err(config_err(&e.location, "nt must be at least 1"));
                    }
                    n
                }
                None => 11,
            };
            uniform(n, tmax)
        };
        let outputs = match get("outputs") {
            Some(e) => {
                let mut out = Vec::new();
                for w in e.value.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
                    let q = match w.to_ascii_lowercase().as_str() {
                        "displacement" | "u" => Quantity::Displacement,
                        "stress" | "sigma" => Quantity::Stress,
                        other => {
                            return Err(config_err(&e.location, format!("unknown output '{other}'")))
                        }
                    };
                    if !out.contains(&q) {
                        out.push(q);
                    }
                }
                if out.is_empty() {
                    return Err(config_err(&e.location, "outputs must name at least one quantity"));
                }
                out
            }
            None => vec![Quantity::Displacement, Quantity::Stress],
        };
        let n_max = match get("n_max") {
            Some(e) => parse_num::<usize>(e, "nonnegative integer")?,
            None => 64,
        };
        let tol = match get("tol") {
            Some(e) => {
                let v: f64 = parse_num(e, "number")?;
                if !(1e-10..=1e-2).contains(&v) {
                    return Err(config_err(&e.location, format!("tol must lie in [1e-10, 1e-2], got {v}")));
                }
                v
            }
            None => 1e-6,
        };
        let flag = |k: &str| get(k).map(parse_bool).transpose().map(|b| b.unwrap_or(false));
        Ok(RunConfig {
            model,
            kappa,
            forcing,
            x_grid,
            t_grid,
            outputs,
            n_max,
            tol,
            oracle_check: flag("oracle_check")?,
            strict: flag("strict")?,
            allow_unsafe_model: flag("allow_unsafe_model")?,
            out_dir: get("out").map(|e| PathBuf::from(e.value.trim())).unwrap_or_else(|| PathBuf::from(".")),
        })
    }

    fn parse_forcing(&self, e: &Entry) -> Result<ForcingSignal> {
        let text = e.value.trim();
        if let Some(rest) = text.strip_prefix("tabulated") {
            let path = rest
                .trim()
                .strip_prefix("file=")
                .ok_or_else(|| config_err(&e.location, "tabulated forcing needs file=PATH"))?;
            let mut p = PathBuf::from(path);
            if p.is_relative() {
                if let Some(base) = &self.base_dir {
                    p = base.join(p);
                }
            }
            return ForcingSignal::read_csv(&p).map_err(|err| match err {
                Error::Config { .. } => err,
                other => config_err(&e.location, strip(other)),
            });
        }
        text.parse().map_err(|err: Error| config_err(&e.location, strip(err)))
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::InvalidParameter(m) | Error::Domain(m) | Error::Io(m) => m,
        other => other.to_string(),
    }
}

fn check_grid(v: &[f64], location: &str, upper: Option<f64>) -> Result<()> {
    if v.is_empty() {
        return Err(config_err(location, "grid must be nonempty"));
    }
    if v.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(config_err(location, "grid must be strictly increasing"));
    }
    if v.iter().any(|&x| !(x >= 0.0) || upper.is_some_and(|u| x > u)) {
        let range = upper.map_or("[0, inf)".to_string(), |u| format!("[0, {u}]"));
        return Err(config_err(location, format!("grid values must lie in {range}")));
    }
    Ok(())
}

/// One sample of the results table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub x: f64,
    pub t: f64,
    pub quantity: Quantity,
    pub value: f64,
    pub error: f64,
    pub flags: Flags,
}

/// Oracle comparison summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSummary {
    pub samples: usize,
    pub max_abs: f64,
    pub max_rel: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<Record>,
    pub modes_csv: String,
    pub diagnostics: String,
    pub oracle: Option<OracleSummary>,
}

impl RunOutput {
    pub fn results_csv(&self) -> String {
        let mut out = String::from(RESULTS_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt17(r.x),
                fmt17(r.t),
                r.quantity.name(),
                fmt17(r.value),
                fmt17(r.error),
                r.flags
            );
        }
        out
    }

    /// True when no sample was flagged and the oracle gate, if run, passed.
    pub fn accuracy_ok(&self) -> bool {
        self.records.iter().all(|r| !r.flags.accuracy) && self.oracle.map_or(true, |o| o.passed)
    }

    /// Writes `results.csv`, `modes.csv` and `diagnostics.txt` to `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("results.csv"), self.results_csv())?;
        std::fs::write(dir.join("modes.csv"), &self.modes_csv)?;
        std::fs::write(dir.join("diagnostics.txt"), &self.diagnostics)?;
        Ok(())
    }
}

fn build_modes(cfg: &RunConfig) -> Result<ModeSet> {
    ModeSet::build_with(
        &cfg.model,
        cfg.kappa,
        cfg.n_max,
        ModeOptions {
            allow_unsafe_model: cfg.allow_unsafe_model,
        },
    )
    .map_err(|e| match e {
        Error::InvalidParameter(m) => config_err("model", m),
        other => other,
    })
}

/// Mode table with the asymptotic ratio columns `w·κ/(nπ)` and
/// `Im(s)·c∞·κ/(nπ)`; both are `NaN` for the fundamental mode `n = 0`.
pub fn modes_table(set: &ModeSet) -> String {
    let c_inf = set.model.limits().map(|l| l.c_inf).unwrap_or(f64::NAN);
    let mut out = String::from("n,w,re_s,im_s,re_dsm,im_dsm,denom,residual,w_ratio,zeta_ratio\n");
    for m in &set.modes {
        let npi = m.index as f64 * std::f64::consts::PI;
        let (wr, zr) = if m.index == 0 {
            (f64::NAN, f64::NAN)
        } else {
            (m.w * set.kappa / npi, m.s.im * c_inf * set.kappa / npi)
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            m.index,
            fmt17(m.w),
            fmt17(m.s.re),
            fmt17(m.s.im),
            fmt17(m.dsm.re),
            fmt17(m.dsm.im),
            fmt17(m.denom),
            fmt17(m.residual),
            fmt17(wr),
            fmt17(zr)
        );
    }
    out
}

/// Modes CSV for a configuration.
pub fn dump_modes(cfg: &RunConfig) -> Result<String> {
    Ok(modes_table(&build_modes(cfg)?))
}

/// Laplace transform of a forcing signal, where it has a closed form.
pub fn forcing_transform(signal: &ForcingSignal, s: Complex64) -> Option<Complex64> {
    match signal {
        ForcingSignal::Heaviside => Some(1.0 / s),
        ForcingSignal::Impulse => Some(Complex64::new(1.0, 0.0)),
        ForcingSignal::Sinusoid { omega, amplitude } => Some(amplitude * omega / (s * s + omega * omega)),
        ForcingSignal::PowerStep { alpha } => Some(s.powf(-alpha)),
        ForcingSignal::Delayed { delay, signal } => Some((-s * delay).exp() * forcing_transform(signal, s)?),
        ForcingSignal::Sum(parts) => parts
            .iter()
            .map(|(c, p)| forcing_transform(p, s).map(|v| v * c))
            .sum(),
        ForcingSignal::Tabulated { .. } => None,
    }
}

fn oracle_value(cfg: &RunConfig, bromwich: &BromwichConfig, q: Quantity, x: f64, t: f64) -> Result<f64> {
    let (model, kappa, forcing) = (&cfg.model, cfg.kappa, &cfg.forcing);
    let transform = |s: Complex64| -> Result<Complex64> {
        let fs = forcing_transform(forcing, s)
            .ok_or_else(|| Error::InvalidParameter("forcing has no closed-form transform".into()))?;
        match q {
            Quantity::Displacement => Ok(fs * p_transform(model, kappa, x, s)?),
            Quantity::Stress => Ok(s * fs * sigma_transform(model, kappa, x, s)?),
        }
    };
    Ok(invert_unchecked(transform, bromwich, t)?.value)
}

/// Builds the pipeline, sweeps the grid and assembles the reports.
pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let mut diag = String::new();
    let _ = writeln!(diag, "model: {}", cfg.model);
    let _ = writeln!(diag, "kappa: {}", cfg.kappa);
    let _ = writeln!(diag, "forcing: {}", cfg.forcing);
    let _ = writeln!(diag, "n_max: {}  tol: {:e}", cfg.n_max, cfg.tol);
    let _ = writeln!(diag, "\n[assumptions]");
    let report = check_assumptions(&cfg.model, 1e6, 200);
    let _ = writeln!(diag, "{report}");
    if !cfg.model.is_pipeline_safe() {
        let _ = writeln!(
            diag,
            "model violates the small-|s| limit assumption; running only because allow_unsafe_model is set"
        );
    }

    let modes = Arc::new(build_modes(cfg)?);
    let _ = writeln!(diag, "\n[modes]");
    let _ = writeln!(
        diag,
        "{} modes, xi_max = {}, unresolved = {:?}",
        modes.modes.len(),
        fmt17(modes.xi_max()),
        modes.unresolved
    );
    let _ = writeln!(
        diag,
        "tail law: K_P = {:.6e}, K_sigma = {:.6e}, a = {:.6e}",
        modes.tail.k_displacement, modes.tail.k_stress, modes.tail.a
    );
    let table = modes_table(&modes);

    let _ = writeln!(diag, "\n[cut-side calibration]");
    let cal = calibrate_cut_sides(&modes, cfg.tol)?;
    for line in &cal.log {
        let _ = writeln!(diag, "{line}");
    }
    let p_spec = KernelSpec::new(KernelKind::DisplacementP, modes.clone(), cfg.tol)?.with_side(cal.p_side);
    let s_spec = KernelSpec::new(KernelKind::StressSigmaH, modes.clone(), cfg.tol)?.with_side(cal.sigma_side);

    let mut jobs = Vec::new();
    for &x in &cfg.x_grid {
        for &t in &cfg.t_grid {
            for &q in &cfg.outputs {
                jobs.push((x, t, q));
            }
        }
    }
    let values: Vec<KernelValue> = jobs
        .par_iter()
        .map(|&(x, t, q)| match q {
            Quantity::Displacement => compose_u(&p_spec, &cfg.forcing, x, t),
            Quantity::Stress => compose_sigma(&s_spec, &cfg.forcing, x, t),
        })
        .collect::<Result<_>>()?;
    let records: Vec<Record> = jobs
        .iter()
        .zip(&values)
        .map(|(&(x, t, quantity), v)| Record {
            x,
            t,
            quantity,
            value: v.value,
            error: v.error,
            flags: v.flags,
        })
        .collect();
    let flagged = records.iter().filter(|r| r.flags.accuracy).count();
    let _ = writeln!(diag, "\n[accuracy]");
    let _ = writeln!(diag, "{} samples, {} flagged above tol", records.len(), flagged);
    if cfg.outputs.contains(&Quantity::Stress)
        && !matches!(cfg.forcing, ForcingSignal::Heaviside)
    {
        let _ = writeln!(
            diag,
            "stress under non-step forcing is d/dt(F * sigma_H) by central differences; \
             its error estimate excludes the differencing error"
        );
    }

    if matches!(cfg.model, ConstitutiveModel::Elastic) {
        let _ = writeln!(diag, "\n[elastic stress series]");
        let series = ElasticSeries::new(cfg.kappa, cfg.n_max + 1)?;
        let mut worst: f64 = 0.0;
        for &x in &cfg.x_grid {
            for &t in cfg.t_grid.iter().filter(|&&t| t > 0.0) {
                let pipe = s_spec.eval_sigma_h(x, t)?.value;
                worst = worst.max((pipe - series.sigma_series(x, t).value).abs());
            }
        }
        let _ = writeln!(
            diag,
            "max |sigma_H - bare series| over t > 0 = {} (the step term H(t) = 1)",
            fmt17(worst)
        );
    }

    let mut oracle = None;
    if cfg.oracle_check {
        let _ = writeln!(diag, "\n[oracle check]");
        if forcing_transform(&cfg.forcing, Complex64::new(1.0, 0.0)).is_none() {
            let _ = writeln!(diag, "tabulated forcing has no closed-form transform; skipped");
        } else {
            let bromwich = BromwichConfig::for_modes(&modes);
            let checks: Vec<(f64, f64)> = records
                .par_iter()
                .filter(|r| r.t > 0.0)
                .map(|r| Ok((r.value, oracle_value(cfg, &bromwich, r.quantity, r.x, r.t)?)))
                .collect::<Result<_>>()?;
            let mut summary = OracleSummary {
                samples: checks.len(),
                max_abs: 0.0,
                max_rel: 0.0,
                passed: true,
            };
            for (v, o) in checks {
                let d = (v - o).abs();
                summary.max_abs = summary.max_abs.max(d);
                summary.max_rel = summary.max_rel.max(d / o.abs().max(1.0));
            }
            summary.passed = summary.max_rel <= ORACLE_GATE;
            let _ = writeln!(diag, "samples: {}", summary.samples);
            let _ = writeln!(diag, "max |eval - oracle| = {}", fmt17(summary.max_abs));
            let _ = writeln!(diag, "max relative deviation = {}", fmt17(summary.max_rel));
            let _ = writeln!(
                diag,
                "gate {:e}: {}",
                ORACLE_GATE,
                if summary.passed { "pass" } else { "FAIL" }
            );
            oracle = Some(summary);
        }
    }

    Ok(RunOutput {
        records,
        modes_csv: table,
        diagnostics: diag,
        oracle,
    })
}

/// Process exit status for a finished run.
pub fn exit_code(cfg: &RunConfig, out: &RunOutput) -> i32 {
    if cfg.strict && !out.accuracy_ok() {
        3
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        ConfigBuilder::new().file_text(text, Path::new("run.cfg"))?.build()
    }

    #[test]
    fn defaults() {
        let c = parse("").unwrap();
        assert_eq!(c.model, ConstitutiveModel::Elastic);
        assert_eq!(c.x_grid, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(c.t_grid.len(), 11);
        assert_eq!(c.n_max, 64);
    }

    #[test]
    fn thermodynamic_restriction_reported() {
        let err = parse("kappa = 1\nmodel = zener alpha=0.5 a=0.7 b=0.3\n").unwrap_err();
        match err {
            Error::Config { location, message } => {
                assert_eq!(location, "run.cfg:2");
                assert!(message.contains("thermodynamic restriction"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn field_errors_are_located() {
        let err = parse("kappa = -1\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref location, .. } if location == "run.cfg:1"));
        let err = parse("# comment\nbogus = 3\n").unwrap_err();
        assert!(matches!(err, Error::Config { ref location, .. } if location == "run.cfg:2"));
        let err = parse("x = 0, 0.5, 2\n").unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
        let err = parse("tol = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
        let err = parse("just words\n").unwrap_err();
        assert!(matches!(err, Error::Config { .. }));
    }

    #[test]
    fn overrides_win() {
        let c = ConfigBuilder::new()
            .file_text("kappa = 2\nx = 0, 1\n", Path::new("a.cfg"))
            .unwrap()
            .set("kappa", "0.5", "--kappa")
            .unwrap()
            .set("nx", "3", "--nx")
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(c.kappa, 0.5);
        assert_eq!(c.x_grid, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn elastic_fixed_end_is_zero() {
        let c = parse("x = 0\ntmax = 3\nnt = 4\noutputs = displacement\n").unwrap();
        let out = run(&c).unwrap();
        assert!(out.records.iter().all(|r| r.value == 0.0));
        assert!(out.results_csv().starts_with(RESULTS_HEADER));
    }

    #[test]
    fn elastic_modes_real_parts_vanish() {
        let c = parse("n_max = 60").unwrap();
        let csv = dump_modes(&c).unwrap();
        let rows: Vec<Vec<&str>> = csv.lines().skip(1).map(|l| l.split(',').collect()).collect();
        assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() == 0.0));
        let ratio: f64 = rows[50][8].parse().unwrap();
        assert!((0.999..=1.001).contains(&ratio));
    }

    #[test]
    fn forcing_transforms() {
        let s = Complex64::new(2.0, 1.0);
        let d = ForcingSignal::Heaviside.delayed(0.5).unwrap();
        let v = forcing_transform(&d, s).unwrap();
        assert!((v - (-s * 0.5).exp() / s).norm() < 1e-15);
        assert!(forcing_transform(
            &ForcingSignal::tabulated(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap(),
            s
        )
        .is_none());
    }
}
