//! Acceptance criteria 1 to 8, one PASS/FAIL line each.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use fracrod::modes::{count_zeros_in_disc, residue_amplitudes, ModeSet, TAIL_FIT_START};
use fracrod::oracle::{invert, oracle_p, oracle_sigma_h, BromwichConfig};
use fracrod::{compose_u, ConstitutiveModel, ElasticSeries, ForcingSignal, KernelKind, KernelSpec};
use num_complex::Complex64;
use statrs::function::gamma::gamma;

const XS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const TS: [f64; 6] = [0.1, 0.5, 1.0, 2.0, 5.0, 10.0];

struct Outcome {
    pass: bool,
    detail: String,
}

fn zener() -> ConstitutiveModel {
    ConstitutiveModel::zener(0.5, 0.2, 0.6).unwrap()
}

fn specs(model: ConstitutiveModel, kappa: f64, n_max: usize, tol: f64) -> (KernelSpec, KernelSpec) {
    let modes = Arc::new(ModeSet::build(&model, kappa, n_max).unwrap());
    (
        KernelSpec::new(KernelKind::DisplacementP, modes.clone(), tol).unwrap(),
        KernelSpec::new(KernelKind::StressSigmaH, modes, tol).unwrap(),
    )
}

fn elastic_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for kappa in [0.5, 1.0, 2.0] {
        let series = ElasticSeries::new(kappa, 10_000).unwrap();
        let (p, q) = specs(ConstitutiveModel::Elastic, kappa, 9_999, 1e-6);
        for &x in &XS {
            for &t in &TS {
                let dp = (p.eval_p(x, t).unwrap().value - series.p(x, t).value).abs();
                let dq = (q.eval_sigma_h(x, t).unwrap().value - series.sigma_h(x, t).value).abs();
                worst = worst.max(dp).max(dq);
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-6 && elapsed <= Duration::from_secs(60),
        detail: format!("max abs error {worst:.3e} (limit 1e-6), {:.2} s (limit 60 s)", elapsed.as_secs_f64()),
    }
}

fn oracle_cross_validation() -> Outcome {
    let start = Instant::now();
    let (p, q) = specs(zener(), 1.0, 64, 1e-6);
    let cfg = BromwichConfig::for_modes(&p.modes);
    let mut worst: f64 = 0.0;
    let mut at = (0.0, 0.0, "");
    for &x in &XS {
        for &t in &TS {
            let op = oracle_p(&zener(), 1.0, x, t, &cfg).unwrap().value;
            let oq = oracle_sigma_h(&zener(), 1.0, x, t, &cfg).unwrap().value;
            let rp = (p.eval_p(x, t).unwrap().value - op).abs() / op.abs().max(1.0);
            let rq = (q.eval_sigma_h(x, t).unwrap().value - oq).abs() / oq.abs().max(1.0);
            if rp > worst {
                worst = rp;
                at = (x, t, "P");
            }
            if rq > worst {
                worst = rq;
                at = (x, t, "sigma_H");
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome {
        pass: worst <= 1e-3 && elapsed <= Duration::from_secs(600),
        detail: format!(
            "max relative deviation {worst:.3e} (limit 1e-3) at {} x={} t={}, {:.2} s",
            at.2,
            at.0,
            at.1,
            elapsed.as_secs_f64()
        ),
    }
}

fn mode_law() -> Outcome {
    let set = ModeSet::build(&zener(), 1.0, 64).unwrap();
    let c_inf = zener().limits().unwrap().c_inf;
    let mut w_dev: f64 = 0.0;
    let mut zeta_dev: f64 = 0.0;
    for m in set.modes.iter().filter(|m| (10..=64).contains(&m.index)) {
        let npi = m.index as f64 * PI;
        w_dev = w_dev.max((m.w / npi - 1.0).abs());
        zeta_dev = zeta_dev.max((m.s.im * c_inf / npi - 1.0).abs());
    }
    let max_residual = set.modes.iter().map(|m| m.residual).fold(0.0, f64::max);
    let radius = 10.0 * PI / c_inf + 0.5 * PI / c_inf;
    let count = count_zeros_in_disc(&zener(), 1.0, radius, 4096).unwrap();
    let parts = [
        (w_dev <= 1e-2, format!("w-law {w_dev:.3e}")),
        (zeta_dev <= 1e-2, format!("zeta-law {zeta_dev:.3e}")),
        (max_residual < 1e-9, format!("max |f(s_n)| {max_residual:.3e}")),
        (count.zeros == 20, format!("disc count {} (winding {:.4}) vs 20", count.zeros, count.winding)),
    ];
    Outcome {
        pass: parts.iter().all(|p| p.0),
        detail: parts
            .iter()
            .map(|(ok, d)| format!("{d} [{}]", if *ok { "ok" } else { "fail" }))
            .collect::<Vec<_>>()
            .join("; "),
    }
}

fn governing_equations() -> Outcome {
    let (p, q) = specs(zener(), 1.0, 64, 1e-8);
    let h = 1e-3;
    let u = |x: f64, t: f64| compose_u(&p, &ForcingSignal::Heaviside, x, t).unwrap().value;
    let mut worst_bc: f64 = 0.0;
    for i in 0..=90 {
        let t = 0.5 + 0.05 * i as f64;
        let d2 = (u(1.0, t + h) - 2.0 * u(1.0, t) + u(1.0, t - h)) / (h * h);
        let lhs = -q.eval_sigma_h(1.0, t).unwrap().value + 1.0;
        worst_bc = worst_bc.max((lhs - d2).abs() / d2.abs().max(1.0));
    }
    let early = XS.iter().map(|&x| u(x, 1e-3).abs()).fold(0.0, f64::max);
    let fixed_end_exact = (0..=20).all(|i| u(0.0, 0.5 * i as f64) == 0.0);
    Outcome {
        pass: worst_bc <= 1e-2 && early <= 1e-3 && fixed_end_exact,
        detail: format!(
            "boundary residual {worst_bc:.3e} (limit 1e-2), max |u(x,1e-3)| {early:.3e}, u(0,t) exactly 0: {fixed_end_exact}"
        ),
    }
}

fn static_limits() -> Outcome {
    let (p, q) = specs(zener(), 1.0, 64, 1e-6);
    let mut ds: f64 = 0.0;
    let mut du: f64 = 0.0;
    for x in [0.25, 0.5, 0.75, 1.0] {
        ds = ds.max((q.eval_sigma_h(x, 200.0).unwrap().value - 1.0).abs());
        let u = compose_u(&p, &ForcingSignal::Heaviside, x, 200.0).unwrap().value;
        du = du.max((u - x).abs());
    }
    Outcome {
        pass: ds <= 1e-3 && du <= 1e-3,
        detail: format!("max |sigma_H - 1| {ds:.3e}, max |u - x| {du:.3e} at t=200 (limit 1e-3)"),
    }
}

fn causality_and_realness() -> Outcome {
    let mut ok = true;
    for model in [ConstitutiveModel::Elastic, zener()] {
        let (p, q) = specs(model, 1.0, 64, 1e-6);
        for &x in &XS {
            for t in [-1e-12, -0.5, -3.0] {
                ok &= p.eval_p(x, t).unwrap().value == 0.0;
                ok &= q.eval_sigma_h(x, t).unwrap().value == 0.0;
            }
            for &t in &TS {
                for m in p.modes.modes.iter() {
                    for spec in [&p, &q] {
                        let r = spec.residue(m, x, t);
                        ok &= (r + r.conj()).im == 0.0;
                    }
                }
                ok &= p.eval_p(x, t).unwrap().value.is_finite();
                ok &= q.eval_sigma_h(x, t).unwrap().value.is_finite();
            }
        }
    }
    Outcome {
        pass: ok,
        detail: "exact zeros for t < 0; conjugate-pair imaginary parts cancel exactly".into(),
    }
}

fn residue_tail_law() -> Outcome {
    let (p, q) = specs(zener(), 1.0, 64, 1e-6);
    let set = p.modes.clone();
    let mut worst_ratio: f64 = 0.0;
    for m in set.modes.iter().filter(|m| m.index > TAIL_FIT_START) {
        let n2 = (m.index * m.index) as f64;
        for &x in &[0.3, 0.5, 1.0] {
            for &t in &[0.1, 1.0, 5.0] {
                let bound_p = set.tail.k_displacement * (set.tail.a * t).exp() / n2;
                let bound_q = set.tail.k_stress * (set.tail.a * t).exp() / n2;
                worst_ratio = worst_ratio
                    .max(p.residue(m, x, t).norm() / bound_p)
                    .max(q.residue(m, x, t).norm() / bound_q);
            }
        }
        let (ap, aq) = residue_amplitudes(1.0, m);
        assert!(ap.is_finite() && aq.is_finite());
    }
    let half = Arc::new(set.truncated(32));
    let p32 = KernelSpec::new(KernelKind::DisplacementP, half.clone(), 1e-6).unwrap();
    let q32 = KernelSpec::new(KernelKind::StressSigmaH, half.clone(), 1e-6).unwrap();
    let mut halving_ok = true;
    let mut worst_change: f64 = 0.0;
    for &x in &XS {
        for &t in &TS {
            let dp = (p.eval_p(x, t).unwrap().value - p32.eval_p(x, t).unwrap().value).abs();
            let dq = (q.eval_sigma_h(x, t).unwrap().value - q32.eval_sigma_h(x, t).unwrap().value).abs();
            halving_ok &= dp < half.tail_bound(false, t) && dq < half.tail_bound(true, t);
            worst_change = worst_change.max(dp).max(dq);
        }
    }
    Outcome {
        pass: worst_ratio <= 3.0 && halving_ok,
        detail: format!(
            "max |residue| / fitted bound {worst_ratio:.3} (limit 3), n_max 64 -> 32 max change {worst_change:.3e}, within tail bound: {halving_ok}"
        ),
    }
}

fn oracle_self_test() -> Outcome {
    let cfg = BromwichConfig::default();
    type Pair = (&'static str, fn(Complex64) -> Complex64, fn(f64) -> f64);
    let pairs: [Pair; 5] = [
        ("step", |s| 1.0 / s, |_| 1.0),
        ("ramp", |s| 1.0 / (s * s), |t| t),
        ("sine", |s| 1.0 / (s * s + 1.0), f64::sin),
        ("decay", |s| 1.0 / (s + 1.0), |t| (-t).exp()),
        ("power", |s| s.powf(-0.5), |t| t.powf(-0.5) / gamma(0.5)),
    ];
    let mut worst: (f64, &str) = (0.0, "");
    for (name, f, exact) in pairs {
        for i in 0..=49 {
            let t = 0.1 + 4.9 * i as f64 / 49.0;
            let v = invert(|s| Ok(f(s)), &cfg, t).unwrap().value;
            let d = (v - exact(t)).abs();
            if d > worst.0 {
                worst = (d, name);
            }
        }
    }
    Outcome {
        pass: worst.0 <= 1e-5,
        detail: format!("max abs error {:.3e} ({}) over t in [0.1, 5] (limit 1e-5)", worst.0, worst.1),
    }
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Outcome); 8] = [
        (1, "elastic equivalence", elastic_equivalence),
        (2, "oracle cross-validation", oracle_cross_validation),
        (3, "mode law", mode_law),
        (4, "governing-equation residuals", governing_equations),
        (5, "static limits", static_limits),
        (6, "causality and realness", causality_and_realness),
        (7, "residue tail law", residue_tail_law),
        (8, "oracle self-test", oracle_self_test),
    ];
    let mut failed = 0;
    for (n, name, check) in criteria {
        let out = check();
        if !out.pass {
            failed += 1;
        }
        println!(
            "criterion {n} ({name}): {} : {}",
            if out.pass { "PASS" } else { "FAIL" },
            out.detail
        );
    }
    println!("acceptance: {} of 8 criteria passed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
