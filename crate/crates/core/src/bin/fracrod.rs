use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fracrod::cli::{dump_modes, exit_code, run, ConfigBuilder};
use fracrod::Error;

/// Transient response of a fractional viscoelastic rod with a tip body.
#[derive(Debug, Parser)]
#[command(name = "fracrod", version)]
struct Args {
    /// Flat `key = value` configuration file.
    config: Option<PathBuf>,
    /// Constitutive model, e.g. "zener alpha=0.5 a=0.2 b=0.6".
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    /// Forcing signal, e.g. "heaviside" or "tabulated file=force.csv".
    #[arg(long)]
    forcing: Option<String>,
    #[arg(long)]
    tmax: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    nt: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    oracle_check: bool,
    #[arg(long)]
    n_max: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    /// Exit with status 3 when an accuracy gate fails.
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    allow_unsafe_model: bool,
    /// Only write the mode table (modes.csv) and exit.
    #[arg(long)]
    dump_modes: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e @ Error::Config { .. }) => {
            eprintln!("fracrod: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("fracrod: {e}");
            ExitCode::FAILURE
        }
    }
}

fn execute(args: &Args) -> Result<u8, Error> {
    let mut builder = ConfigBuilder::new();
    if let Some(path) = &args.config {
        builder = builder.file(path)?;
    }
    let overrides = [
        ("model", &args.model),
        ("kappa", &args.kappa),
        ("forcing", &args.forcing),
        ("tmax", &args.tmax),
        ("nx", &args.nx),
        ("nt", &args.nt),
        ("out", &args.out),
        ("n_max", &args.n_max),
        ("tol", &args.tol),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            builder = builder.set(key, v, &format!("--{}", key.replace('_', "-")))?;
        }
    }
    for (key, on) in [
        ("oracle_check", args.oracle_check),
        ("strict", args.strict),
        ("allow_unsafe_model", args.allow_unsafe_model),
    ] {
        if on {
            builder = builder.set(key, "true", &format!("--{}", key.replace('_', "-")))?;
        }
    }
    let cfg = builder.build()?;

    if args.dump_modes {
        std::fs::create_dir_all(&cfg.out_dir)?;
        std::fs::write(cfg.out_dir.join("modes.csv"), dump_modes(&cfg)?)?;
        return Ok(0);
    }
    let out = run(&cfg)?;
    out.write(&cfg.out_dir)?;
    let code = exit_code(&cfg, &out);
    if code != 0 {
        eprintln!("fracrod: accuracy gate failed; see diagnostics.txt");
    }
    Ok(code as u8)
}
