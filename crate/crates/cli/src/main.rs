use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;
use dissim_core::harness::{self, Experiment, ExperimentConfig, Format, Outcome};
use dissim_core::tolerances::Tolerances;
use dissim_core::{DiamondMethod, Error, Result};

/// Run one dissipative-simulation experiment from a JSON config.
///
/// Exit codes: 0 success, 1 input or I/O error, 2 numerical degradation or
/// failed pass criterion, 3 invariant violation.
#[derive(Debug, Parser)]
#[command(name = "dissim", version)]
struct Args {
    /// sweep, freeze, convert, gauge, certificate, rigidity or diamond.
    experiment: String,
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's output_dir, then ".".
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv, json or svg (sweep records); other experiments write json.
    #[arg(long)]
    format: Option<String>,
    /// sdp or sandwich.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dissim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(args: &Args) -> Result<()> {
    let experiment: Experiment = args.experiment.parse()?;
    let tol = Tolerances::from_env()?;
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(m) = &args.method {
        cfg.method = m.parse::<DiamondMethod>()?;
    }
    let format = match &args.format {
        Some(f) => Some(f.parse::<Format>()?),
        None => cfg.format,
    };
    if experiment != Experiment::Sweep && matches!(format, Some(Format::Csv | Format::Svg)) {
        return Err(Error::Input(format!("`{experiment}` writes json only")));
    }
    let dir = args
        .out
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));

    let outcome = harness::with_pool(args.threads, || harness::run(&cfg, experiment, &tol))??;

    std::fs::create_dir_all(&dir).map_err(|source| Error::Io {
        path: dir.clone(),
        source,
    })?;
    write_outputs(&outcome, experiment, format.unwrap_or(Format::Csv), &dir)?;
    println!("{}", summary(&outcome));
    outcome.check(&tol)
}

fn write_outputs(outcome: &Outcome, experiment: Experiment, format: Format, dir: &Path) -> Result<()> {
    if let Outcome::Sweep(res) = outcome {
        if !res.records.is_empty() {
            harness::emit(
                &res.records,
                format,
                &dir.join(format!("sweep.{}", format.extension())),
            )?;
        }
        return harness::write_json(outcome, &dir.join("sweep_summary.json"));
    }
    harness::write_json(outcome, &dir.join(format!("{experiment}.json")))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".into(), |x| format!("{x:.4}"))
}

fn summary(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Sweep(r) => format!(
            "sweep: {} records, {} failures, slope_t {}, slope_inv_eps {}",
            r.records.len(),
            r.failures.len(),
            opt(r.fit.slope_t),
            opt(r.fit.slope_inv_eps)
        ),
        Outcome::Freeze(r) => format!(
            "freeze: max distance {:.4e} (bound {:.4e}), unfrozen control {:.4}",
            r.max_distance, r.bound, r.control_max_distance
        ),
        Outcome::Convert(r) => format!(
            "convert: delta {:.4e}, max error {:.4e} vs epsilon {}",
            r.delta, r.uniform.max_error, r.epsilon
        ),
        Outcome::Gauge(r) => format!(
            "gauge: cost {:.6} -> {:.6} (c = -1), optimized {:.6}",
            r.cost_before, r.worked_cost, r.optimized_cost
        ),
        Outcome::Certificate(r) => format!(
            "certificate: verified {}, T {} vs lower bound {:.4}, applicable {}, checks {}",
            r.verified,
            r.certificate.t_achieved,
            r.certificate.t_lower,
            r.certificate.applicable,
            r.certificate.checks.all()
        ),
        Outcome::Rigidity(r) => format!(
            "rigidity: {}, control rejected {}",
            r.fits
                .iter()
                .map(|f| format!("{} {:?}", f.family, f.status))
                .collect::<Vec<_>>()
                .join(", "),
            r.control_rejected
        ),
        Outcome::Diamond(r) => format!(
            "diamond: {}",
            r.oracles
                .iter()
                .map(|o| format!("{} {:.8} (expected {:.8})", o.name, o.value, o.expected))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    }
}
