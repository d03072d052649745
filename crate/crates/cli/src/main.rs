use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use locrelay::config::{ExperimentKind, SweepConfig};
use locrelay::experiment::{disagreements, outage_crossings, CurveSource};
use locrelay::{dist_check, run_experiment, worker_pool, workers_from_env, write_csv};

/// Location-based relay selection experiments.
///
/// Worker threads are set with the LOCRELAY_WORKERS environment variable.
#[derive(Parser)]
#[command(name = "locrelay", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Average rate against SNR.
    RateVsSnr(Common),
    /// Average rate against relay density.
    RateVsLambda(Common),
    /// Outage probability against SNR, with the 0.01 crossing readout.
    OutageVsSnr(Common),
    /// Distribution gates and the half-disc derivation table; exits nonzero on a failed gate.
    DistCheck(Common),
    /// Arbitrary grid; set everything through flags or --config.
    Custom(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Relay density; comma list or start:stop:step.
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    /// Half the source-destination distance; comma list or range.
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Comma list or start:stop:step.
    #[arg(long = "snr-db", allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Outage target rate in bits/sec/Hz.
    #[arg(long)]
    rho: Option<String>,
    /// none, rayleigh or both.
    #[arg(long)]
    fading: Option<String>,
    /// Comma list of optimum, midpoint, nearest-source, nearest-dest.
    #[arg(long)]
    policies: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Radius of the simulation window.
    #[arg(long)]
    tau: Option<String>,
    /// rate or outage (custom only).
    #[arg(long)]
    metric: Option<String>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Fail when a closed form and its simulation disagree.
    #[arg(long)]
    strict: bool,
}

impl Common {
    fn into_config(self, kind: ExperimentKind) -> anyhow::Result<SweepConfig> {
        let mut cfg = SweepConfig::preset(kind);
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
            // the verb decides the experiment
            cfg.experiment = kind;
        }
        let flags = [
            ("lambda", self.lambda),
            ("d", self.d),
            ("alpha", self.alpha),
            ("snr_db", self.snr_db),
            ("rho", self.rho),
            ("fading", self.fading),
            ("policies", self.policies),
            ("trials", self.trials),
            ("seed", self.seed),
            ("tau", self.tau),
            ("metric", self.metric),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        if let Some(out) = self.out {
            cfg.output_path = Some(out);
        }
        cfg.strict |= self.strict;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn open_output(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn report_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".report.txt");
    PathBuf::from(name)
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let (kind, common) = match cli.command {
        Command::RateVsSnr(c) => (ExperimentKind::RateVsSnr, c),
        Command::RateVsLambda(c) => (ExperimentKind::RateVsLambda, c),
        Command::OutageVsSnr(c) => (ExperimentKind::OutageVsSnr, c),
        Command::DistCheck(c) => (ExperimentKind::DistCheck, c),
        Command::Custom(c) => (ExperimentKind::Custom, c),
    };
    let cfg = common.into_config(kind)?;
    let pool = worker_pool(workers_from_env().map_err(anyhow::Error::msg)?)?;
    let mut ok = true;

    if kind == ExperimentKind::DistCheck {
        let report = pool.install(|| dist_check(&cfg))?;
        eprint!("{report}");
        if let Some(out) = &cfg.output_path {
            let path = report_path(out);
            std::fs::write(&path, report.to_string()).with_context(|| format!("writing {}", path.display()))?;
        }
        ok &= report.passed();
    }

    let rows = pool.install(|| run_experiment(&cfg))?;
    let mut out = open_output(cfg.output_path.as_deref())?;
    write_csv(&rows, &mut out).context("writing csv")?;
    out.flush()?;

    if cfg.experiment == ExperimentKind::OutageVsSnr
        || (kind == ExperimentKind::Custom && rows.iter().any(|r| r.rho.is_some()))
    {
        for c in outage_crossings(&rows, &cfg, 0.01) {
            let source = match c.source {
                CurveSource::Analytic => "analytic",
                CurveSource::MonteCarlo => "mc",
            };
            let at = c
                .snr_db
                .map_or_else(|| "not reached".to_owned(), |s| format!("{s:.2} dB"));
            eprintln!(
                "outage 0.01: lambda={} d={} {} {} ({source}): {at}",
                c.lambda, c.d, c.policy, c.fading
            );
        }
    }

    let bad = disagreements(&rows);
    for r in &bad {
        eprintln!(
            "disagreement: snr_db={} lambda={} d={} {} {}: analytic {} vs mc {} ± {}",
            r.snr_db,
            r.lambda,
            r.d,
            r.policy,
            r.fading,
            r.analytic.unwrap_or(f64::NAN),
            r.mc.mean,
            r.mc.std_error
        );
    }
    if cfg.strict && !bad.is_empty() {
        ok = false;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
