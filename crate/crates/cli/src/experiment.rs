//! Grid sweeps producing one row per grid point, policy and fading mode.

use std::cmp::Ordering;
use std::io;

use rayon::prelude::*;

use locrelay_core::analytic::DistParams;
use locrelay_core::metrics::{average_rate_analytic, outage_analytic, ChannelSpec, Fading, OutageQuery};
use locrelay_core::montecarlo::{
    estimate_average_rate, estimate_outage, sample_scores, EstimateWithError, ScoreRecord, TrialRecord,
};
use locrelay_core::spatial::{PppSpec, Region};
use locrelay_core::special::QuadratureSpec;
use locrelay_core::{NetworkLayout, PolicyKind};

use crate::config::{ExperimentKind, Metric, SweepConfig};

pub const CSV_HEADER: [&str; 12] = [
    "experiment",
    "snr_db",
    "lambda",
    "d",
    "alpha",
    "rho",
    "policy",
    "fading",
    "analytic",
    "mc_mean",
    "mc_stderr",
    "n_trials",
];

/// Slack added to two standard errors when comparing analytic and
/// simulated values.
pub const AGREEMENT_SLACK: f64 = 0.005;

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub experiment: ExperimentKind,
    pub snr_db: f64,
    pub lambda: f64,
    pub d: f64,
    pub alpha: f64,
    /// Only set for outage rows.
    pub rho: Option<f64>,
    pub policy: PolicyKind,
    pub fading: Fading,
    /// Closed form; only the optimum policy has one.
    pub analytic: Option<f64>,
    pub mc: EstimateWithError,
}

impl ResultRow {
    fn sort_key_cmp(&self, other: &Self) -> Ordering {
        self.snr_db
            .total_cmp(&other.snr_db)
            .then(self.lambda.total_cmp(&other.lambda))
            .then(self.d.total_cmp(&other.d))
            .then(self.alpha.total_cmp(&other.alpha))
            .then(self.rho.unwrap_or(0.0).total_cmp(&other.rho.unwrap_or(0.0)))
            .then(self.policy.cmp(&other.policy))
            .then(self.fading.cmp(&other.fading))
    }

    /// `|analytic − mc| <= 2·SE + slack`; rows without a closed form pass.
    pub fn agrees(&self) -> bool {
        self.analytic
            .is_none_or(|a| self.mc.agrees_with(a, 2.0, AGREEMENT_SLACK))
    }

    fn record(&self) -> [String; 12] {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        [
            self.experiment.id().to_owned(),
            self.snr_db.to_string(),
            self.lambda.to_string(),
            self.d.to_string(),
            self.alpha.to_string(),
            opt(self.rho),
            self.policy.name().to_owned(),
            self.fading.name().to_owned(),
            opt(self.analytic),
            self.mc.mean.to_string(),
            self.mc.std_error.to_string(),
            self.mc.n.to_string(),
        ]
    }
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("numerical failure at lambda={lambda}, d={d}, snr_db={snr_db}: {source}")]
    Numerics {
        lambda: f64,
        d: f64,
        snr_db: f64,
        source: locrelay_core::Error,
    },
}

/// Scores of trials `0..n` on one field geometry, in trial order.
pub fn sample_all_scores(layout: &NetworkLayout, ppp: &PppSpec, n: u64, master_seed: u64) -> Vec<ScoreRecord> {
    (0..n)
        .into_par_iter()
        .map(|k| sample_scores(layout, ppp, master_seed, k))
        .collect()
}

fn geometry(
    cfg: &SweepConfig,
    lambda: f64,
    d: f64,
) -> Result<(NetworkLayout, PppSpec, DistParams), locrelay_core::Error> {
    Ok((
        NetworkLayout::new(d)?,
        PppSpec::new(lambda, cfg.tau, Region::FullDisc)?,
        DistParams::new(lambda, d)?,
    ))
}

/// Runs the sweep on the current rayon pool. Every grid point reuses the
/// same trial fields for a given `(lambda, d)`, so curves are compared on
/// common random numbers. The output does not depend on the pool size.
pub fn run_experiment(cfg: &SweepConfig) -> Result<Vec<ResultRow>, RunError> {
    cfg.validate()?;
    let metric = match cfg.experiment {
        ExperimentKind::RateVsSnr | ExperimentKind::RateVsLambda | ExperimentKind::DistCheck => Metric::AverageRate,
        ExperimentKind::OutageVsSnr => Metric::Outage,
        ExperimentKind::Custom => cfg.metric,
    };
    let quad = QuadratureSpec::default();
    let mut rows = Vec::new();
    for &lambda in &cfg.lambda {
        for &d in &cfg.d {
            let numerics = |source| RunError::Numerics {
                lambda,
                d,
                snr_db: f64::NAN,
                source,
            };
            let (layout, ppp, dist) = geometry(cfg, lambda, d).map_err(numerics)?;
            let scores = sample_all_scores(&layout, &ppp, cfg.n_trials, cfg.master_seed);
            let points: Vec<(f64, Fading)> = cfg
                .snr_db
                .iter()
                .flat_map(|&s| cfg.fading.iter().map(move |&f| (s, f)))
                .collect();
            let chunks = points
                .par_iter()
                .map(|&(snr_db, fading)| {
                    let fail = |source| RunError::Numerics {
                        lambda,
                        d,
                        snr_db,
                        source,
                    };
                    let channel = ChannelSpec::from_db(cfg.alpha, snr_db, fading).map_err(fail)?;
                    let trials: Vec<TrialRecord> =
                        scores.iter().map(|s| s.with_rates(&channel, &cfg.policies)).collect();
                    cfg.policies
                        .iter()
                        .map(|&policy| {
                            let (mc, analytic) = match metric {
                                Metric::AverageRate => {
                                    let analytic = (policy == PolicyKind::Optimum)
                                        .then(|| average_rate_analytic(&channel, &dist, &quad).map(|r| r.value))
                                        .transpose()
                                        .map_err(fail)?;
                                    (estimate_average_rate(&trials, policy), analytic)
                                }
                                Metric::Outage => {
                                    let analytic = (policy == PolicyKind::Optimum)
                                        .then(|| {
                                            OutageQuery::new(cfg.rho, channel, dist).and_then(|q| outage_analytic(&q))
                                        })
                                        .transpose()
                                        .map_err(fail)?;
                                    (estimate_outage(&trials, policy, cfg.rho), analytic)
                                }
                            };
                            Ok(ResultRow {
                                experiment: cfg.experiment,
                                snr_db,
                                lambda,
                                d,
                                alpha: cfg.alpha,
                                rho: (metric == Metric::Outage).then_some(cfg.rho),
                                policy,
                                fading,
                                analytic,
                                mc,
                            })
                        })
                        .collect::<Result<Vec<_>, RunError>>()
                })
                .collect::<Result<Vec<_>, RunError>>()?;
            rows.extend(chunks.into_iter().flatten());
        }
    }
    rows.sort_by(ResultRow::sort_key_cmp);
    Ok(rows)
}

pub fn write_csv<W: io::Write>(rows: &[ResultRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

/// Rows whose closed form and simulation disagree beyond `2·SE + 0.005`.
pub fn disagreements(rows: &[ResultRow]) -> Vec<&ResultRow> {
    rows.iter().filter(|r| !r.agrees()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveSource {
    Analytic,
    MonteCarlo,
}

/// SNR in dB at which an outage curve first drops to `target`, by linear
/// interpolation of log-outage between adjacent grid points. `None` if the
/// curve never crosses.
pub fn outage_crossing(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    let mut pts = curve.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.first().is_some_and(|&(_, p)| p <= target) {
        return pts.first().map(|&(s, _)| s);
    }
    pts.windows(2).find_map(|w| {
        let ((s1, p1), (s2, p2)) = (w[0], w[1]);
        if !(p1 > target && p2 <= target) {
            return None;
        }
        let frac = if p2 > 0.0 {
            (target.ln() - p1.ln()) / (p2.ln() - p1.ln())
        } else {
            // log of zero; fall back to the linear scale
            (p1 - target) / (p1 - p2)
        };
        Some(s1 + frac * (s2 - s1))
    })
}

/// `(snr_db, outage)` pairs of one curve.
pub fn outage_curve(
    rows: &[ResultRow],
    lambda: f64,
    d: f64,
    policy: PolicyKind,
    fading: Fading,
    source: CurveSource,
) -> Vec<(f64, f64)> {
    rows.iter()
        .filter(|r| r.rho.is_some() && r.lambda == lambda && r.d == d && r.policy == policy && r.fading == fading)
        .filter_map(|r| match source {
            CurveSource::Analytic => r.analytic.map(|a| (r.snr_db, a)),
            CurveSource::MonteCarlo => Some((r.snr_db, r.mc.mean)),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Crossing {
    pub lambda: f64,
    pub d: f64,
    pub policy: PolicyKind,
    pub fading: Fading,
    pub source: CurveSource,
    pub snr_db: Option<f64>,
}

/// Every crossing of `target` in an outage sweep, for each curve present.
pub fn outage_crossings(rows: &[ResultRow], cfg: &SweepConfig, target: f64) -> Vec<Crossing> {
    let mut out = Vec::new();
    for &lambda in &cfg.lambda {
        for &d in &cfg.d {
            for &fading in &cfg.fading {
                for &policy in &cfg.policies {
                    for source in [CurveSource::Analytic, CurveSource::MonteCarlo] {
                        let curve = outage_curve(rows, lambda, d, policy, fading, source);
                        if curve.is_empty() {
                            continue;
                        }
                        out.push(Crossing {
                            lambda,
                            d,
                            policy,
                            fading,
                            source,
                            snr_db: outage_crossing(&curve, target),
                        });
                    }
                }
            }
        }
    }
    out
}
