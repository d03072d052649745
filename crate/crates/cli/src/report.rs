//! Verification harness: checks every closed-form distance law against
//! simulation and against its neighbours in the derivation chain.

use std::fmt;

use rayon::prelude::*;

use locrelay_core::analytic::{
    gamma_opt_cdf, gamma_opt_cdf_via_halves, gamma_opt_pdf, right_half_limit_cdf, truncated_gamma_cdf,
    truncated_gamma_cdf_branches, truncated_gamma_opt_right_cdf, y_cdf, y_pdf, DistParams, PathLossParams,
};
use locrelay_core::geometry::selection_score;
use locrelay_core::metrics::db_to_linear;
use locrelay_core::spatial::{sample_ppp, sample_uniform_halfdisc_distance_to_source, PppSpec, Region, SeedSpec};
use locrelay_core::special::{integrate, QuadratureSpec};
use locrelay_core::stats::{ks_distance, Ecdf};
use locrelay_core::{NetworkLayout, PolicyKind};

use crate::config::SweepConfig;
use crate::experiment::sample_all_scores;

pub const KS_GATE: f64 = 0.01;
pub const FINITE_DIFFERENCE_GATE: f64 = 1e-6;
pub const PDF_MASS_GATE: f64 = 1e-7;
pub const KNOT_GATE: f64 = 1e-9;
pub const LIMIT_GATE: f64 = 1e-3;
pub const HALVES_GATE: f64 = 1e-12;

/// Window of the half-disc sampler check.
pub const HALFDISC_TAU: f64 = 2.0;
/// Window of the half-field minimum check.
pub const RIGHT_HALF_TAU: f64 = 5.0;
/// Window at which the Poisson-mixed truncated law must sit near its limit.
pub const LIMIT_TAU: f64 = 20.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
}

impl Gate {
    pub fn passed(&self) -> bool {
        self.value <= self.threshold
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRow {
    pub gamma: f64,
    pub truncated: f64,
    pub truncated_ecdf: f64,
    pub right_mixed: f64,
    pub right_limit: f64,
    pub via_halves: f64,
    pub closed_form: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistCheckReport {
    pub lambda: f64,
    pub d: f64,
    pub alpha: f64,
    pub snr_db: f64,
    pub n_trials: u64,
    pub gates: Vec<Gate>,
    pub pipeline: Vec<PipelineRow>,
}

impl DistCheckReport {
    pub fn passed(&self) -> bool {
        self.gates.iter().all(Gate::passed)
    }

    pub fn gate(&self, name: &str) -> Option<&Gate> {
        self.gates.iter().find(|g| g.name == name)
    }
}

impl fmt::Display for DistCheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "distribution check: lambda={} d={} alpha={} snr_db={} trials={}",
            self.lambda, self.d, self.alpha, self.snr_db, self.n_trials
        )?;
        writeln!(f)?;
        for g in &self.gates {
            let verdict = if g.passed() { "PASS" } else { "FAIL" };
            writeln!(
                f,
                "{verdict}  {:<28} {:>12.3e}  <= {:.0e}",
                g.name, g.value, g.threshold
            )?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "{:>8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
            "gamma", "trunc", "trunc_ecdf", "right_tau20", "right_limit", "halves", "closed"
        )?;
        for r in &self.pipeline {
            writeln!(
                f,
                "{:>8.3} {:>12.8} {:>12.8} {:>12.8} {:>12.8} {:>12.8} {:>12.8}",
                r.gamma, r.truncated, r.truncated_ecdf, r.right_mixed, r.right_limit, r.via_halves, r.closed_form
            )?;
        }
        writeln!(f)?;
        writeln!(
            f,
            "{}",
            if self.passed() {
                "all gates passed"
            } else {
                "some gates FAILED"
            }
        )
    }
}

fn max_over<F: Fn(f64) -> f64>(grid: impl Iterator<Item = f64>, f: F) -> f64 {
    grid.map(f).fold(0.0, f64::max)
}

/// Runs the distribution gates on the first `(lambda, d, snr_db)` of `cfg`.
pub fn dist_check(cfg: &SweepConfig) -> Result<DistCheckReport, crate::experiment::RunError> {
    cfg.validate()?;
    let (lambda, d, snr_db) = (cfg.lambda[0], cfg.d[0], cfg.snr_db[0]);
    let core = |e: locrelay_core::Error| crate::experiment::RunError::Numerics {
        lambda,
        d,
        snr_db,
        source: e,
    };
    let layout = NetworkLayout::new(d).map_err(core)?;
    let dist = DistParams::new(lambda, d).map_err(core)?;
    let path = PathLossParams::new(dist, cfg.alpha, db_to_linear(snr_db)).map_err(core)?;
    let n = cfg.n_trials;
    let seed = cfg.master_seed;
    let mut gates = Vec::new();

    let full = PppSpec::new(lambda, cfg.tau, Region::FullDisc).map_err(core)?;
    let best: Vec<f64> = sample_all_scores(&layout, &full, n, seed)
        .iter()
        .map(|r| r.score(PolicyKind::Optimum))
        .collect();
    gates.push(Gate {
        name: "ks_optimum_distance",
        value: ks_distance(&mut best.clone(), |g| gamma_opt_cdf(&dist, g)),
        threshold: KS_GATE,
    });
    let mut ys: Vec<f64> = best.iter().map(|g| path.snr() / g.powf(cfg.alpha)).collect();
    gates.push(Gate {
        name: "ks_received_snr",
        value: ks_distance(&mut ys, |y| y_cdf(&path, y).unwrap_or(f64::NAN)),
        threshold: KS_GATE,
    });

    let halfdisc = Ecdf::new(
        (0..n)
            .into_par_iter()
            .map(|k| sample_uniform_halfdisc_distance_to_source(&layout, HALFDISC_TAU, SeedSpec::new(seed, k)))
            .collect::<Result<Vec<f64>, _>>()
            .map_err(core)?,
    );
    gates.push(Gate {
        name: "ks_halfdisc_sampler",
        value: halfdisc.ks_distance(|g| truncated_gamma_cdf(d, HALFDISC_TAU, g).unwrap_or(f64::NAN)),
        threshold: KS_GATE,
    });

    let right = PppSpec::new(lambda, RIGHT_HALF_TAU, Region::RightHalfDisc).map_err(core)?;
    let mut right_min: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|k| {
            sample_ppp(&right, SeedSpec::new(seed, k))
                .points()
                .iter()
                .map(|&x| selection_score(&layout, x))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    gates.push(Gate {
        name: "ks_right_half_minimum",
        value: ks_distance(&mut right_min, |g| {
            if g.is_finite() {
                truncated_gamma_opt_right_cdf(&dist, RIGHT_HALF_TAU, g).unwrap_or(f64::NAN)
            } else {
                1.0
            }
        }),
        threshold: KS_GATE,
    });

    // Grid over the bulk of the optimum-distance law.
    let hi = (1..)
        .map(|k| d * (1.0 + 0.25 * k as f64))
        .find(|&g| gamma_opt_cdf(&dist, g) > 1.0 - 1e-9)
        .unwrap();
    let gamma_grid = |m: usize| (1..m).map(move |i| d + (hi - d) * i as f64 / m as f64);
    let h = 1e-5;
    gates.push(Gate {
        name: "fd_optimum_distance_pdf",
        value: max_over(gamma_grid(200), |g| {
            let fd = (gamma_opt_cdf(&dist, g + h * g) - gamma_opt_cdf(&dist, g - h * g)) / (2.0 * h * g);
            (fd - gamma_opt_pdf(&dist, g)).abs()
        }),
        threshold: FINITE_DIFFERENCE_GATE,
    });
    gates.push(Gate {
        name: "fd_received_snr_pdf",
        value: max_over(gamma_grid(200), |g| {
            let y = path.snr() / g.powf(cfg.alpha);
            let fd = (y_cdf(&path, y * (1.0 + h)).unwrap() - y_cdf(&path, y * (1.0 - h)).unwrap()) / (2.0 * h * y);
            (fd - y_pdf(&path, y).unwrap()).abs()
        }),
        threshold: FINITE_DIFFERENCE_GATE,
    });
    let quad = QuadratureSpec::tight();
    let mass_gamma = integrate(|g| gamma_opt_pdf(&dist, g), d, f64::INFINITY, &quad).map_err(core)?;
    gates.push(Gate {
        name: "mass_optimum_distance_pdf",
        value: (mass_gamma - 1.0).abs(),
        threshold: PDF_MASS_GATE,
    });
    let mass_y = integrate(|y| y_pdf(&path, y).unwrap_or(0.0), 0.0, path.y_max(), &quad).map_err(core)?;
    gates.push(Gate {
        name: "mass_received_snr_pdf",
        value: (mass_y - 1.0).abs(),
        threshold: PDF_MASS_GATE,
    });

    let mut knot = 0.0f64;
    for tau in [HALFDISC_TAU, RIGHT_HALF_TAU, cfg.tau] {
        let mid = tau.hypot(d);
        let (inner_lo, _) = truncated_gamma_cdf_branches(d, tau, d);
        let (inner, outer) = truncated_gamma_cdf_branches(d, tau, mid);
        let (_, outer_hi) = truncated_gamma_cdf_branches(d, tau, tau + d);
        knot = knot
            .max(inner_lo.abs())
            .max((inner - outer).abs())
            .max((outer_hi - 1.0).abs());
    }
    gates.push(Gate {
        name: "truncated_knot_continuity",
        value: knot,
        threshold: KNOT_GATE,
    });

    let mut pipeline = Vec::new();
    let (mut limit_gap, mut halves_gap) = (0.0f64, 0.0f64);
    for g in gamma_grid(12) {
        let right_mixed = truncated_gamma_opt_right_cdf(&dist, LIMIT_TAU, g).map_err(core)?;
        let right_limit = right_half_limit_cdf(&dist, g);
        let via_halves = gamma_opt_cdf_via_halves(&dist, g);
        let closed_form = gamma_opt_cdf(&dist, g);
        limit_gap = limit_gap.max((right_mixed - right_limit).abs());
        halves_gap = halves_gap.max((via_halves - closed_form).abs());
        pipeline.push(PipelineRow {
            gamma: g,
            truncated: truncated_gamma_cdf(d, HALFDISC_TAU, g).map_err(core)?,
            truncated_ecdf: halfdisc.eval(g),
            right_mixed,
            right_limit,
            via_halves,
            closed_form,
        });
    }
    gates.push(Gate {
        name: "right_half_tau20_limit",
        value: limit_gap,
        threshold: LIMIT_GATE,
    });
    gates.push(Gate {
        name: "halves_identity",
        value: halves_gap,
        threshold: HALVES_GATE,
    });

    Ok(DistCheckReport {
        lambda,
        d,
        alpha: cfg.alpha,
        snr_db,
        n_trials: n,
        gates,
        pipeline,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;

    #[test]
    fn report_lists_every_gate() {
        let mut cfg = SweepConfig::preset(ExperimentKind::DistCheck);
        cfg.n_trials = 2000;
        let report = dist_check(&cfg).unwrap();
        assert_eq!(report.gates.len(), 11);
        for name in [
            "halves_identity",
            "truncated_knot_continuity",
            "right_half_tau20_limit",
            "fd_optimum_distance_pdf",
        ] {
            assert!(report.gate(name).unwrap().passed(), "{name}");
        }
        let text = report.to_string();
        assert!(text.contains("PASS  halves_identity"));
        assert_eq!(report.pipeline.len(), 11);
    }

    #[test]
    fn zero_density_is_a_config_error() {
        let mut cfg = SweepConfig::preset(ExperimentKind::DistCheck);
        cfg.lambda = vec![0.0];
        assert!(matches!(dist_check(&cfg), Err(crate::experiment::RunError::Config(_))));
    }

    #[test]
    fn small_samples_fail_ks_gates() {
        let mut cfg = SweepConfig::preset(ExperimentKind::DistCheck);
        cfg.n_trials = 50;
        let report = dist_check(&cfg).unwrap();
        assert!(!report.passed());
        assert!(report.to_string().contains("some gates FAILED"));
    }
}
