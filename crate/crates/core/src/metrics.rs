//! Rates and outage for decode-and-forward relaying with power-law path
//! loss `G(x) = x^{−α}`.
//!
//! Given the relay locations, averaging each hop over fading before taking
//! the minimum leaves a rate that depends on the selected relay only through
//! its max-hop distance (the selection score). For unit-power fading `H`:
//!
//! * no fading: `½·log₂(1 + SNR/s^α)`
//! * Rayleigh: `(1/(2 ln 2))·e^{z}E₁(z)` with `z = s^α/SNR`
//!
//! The analytic average rate and outage integrate these against the law of
//! `Y = SNR/Γ_opt^α` from [`crate::analytic`].

use core::f64::consts::LN_2;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::analytic::{gamma_opt_cdf, y_cdf, y_pdf, DistParams, PathLossParams};
use crate::error::{Error, Result};
use crate::geometry::{select, NetworkLayout, PolicyKind, RelayField};
use crate::special::{bisect, integrate, scaled_exp_integral_e1, QuadratureSpec, RootSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Fading {
    /// `|H| = 1`.
    NoFading,
    /// `H ~ CN(0, 1)`, so `|H|²` is unit-mean exponential.
    Rayleigh,
}

impl Fading {
    pub const ALL: [Fading; 2] = [Fading::NoFading, Fading::Rayleigh];

    pub fn name(self) -> &'static str {
        match self {
            Fading::NoFading => "none",
            Fading::Rayleigh => "rayleigh",
        }
    }
}

impl fmt::Display for Fading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Fading {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" | "no-fading" | "nofading" => Ok(Fading::NoFading),
            "rayleigh" => Ok(Fading::Rayleigh),
            _ => Err(Error::param("fading", f64::NAN)),
        }
    }
}

/// `10^(dB/10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    alpha: f64,
    snr: f64,
    fading: Fading,
}

impl ChannelSpec {
    pub fn new(alpha: f64, snr: f64, fading: Fading) -> Result<Self> {
        if !(alpha >= 2.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", alpha));
        }
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(Error::param("snr", snr));
        }
        Ok(ChannelSpec { alpha, snr, fading })
    }

    pub fn from_db(alpha: f64, snr_db: f64, fading: Fading) -> Result<Self> {
        Self::new(alpha, db_to_linear(snr_db), fading)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn fading(&self) -> Fading {
        self.fading
    }

    pub fn path_loss(&self, dist: DistParams) -> PathLossParams {
        PathLossParams::new(dist, self.alpha, self.snr).expect("channel parameters already validated")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateRoute {
    Analytic,
    MonteCarlo,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// bits/sec/Hz
    pub value: f64,
    pub route: RateRoute,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageQuery {
    pub rho: f64,
    pub channel: ChannelSpec,
    pub dist: DistParams,
}

impl OutageQuery {
    pub fn new(rho: f64, channel: ChannelSpec, dist: DistParams) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::param("rho", rho));
        }
        Ok(OutageQuery { rho, channel, dist })
    }
}

/// Fading-averaged rate for a link whose mean received SNR is `y`
/// (both hops see the same mean SNR at the max-hop distance).
pub fn rate_given_received_snr(fading: Fading, y: f64) -> f64 {
    match fading {
        Fading::NoFading => 0.5 * y.ln_1p() / LN_2,
        Fading::Rayleigh => {
            if y <= 0.0 {
                return 0.0;
            }
            let z = 1.0 / y;
            if z == 0.0 {
                return f64::INFINITY;
            }
            scaled_exp_integral_e1(z).expect("z > 0") / (2.0 * LN_2)
        }
    }
}

/// Conditional (fading-averaged) rate of a relay with selection score
/// `score`. An infinite score (no relay) gives zero.
pub fn conditional_rate(channel: &ChannelSpec, score: f64) -> f64 {
    let y = channel.snr / score.powf(channel.alpha);
    rate_given_received_snr(channel.fading, y)
}

/// `|H_sr|²`, `|H_rd|²` for one channel use.
pub fn draw_fades<R: Rng + ?Sized>(channel: &ChannelSpec, rng: &mut R) -> (f64, f64) {
    match channel.fading {
        Fading::NoFading => (1.0, 1.0),
        Fading::Rayleigh => (Exp1.sample(rng), Exp1.sample(rng)),
    }
}

/// Rate of one channel use through the relay chosen by `policy`, with the
/// direct link ignored: `½·min(log₂(1 + SNR·|H_sr|²·G(s→r)), log₂(1 + SNR·|H_rd|²·G(r→d)))`.
pub fn instantaneous_rate(
    channel: &ChannelSpec,
    layout: &NetworkLayout,
    field: &RelayField,
    policy: PolicyKind,
    fades: (f64, f64),
) -> Result<f64> {
    let (h_sr, h_rd) = fades;
    if !(h_sr >= 0.0) {
        return Err(Error::param("|H_sr|^2", h_sr));
    }
    if !(h_rd >= 0.0) {
        return Err(Error::param("|H_rd|^2", h_rd));
    }
    let relay = select(layout, field, policy)?.chosen;
    let hop = |gain: f64, dist: f64| (channel.snr * gain * dist.powf(-channel.alpha)).ln_1p() / LN_2;
    let first = hop(h_sr, relay.distance(layout.source()));
    let second = hop(h_rd, relay.distance(layout.dest()));
    Ok(0.5 * first.min(second))
}

/// Distance quantile of `Γ_opt`, used to split the rate integral where the
/// density actually lives.
fn gamma_opt_quantile(dist: &DistParams, q: f64) -> Result<f64> {
    let d = dist.half_distance();
    let mut hi = 2.0 * d;
    while gamma_opt_cdf(dist, hi) < q {
        hi = d + 2.0 * (hi - d);
    }
    bisect(|g| gamma_opt_cdf(dist, g) - q, &RootSpec::new(d, hi, 1e-12 * hi)?)
}

/// Average rate of the optimum policy:
/// `∫₀^{SNR/d^α} rate(y)·f_Y(y) dy` by adaptive quadrature.
pub fn average_rate_analytic(channel: &ChannelSpec, dist: &DistParams, quad: &QuadratureSpec) -> Result<RateResult> {
    let p = channel.path_loss(*dist);
    let y_max = p.y_max();
    // Γ_opt quantiles, mapped to Y, ascending.
    let mut knots = [0.0; 5];
    for (k, q) in [1.0 - 1e-9, 0.99, 0.9, 0.5].into_iter().enumerate() {
        knots[k + 1] = y_max.min(p.snr() / gamma_opt_quantile(dist, q)?.powf(p.alpha()));
    }
    let integrand = |y: f64| {
        let density = y_pdf(&p, y).unwrap_or(0.0);
        if density == 0.0 {
            0.0
        } else {
            rate_given_received_snr(channel.fading, y) * density
        }
    };
    let mut value = 0.0;
    let mut lo = 0.0;
    for &hi in knots[1..].iter().chain(core::iter::once(&y_max)) {
        if hi > lo {
            value += integrate(integrand, lo, hi, quad)?;
            lo = hi;
        }
    }
    Ok(RateResult {
        value,
        route: RateRoute::Analytic,
    })
}

/// Unique `y*` with `e^{1/y}E₁(1/y) = 2ρ ln 2`, the Rayleigh outage
/// threshold on the received SNR. Lies strictly between `2^{2ρ} − 1` and
/// `(2^{4ρ} − 1)/2`.
pub fn rayleigh_outage_threshold(rho: f64) -> Result<f64> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::param("rho", rho));
    }
    let (lo, hi) = rayleigh_threshold_bounds(rho);
    let target = 2.0 * rho * LN_2;
    let g = |y: f64| scaled_exp_integral_e1(1.0 / y).expect("y > 0") - target;
    bisect(g, &RootSpec::new(0.99 * lo, 1.01 * hi, 1e-13 * hi)?)
}

fn rayleigh_threshold_bounds(rho: f64) -> (f64, f64) {
    let lo = (2.0 * rho * LN_2).exp_m1();
    let hi = (4.0 * rho * LN_2).exp_m1() / 2.0;
    (lo, hi)
}

/// `(F_Y(2^{2ρ} − 1), F_Y((2^{4ρ} − 1)/2))`, which bracket the Rayleigh
/// outage probability.
pub fn rayleigh_outage_bounds(q: &OutageQuery) -> Result<(f64, f64)> {
    let p = q.channel.path_loss(q.dist);
    let (lo, hi) = rayleigh_threshold_bounds(q.rho);
    Ok((y_cdf(&p, lo)?, y_cdf(&p, hi)?))
}

/// Outage probability `P(R ≤ ρ)` of the optimum policy.
pub fn outage_analytic(q: &OutageQuery) -> Result<f64> {
    let p = q.channel.path_loss(q.dist);
    let threshold = match q.channel.fading {
        Fading::NoFading => {
            let rate_cap = 0.5 * p.y_max().ln_1p() / LN_2;
            if q.rho > rate_cap {
                return Ok(1.0);
            }
            (2.0 * q.rho * LN_2).exp_m1()
        }
        Fading::Rayleigh => {
            let y_star = rayleigh_outage_threshold(q.rho)?;
            if y_star > p.y_max() {
                return Ok(1.0);
            }
            y_star
        }
    };
    y_cdf(&p, threshold)
}
