//! Closed-form laws of the optimum max-hop distance `Γ_opt` over a Poisson
//! relay field, of the path-loss transform `Y = SNR / Γ_opt^α`, and the
//! truncated half-disc intermediates they are assembled from.
//!
//! With `h(γ) = λ (d·sqrt(γ² − d²) − γ²·arcsec(γ/d))` (which is `<= 0`),
//! the destination-side half-plane gives `P(Γ_right > γ) = e^{h(γ)}`; the two
//! half-planes are independent and identically distributed, so
//! `P(Γ_opt > γ) = e^{2h(γ)}`.

use core::f64::consts::PI;

#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::special::clamp_sqrt;

/// Below this exponent `exp` underflows; the CDF is then exactly 1.
const EXP_UNDERFLOW: f64 = -745.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistParams {
    intensity: f64,
    half_distance: f64,
}

impl DistParams {
    pub fn new(intensity: f64, half_distance: f64) -> Result<Self> {
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(Error::param("lambda", intensity));
        }
        if !(half_distance > 0.0 && half_distance.is_finite()) {
            return Err(Error::param("d", half_distance));
        }
        Ok(DistParams {
            intensity,
            half_distance,
        })
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn half_distance(&self) -> f64 {
        self.half_distance
    }

    /// `h(γ)` for `γ >= d`.
    fn half_plane_exponent(&self, gamma: f64) -> f64 {
        let d = self.half_distance;
        let root = clamp_sqrt(gamma * gamma - d * d);
        let angle = (d / gamma).min(1.0).acos();
        self.intensity * (d * root - gamma * gamma * angle)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    pub dist: DistParams,
    alpha: f64,
    snr: f64,
}

impl PathLossParams {
    pub fn new(dist: DistParams, alpha: f64, snr: f64) -> Result<Self> {
        if !(alpha >= 2.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", alpha));
        }
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(Error::param("snr", snr));
        }
        Ok(PathLossParams { dist, alpha, snr })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    /// Largest value `Y` can take, `SNR / d^α`.
    pub fn y_max(&self) -> f64 {
        self.snr / self.dist.half_distance.powf(self.alpha)
    }

    /// Max-hop distance that maps to `y`: `(SNR / y)^{1/α}`.
    pub fn distance_for(&self, y: f64) -> f64 {
        (self.snr / y).powf(1.0 / self.alpha)
    }
}

/// `P(Γ_opt <= γ) = 1 − exp(2λ(d·sqrt(γ² − d²) − γ²·arcsec(γ/d)))` for
/// `γ >= d`, zero below.
pub fn gamma_opt_cdf(p: &DistParams, gamma: f64) -> f64 {
    if !(gamma >= p.half_distance) {
        return 0.0;
    }
    let e = 2.0 * p.half_plane_exponent(gamma);
    if e < EXP_UNDERFLOW {
        1.0
    } else {
        -e.exp_m1()
    }
}

/// Density of `Γ_opt`: `4λγ·arcsec(γ/d)·exp(2h(γ))` for `γ >= d`.
pub fn gamma_opt_pdf(p: &DistParams, gamma: f64) -> f64 {
    if !(gamma >= p.half_distance) || gamma == f64::INFINITY {
        return 0.0;
    }
    let angle = (p.half_distance / gamma).min(1.0).acos();
    4.0 * p.intensity * gamma * angle * (2.0 * p.half_plane_exponent(gamma)).exp()
}

/// `P(Y <= y)` for `Y = SNR/Γ_opt^α`; equals `1 − F_Γopt((SNR/y)^{1/α})`
/// and saturates at 1 above `SNR/d^α`.
pub fn y_cdf(p: &PathLossParams, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::domain("F_Y", y));
    }
    if y >= p.y_max() {
        return Ok(1.0);
    }
    let gamma = p.distance_for(y);
    Ok((2.0 * p.dist.half_plane_exponent(gamma)).exp())
}

/// Density of `Y`; zero above `SNR/d^α`.
pub fn y_pdf(p: &PathLossParams, y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::domain("f_Y", y));
    }
    if y > p.y_max() {
        return Ok(0.0);
    }
    let gamma = p.distance_for(y);
    let exponent = 2.0 * p.dist.half_plane_exponent(gamma);
    if exponent < EXP_UNDERFLOW {
        return Ok(0.0);
    }
    let angle = (p.dist.half_distance / gamma).min(1.0).acos();
    Ok(4.0 * p.dist.intensity / (p.alpha * y) * gamma * gamma * angle * exponent.exp())
}

/// CDF of the source distance of a point uniform on the destination-side
/// half-disc of radius `tau` (four-case closed form). The third case is an
/// arcsec/arctan/arccsc combination taken on principal branches.
pub fn truncated_gamma_cdf(half_distance: f64, tau: f64, gamma: f64) -> Result<f64> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::param("tau", tau));
    }
    if !(half_distance > 0.0 && half_distance.is_finite()) {
        return Err(Error::param("d", half_distance));
    }
    let d = half_distance;
    if !(gamma >= d) {
        return Ok(0.0);
    }
    let knot = tau.hypot(d);
    if gamma <= knot {
        return Ok(truncated_inner_case(d, tau, gamma));
    }
    if gamma <= tau + d {
        return Ok(truncated_outer_case(d, tau, gamma));
    }
    Ok(1.0)
}

fn truncated_inner_case(d: f64, tau: f64, gamma: f64) -> f64 {
    let angle = (d / gamma).min(1.0).acos();
    2.0 / (PI * tau * tau) * (gamma * gamma * angle - d * clamp_sqrt(gamma * gamma - d * d))
}

// Valid on sqrt(τ² + d²) <= γ <= τ + d, where `arg >= 1`.
fn truncated_outer_case(d: f64, tau: f64, gamma: f64) -> f64 {
    let (t2, d2, g2) = (tau * tau, d * d, gamma * gamma);
    let gap = t2 + d2 - g2;
    let arg = 2.0 * d * tau / gap;
    let chord = clamp_sqrt(4.0 * d2 * t2 - gap * gap);
    let area = clamp_sqrt((tau - d + gamma) * (tau + d - gamma) * (d - tau + gamma) * (tau + d + gamma));
    let arcsec_neg = (-1.0 / arg).acos();
    let arccsc = (1.0 / arg).asin();
    2.0 * g2 / (PI * t2) * (arcsec_neg - (chord / (t2 - d2 + g2)).atan()) - 2.0 * arccsc / PI - area / (PI * t2)
}

/// The two branch expressions adjacent to the knot `γ = sqrt(τ² + d²)`,
/// evaluated at `gamma` regardless of which one applies there. Used to
/// check that the piecewise form is continuous.
pub fn truncated_gamma_cdf_branches(half_distance: f64, tau: f64, gamma: f64) -> (f64, f64) {
    (
        truncated_inner_case(half_distance, tau, gamma),
        truncated_outer_case(half_distance, tau, gamma),
    )
}

/// Minimum score over the destination-side half of a Poisson field
/// restricted to the disc of radius `tau`:
/// `1 − exp(−(λπτ²/2)·F_Γ(γ))`.
pub fn truncated_gamma_opt_right_cdf(p: &DistParams, tau: f64, gamma: f64) -> Result<f64> {
    let f = truncated_gamma_cdf(p.half_distance, tau, gamma)?;
    Ok(-(-(p.intensity * PI * tau * tau / 2.0) * f).exp_m1())
}

/// `τ → ∞` limit of [`truncated_gamma_opt_right_cdf`]: `1 − e^{h(γ)}`.
pub fn right_half_limit_cdf(p: &DistParams, gamma: f64) -> f64 {
    if !(gamma >= p.half_distance) {
        return 0.0;
    }
    let e = p.half_plane_exponent(gamma);
    if e < EXP_UNDERFLOW {
        1.0
    } else {
        -e.exp_m1()
    }
}

/// `1 − (1 − F_right(γ))²`; agrees with [`gamma_opt_cdf`].
pub fn gamma_opt_cdf_via_halves(p: &DistParams, gamma: f64) -> f64 {
    let survive = 1.0 - right_half_limit_cdf(p, gamma);
    1.0 - survive * survive
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{integrate, QuadratureSpec};
    use core::f64::consts::SQRT_2;

    fn unit() -> DistParams {
        DistParams::new(1.0, 1.0).unwrap()
    }

    fn fig_params() -> PathLossParams {
        PathLossParams::new(unit(), 4.0, 10f64.powf(0.5)).unwrap()
    }

    #[test]
    fn param_validation() {
        assert!(DistParams::new(0.0, 1.0).is_err());
        assert!(DistParams::new(1.0, -1.0).is_err());
        assert!(PathLossParams::new(unit(), 1.5, 1.0).is_err());
        assert!(PathLossParams::new(unit(), 4.0, 0.0).is_err());
    }

    #[test]
    fn gamma_cdf_examples() {
        let p = unit();
        assert_eq!(gamma_opt_cdf(&p, 1.0), 0.0);
        assert_eq!(gamma_opt_cdf(&p, 0.5), 0.0);
        assert!((gamma_opt_cdf(&p, SQRT_2) - (1.0 - (2.0 - PI).exp())).abs() < 1e-14);
        let at3 = gamma_opt_cdf(&p, 3.0);
        let expect = 1.0 - (2.0 * (8f64.sqrt() - 9.0 * (1.0f64 / 3.0).acos())).exp();
        assert!((at3 - expect).abs() < 1e-15 && at3 > 0.999);
        assert_eq!(gamma_opt_cdf(&p, 1e3), 1.0);
    }

    #[test]
    fn gamma_cdf_monotone_with_limits() {
        let p = DistParams::new(0.3, 1.7).unwrap();
        let mut prev = 0.0;
        for i in 0..4000 {
            let g = 1.7 + 0.005 * i as f64;
            let f = gamma_opt_cdf(&p, g);
            assert!(f >= prev && (0.0..=1.0).contains(&f));
            prev = f;
        }
        assert!(prev > 1.0 - 1e-12);
    }

    #[test]
    fn gamma_cdf_tail() {
        // γ = d + 5/sqrt(λ)
        assert!(gamma_opt_cdf(&unit(), 6.0) > 0.999);
    }

    #[test]
    fn gamma_pdf_examples() {
        let p = unit();
        assert_eq!(gamma_opt_pdf(&p, 1.0), 0.0);
        assert_eq!(gamma_opt_pdf(&p, 0.9), 0.0);
        let total = integrate(|g| gamma_opt_pdf(&p, g), 1.0, f64::INFINITY, &QuadratureSpec::tight()).unwrap();
        assert!((total - 1.0).abs() < 1e-8, "{total}");
    }

    fn central_difference<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
        let h = 1e-5 * x;
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn gamma_pdf_is_cdf_derivative() {
        for (lam, d) in [(1.0, 1.0), (0.5, 2.0), (4.0, 1.5)] {
            let p = DistParams::new(lam, d).unwrap();
            for g in [1.01 * d, 1.2 * d, 1.5 * d, 2.0 * d, 3.0 * d] {
                let fd = central_difference(|x| gamma_opt_cdf(&p, x), g);
                assert!((fd - gamma_opt_pdf(&p, g)).abs() < 1e-6, "lam={lam} d={d} g={g}");
            }
        }
    }

    #[test]
    fn y_cdf_examples() {
        let p = fig_params();
        assert_eq!(y_cdf(&p, p.y_max()).unwrap(), 1.0);
        assert_eq!(y_cdf(&p, 2.0 * p.y_max()).unwrap(), 1.0);
        assert!(y_cdf(&p, 0.0).is_err());
        assert!(y_cdf(&p, -1.0).is_err());
        for i in 1..50 {
            let y = p.y_max() * i as f64 / 50.0;
            let via_gamma = 1.0 - gamma_opt_cdf(&p.dist, p.distance_for(y));
            assert!((y_cdf(&p, y).unwrap() - via_gamma).abs() < 1e-14);
        }
    }

    #[test]
    fn y_pdf_examples() {
        let p = fig_params();
        assert_eq!(y_pdf(&p, p.y_max() * (1.0 + 1e-9)).unwrap(), 0.0);
        assert!(y_pdf(&p, 0.0).is_err());
        let total = integrate(|y| y_pdf(&p, y).unwrap(), 0.0, p.y_max(), &QuadratureSpec::tight()).unwrap();
        assert!((total - 1.0).abs() < 1e-7, "{total}");
        let y = 0.5 * p.y_max();
        let fd = central_difference(|x| y_cdf(&p, x).unwrap(), y);
        assert!((fd - y_pdf(&p, y).unwrap()).abs() < 1e-6);
    }

    /// The truncated CDF as the angular average of the conditional CDF,
    /// evaluated by quadrature.
    fn truncated_by_angle(d: f64, tau: f64, gamma: f64) -> f64 {
        if gamma < d {
            return 0.0;
        }
        if gamma > tau + d {
            return 1.0;
        }
        let inner = |th: f64| {
            let r = (gamma * gamma - d * d * th.sin().powi(2)).sqrt() - d * th.cos();
            r * r
        };
        let spec = QuadratureSpec::tight();
        if gamma * gamma <= tau * tau + d * d {
            2.0 / (PI * tau * tau) * integrate(inner, 0.0, PI / 2.0, &spec).unwrap()
        } else {
            let th = ((gamma * gamma - tau * tau - d * d) / (2.0 * d * tau))
                .clamp(-1.0, 1.0)
                .acos();
            let partial = if th > 0.0 {
                integrate(inner, 0.0, th, &spec).unwrap()
            } else {
                0.0
            };
            2.0 / (PI * tau * tau) * partial + 1.0 - 2.0 * th / PI
        }
    }

    #[test]
    fn truncated_matches_angular_average() {
        for (d, tau) in [(1.0, 2.0), (1.0, 10.0), (0.7, 0.5), (2.0, 3.0)] {
            for i in 0..=60 {
                let g = (d + tau * i as f64 / 60.0).min(tau + d);
                let closed = truncated_gamma_cdf(d, tau, g).unwrap();
                let oracle = truncated_by_angle(d, tau, g);
                assert!(
                    (closed - oracle).abs() < 1e-10,
                    "d={d} tau={tau} g={g}: {closed} vs {oracle}"
                );
            }
        }
    }

    #[test]
    fn truncated_outer_cases_and_knots() {
        assert_eq!(truncated_gamma_cdf(1.0, 2.0, 1.0).unwrap(), 0.0);
        assert_eq!(truncated_gamma_cdf(1.0, 2.0, 0.3).unwrap(), 0.0);
        assert_eq!(truncated_gamma_cdf(1.0, 2.0, 3.0 + 1e-9).unwrap(), 1.0);
        assert!((truncated_gamma_cdf(1.0, 2.0, 3.0).unwrap() - 1.0).abs() < 1e-12);
        let knot = 5f64.sqrt();
        let (inner, outer) = truncated_gamma_cdf_branches(1.0, 2.0, knot * (1.0 + 1e-15));
        assert!((inner - outer).abs() < 1e-9, "{inner} vs {outer}");
        assert!(truncated_gamma_cdf(1.0, 0.0, 1.5).is_err());
    }

    #[test]
    fn right_half_converges_to_limit() {
        let p = unit();
        let near = truncated_gamma_opt_right_cdf(&p, 20.0, 1.5).unwrap();
        let limit = right_half_limit_cdf(&p, 1.5);
        assert!((near - limit).abs() < 1e-3, "{near} vs {limit}");
        assert_eq!(truncated_gamma_opt_right_cdf(&p, 20.0, 0.9).unwrap(), 0.0);
        let mut prev_gap = f64::INFINITY;
        for tau in [2.0, 5.0, 10.0, 20.0, 40.0] {
            let gap = (truncated_gamma_opt_right_cdf(&p, tau, 1.5).unwrap() - limit).abs();
            assert!(gap <= prev_gap);
            prev_gap = gap;
        }
    }

    #[test]
    fn halves_identity() {
        let p = unit();
        for g in [1.01, 1.1, 1.5, 2.0, 3.0] {
            assert!((gamma_opt_cdf_via_halves(&p, g) - gamma_opt_cdf(&p, g)).abs() < 1e-12);
        }
        assert_eq!(gamma_opt_cdf_via_halves(&p, 0.99), 0.0);
        let p = DistParams::new(0.5, 2.0).unwrap();
        assert!((gamma_opt_cdf_via_halves(&p, 2.5) - gamma_opt_cdf(&p, 2.5)).abs() < 1e-12);
    }
}
