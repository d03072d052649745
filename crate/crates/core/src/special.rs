//! Numerical kernels: the exponential integral E₁, inverse secant and
//! cosecant, adaptive Gauss-Kronrod quadrature and bisection.

use alloc::vec::Vec;
#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_EPS: f64 = 1e-16;
const CF_EPS: f64 = 1e-16;
const CF_MAX_ITER: usize = 10_000;

/// E₁(x) = ∫ₓ^∞ e^(−t)/t dt for x > 0.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    check_e1_domain(x)?;
    Ok(if x <= 1.0 {
        e1_series(x)
    } else {
        (-x).exp() * e1_scaled_cf(x)
    })
}

/// eˣ·E₁(x) for x > 0, evaluated without forming eˣ for x > 1 so that it
/// stays finite for arbitrarily large arguments. Returns 0 at +∞.
pub fn scaled_exp_integral_e1(x: f64) -> Result<f64> {
    check_e1_domain(x)?;
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    Ok(if x <= 1.0 {
        x.exp() * e1_series(x)
    } else {
        e1_scaled_cf(x)
    })
}

fn check_e1_domain(x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::domain("E1", x))
    }
}

// E₁(x) = −γ − ln x − Σ_{k≥1} (−x)^k / (k·k!)
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut power = 1.0;
    for k in 1..200 {
        let k = k as f64;
        power *= -x / k;
        let term = power / k;
        sum += term;
        if term.abs() < SERIES_EPS * sum.abs() {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// Continued fraction for eˣE₁(x), modified Lentz.
fn e1_scaled_cf(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..CF_MAX_ITER {
        let a = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// arcsec(x) = arccos(1/x). Defined for |x| ≥ 1 on the principal branch:
/// `[0, π/2)` for x ≥ 1 and `(π/2, π]` for x ≤ −1.
pub fn arcsec(x: f64) -> Result<f64> {
    if x.abs() >= 1.0 {
        Ok((1.0 / x).acos())
    } else {
        Err(Error::domain("arcsec", x))
    }
}

/// arccsc(x) = arcsin(1/x) for |x| ≥ 1, principal branch.
pub fn arccsc(x: f64) -> Result<f64> {
    if x.abs() >= 1.0 {
        Ok((1.0 / x).asin())
    } else {
        Err(Error::domain("arccsc", x))
    }
}

/// Tolerances for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadratureSpec {
    pub fn new(abs_tol: f64, rel_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::param("abs_tol", abs_tol));
        }
        if !(rel_tol > 0.0) {
            return Err(Error::param("rel_tol", rel_tol));
        }
        Ok(QuadratureSpec {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    pub fn tight() -> Self {
        QuadratureSpec {
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            max_subdivisions: 5000,
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule.
// Published 30-digit tables, kept verbatim.
#[allow(clippy::excessive_precision)]
const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for KRONROD_NODES[1], [3], [5], [7].
#[allow(clippy::excessive_precision)]
const GAUSS_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let f_center = f(center);
    let mut kronrod = f_center * KRONROD_WEIGHTS[7];
    let mut gauss = f_center * GAUSS_WEIGHTS[3];
    let mut abs_sum = kronrod.abs();
    let mut samples = [(0.0, 0.0); 7];
    for (j, sample) in samples.iter_mut().enumerate() {
        let dx = half * KRONROD_NODES[j];
        let (f1, f2) = (f(center - dx), f(center + dx));
        kronrod += KRONROD_WEIGHTS[j] * (f1 + f2);
        abs_sum += KRONROD_WEIGHTS[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += GAUSS_WEIGHTS[j / 2] * (f1 + f2);
        }
        *sample = (f1, f2);
    }
    let mean = 0.5 * kronrod;
    let mut asc = KRONROD_WEIGHTS[7] * (f_center - mean).abs();
    for (j, &(f1, f2)) in samples.iter().enumerate() {
        asc += KRONROD_WEIGHTS[j] * ((f1 - mean).abs() + (f2 - mean).abs());
    }

    let half_abs = half.abs();
    let value = kronrod * half;
    let abs_sum = abs_sum * half_abs;
    let asc = asc * half_abs;
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Segment { lo, hi, value, error }
}

/// Globally adaptive Gauss-Kronrod quadrature of `f` over `[lo, hi]`.
///
/// An infinite `hi` is handled by the substitution `x = lo + (1 − t)/t`,
/// which maps the half-line onto `(0, 1]`. The integrand is only sampled
/// at interior points, so integrable endpoint singularities are allowed.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    if !lo.is_finite() || hi.is_nan() || !(lo < hi) {
        return Err(Error::param("integration bounds", hi - lo));
    }
    if hi == f64::INFINITY {
        let mapped = |t: f64| {
            let x = lo + (1.0 - t) / t;
            let v = f(x);
            if v == 0.0 {
                0.0
            } else {
                v / (t * t)
            }
        };
        return integrate_finite(&mapped, 0.0, 1.0, spec);
    }
    integrate_finite(&f, lo, hi, spec)
}

fn integrate_finite<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    let mut segments: Vec<Segment> = Vec::with_capacity(64);
    segments.push(gauss_kronrod(f, lo, hi));
    let mut subdivisions = 0;
    loop {
        let value: f64 = segments.iter().map(|s| s.value).sum();
        let error: f64 = segments.iter().map(|s| s.error).sum();
        if !value.is_finite() {
            return Err(Error::NoConvergence {
                subdivisions,
                error: f64::NAN,
            });
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(value);
        }
        let (worst, seg) =
            segments.iter().enumerate().fold(
                (0, segments[0]),
                |acc, (i, s)| if s.error > acc.1.error { (i, *s) } else { acc },
            );
        let mid = 0.5 * (seg.lo + seg.hi);
        if subdivisions >= spec.max_subdivisions || !(seg.lo < mid && mid < seg.hi) {
            return Err(Error::NoConvergence { subdivisions, error });
        }
        segments[worst] = gauss_kronrod(f, seg.lo, mid);
        segments.push(gauss_kronrod(f, mid, seg.hi));
        subdivisions += 1;
    }
}

/// Bracket and tolerance for [`bisect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub tol: f64,
}

impl RootSpec {
    pub fn new(bracket_lo: f64, bracket_hi: f64, tol: f64) -> Result<Self> {
        if !(bracket_lo < bracket_hi) {
            return Err(Error::param("bracket width", bracket_hi - bracket_lo));
        }
        if !(tol > 0.0) {
            return Err(Error::param("tol", tol));
        }
        Ok(RootSpec {
            bracket_lo,
            bracket_hi,
            tol,
        })
    }
}

/// Bisection on a sign-changing bracket. Stops once the bracket is no wider
/// than `tol` (or cannot be split further) and returns its midpoint.
pub fn bisect<F: Fn(f64) -> f64>(f: F, spec: &RootSpec) -> Result<f64> {
    let (mut lo, mut hi) = (spec.bracket_lo, spec.bracket_hi);
    let (f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo.signum() != f_hi.signum()) || f_lo.is_nan() || f_hi.is_nan() {
        return Err(Error::BadBracket { lo, hi, f_lo, f_hi });
    }
    let lo_negative = f_lo < 0.0;
    while hi - lo > spec.tol {
        let mid = 0.5 * (lo + hi);
        if !(lo < mid && mid < hi) {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `sqrt(max(x, 0))`: radicands like γ² − d² can dip below zero by
/// rounding at the edge of their support.
pub(crate) fn clamp_sqrt(x: f64) -> f64 {
    x.max(0.0).sqrt()
}
