//! Reproducible homogeneous Poisson sampling on discs centered at the
//! source-destination mid-point.
//!
//! Every draw comes from a ChaCha8 stream keyed by `(master_seed,
//! stream_id)`. Monte Carlo trial `k` uses stream `k`, so results do not
//! depend on how trials are spread over workers.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI, TAU};

#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::geometry::{NetworkLayout, Point2, RelayField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    FullDisc,
    /// Points with non-negative first coordinate (the destination side).
    RightHalfDisc,
}

impl Region {
    fn angle_range(self) -> (f64, f64) {
        match self {
            Region::FullDisc => (0.0, TAU),
            Region::RightHalfDisc => (-FRAC_PI_2, FRAC_PI_2),
        }
    }

    fn area_fraction(self) -> f64 {
        match self {
            Region::FullDisc => 1.0,
            Region::RightHalfDisc => 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PppSpec {
    intensity: f64,
    window_radius: f64,
    region: Region,
}

impl PppSpec {
    pub fn new(intensity: f64, window_radius: f64, region: Region) -> Result<Self> {
        if !(intensity > 0.0 && intensity.is_finite()) {
            return Err(Error::param("lambda", intensity));
        }
        if !(window_radius > 0.0 && window_radius.is_finite()) {
            return Err(Error::param("tau", window_radius));
        }
        Ok(PppSpec {
            intensity,
            window_radius,
            region,
        })
    }

    pub fn intensity(&self) -> f64 {
        self.intensity
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn region(&self) -> Region {
        self.region
    }

    pub fn area(&self) -> f64 {
        self.region.area_fraction() * PI * self.window_radius * self.window_radius
    }

    /// Expected number of points, `λ · area`.
    pub fn mean_count(&self) -> f64 {
        self.intensity * self.area()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        SeedSpec { master_seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Uniform point in the region, by inverse transform: radius `τ·sqrt(V)`
/// and a uniform angle.
pub fn sample_uniform_point<R: Rng + ?Sized>(rng: &mut R, window_radius: f64, region: Region) -> Point2 {
    let v: f64 = rng.random();
    let u: f64 = rng.random();
    let (a, b) = region.angle_range();
    Point2::from_polar(window_radius * v.sqrt(), a + (b - a) * u)
}

pub fn sample_ppp_with<R: Rng + ?Sized>(spec: &PppSpec, rng: &mut R) -> RelayField {
    let poisson = Poisson::new(spec.mean_count()).expect("mean count is positive and finite");
    let n = poisson.sample(rng) as usize;
    let points: Vec<Point2> = (0..n)
        .map(|_| sample_uniform_point(rng, spec.window_radius, spec.region))
        .collect();
    RelayField::from_sampled(points, spec.window_radius)
}

/// One Poisson realization; identical for identical `(spec, seed)`.
pub fn sample_ppp(spec: &PppSpec, seed: SeedSpec) -> RelayField {
    sample_ppp_with(spec, &mut seed.rng())
}

/// Distance to the source of a point at radius `u` and angle `theta`
/// (measured from the positive first axis) around the mid-point:
/// `sqrt(u² + 2du·cos θ + d²)`.
pub fn halfdisc_distance_to_source(layout: &NetworkLayout, u: f64, theta: f64) -> f64 {
    let d = layout.half_distance();
    (u * u + 2.0 * d * u * theta.cos() + d * d).max(0.0).sqrt()
}

pub fn sample_uniform_halfdisc_distance_to_source_with<R: Rng + ?Sized>(
    layout: &NetworkLayout,
    window_radius: f64,
    rng: &mut R,
) -> f64 {
    let v: f64 = rng.random();
    let w: f64 = rng.random();
    let u = window_radius * v.sqrt();
    let theta = -FRAC_PI_2 + PI * w;
    halfdisc_distance_to_source(layout, u, theta)
}

/// Source distance of a uniform point on the destination-side half-disc of
/// radius `window_radius`. Always within `[d, τ + d]`.
pub fn sample_uniform_halfdisc_distance_to_source(
    layout: &NetworkLayout,
    window_radius: f64,
    seed: SeedSpec,
) -> Result<f64> {
    if !(window_radius > 0.0) {
        return Err(Error::param("tau", window_radius));
    }
    Ok(sample_uniform_halfdisc_distance_to_source_with(
        layout,
        window_radius,
        &mut seed.rng(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats;

    #[test]
    fn spec_validation() {
        assert!(PppSpec::new(0.0, 10.0, Region::FullDisc).is_err());
        assert!(PppSpec::new(1.0, 0.0, Region::FullDisc).is_err());
        assert!(PppSpec::new(f64::INFINITY, 1.0, Region::FullDisc).is_err());
        let s = PppSpec::new(1.0, 10.0, Region::RightHalfDisc).unwrap();
        assert!((s.mean_count() - 50.0 * PI).abs() < 1e-12);
        let s = PppSpec::new(1.0, 10.0, Region::FullDisc).unwrap();
        assert!((s.mean_count() - 100.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn same_seed_same_field() {
        let spec = PppSpec::new(0.7, 4.0, Region::FullDisc).unwrap();
        let a = sample_ppp(&spec, SeedSpec::new(9, 3));
        let b = sample_ppp(&spec, SeedSpec::new(9, 3));
        assert_eq!(a, b);
        let c = sample_ppp(&spec, SeedSpec::new(9, 4));
        assert_ne!(a, c);
    }

    #[test]
    fn points_stay_in_region() {
        let spec = PppSpec::new(2.0, 3.0, Region::RightHalfDisc).unwrap();
        for k in 0..50 {
            let f = sample_ppp(&spec, SeedSpec::new(1, k));
            for p in f.points() {
                assert!(p.x >= -1e-15 && p.norm() <= 3.0 * (1.0 + 1e-12));
            }
            assert!(RelayField::new(f.points().to_vec(), 3.0).is_ok());
        }
    }

    #[test]
    fn mean_count_within_three_standard_errors() {
        for region in [Region::FullDisc, Region::RightHalfDisc] {
            let spec = PppSpec::new(1.0, 10.0, region).unwrap();
            let n = 10_000;
            let counts: Vec<f64> = (0..n)
                .map(|k| sample_ppp(&spec, SeedSpec::new(2024, k)).len() as f64)
                .collect();
            let est = stats::mean_with_error(&counts);
            let se = (spec.mean_count() / n as f64).sqrt();
            assert!(
                (est.mean - spec.mean_count()).abs() < 3.0 * se,
                "{region:?}: {}",
                est.mean
            );
        }
    }

    #[test]
    fn radial_law_is_uniform_in_area() {
        let spec = PppSpec::new(1.0, 10.0, Region::FullDisc).unwrap();
        let mut r2: Vec<f64> = (0..200)
            .flat_map(|k| sample_ppp(&spec, SeedSpec::new(5, k)).into_points())
            .map(|p| p.norm_sq() / 100.0)
            .collect();
        let n = r2.len();
        let ks = stats::ks_distance(&mut r2, |x| x.clamp(0.0, 1.0));
        assert!(ks < stats::ks_critical_value(n, 0.01), "{ks}");
    }

    #[test]
    fn collinear_halfdisc_distance() {
        let l = NetworkLayout::new(1.0).unwrap();
        assert!((halfdisc_distance_to_source(&l, 0.7, 0.0) - 1.7).abs() < 1e-15);
        assert!((halfdisc_distance_to_source(&l, 0.0, 0.3) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn halfdisc_distance_range() {
        let l = NetworkLayout::new(1.0).unwrap();
        for k in 0..5000 {
            let g = sample_uniform_halfdisc_distance_to_source(&l, 2.0, SeedSpec::new(11, k)).unwrap();
            assert!((1.0 - 1e-12..=3.0 + 1e-12).contains(&g), "{g}");
        }
        assert!(sample_uniform_halfdisc_distance_to_source(&l, 0.0, SeedSpec::new(0, 0)).is_err());
    }

    #[test]
    fn disjoint_streams_are_uncorrelated() {
        let mut a = SeedSpec::new(77, 0).rng();
        let mut b = SeedSpec::new(77, 1).rng();
        let n = 100_000;
        let (xs, ys): (Vec<f64>, Vec<f64>) = (0..n).map(|_| (a.random::<f64>(), b.random::<f64>())).unzip();
        let corr = stats::pearson(&xs, &ys);
        // |r| < 4/sqrt(n) for independent uniforms
        assert!(corr.abs() < 4.0 / (n as f64).sqrt(), "{corr}");
    }
}
