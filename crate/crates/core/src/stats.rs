//! Sample statistics for checking closed forms against simulation.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

/// Sample mean with its plug-in standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub std_error: f64,
    pub n: usize,
}

impl EstimateWithError {
    /// `|mean - reference| <= k * std_error + slack`
    pub fn agrees_with(&self, reference: f64, k: f64, slack: f64) -> bool {
        (self.mean - reference).abs() <= k * self.std_error + slack
    }
}

/// Mean and standard error of `values`. Panics on an empty slice.
///
/// Sums are taken about the first sample (shifted-data variance), so a
/// constant input gives a standard error of exactly zero.
pub fn mean_with_error(values: &[f64]) -> EstimateWithError {
    assert!(!values.is_empty(), "no samples");
    let n = values.len();
    let shift = values[0];
    let (mut s1, mut s2) = (0.0, 0.0);
    for v in values {
        let dv = v - shift;
        s1 += dv;
        s2 += dv * dv;
    }
    let nf = n as f64;
    let mean = shift + s1 / nf;
    let std_error = if n > 1 {
        ((s2 - s1 * s1 / nf).max(0.0) / (nf - 1.0)).sqrt() / nf.sqrt()
    } else {
        0.0
    };
    EstimateWithError { mean, std_error, n }
}

/// Frequency of `hits` among `n` with the binomial standard error.
pub fn proportion_with_error(hits: usize, n: usize) -> EstimateWithError {
    assert!(n > 0, "no samples");
    let p = hits as f64 / n as f64;
    EstimateWithError {
        mean: p,
        std_error: (p * (1.0 - p) / n as f64).sqrt(),
        n,
    }
}

/// Empirical CDF over a sorted copy of the samples.
#[derive(Debug, Clone)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(mut samples: Vec<f64>) -> Self {
        samples.sort_unstable_by(f64::total_cmp);
        Ecdf { sorted: samples }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Fraction of samples `<= x`.
    pub fn eval(&self, x: f64) -> f64 {
        let k = self.sorted.partition_point(|&s| s <= x);
        k as f64 / self.sorted.len() as f64
    }

    /// Kolmogorov distance `sup |F_n(x) - F(x)|` against a continuous CDF.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).max((i + 1) as f64 / n - f)
            })
            .fold(0.0, f64::max)
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }
}

/// Kolmogorov distance of `samples` (sorted in place) to `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic one-sample KS critical value at significance `alpha`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    sxy / (sxx * syy).sqrt()
}
