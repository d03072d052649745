//! Trial engine: sample a field, apply each policy, record max-hop scores
//! and rates, then aggregate.
//!
//! Trial `k` draws everything from stream `k` of the master seed, so a
//! record depends only on `(inputs, master_seed, k)`. Callers are free to
//! evaluate trials in any order or on any number of workers.
//!
//! A trial with no relay in the window records an infinite score for every
//! policy, which gives a zero rate and therefore counts as an outage.

use alloc::vec::Vec;

use crate::geometry::{midpoint_optimality_certificate, select, NetworkLayout, PolicyKind, RelayField};
use crate::metrics::{conditional_rate, draw_fades, instantaneous_rate, ChannelSpec};
use crate::spatial::{sample_ppp_with, PppSpec, SeedSpec};
use crate::stats::{mean_with_error, proportion_with_error};

pub use crate::stats::EstimateWithError;

fn slot(policy: PolicyKind) -> usize {
    match policy {
        PolicyKind::Optimum => 0,
        PolicyKind::MidPoint => 1,
        PolicyKind::NearestSource => 2,
        PolicyKind::NearestDest => 3,
    }
}

/// Channel-independent part of a trial. One of these can be turned into
/// rate records for any number of channel settings, which keeps an SNR
/// sweep on common random fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreRecord {
    pub trial_id: u64,
    scores: [f64; 4],
    /// Mid-point optimality certificate; `None` with fewer than two relays.
    pub certificate: Option<bool>,
    pub relay_count: usize,
}

impl ScoreRecord {
    /// Max-hop distance of the relay chosen by `policy` (`+∞` if none).
    pub fn score(&self, policy: PolicyKind) -> f64 {
        self.scores[slot(policy)]
    }

    /// Conditional rates under `channel` for `policies`.
    pub fn with_rates(&self, channel: &ChannelSpec, policies: &[PolicyKind]) -> TrialRecord {
        let mut rates = [None; 4];
        for &p in policies {
            rates[slot(p)] = Some(conditional_rate(channel, self.score(p)));
        }
        TrialRecord { scores: *self, rates }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRecord {
    pub scores: ScoreRecord,
    rates: [Option<f64>; 4],
}

impl TrialRecord {
    pub fn trial_id(&self) -> u64 {
        self.scores.trial_id
    }

    pub fn score(&self, policy: PolicyKind) -> f64 {
        self.scores.score(policy)
    }

    /// Rate of `policy` in bits/sec/Hz, if the policy was requested.
    pub fn rate(&self, policy: PolicyKind) -> Option<f64> {
        self.rates[slot(policy)]
    }

    pub fn certificate(&self) -> Option<bool> {
        self.scores.certificate
    }
}

fn scores_of(layout: &NetworkLayout, field: &RelayField, trial_id: u64) -> ScoreRecord {
    let mut scores = [f64::INFINITY; 4];
    if !field.is_empty() {
        for p in PolicyKind::ALL {
            scores[slot(p)] = select(layout, field, p).expect("field is non-empty").score;
        }
    }
    ScoreRecord {
        trial_id,
        scores,
        certificate: midpoint_optimality_certificate(layout, field).ok(),
        relay_count: field.len(),
    }
}

/// Scores of all four policies for trial `trial_id`.
pub fn sample_scores(layout: &NetworkLayout, ppp: &PppSpec, master_seed: u64, trial_id: u64) -> ScoreRecord {
    let field = sample_ppp_with(ppp, &mut SeedSpec::new(master_seed, trial_id).rng());
    scores_of(layout, &field, trial_id)
}

/// One trial on the conditional-rate route.
pub fn run_trial(
    layout: &NetworkLayout,
    ppp: &PppSpec,
    channel: &ChannelSpec,
    policies: &[PolicyKind],
    master_seed: u64,
    trial_id: u64,
) -> TrialRecord {
    sample_scores(layout, ppp, master_seed, trial_id).with_rates(channel, policies)
}

/// One trial on the instantaneous-rate route: after the field, one fading
/// pair per requested policy is drawn from the same stream and the
/// per-use rate is recorded instead of the fading average.
pub fn run_trial_instantaneous(
    layout: &NetworkLayout,
    ppp: &PppSpec,
    channel: &ChannelSpec,
    policies: &[PolicyKind],
    master_seed: u64,
    trial_id: u64,
) -> TrialRecord {
    let mut rng = SeedSpec::new(master_seed, trial_id).rng();
    let field = sample_ppp_with(ppp, &mut rng);
    let scores = scores_of(layout, &field, trial_id);
    let mut rates = [None; 4];
    for &p in policies {
        let fades = draw_fades(channel, &mut rng);
        // An empty field gives zero, as on the conditional route.
        rates[slot(p)] = Some(instantaneous_rate(channel, layout, &field, p, fades).unwrap_or(0.0));
    }
    TrialRecord { scores, rates }
}

/// Trials `0..n_trials`, in order.
pub fn run_trials(
    layout: &NetworkLayout,
    ppp: &PppSpec,
    channel: &ChannelSpec,
    policies: &[PolicyKind],
    n_trials: u64,
    master_seed: u64,
) -> Vec<TrialRecord> {
    (0..n_trials)
        .map(|k| run_trial(layout, ppp, channel, policies, master_seed, k))
        .collect()
}

fn rates_of(records: &[TrialRecord], policy: PolicyKind) -> impl Iterator<Item = f64> + '_ {
    records.iter().map(move |r| {
        r.rate(policy)
            .unwrap_or_else(|| panic!("policy {policy} was not evaluated in these records"))
    })
}

/// Sample mean and standard error of the recorded rates of `policy`.
///
/// # Panics
/// If `records` is empty or `policy` was not evaluated.
pub fn estimate_average_rate(records: &[TrialRecord], policy: PolicyKind) -> EstimateWithError {
    let rates: Vec<f64> = rates_of(records, policy).collect();
    mean_with_error(&rates)
}

/// Fraction of records whose rate for `policy` is at most `rho`, with the
/// binomial standard error.
///
/// # Panics
/// If `records` is empty or `policy` was not evaluated.
pub fn estimate_outage(records: &[TrialRecord], policy: PolicyKind, rho: f64) -> EstimateWithError {
    let hits = rates_of(records, policy).filter(|&r| r <= rho).count();
    proportion_with_error(hits, records.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Fading;
    use crate::spatial::Region;
    use alloc::vec;

    fn setup(lambda: f64) -> (NetworkLayout, PppSpec, ChannelSpec) {
        (
            NetworkLayout::new(1.0).unwrap(),
            PppSpec::new(lambda, 10.0, Region::FullDisc).unwrap(),
            ChannelSpec::from_db(4.0, 5.0, Fading::NoFading).unwrap(),
        )
    }

    #[test]
    fn single_trial_is_reproducible() {
        let (l, p, c) = setup(1.0);
        let a = run_trials(&l, &p, &c, &PolicyKind::ALL, 1, 42);
        let b = run_trials(&l, &p, &c, &PolicyKind::ALL, 1, 42);
        assert_eq!(a, b);
        assert_eq!(a[0], run_trial(&l, &p, &c, &PolicyKind::ALL, 42, 0));
        // Trial k does not depend on the trials before it.
        let many = run_trials(&l, &p, &c, &PolicyKind::ALL, 20, 42);
        assert_eq!(many[17], run_trial(&l, &p, &c, &PolicyKind::ALL, 42, 17));
    }

    #[test]
    fn per_record_invariants() {
        let (l, p, c) = setup(0.3);
        for r in run_trials(&l, &p, &c, &PolicyKind::ALL, 2000, 1) {
            let opt = r.score(PolicyKind::Optimum);
            for pol in PolicyKind::ALL {
                assert!(opt <= r.score(pol));
                assert!(r.score(pol) >= 1.0);
                assert!(r.rate(PolicyKind::Optimum).unwrap() >= r.rate(pol).unwrap());
            }
            if r.certificate() == Some(true) {
                assert_eq!(opt, r.score(PolicyKind::MidPoint));
            }
        }
    }

    #[test]
    fn empty_field_counts_as_outage() {
        let l = NetworkLayout::new(1.0).unwrap();
        // mean count 1e-4·π: nearly every field is empty
        let p = PppSpec::new(1e-4, 1.0, Region::FullDisc).unwrap();
        let c = ChannelSpec::from_db(4.0, 5.0, Fading::Rayleigh).unwrap();
        let recs = run_trials(&l, &p, &c, &[PolicyKind::Optimum], 50, 3);
        let empty: Vec<_> = recs.iter().filter(|r| r.scores.relay_count == 0).collect();
        assert!(!empty.is_empty());
        for r in empty {
            assert_eq!(r.score(PolicyKind::Optimum), f64::INFINITY);
            assert_eq!(r.rate(PolicyKind::Optimum), Some(0.0));
            assert_eq!(r.certificate(), None);
        }
        assert_eq!(r_outage(&recs), 1.0);
        fn r_outage(recs: &[TrialRecord]) -> f64 {
            estimate_outage(recs, PolicyKind::Optimum, 1e-9).mean
        }
    }

    #[test]
    fn outage_extremes() {
        let (l, p, c) = setup(1.0);
        let recs = run_trials(&l, &p, &c, &[PolicyKind::Optimum, PolicyKind::MidPoint], 500, 5);
        for pol in [PolicyKind::Optimum, PolicyKind::MidPoint] {
            let zero = estimate_outage(&recs, pol, 0.0);
            assert_eq!((zero.mean, zero.std_error), (0.0, 0.0));
            let all = estimate_outage(&recs, pol, 1e9);
            assert_eq!((all.mean, all.std_error, all.n), (1.0, 0.0, 500));
        }
    }

    #[test]
    fn identical_records_have_zero_error() {
        let (l, p, c) = setup(1.0);
        let r = run_trial(&l, &p, &c, &[PolicyKind::Optimum], 9, 0);
        let est = estimate_average_rate(&vec![r; 100], PolicyKind::Optimum);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.mean, r.rate(PolicyKind::Optimum).unwrap());
    }

    #[test]
    #[should_panic(expected = "was not evaluated")]
    fn missing_policy_panics() {
        let (l, p, c) = setup(1.0);
        let recs = run_trials(&l, &p, &c, &[PolicyKind::Optimum], 3, 0);
        estimate_average_rate(&recs, PolicyKind::MidPoint);
    }

    #[test]
    fn score_records_reuse_across_channels() {
        let (l, p, _) = setup(1.0);
        let s = sample_scores(&l, &p, 8, 4);
        let c10 = ChannelSpec::from_db(4.0, 10.0, Fading::NoFading).unwrap();
        assert_eq!(
            s.with_rates(&c10, &PolicyKind::ALL),
            run_trial(&l, &p, &c10, &PolicyKind::ALL, 8, 4)
        );
    }

    #[test]
    fn instantaneous_route_shares_the_field() {
        let (l, p, _) = setup(1.0);
        let c = ChannelSpec::from_db(4.0, 5.0, Fading::Rayleigh).unwrap();
        let a = run_trial_instantaneous(&l, &p, &c, &PolicyKind::ALL, 2, 6);
        let b = run_trial(&l, &p, &c, &PolicyKind::ALL, 2, 6);
        assert_eq!(a.scores, b.scores);
        assert_eq!(a, run_trial_instantaneous(&l, &p, &c, &PolicyKind::ALL, 2, 6));
        // No fading: per-use and averaged rates coincide.
        let nf = ChannelSpec::from_db(4.0, 5.0, Fading::NoFading).unwrap();
        let a = run_trial_instantaneous(&l, &p, &nf, &[PolicyKind::Optimum], 2, 6);
        let b = run_trial(&l, &p, &nf, &[PolicyKind::Optimum], 2, 6);
        assert!((a.rate(PolicyKind::Optimum).unwrap() - b.rate(PolicyKind::Optimum).unwrap()).abs() < 1e-14);
    }
}
