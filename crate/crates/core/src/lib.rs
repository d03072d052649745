//! Location-based relay selection over homogeneous Poisson relay fields.
//!
//! The crate is `no_std` (it needs `alloc` for relay lists and trial
//! records). It covers:
//!
//! * [`geometry`]: the source/destination frame, the max-hop selection
//!   score and the four selection policies, plus the mid-point optimality
//!   certificate.
//! * [`spatial`]: reproducible Poisson sampling on discs and half-discs.
//! * [`special`]: E₁, arcsec, adaptive quadrature and bisection.
//! * [`analytic`]: closed-form laws of the optimum max-hop distance and of
//!   the received SNR it induces, together with the truncated-disc
//!   intermediates they are built from.
//! * [`metrics`]: conditional rate, average rate and outage for the
//!   no-fading and Rayleigh channels.
//! * [`montecarlo`]: the trial engine and estimators used to check every
//!   closed form.
//! * [`stats`]: empirical CDFs and Kolmogorov distances.
#![no_std]
// `!(x > 0.0)` style checks are meant to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analytic;
pub mod error;
pub mod geometry;
pub mod metrics;
pub mod montecarlo;
pub mod spatial;
pub mod special;
pub mod stats;

pub use error::{Error, Result};
pub use geometry::{NetworkLayout, Point2, PolicyKind, RelayField, SelectionResult};
