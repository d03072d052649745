//! Source/destination frame, the max-hop selection score and relay
//! selection policies.
//!
//! The source sits at `(-d, 0)` and the destination at `(d, 0)`, so the
//! mid-point between them is the origin and every relay's score is at
//! least `d`.

use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Sub};
use core::str::FromStr;

#[allow(unused_imports)] // shadowed by std float methods whenever std is linked
use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn from_polar(radius: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Point2::new(radius * c, radius * s)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    pub fn distance_sq(self, other: Point2) -> f64 {
        (self - other).norm_sq()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Source at `(-d, 0)`, destination at `(d, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkLayout {
    half_distance: f64,
}

impl NetworkLayout {
    pub fn new(half_distance: f64) -> Result<Self> {
        if !(half_distance > 0.0 && half_distance.is_finite()) {
            return Err(Error::param("d", half_distance));
        }
        Ok(NetworkLayout { half_distance })
    }

    /// Half of the source-destination separation.
    pub fn half_distance(&self) -> f64 {
        self.half_distance
    }

    pub fn source(&self) -> Point2 {
        Point2::new(-self.half_distance, 0.0)
    }

    pub fn dest(&self) -> Point2 {
        Point2::new(self.half_distance, 0.0)
    }

    pub fn midpoint(&self) -> Point2 {
        Point2::ORIGIN
    }
}

/// One realization of relay positions inside a disc centered at the
/// mid-point.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayField {
    points: Vec<Point2>,
    window_radius: f64,
}

impl RelayField {
    // Points produced as `r * (cos t, sin t)` with `r <= tau` may land an
    // ulp or two outside the disc.
    const WINDOW_SLACK: f64 = 1e-12;

    pub fn new(points: Vec<Point2>, window_radius: f64) -> Result<Self> {
        if !(window_radius > 0.0) {
            return Err(Error::param("window_radius", window_radius));
        }
        let limit = window_radius * (1.0 + Self::WINDOW_SLACK);
        if let Some(p) = points.iter().find(|p| !(p.norm() <= limit)) {
            return Err(Error::param("relay distance from origin", p.norm()));
        }
        Ok(RelayField { points, window_radius })
    }

    pub(crate) fn from_sampled(points: Vec<Point2>, window_radius: f64) -> Self {
        RelayField { points, window_radius }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn window_radius(&self) -> f64 {
        self.window_radius
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    /// Minimizes the max-hop distance over the field.
    Optimum,
    /// Relay closest to the source-destination mid-point.
    MidPoint,
    NearestSource,
    NearestDest,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 4] = [
        PolicyKind::Optimum,
        PolicyKind::MidPoint,
        PolicyKind::NearestSource,
        PolicyKind::NearestDest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Optimum => "optimum",
            PolicyKind::MidPoint => "midpoint",
            PolicyKind::NearestSource => "nearest-source",
            PolicyKind::NearestDest => "nearest-dest",
        }
    }

    /// Squared quantity the policy minimizes. Squares keep the scan free of
    /// square roots and preserve the ordering.
    fn key(self, layout: &NetworkLayout, x: Point2) -> f64 {
        match self {
            PolicyKind::Optimum => x.distance_sq(layout.source()).max(x.distance_sq(layout.dest())),
            PolicyKind::MidPoint => x.distance_sq(layout.midpoint()),
            PolicyKind::NearestSource => x.distance_sq(layout.source()),
            PolicyKind::NearestDest => x.distance_sq(layout.dest()),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = UnknownPolicy;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "optimum" | "opt" => Ok(PolicyKind::Optimum),
            "midpoint" | "mid-point" | "mid" => Ok(PolicyKind::MidPoint),
            "nearest-source" | "nearest_source" | "source" => Ok(PolicyKind::NearestSource),
            "nearest-dest" | "nearest_dest" | "dest" | "destination" => Ok(PolicyKind::NearestDest),
            _ => Err(UnknownPolicy),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownPolicy;

impl fmt::Display for UnknownPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown policy (expected optimum, midpoint, nearest-source or nearest-dest)")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionResult {
    pub chosen: Point2,
    /// Position of `chosen` in the field's point list.
    pub index: usize,
    /// Selection score of `chosen`.
    pub score: f64,
    pub policy: PolicyKind,
}

/// `max(|x_s - x|, |x - x_d|)`; never below `d`, with equality only at the
/// mid-point.
pub fn selection_score(layout: &NetworkLayout, x: Point2) -> f64 {
    x.distance(layout.source()).max(x.distance(layout.dest()))
}

/// Applies `policy` to `field`. Ties go to the lowest index.
pub fn select(layout: &NetworkLayout, field: &RelayField, policy: PolicyKind) -> Result<SelectionResult> {
    let (index, _) = field
        .points()
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, policy.key(layout, p)))
        .fold(None, |best: Option<(usize, f64)>, (i, k)| match best {
            Some((_, bk)) if bk <= k => best,
            _ => Some((i, k)),
        })
        .ok_or(Error::EmptyField)?;
    let chosen = field.points()[index];
    Ok(SelectionResult {
        chosen,
        index,
        score: selection_score(layout, chosen),
        policy,
    })
}

/// Score of any point where the equidistant line crosses the circle of
/// radius `|y - w|` around the mid-point: `sqrt(d^2 + |y - w|^2)`.
/// Never exceeds `selection_score(y)`.
pub fn hyperplane_projection_score(layout: &NetworkLayout, y: Point2) -> f64 {
    layout.half_distance().hypot(y.distance(layout.midpoint()))
}

/// Sufficient condition for the mid-point relay to be optimal: its score
/// does not exceed the projection score of the second-closest relay to the
/// mid-point. When this returns `true` the optimum and mid-point policies
/// reach the same score.
pub fn midpoint_optimality_certificate(layout: &NetworkLayout, field: &RelayField) -> Result<bool> {
    if field.len() < 2 {
        return Err(Error::FieldTooSmall(field.len()));
    }
    let w = layout.midpoint();
    let mut first: Option<(usize, f64)> = None;
    let mut second: Option<(usize, f64)> = None;
    for (i, p) in field.points().iter().enumerate() {
        let k = p.distance_sq(w);
        match first {
            Some((_, fk)) if fk <= k => {
                if second.is_none_or(|(_, sk)| k < sk) {
                    second = Some((i, k));
                }
            }
            _ => {
                second = first;
                first = Some((i, k));
            }
        }
    }
    let (mid, _) = first.expect("field has at least two points");
    let (runner_up, _) = second.expect("field has at least two points");
    let points = field.points();
    Ok(selection_score(layout, points[mid]) <= hyperplane_projection_score(layout, points[runner_up]))
}
