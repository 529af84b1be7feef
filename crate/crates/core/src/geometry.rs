//! Planar primitives in a local Cartesian frame (meters).
//!
//! Crossing zones are segments along the wall through a door's center. The
//! crossing area that arms the detector is a closed disc around the door.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pdr::Pose;
use crate::scalar::Scalar;

/// Default crossing-zone width.
pub const DEFAULT_ZONE_WIDTH: f64 = 5.0;
/// Typical physical door opening.
pub const DOOR_OPENING_WIDTH: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Environment {
    Indoor,
    Outdoor,
}

impl Environment {
    pub fn other(self) -> Self {
        match self {
            Environment::Indoor => Environment::Outdoor,
            Environment::Outdoor => Environment::Indoor,
        }
    }
}

impl fmt::Display for Environment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Environment::Indoor => "indoor",
            Environment::Outdoor => "outdoor",
        })
    }
}

impl std::str::FromStr for Environment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "indoor" => Ok(Environment::Indoor),
            "outdoor" => Ok(Environment::Outdoor),
            other => Err(Error::InvalidInput(format!("unknown environment `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn origin() -> Self {
        Point2::new(T::zero(), T::zero())
    }

    /// Unit vector at `angle` radians counterclockwise from +x.
    #[inline]
    pub fn from_angle(angle: T) -> Self {
        Point2::new(angle.cos(), angle.sin())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z component of the 3D cross product.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn distance(self, o: Self) -> T {
        (self - o).norm()
    }

    /// Rotated by +90 degrees.
    #[inline]
    pub fn perp(self) -> Self {
        Point2::new(-self.y, self.x)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn rotate_about(self, pivot: Self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let d = self - pivot;
        pivot + Point2::new(c * d.x - s * d.y, s * d.x + c * d.y)
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Self;
    #[inline]
    fn mul(self, k: T) -> Self {
        Point2::new(self.x * k, self.y * k)
    }
}

impl<T: Scalar> Neg for Point2<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Point2::new(-self.x, -self.y)
    }
}

/// A segment of positive length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment2<T> {
    pub a: Point2<T>,
    pub b: Point2<T>,
}

impl<T: Scalar> Segment2<T> {
    pub fn new(a: Point2<T>, b: Point2<T>) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid_parameter("segment", "non-finite endpoint"));
        }
        if a == b {
            return Err(Error::invalid_parameter("segment", "zero length"));
        }
        Ok(Segment2 { a, b })
    }

    pub fn length(&self) -> T {
        self.a.distance(self.b)
    }

    pub fn midpoint(&self) -> Point2<T> {
        (self.a + self.b) * T::lit(0.5)
    }

    pub fn direction(&self) -> Point2<T> {
        self.b - self.a
    }

    pub fn distance_to(&self, p: Point2<T>) -> T {
        let d = self.direction();
        let t = ((p - self.a).dot(d) / d.dot(d)).max(T::zero()).min(T::one());
        p.distance(self.a + d * t)
    }

    fn bbox_overlaps(&self, o: &Self, pad: T) -> bool {
        let (min_x, max_x) = (self.a.x.min(self.b.x), self.a.x.max(self.b.x));
        let (min_y, max_y) = (self.a.y.min(self.b.y), self.a.y.max(self.b.y));
        let (o_min_x, o_max_x) = (o.a.x.min(o.b.x), o.a.x.max(o.b.x));
        let (o_min_y, o_max_y) = (o.a.y.min(o.b.y), o.a.y.max(o.b.y));
        min_x <= o_max_x + pad && o_min_x <= max_x + pad && min_y <= o_max_y + pad && o_min_y <= max_y + pad
    }
}

/// Intersection of two segments, using the two-line determinant formula.
///
/// The formula is evaluated in a frame centered on `l1.a` to limit
/// cancellation. Only points lying on both segments (inclusive, within
/// [`Scalar::geom_tolerance`]) are returned. Parallel and collinear pairs
/// return `None`.
pub fn segment_intersection<T: Scalar>(l1: &Segment2<T>, l2: &Segment2<T>) -> Option<Point2<T>> {
    let tol = T::geom_tolerance();
    if !l1.bbox_overlaps(l2, tol) {
        return None;
    }
    let o = l1.a;
    let (p1, p2, p3, p4) = (l1.a - o, l1.b - o, l2.a - o, l2.b - o);
    let (x1, y1, x2, y2) = (p1.x, p1.y, p2.x, p2.y);
    let (x3, y3, x4, y4) = (p3.x, p3.y, p4.x, p4.y);

    let den = (x1 - x2) * (y3 - y4) - (y1 - y2) * (x3 - x4);
    // Relative test: den is |L1||L2|sin(angle).
    if den.abs() <= T::epsilon() * T::lit(16.0) * l1.length() * l2.length() {
        return None;
    }
    let c12 = x1 * y2 - y1 * x2;
    let c34 = x3 * y4 - y3 * x4;
    let x = (c12 * (x3 - x4) - (x1 - x2) * c34) / den;
    let y = (c12 * (y3 - y4) - (y1 - y2) * c34) / den;
    let p = Point2::new(x, y) + o;

    if l1.distance_to(p) <= tol && l2.distance_to(p) <= tol {
        Some(p)
    } else {
        None
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Door<T> {
    pub id: String,
    pub center: Point2<T>,
    /// Unit vector along the wall. The inner side lies to its left.
    pub tangent: Point2<T>,
    pub inner_env: Environment,
    pub outer_env: Environment,
}

impl<T: Scalar> Door<T> {
    pub fn new(
        id: impl Into<String>,
        center: Point2<T>,
        tangent: Point2<T>,
        inner_env: Environment,
        outer_env: Environment,
    ) -> Result<Self> {
        let door = Door {
            id: id.into(),
            center,
            tangent,
            inner_env,
            outer_env,
        };
        door.validate()?;
        Ok(door)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() || !self.tangent.is_finite() {
            return Err(Error::invariant("door.finite", format!("door `{}`", self.id)));
        }
        let tol = T::lit(1e-9).max(T::epsilon() * T::lit(8.0));
        if (self.tangent.norm() - T::one()).abs() > tol {
            return Err(Error::invariant(
                "door.unit_tangent",
                format!("door `{}` tangent norm {}", self.id, self.tangent.norm()),
            ));
        }
        if self.inner_env == self.outer_env {
            return Err(Error::invariant(
                "door.distinct_envs",
                format!("door `{}` has {} on both sides", self.id, self.inner_env),
            ));
        }
        Ok(())
    }

    /// Unit normal pointing to the side labeled `env`.
    pub fn normal_towards(&self, env: Environment) -> Point2<T> {
        let inner = self.tangent.perp();
        if env == self.inner_env {
            inner
        } else {
            -inner
        }
    }

    /// Label on the far side for someone currently in `env`.
    pub fn opposite(&self, env: Environment) -> Environment {
        if env == self.inner_env {
            self.outer_env
        } else {
            self.inner_env
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingZone<T> {
    pub door_id: String,
    pub segment: Segment2<T>,
}

/// Zone of `width` meters along the wall, centered on the door.
pub fn zone_for_door<T: Scalar>(door: &Door<T>, width: T) -> Result<CrossingZone<T>> {
    if !(width > T::zero()) || !width.is_finite() {
        return Err(Error::invalid_parameter(
            "zone_width",
            format!("must be positive, got {width}"),
        ));
    }
    let half = door.tangent * (width * T::lit(0.5));
    Ok(CrossingZone {
        door_id: door.id.clone(),
        segment: Segment2::new(door.center - half, door.center + half)?,
    })
}

/// Closed disc of `radius` around the door center.
pub fn in_crossing_area<T: Scalar>(p: Point2<T>, door: &Door<T>, radius: T) -> bool {
    p.distance(door.center) <= radius
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanStart<T> {
    pub pose: Pose<T>,
    pub environment: Environment,
}

/// Walls and doors. Doorways are gaps between wall segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorPlan<T> {
    pub walls: Vec<Segment2<T>>,
    pub doors: Vec<Door<T>>,
    pub start: Option<PlanStart<T>>,
}

impl<T: Scalar> Default for FloorPlan<T> {
    fn default() -> Self {
        FloorPlan {
            walls: Vec::new(),
            doors: Vec::new(),
            start: None,
        }
    }
}

impl<T: Scalar> FloorPlan<T> {
    pub fn door(&self, id: &str) -> Option<&Door<T>> {
        self.doors.iter().find(|d| d.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        for w in &self.walls {
            Segment2::new(w.a, w.b)?;
        }
        for (i, d) in self.doors.iter().enumerate() {
            d.validate()?;
            if self.doors[..i].iter().any(|o| o.id == d.id) {
                return Err(Error::invariant("door.unique_id", format!("duplicate door `{}`", d.id)));
            }
        }
        Ok(())
    }
}

pub fn segment_hits_walls<T: Scalar>(path_seg: &Segment2<T>, plan: &FloorPlan<T>) -> bool {
    plan.walls
        .iter()
        .any(|w| segment_intersection(path_seg, w).is_some())
}
