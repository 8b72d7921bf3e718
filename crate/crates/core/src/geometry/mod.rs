//! Network and building geometry.
//!
//! Macro sites sit on a 19-cell hexagonal lattice, the target femtocell at the
//! center of a convex building whose perimeter is split into wall segments
//! with individual penetration losses. [`coverage`] resolves where the femto
//! pilot dominates every competing pilot.

mod building;
pub mod coverage;
mod placement;

pub use building::{wall_losses_on_ray, Building, Shape, WallSegment};
pub use coverage::{
    coverage_boundary, CoverageGrid, CoverageProfile, RadialProfile, RadioMap, ShadowField,
    Transmitter,
};
pub use placement::{place_boundary_user, place_outdoor_users, place_users_uniform, UserSet};

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6};

use crate::error::{Error, Result};
use crate::propagation::PowerDbm;

/// A point in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Point at `radius` from the origin along `azimuth` (radians, counter-clockwise from +x).
    #[inline]
    pub fn polar(radius: f64, azimuth: f64) -> Self {
        let (s, c) = azimuth.sin_cos();
        Point { x: radius * c, y: radius * s }
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Azimuth of `self - origin` in `[0, 2pi)`.
    #[inline]
    pub fn azimuth_from(self, origin: Point) -> f64 {
        let a = (self.y - origin.y).atan2(self.x - origin.x);
        if a < 0.0 {
            a + std::f64::consts::TAU
        } else {
            a
        }
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }
}

impl std::ops::Add for Point {
    type Output = Point;
    #[inline]
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for Point {
    type Output = Point;
    #[inline]
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<f64> for Point {
    type Output = Point;
    #[inline]
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// The 19 macro sites of a two-ring hexagonal lattice with cell radius `r_m`.
///
/// Ring 1 sits at `sqrt(3) r_m`; ring 2 mixes corner sites at `2 sqrt(3) r_m`
/// and edge sites at `3 r_m`.
pub fn hex_layout(r_m: f64) -> Result<Vec<Point>> {
    if !(r_m.is_finite() && r_m > 0.0) {
        return Err(Error::InvalidArgument(format!("macro radius {r_m} must be > 0")));
    }
    let isd = 3f64.sqrt() * r_m;
    let mut sites = Vec::with_capacity(19);
    sites.push(Point::ORIGIN);
    for k in 0..6 {
        sites.push(Point::polar(isd, FRAC_PI_6 + k as f64 * FRAC_PI_3));
    }
    for k in 0..6 {
        let a = FRAC_PI_6 + k as f64 * FRAC_PI_3;
        sites.push(Point::polar(2.0 * isd, a));
        sites.push(Point::polar(3.0 * r_m, a + FRAC_PI_6));
    }
    Ok(sites)
}

/// Macro sites, interfering femtocells and the target femtocell of one drop.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkLayout {
    pub macro_bs: Vec<(Point, PowerDbm)>,
    pub interferer_femtos: Vec<(Point, PowerDbm)>,
    pub target_femto: Point,
    pub r_m: f64,
    pub d_b: f64,
}
