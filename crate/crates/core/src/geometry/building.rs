use std::f64::consts::TAU;

use super::Point;
use crate::error::{Error, Result};
use crate::propagation::WallLoss;

/// Slack, in meters, for deciding whether a point lies on a wall.
pub(crate) const GEOM_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Circle { radius: f64 },
    Rectangle { width: f64, height: f64 },
}

/// A contiguous stretch of the perimeter with one penetration loss.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WallSegment {
    pub fraction: f64,
    pub loss: WallLoss,
}

/// Convex building footprint centered on its femtocell.
///
/// Wall segments are laid out along the perimeter clockwise, starting at the
/// north-west corner for rectangles and at due north for circles.
#[derive(Debug, Clone, PartialEq)]
pub struct Building {
    shape: Shape,
    center: Point,
    segments: Vec<WallSegment>,
    // cumulative upper bounds of `segments`, last entry is 1
    cumulative: Vec<f64>,
}

impl Building {
    pub fn circle(center: Point, radius: f64, loss: WallLoss) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidArgument(format!("building radius {radius} must be > 0")));
        }
        Self::with_segments(Shape::Circle { radius }, center, vec![WallSegment { fraction: 1.0, loss }])
    }

    pub fn rectangle(center: Point, width: f64, height: f64, segments: Vec<WallSegment>) -> Result<Self> {
        if !(width.is_finite() && width > 0.0 && height.is_finite() && height > 0.0) {
            return Err(Error::InvalidArgument(format!("rectangle {width}x{height} must have positive sides")));
        }
        Self::with_segments(Shape::Rectangle { width, height }, center, segments)
    }

    /// Builds a footprint from explicit wall segments.
    pub fn with_segments(shape: Shape, center: Point, segments: Vec<WallSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::InvalidArgument("building needs at least one wall segment".into()));
        }
        if matches!(shape, Shape::Circle { .. }) && segments.len() != 1 {
            return Err(Error::InvalidArgument("circular buildings take exactly one wall segment".into()));
        }
        if segments.iter().any(|s| !(s.fraction > 0.0 && s.fraction.is_finite())) {
            return Err(Error::InvalidArgument("wall segment fractions must be > 0".into()));
        }
        let total: f64 = segments.iter().map(|s| s.fraction).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("wall segment fractions sum to {total}, expected 1")));
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = segments
            .iter()
            .map(|s| {
                acc += s.fraction;
                acc
            })
            .collect();
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(Building { shape, center, segments, cumulative })
    }

    /// Same footprint moved to `center`.
    pub fn at(&self, center: Point) -> Building {
        Building { center, ..self.clone() }
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn segments(&self) -> &[WallSegment] {
        &self.segments
    }

    pub fn area(&self) -> f64 {
        match self.shape {
            Shape::Circle { radius } => std::f64::consts::PI * radius * radius,
            Shape::Rectangle { width, height } => width * height,
        }
    }

    pub fn perimeter(&self) -> f64 {
        match self.shape {
            Shape::Circle { radius } => TAU * radius,
            Shape::Rectangle { width, height } => 2.0 * (width + height),
        }
    }

    /// Largest distance from the center along either axis.
    pub fn max_half_extent(&self) -> f64 {
        match self.shape {
            Shape::Circle { radius } => radius,
            Shape::Rectangle { width, height } => 0.5 * width.max(height),
        }
    }

    /// Largest distance from the center to any wall point.
    pub fn circumradius(&self) -> f64 {
        match self.shape {
            Shape::Circle { radius } => radius,
            Shape::Rectangle { width, height } => 0.5 * width.hypot(height),
        }
    }

    pub fn max_wall_loss(&self) -> f64 {
        self.segments.iter().map(|s| s.loss.db()).fold(0.0, f64::max)
    }

    /// Closed-set membership test.
    pub fn contains(&self, p: Point) -> bool {
        let d = p - self.center;
        match self.shape {
            Shape::Circle { radius } => d.norm() <= radius + GEOM_EPS,
            Shape::Rectangle { width, height } => {
                d.x.abs() <= 0.5 * width + GEOM_EPS && d.y.abs() <= 0.5 * height + GEOM_EPS
            }
        }
    }

    /// Distance from the center to the wall along `azimuth`.
    pub fn wall_distance(&self, azimuth: f64) -> f64 {
        match self.shape {
            Shape::Circle { radius } => radius,
            Shape::Rectangle { width, height } => {
                let (s, c) = azimuth.sin_cos();
                let tx = if c.abs() > 1e-15 { 0.5 * width / c.abs() } else { f64::INFINITY };
                let ty = if s.abs() > 1e-15 { 0.5 * height / s.abs() } else { f64::INFINITY };
                tx.min(ty)
            }
        }
    }

    /// Boundary point at perimeter fraction `f` in `[0, 1)`, clockwise from the start corner.
    pub fn point_on_perimeter(&self, f: f64) -> Point {
        let f = f.rem_euclid(1.0);
        match self.shape {
            Shape::Circle { radius } => {
                // clockwise from north
                let a = TAU * f;
                self.center + Point::new(radius * a.sin(), radius * a.cos())
            }
            Shape::Rectangle { width, height } => {
                let (hw, hh) = (0.5 * width, 0.5 * height);
                let s = f * self.perimeter();
                let local = if s <= width {
                    Point::new(-hw + s, hh)
                } else if s <= width + height {
                    Point::new(hw, hh - (s - width))
                } else if s <= 2.0 * width + height {
                    Point::new(hw - (s - width - height), -hh)
                } else {
                    Point::new(-hw, -hh + (s - 2.0 * width - height))
                };
                self.center + local
            }
        }
    }

    /// Perimeter fraction of a point on (or near) the wall.
    pub fn perimeter_fraction(&self, q: Point) -> f64 {
        let d = q - self.center;
        match self.shape {
            Shape::Circle { .. } => {
                let a = d.x.atan2(d.y);
                (if a < 0.0 { a + TAU } else { a }) / TAU
            }
            Shape::Rectangle { width, height } => {
                let (hw, hh) = (0.5 * width, 0.5 * height);
                let edges = [(d.y - hh).abs(), (d.x - hw).abs(), (d.y + hh).abs(), (d.x + hw).abs()];
                let edge = (0..4).min_by(|&a, &b| edges[a].total_cmp(&edges[b])).unwrap();
                let s = match edge {
                    0 => d.x.clamp(-hw, hw) + hw,
                    1 => width + (hh - d.y.clamp(-hh, hh)),
                    2 => width + height + (hw - d.x.clamp(-hw, hw)),
                    _ => 2.0 * width + height + (d.y.clamp(-hh, hh) + hh),
                };
                (s / self.perimeter()).rem_euclid(1.0)
            }
        }
    }

    /// Penetration loss of the wall segment containing boundary point `q`.
    pub fn wall_loss_at(&self, q: Point) -> WallLoss {
        let f = self.perimeter_fraction(q);
        let idx = self.cumulative.partition_point(|&c| c <= f).min(self.segments.len() - 1);
        self.segments[idx].loss
    }

    /// Interval `[s_in, s_out]` (meters along `src -> dir`) where the line is inside the footprint.
    fn chord(&self, src: Point, dir: Point) -> Option<(f64, f64)> {
        let rel = src - self.center;
        match self.shape {
            Shape::Circle { radius } => {
                let b = dir.dot(rel);
                let c = rel.dot(rel) - radius * radius;
                let disc = b * b - c;
                if disc <= 0.0 {
                    return None;
                }
                let r = disc.sqrt();
                Some((-b - r, -b + r))
            }
            Shape::Rectangle { width, height } => {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                for (p, u, h) in [(rel.x, dir.x, 0.5 * width), (rel.y, dir.y, 0.5 * height)] {
                    if u.abs() < 1e-15 {
                        if p.abs() > h {
                            return None;
                        }
                    } else {
                        let a = (-h - p) / u;
                        let b = (h - p) / u;
                        lo = lo.max(a.min(b));
                        hi = hi.min(a.max(b));
                    }
                }
                (lo < hi).then_some((lo, hi))
            }
        }
    }

    /// Calls `f` with the loss of every wall crossed by the segment `src -> dst`.
    ///
    /// Points on the wall count as indoors, so a segment ending on the wall
    /// from outside crosses it once and one ending there from inside does not.
    #[inline]
    pub(crate) fn for_each_crossing(&self, src: Point, dst: Point, mut f: impl FnMut(WallLoss)) {
        let delta = dst - src;
        let len = delta.norm();
        if len <= GEOM_EPS {
            return;
        }
        let dir = delta * (1.0 / len);
        let Some((s_in, s_out)) = self.chord(src, dir) else { return };
        if s_out - s_in <= GEOM_EPS {
            return;
        }
        if s_in > GEOM_EPS && s_in <= len + GEOM_EPS {
            f(self.wall_loss_at(src + dir * s_in));
        }
        if s_out >= -GEOM_EPS && s_out < len - GEOM_EPS {
            f(self.wall_loss_at(src + dir * s_out));
        }
    }

    /// Total penetration loss in dB along `src -> dst`.
    #[inline]
    pub fn crossing_loss_db(&self, src: Point, dst: Point) -> f64 {
        let mut total = 0.0;
        self.for_each_crossing(src, dst, |w| total += w.db());
        total
    }
}

/// Losses of each wall the segment `src -> dst` crosses, in order from `src`.
pub fn wall_losses_on_ray(src: Point, dst: Point, building: &Building) -> Vec<WallLoss> {
    let mut out = Vec::with_capacity(2);
    building.for_each_crossing(src, dst, |w| out.push(w));
    out
}
