use rand::Rng;

use super::{Building, Point, Shape};
use crate::error::{Error, Result};

/// Indoor femtocell users and outdoor diagnostic users of one drop.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct UserSet {
    pub indoor: Vec<Point>,
    pub outdoor: Vec<Point>,
}

/// `k` users uniform over the footprint, each at least `eps0` from the center.
pub fn place_users_uniform<R: Rng + ?Sized>(
    building: &Building,
    k: usize,
    eps0: f64,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if k == 0 {
        return Err(Error::InvalidArgument("at least one user is required".into()));
    }
    let half = match building.shape() {
        Shape::Circle { radius } => radius,
        Shape::Rectangle { width, height } => 0.5 * width.min(height),
    };
    if !(eps0 >= 0.0 && eps0 < half) {
        return Err(Error::InvalidArgument(format!(
            "minimum distance {eps0} m must be below the building half-extent {half} m"
        )));
    }
    let c = building.center();
    let users = match building.shape() {
        Shape::Circle { radius } => (0..k)
            .map(|_| {
                // inverse CDF of f_D(d) = 2d / (r^2 - eps0^2)
                let u: f64 = rng.random();
                let d = (eps0 * eps0 + u * (radius * radius - eps0 * eps0)).sqrt();
                let a = rng.random::<f64>() * std::f64::consts::TAU;
                c + Point::polar(d, a)
            })
            .collect(),
        Shape::Rectangle { width, height } => (0..k)
            .map(|_| loop {
                let p = Point::new(
                    (rng.random::<f64>() - 0.5) * width,
                    (rng.random::<f64>() - 0.5) * height,
                );
                if p.norm() >= eps0 {
                    break c + p;
                }
            })
            .collect(),
    };
    Ok(users)
}

/// A user uniformly placed on the building wall.
pub fn place_boundary_user<R: Rng + ?Sized>(building: &Building, rng: &mut R) -> Point {
    building.point_on_perimeter(rng.random::<f64>())
}

/// `count` users uniform over the outdoor band within `band` meters of the wall.
pub fn place_outdoor_users<R: Rng + ?Sized>(
    building: &Building,
    count: usize,
    band: f64,
    rng: &mut R,
) -> Result<Vec<Point>> {
    if !(band.is_finite() && band > 0.0) {
        return Err(Error::InvalidArgument(format!("outdoor band {band} m must be > 0")));
    }
    let c = building.center();
    let users = match building.shape() {
        Shape::Circle { radius } => {
            let (r0, r1) = (radius, radius + band);
            (0..count)
                .map(|_| {
                    let u: f64 = rng.random();
                    let d = (r0 * r0 + u * (r1 * r1 - r0 * r0)).sqrt();
                    c + Point::polar(d, rng.random::<f64>() * std::f64::consts::TAU)
                })
                .collect()
        }
        Shape::Rectangle { width, height } => {
            let (hw, hh) = (0.5 * width, 0.5 * height);
            (0..count)
                .map(|_| loop {
                    let p = Point::new(
                        (rng.random::<f64>() - 0.5) * 2.0 * (hw + band),
                        (rng.random::<f64>() - 0.5) * 2.0 * (hh + band),
                    );
                    let dx = (p.x.abs() - hw).max(0.0);
                    let dy = (p.y.abs() - hh).max(0.0);
                    let gap = dx.hypot(dy);
                    if gap > 0.0 && gap <= band {
                        break c + p;
                    }
                })
                .collect()
        }
    };
    Ok(users)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::WallSegment;
    use crate::propagation::WallLoss;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn circle() -> Building {
        Building::circle(Point::new(100.0, -50.0), 20.0, WallLoss::new(10.0).unwrap()).unwrap()
    }

    fn rect() -> Building {
        let segs = [(15.0, 0.35), (10.0, 0.30), (7.0, 0.20), (2.0, 0.15)]
            .into_iter()
            .map(|(l, f)| WallSegment { fraction: f, loss: WallLoss::new(l).unwrap() })
            .collect();
        Building::rectangle(Point::new(-3.0, 4.0), 20.0, 15.0, segs).unwrap()
    }

    #[test]
    fn rejects_zero_users_and_oversized_exclusion() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(place_users_uniform(&circle(), 0, 1.0, &mut rng).is_err());
        assert!(place_users_uniform(&circle(), 3, 25.0, &mut rng).is_err());
    }

    #[test]
    fn circle_distance_law_matches_closed_form_cdf() {
        let b = circle();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let mut d: Vec<f64> = place_users_uniform(&b, n, 1.0, &mut rng)
            .unwrap()
            .into_iter()
            .map(|p| p.distance(b.center()))
            .collect();
        assert!(d.iter().all(|&x| (1.0..=20.0 + 1e-9).contains(&x)));
        d.sort_by(f64::total_cmp);
        let cdf = |x: f64| (x * x - 1.0) / (400.0 - 1.0);
        let ks = d
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS {ks}");
    }

    #[test]
    fn rectangle_users_inside_and_centered() {
        let b = rect();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = 100_000;
        let users = place_users_uniform(&b, n, 1.0, &mut rng).unwrap();
        assert!(users.iter().all(|&p| b.contains(p) && p.distance(b.center()) >= 1.0));
        let mx = users.iter().map(|p| p.x).sum::<f64>() / n as f64;
        let my = users.iter().map(|p| p.y).sum::<f64>() / n as f64;
        assert!((mx - b.center().x).abs() < 0.05 && (my - b.center().y).abs() < 0.05);
    }

    #[test]
    fn boundary_users_on_the_wall() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = circle();
        for _ in 0..100 {
            let p = place_boundary_user(&c, &mut rng);
            assert!((p.distance(c.center()) - 20.0).abs() < 1e-9);
        }
        let r = rect();
        let n = 100_000;
        let mut long = 0usize;
        for _ in 0..n {
            let d = place_boundary_user(&r, &mut rng) - r.center();
            let on_long = (d.y.abs() - 7.5).abs() < 1e-9;
            let on_short = (d.x.abs() - 10.0).abs() < 1e-9;
            assert!(on_long || on_short);
            if on_long {
                long += 1;
            }
        }
        assert!((long as f64 / n as f64 - 20.0 / 35.0).abs() < 0.01);
    }

    #[test]
    fn outdoor_users_within_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for b in [circle(), rect()] {
            let users = place_outdoor_users(&b, 2000, 10.0, &mut rng).unwrap();
            for p in users {
                assert!(!b.contains(p));
                let d = p - b.center();
                let gap = match b.shape() {
                    Shape::Circle { radius } => d.norm() - radius,
                    Shape::Rectangle { width, height } => {
                        (d.x.abs() - width / 2.0).max(0.0).hypot((d.y.abs() - height / 2.0).max(0.0))
                    }
                };
                assert!(gap > 0.0 && gap <= 10.0 + 1e-9);
            }
        }
    }
}
