//! Femtocell coverage resolved on an angular-radial grid.
//!
//! Along each azimuth the pilot power the femtocell would need to dominate
//! every competing pilot is tabulated once ([`CoverageProfile`]). The
//! coverage radius for any transmit power is then the largest tabulated
//! radius still covered, refined by bisection inside the next grid cell.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::building::GEOM_EPS;
use super::{Building, Point};
use crate::error::{Error, Result};
use crate::propagation::{PathLossModel, PowerDbm, REFERENCE_DISTANCE_M};

/// Radial offset of the first outdoor sample past the wall, meters.
pub const WALL_OFFSET_M: f64 = 1e-6;

/// A fixed-power pilot source.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transmitter {
    pub position: Point,
    pub power: PowerDbm,
    pub model: PathLossModel,
    /// Extra loss on every link, e.g. the transmitter's own building wall.
    pub fixed_loss_db: f64,
}

/// Per-transmitter shadowing, constant within angular sectors around the
/// target femtocell plus one value for the femtocell site itself.
///
/// Index 0 is the serving femtocell, index `i + 1` competitor `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowField {
    sectors: usize,
    values: Vec<f64>,
    origin: Vec<f64>,
}

impl ShadowField {
    /// No shadowing for `transmitters` sources.
    pub fn none(transmitters: usize) -> Self {
        ShadowField { sectors: 1, values: vec![0.0; transmitters], origin: vec![0.0; transmitters] }
    }

    /// Independent zero-mean normal draws with the given per-transmitter sigmas.
    pub fn sample<R: Rng + ?Sized>(sigmas_db: &[f64], sectors: usize, rng: &mut R) -> Result<Self> {
        if sectors == 0 {
            return Err(Error::InvalidArgument("shadowing needs at least one sector".into()));
        }
        let mut values = Vec::with_capacity(sigmas_db.len() * sectors);
        let mut origin = Vec::with_capacity(sigmas_db.len());
        for &sigma in sigmas_db {
            if !(sigma.is_finite() && sigma >= 0.0) {
                return Err(Error::InvalidArgument(format!("shadowing sigma {sigma} must be >= 0")));
            }
            if sigma == 0.0 {
                values.extend(std::iter::repeat_n(0.0, sectors));
                origin.push(0.0);
                continue;
            }
            let normal = Normal::new(0.0, sigma).expect("validated sigma");
            origin.push(normal.sample(rng));
            values.extend((0..sectors).map(|_| normal.sample(rng)));
        }
        Ok(ShadowField { sectors, values, origin })
    }

    pub fn transmitters(&self) -> usize {
        self.origin.len()
    }

    pub fn sectors(&self) -> usize {
        self.sectors
    }

    #[inline]
    pub fn sector_of(&self, azimuth: f64) -> usize {
        let s = (azimuth.rem_euclid(std::f64::consts::TAU) / std::f64::consts::TAU * self.sectors as f64) as usize;
        s.min(self.sectors - 1)
    }

    #[inline]
    pub fn value(&self, tx: usize, sector: usize) -> f64 {
        self.values[tx * self.sectors + sector]
    }

    #[inline]
    pub fn at_origin(&self, tx: usize) -> f64 {
        self.origin[tx]
    }

    fn range(&self, tx: usize) -> (f64, f64) {
        self.values[tx * self.sectors..(tx + 1) * self.sectors]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }
}

/// Links from the target femtocell and its competitors to points around it.
#[derive(Debug, Clone, Copy)]
pub struct RadioMap<'a> {
    building: &'a Building,
    serving: PathLossModel,
    competitors: &'a [Transmitter],
    shadow: &'a ShadowField,
    min_distance: f64,
}

impl<'a> RadioMap<'a> {
    /// `min_distance` (at least 1 m) clamps every link distance from below.
    pub fn new(
        building: &'a Building,
        serving: PathLossModel,
        competitors: &'a [Transmitter],
        shadow: &'a ShadowField,
        min_distance: f64,
    ) -> Result<Self> {
        if shadow.transmitters() != competitors.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "shadow field covers {} transmitters, expected {}",
                shadow.transmitters(),
                competitors.len() + 1
            )));
        }
        if !(min_distance >= REFERENCE_DISTANCE_M) {
            return Err(Error::InvalidArgument(format!("minimum distance {min_distance} must be >= 1 m")));
        }
        Ok(RadioMap { building, serving, competitors, shadow, min_distance })
    }

    pub fn building(&self) -> &Building {
        self.building
    }

    pub fn competitors(&self) -> &[Transmitter] {
        self.competitors
    }

    pub fn shadow(&self) -> &ShadowField {
        self.shadow
    }

    #[inline]
    fn clamp(&self, d: f64) -> f64 {
        d.max(self.min_distance)
    }

    /// Loss from the femtocell to `p` in dB (path loss, walls, shadowing).
    #[inline]
    pub fn serving_loss_db(&self, p: Point, sector: usize) -> f64 {
        let c = self.building.center();
        self.serving.path_loss_unchecked(self.clamp(p.distance(c)))
            + self.building.crossing_loss_db(c, p)
            + self.shadow.value(0, sector)
    }

    /// Received femtocell pilot at `p`.
    pub fn serving_pilot_dbm(&self, p_f: PowerDbm, p: Point) -> f64 {
        let sector = self.shadow.sector_of(p.azimuth_from(self.building.center()));
        p_f.dbm() - self.serving_loss_db(p, sector)
    }

    /// Target-building wall loss on an outdoor-to-indoor link; outdoor
    /// receivers get none.
    #[inline]
    fn penetration_loss_db(&self, src: Point, p: Point) -> f64 {
        if self.building.contains(p) {
            self.building.crossing_loss_db(src, p)
        } else {
            0.0
        }
    }

    #[inline]
    fn competitor_at(&self, i: usize, p: Point, shadow_db: f64) -> f64 {
        let t = &self.competitors[i];
        t.power.dbm()
            - t.model.path_loss_unchecked(self.clamp(p.distance(t.position)))
            - t.fixed_loss_db
            - self.penetration_loss_db(t.position, p)
            - shadow_db
    }

    /// Pilot of competitor `i` received at `p` (outside the femtocell site).
    pub fn competitor_pilot_dbm(&self, i: usize, p: Point) -> f64 {
        let sector = self.shadow.sector_of(p.azimuth_from(self.building.center()));
        self.competitor_at(i, p, self.shadow.value(i + 1, sector))
    }

    /// Strongest competing pilot at `p`, `-inf` without competitors.
    pub fn strongest_competitor_dbm(&self, p: Point) -> f64 {
        (0..self.competitors.len()).map(|i| self.competitor_pilot_dbm(i, p)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Pilot of competitor `i` measured at the femtocell site.
    pub fn competitor_at_site_dbm(&self, i: usize) -> f64 {
        self.competitor_at(i, self.building.center(), self.shadow.at_origin(i + 1))
    }

    /// Strongest pilot measured at the femtocell site (`I_b,max`).
    pub fn strongest_at_site_dbm(&self) -> f64 {
        (0..self.competitors.len()).map(|i| self.competitor_at_site_dbm(i)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Summed competitor power at the femtocell site, mW.
    pub fn interference_at_site_mw(&self) -> f64 {
        (0..self.competitors.len()).map(|i| crate::propagation::dbm_to_linear(self.competitor_at_site_dbm(i))).sum()
    }
}

/// Angular-radial discretisation of the coverage search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageGrid {
    pub angular_steps: usize,
    /// Spacing of the coarse radial scan, meters.
    pub radial_step: f64,
    /// Final bisection resolution, meters.
    pub resolution: f64,
    /// Search limit; defaults to three times the building half-extent.
    pub max_radius: Option<f64>,
}

impl Default for CoverageGrid {
    fn default() -> Self {
        CoverageGrid { angular_steps: 360, radial_step: 1.0, resolution: 0.05, max_radius: None }
    }
}

impl CoverageGrid {
    pub fn validate(&self) -> Result<()> {
        if self.angular_steps < 8 {
            return Err(Error::InvalidArgument(format!("angular_steps {} must be >= 8", self.angular_steps)));
        }
        if !(self.radial_step > 0.0 && self.radial_step.is_finite()) {
            return Err(Error::InvalidArgument(format!("radial_step {} must be > 0", self.radial_step)));
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::InvalidArgument(format!("resolution {} must be > 0", self.resolution)));
        }
        if let Some(m) = self.max_radius {
            if !(m > 0.0 && m.is_finite()) {
                return Err(Error::InvalidArgument(format!("max_radius {m} must be > 0")));
            }
        }
        Ok(())
    }

    pub fn search_radius(&self, building: &Building) -> f64 {
        let r = self.max_radius.unwrap_or(3.0 * building.max_half_extent());
        r.max(building.circumradius() + self.radial_step)
    }
}

#[derive(Debug, Clone)]
struct Ray {
    azimuth: f64,
    unit: Point,
    sector: usize,
    wall: f64,
    exit_loss_db: f64,
    radii: Vec<f64>,
    required: Vec<f64>,
}

/// Tabulated power requirements for one radio map.
#[derive(Debug, Clone)]
pub struct CoverageProfile<'m> {
    map: RadioMap<'m>,
    resolution: f64,
    max_radius: f64,
    kept: Vec<usize>,
    rays: Vec<Ray>,
}

impl<'m> CoverageProfile<'m> {
    pub fn build(map: RadioMap<'m>, grid: &CoverageGrid) -> Result<Self> {
        grid.validate()?;
        let building = map.building;
        let c = building.center();
        let max_radius = grid.search_radius(building);
        let kept = relevant_competitors(&map, max_radius);

        let mut profile = CoverageProfile { map, resolution: grid.resolution, max_radius, kept, rays: Vec::new() };
        let n = grid.angular_steps;
        let rays = (0..n)
            .map(|a| {
                let azimuth = std::f64::consts::TAU * a as f64 / n as f64;
                let unit = Point::polar(1.0, azimuth);
                let wall = building.wall_distance(azimuth);
                let exit_loss_db = building.wall_loss_at(c + unit * wall).db();
                let radii = radial_grid(wall, grid.radial_step, max_radius);
                let mut ray = Ray {
                    azimuth,
                    unit,
                    sector: map.shadow.sector_of(azimuth),
                    wall,
                    exit_loss_db,
                    radii,
                    required: Vec::new(),
                };
                ray.required = ray.radii.iter().map(|&r| profile.required_at(&ray, r)).collect();
                ray
            })
            .collect();
        profile.rays = rays;
        Ok(profile)
    }

    pub fn map(&self) -> &RadioMap<'m> {
        &self.map
    }

    pub fn max_radius(&self) -> f64 {
        self.max_radius
    }

    /// Femtocell power needed for its pilot to match the strongest competitor at radius `r`.
    fn required_at(&self, ray: &Ray, r: f64) -> f64 {
        let c = self.map.building.center();
        let p = c + ray.unit * r;
        let outside = r > ray.wall + GEOM_EPS;
        let serving = self.map.serving.path_loss_unchecked(self.map.clamp(r))
            + if outside { ray.exit_loss_db } else { 0.0 }
            + self.map.shadow.value(0, ray.sector);
        let best = self
            .kept
            .iter()
            .map(|&i| self.map.competitor_at(i, p, self.map.shadow.value(i + 1, ray.sector)))
            .fold(f64::NEG_INFINITY, f64::max);
        best + serving
    }

    fn extent(&self, ray: &Ray, p_f: f64) -> f64 {
        let Some(k) = ray.required.iter().rposition(|&q| q <= p_f) else {
            return 0.0;
        };
        if k + 1 == ray.radii.len() {
            return ray.radii[k];
        }
        let (mut lo, mut hi) = (ray.radii[k], ray.radii[k + 1]);
        while hi - lo > self.resolution {
            let mid = 0.5 * (lo + hi);
            if self.required_at(ray, mid) <= p_f {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Coverage radius at every azimuth for femtocell power `p_f`.
    pub fn boundary(&self, p_f: PowerDbm) -> RadialProfile {
        let p = p_f.dbm();
        RadialProfile {
            azimuths: self.rays.iter().map(|r| r.azimuth).collect(),
            radii: self.rays.iter().map(|r| self.extent(r, p)).collect(),
            walls: self.rays.iter().map(|r| r.wall).collect(),
        }
    }
}

fn radial_grid(wall: f64, step: f64, max_radius: f64) -> Vec<f64> {
    let mut radii = Vec::with_capacity((max_radius / step) as usize + 4);
    let mut k = 0usize;
    loop {
        let r = k as f64 * step;
        if r >= wall - GEOM_EPS {
            break;
        }
        radii.push(r);
        k += 1;
    }
    radii.push(wall);
    radii.push(wall + WALL_OFFSET_M);
    let mut k = 1usize;
    loop {
        let r = wall + k as f64 * step;
        if r >= max_radius {
            break;
        }
        radii.push(r);
        k += 1;
    }
    if max_radius > wall + WALL_OFFSET_M {
        radii.push(max_radius);
    }
    radii
}

/// Competitors that can be the strongest pilot somewhere within `radius` of the site.
fn relevant_competitors(map: &RadioMap<'_>, radius: f64) -> Vec<usize> {
    let c = map.building.center();
    let worst_walls = 2.0 * map.building.max_wall_loss();
    let bounds: Vec<(f64, f64)> = map
        .competitors
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let d = t.position.distance(c);
            let (s_lo, s_hi) = map.shadow.range(i + 1);
            let base = t.power.dbm() - t.fixed_loss_db;
            let upper = base - t.model.path_loss_unchecked(map.clamp(d - radius)) - s_lo;
            let lower = base - t.model.path_loss_unchecked(map.clamp(d + radius)) - worst_walls - s_hi;
            (upper, lower)
        })
        .collect();
    let floor = bounds.iter().map(|b| b.1).fold(f64::NEG_INFINITY, f64::max);
    (0..bounds.len()).filter(|&i| bounds[i].0 >= floor).collect()
}

/// Coverage radius per azimuth together with the wall distance there.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub azimuths: Vec<f64>,
    pub radii: Vec<f64>,
    pub walls: Vec<f64>,
}

impl RadialProfile {
    /// Coverage extends past the wall at some azimuth.
    pub fn leaked(&self) -> bool {
        self.radii.iter().zip(&self.walls).any(|(r, w)| r > w)
    }

    fn excess(&self) -> impl Iterator<Item = f64> + '_ {
        self.radii.iter().zip(&self.walls).map(|(r, w)| (r - w).max(0.0))
    }

    /// Azimuthal mean of the coverage overshoot beyond the wall.
    pub fn mean_excess(&self) -> f64 {
        self.excess().sum::<f64>() / self.radii.len() as f64
    }

    pub fn max_excess(&self) -> f64 {
        self.excess().fold(0.0, f64::max)
    }

    /// Covered share of the building area (polar integration over the rays).
    pub fn indoor_fraction(&self) -> f64 {
        let (mut num, mut den) = (0.0, 0.0);
        for (r, w) in self.radii.iter().zip(&self.walls) {
            let inner = r.min(*w);
            num += inner * inner;
            den += w * w;
        }
        num / den
    }

    pub fn mean_radius(&self) -> f64 {
        self.radii.iter().sum::<f64>() / self.radii.len() as f64
    }

    /// Whether `p` (relative to the building center `c`) lies within the coverage.
    pub fn covers(&self, c: Point, p: Point) -> bool {
        let n = self.radii.len();
        let a = p.azimuth_from(c);
        let idx = ((a / std::f64::consts::TAU * n as f64).round() as usize) % n;
        p.distance(c) <= self.radii[idx]
    }
}

/// Coverage radius per azimuth for femtocell power `p_f`.
pub fn coverage_boundary(map: RadioMap<'_>, p_f: PowerDbm, grid: &CoverageGrid) -> Result<RadialProfile> {
    Ok(CoverageProfile::build(map, grid)?.boundary(p_f))
}
