use crate::error::{Error, Result};
use crate::geometry::{Building, CoverageGrid, Point, WallSegment};
use crate::powerctrl::ControllerConfig;
use crate::propagation::{PathLossModel, PowerDbm, WallLoss};

/// Footprint of the target building.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildingKind {
    Circle,
    Rectangle,
}

/// Which neighbors a femtocell hears when setting its initial power.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighborList {
    /// Macro base stations only.
    Macro,
    /// Macro base stations and previously configured femtocells.
    All,
}

/// Everything one Monte-Carlo experiment needs.
///
/// `Default` is the theory-verification setup: a 20 m circular building
/// with a 10 dB wall and no shadowing. [`SimConfig::real_scenario`] switches
/// to the 20 m x 15 m rectangle with four wall types, shadowing and two users.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    /// Macrocell radius `r_m`, meters.
    pub macro_radius: f64,
    /// Distance of the target femtocell from the center macro site, meters.
    pub femto_distance: f64,
    pub building_kind: BuildingKind,
    pub building_radius: f64,
    pub building_width: f64,
    pub building_height: f64,
    /// Wall loss of the circular building, dB.
    pub wall_loss: f64,
    /// `(loss dB, perimeter fraction)` of the rectangular building walls,
    /// clockwise from the north-west corner.
    pub wall_segments: Vec<(f64, f64)>,
    /// Wall loss of every interfering femtocell's own building, dB.
    pub interferer_wall_loss: f64,
    pub initial_radius: f64,
    /// Minimum femtocell-to-user distance `eps0`, meters.
    pub min_distance: f64,
    /// Path loss at 1 m, dB.
    pub intercept: f64,
    pub delta_p: f64,
    pub femto_max_power: f64,
    pub macro_power: f64,
    pub noise: f64,
    /// Real femtocell link exponent `n_r`.
    pub femto_exponent: f64,
    pub macro_exponent: f64,
    /// Exponent `n_e` assumed by the controller threshold.
    pub threshold_exponent: f64,
    pub cinr_threshold: f64,
    pub gamma_delta: f64,
    pub users: usize,
    /// Put one of the indoor users on the wall.
    pub boundary_user: bool,
    pub outdoor_users: usize,
    pub outdoor_band: f64,
    pub interferers: usize,
    /// Minimum distance between an interfering femtocell and the target, meters.
    pub interferer_separation: f64,
    pub neighbors: NeighborList,
    pub shadowing: bool,
    pub macro_shadow_sigma: f64,
    pub femto_shadow_sigma: f64,
    pub shadow_sectors: usize,
    pub trials: usize,
    pub seed: u64,
    pub angular_steps: usize,
    pub radial_step: f64,
    pub radial_resolution: f64,
    /// Coverage search limit as a multiple of the building half-extent.
    pub search_factor: f64,
    pub max_iterations: usize,
    pub convergence_window: usize,
    pub power_floor: f64,
}

pub(crate) const TABLE_WALL_SEGMENTS: [(f64, f64); 4] = [(15.0, 0.35), (10.0, 0.30), (7.0, 0.20), (2.0, 0.15)];

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            macro_radius: 580.0,
            femto_distance: 400.0,
            building_kind: BuildingKind::Circle,
            building_radius: 20.0,
            building_width: 20.0,
            building_height: 15.0,
            wall_loss: 10.0,
            wall_segments: TABLE_WALL_SEGMENTS.to_vec(),
            interferer_wall_loss: 10.0,
            initial_radius: 15.0,
            min_distance: 1.0,
            intercept: 37.0,
            delta_p: 0.25,
            femto_max_power: 23.0,
            macro_power: 43.0,
            noise: -96.8,
            femto_exponent: 3.0,
            macro_exponent: 4.0,
            threshold_exponent: 3.0,
            cinr_threshold: -2.6,
            gamma_delta: 0.0,
            users: 10,
            boundary_user: true,
            outdoor_users: 20,
            outdoor_band: 10.0,
            interferers: 50,
            interferer_separation: 50.0,
            neighbors: NeighborList::Macro,
            shadowing: false,
            macro_shadow_sigma: 8.0,
            femto_shadow_sigma: 4.0,
            shadow_sectors: 36,
            trials: 5000,
            seed: 1,
            angular_steps: 360,
            radial_step: 1.0,
            radial_resolution: 0.05,
            search_factor: 3.0,
            max_iterations: 300,
            convergence_window: 8,
            power_floor: -60.0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} must be > 0")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("{name} = {v} must be >= 0")))
    }
}

impl SimConfig {
    /// Rectangular building with four wall types, shadowing on, two users.
    pub fn real_scenario() -> Self {
        SimConfig {
            building_kind: BuildingKind::Rectangle,
            users: 2,
            boundary_user: false,
            shadowing: true,
            ..SimConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("macro_radius", self.macro_radius)?;
        positive("femto_distance", self.femto_distance)?;
        positive("building_radius", self.building_radius)?;
        positive("building_width", self.building_width)?;
        positive("building_height", self.building_height)?;
        non_negative("wall_loss", self.wall_loss)?;
        non_negative("interferer_wall_loss", self.interferer_wall_loss)?;
        positive("min_distance", self.min_distance)?;
        positive("femto_exponent", self.femto_exponent)?;
        positive("macro_exponent", self.macro_exponent)?;
        positive("outdoor_band", self.outdoor_band)?;
        non_negative("interferer_separation", self.interferer_separation)?;
        non_negative("macro_shadow_sigma", self.macro_shadow_sigma)?;
        non_negative("femto_shadow_sigma", self.femto_shadow_sigma)?;
        positive("search_factor", self.search_factor)?;
        for (name, v) in [("intercept", self.intercept), ("femto_max_power", self.femto_max_power), ("macro_power", self.macro_power), ("noise", self.noise)] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument(format!("{name} must be finite")));
            }
        }
        if self.users == 0 {
            return Err(Error::InvalidArgument("users must be >= 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be >= 1".into()));
        }
        if self.shadow_sectors == 0 {
            return Err(Error::InvalidArgument("shadow_sectors must be >= 1".into()));
        }
        if self.femto_distance + self.building().map(|b| b.circumradius())? > self.macro_radius * 3.0 {
            return Err(Error::InvalidArgument("target building lies outside the macro layout".into()));
        }
        self.controller().validate()?;
        self.grid().validate()?;
        Ok(())
    }

    /// Target building centered at the origin.
    pub fn building(&self) -> Result<Building> {
        match self.building_kind {
            BuildingKind::Circle => Building::circle(Point::ORIGIN, self.building_radius, WallLoss::new(self.wall_loss)?),
            BuildingKind::Rectangle => {
                let segments = self
                    .wall_segments
                    .iter()
                    .map(|&(loss, fraction)| Ok(WallSegment { fraction, loss: WallLoss::new(loss)? }))
                    .collect::<Result<Vec<_>>>()?;
                Building::rectangle(Point::ORIGIN, self.building_width, self.building_height, segments)
            }
        }
    }

    pub fn femto_model(&self) -> Result<PathLossModel> {
        PathLossModel::new(self.femto_exponent, self.intercept, self.femto_sigma())
    }

    pub fn macro_model(&self) -> Result<PathLossModel> {
        PathLossModel::new(self.macro_exponent, self.intercept, self.macro_sigma())
    }

    pub(crate) fn femto_sigma(&self) -> f64 {
        if self.shadowing {
            self.femto_shadow_sigma
        } else {
            0.0
        }
    }

    pub(crate) fn macro_sigma(&self) -> f64 {
        if self.shadowing {
            self.macro_shadow_sigma
        } else {
            0.0
        }
    }

    pub fn controller(&self) -> ControllerConfig {
        ControllerConfig {
            delta_p: self.delta_p,
            p_max: PowerDbm::lit(self.femto_max_power),
            r_ini: self.initial_radius,
            gamma_th: self.cinr_threshold,
            gamma_delta: self.gamma_delta,
            threshold_exponent: self.threshold_exponent,
            max_iterations: self.max_iterations,
            convergence_window: self.convergence_window,
            power_floor: PowerDbm::lit(self.power_floor),
        }
    }

    pub fn grid(&self) -> CoverageGrid {
        let half = match self.building_kind {
            BuildingKind::Circle => self.building_radius,
            BuildingKind::Rectangle => 0.5 * self.building_width.max(self.building_height),
        };
        CoverageGrid {
            angular_steps: self.angular_steps,
            radial_step: self.radial_step,
            resolution: self.radial_resolution,
            max_radius: Some(self.search_factor * half),
        }
    }
}
