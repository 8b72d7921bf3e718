use rand::Rng;

use super::config::SimConfig;
use super::scenario::{generate_environment, generate_users, Environment};
use crate::error::{Error, Result};
use crate::geometry::{CoverageProfile, RadialProfile, UserSet};
use crate::powerctrl::{initial_power, operating_power, run_controller, ControllerConfig, ControllerState};
use crate::propagation::PowerDbm;

/// Per-trial contribution to the leakage and coverage metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub leaked: bool,
    /// Azimuthal mean of the coverage overshoot beyond the wall, meters.
    pub leakage_distance: f64,
    /// Largest overshoot at any azimuth, meters.
    pub max_leakage_distance: f64,
    pub indoor_coverage_fraction: f64,
    pub iterations_used: usize,
    pub final_p_f: PowerDbm,
    pub converged: bool,
    /// Outdoor users inside the femtocell coverage.
    pub outdoor_covered: usize,
}

/// Controller and coverage evaluation on one fixed environment.
///
/// The coverage table is built once, so several controller settings or
/// user sets can be evaluated on the same drop cheaply.
pub struct DropEvaluator<'e> {
    env: &'e Environment,
    profile: CoverageProfile<'e>,
    z: PowerDbm,
    i_b_max: PowerDbm,
}

impl<'e> DropEvaluator<'e> {
    pub fn new(env: &'e Environment, cfg: &SimConfig) -> Result<Self> {
        let profile = CoverageProfile::build(env.radio_map()?, &cfg.grid())?;
        Ok(DropEvaluator {
            env,
            profile,
            z: env.site_interference_plus_noise()?,
            i_b_max: env.strongest_neighbor()?,
        })
    }

    /// `Z_u(0)`.
    pub fn interference_plus_noise(&self) -> PowerDbm {
        self.z
    }

    pub fn profile(&self) -> &CoverageProfile<'e> {
        &self.profile
    }

    /// Mean path, wall and shadowing loss from the femtocell to the users, dB.
    fn mean_user_loss(&self, users: &UserSet) -> Result<f64> {
        if users.indoor.is_empty() {
            return Err(Error::InvalidArgument("no indoor users".into()));
        }
        let map = self.profile.map();
        let c = self.env.building.center();
        let total: f64 = users
            .indoor
            .iter()
            .map(|&u| map.serving_loss_db(u, map.shadow().sector_of(u.azimuth_from(c))))
            .sum();
        Ok(total / users.indoor.len() as f64)
    }

    /// Runs the controller with the users' averaged reports. A run that
    /// falls through the power floor comes back unconverged.
    pub fn control(&self, ctl: &ControllerConfig, users: &UserSet) -> Result<ControllerState> {
        let loss = self.mean_user_loss(users)?;
        let p_ini = initial_power(self.i_b_max, ctl.r_ini, &self.env.femto_model, ctl.p_max)?;
        let z = self.z.dbm();
        match run_controller(ctl, p_ini, |p| Ok(p.dbm() - loss - z)) {
            Err(Error::PowerFloor { power, .. }) => Ok(ControllerState {
                p_f: PowerDbm::new(power)?,
                iteration: ctl.max_iterations,
                gamma_history: Vec::new(),
                power_history: Vec::new(),
                converged: false,
            }),
            other => other,
        }
    }

    pub fn boundary(&self, p_f: PowerDbm) -> RadialProfile {
        self.profile.boundary(p_f)
    }

    pub fn evaluate(&self, ctl: &ControllerConfig, users: &UserSet) -> Result<TrialOutcome> {
        let state = self.control(ctl, users)?;
        let p = operating_power(&state);
        let b = self.boundary(p);
        let c = self.env.building.center();
        let leakage_distance = b.mean_excess();
        Ok(TrialOutcome {
            leaked: leakage_distance > 0.0,
            leakage_distance,
            max_leakage_distance: b.max_excess(),
            indoor_coverage_fraction: b.indoor_fraction(),
            iterations_used: state.iteration,
            final_p_f: p,
            converged: state.converged,
            outdoor_covered: users.outdoor.iter().filter(|&&u| b.covers(c, u)).count(),
        })
    }
}

/// One full trial: drop, controller, coverage.
pub fn run_trial<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<TrialOutcome> {
    let env = generate_environment(cfg, rng)?;
    let users = generate_users(cfg, cfg.users, &env.building, rng)?;
    DropEvaluator::new(&env, cfg)?.evaluate(&cfg.controller(), &users)
}

/// One controller iteration as seen from outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub p_f: f64,
    pub gamma: f64,
    /// Azimuthal mean coverage radius at this power, meters.
    pub r_f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerTrace {
    pub rows: Vec<TraceRow>,
    pub converged: bool,
    /// Azimuthal mean wall distance, meters.
    pub wall: f64,
    pub threshold: f64,
}

/// Iteration-by-iteration record of a single trial.
pub fn trace_controller<R: Rng + ?Sized>(cfg: &SimConfig, rng: &mut R) -> Result<ControllerTrace> {
    let env = generate_environment(cfg, rng)?;
    let users = generate_users(cfg, cfg.users, &env.building, rng)?;
    let eval = DropEvaluator::new(&env, cfg)?;
    let ctl = cfg.controller();
    let state = eval.control(&ctl, &users)?;
    let rows = state
        .power_history
        .iter()
        .zip(&state.gamma_history)
        .enumerate()
        .map(|(i, (&p, &gamma))| {
            let b = eval.boundary(PowerDbm::new(p)?);
            Ok(TraceRow { iteration: i, p_f: p, gamma, r_f: b.mean_radius() })
        })
        .collect::<Result<Vec<_>>>()?;
    let walls = eval.boundary(ctl.p_max).walls;
    Ok(ControllerTrace {
        rows,
        converged: state.converged,
        wall: walls.iter().sum::<f64>() / walls.len() as f64,
        threshold: ctl.threshold(),
    })
}
