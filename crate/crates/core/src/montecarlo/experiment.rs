use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{BuildingKind, SimConfig};
use super::scenario::{generate_environment, generate_users};
use super::trial::{run_trial, DropEvaluator, TrialOutcome};
use crate::error::{Error, Result};
use crate::geometry::{hex_layout, Point, RadioMap, ShadowField, Transmitter};
use crate::interference::{interference_plus_noise_dbm, ring_avg_interference, Interferer, InterfererSet};
use crate::powerctrl::gamma_delta_max;
use crate::propagation::{PathLossModel, PowerDbm};

const Z95: f64 = 1.959963984540054;

/// Generator for trial `index` of an experiment seeded with `seed`.
///
/// Every trial owns a separate stream, so results do not depend on how
/// trials are scheduled across threads.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Aggregated leakage and coverage metrics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub trials: usize,
    /// Trials dropped for not converging.
    pub excluded: usize,
    pub hk: f64,
    pub hk_ci: f64,
    pub omega: f64,
    pub omega_ci: f64,
    pub psi: f64,
    pub psi_ci: f64,
    /// Mean of the per-trial largest overshoot, meters.
    pub max_leakage_mean: f64,
    pub outdoor_covered_mean: f64,
    pub mean_iterations: f64,
}

fn mean_ci(xs: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = xs.clone().sum::<f64>() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (nf - 1.0);
    (mean, Z95 * (var / nf).sqrt())
}

/// Folds trial outcomes into metrics, skipping unconverged trials.
pub fn aggregate(outcomes: &[TrialOutcome]) -> Result<Metrics> {
    let used: Vec<&TrialOutcome> = outcomes.iter().filter(|o| o.converged).collect();
    if used.is_empty() {
        return Err(Error::AllTrialsNonConvergent(outcomes.len()));
    }
    let n = used.len();
    let nf = n as f64;
    let hk = used.iter().filter(|o| o.leaked).count() as f64 / nf;
    let (omega, omega_ci) = mean_ci(used.iter().map(|o| o.leakage_distance), n);
    let (psi, psi_ci) = mean_ci(used.iter().map(|o| o.indoor_coverage_fraction), n);
    Ok(Metrics {
        trials: outcomes.len(),
        excluded: outcomes.len() - n,
        hk,
        hk_ci: Z95 * (hk * (1.0 - hk) / nf).sqrt(),
        omega,
        omega_ci,
        psi,
        psi_ci,
        max_leakage_mean: used.iter().map(|o| o.max_leakage_distance).sum::<f64>() / nf,
        outdoor_covered_mean: used.iter().map(|o| o.outdoor_covered as f64).sum::<f64>() / nf,
        mean_iterations: used.iter().map(|o| o.iterations_used as f64).sum::<f64>() / nf,
    })
}

/// Outcomes of `trials` independent trials, in trial order.
///
/// Runs on the current rayon pool; install a sized pool to bound parallelism.
pub fn run_trials(cfg: &SimConfig, trials: usize) -> Result<Vec<TrialOutcome>> {
    cfg.validate()?;
    (0..trials as u64).into_par_iter().map(|t| run_trial(cfg, &mut trial_rng(cfg.seed, t))).collect()
}

pub fn run_experiment(cfg: &SimConfig, trials: usize) -> Result<Metrics> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    aggregate(&run_trials(cfg, trials)?)
}

/// Settings that may vary between points of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub users: usize,
    pub gamma_delta: f64,
    pub threshold_exponent: f64,
}

impl SweepPoint {
    pub fn apply(&self, cfg: &SimConfig) -> SimConfig {
        SimConfig { users: self.users, gamma_delta: self.gamma_delta, threshold_exponent: self.threshold_exponent, ..cfg.clone() }
    }
}

/// Outcomes for every sweep point, indexed `[point][trial]`.
///
/// Each trial's drop is generated once and shared by all points; the user
/// draw is replayed per user count. The outcomes equal those of
/// [`run_trials`] on `point.apply(cfg)`.
pub fn run_sweep(cfg: &SimConfig, points: &[SweepPoint], trials: usize) -> Result<Vec<Vec<TrialOutcome>>> {
    for p in points {
        p.apply(cfg).validate()?;
    }
    let mut counts: Vec<usize> = Vec::new();
    for p in points {
        if !counts.contains(&p.users) {
            counts.push(p.users);
        }
    }
    let per_trial: Vec<Vec<TrialOutcome>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(cfg.seed, t);
            let env = generate_environment(cfg, &mut rng)?;
            let eval = DropEvaluator::new(&env, cfg)?;
            let mut out = vec![None; points.len()];
            for &k in &counts {
                let users = generate_users(cfg, k, &env.building, &mut rng.clone())?;
                for (i, p) in points.iter().enumerate().filter(|(_, p)| p.users == k) {
                    out[i] = Some(eval.evaluate(&p.apply(cfg).controller(), &users)?);
                }
            }
            Ok(out.into_iter().map(|o| o.expect("every point evaluated")).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..points.len()).map(|i| per_trial.iter().map(|row| row[i]).collect()).collect())
}

/// Maximum threshold margin of the circular building and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaDeltaMaxReport {
    /// Mean over target azimuths, dB.
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    /// Weakest strongest-macro pilot just inside the wall, averaged over target azimuths.
    pub i_max_rb: f64,
    /// Ring-averaged interference plus noise on the wall, averaged over target azimuths.
    pub z_rb: f64,
    pub target_azimuths: usize,
}

/// `Gamma_delta_max` for the circular building, with macro interference only
/// and no shadowing, averaged over the target's azimuth around the center site.
pub fn reference_gamma_delta_max(cfg: &SimConfig, target_azimuths: usize) -> Result<GammaDeltaMaxReport> {
    if cfg.building_kind != BuildingKind::Circle {
        return Err(Error::InvalidArgument("reference margin needs a circular building".into()));
    }
    if target_azimuths == 0 {
        return Err(Error::InvalidArgument("need at least one target azimuth".into()));
    }
    let macro_model = PathLossModel::deterministic(cfg.macro_exponent, cfg.intercept)?;
    let femto_model = PathLossModel::deterministic(cfg.femto_exponent, cfg.intercept)?;
    let power = PowerDbm::new(cfg.macro_power)?;
    let noise = PowerDbm::new(cfg.noise)?;
    let sites = hex_layout(cfg.macro_radius)?;
    let macros: Vec<Transmitter> = sites
        .iter()
        .map(|&position| Transmitter { position, power, model: macro_model, fixed_loss_db: 0.0 })
        .collect();
    let shadow = ShadowField::none(macros.len() + 1);
    let rb = cfg.building_radius;
    let wall_points = cfg.angular_steps.max(8);

    let (mut sum, mut lo, mut hi, mut i_sum, mut z_sum) = (0.0, f64::INFINITY, f64::NEG_INFINITY, 0.0, 0.0);
    for a in 0..target_azimuths {
        let target = Point::polar(cfg.femto_distance, std::f64::consts::TAU * a as f64 / target_azimuths as f64);
        let building = cfg.building()?.at(target);
        let map = RadioMap::new(&building, femto_model, &macros, &shadow, cfg.min_distance.max(1.0))?;
        let i_max = (0..wall_points)
            .map(|k| {
                let p = target + Point::polar(rb, std::f64::consts::TAU * k as f64 / wall_points as f64);
                map.strongest_competitor_dbm(p)
            })
            .fold(f64::INFINITY, f64::min);
        let set = InterfererSet::new(
            sites.iter().map(|s| Interferer { distance: s.distance(target), power, wall_loss_db: cfg.wall_loss }).collect(),
            macro_model,
        )?;
        let z = interference_plus_noise_dbm(ring_avg_interference(rb, &set)?, noise)?;
        let g = gamma_delta_max(PowerDbm::new(i_max)?, cfg.wall_loss, cfg.cinr_threshold, z);
        sum += g;
        lo = lo.min(g);
        hi = hi.max(g);
        i_sum += i_max;
        z_sum += z.dbm();
    }
    let n = target_azimuths as f64;
    Ok(GammaDeltaMaxReport { mean: sum / n, min: lo, max: hi, i_max_rb: i_sum / n, z_rb: z_sum / n, target_azimuths })
}
