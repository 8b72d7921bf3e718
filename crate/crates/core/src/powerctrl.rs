//! Distributed pilot-power control at the femtocell.
//!
//! The femtocell starts from a power that covers `r_ini` against the
//! strongest neighbor, then steps by `delta_p` each iteration: up when the
//! decision variable `Gamma = Q_bar - Z_u(0)` is at or below the threshold
//! `Gamma_0 + Gamma_delta`, down otherwise. Power never exceeds `P_max`.

use std::f64::consts::LN_10;

use crate::error::{Error, Result};
use crate::propagation::{PathLossModel, PowerDbm};

/// Controller parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    /// Step size `delta_P`, dB.
    pub delta_p: f64,
    pub p_max: PowerDbm,
    /// Initial coverage radius `r_ini`, meters.
    pub r_ini: f64,
    /// CINR threshold `gamma_th`, dB.
    pub gamma_th: f64,
    /// Extra margin `Gamma_delta` added to `Gamma_0`, dB.
    pub gamma_delta: f64,
    /// Path-loss exponent `n_e` assumed when computing `Gamma_0`.
    pub threshold_exponent: f64,
    pub max_iterations: usize,
    /// Number of trailing iterations inspected for convergence.
    pub convergence_window: usize,
    /// Power below which the run is aborted.
    pub power_floor: PowerDbm,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        ControllerConfig {
            delta_p: 0.25,
            p_max: PowerDbm::lit(23.0),
            r_ini: 15.0,
            gamma_th: -2.6,
            gamma_delta: 0.0,
            threshold_exponent: 3.0,
            max_iterations: 300,
            convergence_window: 8,
            power_floor: PowerDbm::lit(-60.0),
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.delta_p.is_finite() && self.delta_p > 0.0) {
            return bad(format!("power step {} dB must be > 0", self.delta_p));
        }
        if !(self.gamma_delta.is_finite() && self.gamma_delta >= 0.0) {
            return bad(format!("threshold margin {} dB must be >= 0", self.gamma_delta));
        }
        if !(self.r_ini.is_finite() && self.r_ini > 0.0) {
            return bad(format!("initial radius {} m must be > 0", self.r_ini));
        }
        if !(self.threshold_exponent.is_finite() && self.threshold_exponent > 0.0) {
            return bad(format!("threshold exponent {} must be > 0", self.threshold_exponent));
        }
        if !self.gamma_th.is_finite() {
            return bad("CINR threshold must be finite".into());
        }
        if self.convergence_window < 4 {
            return bad(format!("convergence window {} must be >= 4", self.convergence_window));
        }
        if self.max_iterations < self.convergence_window {
            return bad(format!(
                "iteration limit {} is shorter than the convergence window {}",
                self.max_iterations, self.convergence_window
            ));
        }
        if self.power_floor.dbm() >= self.p_max.dbm() {
            return bad("power floor must be below the maximum power".into());
        }
        Ok(())
    }

    /// `Gamma_th = Gamma_0(n_e) + Gamma_delta`.
    pub fn threshold(&self) -> f64 {
        gamma_zero(self.threshold_exponent, self.gamma_th) + self.gamma_delta
    }
}

/// Controller state after some number of iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    /// Power used for the next measurement.
    pub p_f: PowerDbm,
    pub iteration: usize,
    /// Decision variable measured at each iteration.
    pub gamma_history: Vec<f64>,
    /// Power in effect at each iteration.
    pub power_history: Vec<f64>,
    pub converged: bool,
}

impl ControllerState {
    pub fn new(p_ini: PowerDbm) -> Self {
        ControllerState { p_f: p_ini, iteration: 0, gamma_history: Vec::new(), power_history: Vec::new(), converged: false }
    }
}

/// Initial pilot power `min(I_b,max + L(r_ini), P_max)`.
pub fn initial_power(i_b_max: PowerDbm, r_ini: f64, model: &PathLossModel, p_max: PowerDbm) -> Result<PowerDbm> {
    let want = i_b_max.dbm() + model.path_loss(r_ini)?;
    Ok(PowerDbm::lit(want.min(p_max.dbm())))
}

/// `Gamma_0 = 5 n / ln 10 + gamma_th`.
pub fn gamma_zero(n: f64, gamma_th: f64) -> f64 {
    5.0 * n / LN_10 + gamma_th
}

/// Largest margin that keeps the coverage inside the building,
/// `I_max(r_b) + 2 L_p - gamma_th - Z_bar(r_b)`.
pub fn gamma_delta_max(i_max_rb: PowerDbm, wall_loss_db: f64, gamma_th: f64, z_rb: PowerDbm) -> f64 {
    i_max_rb.dbm() + 2.0 * wall_loss_db - gamma_th - z_rb.dbm()
}

/// `Gamma = Q_bar - Z_u(0)`.
pub fn decision_variable(q_bar: PowerDbm, z_u0: PowerDbm) -> f64 {
    q_bar.dbm() - z_u0.dbm()
}

/// Mean of the users' reported pilot powers, dB domain.
pub fn average_pilot(q: &[PowerDbm]) -> Result<PowerDbm> {
    if q.is_empty() {
        return Err(Error::InvalidArgument("no user reports".into()));
    }
    PowerDbm::new(q.iter().map(|p| p.dbm()).sum::<f64>() / q.len() as f64)
}

/// One controller step: record `gamma` measured at `state.p_f` and move the power.
pub fn update_power(mut state: ControllerState, gamma: f64, cfg: &ControllerConfig) -> ControllerState {
    let p = state.p_f.dbm();
    state.power_history.push(p);
    state.gamma_history.push(gamma);
    state.iteration += 1;
    let next = if gamma <= cfg.threshold() { p + cfg.delta_p } else { p - cfg.delta_p };
    state.p_f = PowerDbm::lit(next.min(cfg.p_max.dbm()));
    state.converged = is_converged(&state.power_history, cfg.convergence_window, cfg.delta_p);
    state
}

/// True once the last `window` powers either alternate up/down inside a
/// `2 delta_p` band or sit still at the cap.
pub fn is_converged(powers: &[f64], window: usize, delta_p: f64) -> bool {
    if window < 2 || powers.len() < window {
        return false;
    }
    let tail = &powers[powers.len() - window..];
    let tol = 1e-9 * delta_p.max(1.0);
    let (lo, hi) = tail.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &p| (l.min(p), h.max(p)));
    if hi - lo > 2.0 * delta_p + tol {
        return false;
    }
    let steps: Vec<f64> = tail.windows(2).map(|w| w[1] - w[0]).collect();
    if steps.iter().all(|s| s.abs() <= tol) {
        return true;
    }
    steps.iter().all(|s| s.abs() > tol) && steps.windows(2).all(|w| w[0] * w[1] < 0.0)
}

/// Runs the controller from `p_ini`; `measure(P_f)` returns `Gamma` at that power.
///
/// Stops on convergence or after `max_iterations`; the returned state has
/// `converged == false` in the latter case.
pub fn run_controller<F>(cfg: &ControllerConfig, p_ini: PowerDbm, mut measure: F) -> Result<ControllerState>
where
    F: FnMut(PowerDbm) -> Result<f64>,
{
    cfg.validate()?;
    let mut state = ControllerState::new(PowerDbm::lit(p_ini.dbm().min(cfg.p_max.dbm())));
    while !state.converged && state.iteration < cfg.max_iterations {
        if state.p_f.dbm() < cfg.power_floor.dbm() {
            return Err(Error::PowerFloor { power: state.p_f.dbm(), floor: cfg.power_floor.dbm() });
        }
        let gamma = measure(state.p_f)?;
        state = update_power(state, gamma, cfg);
    }
    Ok(state)
}

/// Steady-state power of a run: the midpoint of the final oscillation pair,
/// the cap when saturated, or the current power when not converged.
pub fn operating_power(state: &ControllerState) -> PowerDbm {
    match state.power_history.as_slice() {
        [.., a, b] if state.converged => PowerDbm::lit(0.5 * (a + b)),
        _ => state.p_f,
    }
}

/// Decision variable as a function of coverage radius for users uniform on
/// the annulus `eps0 <= d <= r_f`, at the edge of coverage.
pub fn gamma_of_radius(r_f: f64, eps0: f64, n: f64, gamma_th: f64) -> Result<f64> {
    if !(eps0 > 0.0 && r_f > eps0) {
        return Err(Error::InvalidArgument(format!("need 0 < eps0 < r_f, got eps0 {eps0}, r_f {r_f}")));
    }
    let e2 = eps0 * eps0;
    Ok(gamma_zero(n, gamma_th) - 10.0 * n * e2 / (r_f * r_f - e2) * (r_f / eps0).log10())
}

/// Expected next decision variable once the power oscillates around the threshold.
pub fn post_convergence_recurrence(gamma_prev: f64, gamma_th: f64, delta_p: f64) -> f64 {
    if gamma_prev <= gamma_th {
        gamma_prev + delta_p
    } else {
        gamma_prev - delta_p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg() -> ControllerConfig {
        ControllerConfig::default()
    }

    #[test]
    fn initial_power_examples() {
        let m = PathLossModel::deterministic(3.0, 37.0).unwrap();
        let p = initial_power(PowerDbm::lit(-80.0), 15.0, &m, PowerDbm::lit(23.0)).unwrap();
        assert!((p.dbm() + 7.7173).abs() < 1e-4);
        let p = initial_power(PowerDbm::lit(-10.0), 15.0, &m, PowerDbm::lit(23.0)).unwrap();
        assert_eq!(p.dbm(), 23.0);
        assert!(initial_power(PowerDbm::lit(-80.0), 0.5, &m, PowerDbm::lit(23.0)).is_err());
    }

    #[test]
    fn threshold_constants() {
        assert!((gamma_zero(3.0, -2.6) - 3.9144).abs() < 1e-4);
        let c = ControllerConfig { gamma_delta: 1.5, ..cfg() };
        assert!((c.threshold() - 5.4144).abs() < 1e-4);
        assert!((gamma_delta_max(PowerDbm::lit(-70.0), 10.0, -2.6, PowerDbm::lit(-96.8)) - 49.4).abs() < 1e-9);
    }

    #[test]
    fn update_rule_examples() {
        let c = cfg();
        let s = update_power(ControllerState::new(PowerDbm::lit(10.0)), 3.0, &c);
        assert_eq!(s.p_f.dbm(), 10.25);
        let s = update_power(ControllerState::new(PowerDbm::lit(10.0)), 5.0, &c);
        assert_eq!(s.p_f.dbm(), 9.75);
        let s = update_power(ControllerState::new(PowerDbm::lit(22.9)), 3.0, &c);
        assert_eq!(s.p_f.dbm(), 23.0);
        // tie goes up
        let s = update_power(ControllerState::new(PowerDbm::lit(0.0)), c.threshold(), &c);
        assert_eq!(s.p_f.dbm(), 0.25);
        assert_eq!((s.iteration, s.gamma_history.len(), s.power_history.len()), (1, 1, 1));
    }

    #[test]
    fn averages_reports() {
        let q = [PowerDbm::lit(-70.0), PowerDbm::lit(-80.0)];
        assert_eq!(average_pilot(&q).unwrap().dbm(), -75.0);
        assert_eq!(average_pilot(&q[..1]).unwrap().dbm(), -70.0);
        assert!(average_pilot(&[]).is_err());
        assert!((decision_variable(PowerDbm::lit(-75.0), PowerDbm::lit(-96.8)) - 21.8).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(cfg().validate().is_ok());
        assert!(ControllerConfig { delta_p: 0.0, ..cfg() }.validate().is_err());
        assert!(ControllerConfig { gamma_delta: -1.0, ..cfg() }.validate().is_err());
        assert!(ControllerConfig { r_ini: 0.0, ..cfg() }.validate().is_err());
        assert!(ControllerConfig { convergence_window: 3, ..cfg() }.validate().is_err());
        assert!(ControllerConfig { max_iterations: 5, ..cfg() }.validate().is_err());
    }

    #[test]
    fn gamma_of_radius_examples() {
        let g = gamma_of_radius(20.0, 1.0, 3.0, -2.6).unwrap();
        assert!((g - 3.816).abs() < 1e-3, "{g}");
        let g = gamma_of_radius(2.0, 1.0, 3.0, -2.6).unwrap();
        assert!((g - 0.904).abs() < 1e-3, "{g}");
        let g = gamma_of_radius(1e6, 1.0, 3.0, -2.6).unwrap();
        assert!((g - gamma_zero(3.0, -2.6)).abs() < 1e-9);
        assert!(gamma_of_radius(1.0, 1.0, 3.0, -2.6).is_err());
    }

    #[test]
    fn recurrence_steps_toward_threshold() {
        assert_eq!(post_convergence_recurrence(3.0, 3.9144, 0.25), 3.25);
        assert_eq!(post_convergence_recurrence(4.0, 3.9144, 0.25), 3.75);
        assert_eq!(post_convergence_recurrence(3.9144, 3.9144, 0.25), 3.9144 + 0.25);
    }

    #[test]
    fn convergence_detection() {
        let osc = [1.0, 1.25, 1.5, 1.25, 1.5, 1.25, 1.5, 1.25, 1.5];
        assert!(is_converged(&osc, 8, 0.25));
        assert!(!is_converged(&osc[..7], 8, 0.25));
        let ramp: Vec<f64> = (0..10).map(|i| i as f64 * 0.25).collect();
        assert!(!is_converged(&ramp, 8, 0.25));
        assert!(is_converged(&[23.0; 8], 8, 0.25));
    }

    #[test]
    fn controller_settles_on_linear_plant() {
        // Gamma rises one-for-one with power; threshold crossing at 4.9144 dBm
        let c = cfg();
        let s = run_controller(&c, PowerDbm::lit(-5.0), |p| Ok(p.dbm() - 1.0)).unwrap();
        assert!(s.converged);
        assert_eq!(s.gamma_history.len(), s.iteration);
        let op = operating_power(&s).dbm();
        assert!((op - (c.threshold() + 1.0)).abs() <= c.delta_p, "{op}");
    }

    #[test]
    fn controller_saturates_at_cap() {
        let s = run_controller(&cfg(), PowerDbm::lit(20.0), |_| Ok(-50.0)).unwrap();
        assert!(s.converged);
        assert_eq!(operating_power(&s).dbm(), 23.0);
    }

    #[test]
    fn controller_hits_floor() {
        let c = ControllerConfig { power_floor: PowerDbm::lit(-1.0), ..cfg() };
        let r = run_controller(&c, PowerDbm::lit(0.0), |_| Ok(100.0));
        assert!(matches!(r, Err(Error::PowerFloor { .. })));
    }

    #[test]
    fn controller_reports_non_convergence() {
        let c = ControllerConfig { max_iterations: 20, ..cfg() };
        let s = run_controller(&c, PowerDbm::lit(-30.0), |p| Ok(p.dbm() - 1.0)).unwrap();
        assert!(!s.converged);
        assert_eq!(s.iteration, 20);
        assert_eq!(operating_power(&s), s.p_f);
    }

    proptest! {
        #[test]
        fn steps_are_bounded_and_capped(p in -50.0f64..23.0, gamma in -20.0f64..20.0, dp in 0.01f64..3.0) {
            let c = ControllerConfig { delta_p: dp, ..cfg() };
            let s = update_power(ControllerState::new(PowerDbm::lit(p)), gamma, &c);
            prop_assert!(s.p_f.dbm() <= 23.0);
            prop_assert!((s.p_f.dbm() - p).abs() <= dp + 1e-12);
        }

        #[test]
        fn gamma_of_radius_increases_to_gamma_zero(r in 1.5f64..1000.0, dr in 0.1f64..50.0, n in 2.0f64..5.0) {
            let a = gamma_of_radius(r, 1.0, n, -2.6).unwrap();
            let b = gamma_of_radius(r + dr, 1.0, n, -2.6).unwrap();
            prop_assert!(a < b && b < gamma_zero(n, -2.6));
        }

        #[test]
        fn recurrence_stays_in_band(start in -10.0f64..10.0, th in -5.0f64..5.0, dp in 0.1f64..2.0) {
            let mut g = start;
            let mut settled = false;
            for _ in 0..400 {
                g = post_convergence_recurrence(g, th, dp);
                if settled {
                    prop_assert!(g > th - dp - 1e-9 && g <= th + dp + 1e-9);
                }
                settled |= (g - th).abs() <= dp;
            }
            prop_assert!(settled);
        }
    }
}
