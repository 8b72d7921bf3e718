//! Other-cell interference around a femtocell site.
//!
//! Interference averaged over users on a circle of radius `D` around the
//! femtocell reduces to a Gauss hypergeometric function,
//!
//! ```text
//! I(D) = sum_i P_i / (A_s L_p) * (D + d_i)^-n * 2F1[1/2, n/2; 1; 4 D d_i / (D + d_i)^2]
//! ```
//!
//! and collapses to the site value `sum_i P_i / (A_s L_p) * d_i^-n` at `D = 0`.

use crate::error::{Error, Result};
use crate::propagation::{dbm_to_linear, linear_to_dbm, PathLossModel, PowerDbm};

const SERIES_TOL: f64 = 1e-15;
const SERIES_MAX_TERMS: usize = 10_000_000;

/// `2F1[a, b; c; z]` by its power series, for `|z| < 1`.
fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..SERIES_MAX_TERMS {
        let k = k as f64;
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() <= SERIES_TOL * sum.abs() {
            break;
        }
    }
    sum
}

/// `2F1[1/2, n/2; 1; z]` for `0 <= z < 1`.
///
/// Above `z = 0.5` the Euler transformation
/// `2F1[a,b;c;z] = (1-z)^(c-a-b) 2F1[c-a,c-b;c;z]` is used; for even `n` the
/// transformed series is a polynomial.
pub fn gauss_2f1_half(n: f64, z: f64) -> Result<f64> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidArgument(format!("exponent {n} must be > 0")));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(Error::HypergeometricDomain(z));
    }
    if z <= 0.5 {
        Ok(hyp2f1_series(0.5, 0.5 * n, 1.0, z))
    } else {
        Ok((1.0 - z).powf(0.5 * (1.0 - n)) * hyp2f1_series(0.5, 1.0 - 0.5 * n, 1.0, z))
    }
}

/// One interfering base station as seen from the femtocell site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interferer {
    /// Distance to the femtocell site, meters.
    pub distance: f64,
    pub power: PowerDbm,
    /// Total penetration loss on the link, dB.
    pub wall_loss_db: f64,
}

/// Interferers sharing one path-loss model.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfererSet {
    interferers: Vec<Interferer>,
    model: PathLossModel,
}

impl InterfererSet {
    pub fn new(interferers: Vec<Interferer>, model: PathLossModel) -> Result<Self> {
        for i in &interferers {
            if !(i.distance.is_finite() && i.distance > 0.0) {
                return Err(Error::InvalidArgument(format!("interferer distance {} must be > 0", i.distance)));
            }
            if !(i.wall_loss_db.is_finite() && i.wall_loss_db >= 0.0) {
                return Err(Error::InvalidArgument(format!("wall loss {} must be >= 0", i.wall_loss_db)));
            }
        }
        Ok(InterfererSet { interferers, model })
    }

    /// `count` identical interferers at distance `d`.
    pub fn homogeneous(count: usize, d: f64, power: PowerDbm, wall_loss_db: f64, model: PathLossModel) -> Result<Self> {
        Self::new(vec![Interferer { distance: d, power, wall_loss_db }; count], model)
    }

    pub fn interferers(&self) -> &[Interferer] {
        &self.interferers
    }

    pub fn model(&self) -> &PathLossModel {
        &self.model
    }

    pub fn is_empty(&self) -> bool {
        self.interferers.is_empty()
    }

    /// `P_lin / (A_s,lin L_p,lin)` of one interferer.
    fn prefactor(&self, i: &Interferer) -> f64 {
        dbm_to_linear(i.power.dbm() - self.model.intercept_db() - i.wall_loss_db)
    }

    pub fn nearest(&self) -> Option<f64> {
        self.interferers.iter().map(|i| i.distance).min_by(f64::total_cmp)
    }

    /// Subset of the interferers, same model.
    pub fn subset(&self, range: std::ops::Range<usize>) -> InterfererSet {
        InterfererSet { interferers: self.interferers[range].to_vec(), model: self.model }
    }
}

/// Interference averaged over a circle of radius `d` around the site, mW.
pub fn ring_avg_interference(d: f64, set: &InterfererSet) -> Result<f64> {
    if !(d.is_finite() && d >= 0.0) {
        return Err(Error::InvalidArgument(format!("ring radius {d} must be >= 0")));
    }
    if let Some(nearest) = set.nearest() {
        if d >= nearest {
            return Err(Error::RingTouchesInterferer { radius: d, nearest });
        }
    }
    let n = set.model.exponent();
    set.interferers
        .iter()
        .map(|i| {
            let s = d + i.distance;
            let z = 4.0 * d * i.distance / (s * s);
            Ok(set.prefactor(i) * s.powf(-n) * gauss_2f1_half(n, z)?)
        })
        .sum()
}

/// Interference received at the femtocell site, mW.
pub fn interference_at_bs(set: &InterfererSet) -> f64 {
    let n = set.model.exponent();
    set.interferers.iter().map(|i| set.prefactor(i) * i.distance.powf(-n)).sum()
}

/// `10 log10(I + W)` in dBm.
pub fn interference_plus_noise_dbm(i_mw: f64, noise: PowerDbm) -> Result<PowerDbm> {
    if !(i_mw.is_finite() && i_mw >= 0.0) {
        return Err(Error::InvalidArgument(format!("interference {i_mw} mW must be >= 0")));
    }
    PowerDbm::new(linear_to_dbm(i_mw + noise.to_milliwatts())?)
}

/// Ring-average (`U`) and site (`B`) coefficients of `D^-n` for interferers at `ratio * D`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UbEntry {
    pub exponent: f64,
    pub ratio: f64,
    pub u: f64,
    pub b: f64,
}

impl UbEntry {
    pub fn ratio_u_over_b(&self) -> f64 {
        self.u / self.b
    }
}

/// `U`/`B` coefficients for a single interferer at `ratio * D`.
pub fn ub_entry(exponent: f64, ratio: f64) -> Result<UbEntry> {
    if !(ratio > 1.0) {
        return Err(Error::InvalidArgument(format!("distance ratio {ratio} must exceed 1")));
    }
    let s = 1.0 + ratio;
    let u = s.powf(-exponent) * gauss_2f1_half(exponent, 4.0 * ratio / (s * s))?;
    Ok(UbEntry { exponent, ratio, u, b: ratio.powf(-exponent) })
}

/// The six `(n, d_b/D)` cases for `n in {2, 4}` and ratios `{2, 3, 4}`.
pub fn ub_table() -> Vec<UbEntry> {
    [2.0, 4.0]
        .into_iter()
        .flat_map(|n| [2.0, 3.0, 4.0].into_iter().map(move |r| ub_entry(n, r).expect("valid table entry")))
        .collect()
}
