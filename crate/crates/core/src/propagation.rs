//! Log-distance path loss, wall penetration and log-normal shadowing.
//!
//! Every loss is expressed in dB and every power in dBm; conversion to the
//! linear domain (milliwatts) only happens where powers must be summed.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Reference distance of the log-distance model, in meters.
pub const REFERENCE_DISTANCE_M: f64 = 1.0;

/// A finite power level in dBm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct PowerDbm(f64);

impl PowerDbm {
    pub fn new(dbm: f64) -> Result<Self> {
        if dbm.is_finite() {
            Ok(PowerDbm(dbm))
        } else {
            Err(Error::InvalidArgument(format!("power {dbm} dBm is not finite")))
        }
    }

    /// Caller guarantees `dbm` is finite.
    #[inline]
    pub(crate) const fn lit(dbm: f64) -> Self {
        PowerDbm(dbm)
    }

    #[inline]
    pub fn dbm(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn to_milliwatts(self) -> f64 {
        dbm_to_linear(self.0)
    }

    pub fn from_milliwatts(mw: f64) -> Result<Self> {
        linear_to_dbm(mw).map(PowerDbm)
    }

    /// Offset by a dB amount.
    #[inline]
    pub fn offset(self, db: f64) -> Self {
        PowerDbm(self.0 + db)
    }
}

impl std::fmt::Display for PowerDbm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} dBm", self.0)
    }
}

/// Penetration loss of one wall, in dB.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct WallLoss(f64);

impl WallLoss {
    pub fn new(db: f64) -> Result<Self> {
        if db.is_finite() && db >= 0.0 {
            Ok(WallLoss(db))
        } else {
            Err(Error::InvalidArgument(format!("wall loss {db} dB must be finite and >= 0")))
        }
    }

    #[inline]
    pub fn db(self) -> f64 {
        self.0
    }
}

/// `L(d) = A_s + 10 n log10(d / d_s)` with `d_s = 1 m`, plus an optional
/// zero-mean log-normal shadowing term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossModel {
    exponent: f64,
    intercept_db: f64,
    shadow_sigma_db: f64,
}

impl PathLossModel {
    pub fn new(exponent: f64, intercept_db: f64, shadow_sigma_db: f64) -> Result<Self> {
        if !(exponent.is_finite() && exponent > 0.0) {
            return Err(Error::InvalidArgument(format!("path-loss exponent {exponent} must be > 0")));
        }
        if !(intercept_db.is_finite() && intercept_db >= 0.0) {
            return Err(Error::InvalidArgument(format!("intercept {intercept_db} dB must be >= 0")));
        }
        if !(shadow_sigma_db.is_finite() && shadow_sigma_db >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "shadowing sigma {shadow_sigma_db} dB must be >= 0"
            )));
        }
        Ok(PathLossModel { exponent, intercept_db, shadow_sigma_db })
    }

    /// Model without shadowing.
    pub fn deterministic(exponent: f64, intercept_db: f64) -> Result<Self> {
        Self::new(exponent, intercept_db, 0.0)
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn intercept_db(&self) -> f64 {
        self.intercept_db
    }

    pub fn shadow_sigma_db(&self) -> f64 {
        self.shadow_sigma_db
    }

    pub fn with_shadowing(self, sigma_db: f64) -> Result<Self> {
        Self::new(self.exponent, self.intercept_db, sigma_db)
    }

    pub fn with_exponent(self, exponent: f64) -> Result<Self> {
        Self::new(exponent, self.intercept_db, self.shadow_sigma_db)
    }

    /// Path loss in dB at distance `d` meters.
    pub fn path_loss(&self, d: f64) -> Result<f64> {
        if !d.is_finite() || d < REFERENCE_DISTANCE_M {
            return Err(Error::DistanceBelowReference { distance: d, reference: REFERENCE_DISTANCE_M });
        }
        Ok(self.path_loss_unchecked(d))
    }

    /// Path loss without the distance check; callers guarantee `d >= 1`.
    #[inline]
    pub(crate) fn path_loss_unchecked(&self, d: f64) -> f64 {
        self.intercept_db + 10.0 * self.exponent * (d / REFERENCE_DISTANCE_M).log10()
    }

    /// One shadowing realization in dB (0 when shadowing is disabled).
    pub fn sample_shadowing<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        sample_shadowing(self, rng)
    }
}

/// Path loss in dB; see [`PathLossModel::path_loss`].
pub fn path_loss(d: f64, model: &PathLossModel) -> Result<f64> {
    model.path_loss(d)
}

#[inline]
pub fn dbm_to_linear(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn linear_to_dbm(mw: f64) -> Result<f64> {
    if mw.is_finite() && mw > 0.0 {
        Ok(10.0 * mw.log10())
    } else {
        Err(Error::NonPositivePower(mw))
    }
}

/// Zero-mean normal sample (in dB) with the model's shadowing sigma.
pub fn sample_shadowing<R: Rng + ?Sized>(model: &PathLossModel, rng: &mut R) -> f64 {
    if model.shadow_sigma_db == 0.0 {
        return 0.0;
    }
    // sigma was validated finite and positive
    Normal::new(0.0, model.shadow_sigma_db).expect("valid sigma").sample(rng)
}

/// `tx - L(d) - sum(walls) - shadow`.
pub fn received_power(
    tx: PowerDbm,
    d: f64,
    model: &PathLossModel,
    walls: &[WallLoss],
    shadow_db: f64,
) -> Result<PowerDbm> {
    let wall_db: f64 = walls.iter().map(|w| w.db()).sum();
    PowerDbm::new(tx.dbm() - model.path_loss(d)? - wall_db - shadow_db)
}
