//! Closed-form statistics of the received pilot and of coverage leakage.
//!
//! Users are uniform on the annulus `eps0 <= d <= r_f` around the femtocell,
//! without shadowing. With `K` users, one on the wall, the averaged report
//! exceeds the edge user's by `Y = sum_k X_k`, where each `X_k` is
//! approximately exponential with rate `lambda_1 = K ln 10 / (5 n)`; leakage
//! happens when `Y` falls short of `y0 = 5 n / ln 10 + Gamma_delta - Gamma_delta_max`.

use std::f64::consts::{LN_10, TAU};

use rand::Rng;

use crate::error::{Error, Result};
use crate::propagation::{PathLossModel, PowerDbm};

fn check_annulus(r_f: f64, eps0: f64) -> Result<()> {
    if !(eps0 > 0.0 && r_f > eps0 && r_f.is_finite()) {
        return Err(Error::InvalidArgument(format!("need 0 < eps0 < r_f, got eps0 {eps0}, r_f {r_f}")));
    }
    Ok(())
}

/// Density of the pilot power `q` (dBm) received by a user uniform on the annulus.
pub fn pdf_q(q: f64, p_f: PowerDbm, r_f: f64, eps0: f64, model: &PathLossModel) -> Result<f64> {
    check_annulus(r_f, eps0)?;
    let lo = p_f.dbm() - model.path_loss_unchecked(r_f);
    let hi = p_f.dbm() - model.path_loss_unchecked(eps0);
    if q < lo || q > hi {
        return Ok(0.0);
    }
    let five_n = 5.0 * model.exponent();
    let d2 = 10f64.powf((p_f.dbm() - model.intercept_db() - q) / five_n);
    Ok(d2 * LN_10 / (five_n * (r_f * r_f - eps0 * eps0)))
}

/// Mean received pilot, dBm.
pub fn expected_q(p_f: PowerDbm, r_f: f64, eps0: f64, model: &PathLossModel) -> Result<f64> {
    check_annulus(r_f, eps0)?;
    let n = model.exponent();
    let (r2, e2) = (r_f * r_f, eps0 * eps0);
    Ok(5.0 * n / LN_10 + p_f.dbm() - model.intercept_db() - 10.0 * n * (r2 * r_f.log10() - e2 * eps0.log10()) / (r2 - e2))
}

/// CDF at `y` of the sum of `m` independent exponentials with rate `lambda`.
pub fn erlang_cdf(y: f64, m: usize, lambda: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::InvalidArgument(format!("Erlang argument {y} must be >= 0")));
    }
    if m == 0 {
        return Err(Error::InvalidArgument("Erlang shape must be >= 1".into()));
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidArgument(format!("Erlang rate {lambda} must be > 0")));
    }
    let x = lambda * y;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    // P[Poisson(x) >= m]: sum the upper tail directly when it is the small side
    let ln_x = x.ln();
    if x < m as f64 {
        let ln_fact: f64 = (2..=m).map(|k| (k as f64).ln()).sum();
        let mut term = (-x + m as f64 * ln_x - ln_fact).exp();
        let mut sum = 0.0;
        let mut k = m as f64;
        while term > 0.0 {
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
            k += 1.0;
            term *= x / k;
        }
        Ok(sum.min(1.0))
    } else {
        let mut ln_fact = 0.0;
        let mut lower = 0.0;
        for k in 0..m {
            if k > 0 {
                ln_fact += (k as f64).ln();
            }
            lower += (-x + k as f64 * ln_x - ln_fact).exp();
        }
        Ok((1.0 - lower).max(0.0))
    }
}

/// Inputs of the leakage-probability model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakageModelParams {
    /// Number of indoor users `K`.
    pub users: usize,
    /// Path-loss exponent `n`.
    pub exponent: f64,
    /// CINR threshold `gamma_th`, dB.
    pub gamma_th: f64,
    pub gamma_delta: f64,
    pub gamma_delta_max: f64,
    /// Building radius `r_b`, meters.
    pub r_b: f64,
    /// Minimum user distance `eps0`, meters.
    pub eps0: f64,
}

impl LeakageModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.users < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 users, got {}", self.users)));
        }
        if !(self.exponent.is_finite() && self.exponent > 0.0) {
            return Err(Error::InvalidArgument(format!("exponent {} must be > 0", self.exponent)));
        }
        if !(self.gamma_delta.is_finite() && self.gamma_delta_max.is_finite()) {
            return Err(Error::InvalidArgument("threshold margins must be finite".into()));
        }
        check_annulus(self.r_b, self.eps0)
    }

    /// `y0 = 5 n / ln 10 + Gamma_delta - Gamma_delta_max`.
    pub fn y0(&self) -> f64 {
        5.0 * self.exponent / LN_10 + self.gamma_delta - self.gamma_delta_max
    }

    /// `lambda_1 = K ln 10 / (5 n)`.
    pub fn lambda1(&self) -> f64 {
        self.users as f64 * LN_10 / (5.0 * self.exponent)
    }

    /// Upper end of the support of one exact `X_k`, `10 n log10(r_b/eps0) / K`.
    pub fn x_support(&self) -> f64 {
        10.0 * self.exponent * (self.r_b / self.eps0).log10() / self.users as f64
    }
}

/// Probability `H_K` that coverage leaks out of the building.
pub fn leakage_probability(params: &LeakageModelParams) -> Result<f64> {
    params.validate()?;
    let y0 = params.y0();
    if y0 <= 0.0 {
        return Ok(0.0);
    }
    erlang_cdf(y0, params.users - 1, params.lambda1())
}

/// `H_K` as `K -> infinity`: `Y` concentrates at `5 n / ln 10`, so leakage
/// vanishes for `Gamma_delta < Gamma_delta_max` and becomes certain above it.
pub fn leakage_probability_limit(params: &LeakageModelParams) -> Result<f64> {
    check_annulus(params.r_b, params.eps0)?;
    let margin = params.gamma_delta - params.gamma_delta_max;
    Ok(if margin < 0.0 {
        0.0
    } else if margin > 0.0 {
        1.0
    } else {
        0.5
    })
}

/// Monte-Carlo estimate of `H_K` from `samples` drops of `K - 1` uniform
/// users plus one user on the wall, without the exponential approximation.
pub fn leakage_probability_sampled<R: Rng + ?Sized>(params: &LeakageModelParams, samples: usize, rng: &mut R) -> Result<f64> {
    params.validate()?;
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let y0 = params.y0();
    if y0 < 0.0 {
        return Ok(0.0);
    }
    let mut hits = 0usize;
    for _ in 0..samples {
        if sample_excess(params, rng) < y0 {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

/// One draw of `Y = Q_bar - Q_K` with the `K`-th user on the wall.
pub fn sample_excess<R: Rng + ?Sized>(params: &LeakageModelParams, rng: &mut R) -> f64 {
    let (rb2, e2) = (params.r_b * params.r_b, params.eps0 * params.eps0);
    let ten_n = 10.0 * params.exponent;
    let sum: f64 = (1..params.users)
        .map(|_| {
            let d2 = e2 + rng.random::<f64>() * (rb2 - e2);
            // Q_k - Q_K = 10 n log10(r_b / d_k)
            0.5 * ten_n * (rb2 / d2).log10()
        })
        .sum();
    sum / params.users as f64
}

/// Distance of a user uniform on the annulus, by inverse CDF.
pub fn sample_annulus_distance<R: Rng + ?Sized>(r_f: f64, eps0: f64, rng: &mut R) -> f64 {
    (eps0 * eps0 + rng.random::<f64>() * (r_f * r_f - eps0 * eps0)).sqrt()
}

/// Uniform azimuth in `[0, 2 pi)`.
pub fn sample_azimuth<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * TAU
}
