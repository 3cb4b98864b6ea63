//! Closed-form limit shapes and fluctuation coefficients.
//!
//! Two parameter conventions appear in this module and are never mixed:
//! `p_bern` is `P(weight = 1)` for Bernoulli weights, `q0` is
//! `P(weight = 0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_open_unit(p_bern: f64) -> Result<()> {
    if p_bern > 0.0 && p_bern < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Bernoulli parameter {p_bern} must lie in (0, 1)")))
    }
}

/// Slope `(1-p)/p` of the critical line `x = (1-p) y / p`.
pub fn critical_slope(p_bern: f64) -> Result<f64> {
    check_open_unit(p_bern)?;
    Ok((1.0 - p_bern) / p_bern)
}

/// Limit shape of the horizontal-only model with Bernoulli(`p_bern`)
/// weights: `(√(px) − √((1−p)y))²` for `x ≥ (1−p)y/p`, else 0.
///
/// `p_bern = 1` gives `x` and `p_bern = 0` gives 0.
pub fn limit_shape_bernoulli(p_bern: f64, x: f64, y: f64) -> f64 {
    assert!((0.0..=1.0).contains(&p_bern), "Bernoulli parameter {p_bern} outside [0, 1]");
    if p_bern == 0.0 {
        return 0.0;
    }
    if p_bern == 1.0 {
        return x;
    }
    // Compare p x against (1-p) y rather than dividing by p.
    if p_bern * x < (1.0 - p_bern) * y {
        return 0.0;
    }
    let d = (p_bern * x).sqrt() - ((1.0 - p_bern) * y).sqrt();
    d * d
}

/// Edge weight law `scale · Bernoulli(prob)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledBernoulli {
    pub scale: f64,
    pub prob: f64,
}

impl ScaledBernoulli {
    pub fn new(scale: f64, prob: f64) -> Self {
        Self { scale, prob }
    }
}

/// Limit shape `max(f_H, f_V)` of the full model when both edge weight
/// families are scaled Bernoulli. The vertical shape is the horizontal one
/// with `x` and `y` exchanged.
pub fn limit_shape_model(horizontal: ScaledBernoulli, vertical: ScaledBernoulli, x: f64, y: f64) -> f64 {
    let f_h = horizontal.scale * limit_shape_bernoulli(horizontal.prob, x, y);
    let f_v = vertical.scale * limit_shape_bernoulli(vertical.prob, y, x);
    f_h.max(f_v)
}

/// Limit shape of an environment, when its weight laws admit a closed form.
pub fn limit_shape_for_config(config: &crate::env::EnvironmentConfig, x: f64, y: f64) -> Result<f64> {
    use crate::env::Orientation;
    let (hs, hp) = config.scaled_bernoulli_law(Orientation::Horizontal)?;
    let (vs, vp) = config.scaled_bernoulli_law(Orientation::Vertical)?;
    Ok(limit_shape_model(ScaledBernoulli::new(hs, hp), ScaledBernoulli::new(vs, vp), x, y))
}

/// Limit shape, transversal scale, fluctuation scale and slope at a
/// direction strictly inside the positive region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapeCoefficients {
    pub p_bern: f64,
    pub x: f64,
    pub y: f64,
    pub f: f64,
    pub tau: f64,
    pub chi: f64,
    pub rho: f64,
}

pub fn coefficients(p_bern: f64, x: f64, y: f64) -> Result<ShapeCoefficients> {
    check_open_unit(p_bern)?;
    if !(x > 0.0 && y > 0.0) {
        return Err(Error::Domain(format!("direction ({x}, {y}) must be strictly positive")));
    }
    let q = 1.0 - p_bern;
    if p_bern * x <= q * y {
        return Err(Error::Domain(format!(
            "direction ({x}, {y}) is not strictly inside the positive region x > {} y",
            q / p_bern
        )));
    }
    let gap = (p_bern * x).sqrt() - (q * y).sqrt();
    let sum = (q * x).sqrt() + (p_bern * y).sqrt();
    let tau_arg = x * x / (y * (p_bern * q).sqrt()) * gap * sum;
    let chi_arg = p_bern * q / (x * y) * gap * gap * sum * sum;
    if !(tau_arg > 0.0 && chi_arg > 0.0) {
        return Err(Error::Domain(format!("direction ({x}, {y}) too close to the critical line")));
    }
    Ok(ShapeCoefficients {
        p_bern,
        x,
        y,
        f: gap * gap,
        tau: 2.0 * tau_arg.cbrt(),
        chi: chi_arg.cbrt(),
        rho: p_bern - (p_bern * q * y / x).sqrt(),
    })
}

/// `(F − n f) / (χ n^{1/3})`.
pub fn scaled_fluctuation(value: f64, n: u64, coeffs: &ShapeCoefficients) -> f64 {
    let n = n as f64;
    (value - n * coeffs.f) / (coeffs.chi * n.cbrt())
}

/// `P(Z_1 + … + Z_m ≤ n)` for i.i.d. geometric `Z` on `{0, 1, …}` with
/// success probability `q0`, which is the probability that the
/// horizontal-only first-passage value at `(m, n)` vanishes when
/// `P(weight = 0) = q0`.
pub fn prob_zero_exact(m: u64, q0: f64, n: u64) -> f64 {
    assert!(m >= 1, "m must be positive");
    assert!(q0 > 0.0 && q0 <= 1.0, "q0 = {q0} outside (0, 1]");
    if q0 == 1.0 {
        return 1.0;
    }
    // Terms C(m-1+k, k) q0^m (1-q0)^k in log space, summed with a shift.
    let mf = m as f64;
    let log_fail = (1.0 - q0).ln();
    let mut log_term = mf * q0.ln();
    let mut logs = Vec::with_capacity(n as usize + 1);
    logs.push(log_term);
    for k in 1..=n {
        let kf = k as f64;
        log_term += ((mf - 1.0 + kf) / kf).ln() + log_fail;
        logs.push(log_term);
    }
    let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logs.iter().map(|&l| (l - peak).exp()).sum();
    (peak + sum.ln()).exp().min(1.0)
}

/// Whether the horizontal limit shape is positive at `(x, y)` when
/// `P(weight = 0) = q0`: `x > q0 y / (1 − q0)`.
pub fn in_positive_region(q0: f64, x: f64, y: f64) -> bool {
    if q0 >= 1.0 {
        false
    } else {
        x * (1.0 - q0) > q0 * y
    }
}
