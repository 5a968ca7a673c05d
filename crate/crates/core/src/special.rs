//! Gamma function, unit ball and sphere measures, and exponent bookkeeping.
//!
//! Everything here is a pure function of its arguments. The log-gamma routine
//! uses a Lanczos approximation (g = 7, nine coefficients) with the reflection
//! formula below 1/2; relative accuracy of `exp(log_gamma(x))` is about 1e-15
//! on the range used by the rest of the crate.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;

#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural logarithm of the Gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("log_gamma requires x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    log_gamma(x).map(f64::exp)
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1-x) = π / sin(πx)
        (PI / (PI * x).sin()).ln() - ln_gamma_pos(1.0 - x)
    } else {
        let z = x - 1.0;
        let series = LANCZOS_COEF
            .iter()
            .enumerate()
            .skip(1)
            .fold(LANCZOS_COEF[0], |acc, (i, &c)| acc + c / (z + i as f64));
        let t = z + LANCZOS_G + 0.5;
        0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + series.ln()
    }
}

/// Volume of the unit ball in `R^d`, `π^{d/2} / Γ(1 + d/2)`.
pub fn unit_ball_volume(d: i32) -> Result<f64> {
    if d <= 0 {
        return Err(Error::Domain(format!("unit ball volume needs d >= 1, got {d}")));
    }
    let half = f64::from(d) / 2.0;
    Ok((half * PI.ln() - ln_gamma_pos(1.0 + half)).exp())
}

/// Surface area of the unit sphere in `R^d`, `2 π^{d/2} / Γ(d/2)`.
///
/// `d = 0` follows the counting-measure convention on `S^0 = {±1}` and
/// returns 2.
pub fn unit_sphere_area(d: i32) -> Result<f64> {
    match d {
        _ if d < 0 => Err(Error::Domain(format!("unit sphere area needs d >= 0, got {d}"))),
        0 => Ok(2.0),
        _ => {
            let half = f64::from(d) / 2.0;
            Ok(2.0 * (half * PI.ln() - ln_gamma_pos(half)).exp())
        }
    }
}

/// Dimension and order of the Riesz kernel `|x|^{α-d}` on `R^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    d: u32,
    alpha: f64,
}

impl ProblemParams {
    pub fn new(d: u32, alpha: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("dimension d must be at least 1".into()));
        }
        if !(alpha > 0.0 && alpha < f64::from(d)) {
            return Err(Error::Domain(format!("order alpha must lie in (0, {d}), got {alpha}")));
        }
        Ok(Self { d, alpha })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn dim(&self) -> f64 {
        f64::from(self.d)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `d / α`, the upper end of the admissible `p` range.
    pub fn critical_p(&self) -> f64 {
        self.dim() / self.alpha
    }

    /// `ω(d)`.
    pub fn sphere_area(&self) -> f64 {
        unit_sphere_area(self.d as i32).expect("d >= 1")
    }

    /// `ω(d-1)`; for `d = 1` this is the `ω(0) = 2` convention.
    pub fn lower_sphere_area(&self) -> f64 {
        unit_sphere_area(self.d as i32 - 1).expect("d >= 1")
    }

    /// `Ω(d)`.
    pub fn ball_volume(&self) -> f64 {
        unit_ball_volume(self.d as i32).expect("d >= 1")
    }

    /// True when some formula had to fall back on the `ω(0) = 2` convention.
    pub fn uses_omega_zero_convention(&self) -> bool {
        self.d == 1
    }
}

/// `Ω(d)`, `ω(d)` and `max(1, ω(d))` for one dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricConstants {
    pub ball_volume: f64,
    pub sphere_area: f64,
    pub sphere_area_clamped: f64,
}

impl GeometricConstants {
    pub fn new(d: u32) -> Result<Self> {
        let ball_volume = unit_ball_volume(d as i32)?;
        let sphere_area = unit_sphere_area(d as i32)?;
        Ok(Self {
            ball_volume,
            sphere_area,
            sphere_area_clamped: sphere_area.max(1.0),
        })
    }
}

/// Hölder conjugate `p / (p - 1)`.
pub fn conjugate_exponent(p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("conjugate exponent needs p > 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(1.0);
    }
    Ok(p / (p - 1.0))
}

/// Sobolev exponent `q = pd / (d - αp)`, i.e. `1/q = 1/p - α/d`.
pub fn q_of_p(p: f64, params: &ProblemParams) -> Result<f64> {
    let crit = params.critical_p();
    if !(p > 1.0 && p < crit) {
        return Err(Error::Domain(format!("q(p) needs 1 < p < d/alpha = {crit}, got p = {p}")));
    }
    let d = params.dim();
    Ok(p * d / (d - params.alpha() * p))
}

/// Inverse of [`q_of_p`]: `p = dq / (d + αq)`.
pub fn p_of_q(q: f64, params: &ProblemParams) -> Result<f64> {
    let d = params.dim();
    let lo = d / (d - params.alpha());
    if !(q > lo) || q.is_nan() {
        return Err(Error::Domain(format!("p(q) needs q > d/(d-alpha) = {lo}, got q = {q}")));
    }
    if q.is_infinite() {
        return Ok(params.critical_p());
    }
    Ok(d * q / (d + params.alpha() * q))
}

/// Membership of `(r, s)` in the exponent set `r, s > 1`, `1/r + 1/s = 1 + α/d`.
pub fn hls_pair_check(r: f64, s: f64, params: &ProblemParams, eps: f64) -> bool {
    r > 1.0 && s > 1.0 && (1.0 / r + 1.0 / s - 1.0 - params.alpha() / params.dim()).abs() <= eps
}
