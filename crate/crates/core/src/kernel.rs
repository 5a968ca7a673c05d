//! Riesz potentials `I_α f(x) = ∫ f(y) |x - y|^{α-d} dy` of radial profiles.
//!
//! For radial `f` the potential depends on `R = |x|` only and reduces to
//! `∫_0^∞ r^{d-1} f(r) K(R, r) dr`, where `K(R, r)` is the integral of the
//! kernel over the sphere of radius `r`. For `d ≥ 2` the sphere integral is
//! `ω(d-1) ∫_0^π dist^{α-d} sin^{d-2}θ dθ` with
//! `dist^2 = (r - R)^2 + 4 R r sin^2(θ/2)`; writing it this way keeps the
//! distance exact when `r` is close to `R`, which is passed to the kernel as
//! an exact offset. All integrands are assembled in log space so that the
//! far ends of the logarithmic walks neither overflow nor underflow early.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Breakpoint, Domain, Node, QuadratureSpec};
use crate::radial::RadialProfile;
use crate::special::ProblemParams;

/// Positive function `Q(z)`, slowly varying as `z → ∞`, with a label used in
/// reports and descriptors.
#[derive(Clone)]
pub struct SlowlyVarying {
    label: String,
    eval: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl SlowlyVarying {
    pub fn new(label: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    /// `Q ≡ 1`.
    pub fn one() -> Self {
        Self::new("one", |_| 1.0)
    }

    /// `Q(z) = ln(e + z)`.
    pub fn log() -> Self {
        Self::new("log", |z: f64| (E + z).ln())
    }

    /// `Q(z) = ln(e + ln(e + z))`.
    pub fn loglog() -> Self {
        Self::new("loglog", |z: f64| (E + (E + z).ln()).ln())
    }

    pub fn from_label(label: &str) -> Result<Self> {
        match label {
            "one" => Ok(Self::one()),
            "log" => Ok(Self::log()),
            "loglog" => Ok(Self::loglog()),
            _ => Err(Error::Config(format!(
                "unknown slowly varying function {label:?} (expected one, log or loglog)"
            ))),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_one(&self) -> bool {
        self.label == "one"
    }

    pub fn eval(&self, z: f64) -> f64 {
        (self.eval)(z)
    }
}

impl fmt::Debug for SlowlyVarying {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SlowlyVarying({})", self.label)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LogForm {
    /// `|ln t|^β`
    PlainLog,
    /// `(1 + |ln t|)^β`
    ShiftedLog,
}

/// Kernel `t^{α-d} w(t)` with `w(t) = base(t)^β Q(|ln t|)`.
#[derive(Debug, Clone)]
pub struct GeneralizedKernelSpec {
    pub alpha: f64,
    pub beta: f64,
    pub q: SlowlyVarying,
    pub form: LogForm,
}

impl GeneralizedKernelSpec {
    pub fn new(alpha: f64, beta: f64, q: SlowlyVarying, form: LogForm) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {alpha}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::Config(format!("beta must be nonnegative, got {beta}")));
        }
        Ok(Self { alpha, beta, q, form })
    }

    /// True when the weight is identically one.
    pub fn is_trivial(&self) -> bool {
        self.beta == 0.0 && self.q.is_one()
    }

    /// `ln w(t)` given `ln t`.
    pub fn ln_weight(&self, ln_t: f64) -> f64 {
        let z = ln_t.abs();
        let base = match self.form {
            LogForm::PlainLog => z,
            LogForm::ShiftedLog => 1.0 + z,
        };
        let pow = if self.beta == 0.0 { 0.0 } else { self.beta * base.ln() };
        pow + self.q.eval(z).ln()
    }
}

/// Log-space kernel weight, or none for the plain Riesz kernel.
type Weight<'a> = Option<&'a GeneralizedKernelSpec>;

fn ln_w(weight: Weight<'_>, ln_t: f64) -> f64 {
    weight.map_or(0.0, |w| w.ln_weight(ln_t))
}

/// Angular integrals with a near-diagonal offset below this fraction of the
/// radius are graded toward `θ = 0`.
const NEAR_DIAGONAL: f64 = 0.25;

/// `ln K(R, R + δ)` for the weighted kernel.
fn ln_kernel(params: &ProblemParams, big_r: f64, delta: f64, weight: Weight<'_>, quad: &QuadratureSpec) -> Result<f64> {
    let d = params.dim();
    let alpha = params.alpha();
    let r = big_r + delta;
    if !(big_r >= 0.0 && r >= 0.0) {
        return Err(Error::Domain(format!("radii must be nonnegative, got R = {big_r}, r = {r}")));
    }
    if big_r == 0.0 && r == 0.0 {
        return Err(Error::Domain("kernel is undefined for R = r = 0".into()));
    }
    if big_r == 0.0 || r == 0.0 {
        let ln_m = big_r.max(r).ln();
        return Ok(params.sphere_area().ln() + (alpha - d) * ln_m + ln_w(weight, ln_m));
    }
    if params.d() == 1 {
        let a = delta.abs();
        if a == 0.0 {
            return Err(Error::Divergent("one-dimensional kernel is infinite at r = R".into()));
        }
        let b = big_r + r;
        let (la, lb) = (a.ln(), b.ln());
        let ta = (alpha - 1.0) * la + ln_w(weight, la);
        let tb = (alpha - 1.0) * lb + ln_w(weight, lb);
        let hi = ta.max(tb);
        if hi == f64::NEG_INFINITY {
            return Ok(hi);
        }
        return Ok(hi + ((ta - hi).exp() + (tb - hi).exp()).ln());
    }
    if delta == 0.0 && alpha <= 1.0 {
        return Err(Error::Divergent(format!(
            "sphere integral of |x-y|^(alpha-d) diverges at r = R for alpha = {alpha} <= 1"
        )));
    }
    let m = big_r.max(r);
    let ln_m = m.ln();
    let (rn, qn, dn) = (big_r / m, r / m, delta / m);
    let four_rq = 4.0 * rn * qn;
    let half_exp = 0.5 * (alpha - d);
    let dm2 = d - 2.0;
    // ln |x - y|^2 / m^2 in log space, so offsets far below the radius
    // neither underflow nor overflow; the integrand is scaled by its value
    // at θ = 0
    let ln_dn2 = 2.0 * dn.abs().ln();
    let ln_4rq = four_rq.ln();
    let ln_dist2 = |s: f64| {
        let b = ln_4rq + 2.0 * s.abs().ln();
        let (hi, lo) = if ln_dn2 > b { (ln_dn2, b) } else { (b, ln_dn2) };
        if lo == f64::NEG_INFINITY {
            hi
        } else {
            hi + (lo - hi).exp().ln_1p()
        }
    };
    let shift = if ln_dn2.is_finite() { half_exp * ln_dn2 } else { 0.0 };
    let integrand = |n: Node| -> Result<f64> {
        let theta = n.x;
        let s = (0.5 * theta).sin();
        let ln_d2 = ln_dist2(s);
        let mut ln_v = half_exp * ln_d2 - shift;
        if let Some(w) = weight {
            // near |x - y| = 1 the log is taken from |x - y|^2 - 1 directly
            let excess = (delta - 1.0) * (delta + 1.0) + 4.0 * big_r * r * s * s;
            let ln_t = if excess.abs() < 0.5 {
                0.5 * excess.ln_1p()
            } else {
                ln_m + 0.5 * ln_d2
            };
            ln_v += w.ln_weight(ln_t);
        }
        if dm2 != 0.0 {
            ln_v += dm2 * theta.sin().ln();
        }
        Ok(ln_v.exp())
    };
    let mut pts = vec![
        if dn.abs() < NEAR_DIAGONAL {
            Breakpoint::singular(0.0)
        } else {
            Breakpoint::regular(0.0)
        },
        Breakpoint::regular(PI),
    ];
    if weight.is_some() {
        // dist = 1 where the log factor changes sign
        let s2 = ((1.0 / m).powi(2) - dn * dn) / four_rq;
        if s2 > 0.0 && s2 < 1.0 {
            pts.push(Breakpoint::regular(2.0 * s2.sqrt().asin()));
        }
    }
    let est = integrate(&integrand, &Domain::new(pts, false), quad)?;
    Ok(params.lower_sphere_area().ln() + (alpha - d) * ln_m + shift + est.value.ln())
}

/// `∫_{S^{d-1}} |R e_1 - r σ|^{α-d} dσ`.
pub fn angular_kernel(big_r: f64, r: f64, params: &ProblemParams, quad: &QuadratureSpec) -> Result<f64> {
    if !(big_r >= 0.0 && r >= 0.0 && big_r.is_finite() && r.is_finite()) {
        return Err(Error::Domain(format!("radii must be finite and nonnegative, got R = {big_r}, r = {r}")));
    }
    ln_kernel(params, big_r, r - big_r, None, quad).map(f64::exp)
}

fn ln_profile(profile: &RadialProfile, r: f64) -> Result<f64> {
    profile.value(r).map(f64::ln)
}

/// Rejects potentials that are infinite by the profile's power behaviour.
fn potential_divergence(profile: &RadialProfile, params: &ProblemParams, big_r: f64) -> Result<()> {
    let alpha = params.alpha();
    let d = params.dim();
    let tail = profile.tail_exponent();
    if profile.support().is_none() && tail <= alpha {
        return Err(Error::Divergent(format!(
            "{profile} decays like r^-{tail}, too slowly for the kernel r^(alpha-d) with alpha = {alpha}"
        )));
    }
    let origin = profile.origin_exponent();
    if big_r == 0.0 && origin >= alpha {
        return Err(Error::Divergent(format!(
            "potential of {profile} is infinite at the origin (singularity r^-{origin}, alpha = {alpha})"
        )));
    }
    if origin >= d {
        return Err(Error::Divergent(format!("{profile} is not locally integrable")));
    }
    Ok(())
}

fn potential_weighted(
    profile: &RadialProfile,
    params: &ProblemParams,
    big_r: f64,
    weight: Weight<'_>,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(big_r >= 0.0 && big_r.is_finite()) {
        return Err(Error::Domain(format!("radius must be finite and nonnegative, got {big_r}")));
    }
    if profile.is_zero() {
        return Ok(0.0);
    }
    potential_divergence(profile, params, big_r)?;
    let d = params.dim();
    let alpha = params.alpha();
    let inner = quad.nested();
    let mut pts: Vec<Breakpoint> = profile.breakpoints().into_iter().map(Breakpoint::regular).collect();
    let support = profile.support();
    let origin = if big_r == 0.0 || profile.singular_origin() {
        Breakpoint::singular(0.0)
    } else {
        Breakpoint::regular(0.0)
    };
    pts.push(origin);
    if weight.is_some() {
        for b in [big_r + 1.0, big_r - 1.0, 1.0 - big_r] {
            if b > 0.0 {
                pts.push(Breakpoint::regular(b));
            }
        }
    }
    let integrand = |n: Node| -> Result<f64> {
        let r = n.x_strict();
        if !(r > 0.0) {
            return Ok(0.0);
        }
        let lf = ln_profile(profile, r)?;
        if lf == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        if big_r == 0.0 {
            let lr = r.ln();
            return Ok((lf + (alpha - 1.0) * lr + ln_w(weight, lr)).exp());
        }
        let delta = n.offset_from(big_r);
        let lk = ln_kernel(params, big_r, delta, weight, &inner)?;
        Ok((lf + (d - 1.0) * r.ln() + lk).exp())
    };
    if big_r > 0.0 {
        // a regular point within rounding of R would put a node exactly on
        // the diagonal
        pts.retain(|b| b.singular || (b.x - big_r).abs() > 1e-12 * big_r);
        pts.push(Breakpoint::singular(big_r));
    }
    let domain = match support {
        Some(s) => Domain::new(pts, false).clipped(0.0, s),
        None => Domain::new(pts, true),
    };
    let est = integrate(&integrand, &domain, quad)?;
    Ok(if big_r == 0.0 {
        params.sphere_area() * est.value
    } else {
        est.value
    })
}

/// `I_α f(R)`.
pub fn riesz_potential(profile: &RadialProfile, params: &ProblemParams, big_r: f64, quad: &QuadratureSpec) -> Result<f64> {
    potential_weighted(profile, params, big_r, None, quad)
}

/// Potential with the kernel `|x-y|^{α-d} w(|x-y|)`. A trivial weight
/// returns [`riesz_potential`] unchanged.
pub fn riesz_potential_generalized(
    profile: &RadialProfile,
    kernel: &GeneralizedKernelSpec,
    params: &ProblemParams,
    big_r: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let local = ProblemParams::new(params.d(), kernel.alpha)?;
    if kernel.is_trivial() {
        return riesz_potential(profile, &local, big_r, quad);
    }
    potential_weighted(profile, &local, big_r, Some(kernel), quad)
}

/// Same as [`riesz_potential_generalized`] but always through the weighted
/// code path, even for a trivial weight.
pub fn riesz_potential_generalized_direct(
    profile: &RadialProfile,
    kernel: &GeneralizedKernelSpec,
    params: &ProblemParams,
    big_r: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let local = ProblemParams::new(params.d(), kernel.alpha)?;
    potential_weighted(profile, &local, big_r, Some(kernel), quad)
}

/// Spherical mean `∫_{S^{d-1}} f(|x - ρσ|) dσ` at `|x| = R`, `ρ = R + δ`.
fn spherical_mean(
    profile: &RadialProfile,
    params: &ProblemParams,
    big_r: f64,
    delta: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    let rho = big_r + delta;
    if big_r == 0.0 || rho == 0.0 {
        return Ok(params.sphere_area() * profile.value(big_r.max(rho))?);
    }
    if params.d() == 1 {
        let near = delta.abs();
        let near = if near == 0.0 { 0.0 } else { near };
        return Ok(profile.value(near)? + profile.value(big_r + rho)?);
    }
    let d = params.dim();
    let four_rq = 4.0 * big_r * rho;
    let dm2 = d - 2.0;
    let integrand = |n: Node| -> Result<f64> {
        let theta = n.x;
        let s = (0.5 * theta).sin();
        let dist = (delta * delta + four_rq * s * s).sqrt();
        let v = profile.value(dist)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        Ok(if dm2 != 0.0 { v * theta.sin().powf(dm2) } else { v })
    };
    let near_diag = delta.abs() < NEAR_DIAGONAL * big_r.max(rho);
    let mut pts = vec![
        if profile.singular_origin() && near_diag {
            Breakpoint::singular(0.0)
        } else {
            Breakpoint::regular(0.0)
        },
        Breakpoint::regular(PI),
    ];
    for b in profile.breakpoints() {
        let s2 = (b * b - delta * delta) / four_rq;
        if s2 > 0.0 && s2 < 1.0 {
            pts.push(Breakpoint::regular(2.0 * s2.sqrt().asin()));
        }
    }
    let est = integrate(&integrand, &Domain::new(pts, false), quad)?;
    Ok(params.lower_sphere_area() * est.value)
}

/// Truncated potential `∫_{|y| ≤ 1} f(x - y) |y|^{α-d} dy`.
pub fn riesz_potential_truncated(
    profile: &RadialProfile,
    params: &ProblemParams,
    big_r: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if !(big_r >= 0.0 && big_r.is_finite()) {
        return Err(Error::Domain(format!("radius must be finite and nonnegative, got {big_r}")));
    }
    if profile.is_zero() {
        return Ok(0.0);
    }
    let alpha = params.alpha();
    let origin = profile.origin_exponent();
    if big_r == 0.0 && origin >= alpha {
        return Err(Error::Divergent(format!(
            "truncated potential of {profile} is infinite at the origin (singularity r^-{origin}, alpha = {alpha})"
        )));
    }
    if origin >= params.dim() {
        return Err(Error::Divergent(format!("{profile} is not locally integrable")));
    }
    if let Some(s) = profile.support() {
        if big_r > s + 1.0 {
            return Ok(0.0);
        }
    }
    let inner = quad.nested();
    let mut pts = vec![Breakpoint::singular(0.0), Breakpoint::regular(1.0)];
    if big_r > 0.0 {
        pts.push(if profile.singular_origin() {
            Breakpoint::singular(big_r)
        } else {
            Breakpoint::regular(big_r)
        });
        for b in profile.breakpoints() {
            pts.push(Breakpoint::regular((big_r - b).abs()));
            pts.push(Breakpoint::regular(big_r + b));
        }
    } else {
        pts.extend(profile.breakpoints().into_iter().map(Breakpoint::regular));
    }
    let integrand = |n: Node| -> Result<f64> {
        let rho = n.x_strict();
        if !(rho > 0.0) {
            return Ok(0.0);
        }
        let delta = n.offset_from(big_r);
        let sm = spherical_mean(profile, params, big_r, delta, &inner)?;
        if sm == 0.0 {
            return Ok(0.0);
        }
        Ok(sm * rho.powf(alpha - 1.0))
    };
    let domain = Domain::new(pts, false).clipped(0.0, 1.0);
    Ok(integrate(&integrand, &domain, quad)?.value)
}

fn pairing<P>(f: &RadialProfile, g: &RadialProfile, params: &ProblemParams, reach: Option<f64>, potential: P, quad: &QuadratureSpec) -> Result<f64>
where
    P: Fn(f64, &QuadratureSpec) -> Result<f64>,
{
    if f.is_zero() || g.is_zero() {
        return Ok(0.0);
    }
    let d = params.dim();
    let inner = quad.nested();
    let mut pts: Vec<Breakpoint> = g
        .breakpoints()
        .into_iter()
        .chain(f.breakpoints())
        .map(Breakpoint::regular)
        .collect();
    pts.push(Breakpoint::singular(0.0));
    let support = match (g.support(), reach) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let integrand = |n: Node| -> Result<f64> {
        let big_r = n.x_strict();
        if !(big_r > 0.0) {
            return Ok(0.0);
        }
        let gv = g.value(big_r)?;
        if gv == 0.0 {
            return Ok(0.0);
        }
        let u = potential(big_r, &inner)?;
        if u == 0.0 {
            return Ok(0.0);
        }
        Ok((gv.ln() + (d - 1.0) * big_r.ln() + u.ln()).exp())
    };
    let domain = match support {
        Some(s) => Domain::new(pts, false).clipped(0.0, s),
        None => Domain::new(pts, true),
    };
    Ok(params.sphere_area() * integrate(&integrand, &domain, quad)?.value)
}

/// `B(f, g) = ∫∫ f(y) g(x) |x - y|^{α-d} dx dy = (I_α f, g)`.
pub fn bilinear_functional(f: &RadialProfile, g: &RadialProfile, params: &ProblemParams, quad: &QuadratureSpec) -> Result<f64> {
    pairing(f, g, params, None, |r, q| riesz_potential(f, params, r, q), quad)
}

/// `B^{(G)}(f, g) = (I^{(G)}_α f, g)` with the truncated potential.
pub fn bilinear_truncated(f: &RadialProfile, g: &RadialProfile, params: &ProblemParams, quad: &QuadratureSpec) -> Result<f64> {
    let reach = f.support().map(|s| s + 1.0);
    pairing(f, g, params, reach, |r, q| riesz_potential_truncated(f, params, r, q), quad)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// Lower bound for `I_α f_0`.
    U0,
    /// Lower bound for `I_α g_0`.
    V0,
}

/// `C_α(d) = 4 · 5^{α-d} · ω(d)`.
pub fn c_alpha(params: &ProblemParams) -> f64 {
    4.0 * 5f64.powf(params.alpha() - params.dim()) * params.sphere_area()
}

/// Coefficient `3^{-1} · 4π · ω(d-1) · 2^{-d}` of `|ln R|` in the `v_0` bound.
pub fn v0_coefficient(params: &ProblemParams) -> f64 {
    4.0 * PI * params.lower_sphere_area() * 2f64.powf(-params.dim()) / 3.0
}

/// Closed-form lower bounds for the potentials of `f_0` and `g_0`:
/// `u_0(R) ≥ C_α(d) R^{α-d} ln R` for `R > 1` and
/// `v_0(R) ≥ 3^{-1} 4π ω(d-1) 2^{-d} |ln R|` for `R < 1`, zero elsewhere.
pub fn witness_potential_lower(which: Witness, params: &ProblemParams, big_r: f64) -> f64 {
    match which {
        Witness::U0 if big_r > 1.0 => c_alpha(params) * big_r.powf(params.alpha() - params.dim()) * big_r.ln(),
        Witness::V0 if big_r > 0.0 && big_r < 1.0 => v0_coefficient(params) * big_r.ln().abs(),
        _ => 0.0,
    }
}
