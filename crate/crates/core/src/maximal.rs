//! Hardy-Littlewood maximal function of radial profiles, the Hedberg split
//! of the Riesz potential, and empirical Stein-constant ratios.

use std::collections::HashMap;
use std::sync::Mutex;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::optimize::golden_max;
use crate::quadrature::{integrate, Breakpoint, Domain, Node, QuadratureSpec};
use crate::radial::{lp_norm, lp_norm_of, RadialProfile, RadialShape};
use crate::special::{conjugate_exponent, ProblemParams};

/// Known upper bounds for the Stein constant `S(d)` in
/// `|Mf|_p ≤ S(d) p/(p-1) |f|_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteinEnvelope {
    pub d: u32,
    /// `2 · 5^d`.
    pub classic_bound: f64,
    /// `S(2) ≤ 2`, present only for `d = 2`.
    pub dim2_bound: Option<f64>,
    /// Absolute constant `C_1` in `S(d) ≤ C_1 √d`; never fixed numerically.
    pub sqrt_bound_constant: Option<f64>,
    /// Value of `S(d)` to plug into the maximal-function bounds, if overridden.
    pub value_override: Option<f64>,
}

impl SteinEnvelope {
    pub fn new(d: u32) -> Self {
        Self {
            d,
            classic_bound: 2.0 * 5f64.powi(d as i32),
            dim2_bound: (d == 2).then_some(2.0),
            sqrt_bound_constant: None,
            value_override: None,
        }
    }

    pub fn with_sqrt_constant(mut self, c1: f64) -> Self {
        self.sqrt_bound_constant = Some(c1);
        self
    }

    pub fn with_value(mut self, s: f64) -> Self {
        self.value_override = Some(s);
        self
    }

    /// `S(d)` used in bound formulas: the override if set, else `2 · 5^d`.
    pub fn value(&self) -> f64 {
        self.value_override.unwrap_or(self.classic_bound)
    }

    /// Smallest bound that is actually proved for this dimension.
    pub fn best_proved(&self) -> f64 {
        let mut best = self.classic_bound;
        if let Some(b) = self.dim2_bound {
            best = best.min(b);
        }
        if let Some(c1) = self.sqrt_bound_constant {
            best = best.min(c1 * f64::from(self.d).sqrt());
        }
        best
    }
}

/// `Mf(x) ≤ A(δ) Mf(x) + D(p, δ) |f|_p` split at the optimal radius `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HedbergSplit {
    pub delta: f64,
    pub near_part: f64,
    pub far_part: f64,
}

impl HedbergSplit {
    pub fn total(&self) -> f64 {
        self.near_part + self.far_part
    }
}

/// `∫_0^θ sin^n t dt` by the reduction formula.
fn sin_power_integral(n: u32, theta: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    let mut lo = theta; // n = 0
    let mut hi = 1.0 - c; // n = 1
    if n == 0 {
        return lo;
    }
    for k in 2..=n {
        let k = f64::from(k);
        let next = -c * s.powf(k - 1.0) / k + (k - 1.0) / k * lo;
        lo = hi;
        hi = next;
    }
    hi
}

/// Measure of the part of the sphere `{|y| = r}` inside the ball
/// `B(R e_1, ρ)`, normalised to the unit sphere. `u_lo = r - (R - ρ)` and
/// `u_hi = R + ρ - r` are passed separately so the cap angle stays accurate
/// for balls much smaller than `R`; `u_in = ρ - R - r` is nonnegative
/// exactly when the whole sphere lies in the ball.
fn cap_measure(params: &ProblemParams, big_r: f64, r: f64, u_lo: f64, u_hi: f64, u_in: f64) -> f64 {
    if params.d() == 1 {
        let a = if u_lo >= 0.0 && u_hi >= 0.0 { 1.0 } else { 0.0 };
        let b = if u_in >= 0.0 { 1.0 } else { 0.0 };
        return a + b;
    }
    if u_in >= 0.0 {
        return params.sphere_area();
    }
    if u_lo <= 0.0 || u_hi <= 0.0 {
        return 0.0;
    }
    // sin²(θ*/2) = (ρ² - (r - R)²) / (4Rr)
    let s2 = u_lo * u_hi / (4.0 * big_r * r);
    if s2 >= 1.0 {
        return params.sphere_area();
    }
    let theta = 2.0 * s2.sqrt().asin();
    params.lower_sphere_area() * sin_power_integral(params.d() - 2, theta)
}

/// Average of `f` over the ball `B(x, ρ)` with `|x| = R`. The radial
/// integral runs in `r - max(R - ρ, 0)`, so the distances to the ball
/// boundary stay accurate for balls much smaller than `R`.
pub fn ball_average(profile: &RadialProfile, params: &ProblemParams, big_r: f64, rho: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::Domain(format!("ball radius must be positive, got {rho}")));
    }
    let d = params.dim();
    let shift = big_r - rho;
    let base = shift.max(0.0);
    let top = if shift > 0.0 { 2.0 * rho } else { big_r + rho };
    let mut pts = vec![Breakpoint::regular(0.0), Breakpoint::singular(top)];
    if shift > 0.0 {
        pts[0] = Breakpoint::singular(0.0);
    } else if big_r > 0.0 {
        pts.push(Breakpoint::singular(-shift));
    }
    pts.extend(profile.breakpoints().into_iter().map(|b| Breakpoint::regular(b - base)));
    if profile.singular_origin() && shift <= 0.0 {
        pts.push(Breakpoint::singular(0.0));
    }
    let integrand = |n: Node| -> Result<f64> {
        let r = if shift > 0.0 { base + n.x } else { n.x_strict() };
        if !(r > 0.0) {
            return Ok(0.0);
        }
        let v = profile.value(r)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        let u_lo = if shift > 0.0 { n.x } else { r - shift };
        let u_hi = -n.offset_from(top);
        let u_in = if shift <= 0.0 { -n.offset_from(-shift) } else { -1.0 };
        let cap = cap_measure(params, big_r, r, u_lo, u_hi, u_in);
        Ok(v * r.powf(d - 1.0) * cap)
    };
    let domain = Domain::new(pts, false).clipped(0.0, top);
    let mass = integrate(&integrand, &domain, quad)?.value;
    Ok(mass / (params.ball_volume() * rho.powf(d)))
}

const SCAN_POINTS: usize = 96;

/// `Mf(R) = sup_ρ` of ball averages, located by a log-spaced scan over
/// `ρ ∈ [1e-4 · s_min, 1e4 · s_max]` (scales from the profile and `R`)
/// followed by golden-section refinement in `ln ρ`. The result is a lower
/// estimate of the supremum.
pub fn maximal_radial(profile: &RadialProfile, params: &ProblemParams, big_r: f64, search: &QuadratureSpec) -> Result<f64> {
    if !(big_r >= 0.0 && big_r.is_finite()) {
        return Err(Error::Domain(format!("radius must be finite and nonnegative, got {big_r}")));
    }
    if profile.is_zero() {
        return Ok(0.0);
    }
    let origin = profile.origin_exponent();
    if origin >= params.dim() {
        return Err(Error::Divergent(format!("{profile} is not locally integrable")));
    }
    if big_r == 0.0 && origin > 0.0 {
        return Err(Error::Divergent(format!(
            "maximal function of {profile} is infinite at the origin"
        )));
    }
    let mut scales = profile.scales();
    if big_r > 0.0 {
        scales.push(big_r);
    }
    let s_min = scales.iter().copied().fold(f64::INFINITY, f64::min);
    let s_max = scales.iter().copied().fold(0.0, f64::max);
    // radii below e^-690 would push ball volumes into subnormal range
    let lo = (1e-4 * s_min).ln().max(-690.0);
    let hi = (1e4 * s_max).ln();
    let step = (hi - lo) / (SCAN_POINTS - 1) as f64;
    let avg = |t: f64| ball_average(profile, params, big_r, t.exp(), search);
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..SCAN_POINTS {
        let t = lo + step * i as f64;
        let v = avg(t)?;
        if v > best.1 {
            best = (t, v);
        }
    }
    let mut failure = None;
    let refined = golden_max(
        |t| match avg(t) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NEG_INFINITY
            }
        },
        best.0 - step,
        best.0 + step,
        1e-9,
        200,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(best.1.max(refined.1))
}

/// `Mf` with memoised values, for norms and sweeps that revisit radii.
pub struct MaximalFunction<'a> {
    profile: &'a RadialProfile,
    params: &'a ProblemParams,
    search: QuadratureSpec,
    cache: Mutex<HashMap<u64, f64>>,
}

impl<'a> MaximalFunction<'a> {
    pub fn new(profile: &'a RadialProfile, params: &'a ProblemParams, search: &QuadratureSpec) -> Self {
        Self {
            profile,
            params,
            search: *search,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn eval(&self, big_r: f64) -> Result<f64> {
        let key = big_r.to_bits();
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = maximal_radial(self.profile, self.params, big_r, &self.search)?;
        self.cache.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }

    /// `|Mf|_p`. Each `Mf` value carries the search tolerance, so the norm is
    /// held to a hundredfold looser tolerance than its integrand.
    pub fn lp_norm(&self, p: f64, quad: &QuadratureSpec) -> Result<f64> {
        let quad = quad.with_rel_tol(quad.rel_tol.max(100.0 * self.search.rel_tol));
        let shape = RadialShape {
            breakpoints: self.profile.breakpoints(),
            singular_origin: self.profile.singular_origin(),
            support: None,
            scales: self.profile.scales(),
        };
        Ok(lp_norm_of(|r| self.eval(r), p, self.params, &shape, &quad)?.value)
    }
}

/// `A(δ) = Ω(d) (d/α) δ^α`, the coefficient of `Mf(x)` in the bound for
/// the near part `∫_{|x-y|<δ} |x-y|^{α-d} f(y) dy`.
pub fn hedberg_near(delta: f64, params: &ProblemParams) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    Ok(params.ball_volume() * params.dim() / params.alpha() * delta.powf(params.alpha()))
}

/// `D(p, δ) = ω(d) [δ^{d-(d-α)s} / ((d-α)s - d)]^{1/s}`, `s = p/(p-1)`, the
/// coefficient of `|f|_p` in the Hölder bound for the far part.
pub fn hedberg_far(p: f64, delta: f64, params: &ProblemParams) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    if p >= params.critical_p() {
        return Err(Error::Divergent(format!(
            "far-field integral diverges for p = {p} >= d/alpha = {}",
            params.critical_p()
        )));
    }
    let s = conjugate_exponent(p)?;
    let d = params.dim();
    let excess = (d - params.alpha()) * s - d;
    let ln_bracket = (d - (d - params.alpha()) * s) * delta.ln() - excess.ln();
    Ok(params.sphere_area() * (ln_bracket / s).exp())
}

/// Hedberg bound `A(δ) Mf(R) + D(p, δ) |f|_p` at the minimising `δ`.
pub fn hedberg_bound(
    profile: &RadialProfile,
    p: f64,
    params: &ProblemParams,
    big_r: f64,
    quad: &QuadratureSpec,
) -> Result<HedbergSplit> {
    if !(p > 1.0 && p < params.critical_p()) {
        return Err(Error::Domain(format!(
            "p must lie in (1, d/alpha) = (1, {}), got {p}",
            params.critical_p()
        )));
    }
    if profile.is_zero() {
        return Ok(HedbergSplit {
            delta: 1.0,
            near_part: 0.0,
            far_part: 0.0,
        });
    }
    let mf = maximal_radial(profile, params, big_r, quad)?;
    let norm = lp_norm(profile, p, params, quad)?.value;
    hedberg_split_from(mf, norm, p, params)
}

/// Optimal split given `Mf(R)` and `|f|_p`.
pub fn hedberg_split_from(mf: f64, norm: f64, p: f64, params: &ProblemParams) -> Result<HedbergSplit> {
    let alpha = params.alpha();
    let kappa = params.dim() / p - alpha;
    let c1 = hedberg_near(1.0, params)? * mf;
    let c2 = hedberg_far(p, 1.0, params)? * norm;
    let delta = if c1 > 0.0 && c2 > 0.0 && kappa > 0.0 {
        ((kappa * c2 / (alpha * c1)).ln() / (alpha + kappa)).exp()
    } else {
        1.0
    };
    let delta = if delta.is_finite() && delta > 0.0 {
        delta
    } else {
        // degenerate exponents: minimise numerically in ln δ
        let (t, _) = crate::optimize::golden_min(
            |t: f64| c1 * (alpha * t).exp() + c2 * (-kappa * t).exp(),
            -700.0 / (alpha + kappa.abs()).max(1.0),
            700.0 / (alpha + kappa.abs()).max(1.0),
            1e-12,
            500,
        );
        t.exp()
    };
    Ok(HedbergSplit {
        delta,
        near_part: hedberg_near(delta, params)? * mf,
        far_part: hedberg_far(p, delta, params)? * norm,
    })
}

/// `|Mf|_p (p-1) / (p |f|_p)`, an empirical lower estimate of `S(d)`.
pub fn stein_ratio_probe(profile: &RadialProfile, p: f64, params: &ProblemParams, quad: &QuadratureSpec) -> Result<f64> {
    let mf = MaximalFunction::new(profile, params, quad);
    stein_ratio_with(&mf, p, quad)
}

/// Same as [`stein_ratio_probe`] reusing a memoised maximal function.
pub fn stein_ratio_with(mf: &MaximalFunction<'_>, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("Stein ratio needs p > 1, got {p}")));
    }
    let norm = lp_norm(mf.profile, p, mf.params, quad)?.value;
    if !(norm > 0.0) {
        return Err(Error::Domain("Stein ratio is undefined for a zero profile".into()));
    }
    let m_norm = mf.lp_norm(p, quad)?;
    Ok(m_norm * (p - 1.0) / (p * norm))
}
