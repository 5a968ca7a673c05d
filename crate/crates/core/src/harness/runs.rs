//! The verification sweeps. Each returns records in configuration order.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{auto_grid, Grid, SweepConfig};
use super::{inputs, CheckRecord, Direction, Memo, SLACK_CLOSED_FORM, SLACK_QUADRATURE};
use crate::bounds::{
    constants_bundle, f_of_p, lower_bound_eq10, p_of_rs, r_of, sharp_constant_diag, thm4_envelope_shape,
    upper_bound_eq4, upper_bound_eq4a_shape, z_of_p, BoundValue,
};
use crate::error::{Error, Result};
use crate::kernel::{
    bilinear_functional, bilinear_truncated, c_alpha, riesz_potential, riesz_potential_generalized_direct,
    v0_coefficient, GeneralizedKernelSpec, LogForm, SlowlyVarying,
};
use crate::maximal::{hedberg_bound, stein_ratio_with, MaximalFunction};
use crate::quadrature::QuadratureSpec;
use crate::radial::{lp_norm, lp_norm_closed, lp_norm_numeric, lp_norm_of, make_f0, make_g0, make_h, RadialProfile, RadialShape};
use crate::special::{conjugate_exponent, log_gamma, q_of_p, ProblemParams};

/// Largest Sobolev exponent `q` reached by automatic grids. The `L^q` norm of
/// a potential with a logarithmic singularity concentrates near
/// `r = e^{-q/d}`, which must stay well inside the range of `f64`.
pub const Q_MAX: f64 = 300.0;

/// Largest `ln r` at which the `L^q` norm integrand of `I_α h` may peak on
/// automatic grids. The integrand decays like `r^{-κ}`, `κ = q(d-α) - d`,
/// peaks near `ln r = q/κ`, and has to die out inside the walkable range of
/// scales.
pub const TAU_PEAK_MAX: f64 = 14.0;

/// Relative tolerance of the weight-one identity check.
const IDENTITY_TOL: f64 = 1e-10;

/// Quadrature tolerance floor of the generalized envelope sweep.
const ENVELOPE_REL_TOL: f64 = 1e-6;

/// Relative tolerance of the `Z(p)` norm identity.
const Z_NORM_TOL: f64 = 1e-8;

/// Collects `f(x)` for every grid point, in order.
fn ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

fn base_inputs(cfg: &SweepConfig, params: &ProblemParams) -> BTreeMap<String, String> {
    let mut m = cfg.free_constants.echo(params.d());
    m.insert("d".into(), params.d().to_string());
    m.insert("alpha".into(), params.alpha().to_string());
    m
}

fn with(mut base: BTreeMap<String, String>, extra: BTreeMap<String, String>) -> BTreeMap<String, String> {
    base.extend(extra);
    base
}

/// Ends of automatic `p` grids on `(1, d/α)`, see [`Q_MAX`] and [`TAU_PEAK_MAX`].
fn p_range(params: &ProblemParams) -> Result<(f64, f64)> {
    let d = params.dim();
    let alpha = params.alpha();
    let t = TAU_PEAK_MAX;
    if t * (d - alpha) <= 1.0 {
        return Err(Error::Config(format!(
            "alpha = {alpha} is too close to d = {d}: the potential of h decays too slowly for an automatic p grid"
        )));
    }
    let p_of = |q: f64| d * q / (d + alpha * q);
    let lo = p_of(d * t / (t * (d - alpha) - 1.0));
    Ok((lo, p_of(Q_MAX).min(params.critical_p())))
}

/// The configured grid inside `(1, d/α)`; automatic grids stay inside [`p_range`].
fn open_p_grid(cfg: &SweepConfig, params: &ProblemParams) -> Result<Vec<f64>> {
    match cfg.p_grid {
        Grid::Auto(n) => {
            let (lo, hi) = p_range(params)?;
            Ok(auto_grid(lo, hi, n))
        }
        Grid::Explicit(_) => cfg.grid_in(1.0, params.critical_p()),
    }
}

fn equality_records(
    name: &str,
    ins: &BTreeMap<String, String>,
    value: f64,
    reference: f64,
    slack: f64,
) -> [CheckRecord; 2] {
    [
        CheckRecord::compare(format!("{name}_le"), ins.clone(), value, reference, Direction::ComputedLeBound, slack),
        CheckRecord::compare(format!("{name}_ge"), ins.clone(), value, reference, Direction::ComputedGeBound, slack),
    ]
}

/// Closed-form against quadrature norms of `f_0` and `g_0`.
pub fn run_norm_validation(cfg: &SweepConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    let params = cfg.params;
    let quad = cfg.quad()?;
    let grid = cfg.norm_grid()?;
    let profiles = [("f0", make_f0(&params)), ("g0", make_g0(&params))];
    let cases: Vec<(&str, &RadialProfile, f64)> = profiles
        .iter()
        .flat_map(|(n, prof)| grid.iter().map(move |&p| (*n, prof, p)))
        .collect();
    let rows = ordered(&cases, |&(label, prof, p)| {
        let ins = with(base_inputs(cfg, &params), inputs([("profile", label.to_string()), ("p", p.to_string())]));
        let name = format!("norm_{label}");
        let closed = lp_norm_closed(prof, p, &params);
        let numeric = lp_norm_numeric(prof, p, &params, &quad);
        match (closed, numeric) {
            (Ok(c), Ok(n)) => equality_records(&name, &ins, n.value, c.value, SLACK_CLOSED_FORM).to_vec(),
            (Err(e), _) | (_, Err(e)) => {
                vec![CheckRecord::failed(name, ins, Direction::ComputedLeBound, SLACK_CLOSED_FORM, &e)]
            }
        }
    });
    Ok(rows.into_iter().flatten().collect())
}

/// `|u_0|_q` and `|v_0|_q` from the witness closed forms.
fn witness_norms(params: &ProblemParams, q: f64) -> Result<(f64, f64)> {
    let d = params.dim();
    let omega = params.sphere_area();
    let kappa = q * (d - params.alpha()) - d;
    let lg = log_gamma(q + 1.0)?;
    let u0 = c_alpha(params) * ((omega.ln() + lg - (q + 1.0) * kappa.ln()) / q).exp();
    let v0 = v0_coefficient(params) * ((omega.ln() + lg - (q + 1.0) * d.ln()) / q).exp();
    Ok((u0, v0))
}

/// Radial layout of `I_α h`: logarithmic singularity at the origin, kink at 1.
fn potential_shape() -> RadialShape {
    RadialShape {
        breakpoints: vec![1.0],
        singular_origin: true,
        support: None,
        scales: vec![1.0],
    }
}

/// The quantities behind one point of the witness sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WitnessPoint {
    pub p: f64,
    pub q: f64,
    pub h_norm: f64,
    pub potential_norm: f64,
    /// `|I_α h|_q [(p-1)(d/α-p)]^{1-α/d} / |h|_p`.
    pub ratio: f64,
    /// `0.5 (|u_0|_q + |v_0|_q)`.
    pub witness_lower: f64,
}

/// Witness ratio at `p` from a memoised `I_α h`.
pub fn witness_ratio(params: &ProblemParams, p: f64, potential: &Memo<'_>, quad: &QuadratureSpec) -> Result<WitnessPoint> {
    let q = q_of_p(p, params)?;
    let h = make_h(params);
    let h_norm = lp_norm(&h, p, params, quad)?.value;
    let potential_norm = lp_norm_of(|r| potential.eval(r), q, params, &potential_shape(), quad)?.value;
    let d = params.dim();
    let alpha = params.alpha();
    let ratio = potential_norm * ((p - 1.0) * (d / alpha - p)).powf(1.0 - alpha / d) / h_norm;
    let (u0, v0) = witness_norms(params, q)?;
    Ok(WitnessPoint {
        p,
        q,
        h_norm,
        potential_norm,
        ratio,
        witness_lower: 0.5 * (u0 + v0),
    })
}

fn potential_memo<'a>(profile: &'a RadialProfile, params: &'a ProblemParams, quad: &QuadratureSpec) -> Memo<'a> {
    let inner = quad.nested();
    Memo::new(move |r| riesz_potential(profile, params, r, &inner))
}

/// Lower-bound witness `h = f_0 + g_0`: the normalised ratio against `F(p)`
/// and `R(α, d)`, the witness intermediate and the upper bound at `(p, q')`.
pub fn run_witness_sweep(cfg: &SweepConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    let params = cfg.params;
    let quad = cfg.quad()?;
    let grid = open_p_grid(cfg, &params)?;
    let h = make_h(&params);
    let memo = potential_memo(&h, &params, &quad);
    let r_val = r_of(&params);
    let bundle_flags = constants_bundle(&params).flags;
    let rows = ordered(&grid, |&p| {
        let ins = with(base_inputs(cfg, &params), inputs([("p", p)]));
        let point = match witness_ratio(&params, p, &memo, &quad) {
            Ok(pt) => pt,
            Err(e) => {
                return ["witness_ge_f", "witness_ge_r", "witness_sum_bound", "witness_le_upper"]
                    .iter()
                    .map(|n| CheckRecord::failed(*n, ins.clone(), Direction::ComputedGeBound, SLACK_QUADRATURE, &e))
                    .collect::<Vec<_>>()
            }
        };
        let ins = with(ins, inputs([("q", point.q)]));
        let mut out = Vec::new();
        match f_of_p(p, &params) {
            Ok(f) => out.push(
                CheckRecord::compare("witness_ge_f", ins.clone(), point.ratio, f, Direction::ComputedGeBound, SLACK_QUADRATURE)
                    .with_flags(bundle_flags.iter().cloned()),
            ),
            Err(e) => out.push(CheckRecord::failed("witness_ge_f", ins.clone(), Direction::ComputedGeBound, SLACK_QUADRATURE, &e)),
        }
        out.push(
            CheckRecord::compare("witness_ge_r", ins.clone(), point.ratio, r_val, Direction::ComputedGeBound, SLACK_QUADRATURE)
                .with_flags(bundle_flags.iter().cloned()),
        );
        out.push(CheckRecord::compare(
            "witness_sum_bound",
            ins.clone(),
            point.potential_norm,
            point.witness_lower,
            Direction::ComputedGeBound,
            SLACK_QUADRATURE,
        ));
        let s = conjugate_exponent(point.q).expect("q > 1");
        let upper = upper_bound_eq4(p, s, &params);
        out.push(match upper {
            Ok(b) => CheckRecord::compare(
                "witness_le_upper",
                with(ins.clone(), inputs([("r", p), ("s", s)])),
                point.potential_norm / point.h_norm,
                b.value,
                Direction::ComputedLeBound,
                SLACK_CLOSED_FORM,
            )
            .with_flags(b.flags),
            Err(e) => CheckRecord::failed("witness_le_upper", ins.clone(), Direction::ComputedLeBound, SLACK_CLOSED_FORM, &e),
        });
        out
    });
    Ok(rows.into_iter().flatten().collect())
}

/// Trial profiles of the sharp-constant probe with their labels.
pub fn sharp_trial_profiles(params: &ProblemParams) -> Result<Vec<(String, RadialProfile)>> {
    let mut trials = Vec::new();
    for lambda in [0.25, 0.5, 1.0, 2.0, 4.0] {
        trials.push((format!("bump_trial_{lambda}"), RadialProfile::bump_trial(lambda, params)?));
    }
    trials.push(("indicator".into(), RadialProfile::indicator_ball(1.0)?));
    trials.push(("g0".into(), make_g0(params)));
    trials.push(("f0".into(), make_f0(params)));
    trials.push(("h".into(), make_h(params)));
    trials.push(("power_inside_0.25".into(), RadialProfile::power_inside(1.0, 0.25, 1.0)?));
    Ok(trials)
}

/// `B(f, f) / |f|_r^2` at `r = 2d/(d+α)` for the default trials, against
/// the sharp diagonal constant.
pub fn run_sharp_probe(cfg: &SweepConfig) -> Result<Vec<CheckRecord>> {
    let trials = sharp_trial_profiles(&cfg.params)?;
    run_sharp_probe_with(cfg, &trials)
}

/// Same as [`run_sharp_probe`] with caller-supplied trials. Zero profiles are
/// skipped with a recorded warning.
pub fn run_sharp_probe_with(cfg: &SweepConfig, trials: &[(String, RadialProfile)]) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    let params = cfg.params;
    let quad = cfg.quad()?;
    let sharp = sharp_constant_diag(&params)?.value;
    let r = 2.0 * params.dim() / (params.dim() + params.alpha());
    let mut records = ordered(trials, |(label, f)| {
        let ins = with(base_inputs(cfg, &params), inputs([("profile", label.clone()), ("r", r.to_string())]));
        if f.is_zero() {
            return (
                CheckRecord::recorded("sharp_trial", ins, 0.0, sharp).with_note("skipped: zero profile has no ratio"),
                None,
            );
        }
        let ratio = (|| -> Result<f64> {
            let norm = lp_norm(f, r, &params, &quad)?.value;
            let b = bilinear_functional(f, f, &params, &quad)?;
            Ok(b / (norm * norm))
        })();
        match ratio {
            Ok(v) => (
                CheckRecord::compare("sharp_trial", ins, v, sharp, Direction::ComputedLeBound, 1e-2),
                Some((v, label.clone())),
            ),
            Err(e) => (CheckRecord::failed("sharp_trial", ins, Direction::ComputedLeBound, 1e-2, &e), None),
        }
    });
    let best = records
        .iter()
        .filter_map(|(_, b)| b.clone())
        .fold(None::<(f64, String)>, |acc, (v, l)| match acc {
            Some((bv, _)) if bv >= v => acc,
            _ => Some((v, l)),
        });
    let mut out: Vec<CheckRecord> = records.drain(..).map(|(rec, _)| rec).collect();
    let ins = base_inputs(cfg, &params);
    out.push(match best {
        Some((v, label)) => CheckRecord::compare(
            "sharp_best_trial",
            with(ins, inputs([("profile", label), ("gap", ((sharp - v) / sharp).to_string())])),
            v,
            sharp,
            Direction::ComputedGeBound,
            2e-2,
        ),
        None => CheckRecord::failed(
            "sharp_best_trial",
            ins,
            Direction::ComputedGeBound,
            2e-2,
            &Error::Config("no trial produced a ratio".into()),
        ),
    });
    Ok(out)
}

/// `(d, α)` pairs of the sandwich report: the configured pair followed by
/// `d ∈ {2, 3}`, `α ∈ {0.25, 0.5, 1, d - 0.5}`.
fn sandwich_pairs(params: &ProblemParams) -> Vec<(u32, f64)> {
    let mut pairs = vec![(params.d(), params.alpha())];
    for d in [2u32, 3] {
        for a in [0.25, 0.5, 1.0, f64::from(d) - 0.5] {
            if !pairs.contains(&(d, a)) {
                pairs.push((d, a));
            }
        }
    }
    pairs
}

/// Lower bound ≤ sharp constant ≤ upper bound on the diagonal pair.
pub fn run_sandwich_report(cfg: &SweepConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    let mut out = Vec::new();
    for (d, a) in sandwich_pairs(&cfg.params) {
        let params = ProblemParams::new(d, a)?;
        let x = 2.0 * params.dim() / (params.dim() + a);
        let ins = with(base_inputs(cfg, &params), inputs([("r", x), ("s", x)]));
        let sharp = sharp_constant_diag(&params)?;
        let lower = lower_bound_eq10(x, x, &params)?;
        let upper = upper_bound_eq4(x, x, &params)?;
        let shape = upper_bound_eq4a_shape(x, x, &params, cfg.free_constants.c1d)?;
        let flags = |b: &BoundValue| b.flags.clone();
        out.push(
            CheckRecord::compare("sandwich_lower_le_sharp", ins.clone(), lower.value, sharp.value, Direction::ComputedLeBound, SLACK_CLOSED_FORM)
                .with_flags(flags(&lower)),
        );
        out.push(
            CheckRecord::compare("sandwich_sharp_le_upper", ins.clone(), sharp.value, upper.value, Direction::ComputedLeBound, SLACK_CLOSED_FORM)
                .with_flags(flags(&upper)),
        );
        out.push(CheckRecord::recorded("sandwich_upper_shape", ins, shape.value, sharp.value).with_flags(flags(&shape)));
    }
    Ok(out)
}

/// `Z(p)` against the quadrature norm of `|x|^{α-d}` on the unit ball, and
/// the truncated bilinear inequality on the configured `(r, s)` pairs.
pub fn run_truncated_check(cfg: &SweepConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    let params = cfg.params;
    let quad = cfg.quad()?;
    let pairs = cfg.rs_pairs()?;
    let d = params.dim();
    let alpha = params.alpha();
    let limit = d / (d - alpha);
    let z_grid: Vec<f64> = (0..10).map(|k| 1.0 + (limit - 1.0) * f64::from(k) / 10.0).collect();
    let kernel_profile = RadialProfile::power_inside(1.0, d - alpha, 1.0)?;
    let mut out = ordered(&z_grid, |&p| {
        let ins = with(base_inputs(cfg, &params), inputs([("p", p)]));
        match (lp_norm_numeric(&kernel_profile, p, &params, &quad), z_of_p(p, &params)) {
            (Ok(n), Ok(z)) => CheckRecord::compare(
                "truncated_z_norm",
                ins,
                ((n.value - z) / z).abs(),
                Z_NORM_TOL,
                Direction::ComputedLeBound,
                0.0,
            ),
            (Err(e), _) | (_, Err(e)) => CheckRecord::failed("truncated_z_norm", ins, Direction::ComputedLeBound, 0.0, &e),
        }
    });
    let profiles = [
        ("indicator", RadialProfile::indicator_ball(1.0)?, "indicator", RadialProfile::indicator_ball(1.0)?),
        ("indicator", RadialProfile::indicator_ball(1.0)?, "bump_trial_1", RadialProfile::bump_trial(1.0, &params)?),
        ("indicator_0.5", RadialProfile::indicator_ball(0.5)?, "indicator_2", RadialProfile::indicator_ball(2.0)?),
    ];
    let cases: Vec<(usize, (f64, f64))> = (0..profiles.len())
        .flat_map(|i| pairs.iter().map(move |&rs| (i, rs)))
        .collect();
    // the pairings do not depend on (r, s)
    let pairings: Vec<Result<f64>> = ordered(&profiles, |(_, f, _, g)| bilinear_truncated(f, g, &params, &quad));
    out.extend(ordered(&cases, |&(i, (r, s))| {
        let (fl, f, gl, g) = &profiles[i];
        let ins = with(
            base_inputs(cfg, &params),
            inputs([("f", fl.to_string()), ("g", gl.to_string()), ("r", r.to_string()), ("s", s.to_string())]),
        );
        let res = (|| -> Result<(f64, f64, f64)> {
            let p = p_of_rs(r, s)?;
            let z = z_of_p(p, &params)?;
            let fr = lp_norm(f, r, &params, &quad)?.value;
            let gs = lp_norm(g, s, &params, &quad)?.value;
            let b = pairings[i].clone()?;
            Ok((b.abs(), z * fr * gs, p))
        })();
        match res {
            Ok((b, bound, p)) => CheckRecord::compare(
                "truncated_bilinear",
                with(ins, inputs([("p", p)])),
                b,
                bound,
                Direction::ComputedLeBound,
                SLACK_CLOSED_FORM,
            ),
            Err(e) => CheckRecord::failed("truncated_bilinear", ins, Direction::ComputedLeBound, SLACK_CLOSED_FORM, &e),
        }
    }));
    Ok(out)
}

/// Radii of the weight-one identity check.
fn identity_radii() -> Vec<f64> {
    (0..20).map(|k| 10f64.powf(-2.0 + 4.0 * f64::from(k) / 19.0)).collect()
}

/// Log-weighted kernels: the weight-one identity, the hand-computable case,
/// and the normalised generalized ratio of `h` along the `p` grid.
pub fn run_generalized_check(cfg: &SweepConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    let params = cfg.params;
    let quad = cfg.quad()?;
    let fine = QuadratureSpec::default().with_rel_tol(1e-12);
    let trivial = GeneralizedKernelSpec::new(params.alpha(), 0.0, SlowlyVarying::one(), cfg.log_form)?;
    let bump = RadialProfile::bump_trial(1.0, &params)?;
    let radii = identity_radii();
    let mut out = ordered(&radii, |&r| {
        let ins = with(base_inputs(cfg, &params), inputs([("radius", r.to_string()), ("profile", "bump_trial_1".into())]));
        let res = (|| -> Result<f64> {
            let a = riesz_potential_generalized_direct(&bump, &trivial, &params, r, &fine)?;
            let b = riesz_potential(&bump, &params, r, &fine)?;
            Ok(((a - b) / b).abs())
        })();
        match res {
            Ok(diff) => CheckRecord::compare("generalized_identity", ins, diff, IDENTITY_TOL, Direction::ComputedLeBound, 0.0),
            Err(e) => CheckRecord::failed("generalized_identity", ins, Direction::ComputedLeBound, 0.0, &e),
        }
    });

    // ∫_{-1}^{1} |y|^{-1/2} |ln |y|| dy = 8
    let hand_params = ProblemParams::new(1, 0.5)?;
    let hand_kernel = GeneralizedKernelSpec::new(0.5, 1.0, SlowlyVarying::one(), LogForm::PlainLog)?;
    let ind = RadialProfile::indicator_ball(1.0)?;
    let ins = with(base_inputs(cfg, &hand_params), inputs([("beta", "1"), ("radius", "0"), ("profile", "indicator")]));
    out.push(match riesz_potential_generalized_direct(&ind, &hand_kernel, &hand_params, 0.0, &fine) {
        Ok(v) => CheckRecord::compare("generalized_hand_case", ins, ((v - 8.0) / 8.0).abs(), 1e-6, Direction::ComputedLeBound, 0.0),
        Err(e) => CheckRecord::failed("generalized_hand_case", ins, Direction::ComputedLeBound, 0.0, &e),
    });

    let kernel = cfg.kernel()?;
    let h = make_h(&params);
    // the envelope is tabulated, not asserted, and each potential value
    // nests an angular integral; a looser tolerance keeps the sweep short
    let quad = quad.with_rel_tol(quad.rel_tol.max(ENVELOPE_REL_TOL));
    let inner = quad.nested();
    let memo = Memo::new(|r| crate::kernel::riesz_potential_generalized(&h, &kernel, &params, r, &inner));
    let grid = open_p_grid(cfg, &params)?;
    let q_label = SlowlyVarying::from_label(&cfg.q)?;
    let d = params.dim();
    let alpha = params.alpha();
    let exponent = 1.0 + cfg.beta - alpha / d;
    out.extend(ordered(&grid, |&p| {
        let ins = with(
            base_inputs(cfg, &params),
            inputs([
                ("p", p.to_string()),
                ("beta", cfg.beta.to_string()),
                ("q_fn", cfg.q.clone()),
                ("exponent", exponent.to_string()),
            ]),
        );
        let res = (|| -> Result<(f64, f64)> {
            let q = q_of_p(p, &params)?;
            let hn = lp_norm(&h, p, &params, &quad)?.value;
            let pn = lp_norm_of(|r| memo.eval(r), q, &params, &potential_shape(), &quad)?.value;
            let env = pn / hn * ((p - 1.0) * (d / alpha - p)).powf(exponent);
            let s = conjugate_exponent(q)?;
            let shape = thm4_envelope_shape(p, s, &params, cfg.beta, &q_label, cfg.free_constants.thm4_c)?;
            Ok((env, shape.value * ((p - 1.0) * (s - 1.0)).powf(exponent)))
        })();
        match res {
            Ok((env, shape)) => CheckRecord::recorded("generalized_envelope", ins, env, shape),
            Err(e) => CheckRecord::failed("generalized_envelope", ins, Direction::ComputedLeBound, 0.0, &e),
        }
    }));
    Ok(out)
}

/// Default `p` points of the maximal sweep; each maximal-function norm is
/// costly, so an automatic grid is replaced by these.
const MAXIMAL_DEFAULT_P: [f64; 4] = [1.2, 1.5, 2.0, 4.0];

/// Hedberg domination of the potential and empirical Stein ratios.
pub fn run_maximal_check(cfg: &SweepConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    let params = cfg.params;
    let quad = cfg.quad()?;
    let grid = match cfg.p_grid {
        Grid::Auto(_) => MAXIMAL_DEFAULT_P.to_vec(),
        Grid::Explicit(_) => cfg.grid_in(1.0, f64::INFINITY)?,
    };
    let stein = cfg.free_constants.stein(params.d());
    let mut out = Vec::new();

    let hedberg_profiles = [("g0", make_g0(&params)), ("bump_trial_1", RadialProfile::bump_trial(1.0, &params)?)];
    let cases: Vec<(usize, f64, f64)> = (0..hedberg_profiles.len())
        .flat_map(|i| {
            grid.iter()
                .filter(|p| **p < params.critical_p())
                .flat_map(move |&p| cfg.radii.iter().map(move |&r| (i, p, r)))
        })
        .collect();
    out.extend(ordered(&cases, |&(i, p, r)| {
        let (label, prof) = &hedberg_profiles[i];
        let ins = with(
            base_inputs(cfg, &params),
            inputs([("profile", label.to_string()), ("p", p.to_string()), ("radius", r.to_string())]),
        );
        if let Err(why) = prof.lp_integrable(p, &params) {
            return CheckRecord::failed("hedberg_domination", ins, Direction::ComputedLeBound, SLACK_CLOSED_FORM, &Error::Divergent(why));
        }
        let res = (|| -> Result<(f64, f64, f64)> {
            let u = riesz_potential(prof, &params, r, &quad.nested())?;
            let split = hedberg_bound(prof, p, &params, r, &quad)?;
            Ok((u, split.total(), split.delta))
        })();
        match res {
            Ok((u, bound, delta)) => CheckRecord::compare(
                "hedberg_domination",
                with(ins, inputs([("delta", delta)])),
                u,
                bound,
                Direction::ComputedLeBound,
                SLACK_CLOSED_FORM,
            ),
            Err(e) => CheckRecord::failed("hedberg_domination", ins, Direction::ComputedLeBound, SLACK_CLOSED_FORM, &e),
        }
    }));

    let stein_profiles = [
        ("indicator", RadialProfile::indicator_ball(1.0)?),
        ("bump_trial_1", RadialProfile::bump_trial(1.0, &params)?),
        ("g0", make_g0(&params)),
        ("f0", make_f0(&params)),
    ];
    let rows = ordered(&stein_profiles, |(label, prof)| {
        let mf = MaximalFunction::new(prof, &params, &quad);
        grid.iter()
            .map(|&p| {
                let ins = with(base_inputs(cfg, &params), inputs([("profile", label.to_string()), ("p", p.to_string())]));
                if let Err(why) = prof.lp_integrable(p, &params) {
                    return vec![CheckRecord::failed("stein_ratio", ins, Direction::ComputedLeBound, SLACK_QUADRATURE, &Error::Divergent(why))];
                }
                match stein_ratio_with(&mf, p, &quad) {
                    Ok(v) => {
                        let mut recs = vec![CheckRecord::compare(
                            "stein_ratio",
                            ins.clone(),
                            v,
                            stein.classic_bound,
                            Direction::ComputedLeBound,
                            SLACK_QUADRATURE,
                        )];
                        if let Some(b) = stein.dim2_bound {
                            recs.push(CheckRecord::compare("stein_ratio_dim2", ins, v, b, Direction::ComputedLeBound, SLACK_QUADRATURE));
                        }
                        recs
                    }
                    Err(e) => vec![CheckRecord::failed("stein_ratio", ins, Direction::ComputedLeBound, SLACK_QUADRATURE, &e)],
                }
            })
            .collect::<Vec<_>>()
    });
    out.extend(rows.into_iter().flatten().flatten());
    Ok(out)
}

/// `α · sup_p` of the witness ratio over a `p` grid, for each `α` of the
/// grid. Tabulated only.
pub fn run_conjecture_probe(cfg: &SweepConfig) -> Result<Vec<CheckRecord>> {
    cfg.validate()?;
    let quad = cfg.quad()?;
    let alphas = cfg.alpha_values()?;
    let n = match cfg.p_grid {
        Grid::Auto(n) => n,
        Grid::Explicit(ref v) => v.len().max(2),
    };
    let d = cfg.params.d();
    let rows = ordered(&alphas, |&alpha| {
        let params = match ProblemParams::new(d, alpha) {
            Ok(p) => p,
            Err(e) => return CheckRecord::failed("conjecture_probe", BTreeMap::new(), Direction::ComputedLeBound, 0.0, &e),
        };
        let exponent = 1.0 - alpha / params.dim();
        let ins = with(base_inputs(cfg, &params), inputs([("exponent", exponent)]));
        let h = make_h(&params);
        let memo = potential_memo(&h, &params, &quad);
        let mut best: Option<(f64, f64)> = None;
        let (lo, hi) = match p_range(&params) {
            Ok(range) => range,
            Err(e) => return CheckRecord::failed("conjecture_probe", ins, Direction::ComputedLeBound, 0.0, &e),
        };
        for p in auto_grid(lo, hi, n) {
            match witness_ratio(&params, p, &memo, &quad) {
                Ok(pt) => {
                    if best.is_none_or(|(_, v)| pt.ratio > v) {
                        best = Some((p, pt.ratio));
                    }
                }
                Err(e) => return CheckRecord::failed("conjecture_probe", ins, Direction::ComputedLeBound, 0.0, &e),
            }
        }
        let (p_best, ratio) = best.expect("grid is non-empty");
        CheckRecord::recorded("conjecture_probe", with(ins, inputs([("p_at_sup", p_best)])), alpha * ratio, f64::NAN)
    });
    Ok(rows)
}

/// Every sweep, in a fixed order.
pub fn run_all_checks(cfg: &SweepConfig) -> Result<Vec<CheckRecord>> {
    let mut out = Vec::new();
    out.extend(run_norm_validation(cfg)?);
    out.extend(run_witness_sweep(cfg)?);
    out.extend(run_sharp_probe(cfg)?);
    out.extend(run_sandwich_report(cfg)?);
    out.extend(run_truncated_check(cfg)?);
    out.extend(run_generalized_check(cfg)?);
    out.extend(run_maximal_check(cfg)?);
    out.extend(run_conjecture_probe(cfg)?);
    Ok(out)
}
