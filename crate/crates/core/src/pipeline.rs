//! The flattening pipeline: a generatrix `alpha` is deformed through curves
//! `chi_0, chi_1, …` that agree with omega on longer and longer initial pieces,
//! following the `mu_m` schedule driven by the log-derivative of omega's first
//! eigenfunction, until the whole curve is omega.

use serde::Serialize;

use crate::curves::{
    arclength_reparametrize, first_crossing, omega_curve, running_min_flatten, splice_with_omega,
    validate_gamma_membership, zero_transverse_before, Curve, GammaReport, DEFAULT_GRID,
};
use crate::error::{Error, Result};
use crate::profiles::Profile;
use crate::sturm::{
    eigenvalue, log_derivative, solve_one, EigenPair, LogDerivativeTrace, SlSystem,
};
use crate::Fixed;

pub const STAGE_CAP: usize = 64;

#[derive(Clone, Copy, Debug)]
pub struct PipelineConfig {
    /// Segments of the omega reference curve.
    pub grid: usize,
    pub stage_cap: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            stage_cap: STAGE_CAP,
        }
    }
}

/// Everything the pipeline needs to know about omega for a given `k`.
#[derive(Clone, Debug)]
pub struct OmegaData {
    pub curve: Curve,
    pub system: SlSystem,
    pub pair: EigenPair,
    /// `lambda_{k,1}(omega)` at the working grid.
    pub lambda: f64,
    /// Richardson estimate of the discretization error in `lambda`.
    pub error: f64,
    pub y: LogDerivativeTrace,
    pub mu0: f64,
}

pub fn omega_data(profile: &Profile, k: f64, grid: usize) -> Result<OmegaData> {
    let curve = omega_curve(&profile.boundary, grid)?;
    let system = SlSystem::from_curve(&curve, &profile.weight, &profile.metric, k)?;
    let pair = solve_one(&system, 1)?;
    let fine = omega_curve(&profile.boundary, 2 * grid)?;
    let fine_lambda = eigenvalue(
        &SlSystem::from_curve(&fine, &profile.weight, &profile.metric, k)?,
        1,
    )?;
    let y = log_derivative(&pair, &system);
    Ok(OmegaData {
        lambda: pair.lambda,
        error: (pair.lambda - fine_lambda).abs() / 3.0,
        mu0: mu_zero(k, pair.lambda)?,
        curve,
        system,
        pair,
        y,
    })
}

/// `mu_0 = k / sqrt(lambda_{k,1}(omega))`.
pub fn mu_zero(k: f64, lambda_omega: f64) -> Result<f64> {
    if !(lambda_omega > 0.0) {
        return Err(Error::Domain(format!(
            "lambda(omega) = {lambda_omega} must be positive"
        )));
    }
    Ok(k / lambda_omega.sqrt())
}

/// One step of the schedule: `(y_{m-1}, mu_m)` from `mu_{m-1}`.
pub fn mu_step(
    mu_prev: f64,
    k: f64,
    omega: &OmegaData,
    profile: &Profile,
) -> Result<(f64, f64)> {
    let bd = &profile.boundary;
    let floor = profile.weight.eval(bd.r2);
    let top = profile.weight.eval(bd.r1);
    if !(mu_prev >= floor && mu_prev < top) {
        return Err(Error::Domain(format!(
            "mu = {mu_prev} outside [V(r2), V(r1)) = [{floor}, {top})"
        )));
    }
    if mu_prev == floor {
        return Ok((f64::NEG_INFINITY, floor));
    }
    let at = bd.r1 - profile.weight.invert(mu_prev, bd)?;
    let y = omega.y.eval_at(at);
    if !y.is_finite() {
        return Err(Error::Consistency(format!(
            "log-derivative of omega unavailable at t = {at}"
        )));
    }
    if y * y > k * k {
        return Ok((y, floor));
    }
    Ok((y, floor.max(((k * k - y * y) / omega.lambda).sqrt())))
}

fn membership_mu(profile: &Profile, mu: f64) -> f64 {
    mu.max(profile.weight.eval(profile.boundary.r2))
}

fn gamma_report(c: &Curve, profile: &Profile, mu: f64) -> GammaReport {
    validate_gamma_membership(
        c,
        &profile.weight,
        &profile.metric,
        membership_mu(profile, mu),
        &profile.boundary,
    )
}

fn require_gamma(c: &Curve, profile: &Profile, mu: f64, stage: usize) -> Result<()> {
    let rep = gamma_report(c, profile, mu);
    if rep.all() {
        Ok(())
    } else {
        Err(Error::Pipeline {
            stage,
            reason: format!("stage curve is not in Gamma_mu for mu = {mu}: {rep:?}"),
        })
    }
}

/// Stage 0: zero `G'` before the first `V = mu0` crossing, take the running minimum
/// of `F` there, reparametrize by arc length. Returns the curve and `P_0`.
pub fn flatten_stage0(alpha: &Curve, mu0: f64, profile: &Profile) -> Result<(Curve, f64)> {
    let p0 = first_crossing(alpha, &profile.weight, mu0)?;
    let beta = zero_transverse_before(alpha, p0)?;
    let gamma = running_min_flatten(&beta, p0)?;
    let chi = arclength_reparametrize(&gamma, &profile.metric)?;
    require_gamma(&chi, profile, mu0, 0)?;
    Ok((chi, p0))
}

/// Stage `m`: zero `G'` before the first `V = mu_m` crossing, reparametrize, and
/// splice in omega up to that level. A curve already in `Gamma_{mu_m}` is returned
/// unchanged (with `P_m` reported as its omega-prefix length).
pub fn flatten_stage_m(
    chi_prev: &Curve,
    mu_m: f64,
    m: usize,
    profile: &Profile,
) -> Result<(Curve, f64)> {
    let mu = membership_mu(profile, mu_m);
    let p = first_crossing(chi_prev, &profile.weight, mu)?;
    if gamma_report(chi_prev, profile, mu).all() {
        return Ok((chi_prev.clone(), p));
    }
    let beta = zero_transverse_before(chi_prev, p)?;
    let gamma = arclength_reparametrize(&beta, &profile.metric)?;
    let chi = splice_with_omega(&gamma, &profile.weight, &profile.metric, mu, &profile.boundary)
        .map_err(|e| Error::Pipeline {
            stage: m,
            reason: e.to_string(),
        })?;
    require_gamma(&chi, profile, mu, m)?;
    Ok((chi, p))
}

/// Sign of `-phi'^2 v^2 / sigma^2 + k^2 phi^2 - lambda phi^2 v^2` on `[0, p)`:
/// `Some(true)` if negative at every sampled point, `None` when the hypothesis
/// `lambda >= lambda(omega) - tol` does not hold.
pub fn prufer_sign_check(
    pair: &EigenPair,
    sys: &SlSystem,
    p: f64,
    lambda_omega: f64,
    tol: f64,
) -> Option<bool> {
    if pair.lambda < lambda_omega - tol {
        return None;
    }
    let k2 = sys.k() * sys.k();
    let t = sys.t();
    let ok = (0..sys.segments())
        .filter(|&i| t[i + 1] <= p && sys.sigma()[i] > 0.0)
        .all(|i| {
            let h = t[i + 1] - t[i];
            let d = (pair.phi[i + 1] - pair.phi[i]) / h;
            let phi = 0.5 * (pair.phi[i] + pair.phi[i + 1]);
            let v = 0.5 * (sys.v()[i] + sys.v()[i + 1]);
            let s = sys.sigma()[i];
            -d * d * v * v / (s * s) + k2 * phi * phi - pair.lambda * phi * phi * v * v < 0.0
        });
    Some(ok)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub m: usize,
    pub mu: f64,
    /// `y_m = Y(V_omega^{-1}(mu_m))`, `-inf` once `mu_m = V(r2)`.
    pub y: f64,
    /// Crossing parameter `P_m` on the incoming curve.
    pub p: f64,
    pub curve: Curve,
    pub lambda: f64,
    /// Sign check of the Prüfer-type quantity on `[0, P_m)` for the incoming curve.
    pub prufer_negative: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlattenTrace {
    pub k: f64,
    /// The schedule reached `V(r2)`.
    pub terminal: bool,
    pub lambda_omega: f64,
    pub lambda_alpha: f64,
    /// Ten times the largest Richardson error among omega, alpha and the stage curves.
    pub tol_eig: f64,
    pub stages: Vec<StageRecord>,
    /// The full schedule `mu_0, mu_1, …`; stages stop being recorded once the curve is
    /// omega, after which every further stage is the identity.
    pub mu_chain: Vec<f64>,
}

#[derive(Serialize)]
struct StageJson<'a> {
    m: usize,
    mu: Fixed,
    y: Fixed,
    #[serde(rename = "P")]
    p: Fixed,
    lambda: Fixed,
    curve_file: &'a str,
}

#[derive(Serialize)]
struct TraceJson<'a> {
    k: Fixed,
    terminal: bool,
    lambda_omega: Fixed,
    lambda_alpha: Fixed,
    tol_eig: Fixed,
    mu_chain: Vec<Fixed>,
    stages: Vec<StageJson<'a>>,
}

impl FlattenTrace {
    /// The λ column, stage by stage.
    pub fn lambdas(&self) -> Vec<f64> {
        self.stages.iter().map(|s| s.lambda).collect()
    }

    pub fn final_curve(&self) -> &Curve {
        &self.stages.last().expect("a trace has at least one stage").curve
    }

    /// JSON document; `curve_files[m]` names the file holding stage `m`'s curve.
    pub fn to_json(&self, curve_files: &[String]) -> String {
        let doc = TraceJson {
            k: Fixed(self.k),
            terminal: self.terminal,
            lambda_omega: Fixed(self.lambda_omega),
            lambda_alpha: Fixed(self.lambda_alpha),
            tol_eig: Fixed(self.tol_eig),
            mu_chain: self.mu_chain.iter().map(|&x| Fixed(x)).collect(),
            stages: self
                .stages
                .iter()
                .enumerate()
                .map(|(i, s)| StageJson {
                    m: s.m,
                    mu: Fixed(s.mu),
                    y: Fixed(s.y),
                    p: Fixed(s.p),
                    lambda: Fixed(s.lambda),
                    curve_file: curve_files.get(i).map_or("", String::as_str),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("trace serializes")
    }
}

/// Stage curves lose nodes where flattening merges them; they are solved on a mesh no
/// coarser than the working grid.
fn stage_lambda(c: &Curve, profile: &Profile, k: f64, h_max: f64) -> Result<(EigenPair, SlSystem)> {
    let sys = SlSystem::from_curve(&c.subdivide_to(h_max), &profile.weight, &profile.metric, k)?;
    Ok((solve_one(&sys, 1)?, sys))
}

/// Richardson error of a first eigenvalue already solved on `sys`.
fn richardson(lambda: f64, sys: &SlSystem) -> Result<f64> {
    Ok((lambda - eigenvalue(&sys.refine(2), 1)?).abs() / 3.0)
}

fn is_omega(c: &Curve, profile: &Profile) -> bool {
    gamma_report(c, profile, profile.weight.eval(profile.boundary.r2)).all()
}

/// Runs the whole pipeline on a unit-speed generatrix.
pub fn run_pipeline(
    alpha: &Curve,
    k: f64,
    profile: &Profile,
    cfg: &PipelineConfig,
) -> Result<FlattenTrace> {
    alpha.check_generatrix(&profile.boundary)?;
    let omega = omega_data(profile, k, cfg.grid)?;
    run_pipeline_with(alpha, k, profile, &omega, cfg)
}

/// As [`run_pipeline`] with precomputed omega data (shared across runs).
pub fn run_pipeline_with(
    alpha: &Curve,
    k: f64,
    profile: &Profile,
    omega: &OmegaData,
    cfg: &PipelineConfig,
) -> Result<FlattenTrace> {
    let floor = profile.weight.eval(profile.boundary.r2);
    let h_max = omega.curve.length() / omega.curve.segments() as f64;
    let alpha_sys = SlSystem::from_curve(alpha, &profile.weight, &profile.metric, k)?;
    let lambda_alpha = eigenvalue(&alpha_sys, 1)?;
    let lambda_alpha_fine = eigenvalue(&alpha_sys.refine(2), 1)?;
    let alpha_error = (lambda_alpha - lambda_alpha_fine).abs() / 3.0;
    let tol_eig = 10.0 * omega.error.max(alpha_error);

    let mu0 = omega.mu0;
    let (chi0, p0) = flatten_stage0(alpha, mu0, profile)?;
    let (pair0, sys0) = stage_lambda(&chi0, profile, k, h_max)?;
    let tol_eig = tol_eig.max(10.0 * richardson(pair0.lambda, &sys0)?);
    let alpha_pair = solve_one(&alpha_sys, 1)?;
    let mut trace = FlattenTrace {
        k,
        terminal: false,
        lambda_omega: omega.lambda,
        lambda_alpha,
        tol_eig,
        stages: vec![StageRecord {
            m: 0,
            mu: mu0,
            y: f64::NAN,
            p: p0,
            prufer_negative: prufer_sign_check(&alpha_pair, &alpha_sys, p0, omega.lambda, tol_eig),
            lambda: pair0.lambda,
            curve: chi0,
        }],
        mu_chain: vec![mu0],
    };

    let mut mu = mu0.max(floor);
    let mut frozen = is_omega(trace.final_curve(), profile);
    loop {
        if mu <= floor {
            if let Some(last) = trace.stages.last_mut() {
                if last.y.is_nan() {
                    last.y = f64::NEG_INFINITY;
                }
            }
            trace.terminal = true;
            return Ok(trace);
        }
        if trace.mu_chain.len() >= cfg.stage_cap {
            return Err(Error::NonTermination {
                stalled_mu: mu,
                trace: Box::new(trace),
            });
        }
        let (y, next) = mu_step(mu, k, omega, profile)?;
        let m = trace.mu_chain.len();
        if !frozen {
            trace.stages.last_mut().expect("stage 0 exists").y = y;
        }
        trace.mu_chain.push(next);
        mu = next;
        if frozen {
            continue;
        }
        let prev = trace.final_curve().clone();
        let (prev_pair, prev_sys) = stage_lambda(&prev, profile, k, h_max)?;
        let (chi, p) = flatten_stage_m(&prev, next, m, profile)?;
        let (pair, sys) = stage_lambda(&chi, profile, k, h_max)?;
        trace.tol_eig = trace.tol_eig.max(10.0 * richardson(pair.lambda, &sys)?);
        frozen = is_omega(&chi, profile);
        trace.stages.push(StageRecord {
            m,
            mu: next,
            y: f64::NAN,
            p,
            prufer_negative: prufer_sign_check(&prev_pair, &prev_sys, p, omega.lambda, trace.tol_eig),
            lambda: pair.lambda,
            curve: chi,
        });
    }
}
