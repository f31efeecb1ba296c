//! Numerical certification harness: random generatrices, the eigenvalue comparison
//! against omega with a Richardson error bar, the reduction to the first eigenvalue,
//! domain monotonicity, speed scaling, and the log-derivative inequalities.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::curves::families::resample_uniform;
use crate::curves::{omega_curve, Curve};
use crate::error::{Error, Result};
use crate::pipeline::{flatten_stage0, mu_zero};
use crate::profiles::{Boundary, MetricProfile, Profile};
use crate::sturm::{
    eigenvalue, eigenvalues, log_derivative_masked, solve_one, SlSystem,
};
use crate::Fixed;

/// Attempts before [`random_generatrix`] gives up on the strip constraint.
pub const MAX_RETRIES: usize = 100;
const CONTROL_POINTS: usize = 256;

/// Shape parameters of random generatrices, as fractions of `r1 - r2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Roughness {
    /// Largest excursion of `F` away from the straight profile.
    pub amplitude: f64,
    /// Largest excursion of `G`.
    pub transverse: f64,
    /// Half-width of the moving average applied to the underlying walks.
    pub smoothing: usize,
}

impl Default for Roughness {
    fn default() -> Self {
        Self {
            amplitude: 0.3,
            transverse: 0.5,
            smoothing: 12,
        }
    }
}

impl Roughness {
    pub fn zero() -> Self {
        Self {
            amplitude: 0.0,
            transverse: 0.0,
            smoothing: 0,
        }
    }
}

fn moving_average(x: &[f64], half: usize) -> Vec<f64> {
    if half == 0 {
        return x.to_vec();
    }
    let n = x.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            x[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64
        })
        .collect()
}

/// A smoothed random walk on `CONTROL_POINTS + 1` samples, zero at the start (and at
/// the end too when `bridge`), scaled to unit maximum.
fn smoothed_walk(rng: &mut ChaCha8Rng, smoothing: usize, bridge: bool) -> Vec<f64> {
    let m = CONTROL_POINTS;
    let mut w = vec![0.0; m + 1];
    for j in 1..=m {
        w[j] = w[j - 1] + rng.gen_range(-1.0..1.0);
    }
    let mut w = moving_average(&moving_average(&w, smoothing), smoothing);
    let (first, last) = (w[0], w[m]);
    for (j, x) in w.iter_mut().enumerate() {
        let s = j as f64 / m as f64;
        *x -= if bridge { first + s * (last - first) } else { first };
    }
    let peak = w.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    if peak > 0.0 {
        w.iter_mut().for_each(|x| *x /= peak);
    }
    w
}

/// A seeded unit-speed generatrix from `(r1, 0)` to `F = r2`, strictly inside the
/// strip in between, with `n` segments.
pub fn random_generatrix(
    seed: u64,
    bd: &Boundary,
    metric: &MetricProfile,
    roughness: &Roughness,
    n: usize,
) -> Result<Curve> {
    if roughness.amplitude == 0.0 && roughness.transverse == 0.0 {
        return omega_curve(bd, n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = bd.width();
    let m = CONTROL_POINTS;
    let margin = 1e-3 * w;
    for _ in 0..MAX_RETRIES {
        let wf = smoothed_walk(&mut rng, roughness.smoothing, true);
        let wg = smoothed_walk(&mut rng, roughness.smoothing, false);
        let af = roughness.amplitude * rng.gen_range(0.2..1.0);
        let ag = roughness.transverse * rng.gen_range(0.0..1.0);
        let mut f = Vec::with_capacity(m + 1);
        let mut g = Vec::with_capacity(m + 1);
        for j in 0..=m {
            let s = j as f64 / m as f64;
            f.push(bd.r1 - w * s + af * w * 4.0 * s * (1.0 - s) * wf[j]);
            g.push(ag * w * wg[j]);
        }
        f[0] = bd.r1;
        f[m] = bd.r2;
        g[0] = 0.0;
        if f[1..m]
            .iter()
            .any(|&x| !(x > bd.r2 + margin * 1e-3 && x < bd.r1 - margin * 1e-3))
        {
            continue;
        }
        let t = (0..=m).map(|j| j as f64 / m as f64).collect();
        let c = resample_uniform(&Curve::new(t, f, g)?, metric, n)?;
        if c.check_generatrix(bd).is_ok() {
            return Ok(c);
        }
    }
    Err(Error::Validation(format!(
        "random generatrix for seed {seed} rejected {MAX_RETRIES} times"
    )))
}

/// A seeded system with smooth random positive `v` and piecewise-constant random `sigma`.
pub fn random_system(seed: u64, segments: usize, k: f64) -> Result<SlSystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5157);
    let len = rng.gen_range(0.5..3.0);
    let m = CONTROL_POINTS;
    let lv = smoothed_walk(&mut rng, 8, false);
    let ls = smoothed_walk(&mut rng, 8, false);
    let (av, as_) = (rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0));
    let base = rng.gen_range(0.5..2.0);
    let at = |w: &[f64], x: f64| {
        let p = (x / len * m as f64).clamp(0.0, m as f64);
        let i = (p as usize).min(m - 1);
        w[i] + (p - i as f64) * (w[i + 1] - w[i])
    };
    SlSystem::sampled(
        0.0,
        len,
        segments,
        |x| base * (av * at(&lv, x)).exp(),
        |x| (as_ * at(&ls, x)).exp(),
        k,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Strictness certified only beyond the error bar.
pub fn verdict(margin: f64, error_estimate: f64) -> Verdict {
    if margin.abs() <= error_estimate {
        Verdict::Inconclusive
    } else if margin > 0.0 {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialReport {
    pub curve_id: String,
    pub k: f64,
    pub n: usize,
    pub lambda_alpha: f64,
    pub lambda_omega: f64,
    /// `lambda_omega - lambda_alpha`.
    pub margin: f64,
    pub error_estimate: f64,
    pub verdict: Verdict,
}

#[derive(Serialize)]
struct TrialJson<'a> {
    curve_id: &'a str,
    k: Fixed,
    n: usize,
    lambda_alpha: Fixed,
    lambda_omega: Fixed,
    margin: Fixed,
    error_estimate: Fixed,
    verdict: Verdict,
}

impl TrialReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&TrialJson {
            curve_id: &self.curve_id,
            k: Fixed(self.k),
            n: self.n,
            lambda_alpha: Fixed(self.lambda_alpha),
            lambda_omega: Fixed(self.lambda_omega),
            margin: Fixed(self.margin),
            error_estimate: Fixed(self.error_estimate),
            verdict: self.verdict,
        })
        .expect("report serializes")
    }
}

/// Eigenvalues `1..=n_max` of a curve at its grid and at twice the resolution.
fn curve_eigenvalues(c: &Curve, profile: &Profile, k: f64, n_max: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let coarse = SlSystem::from_curve(c, &profile.weight, &profile.metric, k)?;
    let fine = SlSystem::from_curve(&c.refine(2), &profile.weight, &profile.metric, k)?;
    Ok((eigenvalues(&coarse, n_max)?, eigenvalues(&fine, n_max)?))
}

fn report(
    curve_id: &str,
    k: f64,
    n: usize,
    alpha: &(Vec<f64>, Vec<f64>),
    omega: &(Vec<f64>, Vec<f64>),
    bias: f64,
) -> TrialReport {
    let la = alpha.1[n - 1] + bias;
    let lw = omega.1[n - 1];
    let err = (alpha.0[n - 1] - alpha.1[n - 1]).abs() / 3.0 + (omega.0[n - 1] - lw).abs() / 3.0;
    let margin = lw - la;
    TrialReport {
        curve_id: curve_id.to_string(),
        k,
        n,
        lambda_alpha: la,
        lambda_omega: lw,
        margin,
        error_estimate: err,
        verdict: verdict(margin, err),
    }
}

/// Compares `lambda_{k,n}(alpha)` with `lambda_{k,n}(omega)` on matched grids.
pub fn theorem_check(
    alpha: &Curve,
    curve_id: &str,
    k: f64,
    n: usize,
    profile: &Profile,
) -> Result<TrialReport> {
    alpha.check_generatrix(&profile.boundary)?;
    let omega = omega_curve(&profile.boundary, alpha.segments())?;
    let a = curve_eigenvalues(alpha, profile, k, n)?;
    let w = curve_eigenvalues(&omega, profile, k, n)?;
    Ok(report(curve_id, k, n, &a, &w, 0.0))
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub profile: Profile,
    pub seeds: u64,
    pub first_seed: u64,
    pub ks: Vec<f64>,
    pub n_max: usize,
    pub grid: usize,
    pub roughness: Roughness,
    /// Test hook: added to every computed `lambda_alpha`, simulating a broken solver.
    pub fault_bias: f64,
}

impl CampaignConfig {
    pub fn new(profile: Profile) -> Self {
        Self {
            profile,
            seeds: 100,
            first_seed: 0,
            ks: vec![0.0, 1.0, 2.0, 3.0],
            n_max: 3,
            grid: crate::curves::DEFAULT_GRID,
            roughness: Roughness::default(),
            fault_bias: 0.0,
        }
    }
}

/// Runs every (seed, k, n) trial in parallel; reports come back in seed order.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<Vec<TrialReport>> {
    let p = &cfg.profile;
    let omega = omega_curve(&p.boundary, cfg.grid)?;
    let omega_lams: Vec<(Vec<f64>, Vec<f64>)> = cfg
        .ks
        .par_iter()
        .map(|&k| curve_eigenvalues(&omega, p, k, cfg.n_max))
        .collect::<Result<_>>()?;
    let per_seed: Vec<Vec<TrialReport>> = (cfg.first_seed..cfg.first_seed + cfg.seeds)
        .into_par_iter()
        .map(|seed| {
            let alpha = random_generatrix(seed, &p.boundary, &p.metric, &cfg.roughness, cfg.grid)?;
            let id = format!("seed-{seed}");
            let mut out = Vec::with_capacity(cfg.ks.len() * cfg.n_max);
            for (ki, &k) in cfg.ks.iter().enumerate() {
                let a = curve_eigenvalues(&alpha, p, k, cfg.n_max)?;
                for n in 1..=cfg.n_max {
                    out.push(report(&id, k, n, &a, &omega_lams[ki], cfg.fault_bias));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_seed.into_iter().flatten().collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub k: f64,
    pub n: usize,
    pub trials: usize,
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub min_margin: f64,
    pub max_error: f64,
}

pub fn summarize(reports: &[TrialReport]) -> Vec<SummaryRow> {
    let mut keys: Vec<(f64, usize)> = Vec::new();
    for r in reports {
        if !keys.iter().any(|&(k, n)| k == r.k && n == r.n) {
            keys.push((r.k, r.n));
        }
    }
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keys.into_iter()
        .map(|(k, n)| {
            let rows: Vec<&TrialReport> = reports.iter().filter(|r| r.k == k && r.n == n).collect();
            let count = |v: Verdict| rows.iter().filter(|r| r.verdict == v).count();
            SummaryRow {
                k,
                n,
                trials: rows.len(),
                pass: count(Verdict::Pass),
                fail: count(Verdict::Fail),
                inconclusive: count(Verdict::Inconclusive),
                min_margin: rows.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min),
                max_error: rows.iter().map(|r| r.error_estimate).fold(0.0, f64::max),
            }
        })
        .collect()
}

pub fn summary_csv(rows: &[SummaryRow]) -> String {
    let mut out = String::from("k,n,trials,pass,fail,inconclusive,min_margin,max_error\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.k,
            r.n,
            r.trials,
            r.pass,
            r.fail,
            r.inconclusive,
            crate::fmt_f64(r.min_margin),
            crate::fmt_f64(r.max_error)
        ));
    }
    out
}

/// Largest interior root of the `n`-th eigenfunction and the first eigenvalue of the
/// problem restricted to `[root, b]`. For `n = 1` the root is `None` and the
/// restriction is the whole interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Restriction {
    pub root: Option<f64>,
    pub lambda_n: f64,
    pub lambda_restricted: f64,
    /// Richardson errors of `lambda_n` and of the restricted eigenvalue; the latter
    /// includes the effect of the cut point moving with the grid.
    pub lambda_n_error: f64,
    pub restricted_error: f64,
}

struct RootedPair {
    lambda: f64,
    lambda_fine: f64,
    coarse_root: Option<f64>,
    fine_root: Option<f64>,
    root: Option<f64>,
}

/// The `n`-th eigenvalue and largest root on `sys` and `sys.refine(2)`. The reported
/// root is Richardson-extrapolated: discrete roots carry an O(h^2) error which the
/// steep dependence of the restricted eigenvalue on the cut point would amplify.
fn rooted_pair(sys: &SlSystem, fine_sys: &SlSystem, n: usize) -> Result<RootedPair> {
    let coarse = solve_one(sys, n)?;
    let fine = solve_one(fine_sys, n)?;
    let (coarse_root, fine_root) = (coarse.largest_root(), fine.largest_root());
    let root = match (coarse_root, fine_root) {
        (Some(c), Some(f)) => Some(((4.0 * f - c) / 3.0).clamp(sys.a(), sys.b())),
        (c, f) => f.or(c),
    };
    Ok(RootedPair {
        lambda: coarse.lambda,
        lambda_fine: fine.lambda,
        coarse_root,
        fine_root,
        root,
    })
}

fn restricted_first(sys: &SlSystem, root: Option<f64>, whole: f64) -> Result<f64> {
    match root {
        Some(tau) => eigenvalue(&sys.restrict(tau, sys.b())?, 1),
        None => Ok(whole),
    }
}

pub fn restriction_identity(sys: &SlSystem, n: usize) -> Result<Restriction> {
    restriction_identity_with(sys, &sys.refine(2), n)
}

fn restriction_identity_with(sys: &SlSystem, fine_sys: &SlSystem, n: usize) -> Result<Restriction> {
    let rp = rooted_pair(sys, fine_sys, n)?;
    let coarse = restricted_first(sys, rp.coarse_root, rp.lambda)?;
    let fine = restricted_first(fine_sys, rp.fine_root, rp.lambda_fine)?;
    Ok(Restriction {
        root: rp.root,
        lambda_n: rp.lambda,
        lambda_restricted: restricted_first(sys, rp.root, rp.lambda)?,
        lambda_n_error: (rp.lambda - rp.lambda_fine).abs() / 3.0,
        restricted_error: (coarse - fine).abs() / 3.0,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SturmReport {
    pub k: f64,
    pub n: usize,
    /// `lambda_{k,n}(chi_0) >= lambda_{k,n}(omega) - tol_eig`.
    pub applicable: bool,
    pub lambda_chi0: f64,
    pub lambda_omega: f64,
    pub tol_eig: f64,
    /// Largest root of omega's eigenfunction (0 when there is none).
    pub z0: f64,
    /// Largest root of `chi_0`'s eigenfunction (0 when there is none).
    pub tau0: f64,
    pub roots_ok: bool,
    pub lambda_restricted: f64,
    pub identity_ok: bool,
}

/// Checks the root comparison `tau_0 <= z_0` and `lambda_{k,n}(chi_0) = lambda_{k,1}`
/// of `chi_0` restricted to `[tau_0, L]`, where `chi_0` is the stage-0 flattening of
/// `alpha` at `mu_0 = k / sqrt(lambda_{k,n}(omega))`.
pub fn sturm_comparison_check(alpha: &Curve, k: f64, n: usize, profile: &Profile) -> Result<SturmReport> {
    let grid = alpha.segments();
    let omega = omega_curve(&profile.boundary, grid)?;
    let w_sys = SlSystem::from_curve(&omega, &profile.weight, &profile.metric, k)?;
    let w = rooted_pair(&w_sys, &w_sys.refine(2), n)?;
    let lambda_omega = w.lambda;
    let z0 = w.root.unwrap_or(0.0);

    let mu0 = mu_zero(k, lambda_omega)?;
    let (chi0, _) = flatten_stage0(alpha, mu0, profile)?;
    // flattening leaves an irregular mesh, on which the restricted eigenvalue's
    // sensitivity to the cut point swamps the identity; a uniform resample of the
    // same curve (exact wherever it is straight) restores grid-level accuracy
    let chi0 = resample_uniform(&chi0, &profile.metric, grid)?;
    let c_sys = SlSystem::from_curve(&chi0, &profile.weight, &profile.metric, k)?;
    let c_fine = SlSystem::from_curve(&chi0.refine(2), &profile.weight, &profile.metric, k)?;
    let rest = restriction_identity_with(&c_sys, &c_fine, n)?;
    let tol_eig = 10.0
        * ((w.lambda - w.lambda_fine).abs() / 3.0)
            .max(rest.lambda_n_error)
            .max(rest.restricted_error);

    let applicable = rest.lambda_n >= lambda_omega - tol_eig;
    let tau0 = rest.root.unwrap_or(0.0);
    let h = chi0
        .t()
        .windows(2)
        .chain(omega.t().windows(2))
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max);
    Ok(SturmReport {
        k,
        n,
        applicable,
        lambda_chi0: rest.lambda_n,
        lambda_omega,
        tol_eig,
        z0,
        tau0,
        roots_ok: tau0 <= z0 + 2.0 * h,
        lambda_restricted: rest.lambda_restricted,
        identity_ok: (rest.lambda_restricted - rest.lambda_n).abs() <= tol_eig.max(1e-9 * rest.lambda_n),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub lambda_full: f64,
    pub lambda_sub: f64,
    pub margin: f64,
    pub error_estimate: f64,
    pub holds: bool,
}

/// `lambda_{k,n}` on a proper subinterval exceeds the full-interval value by more than
/// the combined Richardson error bars.
pub fn domain_monotonicity_check(sys: &SlSystem, n: usize, lo: f64, hi: f64) -> Result<MonotonicityReport> {
    if lo <= sys.a() && hi >= sys.b() {
        return Err(Error::Domain(format!(
            "[{lo}, {hi}] is not a proper subinterval of [{}, {}]",
            sys.a(),
            sys.b()
        )));
    }
    let sub = sys.restrict(lo, hi)?;
    let (full_c, full_f) = (eigenvalue(sys, n)?, eigenvalue(&sys.refine(2), n)?);
    let (sub_c, sub_f) = (eigenvalue(&sub, n)?, eigenvalue(&sub.refine(2), n)?);
    let err = (full_c - full_f).abs() / 3.0 + (sub_c - sub_f).abs() / 3.0;
    let margin = sub_f - full_f;
    Ok(MonotonicityReport {
        lambda_full: full_f,
        lambda_sub: sub_f,
        margin,
        error_estimate: err,
        holds: margin > err,
    })
}

/// Relative deviation of `c^2 lambda_{0,n}(v, c sigma)` from `lambda_{0,n}(v, sigma)`.
pub fn speed_scaling_check(sys: &SlSystem, n: usize, c: f64) -> Result<f64> {
    let base = sys.with_k(0.0)?;
    let a = eigenvalue(&base, n)?;
    let b = eigenvalue(&base.scale_speed(c)?, n)?;
    Ok((b * c * c - a).abs() / a)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LogDerivativeReport {
    pub k: f64,
    pub lambda: f64,
    pub mu0: f64,
    pub samples: usize,
    /// `Y' < 0` between consecutive samples.
    pub decreasing: bool,
    /// `Y^2 > k^2 - lambda V^2` at every sample.
    pub square_bound: bool,
    /// `Y < 0` at every sample past `V_omega^{-1}(mu_0)`; vacuous when `mu_0 < V(r2)`.
    pub negative_tail: bool,
    /// Samples at or past `V_omega^{-1}(mu_0)`.
    pub tail_samples: usize,
    /// Largest relative residual of `Y' = k^2/V - lambda V - Y^2/V`.
    pub riccati_residual: f64,
    /// `mu_0(n) < V_omega(z_0(n))` for `n = 1, 2, 3`.
    pub root_bound: bool,
}

impl LogDerivativeReport {
    pub fn holds(&self, riccati_tol: f64) -> bool {
        self.decreasing
            && self.square_bound
            && self.negative_tail
            && self.root_bound
            && self.riccati_residual <= riccati_tol
    }
}

/// Mask for the inequality checks (fraction of `max |phi|`).
pub const Y_SAMPLE_MASK: f64 = 1e-3;
/// Stricter mask for the Riccati residual, which differentiates `Y` once more.
pub const RICCATI_MASK: f64 = 0.2;

/// Samples omega's first log-derivative and checks its sign, monotonicity, lower
/// bound, Riccati equation, and the root bound on `mu_0`.
pub fn log_derivative_check(profile: &Profile, k: f64, grid: usize) -> Result<LogDerivativeReport> {
    let bd = &profile.boundary;
    let omega = omega_curve(bd, grid)?;
    let sys = SlSystem::from_curve(&omega, &profile.weight, &profile.metric, k)?;
    let ep = solve_one(&sys, 1)?;
    let lambda = ep.lambda;
    let v_at = |t: f64| profile.weight.eval(bd.r1 - t);
    let mu0 = mu_zero(k, lambda)?;
    let tail_start = if mu0 >= profile.weight.eval(bd.r2) && mu0 < profile.weight.eval(bd.r1) {
        Some(bd.r1 - profile.weight.invert(mu0, bd)?)
    } else {
        None
    };

    let tr = log_derivative_masked(&ep, &sys, Y_SAMPLE_MASK);
    let samples: Vec<(f64, f64)> = tr.valid().collect();
    let decreasing = samples.windows(2).all(|w| w[1].1 < w[0].1);
    let square_bound = samples
        .iter()
        .all(|&(t, y)| y * y > k * k - lambda * v_at(t).powi(2));
    let tail: Vec<f64> = match tail_start {
        Some(t0) => samples.iter().filter(|s| s.0 >= t0).map(|s| s.1).collect(),
        None => Vec::new(),
    };
    let negative_tail = tail.iter().all(|&y| y < 0.0);

    let strict = log_derivative_masked(&ep, &sys, RICCATI_MASK);
    let mut riccati_residual: f64 = 0.0;
    for i in 0..strict.t.len().saturating_sub(1) {
        let (y0, y1) = (strict.y[i], strict.y[i + 1]);
        if !(y0.is_finite() && y1.is_finite()) {
            continue;
        }
        let (t0, t1) = (strict.t[i], strict.t[i + 1]);
        let t = 0.5 * (t0 + t1);
        let y = 0.5 * (y0 + y1);
        let v = v_at(t);
        let lhs = (y1 - y0) / (t1 - t0);
        let terms = [k * k / v, lambda * v, y * y / v];
        let rhs = terms[0] - terms[1] - terms[2];
        let scale = terms.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        riccati_residual = riccati_residual.max((lhs - rhs).abs() / scale);
    }

    let mut root_bound = true;
    let pairs = crate::sturm::solve(&sys, 3)?;
    for ep in &pairs {
        let z = ep.largest_root().unwrap_or(0.0);
        root_bound &= mu_zero(k, ep.lambda)? < v_at(z);
    }

    Ok(LogDerivativeReport {
        k,
        lambda,
        mu0,
        samples: samples.len(),
        decreasing,
        square_bound,
        negative_tail,
        tail_samples: tail.len(),
        riccati_residual,
        root_bound,
    })
}
