//! Weighted Sturm–Liouville eigenvalues `lambda_{k,n}(v, sigma)`.
//!
//! The quotient is
//!
//! ```text
//!   ( ∫ w'^2 v/sigma + k^2 w^2 sigma/v ) / ( ∫ w^2 v sigma )
//! ```
//!
//! over functions vanishing at both ends. It is discretized by linear finite elements
//! on the system's grid; the mass and zeroth-order terms use the average of the
//! lumped and consistent element matrices, which cancels their leading `h^2` errors
//! against each other. The result is a symmetric tridiagonal pencil solved in
//! [`tridiag`].

use serde::Serialize;

use crate::curves::{speed, Curve, COLLAPSE_SPEED};
use crate::error::{Error, Result};
use crate::profiles::{MetricProfile, WeightProfile};

pub mod bessel;
pub mod dense;
pub mod spectrum;
pub(crate) mod tridiag;

pub use bessel::{bessel_jy, bessel_oracle, bessel_radial_roots};
pub use dense::dense_oracle_solve;
pub use spectrum::{assemble_spectrum, SpectrumEntry};

use tridiag::Pencil;

/// Default fraction of `max |phi|` below which log-derivative samples are masked.
pub const LOG_DERIVATIVE_MASK: f64 = 1e-3;

/// Coefficient data of one Sturm–Liouville problem: nodes `t`, weight `v` at the nodes
/// (linear in between) and speed `sigma` per segment.
#[derive(Clone, Debug, PartialEq)]
pub struct SlSystem {
    t: Vec<f64>,
    v: Vec<f64>,
    sigma: Vec<f64>,
    k: f64,
}

impl SlSystem {
    pub fn new(t: Vec<f64>, v: Vec<f64>, sigma: Vec<f64>, k: f64) -> Result<Self> {
        if t.len() < 2 || v.len() != t.len() || sigma.len() + 1 != t.len() {
            return Err(Error::Validation(format!(
                "system sizes do not match: {} nodes, {} weights, {} speeds",
                t.len(),
                v.len(),
                sigma.len()
            )));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) || t.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("system grid must be strictly increasing".into()));
        }
        if v.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::Validation("weight v must be positive".into()));
        }
        if sigma.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
            return Err(Error::Validation("speed sigma must be nonnegative".into()));
        }
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::Validation(format!("k = {k} must be a finite nonnegative number")));
        }
        Ok(Self { t, v, sigma, k })
    }

    /// Uniform grid on `[a, b]` with `v` sampled at nodes and `sigma` at segment midpoints.
    pub fn sampled(
        a: f64,
        b: f64,
        n: usize,
        v: impl Fn(f64) -> f64,
        sigma: impl Fn(f64) -> f64,
        k: f64,
    ) -> Result<Self> {
        let t: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let vv = t.iter().map(|&x| v(x)).collect();
        let ss = t.windows(2).map(|w| sigma(0.5 * (w[0] + w[1]))).collect();
        Self::new(t, vv, ss, k)
    }

    /// The system of a generatrix: `v = V(F)` at the nodes and the curve's g-speed.
    pub fn from_curve(
        c: &Curve,
        weight: &WeightProfile,
        metric: &MetricProfile,
        k: f64,
    ) -> Result<Self> {
        let v = c.f().iter().map(|&x| weight.eval(x)).collect();
        Self::new(c.t().to_vec(), v, speed(c, metric).sigma, k)
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn a(&self) -> f64 {
        self.t[0]
    }

    pub fn b(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    pub fn segments(&self) -> usize {
        self.sigma.len()
    }

    pub fn with_k(&self, k: f64) -> Result<Self> {
        Self::new(self.t.clone(), self.v.clone(), self.sigma.clone(), k)
    }

    /// The same continuous problem on a grid with every segment split `factor` times.
    pub fn refine(&self, factor: usize) -> SlSystem {
        let factor = factor.max(1);
        let mut t = Vec::with_capacity(self.segments() * factor + 1);
        let mut v = Vec::with_capacity(t.capacity());
        let mut sigma = Vec::with_capacity(t.capacity());
        for i in 0..self.segments() {
            for j in 0..factor {
                let u = j as f64 / factor as f64;
                t.push(self.t[i] + u * (self.t[i + 1] - self.t[i]));
                v.push(self.v[i] + u * (self.v[i + 1] - self.v[i]));
                sigma.push(self.sigma[i]);
            }
        }
        t.push(self.b());
        v.push(self.v[self.segments()]);
        SlSystem {
            t,
            v,
            sigma,
            k: self.k,
        }
    }

    /// Replaces `sigma` by `c * sigma`.
    pub fn scale_speed(&self, c: f64) -> Result<SlSystem> {
        Self::new(
            self.t.clone(),
            self.v.clone(),
            self.sigma.iter().map(|s| s * c).collect(),
            self.k,
        )
    }

    /// The problem on `[lo, hi]`, splitting segments at the cut points.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<SlSystem> {
        if !(lo >= self.a() && hi <= self.b() && hi > lo) {
            return Err(Error::Domain(format!(
                "[{lo}, {hi}] is not a subinterval of [{}, {}]",
                self.a(),
                self.b()
            )));
        }
        let eps = 1e-12 * (self.b() - self.a());
        let mut t = vec![lo];
        let mut v = vec![self.v_at(lo)];
        let mut sigma = Vec::new();
        for i in 0..self.t.len() {
            if self.t[i] > lo + eps && self.t[i] < hi - eps {
                sigma.push(self.sigma_at(0.5 * (t[t.len() - 1] + self.t[i])));
                t.push(self.t[i]);
                v.push(self.v[i]);
            }
        }
        sigma.push(self.sigma_at(0.5 * (t[t.len() - 1] + hi)));
        t.push(hi);
        v.push(self.v_at(hi));
        Self::new(t, v, sigma, self.k)
    }

    fn segment_of(&self, s: f64) -> usize {
        match self.t.partition_point(|&x| x <= s) {
            0 => 0,
            i => (i - 1).min(self.segments() - 1),
        }
    }

    /// Piecewise-linear weight at `s`.
    pub fn v_at(&self, s: f64) -> f64 {
        let i = self.segment_of(s);
        let u = ((s - self.t[i]) / (self.t[i + 1] - self.t[i])).clamp(0.0, 1.0);
        self.v[i] + u * (self.v[i + 1] - self.v[i])
    }

    /// Piecewise-constant speed at `s`.
    pub fn sigma_at(&self, s: f64) -> f64 {
        self.sigma[self.segment_of(s)]
    }

    fn collapsed(&self, i: usize) -> bool {
        self.sigma[i] < COLLAPSE_SPEED
    }

    /// Maps every node to its index after collapsing stationary segments.
    fn node_map(&self) -> (Vec<usize>, usize) {
        let mut map = Vec::with_capacity(self.t.len());
        let mut r = 0;
        map.push(0);
        for i in 0..self.segments() {
            if !self.collapsed(i) {
                r += 1;
            }
            map.push(r);
        }
        (map, r)
    }

    /// Element integrals of segment `i`: (stiffness, zeroth-order, mass) coefficients.
    fn element(&self, i: usize) -> (f64, f64, f64) {
        let h = self.t[i + 1] - self.t[i];
        let vb = 0.5 * (self.v[i] + self.v[i + 1]);
        let s = self.sigma[i];
        (vb / (s * h), self.k * self.k * s * h / vb, vb * s * h)
    }

    fn pencil(&self) -> Result<(Pencil, Vec<usize>)> {
        let (map, last) = self.node_map();
        if last < 2 {
            return Err(Error::DegenerateCurve(
                "fewer than two moving segments remain after collapsing stationary ones".into(),
            ));
        }
        let m = last - 1;
        let mut p = Pencil {
            a_diag: vec![0.0; m],
            a_off: vec![0.0; m - 1],
            b_diag: vec![0.0; m],
            b_off: vec![0.0; m - 1],
        };
        for i in 0..self.segments() {
            if self.collapsed(i) {
                continue;
            }
            let (stiff, pot, mass) = self.element(i);
            let (ad, ao) = (stiff + pot * 5.0 / 12.0, -stiff + pot / 12.0);
            let (bd, bo) = (mass * 5.0 / 12.0, mass / 12.0);
            let (l, r) = (map[i], map[i + 1]);
            if l >= 1 {
                p.a_diag[l - 1] += ad;
                p.b_diag[l - 1] += bd;
            }
            if r <= m {
                p.a_diag[r - 1] += ad;
                p.b_diag[r - 1] += bd;
            }
            if l >= 1 && r <= m {
                p.a_off[l - 1] += ao;
                p.b_off[l - 1] += bo;
            }
        }
        Ok((p, map))
    }

    /// Discrete energy and mass forms `(a(w, w), b(w, w))` of a nodal trial function.
    fn forms(&self, w: &[f64]) -> (f64, f64) {
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.segments() {
            let (a, b) = (w[i], w[i + 1]);
            if self.collapsed(i) {
                if a != b {
                    num = f64::INFINITY;
                }
                continue;
            }
            let (stiff, pot, mass) = self.element(i);
            let quad = (5.0 * (a * a + b * b) + 2.0 * a * b) / 12.0;
            num += stiff * (b - a) * (b - a) + pot * quad;
            den += mass * quad;
        }
        (num, den)
    }

    /// `∫ phi psi v sigma` with the solver's mass form.
    pub fn mass_inner(&self, phi: &[f64], psi: &[f64]) -> f64 {
        (0..self.segments())
            .filter(|&i| !self.collapsed(i))
            .map(|i| {
                let (_, _, mass) = self.element(i);
                let (a, b, c, d) = (phi[i], phi[i + 1], psi[i], psi[i + 1]);
                mass * (5.0 * (a * c + b * d) + (a * d + b * c)) / 12.0
            })
            .sum()
    }
}

/// Rayleigh quotient of a nodal trial function vanishing at both ends.
pub fn rayleigh_quotient(w: &[f64], sys: &SlSystem) -> Result<f64> {
    if w.len() != sys.t.len() {
        return Err(Error::Validation(format!(
            "trial function has {} samples, grid has {}",
            w.len(),
            sys.t.len()
        )));
    }
    if w[0] != 0.0 || w[w.len() - 1] != 0.0 {
        return Err(Error::Domain("trial function must vanish at both ends".into()));
    }
    let (num, den) = sys.forms(w);
    if !(den > 0.0) {
        return Err(Error::DegenerateTrial);
    }
    Ok(num / den)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenPair {
    pub n: usize,
    pub lambda: f64,
    pub t: Vec<f64>,
    pub phi: Vec<f64>,
    pub roots: usize,
}

impl EigenPair {
    /// Interior sign-change locations of `phi`, by quadratic interpolation through the
    /// bracketing nodes and the nearer outside neighbour (linear as a fallback).
    pub fn root_locations(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut last: Option<usize> = None;
        for i in 1..self.phi.len() - 1 {
            if self.phi[i] == 0.0 {
                continue;
            }
            if let Some(j) = last {
                if self.phi[j].signum() != self.phi[i].signum() {
                    out.push(self.bracketed_root(j, i));
                }
            }
            last = Some(i);
        }
        out
    }

    fn bracketed_root(&self, j: usize, i: usize) -> f64 {
        let (t, phi) = (&self.t, &self.phi);
        let (a, b) = (phi[j], phi[i]);
        let linear = t[j] + a / (a - b) * (t[i] - t[j]);
        let third = [j.checked_sub(1), (i + 1 < phi.len()).then_some(i + 1)]
            .into_iter()
            .flatten()
            // a repeated value marks a stationary stretch, where phi is not a function of t
            .filter(|&m| phi[m] != phi[if m < j { j } else { i }])
            .min_by(|&p, &q| {
                let d = |m: usize| if m < j { t[j] - t[m] } else { t[m] - t[i] };
                d(p).total_cmp(&d(q))
            });
        let Some(m) = third else { return linear };
        // Newton form through (t_j, a), (t_i, b), (t_m, phi_m)
        let d1 = (b - a) / (t[i] - t[j]);
        let d2 = ((phi[m] - b) / (t[m] - t[i]) - (phi[m] - a) / (t[m] - t[j])) / (t[i] - t[j]);
        let c = -d2;
        // p(x) = a + d1 x + c x (x - h) with x = s - t_j, h = t_i - t_j
        let h = t[i] - t[j];
        let (qa, qb, qc) = (c, d1 - c * h, a);
        let x = if qa.abs() * h < 1e-12 * qb.abs() {
            -qc / qb
        } else {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                return linear;
            }
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            let (x1, x2) = (q / qa, qc / q);
            if (0.0..=h).contains(&x1) { x1 } else { x2 }
        };
        if (0.0..=h).contains(&x) {
            t[j] + x
        } else {
            linear
        }
    }

    pub fn largest_root(&self) -> Option<f64> {
        self.root_locations().last().copied()
    }

    /// CSV with header `t,phi`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,phi\n");
        for (t, p) in self.t.iter().zip(&self.phi) {
            out.push_str(&format!("{},{}\n", crate::fmt_f64(*t), crate::fmt_f64(*p)));
        }
        out
    }
}

fn sign_changes(x: &[f64]) -> usize {
    let mut count = 0;
    let mut last = 0.0f64;
    for &v in x {
        if v != 0.0 {
            if last != 0.0 && v.signum() != last.signum() {
                count += 1;
            }
            last = v;
        }
    }
    count
}

/// The first `n_max` eigenvalues, without eigenvectors.
pub fn eigenvalues(sys: &SlSystem, n_max: usize) -> Result<Vec<f64>> {
    let (p, _) = sys.pencil()?;
    eigenvalues_of(&p, n_max)
}

fn eigenvalues_of(p: &Pencil, n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(Error::Validation("n_max must be at least 1".into()));
    }
    if n_max > p.dim() {
        return Err(Error::Resolution {
            index: n_max,
            gap: 0.0,
            lambda: f64::NAN,
        });
    }
    let mut out: Vec<f64> = Vec::with_capacity(n_max);
    let mut lo = 0.0;
    for n in 1..=n_max {
        let lam = p.eigenvalue(n, lo);
        if let Some(&prev) = out.last() {
            let gap = lam - prev;
            if gap < 1e3 * f64::EPSILON * lam.abs() {
                return Err(Error::Resolution {
                    index: n,
                    gap,
                    lambda: lam,
                });
            }
        }
        out.push(lam);
        lo = lam;
    }
    Ok(out)
}

/// The `n`-th eigenvalue alone.
pub fn eigenvalue(sys: &SlSystem, n: usize) -> Result<f64> {
    Ok(*eigenvalues(sys, n)?.last().expect("n >= 1"))
}

/// The first `n_max` eigenpairs, `phi` normalized in the mass form and positive just
/// right of `a`.
pub fn solve(sys: &SlSystem, n_max: usize) -> Result<Vec<EigenPair>> {
    let (p, map) = sys.pencil()?;
    let lambdas = eigenvalues_of(&p, n_max)?;
    Ok(lambdas
        .iter()
        .enumerate()
        .map(|(i, &lam)| eigenpair(&p, &map, sys, i + 1, lam))
        .collect())
}

/// Only the `n`-th eigenpair.
pub fn solve_one(sys: &SlSystem, n: usize) -> Result<EigenPair> {
    let (p, map) = sys.pencil()?;
    let lam = *eigenvalues_of(&p, n)?.last().expect("n >= 1");
    Ok(eigenpair(&p, &map, sys, n, lam))
}

fn eigenpair(p: &Pencil, map: &[usize], sys: &SlSystem, n: usize, lambda: f64) -> EigenPair {
    let x = p.eigenvector(lambda);
    let peak = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let sign = x
        .iter()
        .find(|v| v.abs() > 1e-8 * peak)
        .map_or(1.0, |v| v.signum());
    let last = x.len() + 1;
    let phi: Vec<f64> = map
        .iter()
        .map(|&r| if r == 0 || r == last { 0.0 } else { sign * x[r - 1] })
        .collect();
    EigenPair {
        n,
        lambda,
        t: sys.t.clone(),
        roots: sign_changes(&phi),
        phi,
    }
}

/// Relative residual `|A phi - lambda B phi| / (|A phi| + |lambda B phi|)` of the
/// discrete weak equation.
pub fn residual(ep: &EigenPair, sys: &SlSystem) -> Result<f64> {
    let (p, map) = sys.pencil()?;
    let m = p.dim();
    let mut x = vec![0.0; m];
    for (i, &r) in map.iter().enumerate() {
        if r >= 1 && r <= m {
            x[r - 1] = ep.phi[i];
        }
    }
    let ax = p.apply_a(&x);
    let bx = p.apply_b(&x);
    let norm = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>().sqrt();
    let r: Vec<f64> = ax.iter().zip(&bx).map(|(a, b)| a - ep.lambda * b).collect();
    Ok(norm(&r) / (norm(&ax) + ep.lambda.abs() * norm(&bx)))
}

/// Solve at the given grid and at twice the resolution; returns the finer eigenvalue
/// and the Richardson estimate `|lambda_N - lambda_2N| / 3` of its error.
pub fn eigenvalue_with_error(coarse: &SlSystem, fine: &SlSystem, n: usize) -> Result<(f64, f64)> {
    let a = eigenvalue(coarse, n)?;
    let b = eigenvalue(fine, n)?;
    Ok((b, (a - b).abs() / 3.0))
}

/// `Y = v phi' / (sigma phi)` at segment midpoints; `NaN` where masked.
#[derive(Clone, Debug, PartialEq)]
pub struct LogDerivativeTrace {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
}

impl LogDerivativeTrace {
    /// Linear interpolation between the unmasked samples; beyond the outermost
    /// unmasked sample the nearest one is returned.
    pub fn eval_at(&self, s: f64) -> f64 {
        let valid: Vec<usize> = (0..self.t.len()).filter(|&i| self.y[i].is_finite()).collect();
        let Some((&first, &last)) = valid.first().zip(valid.last()) else {
            return f64::NAN;
        };
        if s <= self.t[first] {
            return self.y[first];
        }
        if s >= self.t[last] {
            return self.y[last];
        }
        let j = valid.partition_point(|&i| self.t[i] <= s);
        let (a, b) = (valid[j - 1], valid[j]);
        let u = (s - self.t[a]) / (self.t[b] - self.t[a]);
        self.y[a] + u * (self.y[b] - self.y[a])
    }

    pub fn valid(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.t
            .iter()
            .zip(&self.y)
            .filter(|(_, y)| y.is_finite())
            .map(|(&t, &y)| (t, y))
    }
}

pub fn log_derivative(ep: &EigenPair, sys: &SlSystem) -> LogDerivativeTrace {
    log_derivative_masked(ep, sys, LOG_DERIVATIVE_MASK)
}

/// As [`log_derivative`] with an explicit mask fraction of `max |phi|`.
pub fn log_derivative_masked(ep: &EigenPair, sys: &SlSystem, mask: f64) -> LogDerivativeTrace {
    let peak = ep.phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut t = Vec::with_capacity(sys.segments());
    let mut y = Vec::with_capacity(sys.segments());
    for i in 0..sys.segments() {
        t.push(0.5 * (sys.t[i] + sys.t[i + 1]));
        let (a, b) = (ep.phi[i], ep.phi[i + 1]);
        let mid = 0.5 * (a + b);
        if sys.collapsed(i) || a * b <= 0.0 || mid.abs() < mask * peak {
            y.push(f64::NAN);
            continue;
        }
        let h = sys.t[i + 1] - sys.t[i];
        let vb = 0.5 * (sys.v[i] + sys.v[i + 1]);
        y.push(vb * (b - a) / (sys.sigma[i] * h * mid));
    }
    LogDerivativeTrace { t, y }
}
