//! Piecewise-linear generatrix curves in the closed half-plane and the
//! transformations used by the flattening argument.
//!
//! A [`Curve`] is a list of nodes `(t_i, F_i, G_i)`; between nodes it is linear in
//! the parameter. All geometric operations here are exact on that model:
//! transverse-zeroing and running-minimum act on node values, arc-length
//! reparametrization recomputes node parameters from segment lengths, and the
//! crossing search solves `F(t) = V^{-1}(mu)` inside the bracketing segment.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::profiles::{Boundary, MetricProfile, WeightProfile};

pub mod families;

/// Default number of segments for curves built from formulas.
pub const DEFAULT_GRID: usize = 2048;
/// Allowed `|sigma - 1|` on an arc-length parametrized curve.
pub const TOL_SPEED: f64 = 1e-8;
/// Junction / omega-prefix tolerance, relative to `r1`.
pub const TOL_JUNCTION: f64 = 1e-8;
/// Segments slower than this are treated as stationary.
pub const COLLAPSE_SPEED: f64 = 1e-12;

// Inserted nodes closer than SNAP_FRACTION * (parameter length) to an existing node
// replace that node; reparametrization merges segments shorter than
// MERGE_FRACTION * (total length). Both keep every segment long enough that
// its parameter increment is resolved far below TOL_SPEED.
const SNAP_FRACTION: f64 = 2e-6;
const MERGE_FRACTION: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveFile", into = "CurveFile")]
pub struct Curve {
    t: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
}

/// On-disk layout: `{"t": [...], "F": [...], "G": [...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurveFile {
    pub t: Vec<f64>,
    #[serde(rename = "F")]
    pub f: Vec<f64>,
    #[serde(rename = "G")]
    pub g: Vec<f64>,
}

impl TryFrom<CurveFile> for Curve {
    type Error = Error;

    fn try_from(file: CurveFile) -> Result<Self> {
        Curve::new(file.t, file.f, file.g)
    }
}

impl From<Curve> for CurveFile {
    fn from(c: Curve) -> Self {
        CurveFile {
            t: c.t,
            f: c.f,
            g: c.g,
        }
    }
}

impl Curve {
    pub fn new(t: Vec<f64>, f: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if t.len() < 2 {
            return Err(Error::Validation("a curve needs at least two nodes".into()));
        }
        if f.len() != t.len() || g.len() != t.len() {
            return Err(Error::Validation(format!(
                "t, F, G lengths differ: {}, {}, {}",
                t.len(),
                f.len(),
                g.len()
            )));
        }
        if t.iter().chain(&f).chain(&g).any(|x| !x.is_finite()) {
            return Err(Error::Validation("curve samples must be finite".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation(
                "curve parameter grid must be strictly increasing".into(),
            ));
        }
        Ok(Self { t, f, g })
    }

    pub fn t(&self) -> &[f64] {
        &self.t
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn segments(&self) -> usize {
        self.t.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.t[0]
    }

    pub fn end(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    /// Parameter length `L`.
    pub fn length(&self) -> f64 {
        self.end() - self.start()
    }

    fn segment_of(&self, s: f64) -> usize {
        match self.t.partition_point(|&x| x <= s) {
            0 => 0,
            i => (i - 1).min(self.segments() - 1),
        }
    }

    /// `(F, G)` at parameter `s`, clamped to the parameter range.
    pub fn point_at(&self, s: f64) -> (f64, f64) {
        let s = s.clamp(self.start(), self.end());
        let i = self.segment_of(s);
        let u = (s - self.t[i]) / (self.t[i + 1] - self.t[i]);
        (
            self.f[i] + u * (self.f[i + 1] - self.f[i]),
            self.g[i] + u * (self.g[i + 1] - self.g[i]),
        )
    }

    /// Returns a curve with a node at parameter `s` and that node's index.
    ///
    /// When `s` falls within a snapping distance of an interior node, that node is
    /// moved onto `s` instead of creating a sliver segment.
    pub fn with_node(&self, s: f64) -> (Curve, usize) {
        let s = s.clamp(self.start(), self.end());
        let i = self.segment_of(s);
        let snap = SNAP_FRACTION * self.length();
        let last = self.segments();
        for j in [i, i + 1] {
            let d = (s - self.t[j]).abs();
            if d == 0.0 {
                return (self.clone(), j);
            }
            let room = |k: usize| {
                let left = if k > 0 { self.t[k] - self.t[k - 1] } else { f64::INFINITY };
                let right = if k < last { self.t[k + 1] - self.t[k] } else { f64::INFINITY };
                0.25 * left.min(right)
            };
            if d <= snap {
                if j == 0 || j == last {
                    return (self.clone(), j);
                }
                if d < room(j) {
                    let (fs, gs) = self.point_at(s);
                    let mut c = self.clone();
                    c.t[j] = s;
                    c.f[j] = fs;
                    c.g[j] = gs;
                    return (c, j);
                }
            }
        }
        let (fs, gs) = self.point_at(s);
        let mut c = self.clone();
        c.t.insert(i + 1, s);
        c.f.insert(i + 1, fs);
        c.g.insert(i + 1, gs);
        (c, i + 1)
    }

    /// Splits every segment into `factor` equal parts (same polyline).
    pub fn refine(&self, factor: usize) -> Curve {
        let factor = factor.max(1);
        let n = self.segments() * factor;
        let mut t = Vec::with_capacity(n + 1);
        let mut f = Vec::with_capacity(n + 1);
        let mut g = Vec::with_capacity(n + 1);
        for i in 0..self.segments() {
            for j in 0..factor {
                let u = j as f64 / factor as f64;
                t.push(self.t[i] + u * (self.t[i + 1] - self.t[i]));
                f.push(self.f[i] + u * (self.f[i + 1] - self.f[i]));
                g.push(self.g[i] + u * (self.g[i + 1] - self.g[i]));
            }
        }
        t.push(self.end());
        f.push(self.f[self.segments()]);
        g.push(self.g[self.segments()]);
        Curve { t, f, g }
    }

    /// Splits every segment longer than `h_max` in parameter into equal pieces of at
    /// most `h_max`; the geometry is unchanged.
    pub fn subdivide_to(&self, h_max: f64) -> Curve {
        let mut t = vec![self.t[0]];
        let mut f = vec![self.f[0]];
        let mut g = vec![self.g[0]];
        for i in 0..self.segments() {
            let len = self.t[i + 1] - self.t[i];
            let pieces = ((len / h_max).ceil() as usize).max(1);
            for j in 1..=pieces {
                let u = j as f64 / pieces as f64;
                if j == pieces {
                    t.push(self.t[i + 1]);
                    f.push(self.f[i + 1]);
                    g.push(self.g[i + 1]);
                } else {
                    t.push(self.t[i] + u * len);
                    f.push(self.f[i] + u * (self.f[i + 1] - self.f[i]));
                    g.push(self.g[i] + u * (self.g[i + 1] - self.g[i]));
                }
            }
        }
        Curve { t, f, g }
    }

    /// The sub-curve on `[a, b]`, keeping the original parameter values.
    pub fn restrict(&self, a: f64, b: f64) -> Result<Curve> {
        if !(a >= self.start() && b <= self.end() && b > a) {
            return Err(Error::Domain(format!(
                "[{a}, {b}] is not a subinterval of [{}, {}]",
                self.start(),
                self.end()
            )));
        }
        let (c, ia) = self.with_node(a);
        let (c, ib) = c.with_node(b);
        if ib <= ia {
            return Err(Error::Domain(format!("[{a}, {b}] is too short to resolve")));
        }
        Curve::new(
            c.t[ia..=ib].to_vec(),
            c.f[ia..=ib].to_vec(),
            c.g[ia..=ib].to_vec(),
        )
    }

    /// Checks the generatrix conventions: starts at `(r1, 0)`, ends on `F = r2`,
    /// stays strictly between the radii in between.
    pub fn check_generatrix(&self, bd: &Boundary) -> Result<()> {
        let tol = TOL_JUNCTION * bd.r1;
        let n = self.segments();
        if (self.f[0] - bd.r1).abs() > tol || self.g[0].abs() > tol {
            return Err(Error::Validation(format!(
                "curve starts at ({}, {}), expected ({}, 0)",
                self.f[0], self.g[0], bd.r1
            )));
        }
        if (self.f[n] - bd.r2).abs() > tol {
            return Err(Error::Validation(format!(
                "curve ends at F = {}, expected r2 = {}",
                self.f[n], bd.r2
            )));
        }
        if let Some(i) = (1..n).find(|&i| !(self.f[i] > bd.r2 && self.f[i] < bd.r1)) {
            return Err(Error::Validation(format!(
                "interior node {i} has F = {} outside ({}, {})",
                self.f[i], bd.r2, bd.r1
            )));
        }
        Ok(())
    }

    /// Symmetric Hausdorff distance between the two polylines in `(F, G)`.
    pub fn hausdorff(&self, other: &Curve) -> f64 {
        one_sided_distance(self, other).max(one_sided_distance(other, self))
    }

    /// CSV with header `t,F,G`.
    /// The curve file document with every number at 17 significant digits.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc {
            t: Vec<crate::Fixed>,
            #[serde(rename = "F")]
            f: Vec<crate::Fixed>,
            #[serde(rename = "G")]
            g: Vec<crate::Fixed>,
        }
        let fixed = |v: &[f64]| v.iter().map(|&x| crate::Fixed(x)).collect();
        serde_json::to_string(&Doc {
            t: fixed(&self.t),
            f: fixed(&self.f),
            g: fixed(&self.g),
        })
        .expect("curve serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,F,G\n");
        for i in 0..self.t.len() {
            let _ = writeln!(
                out,
                "{},{},{}",
                crate::fmt_f64(self.t[i]),
                crate::fmt_f64(self.f[i]),
                crate::fmt_f64(self.g[i])
            );
        }
        out
    }
}

fn one_sided_distance(a: &Curve, b: &Curve) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..a.t.len() {
        let (px, py) = (a.f[i], a.g[i]);
        let mut best = f64::INFINITY;
        for j in 0..b.segments() {
            let (ax, ay) = (b.f[j], b.g[j]);
            let (dx, dy) = (b.f[j + 1] - ax, b.g[j + 1] - ay);
            let len2 = dx * dx + dy * dy;
            let u = if len2 > 0.0 {
                (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let d = (px - ax - u * dx).hypot(py - ay - u * dy);
            best = best.min(d);
        }
        worst = worst.max(best);
    }
    worst
}

fn segment_length(metric: &MetricProfile, f0: f64, g0: f64, f1: f64, g1: f64) -> f64 {
    let df = f1 - f0;
    let dg = g1 - g0;
    if dg == 0.0 {
        return df.abs();
    }
    (df * df + metric.gyy(0.5 * (f0 + f1)) * dg * dg).sqrt()
}

/// Per-segment g-speed of a curve.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeedTrace {
    pub sigma: Vec<f64>,
}

impl SpeedTrace {
    pub fn max_unit_deviation(&self) -> f64 {
        self.sigma.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }

    /// Total g-length `sum sigma_i dt_i`.
    pub fn total_length(&self, c: &Curve) -> f64 {
        self.sigma
            .iter()
            .zip(c.t.windows(2))
            .map(|(s, w)| s * (w[1] - w[0]))
            .sum()
    }
}

/// `sigma_i = sqrt(dF^2 + g_yy(F_mid) dG^2) / dt` on every segment.
pub fn speed(c: &Curve, metric: &MetricProfile) -> SpeedTrace {
    let sigma = (0..c.segments())
        .map(|i| {
            segment_length(metric, c.f[i], c.g[i], c.f[i + 1], c.g[i + 1]) / (c.t[i + 1] - c.t[i])
        })
        .collect();
    SpeedTrace { sigma }
}

/// The straight segment `omega(t) = (r1 - t, 0)` on `[0, r1 - r2]`.
pub fn omega_curve(bd: &Boundary, n: usize) -> Result<Curve> {
    if n == 0 {
        return Err(Error::Validation("omega needs at least one segment".into()));
    }
    let w = bd.width();
    let mut t: Vec<f64> = (0..=n).map(|i| w * i as f64 / n as f64).collect();
    t[n] = w;
    let mut f: Vec<f64> = t.iter().map(|&s| bd.r1 - s).collect();
    f[n] = bd.r2;
    Curve::new(t, f, vec![0.0; n + 1])
}

fn check_cut(c: &Curve, p: f64) -> Result<()> {
    if !(p > c.start() && p <= c.end() * (1.0 + 1e-15) + 1e-300) {
        return Err(Error::Domain(format!(
            "cut parameter {p} outside ({}, {}]",
            c.start(),
            c.end()
        )));
    }
    Ok(())
}

/// Replaces `G'` by zero on `[start, p)`, keeping `F` and the later increments of `G`.
pub fn zero_transverse_before(c: &Curve, p: f64) -> Result<Curve> {
    check_cut(c, p)?;
    let (mut out, ip) = c.with_node(p);
    let mut g_prev = out.g[0];
    let mut acc = c.g[0];
    for j in 0..out.segments() {
        let dg = out.g[j + 1] - g_prev;
        g_prev = out.g[j + 1];
        if j >= ip {
            acc += dg;
        }
        out.g[j + 1] = acc;
    }
    Ok(out)
}

/// Replaces `F` by its running minimum on `[start, p]`.
pub fn running_min_flatten(c: &Curve, p: f64) -> Result<Curve> {
    check_cut(c, p)?;
    let (mut out, ip) = c.with_node(p);
    let mut m = out.f[0];
    for j in 0..=ip {
        m = m.min(out.f[j]);
        out.f[j] = m;
    }
    Ok(out)
}

/// Reparametrizes by g-arc length on `[0, Lambda]`.
///
/// Stationary stretches are collapsed to points and sliver segments are merged
/// into their neighbours; the image is unchanged up to the merge length.
pub fn arclength_reparametrize(c: &Curve, metric: &MetricProfile) -> Result<Curve> {
    let total = speed(c, metric).total_length(c);
    if !(total > 0.0) {
        return Err(Error::DegenerateCurve(
            "curve has zero length and cannot be reparametrized".into(),
        ));
    }
    let merge = MERGE_FRACTION * total;
    let n = c.segments();
    let len = |a: usize, b: usize| segment_length(metric, c.f[a], c.g[a], c.f[b], c.g[b]);

    let mut kept: Vec<usize> = vec![0];
    'nodes: for j in 1..=n {
        loop {
            let last = *kept.last().expect("node 0 is always kept");
            if len(last, j) >= merge {
                break;
            }
            if kept.len() == 1 {
                if j == n {
                    return Err(Error::DegenerateCurve(
                        "curve endpoints coincide after collapsing stationary segments".into(),
                    ));
                }
                continue 'nodes;
            }
            kept.pop();
        }
        kept.push(j);
    }

    let mut t = Vec::with_capacity(kept.len());
    let mut acc = 0.0;
    t.push(0.0);
    for w in kept.windows(2) {
        acc += len(w[0], w[1]);
        t.push(acc);
    }
    Curve::new(
        t,
        kept.iter().map(|&i| c.f[i]).collect(),
        kept.iter().map(|&i| c.g[i]).collect(),
    )
}

/// Smallest parameter at which `V(F(t)) = mu`.
///
/// Returns the end parameter when `mu < V(F_end)`. The crossing is found by solving
/// `F(t) = V^{-1}(mu)` on the first segment that reaches that level, which is exact
/// for piecewise-linear `F`.
pub fn first_crossing(c: &Curve, weight: &WeightProfile, mu: f64) -> Result<f64> {
    let n = c.segments();
    let (f_start, f_end) = (c.f[0], c.f[n]);
    let v_start = weight.eval(f_start);
    if !(mu < v_start) {
        return Err(Error::Domain(format!(
            "mu = {mu} must be below V(r1) = {v_start}"
        )));
    }
    if mu < weight.eval(f_end) {
        return Ok(c.end());
    }
    let level = weight.invert_between(mu, f_end, f_start)?;
    let i = (0..n)
        .find(|&i| c.f[i + 1] <= level)
        .expect("the final node is at or below the level");
    if c.f[i] <= level {
        return Ok(c.t[i]);
    }
    let u = (c.f[i] - level) / (c.f[i] - c.f[i + 1]);
    Ok(c.t[i] + u * (c.t[i + 1] - c.t[i]))
}

/// Replaces the part of `g` before its first `V = mu` crossing with the
/// corresponding piece of omega, shifting the remaining tail.
///
/// Tail parameters are recomputed from g-lengths measured from the junction, so the
/// result is unit speed even when the junction falls inside a segment of `g`; tail
/// nodes within the merge length of the junction are dropped.
pub fn splice_with_omega(
    g: &Curve,
    weight: &WeightProfile,
    metric: &MetricProfile,
    mu: f64,
    bd: &Boundary,
) -> Result<Curve> {
    if !(mu < weight.eval(bd.r1)) {
        return Err(Error::Domain(format!(
            "mu = {mu} must be below V(r1) = {}",
            weight.eval(bd.r1)
        )));
    }
    let level = weight.invert(mu, bd)?;
    let prefix = bd.r1 - level;
    let b = first_crossing(g, weight, mu)?;
    let (fb, gb) = g.point_at(b);
    let tol = TOL_JUNCTION * bd.r1;
    if (fb - level).abs() > tol || gb.abs() > tol {
        return Err(Error::Consistency(format!(
            "junction mismatch: curve at ({fb}, {gb}), omega at ({level}, 0)"
        )));
    }

    let already_flat = (b - g.start() - prefix).abs() <= tol
        && (0..g.t.len()).take_while(|&i| g.t[i] <= b).all(|i| {
            (g.f[i] - (bd.r1 - (g.t[i] - g.start()))).abs() <= tol && g.g[i].abs() <= tol
        });
    if already_flat {
        return Ok(g.clone());
    }

    let h = g.length() / g.segments() as f64;
    let m = ((prefix / h).ceil() as usize).max(1);
    let mut t = Vec::with_capacity(m + g.t.len());
    let mut f = Vec::with_capacity(m + g.t.len());
    for j in 0..=m {
        let s = prefix * j as f64 / m as f64;
        t.push(s);
        f.push(bd.r1 - s);
    }
    t[m] = prefix;
    f[m] = level;
    let mut gg = vec![0.0; m + 1];

    let merge = MERGE_FRACTION * g.length();
    let last = g.segments();
    let mut acc = prefix;
    for i in 0..g.t.len() {
        if g.t[i] <= b {
            continue;
        }
        let j = f.len() - 1;
        let step = segment_length(metric, f[j], gg[j], g.f[i], g.g[i]);
        if step < merge && i != last {
            continue;
        }
        if step < merge && j > m {
            // keep the true endpoint instead of the previous tail node
            acc -= segment_length(metric, f[j - 1], gg[j - 1], f[j], gg[j]);
            t.pop();
            f.pop();
            gg.pop();
            let j = f.len() - 1;
            acc += segment_length(metric, f[j], gg[j], g.f[i], g.g[i]);
        } else {
            acc += step;
        }
        t.push(acc);
        f.push(g.f[i]);
        gg.push(g.g[i]);
    }
    Curve::new(t, f, gg)
}

/// Outcome of checking the four defining properties of the class `Gamma_mu`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaReport {
    /// `D >= r1 - r2` and finite.
    pub length_ok: bool,
    /// Unit speed within [`TOL_SPEED`].
    pub unit_speed_ok: bool,
    /// `F(D) = r2` and `r2 < F < r1` at interior nodes.
    pub endpoints_ok: bool,
    /// Agrees with omega on `[0, V_omega^{-1}(mu)]`.
    pub omega_prefix_ok: bool,
}

impl GammaReport {
    pub fn all(&self) -> bool {
        self.length_ok && self.unit_speed_ok && self.endpoints_ok && self.omega_prefix_ok
    }
}

pub fn validate_gamma_membership(
    c: &Curve,
    weight: &WeightProfile,
    metric: &MetricProfile,
    mu: f64,
    bd: &Boundary,
) -> GammaReport {
    let tol = TOL_JUNCTION * bd.r1;
    let d = c.length();
    let length_ok = d.is_finite() && d >= bd.width() - tol;
    let unit_speed_ok = speed(c, metric).max_unit_deviation() <= TOL_SPEED;
    let n = c.segments();
    let endpoints_ok =
        (c.f[n] - bd.r2).abs() <= tol && (1..n).all(|i| c.f[i] > bd.r2 && c.f[i] < bd.r1);

    let omega_prefix_ok = weight.invert(mu, bd).ok().filter(|_| mu < weight.eval(bd.r1)).is_some_and(|level| {
        let prefix = bd.r1 - level;
        let on_omega = |s: f64, fv: f64, gv: f64| {
            (fv - (bd.r1 - s)).abs() <= tol && gv.abs() <= tol
        };
        let (fp, gp) = c.point_at(c.start() + prefix);
        d >= prefix - tol
            && on_omega(prefix, fp, gp)
            && (0..c.t.len())
                .take_while(|&i| c.t[i] - c.start() <= prefix + tol)
                .all(|i| on_omega(c.t[i] - c.start(), c.f[i], c.g[i]))
    });

    GammaReport {
        length_ok,
        unit_speed_ok,
        endpoints_ok,
        omega_prefix_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Profile;

    fn annulus() -> Profile {
        Profile::annulus(2.0, 1.0).unwrap()
    }

    fn quarter_circle(n: usize) -> Curve {
        // center (1, 0), radius 1, from (2, 0) up to (1, 1); unit speed in t.
        let len = std::f64::consts::FRAC_PI_2;
        let t: Vec<f64> = (0..=n).map(|i| len * i as f64 / n as f64).collect();
        let f = t.iter().map(|s| 1.0 + s.cos()).collect();
        let g = t.iter().map(|s| s.sin()).collect();
        Curve::new(t, f, g).unwrap()
    }

    #[test]
    fn omega_samples() {
        let bd = annulus().boundary;
        let w = omega_curve(&bd, 2).unwrap();
        assert_eq!(w.t(), &[0.0, 0.5, 1.0]);
        assert_eq!(w.f(), &[2.0, 1.5, 1.0]);
        assert_eq!(w.g(), &[0.0, 0.0, 0.0]);
        let bd0 = Boundary { r1: 2.0, r2: 0.0 };
        let w1 = omega_curve(&bd0, 1).unwrap();
        assert_eq!(w1.f(), &[2.0, 0.0]);
        let s = speed(&omega_curve(&bd, 64).unwrap(), &MetricProfile::euclidean());
        assert!(s.max_unit_deviation() < 1e-14);
    }

    #[test]
    fn vertical_segment_speeds() {
        let c = Curve::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![0.0, 1.0]).unwrap();
        let e = speed(&c, &MetricProfile::euclidean());
        assert!((e.sigma[0] - 1.0).abs() < 1e-15);
        let s = speed(&c, &MetricProfile::screw());
        // g_yy(1) = 1/2
        assert!((s.sigma[0] - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zeroing_omega_is_identity() {
        let w = omega_curve(&annulus().boundary, 32).unwrap();
        for p in [0.1, 0.5, 1.0] {
            let b = zero_transverse_before(&w, p).unwrap();
            assert!(b.hausdorff(&w) < 1e-15);
            assert!(b.g().iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn zeroing_everything_leaves_horizontal_motion() {
        let n = 50;
        let t: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let f = t.iter().map(|s| 2.0 - s).collect::<Vec<_>>();
        let g = t.iter().map(|s| 0.1 * s).collect();
        let c = Curve::new(t, f.clone(), g).unwrap();
        let b = zero_transverse_before(&c, 1.0).unwrap();
        assert_eq!(b.f(), &f[..]);
        assert!(b.g().iter().all(|&g| g == 0.0));
    }

    #[test]
    fn zeroing_quarter_circle_half_way() {
        // Oracle: G_beta(t) = 0 for t <= P, and sin(t) - sin(P) afterwards.
        let c = quarter_circle(400);
        let p = std::f64::consts::FRAC_PI_4;
        let b = zero_transverse_before(&c, p).unwrap();
        for i in 0..b.t().len() {
            let t = b.t()[i];
            let expected = if t <= p { 0.0 } else { t.sin() - p.sin() };
            assert!((b.g()[i] - expected).abs() < 1e-12, "t = {t}");
            assert!((b.f()[i] - (1.0 + t.cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn zeroing_never_speeds_up() {
        let c = quarter_circle(100);
        let m = MetricProfile::euclidean();
        let p = 0.9;
        let b = zero_transverse_before(&c, p).unwrap();
        let (c2, _) = c.with_node(p);
        let (sb, sc) = (speed(&b, &m), speed(&c2, &m));
        for i in 0..sb.sigma.len() {
            if b.t()[i + 1] <= p {
                assert!(sb.sigma[i] <= sc.sigma[i] + 1e-15);
            } else {
                assert!((sb.sigma[i] - sc.sigma[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zeroing_rejects_bad_cut() {
        let w = omega_curve(&annulus().boundary, 8).unwrap();
        assert!(matches!(zero_transverse_before(&w, 0.0), Err(Error::Domain(_))));
        assert!(zero_transverse_before(&w, 1.5).is_err());
    }

    #[test]
    fn running_min_example() {
        let c = Curve::new(
            vec![0.0, 1.0, 2.0, 3.0],
            vec![2.0, 1.5, 1.8, 1.2],
            vec![0.0; 4],
        )
        .unwrap();
        let r = running_min_flatten(&c, 3.0).unwrap();
        assert_eq!(r.f(), &[2.0, 1.5, 1.5, 1.2]);
        let w = omega_curve(&annulus().boundary, 16).unwrap();
        assert_eq!(running_min_flatten(&w, 1.0).unwrap(), w);
    }

    #[test]
    fn reparametrize_rescales_double_speed() {
        let bd = annulus().boundary;
        let n = 10;
        let t: Vec<f64> = (0..=n).map(|i| 0.5 * i as f64 / n as f64).collect();
        let f = t.iter().map(|s| 2.0 - 2.0 * s).collect();
        let c = Curve::new(t, f, vec![0.0; n + 1]).unwrap();
        let r = arclength_reparametrize(&c, &MetricProfile::euclidean()).unwrap();
        let w = omega_curve(&bd, n).unwrap();
        for i in 0..=n {
            assert!((r.t()[i] - w.t()[i]).abs() < 1e-14);
            assert!((r.f()[i] - w.f()[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn reparametrize_collapses_plateau() {
        // F plateaus on [0.4, 0.6]; G = 0 there so the plateau is stationary.
        let n = 100;
        let t: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64 * 1.2).collect();
        let f: Vec<f64> = t
            .iter()
            .map(|&s| {
                if s < 0.4 {
                    2.0 - s
                } else if s < 0.6 {
                    1.6
                } else {
                    1.6 - (s - 0.6)
                }
            })
            .collect();
        let c = Curve::new(t, f, vec![0.0; n + 1]).unwrap();
        let m = MetricProfile::euclidean();
        let r = arclength_reparametrize(&c, &m).unwrap();
        assert!((r.length() - 1.0).abs() < 1e-12);
        assert!(speed(&r, &m).max_unit_deviation() < 1e-12);
        assert!(r.hausdorff(&c) < 1e-12);
    }

    #[test]
    fn reparametrize_rejects_point_curve() {
        let c = Curve::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!(matches!(
            arclength_reparametrize(&c, &MetricProfile::euclidean()),
            Err(Error::DegenerateCurve(_))
        ));
    }

    #[test]
    fn first_crossing_examples() {
        let p = annulus();
        let w = omega_curve(&p.boundary, 10).unwrap();
        assert!((first_crossing(&w, &p.weight, 1.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(first_crossing(&w, &p.weight, 0.5).unwrap(), w.end());
        assert!(first_crossing(&w, &p.weight, 2.0).is_err());
    }

    #[test]
    fn splice_of_omega_is_omega() {
        let p = annulus();
        let w = omega_curve(&p.boundary, 64).unwrap();
        for mu in [1.0, 1.3, 1.9] {
            let s = splice_with_omega(&w, &p.weight, &p.metric, mu, &p.boundary).unwrap();
            assert_eq!(s, w);
        }
    }

    #[test]
    fn omega_is_the_only_member_of_gamma_at_v_r2() {
        let p = annulus();
        let w = omega_curve(&p.boundary, 64).unwrap();
        let rep = validate_gamma_membership(&w, &p.weight, &p.metric, 1.0, &p.boundary);
        assert!(rep.all());
        let short = w.restrict(0.0, 0.9).unwrap();
        let rep = validate_gamma_membership(&short, &p.weight, &p.metric, 1.5, &p.boundary);
        assert!(!rep.endpoints_ok);
    }

    #[test]
    fn with_node_snaps_instead_of_slivering() {
        let w = omega_curve(&annulus().boundary, 10).unwrap();
        let (c, i) = w.with_node(0.3 + 1e-9);
        assert_eq!(c.segments(), 10);
        assert_eq!(c.t()[i], 0.3 + 1e-9);
        let (c, i) = w.with_node(0.35);
        assert_eq!(c.segments(), 11);
        assert_eq!(c.t()[i], 0.35);
        assert!((c.f()[i] - 1.65).abs() < 1e-15);
    }

    #[test]
    fn curve_json_round_trip() {
        let w = omega_curve(&annulus().boundary, 4).unwrap();
        let s = serde_json::to_string(&w).unwrap();
        assert!(s.contains("\"F\""));
        let back: Curve = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
        assert!(serde_json::from_str::<Curve>(r#"{"t":[0,0],"F":[1,1],"G":[0,0]}"#).is_err());
        assert!(w.to_csv().starts_with("t,F,G\n"));
    }
}
