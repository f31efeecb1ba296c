//! Weight functions `V` and fiber metric coefficients `g_yy` for the half-plane.
//!
//! The eigenvalue functional of a generatrix `(F, G)` only sees the curve through
//! `V(F)` and through the length element of `g = dx^2 + g_yy(x) dy^2`. Two geometries
//! are built in:
//!
//! * annulus: `V(x) = x`, Euclidean metric (`g_yy = 1`);
//! * helicoid: `V(x) = sqrt(1 + x^2)`, screw metric `g_yy = x^2 / (1 + x^2)`.
//!
//! Anything else is supplied as a table and interpolated with a shape-preserving
//! monotone cubic, which keeps `V' > 0` and `g_yy > 0` between the knots.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inversion tolerance `|V(x) - mu|` for the closed-form built-in profiles.
pub const TOL_INV_BUILTIN: f64 = 1e-12;
/// Inversion tolerance for tabulated profiles.
pub const TOL_INV_CUSTOM: f64 = 1e-8;

const BISECTION_MAX_ITER: usize = 50;
const DENSE_CHECK_SAMPLES: usize = 1024;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Annulus,
    Helicoid,
    Custom,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    Euclidean,
    Screw,
    Custom,
}

/// Piecewise cubic Hermite interpolant with Fritsch-Butland slopes.
///
/// On every knot interval the interpolant is monotone and stays between the two
/// knot values, so monotone data gives a monotone function and positive data a
/// positive one. Outside the table it extends linearly with the end slope.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(points: &[[f64; 2]]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Validation(
                "a table needs at least two points".into(),
            ));
        }
        if points.iter().any(|p| !p[0].is_finite() || !p[1].is_finite()) {
            return Err(Error::Validation("table contains non-finite values".into()));
        }
        let x: Vec<f64> = points.iter().map(|p| p[0]).collect();
        let y: Vec<f64> = points.iter().map(|p| p[1]).collect();
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Validation(
                "table abscissae must be strictly increasing".into(),
            ));
        }

        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = delta[0];
            d[1] = delta[0];
        } else {
            for i in 1..n - 1 {
                if delta[i - 1] * delta[i] > 0.0 {
                    let w1 = 2.0 * h[i] + h[i - 1];
                    let w2 = h[i] + 2.0 * h[i - 1];
                    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
                }
            }
            d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    fn interval(&self, x: f64) -> usize {
        match self.x.partition_point(|&k| k <= x) {
            0 => 0,
            i => (i - 1).min(self.x.len() - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let last = self.x.len() - 1;
        if x < self.x[0] {
            return self.y[0] + self.d[0] * (x - self.x[0]);
        }
        if x > self.x[last] {
            return self.y[last] + self.d[last] * (x - self.x[last]);
        }
        let i = self.interval(x);
        let h = self.x[i + 1] - self.x[i];
        let s = (x - self.x[i]) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.y[i] + h10 * h * self.d[i] + h01 * self.y[i + 1] + h11 * h * self.d[i + 1]
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let last = self.x.len() - 1;
        if x < self.x[0] {
            return self.d[0];
        }
        if x > self.x[last] {
            return self.d[last];
        }
        let i = self.interval(x);
        let h = self.x[i + 1] - self.x[i];
        let s = (x - self.x[i]) / h;
        let s2 = s * s;
        let dh00 = (6.0 * s2 - 6.0 * s) / h;
        let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
        let dh01 = (-6.0 * s2 + 6.0 * s) / h;
        let dh11 = 3.0 * s2 - 2.0 * s;
        dh00 * self.y[i] + dh10 * self.d[i] + dh01 * self.y[i + 1] + dh11 * self.d[i + 1]
    }
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() || del0 == 0.0 {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

#[derive(Clone, Debug, PartialEq)]
enum WeightFn {
    Identity,
    Hyperbolic,
    Table(MonotoneCubic),
}

/// The weight `V` with `V' > 0` on `(0, inf)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightProfile {
    kind: WeightKind,
    func: WeightFn,
    domain_floor: f64,
}

impl WeightProfile {
    pub fn annulus() -> Self {
        Self {
            kind: WeightKind::Annulus,
            func: WeightFn::Identity,
            domain_floor: 0.0,
        }
    }

    pub fn helicoid() -> Self {
        Self {
            kind: WeightKind::Helicoid,
            func: WeightFn::Hyperbolic,
            domain_floor: 0.0,
        }
    }

    /// Builds a tabulated weight. Rejects tables whose values are not strictly increasing.
    pub fn from_table(points: &[[f64; 2]]) -> Result<Self> {
        if points.windows(2).any(|w| w[1][1] <= w[0][1]) {
            return Err(Error::Validation(
                "V table must be strictly increasing (V' > 0)".into(),
            ));
        }
        if points.iter().any(|p| p[1] < 0.0) {
            return Err(Error::Validation("V table must be non-negative".into()));
        }
        let cubic = MonotoneCubic::new(points)?;
        Ok(Self {
            kind: WeightKind::Custom,
            domain_floor: cubic.x_min().max(0.0),
            func: WeightFn::Table(cubic),
        })
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    /// Smallest `x` at which `V` is safely evaluated.
    pub fn domain_floor(&self) -> f64 {
        self.domain_floor
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.func {
            WeightFn::Identity => x,
            WeightFn::Hyperbolic => x.hypot(1.0),
            WeightFn::Table(c) => c.eval(x),
        }
    }

    pub fn deriv(&self, x: f64) -> f64 {
        match &self.func {
            WeightFn::Identity => 1.0,
            WeightFn::Hyperbolic => x / x.hypot(1.0),
            WeightFn::Table(c) => c.deriv(x),
        }
    }

    pub fn inversion_tolerance(&self) -> f64 {
        match self.func {
            WeightFn::Table(_) => TOL_INV_CUSTOM,
            _ => TOL_INV_BUILTIN,
        }
    }

    /// `V^{-1}(mu)` restricted to `[r2, r1]`.
    pub fn invert(&self, mu: f64, bd: &Boundary) -> Result<f64> {
        self.invert_between(mu, bd.r2, bd.r1)
    }

    /// `V^{-1}(mu)` on an arbitrary bracket `[lo, hi]`.
    pub fn invert_between(&self, mu: f64, lo: f64, hi: f64) -> Result<f64> {
        let (v_lo, v_hi) = (self.eval(lo), self.eval(hi));
        if !(mu >= v_lo && mu <= v_hi) {
            return Err(Error::Domain(format!(
                "mu = {mu} outside [V({lo}), V({hi})] = [{v_lo}, {v_hi}]"
            )));
        }
        if mu == v_lo {
            return Ok(lo);
        }
        if mu == v_hi {
            return Ok(hi);
        }
        let x = match self.func {
            WeightFn::Identity => mu,
            WeightFn::Hyperbolic => ((mu - 1.0) * (mu + 1.0)).max(0.0).sqrt(),
            WeightFn::Table(_) => self.bisect(mu, lo, hi),
        };
        Ok(x.clamp(lo, hi))
    }

    fn bisect(&self, mu: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..BISECTION_MAX_ITER {
            let mid = 0.5 * (lo + hi);
            let v = self.eval(mid);
            if (v - mu).abs() <= 1e-3 * TOL_INV_CUSTOM {
                return mid;
            }
            if v < mu {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum MetricFn {
    Unit,
    Screw,
    Table(MonotoneCubic),
}

/// Fiber coefficient `g_yy` of `g = dx^2 + g_yy(x) dy^2`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricProfile {
    kind: MetricKind,
    func: MetricFn,
}

impl MetricProfile {
    pub fn euclidean() -> Self {
        Self {
            kind: MetricKind::Euclidean,
            func: MetricFn::Unit,
        }
    }

    pub fn screw() -> Self {
        Self {
            kind: MetricKind::Screw,
            func: MetricFn::Screw,
        }
    }

    pub fn from_table(points: &[[f64; 2]]) -> Result<Self> {
        if points.iter().any(|p| p[0] > 0.0 && p[1] <= 0.0) || points.iter().any(|p| p[1] < 0.0)
        {
            return Err(Error::Validation(
                "g_yy table must be positive for x > 0".into(),
            ));
        }
        Ok(Self {
            kind: MetricKind::Custom,
            func: MetricFn::Table(MonotoneCubic::new(points)?),
        })
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn gyy(&self, x: f64) -> f64 {
        match &self.func {
            MetricFn::Unit => 1.0,
            MetricFn::Screw => {
                let x2 = x * x;
                x2 / (1.0 + x2)
            }
            MetricFn::Table(c) => c.eval(x).max(0.0),
        }
    }
}

/// Boundary radii: the generatrix runs from `x = r1` to `x = r2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub r1: f64,
    pub r2: f64,
}

impl Boundary {
    pub fn new(r1: f64, r2: f64, weight: &WeightProfile) -> Result<Self> {
        if !(r1.is_finite() && r2.is_finite()) {
            return Err(Error::Validation("radii must be finite".into()));
        }
        if r2 < 0.0 {
            return Err(Error::Validation(format!("r2 = {r2} must be >= 0")));
        }
        if r1 <= r2 {
            return Err(Error::Validation(format!(
                "r1 = {r1} must exceed r2 = {r2}"
            )));
        }
        if r2 < weight.domain_floor() {
            return Err(Error::Validation(format!(
                "r2 = {r2} below the weight's domain floor {}",
                weight.domain_floor()
            )));
        }
        if weight.eval(r2) <= 0.0 {
            return Err(Error::Validation(format!(
                "V(r2) = {} must be positive (V(0) = 0 requires r2 > 0)",
                weight.eval(r2)
            )));
        }
        Ok(Self { r1, r2 })
    }

    pub fn width(&self) -> f64 {
        self.r1 - self.r2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    Annulus,
    Helicoid,
    Custom,
}

/// JSON description of a geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    pub r1: f64,
    pub r2: f64,
    #[serde(rename = "V_table", default, skip_serializing_if = "Option::is_none")]
    pub v_table: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gyy_table: Option<Vec<[f64; 2]>>,
}

impl ProfileSpec {
    pub fn annulus(r1: f64, r2: f64) -> Self {
        Self {
            kind: ProfileKind::Annulus,
            r1,
            r2,
            v_table: None,
            gyy_table: None,
        }
    }

    pub fn helicoid(r1: f64, r2: f64) -> Self {
        Self {
            kind: ProfileKind::Helicoid,
            r1,
            r2,
            v_table: None,
            gyy_table: None,
        }
    }
}

/// A validated (weight, metric, boundary) triple.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile {
    pub weight: WeightProfile,
    pub metric: MetricProfile,
    pub boundary: Boundary,
}

impl Profile {
    pub fn annulus(r1: f64, r2: f64) -> Result<Self> {
        make_profile(&ProfileSpec::annulus(r1, r2))
    }

    pub fn helicoid(r1: f64, r2: f64) -> Result<Self> {
        make_profile(&ProfileSpec::helicoid(r1, r2))
    }
}

pub fn make_profile(spec: &ProfileSpec) -> Result<Profile> {
    let (weight, metric) = match spec.kind {
        ProfileKind::Annulus => (WeightProfile::annulus(), MetricProfile::euclidean()),
        ProfileKind::Helicoid => (WeightProfile::helicoid(), MetricProfile::screw()),
        ProfileKind::Custom => {
            let table = spec.v_table.as_ref().ok_or_else(|| {
                Error::Validation("custom profile requires V_table".into())
            })?;
            let weight = WeightProfile::from_table(table)?;
            let metric = match &spec.gyy_table {
                Some(t) => MetricProfile::from_table(t)?,
                None => MetricProfile::euclidean(),
            };
            for (name, range) in [
                ("V_table", Some(table)),
                ("gyy_table", spec.gyy_table.as_ref()),
            ] {
                if let Some(t) = range {
                    let (lo, hi) = (t[0][0], t[t.len() - 1][0]);
                    if spec.r2 < lo || spec.r1 > hi {
                        return Err(Error::Validation(format!(
                            "{name} covers [{lo}, {hi}] but the boundary needs [{}, {}]",
                            spec.r2, spec.r1
                        )));
                    }
                }
            }
            (weight, metric)
        }
    };
    let boundary = Boundary::new(spec.r1, spec.r2, &weight)?;
    check_dense(&weight, &metric, &boundary)?;
    Ok(Profile {
        weight,
        metric,
        boundary,
    })
}

fn check_dense(weight: &WeightProfile, metric: &MetricProfile, bd: &Boundary) -> Result<()> {
    let mut prev = weight.eval(bd.r2);
    for i in 1..=DENSE_CHECK_SAMPLES {
        let x = bd.r2 + bd.width() * i as f64 / DENSE_CHECK_SAMPLES as f64;
        let v = weight.eval(x);
        if !(v > prev) || !(v > 0.0) {
            return Err(Error::Validation(format!(
                "V is not strictly increasing and positive near x = {x}"
            )));
        }
        if !(metric.gyy(x) > 0.0) {
            return Err(Error::Validation(format!("g_yy({x}) is not positive")));
        }
        prev = v;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisection_oracle(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn invert_examples() {
        let an = Profile::annulus(2.0, 1.0).unwrap();
        assert_eq!(an.weight.invert(1.5, &an.boundary).unwrap(), 1.5);

        let he = Profile::helicoid(2.0, 0.0).unwrap();
        assert_eq!(he.weight.invert(1.0, &he.boundary).unwrap(), 0.0);
        let x = he.weight.invert(2.0, &he.boundary).unwrap();
        let oracle = bisection_oracle(|x| (1.0 + x * x).sqrt(), 2.0, 0.0, 2.0);
        assert!((x - 3f64.sqrt()).abs() < 1e-14);
        assert!((x - oracle).abs() < 1e-12);
    }

    #[test]
    fn invert_rejects_out_of_range() {
        let an = Profile::annulus(2.0, 1.0).unwrap();
        assert!(matches!(
            an.weight.invert(0.5, &an.boundary),
            Err(Error::Domain(_))
        ));
        assert!(an.weight.invert(2.5, &an.boundary).is_err());
    }

    #[test]
    fn builtin_profiles() {
        let an = make_profile(&serde_json::from_str(r#"{"kind":"annulus","r1":2,"r2":1}"#).unwrap())
            .unwrap();
        assert_eq!(an.weight.eval(1.3), 1.3);
        assert_eq!(an.metric.gyy(1.3), 1.0);
        let he =
            make_profile(&serde_json::from_str(r#"{"kind":"helicoid","r1":2,"r2":0}"#).unwrap())
                .unwrap();
        assert_eq!(he.weight.eval(0.0), 1.0);
        assert!((he.metric.gyy(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn custom_table_must_increase() {
        let spec: ProfileSpec = serde_json::from_str(
            r#"{"kind":"custom","r1":2,"r2":1,"V_table":[[1.0,1.1],[2.0,1.05]]}"#,
        )
        .unwrap();
        assert!(matches!(make_profile(&spec), Err(Error::Validation(_))));
    }

    #[test]
    fn boundary_validation() {
        assert!(Profile::annulus(1.0, 2.0).is_err());
        assert!(Profile::annulus(2.0, 0.0).is_err());
        assert!(Profile::helicoid(2.0, 0.0).is_ok());
    }

    #[test]
    fn custom_table_interpolates_monotonically() {
        let spec = ProfileSpec {
            kind: ProfileKind::Custom,
            r1: 3.0,
            r2: 0.5,
            v_table: Some(vec![[0.0, 0.2], [1.0, 1.0], [1.2, 2.5], [3.0, 2.6]]),
            gyy_table: Some(vec![[0.0, 0.0], [1.0, 0.5], [3.0, 0.9]]),
        };
        let p = make_profile(&spec).unwrap();
        let mut prev = p.weight.eval(0.5);
        for i in 1..2000 {
            let x = 0.5 + 2.5 * i as f64 / 2000.0;
            let v = p.weight.eval(x);
            assert!(v > prev);
            assert!(p.weight.deriv(x) >= 0.0);
            prev = v;
        }
        for mu in [0.7, 1.7, 2.55] {
            let x = p.weight.invert(mu, &p.boundary).unwrap();
            assert!((p.weight.eval(x) - mu).abs() <= TOL_INV_CUSTOM);
        }
    }

    #[test]
    fn screw_metric_asymptotics() {
        let m = MetricProfile::screw();
        assert!(((m.gyy(1e3) - 1.0) / 1.0).abs() < 1e-5);
        assert!((m.gyy(1e-3) / 1e-6 - 1.0).abs() < 1e-5);
    }

    #[test]
    fn weight_derivative_matches_difference_quotient() {
        for w in [WeightProfile::annulus(), WeightProfile::helicoid()] {
            for x in [0.1, 0.7, 1.9] {
                let h = 1e-6;
                let fd = (w.eval(x + h) - w.eval(x - h)) / (2.0 * h);
                assert!((fd - w.deriv(x)).abs() < 1e-8);
            }
        }
    }
}
