//! Named generatrix families used by demos and tests.

use std::f64::consts::PI;

use super::{arclength_reparametrize, omega_curve, Curve};
use crate::error::{Error, Result};
use crate::profiles::{Boundary, MetricProfile};

/// Resamples a curve at `n` equally spaced arc-length positions and returns the
/// unit-speed polyline through them.
pub fn resample_uniform(c: &Curve, metric: &MetricProfile, n: usize) -> Result<Curve> {
    let r = arclength_reparametrize(c, metric)?;
    let total = r.length();
    let mut f = Vec::with_capacity(n + 1);
    let mut g = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let (fj, gj) = r.point_at(total * j as f64 / n as f64);
        f.push(fj);
        g.push(gj);
    }
    f[n] = r.f()[r.segments()];
    g[n] = r.g()[r.segments()];
    let t = (0..=n).map(|j| j as f64).collect();
    arclength_reparametrize(&Curve::new(t, f, g)?, metric)
}

/// Circular-arc generatrix from `(r1, 0)` to `(r2, 0)` bulging into `G > 0`.
///
/// `amplitude` is the sagitta over the chord length, in `[0, 0.5]`; `0.5` is a
/// half circle and `0` is omega.
pub fn bulge(bd: &Boundary, metric: &MetricProfile, amplitude: f64, n: usize) -> Result<Curve> {
    if !(0.0..=0.5).contains(&amplitude) {
        return Err(Error::Validation(format!(
            "bulge amplitude {amplitude} outside [0, 0.5]"
        )));
    }
    if amplitude == 0.0 {
        return omega_curve(bd, n);
    }
    let w = bd.width();
    let s = amplitude * w;
    let radius = (0.25 * w * w + s * s) / (2.0 * s);
    let (cf, cg) = (0.5 * (bd.r1 + bd.r2), s - radius);
    // angle of (r1, 0) seen from the center
    let theta0 = (-cg).atan2(0.5 * w);
    let m = 4 * n;
    let mut f = Vec::with_capacity(m + 1);
    let mut g = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let th = theta0 + (PI - 2.0 * theta0) * j as f64 / m as f64;
        f.push(cf + radius * th.cos());
        g.push((cg + radius * th.sin()).max(0.0));
    }
    f[0] = bd.r1;
    g[0] = 0.0;
    f[m] = bd.r2;
    g[m] = 0.0;
    let t = (0..=m).map(|j| j as f64).collect();
    resample_uniform(&Curve::new(t, f, g)?, metric, n)
}

/// Straight-line generatrix whose `F` oscillates: `F = r1 - w s + a w sin(2 pi m s) 4s(1-s)`.
///
/// `G` stays zero, so the curve retraces parts of the axis segment.
pub fn wiggle(
    bd: &Boundary,
    metric: &MetricProfile,
    amplitude: f64,
    waves: u32,
    n: usize,
) -> Result<Curve> {
    let w = bd.width();
    let m = 4 * n;
    let mut f = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let s = j as f64 / m as f64;
        let bump = 4.0 * s * (1.0 - s) * (2.0 * PI * waves as f64 * s).sin();
        f.push(bd.r1 - w * s + amplitude * w * bump);
    }
    f[0] = bd.r1;
    f[m] = bd.r2;
    if f[1..m].iter().any(|&x| !(x > bd.r2 && x < bd.r1)) {
        return Err(Error::Validation(format!(
            "wiggle amplitude {amplitude} leaves the strip ({}, {})",
            bd.r2, bd.r1
        )));
    }
    let t = (0..=m).map(|j| j as f64).collect();
    resample_uniform(&Curve::new(t, f, vec![0.0; m + 1])?, metric, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::speed;

    #[test]
    fn half_circle_bulge() {
        let bd = Boundary { r1: 2.0, r2: 1.0 };
        let m = MetricProfile::euclidean();
        let c = bulge(&bd, &m, 0.5, 512).unwrap();
        c.check_generatrix(&bd).unwrap();
        assert!((c.length() - PI / 2.0).abs() < 1e-5);
        assert!(speed(&c, &m).max_unit_deviation() < 1e-8);
        let top = c.g().iter().cloned().fold(0.0, f64::max);
        assert!((top - 0.5).abs() < 1e-5);
    }

    #[test]
    fn flat_bulge_is_omega() {
        let bd = Boundary { r1: 2.0, r2: 1.0 };
        let c = bulge(&bd, &MetricProfile::euclidean(), 0.0, 16).unwrap();
        assert_eq!(c, omega_curve(&bd, 16).unwrap());
    }

    #[test]
    fn wiggle_is_longer_than_omega() {
        let bd = Boundary { r1: 2.0, r2: 1.0 };
        let m = MetricProfile::euclidean();
        let c = wiggle(&bd, &m, 0.1, 3, 512).unwrap();
        c.check_generatrix(&bd).unwrap();
        assert!(c.length() > 1.0);
        assert!(wiggle(&bd, &m, 0.9, 3, 64).is_err());
    }
}
