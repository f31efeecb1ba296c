//! Bessel functions of real order and the annulus cross-product oracle.
//!
//! `J_nu` and `Y_nu` follow Steed's method: a continued fraction for `J'/J`, downward
//! recurrence to the reduced order `|mu| <= 1/2`, then Temme's series (`x < 2`) or a
//! complex continued fraction (`x >= 2`) for `Y_mu`, and upward recurrence for `Y_nu`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::profiles::Boundary;

const EPS: f64 = f64::EPSILON;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;
const XMIN: f64 = 2.0;

/// Taylor coefficients of `1/Gamma(1+z)` about zero.
const RGAMMA: [f64; 23] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
];

/// `(gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu))` for `|mu| <= 1/2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    // gam2 = sum_{j even} a_j mu^j,  gam1 = -sum_{j odd} a_j mu^(j-1)
    let mu2 = mu * mu;
    let (mut gam1, mut gam2, mut p) = (0.0, 0.0, 1.0);
    for pair in RGAMMA.chunks(2) {
        gam2 += pair[0] * p;
        if let Some(&odd) = pair.get(1) {
            gam1 -= odd * p;
        }
        p *= mu2;
    }
    (gam1, gam2, gam2 - mu * gam1, gam2 + mu * gam1)
}

/// `(J_nu(x), Y_nu(x))` for `nu >= 0`, `x > 0`.
pub fn bessel_jy(nu: f64, x: f64) -> Result<(f64, f64)> {
    if !(x > 0.0 && x.is_finite()) || !(nu >= 0.0 && nu.is_finite()) {
        return Err(Error::Domain(format!(
            "Bessel functions need x > 0 and nu >= 0, got nu = {nu}, x = {x}"
        )));
    }
    let nl = if x < XMIN {
        (nu + 0.5) as usize
    } else {
        (nu - x + 1.5).max(0.0) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // continued fraction for J'_nu / J_nu
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    let mut converged = false;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Oracle(format!("J'/J fraction did not converge at x = {x}")));
    }

    // downward recurrence to order xmu
    let mut rjl = isign * 1e-30;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in 0..nl {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS { 1.0 } else { pimu2.sin() / pimu2 };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut converged = false;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - xmu2);
            c *= d / fi;
            p /= fi - xmu;
            q /= fi + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - fi * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Oracle(format!("Temme series did not converge at x = {x}")));
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        let mut converged = false;
        for i in 2..MAXIT {
            a += 2.0 * (i - 1) as f64;
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            let fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di /= -den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            let temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::Oracle(format!("Steed fraction did not converge at x = {x}")));
        }
        let gam = (p - f) / q;
        let r = (w / ((p - f) * gam + q)).sqrt();
        rjmu = r.copysign(rjl);
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let j = rjl1 * (rjmu / rjl);
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    Ok((j, rymu))
}

fn cross_product(bd: &Boundary, k: f64, x: f64) -> Result<f64> {
    let (j2, y2) = bessel_jy(k, x * bd.r2)?;
    let (j1, y1) = bessel_jy(k, x * bd.r1)?;
    Ok(j2 * y1 - j1 * y2)
}

fn bisect(mut lo: f64, mut hi: f64, mut flo: f64, f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `lambda_{k,n}` of the straight generatrix for the annulus weight: the square of the
/// `n`-th positive root of `J_k(x r2) Y_k(x r1) - J_k(x r1) Y_k(x r2)`.
pub fn bessel_oracle(bd: &Boundary, k: f64, n: usize) -> Result<f64> {
    if !(bd.r2 > 0.0 && bd.r1 > bd.r2) {
        return Err(Error::Oracle(format!(
            "cross-product oracle needs 0 < r2 < r1, got r1 = {}, r2 = {}",
            bd.r1, bd.r2
        )));
    }
    if n == 0 {
        return Err(Error::Validation("eigenvalue index starts at 1".into()));
    }
    let step = PI / bd.width() / 16.0;
    let mut found = 0;
    let mut lo = step;
    let mut flo = cross_product(bd, k, lo)?;
    for _ in 0..(64 * n + 1_000_000) {
        let hi = lo + step;
        let fhi = cross_product(bd, k, hi)?;
        if flo == 0.0 || (flo < 0.0) != (fhi < 0.0) {
            found += 1;
            if found == n {
                let x = bisect(lo, hi, flo, |x| cross_product(bd, k, x))?;
                return Ok(x * x);
            }
        }
        lo = hi;
        flo = fhi;
    }
    Err(Error::Oracle(format!("could not bracket root {n} for k = {k}")))
}

/// Interior roots, as radii in `(r2, r1)`, of the `n`-th radial eigenfunction
/// `R(r) = J_k(x r) Y_k(x r2) - J_k(x r2) Y_k(x r)` with `x^2 = bessel_oracle(bd, k, n)`.
pub fn bessel_radial_roots(bd: &Boundary, k: f64, n: usize) -> Result<Vec<f64>> {
    let x = bessel_oracle(bd, k, n)?.sqrt();
    let (j2, y2) = bessel_jy(k, x * bd.r2)?;
    let radial = |r: f64| -> Result<f64> {
        let (j, y) = bessel_jy(k, x * r)?;
        Ok(j * y2 - j2 * y)
    };
    let samples = 64 * n;
    let h = bd.width() / samples as f64;
    let mut roots = Vec::new();
    let mut lo = bd.r2 + 0.5 * h;
    let mut flo = radial(lo)?;
    while lo + h < bd.r1 - 0.25 * h {
        let hi = lo + h;
        let fhi = radial(hi)?;
        if (flo < 0.0) != (fhi < 0.0) {
            roots.push(bisect(lo, hi, flo, radial)?);
        }
        lo = hi;
        flo = fhi;
    }
    if roots.len() != n - 1 {
        return Err(Error::Oracle(format!(
            "radial eigenfunction {n} has {} interior roots",
            roots.len()
        )));
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_values() {
        let cases = [
            (0.0, 1.0, 0.765_197_686_557_966_6, 0.088_256_964_215_677),
            (1.0, 2.5, 0.497_094_102_464_274_1, 0.145_918_137_966_785_8),
            (2.5, 7.3, -0.300_849_431_587_497_8, 0.043_400_899_825_479_54),
            (3.0, 19.0, 0.072_489_661_438_052_37, 0.169_302_539_442_666_46),
            (0.0, 126.0, 0.064_001_635_366_180_07, -0.030_923_919_049_141_91),
            (0.3, 0.05, 0.368_258_608_837_354_2, -2.609_705_613_405_871),
        ];
        for (nu, x, j, y) in cases {
            let (jj, yy) = bessel_jy(nu, x).unwrap();
            assert!((jj - j).abs() < 1e-13 * (1.0 + j.abs()), "J_{nu}({x}) = {jj}");
            assert!((yy - y).abs() < 1e-13 * (1.0 + y.abs()), "Y_{nu}({x}) = {yy}");
        }
    }

    #[test]
    fn wronskian() {
        // J_{nu+1} Y_nu - J_nu Y_{nu+1} = 2 / (pi x)
        for nu in [0.0, 0.4, 1.0, 2.7, 5.0] {
            for x in [0.3, 1.9, 2.1, 10.0, 55.5] {
                let (j0, y0) = bessel_jy(nu, x).unwrap();
                let (j1, y1) = bessel_jy(nu + 1.0, x).unwrap();
                let lhs = j1 * y0 - j0 * y1;
                assert!((lhs * PI * x / 2.0 - 1.0).abs() < 1e-12, "nu = {nu}, x = {x}");
            }
        }
    }

    #[test]
    fn annulus_roots() {
        let bd = Boundary { r1: 2.0, r2: 1.0 };
        let expected = [
            [9.753_322_124_750_719, 39.355_995_657_592_59, 88.702_633_308_924_5],
            [10.218_113_344_665_94, 39.845_756_341_109_57, 89.197_917_728_664_86],
            [11.607_113_606_804_901, 41.316_174_755_687_18, 90.684_715_355_355_45],
            [13.904_471_984_216_835, 43.770_414_223_642_334, 93.165_833_533_429_28],
        ];
        for (k, row) in expected.iter().enumerate() {
            for (i, &lam) in row.iter().enumerate() {
                let got = bessel_oracle(&bd, k as f64, i + 1).unwrap();
                assert!((got - lam).abs() < 1e-11 * lam, "k = {k}, n = {}: {got}", i + 1);
            }
        }
        let l20 = bessel_oracle(&bd, 0.0, 20).unwrap();
        assert!((l20 / (20.0 * PI).powi(2) - 0.999_968_344_183_398_3).abs() < 1e-12);
    }

    #[test]
    fn oracle_rejects_disk() {
        assert!(matches!(
            bessel_oracle(&Boundary { r1: 2.0, r2: 0.0 }, 0.0, 1),
            Err(Error::Oracle(_))
        ));
    }
}
