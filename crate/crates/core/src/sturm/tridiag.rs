//! Symmetric tridiagonal pencils `A - lambda B` with `B` positive definite.
//!
//! Eigenvalues are located by bisection on the inertia of `A - lambda B` (the number
//! of negative pivots of its LDL^T factorization counts eigenvalues below `lambda`),
//! eigenvectors by shifted inverse iteration.

#[derive(Clone, Debug)]
pub(crate) struct Pencil {
    pub a_diag: Vec<f64>,
    pub a_off: Vec<f64>,
    pub b_diag: Vec<f64>,
    pub b_off: Vec<f64>,
}

const MAX_BISECTIONS: usize = 256;
const INVERSE_ITERATIONS: usize = 2;

impl Pencil {
    pub fn dim(&self) -> usize {
        self.a_diag.len()
    }

    /// Number of eigenvalues strictly below `lambda`.
    pub fn count_below(&self, lambda: f64) -> usize {
        let m = self.dim();
        let mut q = self.a_diag[0] - lambda * self.b_diag[0];
        let mut count = usize::from(q < 0.0);
        for i in 1..m {
            if q == 0.0 {
                q = f64::MIN_POSITIVE;
            }
            let e = self.a_off[i - 1] - lambda * self.b_off[i - 1];
            q = (self.a_diag[i] - lambda * self.b_diag[i]) - e * e / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `n`-th eigenvalue (1-based), searching above `lo` where `count_below(lo) < n`.
    pub fn eigenvalue(&self, n: usize, lo: f64) -> f64 {
        let mut lo = lo.max(0.0);
        let mut hi = if lo > 0.0 { 2.0 * lo } else { 1.0 };
        while self.count_below(hi) < n {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= n {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn apply_a(&self, x: &[f64]) -> Vec<f64> {
        apply(&self.a_diag, &self.a_off, x)
    }

    pub fn apply_b(&self, x: &[f64]) -> Vec<f64> {
        apply(&self.b_diag, &self.b_off, x)
    }

    /// Eigenvector for an (accurately known) eigenvalue, normalized so `x^T B x = 1`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let m = self.dim();
        let d: Vec<f64> = (0..m)
            .map(|i| self.a_diag[i] - lambda * self.b_diag[i])
            .collect();
        let e: Vec<f64> = (0..m.saturating_sub(1))
            .map(|i| self.a_off[i] - lambda * self.b_off[i])
            .collect();
        let scale = d.iter().chain(&e).fold(0.0f64, |s, x| s.max(x.abs())).max(1.0);
        // a start vector with no symmetry, so it is never orthogonal to the target
        let mut x: Vec<f64> = (0..m)
            .map(|i| 1.0 + (i as f64 * 0.618_033_988_749_895).fract())
            .collect();
        for _ in 0..INVERSE_ITERATIONS {
            let mut rhs = self.apply_b(&x);
            solve_tridiagonal(&e, &d, &e, &mut rhs, f64::EPSILON * scale);
            let norm = self.b_norm(&rhs);
            x = rhs.into_iter().map(|v| v / norm).collect();
        }
        x
    }

    pub fn b_norm(&self, x: &[f64]) -> f64 {
        let bx = self.apply_b(x);
        x.iter().zip(&bx).map(|(a, b)| a * b).sum::<f64>().sqrt()
    }
}

fn apply(diag: &[f64], off: &[f64], x: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut y: Vec<f64> = (0..m).map(|i| diag[i] * x[i]).collect();
    for i in 0..m.saturating_sub(1) {
        y[i] += off[i] * x[i + 1];
        y[i + 1] += off[i] * x[i];
    }
    y
}

/// Solves a general tridiagonal system in place by Gaussian elimination with partial
/// pivoting. Zero pivots are replaced by `tiny`, which is what inverse iteration at an
/// exact eigenvalue needs.
pub(crate) fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], b: &mut [f64], tiny: f64) {
    let n = diag.len();
    if n == 0 {
        return;
    }
    let dl = sub.to_vec();
    let mut d = diag.to_vec();
    let mut du = sup.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let guard = |x: f64| if x == 0.0 { tiny } else { x };

    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            d[i] = guard(d[i]);
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let temp = d[i + 1];
            d[i + 1] = du[i] - fact * temp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = temp;
            let tb = b[i];
            b[i] = b[i + 1];
            b[i + 1] = tb - fact * b[i + 1];
        }
    }
    d[n - 1] = guard(d[n - 1]);

    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
}
