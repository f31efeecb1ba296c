//! Independent reference solver: quadratic finite elements on a refined grid, full
//! dense generalized eigendecomposition (Cholesky reduction + symmetric QR).

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{sign_changes, EigenPair, SlSystem};
use crate::error::{Error, Result};

/// Largest number of element nodes the dense path accepts.
pub const DENSE_NODE_CAP: usize = 16384;

const GAUSS: [(f64, f64); 3] = [
    (0.112_701_665_379_258_31, 5.0 / 18.0),
    (0.5, 8.0 / 18.0),
    (0.887_298_334_620_741_7, 5.0 / 18.0),
];

fn shape(xi: f64) -> ([f64; 3], [f64; 3]) {
    (
        [(1.0 - xi) * (1.0 - 2.0 * xi), 4.0 * xi * (1.0 - xi), xi * (2.0 * xi - 1.0)],
        [4.0 * xi - 3.0, 4.0 - 8.0 * xi, 4.0 * xi - 1.0],
    )
}

/// First `n_max` eigenpairs with every segment split into `refine` quadratic elements.
///
/// Intended for tests: the cost is cubic in the node count.
pub fn dense_oracle_solve(sys: &SlSystem, n_max: usize, refine: usize) -> Result<Vec<EigenPair>> {
    let refine = refine.max(1);
    let (map, moving) = sys.node_map();
    let elements = moving * refine;
    let nodes = 2 * elements + 1;
    if nodes > DENSE_NODE_CAP {
        return Err(Error::Validation(format!(
            "dense oracle grid has {nodes} nodes, cap is {DENSE_NODE_CAP}"
        )));
    }
    let m = nodes - 2;
    if n_max == 0 || n_max > m {
        return Err(Error::Validation(format!(
            "cannot compute {n_max} eigenpairs from {m} unknowns"
        )));
    }
    let k2 = sys.k() * sys.k();
    let mut a = DMatrix::<f64>::zeros(m, m);
    let mut b = DMatrix::<f64>::zeros(m, m);
    let mut e = 0;
    for i in 0..sys.segments() {
        if sys.collapsed(i) {
            continue;
        }
        let (t0, t1) = (sys.t()[i], sys.t()[i + 1]);
        let (v0, v1) = (sys.v()[i], sys.v()[i + 1]);
        let s = sys.sigma()[i];
        let hs = (t1 - t0) / refine as f64;
        for j in 0..refine {
            let mut ka = [[0.0; 3]; 3];
            let mut mb = [[0.0; 3]; 3];
            for &(xi, w) in &GAUSS {
                let u = (j as f64 + xi) / refine as f64;
                let v = v0 + u * (v1 - v0);
                let (n, dn) = shape(xi);
                for p in 0..3 {
                    for q in 0..3 {
                        ka[p][q] += w * hs * (v / s * dn[p] * dn[q] / (hs * hs) + k2 * s / v * n[p] * n[q]);
                        mb[p][q] += w * hs * v * s * n[p] * n[q];
                    }
                }
            }
            for p in 0..3 {
                let gp = 2 * e + p;
                if gp == 0 || gp == nodes - 1 {
                    continue;
                }
                for q in 0..3 {
                    let gq = 2 * e + q;
                    if gq == 0 || gq == nodes - 1 {
                        continue;
                    }
                    a[(gp - 1, gq - 1)] += ka[p][q];
                    b[(gp - 1, gq - 1)] += mb[p][q];
                }
            }
            e += 1;
        }
    }

    let chol = b
        .cholesky()
        .ok_or_else(|| Error::Oracle("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&a)
        .ok_or_else(|| Error::Oracle("singular Cholesky factor".into()))?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| Error::Oracle("singular Cholesky factor".into()))?;
    let c = (&c + c.transpose()) * 0.5;
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let mut out = Vec::with_capacity(n_max);
    for (idx, &col) in order.iter().take(n_max).enumerate() {
        let lambda = eig.eigenvalues[col];
        if let Some(prev) = out.last().map(|p: &EigenPair| p.lambda) {
            let gap = lambda - prev;
            if gap < 1e3 * f64::EPSILON * lambda.abs() {
                return Err(Error::Resolution {
                    index: idx + 1,
                    gap,
                    lambda,
                });
            }
        }
        let y: DVector<f64> = eig.eigenvectors.column(col).into_owned();
        let z = l
            .tr_solve_lower_triangular(&y)
            .ok_or_else(|| Error::Oracle("singular Cholesky factor".into()))?;
        let mut full = vec![0.0; nodes];
        full[1..nodes - 1].copy_from_slice(z.as_slice());
        let peak = full.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        let sign = full
            .iter()
            .find(|v| v.abs() > 1e-8 * peak)
            .map_or(1.0, |v| v.signum());
        full.iter_mut().for_each(|v| *v *= sign);
        let phi = map.iter().map(|&r| full[2 * r * refine]).collect();
        out.push(EigenPair {
            n: idx + 1,
            lambda,
            t: sys.t().to_vec(),
            phi,
            roots: sign_changes(&full),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn classical_dense() {
        let sys = SlSystem::sampled(0.0, PI, 64, |_| 1.0, |_| 1.0, 0.0).unwrap();
        let pairs = dense_oracle_solve(&sys, 4, 2).unwrap();
        for ep in &pairs {
            let exact = (ep.n * ep.n) as f64;
            assert!((ep.lambda - exact).abs() / exact < 1e-6, "{}", ep.lambda);
            assert_eq!(ep.roots, ep.n - 1);
            assert!(ep.phi[1] > 0.0);
        }
    }

    #[test]
    fn rejects_oversized_grid() {
        let sys = SlSystem::sampled(0.0, 1.0, 4096, |_| 1.0, |_| 1.0, 0.0).unwrap();
        assert!(matches!(dense_oracle_solve(&sys, 1, 4), Err(Error::Validation(_))));
    }
}
