//! Surface spectra assembled from the separated one-dimensional problems.

use rayon::prelude::*;
use serde::Serialize;

use super::{eigenvalues, SlSystem};
use crate::curves::Curve;
use crate::error::Result;
use crate::profiles::Profile;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub k: u32,
    pub n: usize,
    /// 1 for `k = 0`, 2 for the paired modes `k >= 1`.
    pub multiplicity: u32,
    pub lambda: f64,
}

/// `lambda_{k,n}` for integer `k` in `0..=k_max` and `n` in `1..=n_max`, sorted ascending.
pub fn assemble_spectrum(
    c: &Curve,
    profile: &Profile,
    k_max: u32,
    n_max: usize,
) -> Result<Vec<SpectrumEntry>> {
    let rows: Vec<Vec<SpectrumEntry>> = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let sys = SlSystem::from_curve(c, &profile.weight, &profile.metric, k as f64)?;
            Ok(eigenvalues(&sys, n_max)?
                .into_iter()
                .enumerate()
                .map(|(i, lambda)| SpectrumEntry {
                    k,
                    n: i + 1,
                    multiplicity: if k == 0 { 1 } else { 2 },
                    lambda,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut out: Vec<SpectrumEntry> = rows.into_iter().flatten().collect();
    out.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.k.cmp(&b.k)));
    Ok(out)
}

/// CSV with header `k,n,multiplicity,lambda`.
pub fn spectrum_csv(entries: &[SpectrumEntry]) -> String {
    let mut out = String::from("k,n,multiplicity,lambda\n");
    for e in entries {
        out.push_str(&format!(
            "{},{},{},{}\n",
            e.k,
            e.n,
            e.multiplicity,
            crate::fmt_f64(e.lambda)
        ));
    }
    out
}
