//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use meridian::curves::omega_curve;
use meridian::pipeline::{omega_data, run_pipeline_with, FlattenTrace, PipelineConfig};
use meridian::profiles::Profile;
use meridian::sturm::{bessel_oracle, dense_oracle_solve, eigenvalues, solve, SlSystem};
use meridian::verify::{
    domain_monotonicity_check, log_derivative_check, random_generatrix, random_system, restriction_identity,
    run_campaign, speed_scaling_check, sturm_comparison_check, summarize, CampaignConfig, Roughness,
    Verdict,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn classical() -> Outcome {
    let start = Instant::now();
    let sys = SlSystem::sampled(0.0, PI, 4096, |_| 1.0, |_| 1.0, 0.0).unwrap();
    let lams = eigenvalues(&sys, 5).unwrap();
    let elapsed = start.elapsed();
    let worst = lams
        .iter()
        .enumerate()
        .map(|(i, &l)| rel(l, ((i + 1) * (i + 1)) as f64))
        .fold(0.0, f64::max);
    outcome(
        worst < 1e-6 && elapsed < Duration::from_secs(1),
        format!("max rel err {worst:.2e}, {elapsed:.2?}"),
    )
}

fn triple_oracle() -> Outcome {
    let start = Instant::now();
    let profile = Profile::annulus(2.0, 1.0).unwrap();
    let fine = omega_curve(&profile.boundary, 2048).unwrap();
    let coarse = omega_curve(&profile.boundary, 64).unwrap();
    let worst = (0..4)
        .into_par_iter()
        .map(|k| {
            let k = k as f64;
            let s = SlSystem::from_curve(&fine, &profile.weight, &profile.metric, k).unwrap();
            let d = SlSystem::from_curve(&coarse, &profile.weight, &profile.metric, k).unwrap();
            let a = solve(&s, 3).unwrap();
            let b = dense_oracle_solve(&d, 3, 4).unwrap();
            (1..=3)
                .map(|n| {
                    let c = bessel_oracle(&profile.boundary, k, n).unwrap();
                    let (x, y) = (a[n - 1].lambda, b[n - 1].lambda);
                    rel(x, y).max(rel(x, c)).max(rel(y, c))
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max);
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-5 && elapsed < Duration::from_secs(10),
        format!("max pairwise rel diff {worst:.2e}, {elapsed:.2?}"),
    )
}

fn campaign(profile: Profile) -> Outcome {
    let start = Instant::now();
    let cfg = CampaignConfig::new(profile);
    let reports = run_campaign(&cfg).unwrap();
    let elapsed = start.elapsed();
    let fails = reports.iter().filter(|r| r.verdict == Verdict::Fail).count();
    let inconclusive = reports.iter().filter(|r| r.verdict == Verdict::Inconclusive).count();
    let passes_ok = reports
        .iter()
        .filter(|r| r.verdict == Verdict::Pass)
        .all(|r| r.margin > r.error_estimate && r.error_estimate > 0.0);
    let min_ratio = reports
        .iter()
        .map(|r| r.margin / r.error_estimate)
        .fold(f64::INFINITY, f64::min);
    let rows = summarize(&reports).len();
    outcome(
        fails == 0 && inconclusive == 0 && passes_ok && elapsed < Duration::from_secs(300),
        format!(
            "{} trials over {rows} (k,n) cells: {fails} fail, {inconclusive} inconclusive, \
             min margin/error {min_ratio:.1}, {elapsed:.2?}",
            reports.len()
        ),
    )
}

fn traces(profile: &Profile, k: f64, seeds: u64) -> Vec<FlattenTrace> {
    let cfg = PipelineConfig::default();
    let omega = omega_data(profile, k, cfg.grid).unwrap();
    (0..seeds)
        .into_par_iter()
        .map(|seed| {
            let alpha =
                random_generatrix(seed, &profile.boundary, &profile.metric, &Roughness::default(), cfg.grid)
                    .unwrap();
            run_pipeline_with(&alpha, k, profile, &omega, &cfg).unwrap()
        })
        .collect()
}

fn chain_ok(tr: &FlattenTrace) -> bool {
    let l = tr.lambdas();
    tr.terminal
        && tr.mu_chain.len() <= PipelineConfig::default().stage_cap
        && tr.lambda_alpha <= l[0] + tr.tol_eig
        && l.windows(2).all(|w| w[1] >= w[0] - tr.tol_eig)
        && (l[l.len() - 1] - tr.lambda_omega).abs() <= tr.tol_eig
}

fn pipeline_chain() -> Outcome {
    let mut detail = Vec::new();
    let mut pass = true;
    for (name, profile) in [
        ("annulus", Profile::annulus(2.0, 1.0).unwrap()),
        ("helicoid", Profile::helicoid(2.0, 0.0).unwrap()),
    ] {
        let trs = traces(&profile, 3.0, 25);
        let good = trs.iter().filter(|t| chain_ok(t)).count();
        let max_stages = trs.iter().map(|t| t.stages.len()).max().unwrap_or(0);
        pass &= good == trs.len();
        detail.push(format!("{name} {good}/{} (max {max_stages} stages)", trs.len()));
    }
    outcome(pass, detail.join(", "))
}

fn log_derivative() -> Outcome {
    let mut pass = true;
    let mut worst: f64 = 0.0;
    let mut tail = 0;
    let mut failures = Vec::new();
    for (name, profile) in [
        ("annulus", Profile::annulus(2.0, 1.0).unwrap()),
        ("helicoid", Profile::helicoid(2.0, 0.0).unwrap()),
    ] {
        for k in [1.0, 2.0, 3.0] {
            let r = log_derivative_check(&profile, k, 2048).unwrap();
            worst = worst.max(r.riccati_residual);
            tail += r.tail_samples;
            if !r.holds(1e-4) {
                pass = false;
                failures.push(format!("{name} k={k}: {r:?}"));
            }
        }
    }
    outcome(
        pass,
        format!(
            "max Riccati residual {worst:.2e}, {tail} samples past the mu_0 point{}",
            if failures.is_empty() { String::new() } else { format!("; {}", failures.join("; ")) }
        ),
    )
}

fn mu_sequences() -> Outcome {
    let mut pass = true;
    let mut counts = Vec::new();
    let setups = [
        ("annulus(2,1)", Profile::annulus(2.0, 1.0).unwrap()),
        ("annulus(2,0.2)", Profile::annulus(2.0, 0.2).unwrap()),
        ("helicoid(2,0)", Profile::helicoid(2.0, 0.0).unwrap()),
        ("helicoid(3,1)", Profile::helicoid(3.0, 1.0).unwrap()),
    ];
    for (name, profile) in &setups {
        let floor = profile.weight.eval(profile.boundary.r2);
        let mut row = Vec::new();
        for k in 1..=5 {
            let trs = traces(profile, k as f64, 4);
            for tr in &trs {
                let mu = &tr.mu_chain;
                let strict = mu.windows(2).all(|w| w[1] < w[0]);
                let last = mu[mu.len() - 1];
                pass &= tr.terminal && strict && last <= floor;
            }
            row.push(format!("k{k}:{}", trs[0].mu_chain.len()));
        }
        counts.push(format!("{name} [{}]", row.join(" ")));
    }
    outcome(pass, format!("stage counts {}", counts.join(", ")))
}

fn sturm_reduction() -> Outcome {
    let sys = SlSystem::sampled(0.0, PI, 4096, |_| 1.0, |_| 1.0, 0.0).unwrap();
    let r = restriction_identity(&sys, 3).unwrap();
    let z0 = r.root.unwrap();
    let classical_ok = (z0 - 2.0 * PI / 3.0).abs() < 1e-6 && rel(r.lambda_restricted, 9.0) < 1e-6;

    let mut pass = classical_ok;
    let mut detail = vec![format!("classical root {:.2e} off 2pi/3", (z0 - 2.0 * PI / 3.0).abs())];
    for (name, profile) in [
        ("annulus", Profile::annulus(2.0, 1.0).unwrap()),
        ("helicoid", Profile::helicoid(2.0, 0.0).unwrap()),
    ] {
        let (applicable, bad, identity_bad) = sturm_corpus(&profile);
        pass &= bad == 0 && identity_bad == 0;
        detail.push(format!(
            "{name} corpus: {applicable}/1200 applicable, {bad} root violations, {identity_bad} identity violations"
        ));
    }
    outcome(pass, detail.join("; "))
}

fn sturm_corpus(profile: &Profile) -> (usize, usize, usize) {
    let grid = 1024;
    (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let alpha =
                random_generatrix(seed, &profile.boundary, &profile.metric, &Roughness::default(), grid).unwrap();
            let mut counts = (0, 0, 0);
            for k in 0..4 {
                for n in 1..=3 {
                    let rep = sturm_comparison_check(&alpha, k as f64, n, profile).unwrap();
                    if rep.applicable {
                        counts.0 += 1;
                        counts.1 += usize::from(!rep.roots_ok);
                        counts.2 += usize::from(!rep.identity_ok);
                    }
                }
            }
            counts
        })
        .reduce(|| (0, 0, 0), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2))
}

fn invariants() -> Outcome {
    let results: Vec<(f64, f64)> = (0..50u64)
        .into_par_iter()
        .map(|seed| {
            let sys = random_system(seed, 512, 1.5).unwrap();
            let (a, b) = (sys.a(), sys.b());
            let len = b - a;
            let c = 0.3 + 0.05 * (seed % 50) as f64;
            let lo = a + len * 0.3 * ((seed * 7 % 11) as f64 / 11.0);
            let hi = b - len * 0.3 * ((seed * 5 % 13) as f64 / 13.0);
            let (lo, hi) = if lo <= a && hi >= b { (a + 0.1 * len, hi) } else { (lo, hi) };
            let mut worst_scale: f64 = 0.0;
            let mut worst_margin = f64::INFINITY;
            for n in 1..=3 {
                worst_scale = worst_scale.max(speed_scaling_check(&sys, n, c).unwrap());
                let m = domain_monotonicity_check(&sys, n, lo, hi).unwrap();
                worst_margin = worst_margin.min(if m.holds { m.margin } else { -m.margin.abs() });
            }
            (worst_scale, worst_margin)
        })
        .collect();
    let scale = results.iter().map(|r| r.0).fold(0.0, f64::max);
    let margin = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    outcome(
        scale <= 1e-8 && margin > 0.0,
        format!("max scaling deviation {scale:.2e}, min monotonicity margin {margin:.3e}"),
    )
}

fn main() {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("classical sanity", classical),
        ("triple oracle", triple_oracle),
        ("annulus campaign", || campaign(Profile::annulus(2.0, 1.0).unwrap())),
        ("helicoid campaign", || campaign(Profile::helicoid(2.0, 0.0).unwrap())),
        ("pipeline chain", pipeline_chain),
        ("log-derivative inequalities", log_derivative),
        ("mu sequences", mu_sequences),
        ("sturm reduction", sturm_reduction),
        ("monotonicity and scaling", invariants),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let o = check();
        println!(
            "criterion {} ({name}): {} - {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
