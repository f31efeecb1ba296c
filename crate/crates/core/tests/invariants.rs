use proptest::prelude::*;

use meridian::curves::{arclength_reparametrize, speed, Curve};
use meridian::profiles::{Profile, WeightProfile};
use meridian::sturm::{eigenvalue, rayleigh_quotient, solve, solve_one};
use meridian::verify::{random_generatrix, random_system, speed_scaling_check, Roughness};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 32,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn weight_inversion_round_trips(x in 0.1f64..5.0, helicoid in any::<bool>()) {
        let (w, p) = if helicoid {
            (WeightProfile::helicoid(), Profile::helicoid(6.0, 0.1).unwrap())
        } else {
            (WeightProfile::annulus(), Profile::annulus(6.0, 0.1).unwrap())
        };
        let back = w.invert(w.eval(x), &p.boundary).unwrap();
        prop_assert!((back - x).abs() <= 1e-10 * (1.0 + x));
        prop_assert!(w.eval(x + 1e-3) > w.eval(x));
    }

    #[test]
    fn reparametrization_has_unit_speed(
        steps in prop::collection::vec((0.01f64..1.0, -1.0f64..1.0), 3..40),
        helicoid in any::<bool>(),
    ) {
        let p = if helicoid { Profile::helicoid(2.0, 0.0).unwrap() } else { Profile::annulus(2.0, 1.0).unwrap() };
        let n = steps.len();
        let mut t = vec![0.0];
        let mut f = vec![2.0];
        let mut g = vec![0.0];
        for (i, (dt, dg)) in steps.iter().enumerate() {
            t.push(t[i] + dt);
            let s = (i + 1) as f64 / n as f64;
            f.push(2.0 - (2.0 - p.boundary.r2 - 0.01) * s);
            g.push(g[i] + 0.1 * dg);
        }
        let c = Curve::new(t, f, g).unwrap();
        let u = arclength_reparametrize(&c, &p.metric).unwrap();
        prop_assert!(speed(&u, &p.metric).max_unit_deviation() < 1e-8);
        prop_assert_eq!(u.f()[0], c.f()[0]);
        prop_assert_eq!(u.f()[u.f().len() - 1], c.f()[c.f().len() - 1]);
        prop_assert!((u.length() - speed(&c, &p.metric).total_length(&c)).abs() < 1e-9);
    }

    #[test]
    fn rayleigh_quotient_bounds_the_ground_state(seed in 0u64..1000, k in 0.0f64..4.0) {
        let sys = random_system(seed, 128, k).unwrap();
        let lam = eigenvalue(&sys, 1).unwrap();
        let ep = solve_one(&sys, 1).unwrap();
        prop_assert!((rayleigh_quotient(&ep.phi, &sys).unwrap() - lam).abs() < 1e-8 * lam);
        let len = sys.b() - sys.a();
        let trial: Vec<f64> = sys
            .t()
            .iter()
            .map(|&x| {
                let s = (x - sys.a()) / len;
                s * (1.0 - s) * (1.0 + 0.3 * (7.0 * s + seed as f64).sin())
            })
            .collect();
        prop_assert!(rayleigh_quotient(&trial, &sys).unwrap() >= lam * (1.0 - 1e-12));
    }

    #[test]
    fn eigenpairs_are_ordered_with_n_minus_one_roots(seed in 0u64..1000) {
        let sys = random_system(seed, 256, 1.0).unwrap();
        let pairs = solve(&sys, 4).unwrap();
        for (i, ep) in pairs.iter().enumerate() {
            prop_assert_eq!(ep.n, i + 1);
            prop_assert_eq!(ep.roots, i);
            prop_assert_eq!(ep.root_locations().len(), i);
        }
        prop_assert!(pairs.windows(2).all(|w| w[1].lambda > w[0].lambda));
    }

    #[test]
    fn speed_scaling_is_exact(seed in 0u64..1000, c in 0.1f64..10.0) {
        let sys = random_system(seed, 128, 0.0).unwrap();
        prop_assert!(speed_scaling_check(&sys, 1, c).unwrap() < 1e-10);
    }

    #[test]
    fn restriction_raises_eigenvalues(seed in 0u64..1000, lo in 0.0f64..0.4, hi in 0.6f64..1.0) {
        let sys = random_system(seed, 256, 2.0).unwrap();
        let len = sys.b() - sys.a();
        let (lo, hi) = (sys.a() + lo * len, sys.a() + hi * len);
        prop_assume!(lo > sys.a() || hi < sys.b());
        let sub = sys.restrict(lo, hi).unwrap();
        prop_assert!(eigenvalue(&sub, 1).unwrap() > eigenvalue(&sys, 1).unwrap());
    }

    #[test]
    fn random_generatrices_stay_in_the_strip(seed in any::<u64>()) {
        let p = Profile::annulus(3.0, 0.5).unwrap();
        let c = random_generatrix(seed, &p.boundary, &p.metric, &Roughness::default(), 128).unwrap();
        prop_assert!(c.check_generatrix(&p.boundary).is_ok());
        let interior = &c.f()[1..c.f().len() - 1];
        prop_assert!(interior.iter().all(|&x| x > 0.5 && x < 3.0));
    }

    #[test]
    fn fixed_precision_round_trips(x in any::<f64>()) {
        prop_assume!(x.is_finite());
        let s = meridian::fmt_f64(x);
        prop_assert_eq!(s.parse::<f64>().unwrap(), x);
    }
}
