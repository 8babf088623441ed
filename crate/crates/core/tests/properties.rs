use proptest::prelude::*;
use transmission_bounds::bounds::{
    bound_basic, bound_basic_weak, bound_special, sech2, to_particle_bound, BoundFamily, BoundResult, SpecialCase,
    TrialFunction,
};
use transmission_bounds::profiles::{EnergySlice, Params, PotentialProfile};
use transmission_bounds::solver::{transmission, SolverConfig};

fn gaussian(v0: f64, a: f64, e: f64) -> EnergySlice {
    let p: Params = [("V0".to_string(), v0), ("a".to_string(), a)].into_iter().collect();
    EnergySlice::new(PotentialProfile::named("gaussian", &p).unwrap(), e).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn weak_form_never_tighter(v0 in -1.0f64..2.0, a in 0.3f64..2.0, e in 0.2f64..4.0,
                               amp in -0.5f64..1.0, c in -1.0f64..1.0, w in 0.3f64..2.0) {
        let s = gaussian(v0, a, e);
        let k = s.k_inf().unwrap();
        let h = TrialFunction::bump(k, amp * k, c, w);
        let strong = bound_basic(&s, &h).unwrap();
        let weak = bound_basic_weak(&s, &h).unwrap();
        prop_assert!(weak.theta >= strong.theta - 1e-12 * strong.theta.max(1.0));
    }

    #[test]
    fn unitarity(v0 in -2.0f64..3.0, a in 0.3f64..2.0, e in 0.1f64..5.0) {
        let r = transmission(&gaussian(v0, a, e), &SolverConfig::default()).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.transmission));
        prop_assert!((r.transmission + r.reflection - 1.0).abs() < 1e-9);
    }

    #[test]
    fn hconst_below_exact(v0 in -2.0f64..3.0, a in 0.3f64..2.0, e in 0.1f64..5.0) {
        let s = gaussian(v0, a, e);
        let t = transmission(&s, &SolverConfig::default()).unwrap().transmission;
        let b = bound_special(&s, &SpecialCase::HConst).unwrap();
        prop_assert!(b.bound <= t + 1e-8, "bound {} > T {}", b.bound, t);
    }

    #[test]
    fn particle_number_identity(theta in 0.0f64..30.0) {
        let b = BoundResult::new(BoundFamily::Basic, theta, Params::new(), Vec::new());
        let n = to_particle_bound(&b).unwrap().n_bound;
        let s = sech2(theta);
        let sinh2 = theta.sinh().powi(2);
        prop_assert!(((1.0 - s) / s - sinh2).abs() <= 1e-12 * sinh2.max(1.0));
        prop_assert!((n - sinh2).abs() <= 1e-12 * sinh2.max(1.0));
    }
}
