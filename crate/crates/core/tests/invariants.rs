use epitaxy_core::datagen::make_random_smooth;
use epitaxy_core::dynamics::{evolve, EvolveControls};
use epitaxy_core::experiments::{reflection_center, Verdict};
use epitaxy_core::{Field, ModelSpec, TorusGrid};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 12,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn evolution_conserves_mean_and_decreases_energy(
        seed in 0u64..1000,
        amplitude in 0.2f64..1.5,
        nu in 0.05f64..0.5,
    ) {
        let g = TorusGrid::new(1, 64).unwrap();
        let h0 = make_random_smooth(seed, 4, amplitude, g).unwrap();
        let model = ModelSpec::slope_selection(nu).unwrap();
        let traj = evolve(&h0, &model, 0.02, &EvolveControls::default()).unwrap();
        prop_assert!(traj.max_energy_increase() <= 1e-10);
        for m in &traj.mean_h {
            prop_assert!(m.abs() <= 1e-13);
        }
    }

    #[test]
    fn shifted_cosines_are_even(shift in 0usize..128) {
        let g = TorusGrid::new(1, 64).unwrap();
        let c = shift as f64 * std::f64::consts::PI / 64.0;
        let f = Field::from_fn(g, |x| (x[0] - c).cos() + 0.2 * (3.0 * (x[0] - c)).cos()).unwrap();
        let found = reflection_center(&f).unwrap();
        // cos(x − c) is even about c and c + π; both are valid centers
        let gap = (found - c).rem_euclid(std::f64::consts::PI);
        prop_assert!(gap < 1e-9 || std::f64::consts::PI - gap < 1e-9);
    }

    #[test]
    fn verdict_json_roundtrip(values in proptest::collection::vec(-1e6f64..1e6, 1..8)) {
        let g = TorusGrid::new(1, 16).unwrap();
        let mut v = Verdict::new("x", "y", g, &ModelSpec::slope_selection(0.1).unwrap());
        for (i, x) in values.iter().enumerate() {
            v.witness(format!("w{i}"), *x);
        }
        v.witness("bad", f64::NAN);
        let json = serde_json::to_string(&v).unwrap();
        let back: Verdict = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(&back, &v);
        prop_assert!(back.reason.unwrap().contains("bad"));
    }
}
