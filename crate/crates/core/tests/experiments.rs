use epitaxy_core::datagen::DataFamily;
use epitaxy_core::experiments::*;
use epitaxy_core::Outcome;

fn witness(r: &Report, key: &str) -> f64 {
    r.verdict
        .get(key)
        .unwrap_or_else(|| panic!("missing witness {key}: {:?}", r.verdict.witnesses))
}

#[test]
fn crossing_is_found_and_stable() {
    let r = conjecture1_falsification(&Conjecture1Params::default()).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Confirmed, "{:?}", r.verdict.reason);
    let t0 = witness(&r, "crossing_time");
    assert!(t0 > 0.0 && t0 < 1e-3);
    assert!(witness(&r, "crossing_bracket_lo") <= t0 && t0 <= witness(&r, "crossing_bracket_hi"));
    assert!(witness(&r, "refinement_change") < 0.01);
    assert!(witness(&r, "grad_sup_initial") < 1.0);
    // simulation oracle at n = 256..1024, identical to 8 digits
    assert!((witness(&r, "peak_grad_sup") - 1.0769).abs() < 1e-3);
}

#[test]
fn overshoot_shrinks_with_nu() {
    let peaks: Vec<f64> = [0.1, 0.03, 0.01]
        .iter()
        .map(|&nu| {
            let p = Conjecture1Params {
                nu,
                resolution_check: false,
                ..Conjecture1Params::default()
            };
            witness(&conjecture1_falsification(&p).unwrap(), "peak_grad_sup")
        })
        .collect();
    assert!(peaks.windows(2).all(|w| w[1] < w[0]), "{peaks:?}");
    assert!(peaks[2] > 1.0);
}

#[test]
fn short_horizon_is_never_confirmed() {
    let p = Conjecture1Params {
        t_end: 1e-5,
        ..Conjecture1Params::default()
    };
    let r = conjecture1_falsification(&p).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Inconclusive);
    assert!(r.verdict.reason.as_deref().unwrap().contains("no crossing"));
    // below the crossing threshold of the sweep the overshoot is gone
    let p = Conjecture1Params {
        nu: 0.003,
        resolution_check: false,
        ..Conjecture1Params::default()
    };
    let r = conjecture1_falsification(&p).unwrap();
    assert_ne!(r.verdict.outcome, Outcome::Confirmed);
}

#[test]
fn lower_bound_at_moderate_nu() {
    let p = LowerBoundParams {
        nu: 1e-2,
        ..LowerBoundParams::default()
    };
    let r = thm5_lower_bound(&p).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Confirmed, "{:?}", r.verdict.reason);
    // linear-flow oracle at n = 65536
    assert!((witness(&r, "linear_slope_origin") - 1.21985).abs() < 1e-4);
    assert!(witness(&r, "unmollified_value") > witness(&r, "unmollified_target"));
    assert!(witness(&r, "duhamel_difference") <= witness(&r, "duhamel_bound"));
    assert!(witness(&r, "grad_sup_initial") < 1.0);
}

#[test]
fn lower_bound_rejects_bad_budget() {
    for eps in [0.0, 0.3] {
        let p = LowerBoundParams {
            eps,
            ..LowerBoundParams::default()
        };
        assert!(thm5_lower_bound(&p).is_err());
    }
    let p = LowerBoundParams {
        t: Some(1.0),
        ..LowerBoundParams::default()
    };
    assert!(thm5_lower_bound(&p).is_err());
}

#[test]
fn bridge_matches_and_zero_stays_zero() {
    let r = cahn_hilliard_bridge(&BridgeParams::default()).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Confirmed);
    assert!(witness(&r, "relative_difference") <= 1e-5);
    assert!(witness(&r, "u_mean_drift") <= 1e-12);
    let zero = BridgeParams {
        data: DataFamily::Sine {
            amplitude: 0.0,
            mode: 1,
        },
        resolution_check: false,
        ..BridgeParams::default()
    };
    let r = cahn_hilliard_bridge(&zero).unwrap();
    assert_eq!(witness(&r, "sup_difference"), 0.0);
    assert_eq!(witness(&r, "u_sup_final"), 0.0);
}

#[test]
fn longtime_even_and_general() {
    let r = longtime_1d(&LongtimeParams::default()).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Confirmed, "{:?}", r.verdict.reason);
    assert_eq!(witness(&r, "even_data"), 1.0);
    assert!(witness(&r, "plateau_grad_sup") <= 1.05);
    assert!(witness(&r, "dt_h_l2_final") <= 1e-6);
    assert!(witness(&r, "energy_min") >= 0.0);
    let general = LongtimeParams {
        data: DataFamily::RandomSmooth {
            seed: 4,
            bandwidth: 3,
            amplitude: 0.9,
        },
        ..LongtimeParams::default()
    };
    let r = longtime_1d(&general).unwrap();
    assert_eq!(witness(&r, "even_data"), 0.0);
    assert_eq!(r.verdict.seed, Some(4));
    assert!(witness(&r, "plateau_grad_sup") > 0.0);
}

#[test]
fn audit_on_random_data_2d() {
    let p = AuditParams {
        dim: 2,
        nu_sweep: vec![0.1, 0.03],
        data: DataFamily::RandomSmooth {
            seed: 1,
            bandwidth: 3,
            amplitude: 0.8,
        },
        t_end: 0.05,
        t_end_nu_scale: None,
        n: Some(32),
        ..AuditParams::default()
    };
    let r = gradient_bound_audit(&p, 2).unwrap();
    assert!(witness(&r, "max_ratio") < 1.0);
    assert_eq!(r.verdict.seed, Some(1));
    let missing_n = AuditParams { n: None, ..p };
    assert!(gradient_bound_audit(&missing_n, 1).is_err());
}

#[test]
fn reference_constants() {
    let r = max_principle_reference(&ReferenceParams::default()).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Confirmed);
    assert!((witness(&r, "baseline_1d") - 0.5773503).abs() < 1e-7);
    assert_eq!(witness(&r, "baseline_multid"), 1.0);
}

#[test]
fn numerics_drivers() {
    let r = integrator_order(&IntegratorOrderParams::default()).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Confirmed, "{:?}", r.verdict.reason);
    let r = smoothing_rates(&SmoothingParams::default()).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Confirmed);
    for m in [1, 2] {
        let e = witness(&r, &format!("exponent_m{m}"));
        assert!((e + m as f64 / 4.0).abs() <= 0.03);
    }
    let r = energy_law(&EnergyLawParams::default(), 2).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Confirmed);
}

#[test]
fn experiment_names_roundtrip() {
    let all = [
        Experiment::Conjecture1(Default::default()),
        Experiment::Thm5LowerBound(Default::default()),
        Experiment::GradientBoundAudit(Default::default()),
        Experiment::Longtime1d(Default::default()),
        Experiment::CahnHilliardBridge(Default::default()),
        Experiment::MaxPrincipleReference(Default::default()),
        Experiment::SmoothingRates(Default::default()),
        Experiment::SawtoothScaling(Default::default()),
        Experiment::EnergyLaw(Default::default()),
        Experiment::IntegratorOrder(Default::default()),
    ];
    for e in all {
        let json = serde_json::to_value(&e).unwrap();
        assert_eq!(json["experiment"], e.name());
        let back: Experiment = serde_json::from_value(json).unwrap();
        assert_eq!(back, e);
    }
    let bad = serde_json::json!({"experiment": "conjecture1", "bogus": 1});
    assert!(serde_json::from_value::<Experiment>(bad).is_err());
}

#[test]
fn verdicts_are_deterministic() {
    let e = Experiment::EnergyLaw(EnergyLawParams {
        t_end: 0.005,
        ..Default::default()
    });
    let a = serde_json::to_string(&e.run(1).unwrap().verdict).unwrap();
    let b = serde_json::to_string(&e.run(2).unwrap().verdict).unwrap();
    assert_eq!(a, b);
}

#[test]
fn energy_law_for_other_variants() {
    use epitaxy_core::Variant;
    for (variant, gamma) in [(Variant::NoSlopeSelection, 4.0), (Variant::Fractional, 3.0)] {
        let p = EnergyLawParams {
            variant,
            gamma,
            dims: vec![1],
            sizes: vec![64],
            t_end: 0.01,
            ..EnergyLawParams::default()
        };
        let r = energy_law(&p, 1).unwrap();
        assert_eq!(r.verdict.outcome, Outcome::Confirmed, "{variant:?}: {:?}", r.verdict.reason);
        assert_eq!(r.verdict.model.variant, variant);
        assert!(witness(&r, "max_residual_d1") <= 1e-3);
    }
}

#[test]
fn resumed_crossing_search_continues_in_time() {
    use epitaxy_core::dynamics::Checkpoint;
    let head = Conjecture1Params {
        n: 256,
        t_end: 1e-5,
        resolution_check: false,
        ..Conjecture1Params::default()
    };
    let r = conjecture1_falsification(&head).unwrap();
    let traj = r.trajectory.unwrap();
    let snap = Checkpoint {
        t: *traj.times.last().unwrap(),
        nu: head.nu,
        gamma: 4.0,
        field: traj.final_state,
    };
    let tail = Conjecture1Params {
        t_end: 0.01,
        ..head.clone()
    };
    let r = conjecture1_resume(&tail, &snap).unwrap();
    assert_eq!(r.verdict.outcome, Outcome::Confirmed, "{:?}", r.verdict.reason);
    assert!(witness(&r, "crossing_time") > snap.t);
    assert_eq!(witness(&r, "resumed_from"), snap.t);
    // the uninterrupted crossing time, up to the restarted step size
    let full = conjecture1_falsification(&Conjecture1Params { t_end: 0.01, ..head }).unwrap();
    let gap = (witness(&r, "crossing_time") - witness(&full, "crossing_time")).abs();
    assert!(gap < 1e-7, "{gap}");
    let wrong_nu = Checkpoint { nu: 0.2, ..snap };
    assert!(conjecture1_resume(&tail, &wrong_nu).is_err());
}
