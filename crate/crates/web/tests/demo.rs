use pinnlab_demo::demo::{max_reg, reference, train_profiles, TrainRequest};

#[test]
fn short_training_returns_one_profile_per_level() {
    let req = TrainRequest {
        time_step: 0.4,
        horizon: 1.2,
        iterations: 20,
        n_points: 16,
        ..TrainRequest::default()
    };
    let r = train_profiles(&req).unwrap();
    let times = r["times"].as_array().unwrap();
    assert_eq!(times.len(), 4);
    let x = r["x"].as_array().unwrap();
    for key in ["network", "reference"] {
        let p = r[key].as_array().unwrap();
        assert_eq!(p.len(), times.len());
        assert!(p.iter().all(|row| row.as_array().unwrap().len() == x.len()));
    }
    assert_eq!(r["termination"], "MaxIters");
    assert!(r["max_sup_ratio"].as_f64().unwrap() > 0.0);
    assert!(r["limit_ratio"].as_f64().unwrap() > 10.0);
    assert!(!r["history"]["iteration"].as_array().unwrap().is_empty());
}

#[test]
fn unknown_problem_is_rejected() {
    let req = TrainRequest {
        problem: "elliptic-sin".into(),
        ..TrainRequest::default()
    };
    assert!(train_profiles(&req).is_err());
    let req = TrainRequest {
        scheme: "rk4".into(),
        ..TrainRequest::default()
    };
    assert!(train_profiles(&req).is_err());
}

#[test]
fn reference_matches_exact_decay() {
    let r = reference("heat-sin", 1.0, 4).unwrap();
    let u = r["u"].as_array().unwrap();
    assert_eq!(u.len(), 5);
    // value at x = 1/2 is exp(-π² t)
    for (n, row) in u.iter().enumerate() {
        let t = n as f64 / 4.0;
        let mid = row[50].as_f64().unwrap();
        assert!((mid - (-std::f64::consts::PI.powi(2) * t).exp()).abs() < 1e-12);
    }
}

#[test]
fn bump_reference_decays_and_keeps_boundary() {
    let r = reference("heat-bump", 0.5, 5).unwrap();
    let u = r["u"].as_array().unwrap();
    let sup = |row: &serde_json::Value| {
        row.as_array()
            .unwrap()
            .iter()
            .map(|v| v.as_f64().unwrap().abs())
            .fold(0.0, f64::max)
    };
    for w in u.windows(2) {
        assert!(sup(&w[1]) <= sup(&w[0]) + 1e-12);
    }
    for row in u {
        let row = row.as_array().unwrap();
        assert!(row[0].as_f64().unwrap().abs() < 1e-12);
        assert!(row[row.len() - 1].as_f64().unwrap().abs() < 1e-12);
    }
    assert!(reference("elliptic-sin", 1.0, 4).is_err());
    assert!(reference("heat-sin", 1.0, 0).is_err());
}

#[test]
fn max_reg_identity_holds() {
    let r = max_reg(16, 5, 1.0, 3).unwrap();
    let combined = r["combined"].as_f64().unwrap();
    assert!(combined > 0.0);
    assert!(r["identity_residual"].as_f64().unwrap() <= 1e-10);
    assert!(r["slack"].as_f64().unwrap() <= 1e-10 * combined);
    assert!(max_reg(0, 5, 1.0, 0).is_err());
}
