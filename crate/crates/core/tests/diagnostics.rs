use gradclust_core::diagnostics::{
    check_centroidal, check_fixed_point, cluster_members, huber_exact_center,
    huber_self_consistency_residual,
};
use gradclust_core::engine::run;
use gradclust_core::{make_dataset, Assignment, Centers, DivergencePair, StepConfig};

#[test]
fn huber_center_is_not_the_mean_with_outliers() {
    let data = make_dataset(vec![0.0, 0.0, 10.0, 500.0], 1, None, None).unwrap();
    let pair = DivergencePair::huber(1.0).unwrap();
    let init = Centers::new(vec![3.0, 500.0], 2, 1).unwrap();
    let r = run(&data, &pair, init, &StepConfig::new(0.5)).unwrap();
    let (ok, dev) = check_centroidal(&r.final_centers, &r.final_assignment, &data).unwrap();
    assert!(!ok);
    assert!((dev - (10.0 / 3.0 - 0.5)).abs() < 1e-6);

    let (members, weights) = cluster_members(&r.final_assignment, &data, 0);
    let exact = huber_exact_center(&members, &weights, 1.0, &[5.0], 1e-14, 100_000).unwrap();
    assert!((exact[0] - 0.5).abs() < 1e-10);
    assert!(huber_self_consistency_residual(&members, &weights, 1.0, &exact) < 1e-12);
    assert!(huber_self_consistency_residual(&members, &weights, 1.0, &[10.0 / 3.0]) > 1.0);
}

#[test]
fn certificate_rejects_non_voronoi_and_non_stationary_states() {
    let data = make_dataset(vec![0.0, 1.0, 9.0, 10.0], 1, None, None).unwrap();
    let pair = DivergencePair::squared_euclidean();
    let good = Centers::new(vec![0.5, 9.5], 2, 1).unwrap();
    let a = Assignment::new(vec![0, 0, 1, 1], 2).unwrap();
    assert!(check_fixed_point(&good, &a, &data, &pair, 1e-9, 1e-9).unwrap().is_fixed_point);

    let swapped = Assignment::new(vec![0, 1, 1, 1], 2).unwrap();
    let r = check_fixed_point(&good, &swapped, &data, &pair, 1e-9, 1e-9).unwrap();
    assert!(!r.voronoi_ok);
    assert_eq!(r.worst_point, 1);

    let off = Centers::new(vec![0.6, 9.5], 2, 1).unwrap();
    let r = check_fixed_point(&off, &a, &data, &pair, 1e-9, 1e-9).unwrap();
    assert!(r.voronoi_ok && !r.is_fixed_point);
    assert!((r.grad_norm - 0.05).abs() < 1e-12);
}
