//! Seeded Monte Carlo checks of the predictions.

use bootcorr::{
    average_correlation, check_zeta_condition, generate_data, is_positive_definite,
    is_positive_definite_fast, k_star, population_ks_distance, run_occupancy_sweep, run_pd_sweep, zero_count,
    SimulationConfig,
};

#[test]
fn k_equal_n_is_positive_definite() {
    let (n, t) = (50, 25);
    let mut pd = 0;
    for trial in 0..1000u64 {
        let data = generate_data(n, t, 10_000 + trial).unwrap();
        let avg = average_correlation(&data, n, trial).unwrap();
        pd += usize::from(is_positive_definite(&avg.matrix).unwrap().0);
    }
    assert!(pd >= 999, "{pd}/1000");
}

#[test]
fn small_average_at_k_equal_n() {
    let data = generate_data(20, 10, 5).unwrap();
    let avg = average_correlation(&data, 20, 6).unwrap();
    assert!(is_positive_definite(&avg.matrix).unwrap().0);
    assert!(is_positive_definite_fast(&avg.matrix).unwrap());
}

#[test]
fn sweep_tracks_prediction_with_1000_trials() {
    // outside 12..=22 both curves are 0 or 1 to many digits
    let cfg = SimulationConfig::k_range(200, 20, 12, 22, 1000, 11).unwrap();
    let report = run_pd_sweep(&cfg).unwrap();
    for r in &report.per_k {
        assert!(
            (r.empirical_pd_frequency - r.predicted).abs() <= 0.05,
            "k={} empirical {} predicted {}",
            r.k,
            r.empirical_pd_frequency,
            r.predicted
        );
    }
    let crossing = report.empirical_crossing(0.5).unwrap();
    assert!((crossing - k_star(200, 10.0).unwrap()).abs() <= 2.0);
}

#[test]
fn sweep_frequency_grows_with_k_and_saturates_at_n() {
    for &(n, t) in &[(30, 6), (40, 10), (24, 6)] {
        let trials = 80;
        let cfg = SimulationConfig::k_range(n, t, 1, n, trials, 3).unwrap();
        let report = run_pd_sweep(&cfg).unwrap();
        let slack = 2.0 / (trials as f64).sqrt();
        for w in report.per_k.windows(2) {
            assert!(w[1].empirical_pd_frequency + slack >= w[0].empirical_pd_frequency);
        }
        assert_eq!(report.per_k.last().unwrap().empirical_pd_frequency, 1.0, "n={n} t={t}");
    }
}

#[test]
fn zeta_condition_predicts_definiteness() {
    let (n, t) = (50, 10);
    let mut agree = 0;
    let mut total = 0;
    for k in 5..=15 {
        for run in 0..60u64 {
            let data = generate_data(n, t, 1_000 * k as u64 + run).unwrap();
            let rec = check_zeta_condition(&data, k, run).unwrap();
            for (&z, &u) in rec.zero_counts.iter().zip(&rec.unique_counts) {
                assert_eq!(z, zero_count(n, u));
            }
            agree += usize::from(rec.condition_holds() == rec.pd_observed);
            total += 1;
        }
    }
    assert!(agree as f64 >= 0.99 * total as f64, "{agree}/{total}");
}

#[test]
fn occupancy_cdf_close_to_normal() {
    let sweep = run_occupancy_sweep(100, 10_000, 7).unwrap();
    // the uncorrected distance converges to the lattice floor, not to zero
    let floor = population_ks_distance(100).unwrap();
    assert!((sweep.ks_distance - floor).abs() < 0.015, "{} vs {floor}", sweep.ks_distance);
    assert!(sweep.ks_distance_corrected < 0.05, "{}", sweep.ks_distance_corrected);
    assert_eq!(*sweep.ecdf.last().unwrap(), 1.0);
}
