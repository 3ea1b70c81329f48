//! Regression values for the reference scenario with the analytic covariance.
//!
//! Expected numbers come from an independent 50-digit evaluation of the same
//! model (broadside angles, 21-component wideband signal and interferer).
//! The multi-frequency design is ill-conditioned (Gram condition ~1e12), so
//! ulp-level differences in how the two evaluations build steering vectors
//! move its derived metrics by ~1e-8 relative; tolerances reflect that.

mod common;

use mvmfdr::pattern::{analyze, ripple_db};
use mvmfdr::{ideal_covariance, soi_gain_profile, Scenario};

fn close(got: f64, want: f64, tol: f64, what: &str) {
    assert!((got - want).abs() < tol, "{what}: got {got:.15}, want {want:.15}");
}

#[test]
fn ideal_metrics_match_reference() {
    let s = Scenario::paper();
    let m = analyze(&s, &ideal_covariance(&s).unwrap()).unwrap();

    close(m.mvdr.soi_gain_ripple_db, 0.412166792009509, 1e-9, "mvdr ripple");
    close(m.mvdr.soi_mean_gain_db, -0.0109204211249271, 1e-9, "mvdr mean gain");
    close(m.mvdr.output_sinr_db, 25.4137471300308, 1e-8, "mvdr sinr");
    close(m.mvdr.objective_value, 100.036637687898, 1e-8, "mvdr objective");
    let mvdr_soi = [
        0.171493214260223,
        0.111153398902078,
        0.0,
        -0.0879190140638536,
        -0.240673577749285,
    ];
    for (g, w) in m.mvdr.soi_gain_db.iter().zip(mvdr_soi) {
        close(*g, w, 1e-9, "mvdr soi gain");
    }
    let mvdr_int = [
        -29.5449058227561,
        -34.884637974304,
        -54.8844419971851,
        -37.8021266176069,
        -31.6258964811744,
    ];
    for (g, w) in m.mvdr.interferer_gain_db[0].iter().zip(mvdr_int) {
        close(*g, w, 1e-7, "mvdr interferer gain");
    }

    close(
        m.mvmfdr.soi_gain_ripple_db,
        2.27382498452333e-07,
        1e-10,
        "mvmfdr ripple",
    );
    close(
        m.mvmfdr.soi_mean_gain_db,
        -2.36755180343706e-08,
        1e-10,
        "mvmfdr mean gain",
    );
    close(m.mvmfdr.output_sinr_db, -0.374194734484630, 1e-6, "mvmfdr sinr");
    // evaluated at 60 digits from this crate's own double-precision R and A
    close(m.mvmfdr.objective_value, 208.9982346020208, 1e-9, "mvmfdr objective");
    for g in &m.mvmfdr.soi_gain_db {
        close(*g, 0.0, 1e-9, "mvmfdr soi gain");
    }
    let mvmfdr_int = [
        -3.46338130327889,
        -4.09842379630087,
        -5.23853909602533,
        -6.13097822276215,
        -7.61835288020586,
    ];
    for (g, w) in m.mvmfdr.interferer_gain_db[0].iter().zip(mvmfdr_int) {
        close(*g, w, 1e-6, "mvmfdr interferer gain");
    }
}

#[test]
fn mvmfdr_profile_is_flatter() {
    let s = Scenario::paper();
    let r = ideal_covariance(&s).unwrap();
    let d = mvmfdr::pattern::design(&s, &r).unwrap();
    let grid = s.sweep_freqs_hz();
    assert_eq!(grid.len(), 101);
    let mf = ripple_db(&soi_gain_profile(&d.mvmfdr, &s.geometry, s.soi_doa_rad, &grid).unwrap());
    let nb = ripple_db(&soi_gain_profile(&d.mvdr, &s.geometry, s.soi_doa_rad, &grid).unwrap());
    assert!(mf < nb);
    assert!(mf < 1e-6);
}
