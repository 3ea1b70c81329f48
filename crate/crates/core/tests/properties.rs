mod common;

use common::*;
use mvmfdr::linalg::hermitian_eigenvalues;
use mvmfdr::pattern::{beam_pattern_family, theta_grid, Normalization};
use mvmfdr::{sample_covariance, steering_vector, ArrayGeometry, Complex64, SnapshotMatrix};
use proptest::prelude::*;

const DEG: f64 = std::f64::consts::PI / 180.0;

fn geometry(n: usize) -> ArrayGeometry {
    ArrayGeometry::new(n, 0.5 * 2.997_924_58e8 / 3.6e9).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn steering_first_entry_is_one(n in 2usize..16, theta in -90.0f64..90.0, f in 1e9f64..6e9) {
        let a = steering_vector(&geometry(n), theta * DEG, f).unwrap();
        prop_assert_eq!(a[0], Complex64::new(1.0, 0.0));
        prop_assert_eq!(a.len(), n);
        for z in a.iter() {
            prop_assert!((z.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn steering_mirror_angle_is_conjugate(n in 2usize..16, theta in -90.0f64..90.0, f in 1e9f64..6e9) {
        let g = geometry(n);
        let a = steering_vector(&g, theta * DEG, f).unwrap();
        let b = steering_vector(&g, -theta * DEG, f).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            prop_assert!((x - y.conj()).norm() < 1e-12);
        }
    }

    #[test]
    fn steering_phase_scales_with_frequency(theta in -90.0f64..90.0, f in 1e9f64..3e9) {
        // doubling f squares every entry: exp(-i 2 phi) = exp(-i phi)^2
        let g = geometry(8);
        let a = steering_vector(&g, theta * DEG, f).unwrap();
        let b = steering_vector(&g, theta * DEG, 2.0 * f).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            prop_assert!((x * x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn sample_covariance_ignores_snapshot_order(seed in any::<u64>(), t in 2usize..40, n in 2usize..9) {
        let mut rng = rng(seed);
        let snaps: Vec<Vec<Complex64>> = (0..t).map(|_| (0..n).map(|_| cgauss(&mut rng)).collect()).collect();
        let mut shuffled = snaps.clone();
        shuffled.rotate_left(seed as usize % t);
        shuffled.swap(0, t - 1);
        let r1 = sample_covariance(&SnapshotMatrix::from_snapshots(&snaps).unwrap(), 0.0).unwrap();
        let r2 = sample_covariance(&SnapshotMatrix::from_snapshots(&shuffled).unwrap(), 0.0).unwrap();
        prop_assert!(r1.matrix().sub(r2.matrix()).max_abs() < 1e-12 * r1.matrix().max_abs());
    }

    #[test]
    fn sample_covariance_is_hermitian_psd(seed in any::<u64>(), t in 1usize..30, n in 2usize..9) {
        let mut rng = rng(seed);
        let snaps: Vec<Vec<Complex64>> = (0..t).map(|_| (0..n).map(|_| cgauss(&mut rng)).collect()).collect();
        let r = sample_covariance(&SnapshotMatrix::from_snapshots(&snaps).unwrap(), 0.0).unwrap();
        prop_assert!(r.matrix().hermitian_defect() <= 1e-12);
        let min = hermitian_eigenvalues(r.matrix()).into_iter().fold(f64::INFINITY, f64::min);
        prop_assert!(min >= -1e-10, "min eigenvalue {}", min);
    }

    #[test]
    fn gain_ignores_unit_modulus_rotation(seed in any::<u64>(), phase in -3.2f64..3.2) {
        let mut rng = rng(seed);
        let g = geometry(8);
        let w: Vec<Complex64> = (0..8).map(|_| cgauss(&mut rng)).collect();
        let rotated: Vec<Complex64> = w.iter().map(|z| z * Complex64::from_polar(1.0, phase)).collect();
        let grid = theta_grid(&g, 181);
        let freqs = [3.5e9, 3.6e9];
        let p = beam_pattern_family(&w, &g, &freqs, &grid, Normalization::None).unwrap();
        let q = beam_pattern_family(&rotated, &g, &freqs, &grid, Normalization::None).unwrap();
        for (a, b) in p.iter().zip(&q) {
            for (x, y) in a.gains_db.iter().zip(&b.gains_db) {
                prop_assert!((x - y).abs() < 1e-12 || (*x < -250.0 && *y < -250.0));
            }
        }
    }

    #[test]
    fn per_frequency_peak_is_zero_db(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let g = geometry(8);
        let w: Vec<Complex64> = (0..8).map(|_| cgauss(&mut rng)).collect();
        let grid = theta_grid(&g, 181);
        let fam = beam_pattern_family(&w, &g, &[3.5e9, 3.55e9, 3.6e9], &grid, Normalization::PerFrequencyPeak).unwrap();
        for p in &fam {
            prop_assert_eq!(p.peak_db(), 0.0);
        }
        let glob = beam_pattern_family(&w, &g, &[3.5e9, 3.55e9, 3.6e9], &grid, Normalization::GlobalPeak).unwrap();
        let peak = glob.iter().map(|p| p.peak_db()).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(peak, 0.0);
    }
}
