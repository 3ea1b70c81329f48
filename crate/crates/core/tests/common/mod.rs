#![allow(dead_code)]

use std::f64::consts::PI;

use mvmfdr::{steering_vector, ArrayGeometry, CMatrix, Complex64, ConstraintSet, CovarianceMatrix, Scenario};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cgauss(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn paper_geometry() -> ArrayGeometry {
    Scenario::paper().geometry
}

/// `G G^H / m + 0.05 I` with `G` an `n × m` complex Gaussian matrix.
pub fn random_hpd(rng: &mut ChaCha8Rng, n: usize) -> CovarianceMatrix {
    let m = n + 4;
    let g = CMatrix::from_fn(n, m, |_, _| cgauss(rng));
    let r = g.matmul(&g.conj_transpose()).scaled(1.0 / m as f64);
    CovarianceMatrix::new(r, 0.05).unwrap()
}

/// `k` steering-vector constraints at random angles in ±80° and random
/// frequencies in 3.0–3.6 GHz, with a random nonzero response.
pub fn random_constraints(rng: &mut ChaCha8Rng, geom: &ArrayGeometry, k: usize) -> ConstraintSet {
    let angle = Uniform::new(-80.0 * PI / 180.0, 80.0 * PI / 180.0).unwrap();
    let freq = Uniform::new(3.0e9, 3.6e9).unwrap();
    let cols: Vec<_> = (0..k)
        .map(|_| steering_vector(geom, angle.sample(rng), freq.sample(rng)).unwrap())
        .collect();
    let b = Complex64::from_polar(
        Uniform::new(0.5, 2.0).unwrap().sample(rng),
        Uniform::new(-PI, PI).unwrap().sample(rng),
    );
    ConstraintSet::new(&cols, b).unwrap()
}

pub fn paper_constraints(s: &Scenario) -> ConstraintSet {
    ConstraintSet::at_frequencies(&s.geometry, s.soi_doa_rad, &s.constraint_freqs_hz, s.constraint_gain_b).unwrap()
}

/// Orthonormal basis of the column space of `a` (modified Gram–Schmidt, two passes).
pub fn orthonormal_basis(a: &CMatrix) -> Vec<Vec<Complex64>> {
    let mut q: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..a.cols() {
        let mut v = a.column(j);
        for _ in 0..2 {
            for u in &q {
                let c: Complex64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= c * ui;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        q.push(v.into_iter().map(|z| z / n).collect());
    }
    q
}

/// Random direction `d` with `d^H A = 0`, scaled to norm `scale`.
pub fn null_space_direction(rng: &mut ChaCha8Rng, basis: &[Vec<Complex64>], n: usize, scale: f64) -> Vec<Complex64> {
    let mut d: Vec<Complex64> = (0..n).map(|_| cgauss(rng)).collect();
    for _ in 0..2 {
        for u in basis {
            let c: Complex64 = u.iter().zip(&d).map(|(x, y)| x.conj() * y).sum();
            for (di, ui) in d.iter_mut().zip(u) {
                *di -= c * ui;
            }
        }
    }
    let norm = d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    d.into_iter().map(|z| z * (scale / norm)).collect()
}
