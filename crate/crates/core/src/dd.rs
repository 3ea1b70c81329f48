//! Double-double ("f64 pair") arithmetic for residuals and the KKT oracle.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`, giving
//! roughly 106 bits of significand. Only the operations the solvers need are
//! provided.

use alloc::vec::Vec;
use core::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, libm::fma(a, b, -p))
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact product of two doubles.
    pub fn prod(a: f64, b: f64) -> Self {
        let (hi, lo) = two_prod(a, b);
        Dd { hi, lo }
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, rhs.hi);
        let (t1, t2) = two_sum(self.lo, rhs.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        self + (-rhs)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        // long division: two correction steps
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Dd::new(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Dd::new(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };

    pub fn conj(self) -> Self {
        CDd {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// `|re| + |im|`, enough for pivot selection.
    pub fn l1(self) -> f64 {
        self.re.hi.abs() + self.im.hi.abs()
    }

    /// Exact product of two double-precision complex numbers, summed in double-double.
    pub fn prod(a: Complex64, b: Complex64) -> Self {
        CDd {
            re: Dd::prod(a.re, b.re) - Dd::prod(a.im, b.im),
            im: Dd::prod(a.re, b.im) + Dd::prod(a.im, b.re),
        }
    }
}

impl From<Complex64> for CDd {
    fn from(z: Complex64) -> Self {
        CDd {
            re: Dd::new(z.re),
            im: Dd::new(z.im),
        }
    }
}

impl Neg for CDd {
    type Output = CDd;
    fn neg(self) -> CDd {
        CDd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Add for CDd {
    type Output = CDd;
    fn add(self, rhs: CDd) -> CDd {
        CDd {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl Sub for CDd {
    type Output = CDd;
    fn sub(self, rhs: CDd) -> CDd {
        CDd {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl Mul for CDd {
    type Output = CDd;
    fn mul(self, rhs: CDd) -> CDd {
        CDd {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl Div for CDd {
    type Output = CDd;
    fn div(self, rhs: CDd) -> CDd {
        let den = rhs.re * rhs.re + rhs.im * rhs.im;
        let num = self * rhs.conj();
        CDd {
            re: num.re / den,
            im: num.im / den,
        }
    }
}

/// `Σ conj(a_i)·b_i` (when `conj_a`) or `Σ a_i·b_i`, accumulated in double-double.
pub fn dot(a: &[Complex64], b: &[Complex64], conj_a: bool) -> CDd {
    a.iter().zip(b).fold(CDd::ZERO, |acc, (x, y)| {
        let x = if conj_a { x.conj() } else { *x };
        acc + CDd::prod(x, *y)
    })
}

/// Solves the dense `n × n` system `M x = rhs` by LU with partial pivoting in
/// double-double arithmetic. `m` is row-major and consumed.
///
/// Returns `None` when a pivot vanishes relative to the largest entry of `m`.
pub fn lu_solve(mut m: Vec<CDd>, n: usize, mut rhs: Vec<CDd>) -> Option<Vec<CDd>> {
    assert_eq!(m.len(), n * n);
    assert_eq!(rhs.len(), n);
    let scale = m.iter().fold(0.0_f64, |s, z| s.max(z.l1()));
    if scale == 0.0 {
        return None;
    }
    let tiny = 1e-28 * scale;
    for k in 0..n {
        let (p, best) = (k..n)
            .map(|i| (i, m[i * n + k].l1()))
            .fold((k, -1.0), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if !(best > tiny) {
            return None;
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            rhs.swap(k, p);
        }
        let pivot = m[k * n + k];
        for i in (k + 1)..n {
            let f = m[i * n + k] / pivot;
            if f == CDd::ZERO {
                continue;
            }
            m[i * n + k] = CDd::ZERO;
            for j in (k + 1)..n {
                let u = m[k * n + j];
                m[i * n + j] = m[i * n + j] - f * u;
            }
            let r = rhs[k];
            rhs[i] = rhs[i] - f * r;
        }
    }
    let mut x = rhs;
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s = s - m[i * n + j] * x[j];
        }
        x[i] = s / m[i * n + i];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn recovers_bits_lost_in_f64() {
        // 1 + 2^-60 is not representable in f64 but is in double-double
        let tiny = libm::ldexp(1.0, -60);
        let x = Dd::new(1.0) + Dd::new(tiny);
        assert_eq!(x.hi, 1.0);
        assert_eq!(x.lo, tiny);
        assert_eq!((x - Dd::new(1.0)).to_f64(), tiny);
    }

    #[test]
    fn exact_product_error_term() {
        let a = 1.0 + f64::EPSILON;
        let p = Dd::prod(a, a);
        // (1+e)^2 = 1 + 2e + e^2; e^2 lands in lo
        assert_eq!(p.hi, 1.0 + 2.0 * f64::EPSILON);
        assert_eq!(p.lo, f64::EPSILON * f64::EPSILON);
    }

    #[test]
    fn division_round_trips() {
        let a = Dd::new(1.0) / Dd::new(3.0);
        let back = a * Dd::new(3.0) - Dd::new(1.0);
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn lu_solves_small_complex_system() {
        let z = |re, im| CDd::from(Complex64::new(re, im));
        let m = vec![z(0.0, 1.0), z(2.0, 0.0), z(1.0, -1.0), z(3.0, 0.5)];
        let x_true = [z(1.0, 2.0), z(-0.5, 0.25)];
        let rhs = vec![m[0] * x_true[0] + m[1] * x_true[1], m[2] * x_true[0] + m[3] * x_true[1]];
        let x = lu_solve(m, 2, rhs).unwrap();
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a.to_c64() - b.to_c64()).norm() < 1e-28);
        }
    }

    #[test]
    fn lu_detects_singular() {
        let z = |re| CDd::from(Complex64::new(re, 0.0));
        let m = vec![z(1.0), z(2.0), z(2.0), z(4.0)];
        assert!(lu_solve(m, 2, vec![z(1.0), z(1.0)]).is_none());
    }
}
