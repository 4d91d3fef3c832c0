use num_complex::Complex;

use crate::peo::angular::cis;
use crate::peo::Parity;
use crate::scalar::Real;

/// Parity of a 3D state with orbital momentum `l`: `(−1)^l`.
pub fn parity_3d(l: usize) -> Parity {
    Parity::of_m(l as i64)
}

/// Orthonormal spherical harmonic `Y_{l,m}(θ, φ)` with the Condon–Shortley
/// phase. Returns zero for `|m| > l`.
pub fn spherical_harmonic<T: Real>(l: usize, m: i64, theta: T, phi: T) -> Complex<T> {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return Complex::new(T::zero(), T::zero());
    }
    let x = theta.cos();
    let s = theta.sin().abs();
    // P_m^m = (−1)^m (2m−1)!! s^m
    let mut pmm = T::one();
    for i in 0..am {
        pmm *= -T::from_usize_lossy(2 * i + 1) * s;
    }
    let plm = if l == am {
        pmm
    } else {
        let mut prev = pmm;
        let mut cur = x * T::from_usize_lossy(2 * am + 1) * pmm;
        for ll in am + 2..=l {
            let next = (x * T::from_usize_lossy(2 * ll - 1) * cur
                - T::from_usize_lossy(ll + am - 1) * prev)
                / T::from_usize_lossy(ll - am);
            prev = cur;
            cur = next;
        }
        cur
    };
    // (l−m)!/(l+m)!
    let mut ratio = T::one();
    for i in l - am + 1..=l + am {
        ratio /= T::from_usize_lossy(i);
    }
    let norm = (T::from_usize_lossy(2 * l + 1) / (T::cst(4.0) * T::PI()) * ratio).sqrt();
    let y = cis(T::from_usize_lossy(am) * phi) * (norm * plm);
    if m >= 0 {
        y
    } else {
        y.conj() * crate::scalar::parity_sign::<T>(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn low_order_closed_forms() {
        let y00: Complex<f64> = spherical_harmonic(0, 0, 0.3, 1.0);
        assert!((y00.re - 0.5 / PI.sqrt()).abs() < 1e-15);
        let y10: Complex<f64> = spherical_harmonic(1, 0, 0.3, 1.0);
        assert!((y10.re - (3.0 / (4.0 * PI)).sqrt() * 0.3f64.cos()).abs() < 1e-15);
        let y11: Complex<f64> = spherical_harmonic(1, 1, 0.3, 1.0);
        let expect = -(3.0 / (8.0 * PI)).sqrt() * 0.3f64.sin();
        assert!((y11 - Complex::new(expect * 1.0f64.cos(), expect * 1.0f64.sin())).norm() < 1e-15);
    }

    #[test]
    fn inversion_parity_up_to_l4() {
        for l in 0..=4usize {
            let sign = if parity_3d(l) == Parity::Even { 1.0 } else { -1.0 };
            for m in -(l as i64)..=l as i64 {
                for &(t, p) in &[(0.2, 0.1), (1.1, 2.5), (2.9, -1.3), (PI / 2.0, 0.7)] {
                    let a: Complex<f64> = spherical_harmonic(l, m, PI - t, p + PI);
                    let b: Complex<f64> = spherical_harmonic(l, m, t, p);
                    assert!((a - b * sign).norm() < 1e-12, "l={l} m={m}");
                }
            }
        }
    }

    #[test]
    fn normalized_on_sphere() {
        let n = 200;
        for (l, m) in [(2usize, 1i64), (4, -3)] {
            let mut acc = 0.0;
            for i in 0..n {
                let t = (i as f64 + 0.5) * PI / n as f64;
                for j in 0..2 * n {
                    let p = j as f64 * PI / n as f64;
                    let y: Complex<f64> = spherical_harmonic(l, m, t, p);
                    acc += y.norm_sqr() * t.sin() * (PI / n as f64).powi(2);
                }
            }
            assert!((acc - 1.0).abs() < 1e-4, "{acc}");
        }
    }
}
