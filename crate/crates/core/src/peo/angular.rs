use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::peo::Parity;
use crate::radial::RadialGrid;
use crate::scalar::Real;

/// `f(r, φ) = Σ_{|m| <= m_max} c_m(r) e^{imφ} / √(2π)` on a radial grid.
#[derive(Debug, Clone)]
pub struct AngularFunction<T> {
    grid: RadialGrid<T>,
    m_max: usize,
    /// Row `m + m_max` holds `c_m(r_i)`.
    coeffs: Vec<Vec<Complex<T>>>,
}

pub(crate) fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

impl<T: Real> AngularFunction<T> {
    pub fn zeros(grid: &RadialGrid<T>, m_max: usize) -> Self {
        let row = vec![Complex::new(T::zero(), T::zero()); grid.n_points()];
        Self {
            grid: grid.clone(),
            m_max,
            coeffs: vec![row; 2 * m_max + 1],
        }
    }

    /// Single harmonic `radial(r) e^{imφ}/√(2π)`.
    pub fn harmonic(grid: &RadialGrid<T>, m_max: usize, m: i64, radial: &[T]) -> Result<Self> {
        if m.unsigned_abs() as usize > m_max {
            return Err(invalid(format!("|m|={} exceeds m_max={m_max}", m.abs())));
        }
        if radial.len() != grid.n_points() {
            return Err(invalid("radial samples do not match the grid"));
        }
        let mut f = Self::zeros(grid, m_max);
        for (c, v) in f.coeff_mut(m).iter_mut().zip(radial) {
            *c = Complex::new(*v, T::zero());
        }
        Ok(f)
    }

    /// Builds coefficients from `c(m, i)`.
    pub fn from_fn(grid: &RadialGrid<T>, m_max: usize, mut c: impl FnMut(i64, usize) -> Complex<T>) -> Self {
        let mut f = Self::zeros(grid, m_max);
        for m in -(m_max as i64)..=m_max as i64 {
            for (i, v) in f.coeff_mut(m).iter_mut().enumerate() {
                *v = c(m, i);
            }
        }
        f
    }

    pub fn grid(&self) -> &RadialGrid<T> {
        &self.grid
    }

    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn m_range(&self) -> std::ops::RangeInclusive<i64> {
        -(self.m_max as i64)..=self.m_max as i64
    }

    pub fn coeff(&self, m: i64) -> &[Complex<T>] {
        &self.coeffs[(m + self.m_max as i64) as usize]
    }

    pub fn coeff_mut(&mut self, m: i64) -> &mut [Complex<T>] {
        let idx = (m + self.m_max as i64) as usize;
        &mut self.coeffs[idx]
    }

    /// `‖f‖² = Σ_m ∫ |c_m|² w(r) dr`.
    pub fn norm_sq(&self) -> T {
        self.coeffs
            .iter()
            .map(|row| {
                let sq: Vec<T> = row.iter().map(|c| c.norm_sqr()).collect();
                self.grid.integrate(&sq)
            })
            .fold(T::zero(), |a, b| a + b)
    }

    /// `f(r_i, φ)`.
    pub fn value(&self, i: usize, phi: T) -> Complex<T> {
        let norm = T::one() / T::two_pi().sqrt();
        let mut acc = Complex::new(T::zero(), T::zero());
        for m in self.m_range() {
            acc += self.coeff(m)[i] * cis(T::from_i64_lossy(m) * phi);
        }
        acc * norm
    }

    /// Samples on `φ_j = 2πj / n_phi`; result indexed `[i][j]`.
    pub fn sample(&self, n_phi: usize) -> Vec<Vec<Complex<T>>> {
        let phis: Vec<T> = (0..n_phi)
            .map(|j| T::two_pi() * T::from_usize_lossy(j) / T::from_usize_lossy(n_phi))
            .collect();
        (0..self.grid.n_points())
            .map(|i| phis.iter().map(|&p| self.value(i, p)).collect())
            .collect()
    }

    /// Inverse of [`sample`](Self::sample) by a discrete Fourier sum;
    /// needs `n_phi > 2 m_max` for the harmonics to be distinguishable.
    pub fn from_samples(grid: &RadialGrid<T>, m_max: usize, samples: &[Vec<Complex<T>>]) -> Result<Self> {
        if samples.len() != grid.n_points() {
            return Err(invalid("sample rows do not match the grid"));
        }
        let n_phi = samples.first().map_or(0, |s| s.len());
        if n_phi <= 2 * m_max {
            return Err(invalid(format!("{n_phi} angular samples cannot resolve m_max={m_max}")));
        }
        let scale = T::two_pi().sqrt() / T::from_usize_lossy(n_phi);
        Ok(Self::from_fn(grid, m_max, |m, i| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for (j, s) in samples[i].iter().enumerate() {
                let phi = T::two_pi() * T::from_usize_lossy(j) / T::from_usize_lossy(n_phi);
                acc += *s * cis(-T::from_i64_lossy(m) * phi);
            }
            acc * scale
        }))
    }

    /// Multiplies harmonic `m` by `factor(m)`.
    pub fn map_harmonics(&self, factor: impl Fn(i64) -> Complex<T>) -> Self {
        let mut out = self.clone();
        for m in self.m_range() {
            let f = factor(m);
            for c in out.coeff_mut(m) {
                *c *= f;
            }
        }
        out
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        self.grid.ensure_same(&other.grid)?;
        if self.m_max != other.m_max {
            return Err(invalid("angular bandwidths differ"));
        }
        let mut out = self.clone();
        for (row, orow) in out.coeffs.iter_mut().zip(&other.coeffs) {
            for (a, b) in row.iter_mut().zip(orow) {
                *a = op(*a, *b);
            }
        }
        Ok(out)
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> T {
        self.coeffs
            .iter()
            .flatten()
            .fold(T::zero(), |a, c| a.max(c.norm_sqr().sqrt()))
    }
}

/// `f(r, φ) → f(r, φ + π)`, i.e. `c_m → (−1)^m c_m`.
pub fn half_turn<T: Real>(f: &AngularFunction<T>) -> AngularFunction<T> {
    f.map_harmonics(|m| Complex::new(crate::scalar::parity_sign(m), T::zero()))
}

/// `Â_η f = ½ [f(φ) ± f(φ + π)]`: keeps harmonics of parity `η`.
pub fn project_parity<T: Real>(f: &AngularFunction<T>, parity: Parity) -> AngularFunction<T> {
    f.map_harmonics(|m| {
        let keep = if parity.contains(m) { T::one() } else { T::zero() };
        Complex::new(keep, T::zero())
    })
}

/// `Σ_{n<=N} (−iπm)^n / n!`.
///
/// Once `N` exceeds `π|m|`, where the terms start to decrease, the partial
/// sum is evaluated as `e^{−iπm}` minus the remaining tail. Summing
/// directly would cancel terms as large as `e^{π|m|}`.
pub fn truncated_exponential_factor<T: Real>(m: i64, order: usize) -> Complex<T> {
    let z = Complex::new(T::zero(), -T::PI() * T::from_i64_lossy(m));
    let size = T::PI() * T::from_i64_lossy(m.abs());
    if T::from_usize_lossy(order) > size {
        let exact = cis(-T::PI() * T::from_i64_lossy(m));
        let mut term = Complex::new(T::one(), T::zero());
        for n in 1..=order {
            term = term * z / T::from_usize_lossy(n);
        }
        let mut tail = Complex::new(T::zero(), T::zero());
        let mut n = order + 1;
        loop {
            term = term * z / T::from_usize_lossy(n);
            tail += term;
            if term.norm_sqr().sqrt() <= T::epsilon() * T::epsilon() * (T::one() + tail.norm_sqr().sqrt()) {
                break;
            }
            n += 1;
        }
        exact - tail
    } else {
        let mut term = Complex::new(T::one(), T::zero());
        let mut sum = term;
        for n in 1..=order {
            term = term * z / T::from_usize_lossy(n);
            sum += term;
        }
        sum
    }
}

/// Applies the truncated translation series `Σ_{n<=N} (−iπ p̂_φ)^n / n!`
/// harmonic by harmonic.
pub fn truncated_exponential_series<T: Real>(f: &AngularFunction<T>, order: usize) -> AngularFunction<T> {
    f.map_harmonics(|m| truncated_exponential_factor(m, order))
}

/// Smallest `N` from which on every partial sum stays within `tol` of
/// `(−1)^m`.
pub fn terms_needed(m: i64, tol: f64) -> usize {
    let limit: Complex<f64> = Complex::new(crate::scalar::parity_sign(m), 0.0);
    let size = std::f64::consts::PI * m.abs() as f64;
    let cap = (3.0 * size) as usize + 60;
    (0..=cap)
        .filter(|&n| (truncated_exponential_factor::<f64>(m, n) - limit).norm() >= tol)
        .max()
        .map_or(0, |n| n + 1)
}
