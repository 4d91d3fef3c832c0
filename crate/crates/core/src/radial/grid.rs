use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Spatial dimension of the relative-motion problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Two,
    Three,
}

impl Dimension {
    /// Power `p` of the radial measure `r^p dr`.
    pub fn measure_power(self) -> i32 {
        match self {
            Dimension::Two => 1,
            Dimension::Three => 2,
        }
    }
}

/// Uniform radial mesh `r_i = i h`, `i = 0..=N`, `N h = r_max`, with
/// quadrature weights for the measure `r dr` (2D) or `r^2 dr` (3D).
///
/// Weights are the composite trapezoid rule with Gregory end corrections
/// (coefficients 3/8, 7/6, 23/24 at each end), exact for cubic integrands.
#[derive(Debug, Clone)]
pub struct RadialGrid<T> {
    h: T,
    r_max: T,
    dim: Dimension,
    r: Arc<[T]>,
    weights: Arc<[T]>,
}

pub const MIN_STEP: f64 = 1e-4;
pub const MAX_STEP: f64 = 5e-2;

impl<T: Real> RadialGrid<T> {
    pub fn new(h: T, r_max: T, dim: Dimension) -> Result<Self> {
        if !(h.as_f64() >= MIN_STEP && h.as_f64() <= MAX_STEP) {
            return Err(invalid(format!(
                "radial step h={h} outside [{MIN_STEP}, {MAX_STEP}]"
            )));
        }
        let intervals = (r_max / h).round();
        let n = intervals.as_f64() as usize;
        if n < 8 {
            return Err(invalid(format!("r_max={r_max} too small for h={h}")));
        }
        if (intervals * h - r_max).abs() > h * T::cst(1e-6) {
            return Err(invalid(format!(
                "r_max={r_max} is not an integer multiple of h={h}"
            )));
        }
        let r: Vec<T> = (0..=n).map(|i| T::from_usize_lossy(i) * h).collect();
        let p = dim.measure_power();
        let end = [T::cst(3.0 / 8.0), T::cst(7.0 / 6.0), T::cst(23.0 / 24.0)];
        let weights: Vec<T> = (0..=n)
            .map(|i| {
                let from_end = i.min(n - i);
                let c = if from_end < 3 { end[from_end] } else { T::one() };
                h * c * r[i].powi(p)
            })
            .collect();
        Ok(Self {
            h,
            r_max: intervals * h,
            dim,
            r: r.into(),
            weights: weights.into(),
        })
    }

    pub fn h(&self) -> T {
        self.h
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn dimension(&self) -> Dimension {
        self.dim
    }

    pub fn n_points(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[T] {
        &self.r
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Index of the grid point nearest to `r` (clamped to the mesh).
    pub fn nearest_index(&self, r: T) -> usize {
        let i = (r / self.h).round().as_f64();
        i.clamp(0.0, (self.n_points() - 1) as f64) as usize
    }

    pub fn integrate(&self, f: &[T]) -> T {
        debug_assert_eq!(f.len(), self.n_points());
        self.weights
            .iter()
            .zip(f)
            .fold(T::zero(), |acc, (w, v)| acc + *w * *v)
    }

    /// Weighted inner product `∫ a b w(r) dr`.
    pub fn inner(&self, a: &[T], b: &[T]) -> T {
        debug_assert_eq!(a.len(), self.n_points());
        debug_assert_eq!(b.len(), self.n_points());
        self.weights
            .iter()
            .zip(a.iter().zip(b))
            .fold(T::zero(), |acc, (w, (x, y))| acc + *w * *x * *y)
    }

    /// Same mesh (step, size, measure).
    pub fn same_as(&self, other: &Self) -> bool {
        self.dim == other.dim && self.h == other.h && self.n_points() == other.n_points()
    }

    pub fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(h={}, n={}, {:?}) vs (h={}, n={}, {:?})",
                self.h,
                self.n_points(),
                self.dim,
                other.h,
                other.n_points(),
                other.dim
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_integrate_the_measure_exactly() {
        let g2 = RadialGrid::new(0.005f64, 12.0, Dimension::Two).unwrap();
        let ones = vec![1.0; g2.n_points()];
        assert!((g2.integrate(&ones) - 72.0).abs() < 1e-10);
        let g3 = RadialGrid::new(0.005f64, 12.0, Dimension::Three).unwrap();
        assert!((g3.integrate(&ones) - 576.0).abs() < 1e-10);
    }

    #[test]
    fn rejects_steps_outside_range() {
        assert!(RadialGrid::new(0.1f64, 12.0, Dimension::Two).is_err());
        assert!(RadialGrid::new(1e-5f64, 1.0, Dimension::Two).is_err());
        assert!(RadialGrid::new(0.005f64, 12.0012, Dimension::Two).is_err());
    }

    #[test]
    fn f32_grid_builds() {
        let g = RadialGrid::new(0.01f32, 4.0, Dimension::Two).unwrap();
        assert_eq!(g.n_points(), 401);
        let ones = vec![1.0f32; g.n_points()];
        assert!((g.integrate(&ones) - 8.0).abs() < 1e-4);
    }
}
