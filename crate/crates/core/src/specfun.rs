//! Harmonic-oscillator special functions and completeness sums.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::peo::Parity;
use crate::radial::{solve_state, Dimension, RadialGrid, RadialProblem};
use crate::scalar::Real;

/// Hermite functions `ψ_n(x)`, `n = 0..=n_max`, sampled on a grid.
#[derive(Debug, Clone)]
pub struct HermiteFunctionTable<T> {
    pub n_max: usize,
    pub x_grid: Vec<T>,
    /// Row `n` holds `ψ_n` at every grid point.
    values: Vec<T>,
}

/// Values `ψ_0(x), …, ψ_{n_max}(x)` at one point by the three-term
/// recursion `√((n+1)/2) ψ_{n+1} = x ψ_n − √(n/2) ψ_{n−1}`.
pub fn hermite_functions_at<T: Real>(n_max: usize, x: T) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(n_max + 1);
    let psi0 = T::PI().powf(T::cst(-0.25)) * (-x * x / T::cst(2.0)).exp();
    // below the turning point of ψ_{n_max} an underflowed ψ_0 would
    // silently zero functions that are not small
    let turning = T::from_usize_lossy(2 * n_max + 1).sqrt();
    if psi0 < T::min_positive() && x.abs() < turning + T::cst(8.0) {
        return Err(Error::Range(format!(
            "ψ_0({x}) underflows while ψ_{n_max} is not negligible there"
        )));
    }
    out.push(psi0);
    if n_max == 0 {
        return Ok(out);
    }
    out.push(T::cst(2f64.sqrt()) * x * psi0);
    for n in 1..n_max {
        let a = (T::from_usize_lossy(n + 1) / T::cst(2.0)).sqrt();
        let b = (T::from_usize_lossy(n) / T::cst(2.0)).sqrt();
        let next = (x * out[n] - b * out[n - 1]) / a;
        if !next.is_finite() {
            return Err(Error::Range(format!("ψ_{}({x}) overflowed", n + 1)));
        }
        out.push(next);
    }
    Ok(out)
}

/// Fills a table by the recursion at every grid point.
pub fn hermite_table<T: Real>(n_max: usize, x_grid: &[T]) -> Result<HermiteFunctionTable<T>> {
    if x_grid.is_empty() {
        return Err(invalid("empty x grid"));
    }
    if x_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("x grid must be strictly increasing"));
    }
    let len = x_grid.len();
    let mut values = vec![T::zero(); (n_max + 1) * len];
    for (i, &x) in x_grid.iter().enumerate() {
        for (n, v) in hermite_functions_at(n_max, x)?.into_iter().enumerate() {
            values[n * len + i] = v;
        }
    }
    Ok(HermiteFunctionTable {
        n_max,
        x_grid: x_grid.to_vec(),
        values,
    })
}

/// Uniform grid `[lo, hi]` with `step`; `hi - lo` must be a multiple of
/// the step. Symmetric ranges give exactly mirrored samples.
pub fn uniform_grid<T: Real>(lo: T, hi: T, step: T) -> Result<Vec<T>> {
    if !(step > T::zero()) || !(hi > lo) {
        return Err(invalid(format!("bad grid [{lo}, {hi}] step {step}")));
    }
    let count = ((hi - lo) / step).round();
    if (count * step - (hi - lo)).abs() > step * T::cst(1e-6) {
        return Err(invalid(format!("[{lo}, {hi}] is not a multiple of step {step}")));
    }
    let count = count.as_f64() as usize;
    let symmetric = (lo + hi).abs() <= step * T::cst(1e-9);
    Ok((0..=count)
        .map(|i| {
            if symmetric && 2 * i > count {
                -(lo + T::from_usize_lossy(count - i) * step)
            } else {
                lo + T::from_usize_lossy(i) * step
            }
        })
        .collect())
}

impl<T: Real> HermiteFunctionTable<T> {
    pub fn len(&self) -> usize {
        self.x_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_grid.is_empty()
    }

    /// `ψ_n` on the grid.
    pub fn row(&self, n: usize) -> &[T] {
        let len = self.len();
        &self.values[n * len..(n + 1) * len]
    }

    pub fn value(&self, n: usize, i: usize) -> T {
        self.values[n * self.len() + i]
    }

    /// Trapezoid weights of the (possibly non-uniform) grid.
    pub fn weights(&self) -> Vec<T> {
        let x = &self.x_grid;
        let n = x.len();
        let half = T::cst(0.5);
        (0..n)
            .map(|i| {
                let left = if i > 0 { x[i] - x[i - 1] } else { T::zero() };
                let right = if i + 1 < n { x[i + 1] - x[i] } else { T::zero() };
                half * (left + right)
            })
            .collect()
    }

    /// Trapezoid `∫ ψ_a ψ_b dx` over the grid.
    pub fn overlap(&self, a: usize, b: usize) -> T {
        self.weights()
            .iter()
            .zip(self.row(a).iter().zip(self.row(b)))
            .fold(T::zero(), |acc, (w, (x, y))| acc + *w * *x * *y)
    }

    /// Largest `N` such that every `ψ_n`, `n <= N`, has grid norm within
    /// `tol` of one. Both unresolved oscillation and mass beyond the grid
    /// ends show up in the norm first.
    pub fn quad_safe_n(&self, tol: T) -> usize {
        let w = self.weights();
        let mut safe = 0;
        for n in 0..=self.n_max {
            let norm = w
                .iter()
                .zip(self.row(n))
                .fold(T::zero(), |acc, (w, v)| acc + *w * *v * *v);
            if (norm - T::one()).abs() >= tol {
                break;
            }
            safe = n;
        }
        safe
    }

    /// CSV of one function: `x,value` rows.
    pub fn to_csv(&self, n: usize) -> String {
        let step = if self.len() > 1 { self.x_grid[1] - self.x_grid[0] } else { T::zero() };
        let mut s = format!("# n_max={} grid_step={:.16e}\nx,value\n", self.n_max, step);
        for (x, v) in self.x_grid.iter().zip(self.row(n)) {
            let _ = writeln!(s, "{x:.16e},{v:.16e}");
        }
        s
    }
}

/// A truncated completeness sum sampled along one coordinate.
///
/// 1D: `S(x, x_ref)` over `x`. 2D: `Ŝ^η(r, Δφ; r_ref)` over `r` at fixed
/// `Δφ`. Imaginary parts are kept for 2D sums built from complex angular
/// factors; they vanish for real bases.
#[derive(Debug, Clone)]
pub struct SpectralSum<T> {
    pub parity: Option<Parity>,
    pub reference: T,
    pub delta_phi: Option<T>,
    pub abscissa: Vec<T>,
    pub values: Vec<T>,
    pub imaginary: Vec<T>,
    /// Number of states summed.
    pub terms: usize,
}

impl<T: Real> SpectralSum<T> {
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a.max(v.abs()))
    }

    pub fn to_csv(&self, n_max: usize) -> String {
        let step = if self.abscissa.len() > 1 {
            self.abscissa[1] - self.abscissa[0]
        } else {
            T::zero()
        };
        let mut s = format!("# n_max={} grid_step={:.16e}\nx,S\n", n_max, step);
        for (x, v) in self.abscissa.iter().zip(&self.values) {
            let _ = writeln!(s, "{x:.16e},{v:.16e}");
        }
        s
    }
}

/// `S(x, x_ref) = Σ_{n<=N_max} ψ_n(x) ψ_n(x_ref)` over the table grid.
pub fn delta_sum_1d<T: Real>(
    table: &HermiteFunctionTable<T>,
    n_max: usize,
    x_ref: T,
) -> Result<SpectralSum<T>> {
    if n_max > table.n_max {
        return Err(invalid(format!(
            "N_max={n_max} exceeds table n_max={}",
            table.n_max
        )));
    }
    let (first, last) = (table.x_grid[0], table.x_grid[table.len() - 1]);
    if x_ref < first || x_ref > last {
        return Err(invalid(format!("x_ref={x_ref} outside [{first}, {last}]")));
    }
    let at_ref = hermite_functions_at(n_max, x_ref)?;
    let mut values = vec![T::zero(); table.len()];
    for (n, c) in at_ref.iter().enumerate() {
        for (v, p) in values.iter_mut().zip(table.row(n)) {
            *v += *c * *p;
        }
    }
    Ok(SpectralSum {
        parity: None,
        reference: x_ref,
        delta_phi: None,
        abscissa: table.x_grid.clone(),
        imaginary: vec![T::zero(); values.len()],
        values,
        terms: n_max + 1,
    })
}

/// Trapezoid `∫ S(x) f(x) dx` over the sum's abscissa.
pub fn integrate_against<T: Real>(sum: &SpectralSum<T>, f: impl Fn(T) -> T) -> T {
    let x = &sum.abscissa;
    let mut acc = T::zero();
    for i in 0..x.len().saturating_sub(1) {
        let a = sum.values[i] * f(x[i]);
        let b = sum.values[i + 1] * f(x[i + 1]);
        acc += (x[i + 1] - x[i]) * (a + b) / T::cst(2.0);
    }
    acc
}

/// Radial eigenfunction of `−∇² + (k/4) r²` in 2D.
#[derive(Debug, Clone)]
pub struct Oscillator2DState<T> {
    pub m: i64,
    pub l: usize,
    /// `√k`, the level spacing unit of `−∇² + (k/4) r²`.
    pub omega: T,
    /// `√k (2l + |m| + 1)`.
    pub energy: T,
    /// Energy found by the shooting solver.
    pub shooting_energy: T,
    /// `φ_{m,l}(r_i)` with `∫ φ² r dr = 1`.
    pub values: Vec<T>,
}

/// Oscillator profile by shooting on the interaction-free radial equation.
pub fn oscillator2d_state<T: Real>(
    k: T,
    m: i64,
    l: usize,
    grid: &RadialGrid<T>,
) -> Result<Oscillator2DState<T>> {
    if grid.dimension() != Dimension::Two {
        return Err(invalid("oscillator2d_state needs a 2D grid"));
    }
    let problem = RadialProblem::new(Dimension::Two, k, m, false)?;
    let state = solve_state(&problem, l + 1, grid)?;
    Ok(Oscillator2DState {
        m,
        l,
        omega: k.sqrt(),
        energy: problem.oscillator_energy(l + 1),
        shooting_energy: state.energy,
        values: state.values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ground_state_closed_form() {
        let v = hermite_functions_at(1, 0.0f64).unwrap();
        assert!((v[0] - 0.751_125_544_464_942_5).abs() < 1e-15);
        let v = hermite_functions_at(1, 1.0f64).unwrap();
        let expect = 2f64.sqrt() * std::f64::consts::PI.powf(-0.25) * (-0.5f64).exp();
        assert!((v[1] - expect).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids_and_extreme_arguments() {
        assert!(matches!(hermite_table(3, &[0.0f64, 0.0]), Err(Error::InvalidInput(_))));
        assert!(matches!(hermite_table(3, &[1.0f64, 0.5]), Err(Error::InvalidInput(_))));
        assert!(matches!(hermite_functions_at(2000, 45.0f64), Err(Error::Range(_))));
        // far outside every turning point the functions are negligible
        let far = hermite_functions_at(10, 45.0f64).unwrap();
        assert!(far.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn symmetric_grid_is_mirrored() {
        let x = uniform_grid(-5.0f64, 5.0, 1e-3).unwrap();
        assert_eq!(x.len(), 10001);
        for i in 0..x.len() {
            assert_eq!(x[i], -x[x.len() - 1 - i]);
        }
    }

    #[test]
    fn delta_sum_checks_truncation() {
        let x = uniform_grid(-2.0f64, 2.0, 0.01).unwrap();
        let t = hermite_table(4, &x).unwrap();
        assert!(delta_sum_1d(&t, 5, 1.0).is_err());
        assert!(delta_sum_1d(&t, 4, 3.0).is_err());
        let s = delta_sum_1d(&t, 0, 1.0).unwrap();
        let p1 = hermite_functions_at(0, 1.0f64).unwrap()[0];
        for (i, v) in s.values.iter().enumerate() {
            assert!((v - t.value(0, i) * p1).abs() < 1e-16);
        }
    }

    #[test]
    fn csv_has_header() {
        let x = uniform_grid(-1.0f64, 1.0, 0.5).unwrap();
        let t = hermite_table(2, &x).unwrap();
        let csv = t.to_csv(1);
        assert!(csv.starts_with("# n_max=2 grid_step=5.0000000000000000e-1\nx,value\n"));
        assert_eq!(csv.lines().count(), 2 + 5);
    }

    #[test]
    fn oscillator_energy_and_profile() {
        let grid = RadialGrid::new(0.01f64, 8.0, Dimension::Two).unwrap();
        let s = oscillator2d_state(4.0, 2, 0, &grid).unwrap();
        assert_eq!(s.energy, 6.0);
        assert!((s.shooting_energy - 6.0).abs() < 1e-6);
        assert!(oscillator2d_state(-1.0, 0, 0, &grid).is_err());
    }
}
