//! Finite-difference reference solver for the radial equation.
//!
//! Finite-volume three-point discretization: node `i` owns the cell
//! `[r_i - h/2, r_i + h/2]`, the flux `r^p g'` is differenced at the cell
//! faces, and the generalized problem `A g = E B g` (B = cell volumes) is
//! reduced to a symmetric tridiagonal matrix `B^{-1/2} A B^{-1/2}`.
//! For `ν = 0` the origin is an unknown with a half cell; otherwise
//! `g(0) = 0`. `g(r_max) = 0` in both cases. Second order in `h`.

use crate::error::Result;
use crate::linalg::Tridiagonal;
use crate::radial::grid::RadialGrid;
use crate::radial::problem::RadialProblem;
use crate::scalar::Real;

/// Discretized operator on one grid.
#[derive(Debug, Clone)]
pub struct FdOperator<T> {
    pub matrix: Tridiagonal<T>,
    /// Grid index of the first unknown (0 or 1).
    pub first: usize,
    /// `B^{1/2}` per unknown.
    pub sqrt_volume: Vec<T>,
}

impl<T: Real> FdOperator<T> {
    pub fn new(problem: &RadialProblem<T>, grid: &RadialGrid<T>) -> Self {
        let h = grid.h();
        let r = grid.r();
        let n = grid.n_points();
        let p = problem.dimension.measure_power();
        let pf = T::from_i64_lossy(p as i64);
        let half = h / T::cst(2.0);
        let first = if problem.nu() == 0 { 0 } else { 1 };
        let last = n - 2; // r_max is a Dirichlet node
        let mut diag = Vec::with_capacity(last + 1 - first);
        let mut off = Vec::with_capacity(last - first);
        let mut vol = Vec::with_capacity(last + 1 - first);
        let quarter_k = problem.k / T::cst(4.0);
        for i in first..=last {
            let right = (r[i] + half).powi(p);
            let (volume, potential, left) = if i == 0 {
                // half cell [0, h/2] with exact integrals of r^p, r^{p-1}, r^{p+2}
                let v = half.powi(p + 1) / (pf + T::one());
                let coulomb = problem.coulomb() * half.powi(p) / pf;
                let harmonic = quarter_k * half.powi(p + 3) / (pf + T::cst(3.0));
                (v, coulomb + harmonic, T::zero())
            } else {
                let lo = r[i] - half;
                let hi = r[i] + half;
                let v = (hi.powi(p + 1) - lo.powi(p + 1)) / (pf + T::one());
                (v, problem.potential(r[i]) * v, lo.powi(p))
            };
            diag.push((left + right) / h + potential);
            vol.push(volume);
            if i < last {
                off.push(-right / h);
            }
        }
        let sqrt_volume: Vec<T> = vol.iter().map(|v| v.sqrt()).collect();
        for (j, d) in diag.iter_mut().enumerate() {
            *d /= vol[j];
        }
        for (j, o) in off.iter_mut().enumerate() {
            *o /= sqrt_volume[j] * sqrt_volume[j + 1];
        }
        Self {
            matrix: Tridiagonal::new(diag, off),
            first,
            sqrt_volume,
        }
    }

    /// `index`-th eigenvalue, 0-based.
    pub fn eigenvalue(&self, index: usize) -> T {
        let tol = T::cst(1e-13).max(T::epsilon() * T::cst(64.0));
        self.matrix.eigenvalue(index, tol)
    }

    /// Eigenvector mapped back to grid samples of `g` (unnormalized
    /// shape, zero at Dirichlet nodes).
    pub fn eigenfunction(&self, energy: T, n_points: usize) -> Vec<T> {
        let y = self.matrix.eigenvector(energy);
        let mut g = vec![T::zero(); n_points];
        for (j, v) in y.iter().enumerate() {
            g[self.first + j] = *v / self.sqrt_volume[j];
        }
        g
    }
}

/// Lowest `count` eigenvalues on the grid itself (second order).
pub fn fd_energies<T: Real>(problem: &RadialProblem<T>, grid: &RadialGrid<T>, count: usize) -> Vec<T> {
    let op = FdOperator::new(problem, grid);
    (0..count.min(op.matrix.dim())).map(|i| op.eigenvalue(i)).collect()
}

/// Lowest `count` eigenvalues, Richardson-extrapolated from the grid and
/// its half-step refinement: `(4 E_{h/2} - E_h) / 3`.
pub fn fd_energies_extrapolated<T: Real>(
    problem: &RadialProblem<T>,
    grid: &RadialGrid<T>,
    count: usize,
) -> Result<Vec<T>> {
    let fine = RadialGrid::new(grid.h() / T::cst(2.0), grid.r_max(), grid.dimension())?;
    let coarse = fd_energies(problem, grid, count);
    let refined = fd_energies(problem, &fine, count);
    Ok(coarse
        .iter()
        .zip(&refined)
        .map(|(c, f)| (T::cst(4.0) * *f - *c) / T::cst(3.0))
        .collect())
}

/// The `n`-th state (1-based) sampled on `grid`: extrapolated energy and a
/// normalized profile with positive first lobe, also extrapolated from
/// the half-step grid.
pub fn fd_state<T: Real>(problem: &RadialProblem<T>, grid: &RadialGrid<T>, n: usize) -> Result<(T, Vec<T>)> {
    let fine = RadialGrid::new(grid.h() / T::cst(2.0), grid.r_max(), grid.dimension())?;
    let op_c = FdOperator::new(problem, grid);
    let op_f = FdOperator::new(problem, &fine);
    let e_c = op_c.eigenvalue(n - 1);
    let e_f = op_f.eigenvalue(n - 1);
    let mut g_c = op_c.eigenfunction(e_c, grid.n_points());
    let mut g_f = op_f.eigenfunction(e_f, fine.n_points());
    normalize_signed(grid, &mut g_c);
    normalize_signed(&fine, &mut g_f);
    let mut g: Vec<T> = g_c
        .iter()
        .enumerate()
        .map(|(i, c)| (T::cst(4.0) * g_f[2 * i] - *c) / T::cst(3.0))
        .collect();
    normalize_signed(grid, &mut g);
    Ok(((T::cst(4.0) * e_f - e_c) / T::cst(3.0), g))
}

fn normalize_signed<T: Real>(grid: &RadialGrid<T>, g: &mut [T]) {
    let norm = grid.inner(g, g).sqrt();
    let peak = g.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let lead = g
        .iter()
        .copied()
        .find(|v| v.abs() > T::cst(1e-3) * peak)
        .unwrap_or(T::one());
    let s = if lead < T::zero() { -T::one() / norm } else { T::one() / norm };
    for v in g.iter_mut() {
        *v *= s;
    }
}
