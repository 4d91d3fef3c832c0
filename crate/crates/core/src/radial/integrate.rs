//! Fixed-step sixth-order Runge–Kutta integration of the radial equation.

use crate::radial::grid::RadialGrid;
use crate::radial::problem::RadialProblem;
use crate::scalar::Real;

/// Tunables of the shooting solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingConfig {
    /// Channels with `ν > m_switch` start at `r_0 > 0` instead of the origin.
    pub m_switch: usize,
    /// Start amplitude `g_c` used at `r_0`.
    pub g_c: f64,
    /// Width of the final energy bracket.
    pub bisection_tol: f64,
    /// Regular series covers `[0, steps_per_nu * ν * h]` before RK takes
    /// over; keeps `h ν / r` small where the centrifugal term is stiff.
    pub steps_per_nu: usize,
    /// Threshold on `|g_{m-1,1}|` locating `r_0` for the next channel.
    pub r0_threshold: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        Self {
            m_switch: 8,
            g_c: 1e-5,
            bisection_tol: 1e-10,
            steps_per_nu: 8,
            r0_threshold: 1e-12,
        }
    }
}

/// Starting data `g(r_start) = value`, `g'(r_start) = slope`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition<T> {
    pub value: T,
    pub slope: T,
    pub r_start: T,
}

/// Starting data for a channel.
///
/// At the origin: `(1, h)` for `ν = 0` and `(0, ν h^(ν-1))` for
/// `0 < ν <= m_switch`. Higher channels start at `r_0 = 0.1 √ν` (or the
/// stiffness floor, whichever is larger) with `(g_c, ν g_c / r_0)`.
pub fn initial_conditions<T: Real>(
    problem: &RadialProblem<T>,
    grid: &RadialGrid<T>,
    config: &ShootingConfig,
) -> InitialCondition<T> {
    let nu = problem.nu();
    if nu > config.m_switch {
        let fallback = T::cst(0.1) * T::from_usize_lossy(nu).sqrt();
        return initial_conditions_at(problem, grid, config, fallback);
    }
    let h = grid.h();
    if nu == 0 {
        InitialCondition {
            value: T::one(),
            slope: h,
            r_start: T::zero(),
        }
    } else {
        InitialCondition {
            value: T::zero(),
            slope: T::from_usize_lossy(nu) * h.powi(nu as i32 - 1),
            r_start: T::zero(),
        }
    }
}

/// Start at a supplied `r_0` (snapped to the grid and raised to the
/// stiffness floor `steps_per_nu * ν * h`).
pub fn initial_conditions_at<T: Real>(
    problem: &RadialProblem<T>,
    grid: &RadialGrid<T>,
    config: &ShootingConfig,
    r0: T,
) -> InitialCondition<T> {
    let nu = problem.nu().max(1);
    let floor = config.steps_per_nu * nu;
    let index = grid.nearest_index(r0).max(floor).min(grid.n_points() / 2);
    let r_start = grid.r()[index];
    let g_c = T::cst(config.g_c);
    InitialCondition {
        value: g_c,
        slope: T::from_usize_lossy(problem.nu()) * g_c / r_start,
        r_start,
    }
}

/// Sampled solution `g(r_i)` on the full grid.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    pub values: Vec<T>,
    /// First grid index at which `|g|` exceeded the overflow guard; samples
    /// from there on are clamped with the sign of the divergence.
    pub diverged_at: Option<usize>,
}

impl<T: Real> Trajectory<T> {
    /// Sign changes across the sampled trajectory (exact zeros skipped).
    pub fn node_count(&self) -> usize {
        count_nodes(&self.values)
    }
}

pub(crate) fn count_nodes<T: Real>(values: &[T]) -> usize {
    let mut last = T::zero();
    let mut nodes = 0;
    for &v in values {
        if v == T::zero() {
            continue;
        }
        if last != T::zero() && (v > T::zero()) != (last > T::zero()) {
            nodes += 1;
        }
        last = v;
    }
    nodes
}

// Butcher's seven-stage sixth-order explicit tableau.
const C: [f64; 7] = [0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0, 0.5, 0.5, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 3.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.0, 2.0 / 3.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 12.0, 1.0 / 3.0, -1.0 / 12.0, 0.0, 0.0, 0.0],
    [-1.0 / 16.0, 9.0 / 8.0, -3.0 / 16.0, -3.0 / 8.0, 0.0, 0.0],
    [0.0, 9.0 / 8.0, -3.0 / 8.0, -3.0 / 4.0, 0.5, 0.0],
    [9.0 / 44.0, -9.0 / 11.0, 63.0 / 44.0, 18.0 / 11.0, 0.0, -16.0 / 11.0],
];
const B: [f64; 7] = [
    11.0 / 120.0,
    0.0,
    27.0 / 40.0,
    27.0 / 40.0,
    -4.0 / 15.0,
    -4.0 / 15.0,
    11.0 / 120.0,
];

struct Tableau<T> {
    c: [T; 7],
    a: [[T; 6]; 7],
    b: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        Self {
            c: C.map(T::cst),
            a: A.map(|row| row.map(T::cst)),
            b: B.map(T::cst),
        }
    }
}

fn rk6_step<T: Real>(
    problem: &RadialProblem<T>,
    energy: T,
    tab: &Tableau<T>,
    x: T,
    g: T,
    dg: T,
    h: T,
) -> (T, T) {
    let p = problem.first_derivative_coeff();
    let mut k0 = [T::zero(); 7];
    let mut k1 = [T::zero(); 7];
    for s in 0..7 {
        let mut y0 = g;
        let mut y1 = dg;
        for q in 0..s {
            y0 += h * tab.a[s][q] * k0[q];
            y1 += h * tab.a[s][q] * k1[q];
        }
        let xs = x + tab.c[s] * h;
        k0[s] = y1;
        k1[s] = -(p / xs) * y1 + (problem.potential(xs) - energy) * y0;
    }
    let (mut g, mut dg) = (g, dg);
    for s in 0..7 {
        g += h * tab.b[s] * k0[s];
        dg += h * tab.b[s] * k1[s];
    }
    (g, dg)
}

/// Integrates inward from `r_max` (where `g = 0`, `g' = -1`) down to grid
/// index `stop`. Entries below `stop` are zero. The result is rescaled
/// on the fly, so only its shape is meaningful.
pub fn integrate_inward<T: Real>(
    problem: &RadialProblem<T>,
    energy: T,
    grid: &RadialGrid<T>,
    stop: usize,
) -> Vec<T> {
    let n = grid.n_points();
    let h = grid.h();
    let r = grid.r();
    let tab = Tableau::<T>::new();
    let mut values = vec![T::zero(); n];
    let (mut g, mut dg) = (T::zero(), -T::one());
    let limit = T::cst(1e10);
    let stop = stop.max(1);
    for i in (stop + 1..n).rev() {
        (g, dg) = rk6_step(problem, energy, &tab, r[i], g, dg, -h);
        values[i - 1] = g;
        if g.abs() > limit {
            let s = T::one() / limit;
            g *= s;
            dg *= s;
            for v in values[i - 1..].iter_mut() {
                *v *= s;
            }
        }
    }
    values
}

/// Integrates `g` outward from the initial condition to `r_max`.
///
/// A start at the origin is a regular start: the amplitude of `r^ν` is read
/// from the initial data (`value` for `ν = 0`, `slope / (ν h^(ν-1))`
/// otherwise) and the regular power series carries the solution to
/// `r_s = steps_per_nu * ν * h` (at least one step), where RK6 takes over.
pub fn integrate_rk6<T: Real>(
    problem: &RadialProblem<T>,
    energy: T,
    grid: &RadialGrid<T>,
    init: &InitialCondition<T>,
    config: &ShootingConfig,
) -> Trajectory<T> {
    let n = grid.n_points();
    let h = grid.h();
    let r = grid.r();
    let mut values = vec![T::zero(); n];
    let nu = problem.nu();

    let (start, mut g, mut dg) = if init.r_start == T::zero() {
        let amplitude = if nu == 0 {
            init.value
        } else {
            init.slope / (T::from_usize_lossy(nu) * h.powi(nu as i32 - 1))
        };
        let s = (config.steps_per_nu * nu).clamp(1, n - 2);
        values[0] = if nu == 0 { amplitude } else { T::zero() };
        for i in 1..=s {
            values[i] = amplitude * problem.regular_series(energy, r[i]).0;
        }
        let (gs, dgs) = problem.regular_series(energy, r[s]);
        (s, amplitude * gs, amplitude * dgs)
    } else {
        let s = grid.nearest_index(init.r_start).clamp(1, n - 2);
        values[s] = init.value;
        (s, init.value, init.slope)
    };

    let tab = Tableau::<T>::new();
    let guard = T::overflow_guard();
    let mut diverged_at = None;
    for i in start..n - 1 {
        (g, dg) = rk6_step(problem, energy, &tab, r[i], g, dg, h);
        if !(g.abs() < guard) || !(dg.abs() < guard * T::cst(1e6)) {
            let sign = if g < T::zero() { -T::one() } else { T::one() };
            for v in values.iter_mut().skip(i + 1) {
                *v = sign * guard;
            }
            diverged_at = Some(i + 1);
            break;
        }
        values[i + 1] = g;
    }
    Trajectory {
        values,
        diverged_at,
    }
}
