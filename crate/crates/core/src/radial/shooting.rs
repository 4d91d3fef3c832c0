//! Eigenvalue search by shooting with node-count bisection.

use crate::error::{Error, Result};
use crate::radial::grid::{Dimension, RadialGrid};
use crate::radial::integrate::{
    count_nodes, initial_conditions, initial_conditions_at, integrate_inward, integrate_rk6,
    InitialCondition, ShootingConfig,
};
use crate::radial::problem::RadialProblem;
use crate::scalar::Real;

/// One bound state `g_{m,n}` (or `g_{l,n}` in 3D) sampled on a grid.
#[derive(Debug, Clone)]
pub struct RadialEigenstate<T> {
    pub problem: RadialProblem<T>,
    /// Radial index, 1 for the ground state of the channel.
    pub n: usize,
    pub energy: T,
    /// `g(r_i)`, normalized to `∫ g² w(r) dr = 1`, positive first lobe.
    pub values: Vec<T>,
    /// Inner start radius for large angular momentum (0 if unused).
    pub r0: T,
    pub grid: RadialGrid<T>,
}

impl<T: Real> RadialEigenstate<T> {
    pub fn node_count(&self) -> usize {
        count_nodes(&self.values)
    }

    pub fn norm(&self) -> T {
        self.grid.inner(&self.values, &self.values)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a.max(v.abs()))
    }
}

/// Solves for the `n`-th state of a channel with default settings.
pub fn solve_state<T: Real>(
    problem: &RadialProblem<T>,
    n: usize,
    grid: &RadialGrid<T>,
) -> Result<RadialEigenstate<T>> {
    solve_state_with(problem, n, grid, &ShootingConfig::default(), None)
}

/// Solves for the `n`-th state. `r0_hint` overrides the fallback inner
/// start radius for channels above `m_switch`.
///
/// The node count of the outward trajectory over `[0, r_max]` is the
/// number of eigenvalues (with `g(r_max) = 0`) below the trial energy, so
/// bisection on it cannot skip a level. The converged outward solution is
/// joined to an inward solution past the outer turning point, which
/// removes the exponentially growing tail left by the finite bracket.
pub fn solve_state_with<T: Real>(
    problem: &RadialProblem<T>,
    n: usize,
    grid: &RadialGrid<T>,
    config: &ShootingConfig,
    r0_hint: Option<T>,
) -> Result<RadialEigenstate<T>> {
    if n == 0 {
        return Err(crate::error::invalid("radial index n must be >= 1"));
    }
    if problem.dimension != grid.dimension() {
        return Err(Error::GridMismatch(format!(
            "problem is {:?} but grid measure is {:?}",
            problem.dimension,
            grid.dimension()
        )));
    }
    let init = match r0_hint {
        Some(r0) if problem.nu() > config.m_switch => {
            initial_conditions_at(problem, grid, config, r0)
        }
        _ => initial_conditions(problem, grid, config),
    };
    let nodes_at = |e: T| integrate_rk6(problem, e, grid, &init, config).node_count();

    let guess = problem.oscillator_energy(n);
    let widen = T::cst(2.0) * problem.k.sqrt();
    let mut lo = guess - T::cst(2.0);
    let mut hi = guess + widen;
    let mut found = false;
    for _ in 0..6 {
        let lo_ok = nodes_at(lo) < n;
        let hi_ok = nodes_at(hi) >= n;
        if lo_ok && hi_ok {
            found = true;
            break;
        }
        if !lo_ok {
            lo -= widen + (hi - lo);
        }
        if !hi_ok {
            hi += widen + (hi - lo);
        }
    }
    if !found {
        return Err(Error::NoBracket {
            channel: channel_label(problem),
            n,
            low: lo.as_f64(),
            high: hi.as_f64(),
        });
    }

    let tol = T::cst(config.bisection_tol);
    let two = T::cst(2.0);
    loop {
        let width = hi - lo;
        let floor = T::cst(4.0) * T::epsilon() * hi.abs().max(lo.abs());
        if width <= tol || width <= floor {
            break;
        }
        let mid = (lo + hi) / two;
        if nodes_at(mid) >= n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let energy = (lo + hi) / two;
    let outward = integrate_rk6(problem, energy, grid, &init, config).values;
    let mut values = join_tail(problem, energy, grid, outward);
    normalize(grid, &mut values);
    Ok(RadialEigenstate {
        problem: *problem,
        n,
        energy,
        values,
        r0: init_r0(&init),
        grid: grid.clone(),
    })
}

fn init_r0<T: Real>(init: &InitialCondition<T>) -> T {
    init.r_start
}

fn channel_label<T: Real>(problem: &RadialProblem<T>) -> String {
    match problem.dimension {
        Dimension::Two => format!("m={}", problem.angular),
        Dimension::Three => format!("l={}", problem.angular),
    }
}

/// Outer classical turning point as a grid index (last point with
/// `V(r) < E`), or `None` if the whole mesh is classically allowed.
fn outer_turning_index<T: Real>(problem: &RadialProblem<T>, energy: T, grid: &RadialGrid<T>) -> Option<usize> {
    let r = grid.r();
    (1..r.len()).rev().find(|&i| problem.potential(r[i]) < energy)
}

fn join_tail<T: Real>(
    problem: &RadialProblem<T>,
    energy: T,
    grid: &RadialGrid<T>,
    mut outward: Vec<T>,
) -> Vec<T> {
    let n = grid.n_points();
    let turning = outer_turning_index(problem, energy, grid)
        .unwrap_or(n - 1)
        .min(n * 9 / 10);
    // match on the largest outward sample in [r_t / 2, r_t]; far from a node
    let from = turning / 2;
    let matching = (from..=turning)
        .max_by(|&a, &b| {
            outward[a]
                .abs()
                .partial_cmp(&outward[b].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(turning);
    if matching == 0 || outward[matching] == T::zero() {
        return outward;
    }
    let inward = integrate_inward(problem, energy, grid, matching);
    if inward[matching] == T::zero() {
        return outward;
    }
    let scale = outward[matching] / inward[matching];
    for i in matching + 1..n {
        outward[i] = scale * inward[i];
    }
    outward
}

fn normalize<T: Real>(grid: &RadialGrid<T>, values: &mut [T]) {
    let norm = grid.inner(values, values).sqrt();
    let lead = values
        .iter()
        .copied()
        .find(|v| *v != T::zero())
        .unwrap_or(T::one());
    let s = if lead < T::zero() { -T::one() / norm } else { T::one() / norm };
    for v in values.iter_mut() {
        *v *= s;
    }
}
