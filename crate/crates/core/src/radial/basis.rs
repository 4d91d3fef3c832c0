use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::radial::grid::{Dimension, RadialGrid};
use crate::radial::integrate::ShootingConfig;
use crate::radial::problem::RadialProblem;
use crate::radial::shooting::{solve_state_with, RadialEigenstate};
use crate::scalar::Real;

/// All 2D states `g_{m,n}` for `0 <= m <= m_max`, `1 <= n <= n_max`.
///
/// Negative `m` is served by the `|m|` profile.
#[derive(Debug, Clone)]
pub struct BasisTable<T> {
    pub k: T,
    pub interaction: bool,
    pub m_max: usize,
    pub n_max: usize,
    pub grid: RadialGrid<T>,
    states: Vec<RadialEigenstate<T>>,
}

impl<T: Real> BasisTable<T> {
    /// Assembles a table from solved states, which must cover every
    /// `(m, n)` once, in any order.
    pub fn from_states(
        k: T,
        interaction: bool,
        m_max: usize,
        n_max: usize,
        grid: RadialGrid<T>,
        mut states: Vec<RadialEigenstate<T>>,
    ) -> Result<Self> {
        if states.len() != (m_max + 1) * n_max {
            return Err(invalid(format!(
                "expected {} states, got {}",
                (m_max + 1) * n_max,
                states.len()
            )));
        }
        states.sort_by_key(|s| (s.problem.nu(), s.n));
        for (i, s) in states.iter().enumerate() {
            if s.problem.nu() != i / n_max || s.n != i % n_max + 1 {
                return Err(invalid(format!(
                    "missing state m={} n={}",
                    i / n_max,
                    i % n_max + 1
                )));
            }
            grid.ensure_same(&s.grid)?;
        }
        Ok(Self {
            k,
            interaction,
            m_max,
            n_max,
            grid,
            states,
        })
    }

    /// `g_{m,n}`; `m` may be negative.
    pub fn state(&self, m: i64, n: usize) -> Option<&RadialEigenstate<T>> {
        let a = m.unsigned_abs() as usize;
        if a > self.m_max || n == 0 || n > self.n_max {
            return None;
        }
        Some(&self.states[a * self.n_max + n - 1])
    }

    pub fn energy(&self, m: i64, n: usize) -> Option<T> {
        self.state(m, n).map(|s| s.energy)
    }

    pub fn values(&self, m: i64, n: usize) -> Option<&[T]> {
        self.state(m, n).map(|s| s.values.as_slice())
    }

    /// Non-negative-m states in `(m, n)` order.
    pub fn states(&self) -> &[RadialEigenstate<T>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Largest `|<g_{m,n}, g_{m,n'}>|` over all same-channel pairs `n != n'`.
    pub fn max_orthogonality_residual(&self) -> T {
        (0..=self.m_max)
            .into_par_iter()
            .map(|m| {
                let mut worst = T::zero();
                for a in 1..=self.n_max {
                    for b in a + 1..=self.n_max {
                        let s = self.grid.inner(
                            &self.states[m * self.n_max + a - 1].values,
                            &self.states[m * self.n_max + b - 1].values,
                        );
                        worst = worst.max(s.abs());
                    }
                }
                worst
            })
            .reduce(T::zero, |a, b| a.max(b))
    }
}

/// Inner start radius for channel `m` from the previous channel's ground
/// state: first grid point where it exceeds `threshold`.
pub fn r0_from_previous<T: Real>(previous: &RadialEigenstate<T>, threshold: f64) -> Option<T> {
    let t = T::cst(threshold);
    previous
        .values
        .iter()
        .position(|v| v.abs() > t)
        .map(|i| previous.grid.r()[i])
}

/// Tabulates the interacting 2D Hooke's atom basis.
pub fn tabulate_basis<T: Real>(
    k: T,
    m_max: usize,
    n_max: usize,
    grid: &RadialGrid<T>,
) -> Result<BasisTable<T>> {
    tabulate_basis_with(k, m_max, n_max, grid, true, &ShootingConfig::default())
}

/// Tabulates a 2D basis. Ground states are solved first in order of `m`
/// so each can supply the inner start radius of the next channel; the
/// remaining states are solved in parallel.
pub fn tabulate_basis_with<T: Real>(
    k: T,
    m_max: usize,
    n_max: usize,
    grid: &RadialGrid<T>,
    interaction: bool,
    config: &ShootingConfig,
) -> Result<BasisTable<T>> {
    tabulate_basis_resuming(k, m_max, n_max, grid, interaction, config, Vec::new()).map(|(t, _)| t)
}

/// Like [`tabulate_basis_with`], reusing already solved states. Returns the
/// table and the `(m, n)` pairs that had to be solved.
///
/// Reused states must come from the same problem and grid; they enter the
/// inner start radius of later channels exactly as fresh solves would.
pub fn tabulate_basis_resuming<T: Real>(
    k: T,
    m_max: usize,
    n_max: usize,
    grid: &RadialGrid<T>,
    interaction: bool,
    config: &ShootingConfig,
    known: Vec<RadialEigenstate<T>>,
) -> Result<(BasisTable<T>, Vec<(usize, usize)>)> {
    if n_max == 0 {
        return Err(invalid("n_max must be >= 1"));
    }
    if grid.dimension() != Dimension::Two {
        return Err(invalid("basis tables are two-dimensional"));
    }
    let problems: Vec<RadialProblem<T>> = (0..=m_max)
        .map(|m| RadialProblem::new(Dimension::Two, k, m as i64, interaction))
        .collect::<Result<_>>()?;
    let mut slots: Vec<Option<RadialEigenstate<T>>> = vec![None; (m_max + 1) * n_max];
    for s in known {
        let (m, n) = (s.problem.nu(), s.n);
        if m > m_max || n == 0 || n > n_max {
            continue;
        }
        if s.problem != problems[m] {
            return Err(invalid(format!("reused state m={m} n={n} belongs to a different problem")));
        }
        grid.ensure_same(&s.grid)?;
        slots[m * n_max + n - 1] = Some(s);
    }
    let mut solved = Vec::new();
    let mut hints: Vec<Option<T>> = vec![None; m_max + 1];
    for m in 0..=m_max {
        if m > 0 && m > config.m_switch {
            let previous = slots[(m - 1) * n_max].as_ref().expect("ground state filled in order");
            hints[m] = r0_from_previous(previous, config.r0_threshold);
        }
        if slots[m * n_max].is_none() {
            slots[m * n_max] = Some(solve_state_with(&problems[m], 1, grid, config, hints[m])?);
            solved.push((m, 1));
        }
    }
    let jobs: Vec<(usize, usize)> = (0..=m_max)
        .flat_map(|m| (2..=n_max).map(move |n| (m, n)))
        .filter(|&(m, n)| slots[m * n_max + n - 1].is_none())
        .collect();
    let fresh: Vec<RadialEigenstate<T>> = jobs
        .par_iter()
        .map(|&(m, n)| solve_state_with(&problems[m], n, grid, config, hints[m]))
        .collect::<Result<_>>()?;
    for (s, &(m, n)) in fresh.into_iter().zip(&jobs) {
        slots[m * n_max + n - 1] = Some(s);
    }
    solved.extend(jobs);
    let states = slots.into_iter().map(|s| s.expect("every slot filled")).collect();
    let table = BasisTable::from_states(k, interaction, m_max, n_max, grid.clone(), states)?;
    Ok((table, solved))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_table_is_orthogonal_and_aliased() {
        let grid = RadialGrid::new(0.01f64, 10.0, Dimension::Two).unwrap();
        let t = tabulate_basis(4.0, 2, 4, &grid).unwrap();
        assert_eq!(t.len(), 12);
        assert!(t.max_orthogonality_residual() < 1e-5);
        assert_eq!(t.energy(-2, 3), t.energy(2, 3));
        assert_eq!(t.values(-1, 2), t.values(1, 2));
        assert!(t.state(3, 1).is_none());
    }

    #[test]
    fn resuming_reproduces_fresh_table() {
        let grid = RadialGrid::new(0.02f64, 10.0, Dimension::Two).unwrap();
        let config = ShootingConfig {
            m_switch: 1,
            ..ShootingConfig::default()
        };
        let fresh = tabulate_basis_with(4.0, 3, 3, &grid, true, &config).unwrap();
        let known: Vec<_> = fresh
            .states()
            .iter()
            .filter(|s| s.n != 2 && s.problem.nu() != 2)
            .cloned()
            .collect();
        let (again, solved) = tabulate_basis_resuming(4.0, 3, 3, &grid, true, &config, known).unwrap();
        assert_eq!(solved.len(), 6);
        for (a, b) in fresh.states().iter().zip(again.states()) {
            assert_eq!(a.values, b.values);
            assert_eq!(a.energy, b.energy);
        }
    }
}
