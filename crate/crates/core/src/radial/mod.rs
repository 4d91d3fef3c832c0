//! Bound states of the relative-motion radial equation by shooting.

pub mod basis;
pub mod fd;
pub mod grid;
pub mod integrate;
pub mod problem;
pub mod shooting;

pub use basis::{r0_from_previous, tabulate_basis, tabulate_basis_resuming, tabulate_basis_with, BasisTable};
pub use fd::{fd_energies, fd_energies_extrapolated, fd_state, FdOperator};
pub use grid::{Dimension, RadialGrid};
pub use integrate::{initial_conditions, integrate_rk6, InitialCondition, ShootingConfig, Trajectory};
pub use problem::RadialProblem;
pub use shooting::{solve_state, solve_state_with, RadialEigenstate};
