//! Particle exchange: coordinate swaps and their operator series, spin
//! exchange, and exclusion operators on small discrete spaces.

mod discrete;
mod series;
mod spin;

pub use discrete::{
    antisymmetrizer, build_discrete_peo, exchange_asymmetry, heisenberg_term, lattice_hamiltonian,
    permutation_matrix, permutations, product_order_check, BranchResiduals, DiscretePEO, LocalSpace,
    ProductOrderReport, ProductSpace, MAX_LOCAL_DIM, MAX_PARTICLES,
};
pub use series::{
    exchange_exact, exchange_series, relative_l2, series_errors, Axis, GridFunction, SeriesOrdering,
    MAX_POINTS_1D, MAX_POINTS_ND,
};
pub use spin::{spin_exchange, spin_exchange_operator, SigmaConvention, SpinConfig, MAX_SPINS};
