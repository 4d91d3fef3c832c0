//! Hooke's-atom bound states and Pauli exclusion operators.

// `!(x > 0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod aniso;
pub mod error;
pub mod exchange;
pub mod kernel;
pub mod linalg;
pub mod peo;
pub mod radial;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instantiations of the generic types.
pub mod f64 {
    pub type RadialGrid = crate::radial::RadialGrid<f64>;
    pub type RadialProblem = crate::radial::RadialProblem<f64>;
    pub type RadialEigenstate = crate::radial::RadialEigenstate<f64>;
    pub type BasisTable = crate::radial::BasisTable<f64>;
    pub type HermiteFunctionTable = crate::specfun::HermiteFunctionTable<f64>;
    pub type SpectralSum = crate::specfun::SpectralSum<f64>;
    pub type AngularFunction = crate::peo::AngularFunction<f64>;
    pub type RelativeHamiltonian = crate::peo::RelativeHamiltonian<f64>;
    pub type AnisoSpectrum = crate::aniso::AnisoSpectrum<f64>;
    pub type KernelSpec = crate::kernel::KernelSpec<f64>;
    pub type KernelTable = crate::kernel::KernelTable<f64>;
    pub type GridFunction = crate::exchange::GridFunction<f64>;
    pub type SpinConfig = crate::exchange::SpinConfig<f64>;
    pub type DiscretePEO = crate::exchange::DiscretePEO<f64>;
}
