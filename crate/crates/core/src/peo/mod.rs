//! Parity projectors and the Pauli exclusion operator of the relative
//! motion.

mod angular;
mod apply;
mod spectral;
mod sphere;

pub use angular::{
    half_turn, project_parity, terms_needed, truncated_exponential_factor,
    truncated_exponential_series, AngularFunction,
};
pub use apply::{peo_kernel_apply, RelativeHamiltonian};
pub use spectral::{fwhm, spectral_peo_sum, SpectralSource};
pub use sphere::{parity_3d, spherical_harmonic};

/// Behavior under `r → −r` (`φ → φ + π` in 2D).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// Parity of the harmonic `e^{imφ}`.
    pub fn of_m(m: i64) -> Self {
        if m.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn contains(self, m: i64) -> bool {
        Parity::of_m(m) == self
    }

    pub fn label(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Two-electron spin state; fixes which spatial parity is allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinSector {
    /// Symmetric spatial function.
    Singlet,
    /// Antisymmetric spatial function.
    Triplet,
}

impl SpinSector {
    /// Spatial parity kept by the exclusion operator.
    pub fn allowed_parity(self) -> Parity {
        match self {
            SpinSector::Singlet => Parity::Even,
            SpinSector::Triplet => Parity::Odd,
        }
    }
}
