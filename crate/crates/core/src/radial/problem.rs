use crate::error::{invalid, Result};
use crate::radial::grid::Dimension;
use crate::scalar::Real;

/// Relative-motion radial equation of a Hooke's atom,
///
/// `-g'' - (p/r) g' + [A/r^2 + c/r + (k/4) r^2] g = E g`
///
/// with `p = 1`, `A = m^2` in 2D and `p = 2`, `A = l(l+1)` in 3D; `c = 1`
/// when the Coulomb repulsion is switched on and `0` otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialProblem<T> {
    pub dimension: Dimension,
    pub k: T,
    /// `m` in 2D (any sign), `l >= 0` in 3D.
    pub angular: i64,
    pub interaction: bool,
}

impl<T: Real> RadialProblem<T> {
    pub fn new(dimension: Dimension, k: T, angular: i64, interaction: bool) -> Result<Self> {
        if !(k > T::zero()) {
            return Err(invalid(format!("potential strength k={k} must be positive")));
        }
        if dimension == Dimension::Three && angular < 0 {
            return Err(invalid(format!("3D angular momentum l={angular} must be >= 0")));
        }
        Ok(Self {
            dimension,
            k,
            angular,
            interaction,
        })
    }

    /// 2D Hooke's atom channel `m`.
    pub fn hooke_2d(k: T, m: i64) -> Result<Self> {
        Self::new(Dimension::Two, k, m, true)
    }

    /// Leading power `ν` of the regular solution `g ~ r^ν` at the origin.
    pub fn nu(&self) -> usize {
        self.angular.unsigned_abs() as usize
    }

    pub fn coulomb(&self) -> T {
        if self.interaction {
            T::one()
        } else {
            T::zero()
        }
    }

    pub fn centrifugal(&self) -> T {
        let a = T::from_i64_lossy(self.angular);
        match self.dimension {
            Dimension::Two => a * a,
            Dimension::Three => a * (a + T::one()),
        }
    }

    pub fn first_derivative_coeff(&self) -> T {
        T::from_i64_lossy(self.dimension.measure_power() as i64)
    }

    /// Effective potential at `r > 0`.
    pub fn potential(&self, r: T) -> T {
        self.centrifugal() / (r * r) + self.coulomb() / r + self.k * r * r / T::cst(4.0)
    }

    /// Eigenvalue of the interaction-free problem, `√k (2(n-1) + |m| + 1)` in
    /// 2D and `√k (2(n-1) + l + 3/2)` in 3D, `n >= 1`.
    pub fn oscillator_energy(&self, n: usize) -> T {
        let base = T::from_usize_lossy(2 * (n.max(1) - 1) + self.nu());
        let offset = match self.dimension {
            Dimension::Two => T::one(),
            Dimension::Three => T::cst(1.5),
        };
        self.k.sqrt() * (base + offset)
    }

    /// Regular power series `g = r^ν Σ a_j r^j` (`a_0 = 1`) and its
    /// derivative, evaluated at `r` for energy `E`.
    pub fn regular_series(&self, energy: T, r: T) -> (T, T) {
        let nu = self.nu();
        let shift = 2 * nu + self.dimension.measure_power() as usize - 1;
        let c = self.coulomb();
        let quarter_k = self.k / T::cst(4.0);
        let mut a: Vec<T> = vec![T::one()];
        let mut sum = T::one();
        let mut dsum = if nu == 0 { T::zero() } else { T::from_usize_lossy(nu) / r };
        let mut rpow = T::one();
        for j in 1..600usize {
            let mut next = c * a[j - 1];
            if j >= 2 {
                next -= energy * a[j - 2];
            }
            if j >= 4 {
                next += quarter_k * a[j - 4];
            }
            next /= T::from_usize_lossy(j * (shift + j));
            a.push(next);
            rpow *= r;
            let term = next * rpow;
            sum += term;
            dsum += term * T::from_usize_lossy(nu + j) / r;
            if j > 8 && term.abs() <= T::epsilon() * T::cst(1e-2) * sum.abs() {
                let tail = a[j - 1].abs() * rpow / r;
                if tail <= T::epsilon() * sum.abs() {
                    break;
                }
            }
        }
        let lead = r.powi(nu as i32);
        (lead * sum, lead * dsum)
    }
}
