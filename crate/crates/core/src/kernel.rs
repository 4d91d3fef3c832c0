//! Kernel-operator approximation of the exclusion operator for the 2D
//! Hooke's atom: a low-rank correction `−λ Σ w_l |φ_l⟩⟨φ_l|` added to each
//! radial channel.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::exchange::DiscretePEO;
use crate::linalg::{interpolate_uniform, symmetric_eigen};
use crate::peo::Parity;
use crate::radial::{Dimension, FdOperator, RadialGrid, RadialProblem};
use crate::scalar::Real;
use crate::specfun::oscillator2d_state;

/// Weighting of the kernel states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelMode {
    /// `w_l = ε_l`, the oscillator surrogate energies.
    EnergyWeighted,
    /// `w_l = E_c` for every state.
    ConstantWeight,
    /// Exact eigenpairs of the discretized channel operator, `w_l = E_l`.
    ExactDeflation,
}

/// Kernel states `φ_{2j,l}` and their weighting.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec<T> {
    pub mode: KernelMode,
    /// `(2j, l)` pairs; `2j` is the angular momentum of the state.
    pub states: Vec<(i64, usize)>,
    /// Constant weight; defaults to `ε_{0,0} = √k`.
    pub e_c: Option<T>,
    pub lambda: T,
    pub k: T,
    /// Coulomb term in the channel operator.
    pub interaction: bool,
}

impl<T: Real> KernelSpec<T> {
    /// `j ∈ {0, ±1}`, `l ∈ {0, 1, 2}`.
    pub fn default_states(mode: KernelMode, k: T, lambda: T) -> Self {
        let states = [0i64, 2, -2]
            .iter()
            .flat_map(|&m| (0..3).map(move |l| (m, l)))
            .collect();
        Self {
            mode,
            states,
            e_c: None,
            lambda,
            k,
            interaction: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.states.is_empty() {
            return Err(invalid("kernel state list is empty"));
        }
        if !(self.k > T::zero()) {
            return Err(invalid(format!("k={} must be positive", self.k)));
        }
        let first = Parity::of_m(self.states[0].0);
        if self.states.iter().any(|(m, _)| Parity::of_m(*m) != first) {
            return Err(invalid("kernel states mix even and odd angular momenta"));
        }
        Ok(())
    }

    /// Surrogate energy `ε_{2j,l} = √k (2l + |2j| + 1)`.
    pub fn epsilon(&self, m: i64, l: usize) -> T {
        self.k.sqrt() * T::from_usize_lossy(2 * l + m.unsigned_abs() as usize + 1)
    }

    pub fn constant_energy(&self) -> T {
        self.e_c.unwrap_or_else(|| self.epsilon(0, 0))
    }

    fn weight(&self, m: i64, l: usize) -> T {
        match self.mode {
            KernelMode::EnergyWeighted => self.epsilon(m, l),
            KernelMode::ConstantWeight => self.constant_energy(),
            KernelMode::ExactDeflation => T::zero(),
        }
    }
}

/// Channel operator with its low-rank correction, in the symmetric
/// representation `y = B^{1/2} g` of the finite-volume discretization.
#[derive(Debug, Clone)]
pub struct DeflatedOperator<T> {
    pub m: i64,
    pub lambda: T,
    pub grid: RadialGrid<T>,
    base: FdOperator<T>,
    /// `(w_l, B^{1/2} φ_l)`.
    correction: Vec<(T, Vec<T>)>,
}

impl<T: Real> DeflatedOperator<T> {
    pub fn rank(&self) -> usize {
        self.correction.len()
    }

    /// Dense symmetric matrix `C − λ Σ w_l u_l u_lᵀ`.
    pub fn matrix(&self) -> DMatrix<T> {
        let mut a = self.base.matrix.to_dense();
        for (w, u) in &self.correction {
            let s = self.lambda * *w;
            for i in 0..u.len() {
                for j in 0..u.len() {
                    a[(i, j)] -= s * u[i] * u[j];
                }
            }
        }
        a
    }

    /// All eigenvalues, ascending.
    pub fn spectrum(&self) -> Vec<T> {
        symmetric_eigen(self.matrix()).0
    }
}

/// Builds the corrected operator for channel `m`. Only kernel states with
/// `2j = m` couple; for every other channel the angular integral vanishes
/// and the correction is empty.
pub fn assemble_channel<T: Real>(spec: &KernelSpec<T>, m: i64, grid: &RadialGrid<T>) -> Result<DeflatedOperator<T>> {
    spec.validate()?;
    if grid.dimension() != Dimension::Two {
        return Err(invalid("kernel channels are two-dimensional"));
    }
    let problem = RadialProblem::new(Dimension::Two, spec.k, m, spec.interaction)?;
    let base = FdOperator::new(&problem, grid);
    let mut correction = Vec::new();
    let matching: Vec<usize> = spec
        .states
        .iter()
        .filter(|(sm, _)| *sm == m)
        .map(|(_, l)| *l)
        .collect();
    for l in matching {
        match spec.mode {
            KernelMode::ExactDeflation => {
                let e = base.eigenvalue(l);
                correction.push((e, base.matrix.eigenvector(e)));
            }
            _ => {
                let phi = oscillator2d_state(spec.k, m, l, grid)?;
                let u: Vec<T> = base
                    .sqrt_volume
                    .iter()
                    .enumerate()
                    .map(|(j, s)| *s * phi.values[base.first + j])
                    .collect();
                correction.push((spec.weight(m, l), u));
            }
        }
    }
    Ok(DeflatedOperator {
        m,
        lambda: spec.lambda,
        grid: grid.clone(),
        base,
        correction,
    })
}

/// `n`-th eigenpair (1-based) of the corrected channel: energy and `g`
/// on the grid with `∫ g² r dr = 1`.
pub fn solve_channel<T: Real>(op: &DeflatedOperator<T>, n: usize) -> Result<(T, Vec<T>)> {
    let (values, vectors) = symmetric_eigen(op.matrix());
    if n == 0 || n > values.len() {
        return Err(invalid(format!("state n={n} outside 1..={}", values.len())));
    }
    let mut g = vec![T::zero(); op.grid.n_points()];
    for (j, s) in op.base.sqrt_volume.iter().enumerate() {
        g[op.base.first + j] = vectors[(j, n - 1)] / *s;
    }
    let norm = op.grid.inner(&g, &g).sqrt();
    let lead = g.iter().copied().find(|v| v.abs() > T::cst(1e-8)).unwrap_or(T::one());
    let s = if lead < T::zero() { -T::one() } else { T::one() } / norm;
    for v in g.iter_mut() {
        *v *= s;
    }
    Ok((values[n - 1], g))
}

/// Tabulated kernel states for direct evaluation of `K(r, φ; r', φ')`.
#[derive(Debug, Clone)]
pub struct KernelTable<T> {
    pub spec: KernelSpec<T>,
    pub grid: RadialGrid<T>,
    profiles: Vec<(i64, T, Vec<T>)>,
}

impl<T: Real> KernelTable<T> {
    pub fn new(spec: &KernelSpec<T>, grid: &RadialGrid<T>) -> Result<Self> {
        spec.validate()?;
        if spec.mode == KernelMode::ExactDeflation {
            return Err(invalid("exact deflation has no channel-independent kernel"));
        }
        let profiles = spec
            .states
            .iter()
            .map(|&(m, l)| Ok((m, spec.weight(m, l), oscillator2d_state(spec.k, m, l, grid)?.values)))
            .collect::<Result<_>>()?;
        Ok(Self {
            spec: spec.clone(),
            grid: grid.clone(),
            profiles,
        })
    }
}

/// `Σ w φ_{2j,l}(r) φ_{2j,l}(r') e^{2ij Δφ} / 2π`.
pub fn kernel_matrix_elements<T: Real>(table: &KernelTable<T>, delta_phi: T, r: T, rp: T) -> Complex<T> {
    let h = table.grid.h();
    let mut acc = Complex::new(T::zero(), T::zero());
    for (m, w, phi) in &table.profiles {
        let a = interpolate_uniform(T::zero(), h, phi, r);
        let b = interpolate_uniform(T::zero(), h, phi, rp);
        let theta = T::from_i64_lossy(*m) * delta_phi;
        acc += Complex::new(theta.cos(), theta.sin()) * (*w * a * b);
    }
    acc / T::two_pi()
}

/// `|⟨Φ|P̂|Φ⟩| / ⟨Φ|Φ⟩` for the spectrally built exclusion operator.
pub fn slater_vanishing_check<T: Real>(peo: &DiscretePEO<T>, trial: &[T]) -> Result<T> {
    let n = peo.dimension();
    if trial.len() != n {
        return Err(invalid(format!("trial has {} entries, space has {n}", trial.len())));
    }
    let v = nalgebra::DVector::from_column_slice(trial);
    let norm = v.dot(&v);
    if norm == T::zero() {
        return Err(invalid("trial state is zero"));
    }
    Ok((v.dot(&(&peo.peo * &v)) / norm).abs())
}
