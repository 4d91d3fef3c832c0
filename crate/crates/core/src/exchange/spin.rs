use num_complex::Complex;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Largest particle count for spin registers.
pub const MAX_SPINS: usize = 12;

/// State of `k` spin-½ particles in the computational basis.
///
/// Particle `i` is bit `k − 1 − i` of the basis index, with 0 for `↑` and
/// 1 for `↓`, so index `0b01` of two spins is `|↑↓⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinConfig<T> {
    k: usize,
    amplitudes: Vec<Complex<T>>,
}

/// Normalization of `σ` in `Σ_ij = ½ + 2 σ_i·σ_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaConvention {
    /// Spin-½ operators `s = σ_Pauli / 2`.
    #[default]
    SpinHalf,
    /// Bare Pauli matrices.
    Pauli,
}

impl<T: Real> SpinConfig<T> {
    pub fn new(k: usize, amplitudes: Vec<Complex<T>>) -> Result<Self> {
        if k == 0 || k > MAX_SPINS {
            return Err(invalid(format!("spin count {k} outside [1, {MAX_SPINS}]")));
        }
        if amplitudes.len() != 1 << k {
            return Err(invalid(format!(
                "{} amplitudes for {k} spins (need {})",
                amplitudes.len(),
                1usize << k
            )));
        }
        Ok(Self { k, amplitudes })
    }

    /// Basis state from per-particle spins, `true` meaning up.
    pub fn basis(up: &[bool]) -> Result<Self> {
        let k = up.len();
        if k == 0 || k > MAX_SPINS {
            return Err(invalid(format!("spin count {k} outside [1, {MAX_SPINS}]")));
        }
        let index = up.iter().fold(0usize, |acc, &u| (acc << 1) | usize::from(!u));
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); 1 << k];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        Self::new(k, amplitudes)
    }

    pub fn particles(&self) -> usize {
        self.k
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn norm(&self) -> T {
        self.amplitudes.iter().fold(T::zero(), |a, v| a + v.norm_sqr()).sqrt()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > T::zero()) {
            return Err(invalid("cannot normalize a zero spin state"));
        }
        Ok(Self {
            k: self.k,
            amplitudes: self.amplitudes.iter().map(|a| *a / n).collect(),
        })
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if other.k != self.k {
            return Err(invalid("spin states have different particle counts"));
        }
        Ok(Self {
            k: self.k,
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(x, y)| *x * a + *y * b)
                .collect(),
        })
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * *y)
    }

    pub fn max_difference(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(T::zero(), |acc, (x, y)| acc.max((*x - *y).norm_sqr().sqrt()))
    }

    fn bit(&self, particle: usize) -> usize {
        self.k - 1 - particle
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j || i >= self.k || j >= self.k {
            return Err(invalid(format!("spin pair ({i}, {j}) invalid for {} particles", self.k)));
        }
        Ok(())
    }
}

/// `Σ_ij` by swapping the spins of particles `i` and `j` in every basis
/// index.
pub fn spin_exchange<T: Real>(cfg: &SpinConfig<T>, i: usize, j: usize) -> Result<SpinConfig<T>> {
    cfg.check_pair(i, j)?;
    let (bi, bj) = (cfg.bit(i), cfg.bit(j));
    let mut out = vec![Complex::new(T::zero(), T::zero()); cfg.amplitudes.len()];
    for (idx, a) in cfg.amplitudes.iter().enumerate() {
        let (si, sj) = ((idx >> bi) & 1, (idx >> bj) & 1);
        let swapped = if si == sj { idx } else { idx ^ (1 << bi) ^ (1 << bj) };
        out[swapped] = *a;
    }
    SpinConfig::new(cfg.k, out)
}

/// Applies `σ^a` (Pauli, `a` = 0, 1, 2 for x, y, z) to one particle.
fn pauli<T: Real>(amps: &[Complex<T>], bit: usize, axis: usize) -> Vec<Complex<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = vec![zero; amps.len()];
    for (idx, a) in amps.iter().enumerate() {
        let down = (idx >> bit) & 1 == 1;
        match axis {
            0 => out[idx ^ (1 << bit)] += *a,
            // σ_y|↑⟩ = i|↓⟩, σ_y|↓⟩ = −i|↑⟩
            1 => {
                let phase = if down {
                    Complex::new(T::zero(), -T::one())
                } else {
                    Complex::new(T::zero(), T::one())
                };
                out[idx ^ (1 << bit)] += *a * phase;
            }
            _ => out[idx] += if down { -*a } else { *a },
        }
    }
    out
}

/// `Σ_ij = ½ + 2 σ_i·σ_j` evaluated as an operator.
pub fn spin_exchange_operator<T: Real>(
    cfg: &SpinConfig<T>,
    i: usize,
    j: usize,
    convention: SigmaConvention,
) -> Result<SpinConfig<T>> {
    cfg.check_pair(i, j)?;
    let scale = match convention {
        SigmaConvention::SpinHalf => T::cst(0.25),
        SigmaConvention::Pauli => T::one(),
    };
    let two = T::cst(2.0);
    let mut out: Vec<Complex<T>> = cfg.amplitudes.iter().map(|a| *a * T::cst(0.5)).collect();
    for axis in 0..3 {
        let step = pauli(&cfg.amplitudes, cfg.bit(j), axis);
        let both = pauli(&step, cfg.bit(i), axis);
        for (o, v) in out.iter_mut().zip(&both) {
            *o += *v * (two * scale);
        }
    }
    SpinConfig::new(cfg.k, out)
}
