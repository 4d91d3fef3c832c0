//! Anisotropic 2D Hooke's atom in the isotropic basis.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::linalg::symmetric_eigen;
use crate::peo::Parity;
use crate::radial::{BasisTable, RadialEigenstate};
use crate::scalar::Real;

/// Anisotropy strength `q = (k_x − k_y)/4` of `q r² cos²φ`.
pub fn anisotropy_q<T: Real>(k_x: T, k_y: T) -> T {
    (k_x - k_y) / T::cst(4.0)
}

/// Bijection `(m, n) ↔ i`, `m` ascending in `[−m_max, m_max]`, then `n`
/// ascending in `[1, n_max]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisIndexMap {
    m_max: usize,
    n_max: usize,
    pairs: Vec<(i64, usize)>,
}

impl BasisIndexMap {
    pub fn new(m_max: usize, n_max: usize) -> Self {
        let pairs = (-(m_max as i64)..=m_max as i64)
            .flat_map(|m| (1..=n_max).map(move |n| (m, n)))
            .collect();
        Self { m_max, n_max, pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(i64, usize)] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> (i64, usize) {
        self.pairs[i]
    }

    pub fn index(&self, m: i64, n: usize) -> Option<usize> {
        if m.unsigned_abs() as usize > self.m_max || n == 0 || n > self.n_max {
            return None;
        }
        Some((m + self.m_max as i64) as usize * self.n_max + n - 1)
    }

    /// Indices whose `m` has the given parity, in map order.
    pub fn parity_indices(&self, parity: Parity) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| parity.contains(self.pairs[i].0))
            .collect()
    }
}

/// `∫ r² g_a g_b r dr` for two states on the same grid.
pub fn radial_moment_states<T: Real>(a: &RadialEigenstate<T>, b: &RadialEigenstate<T>) -> Result<T> {
    a.grid.ensure_same(&b.grid)?;
    let r = a.grid.r();
    let f: Vec<T> = (0..r.len()).map(|i| r[i] * r[i] * a.values[i] * b.values[i]).collect();
    Ok(a.grid.integrate(&f))
}

/// `∫ r² g_{m,n} g_{m',n'} r dr` from a basis table.
pub fn radial_moment<T: Real>(basis: &BasisTable<T>, m: i64, n: usize, mp: i64, np: usize) -> Result<T> {
    let a = basis
        .state(m, n)
        .ok_or_else(|| invalid(format!("state m={m} n={n} not in basis")))?;
    let b = basis
        .state(mp, np)
        .ok_or_else(|| invalid(format!("state m={mp} n={np} not in basis")))?;
    radial_moment_states(a, b)
}

/// Angular matrix element of `cos²φ`: `½ δ_{m,m'} + ¼ δ_{m,m'±2}`.
pub fn angular_factor<T: Real>(m: i64, mp: i64) -> T {
    match (m - mp).abs() {
        0 => T::cst(0.5),
        2 => T::cst(0.25),
        _ => T::zero(),
    }
}

/// `H_{ii'} = E_i δ_{ii'} + q c_{m,m'} ∫ r² g_i g_{i'} r dr`.
pub fn build_matrix<T: Real>(basis: &BasisTable<T>, map: &BasisIndexMap, q: T) -> Result<DMatrix<T>> {
    let size = map.len();
    for &(m, n) in map.pairs() {
        if basis.state(m, n).is_none() {
            return Err(invalid(format!("index map needs m={m} n={n}, absent from basis")));
        }
    }
    let rows: Vec<Vec<(usize, T)>> = (0..size)
        .into_par_iter()
        .map(|i| {
            let (m, n) = map.pair(i);
            let mut row = Vec::new();
            for j in i..size {
                let (mp, np) = map.pair(j);
                let c: T = angular_factor(m, mp);
                let mut v = if i == j { basis.energy(m, n).unwrap() } else { T::zero() };
                if c != T::zero() && q != T::zero() {
                    let moment = radial_moment(basis, m, n, mp, np).unwrap();
                    v += q * c * moment;
                }
                if v != T::zero() {
                    row.push((j, v));
                }
            }
            row
        })
        .collect();
    let mut h = DMatrix::zeros(size, size);
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row {
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// Eigenpairs of the anisotropic Hamiltonian, ascending in energy.
#[derive(Debug, Clone)]
pub struct AnisoSpectrum<T> {
    pub map: BasisIndexMap,
    pub eigenvalues: Vec<T>,
    /// Column `l` holds `a^l` over the full index map.
    pub vectors: DMatrix<T>,
    pub parity: Vec<Parity>,
}

impl<T: Real> AnisoSpectrum<T> {
    pub fn count(&self, parity: Parity) -> usize {
        self.parity.iter().filter(|p| **p == parity).count()
    }

    /// `max_l ‖H a^l − E_l a^l‖ / ‖H‖_F`.
    pub fn max_residual(&self, matrix: &DMatrix<T>) -> T {
        let scale = matrix.norm();
        (0..self.eigenvalues.len())
            .map(|l| {
                let v = self.vectors.column(l);
                (matrix * v - v * self.eigenvalues[l]).norm() / scale
            })
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Diagonalizes the even-m and odd-m blocks separately; every eigenvector
/// is supported on exactly one block.
pub fn diagonalize<T: Real>(matrix: &DMatrix<T>, map: &BasisIndexMap) -> Result<AnisoSpectrum<T>> {
    let size = map.len();
    if matrix.nrows() != size || matrix.ncols() != size {
        return Err(invalid(format!(
            "matrix is {}x{}, index map has {size} entries",
            matrix.nrows(),
            matrix.ncols()
        )));
    }
    let mut found: Vec<(T, Parity, Vec<T>)> = Vec::with_capacity(size);
    for parity in [Parity::Even, Parity::Odd] {
        let idx = map.parity_indices(parity);
        let block = DMatrix::from_fn(idx.len(), idx.len(), |a, b| matrix[(idx[a], idx[b])]);
        let (values, vectors) = symmetric_eigen(block);
        for (l, e) in values.into_iter().enumerate() {
            let mut full = vec![T::zero(); size];
            for (a, &i) in idx.iter().enumerate() {
                full[i] = vectors[(a, l)];
            }
            found.push((e, parity, full));
        }
    }
    found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = found.iter().map(|f| f.0).collect();
    let parity = found.iter().map(|f| f.1).collect();
    let vectors = DMatrix::from_fn(size, size, |i, l| found[l].2[i]);
    Ok(AnisoSpectrum {
        map: map.clone(),
        eigenvalues,
        vectors,
        parity,
    })
}

/// Largest `|H_{ij}|` with `m_i`, `m_j` of different parity.
pub fn cross_parity_max<T: Real>(matrix: &DMatrix<T>, map: &BasisIndexMap) -> T {
    let even = map.parity_indices(Parity::Even);
    let odd = map.parity_indices(Parity::Odd);
    let mut worst = T::zero();
    for &i in &even {
        for &j in &odd {
            worst = worst.max(matrix[(i, j)].abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::{tabulate_basis, tabulate_basis_with, Dimension, RadialGrid, ShootingConfig};

    fn small_basis() -> BasisTable<f64> {
        let grid = RadialGrid::new(0.01, 10.0, Dimension::Two).unwrap();
        tabulate_basis(4.0, 3, 5, &grid).unwrap()
    }

    #[test]
    fn index_map_is_bijective() {
        let map = BasisIndexMap::new(2, 3);
        assert_eq!(map.len(), 15);
        for i in 0..map.len() {
            let (m, n) = map.pair(i);
            assert_eq!(map.index(m, n), Some(i));
        }
        assert_eq!(map.pair(0), (-2, 1));
        assert_eq!(map.index(3, 1), None);
    }

    #[test]
    fn angular_factor_rules() {
        assert_eq!(angular_factor::<f64>(3, 3), 0.5);
        assert_eq!(angular_factor::<f64>(3, 5), 0.25);
        assert_eq!(angular_factor::<f64>(3, 1), 0.25);
        assert_eq!(angular_factor::<f64>(3, 6), 0.0);
        assert!((anisotropy_q(9.61f64, 4.0) - 1.4025).abs() < 1e-15);
    }

    #[test]
    fn ground_state_second_moment() {
        let grid = RadialGrid::new(0.01, 8.0, Dimension::Two).unwrap();
        let b = tabulate_basis_with(4.0, 0, 1, &grid, false, &ShootingConfig::default()).unwrap();
        // normalized sqrt(2) e^{-r^2/2}: ∫ r^2 2 e^{-r^2} r dr = 1
        let moment: f64 = radial_moment(&b, 0, 1, 0, 1).unwrap();
        assert!((moment - 1.0).abs() < 1e-8);
        let other = RadialGrid::new(0.02, 8.0, Dimension::Two).unwrap();
        let c = tabulate_basis_with(4.0, 0, 1, &other, false, &ShootingConfig::default()).unwrap();
        assert!(radial_moment_states(b.state(0, 1).unwrap(), c.state(0, 1).unwrap()).is_err());
    }

    #[test]
    fn zero_anisotropy_is_diagonal() {
        let b = small_basis();
        let map = BasisIndexMap::new(3, 5);
        let h = build_matrix(&b, &map, 0.0).unwrap();
        for i in 0..map.len() {
            for j in 0..map.len() {
                if i != j {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
        let s = diagonalize(&h, &map).unwrap();
        let mut iso: Vec<f64> = map.pairs().iter().map(|&(m, n)| b.energy(m, n).unwrap()).collect();
        iso.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, e) in s.eigenvalues.iter().zip(&iso) {
            assert!((a - e).abs() < 1e-10);
        }
    }

    #[test]
    fn block_structure_and_residuals() {
        let b = small_basis();
        let map = BasisIndexMap::new(3, 5);
        let h = build_matrix(&b, &map, 1.4025).unwrap();
        assert_eq!(cross_parity_max(&h, &map), 0.0);
        assert!((&h - h.transpose()).amax() < 1e-12);
        let s = diagonalize(&h, &map).unwrap();
        assert!(s.max_residual(&h) < 1e-8);
        assert_eq!(s.count(Parity::Even) + s.count(Parity::Odd), map.len());
        for l in 0..map.len() {
            for (i, &(m, _)) in map.pairs().iter().enumerate() {
                if !s.parity[l].contains(m) {
                    assert_eq!(s.vectors[(i, l)], 0.0);
                }
            }
        }
    }
}
