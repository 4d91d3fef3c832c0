//! Small dense and tridiagonal linear-algebra helpers.

use nalgebra::DMatrix;

use crate::scalar::Real;

/// Full eigendecomposition of a real symmetric matrix, eigenvalues ascending.
///
/// Columns of the returned matrix are the matching orthonormal eigenvectors.
pub fn symmetric_eigen<T: Real>(matrix: DMatrix<T>) -> (Vec<T>, DMatrix<T>) {
    let n = matrix.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let eig = nalgebra::SymmetricEigen::new(matrix);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[a]
            .partial_cmp(&eig.eigenvalues[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Symmetric tridiagonal matrix stored as diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: T) -> usize {
        let tiny = T::epsilon() * T::epsilon();
        let mut count = 0;
        let mut q = T::one();
        for i in 0..self.diag.len() {
            let coupling = if i == 0 {
                T::zero()
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            let mut denom = q;
            if denom.abs() < tiny {
                denom = tiny;
            }
            q = self.diag[i] - x - if i == 0 { T::zero() } else { coupling / denom };
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (T, T) {
        let n = self.diag.len();
        let mut lo = T::max_value().unwrap();
        let mut hi = T::min_value().unwrap();
        for i in 0..n {
            let mut radius = T::zero();
            if i > 0 {
                radius += self.off[i - 1].abs();
            }
            if i + 1 < n {
                radius += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - radius);
            hi = hi.max(self.diag[i] + radius);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based) by bisection on the
    /// Sturm count, to absolute tolerance `tol`.
    pub fn eigenvalue(&self, index: usize, tol: T) -> T {
        assert!(index < self.dim());
        let (mut lo, mut hi) = self.gershgorin();
        let two = T::cst(2.0);
        while hi - lo > tol {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        (lo + hi) / two
    }

    /// Eigenvector for an (accurate) eigenvalue by inverse iteration,
    /// normalized to unit Euclidean length with a positive first
    /// significant component.
    pub fn eigenvector(&self, lambda: T) -> Vec<T> {
        let n = self.dim();
        let scale = self
            .diag
            .iter()
            .chain(self.off.iter())
            .fold(T::one(), |acc, v| acc.max(v.abs()));
        let shift = lambda + scale * T::epsilon() * T::cst(4.0);
        let mut x = vec![T::one(); n];
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt();
            for v in x.iter_mut() {
                *v /= norm;
            }
        }
        let lead = x
            .iter()
            .copied()
            .find(|v| v.abs() > T::cst(1e-3) / T::from_usize_lossy(n).sqrt())
            .unwrap_or(T::one());
        if lead < T::zero() {
            for v in x.iter_mut() {
                *v = -*v;
            }
        }
        x
    }

    /// Solves `(A - shift I) x = b` by Gaussian elimination with partial
    /// pivoting on the banded system.
    fn solve_shifted(&self, shift: T, b: &[T]) -> Vec<T> {
        let n = self.dim();
        let tiny = T::epsilon() * T::epsilon();
        // Row i holds (sub, main, sup, sup2) entries of the band.
        let mut sub: Vec<T> = (0..n)
            .map(|i| if i == 0 { T::zero() } else { self.off[i - 1] })
            .collect();
        let mut main: Vec<T> = self.diag.iter().map(|&d| d - shift).collect();
        let mut sup: Vec<T> = (0..n)
            .map(|i| if i + 1 < n { self.off[i] } else { T::zero() })
            .collect();
        let mut sup2 = vec![T::zero(); n];
        let mut rhs = b.to_vec();
        for i in 0..n.saturating_sub(1) {
            let below = sub[i + 1];
            if below.abs() > main[i].abs() {
                // swap rows i and i+1
                let (m0, s0, t0, r0) = (main[i], sup[i], sup2[i], rhs[i]);
                main[i] = below;
                sup[i] = main[i + 1];
                sup2[i] = sup[i + 1];
                rhs[i] = rhs[i + 1];
                sub[i + 1] = m0;
                main[i + 1] = s0;
                sup[i + 1] = t0;
                rhs[i + 1] = r0;
            }
            let pivot = if main[i].abs() < tiny { tiny } else { main[i] };
            let factor = sub[i + 1] / pivot;
            main[i + 1] -= factor * sup[i];
            sup[i + 1] -= factor * sup2[i];
            let carried = rhs[i];
            rhs[i + 1] -= factor * carried;
            sub[i + 1] = T::zero();
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            if i + 1 < n {
                acc -= sup[i] * x[i + 1];
            }
            if i + 2 < n {
                acc -= sup2[i] * x[i + 2];
            }
            let pivot = if main[i].abs() < tiny { tiny } else { main[i] };
            x[i] = acc / pivot;
        }
        x
    }

    pub fn to_dense(&self) -> DMatrix<T> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i, i + 1)] = self.off[i];
                m[(i + 1, i)] = self.off[i];
            }
        }
        m
    }
}

/// Finite-difference weights at `z` for derivatives `0..=order` on the
/// nodes `x` (Fornberg's recursion). `weights[d][j]` multiplies `f(x[j])`.
pub fn fd_weights<T: Real>(z: T, x: &[T], order: usize) -> Vec<Vec<T>> {
    let n = x.len();
    let mut c = vec![vec![T::zero(); n]; order + 1];
    let mut c1 = T::one();
    let mut c4 = x[0] - z;
    c[0][0] = T::one();
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = T::one();
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    let kk = T::from_usize_lossy(k);
                    c[k][i] = c1 * (kk * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                let kk = T::from_usize_lossy(k);
                c[k][j] = (c4 * c[k][j] - kk * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Cubic Lagrange interpolation of samples on the uniform grid
/// `x_i = x0 + i * step`.
pub fn interpolate_uniform<T: Real>(x0: T, step: T, values: &[T], x: T) -> T {
    let n = values.len();
    if n == 0 {
        return T::zero();
    }
    if n < 4 {
        let i = ((x - x0) / step).round().as_f64().clamp(0.0, (n - 1) as f64) as usize;
        return values[i];
    }
    let t = (x - x0) / step;
    let base = t.floor().as_f64() as i64 - 1;
    let start = base.clamp(0, n as i64 - 4) as usize;
    let nodes: Vec<T> = (start..start + 4)
        .map(|i| x0 + T::from_usize_lossy(i) * step)
        .collect();
    let w = fd_weights(x, &nodes, 0);
    (0..4).fold(T::zero(), |acc, j| acc + w[0][j] * values[start + j])
}
