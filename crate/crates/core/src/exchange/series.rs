use num_complex::Complex;
use rustfft::{FftNum, FftPlanner};

use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Largest per-axis grid in one dimension.
pub const MAX_POINTS_1D: usize = 128;
/// Largest per-axis grid in two and three dimensions.
pub const MAX_POINTS_ND: usize = 16;

/// Uniform coordinate axis `x_i = start + i·length/points`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis<T> {
    pub start: T,
    pub length: T,
    pub points: usize,
    /// Spectral derivatives are only defined on periodic axes.
    pub periodic: bool,
}

impl<T: Real> Axis<T> {
    pub fn periodic(start: T, length: T, points: usize) -> Self {
        Self {
            start,
            length,
            points,
            periodic: true,
        }
    }

    pub fn open(start: T, length: T, points: usize) -> Self {
        Self {
            periodic: false,
            ..Self::periodic(start, length, points)
        }
    }

    pub fn step(&self) -> T {
        self.length / T::from_usize_lossy(self.points)
    }

    pub fn coord(&self, i: usize) -> T {
        self.start + self.step() * T::from_usize_lossy(i)
    }

    /// Angular wavenumbers in FFT order; the Nyquist entry is set to zero.
    pub fn wavenumbers(&self) -> Vec<T> {
        let n = self.points;
        let base = T::two_pi() / self.length;
        (0..n)
            .map(|i| {
                if n.is_multiple_of(2) && i == n / 2 {
                    T::zero()
                } else if i <= n / 2 {
                    base * T::from_usize_lossy(i)
                } else {
                    -base * T::from_usize_lossy(n - i)
                }
            })
            .collect()
    }
}

/// Two-particle amplitude `f(r₁, r₂)` sampled on a tensor grid.
///
/// Layout is row-major over `[x₁, y₁, z₁, x₂, y₂, z₂]` (truncated to the
/// dimension), particle 1 outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    first: Vec<Axis<T>>,
    second: Vec<Axis<T>>,
    values: Vec<Complex<T>>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(first: Vec<Axis<T>>, second: Vec<Axis<T>>, values: Vec<Complex<T>>) -> Result<Self> {
        let dim = first.len();
        if !(1..=3).contains(&dim) || second.len() != dim {
            return Err(invalid(format!(
                "particle grids need 1 to 3 axes each, got {} and {}",
                first.len(),
                second.len()
            )));
        }
        let cap = if dim == 1 { MAX_POINTS_1D } else { MAX_POINTS_ND };
        for ax in first.iter().chain(&second) {
            if ax.points < 2 || ax.points > cap {
                return Err(invalid(format!(
                    "{} points per axis outside [2, {cap}] for dimension {dim}",
                    ax.points
                )));
            }
            if !(ax.length > T::zero()) {
                return Err(invalid("axis length must be positive"));
            }
        }
        let total: usize = first.iter().chain(&second).map(|a| a.points).product();
        if values.len() != total {
            return Err(invalid(format!("{} samples for a grid of {total}", values.len())));
        }
        Ok(Self { first, second, values })
    }

    /// Samples `f(r₁, r₂)` with both particles on the same axes.
    pub fn from_fn(axes: &[Axis<T>], f: impl Fn(&[T], &[T]) -> Complex<T>) -> Result<Self> {
        let dim = axes.len();
        let shape: Vec<usize> = axes.iter().chain(axes).map(|a| a.points).collect();
        let total: usize = shape.iter().product();
        let mut values = Vec::with_capacity(total);
        let mut idx = vec![0usize; 2 * dim];
        let mut r1 = vec![T::zero(); dim];
        let mut r2 = vec![T::zero(); dim];
        for flat in 0..total {
            unravel(flat, &shape, &mut idx);
            for a in 0..dim {
                r1[a] = axes[a].coord(idx[a]);
                r2[a] = axes[a].coord(idx[dim + a]);
            }
            values.push(f(&r1, &r2));
        }
        Self::new(axes.to_vec(), axes.to_vec(), values)
    }

    /// `u(r₁) v(r₂)`.
    pub fn product(axes: &[Axis<T>], u: impl Fn(&[T]) -> T, v: impl Fn(&[T]) -> T) -> Result<Self> {
        Self::from_fn(axes, |a, b| Complex::new(u(a) * v(b), T::zero()))
    }

    pub fn dimension(&self) -> usize {
        self.first.len()
    }

    pub fn first_axes(&self) -> &[Axis<T>] {
        &self.first
    }

    pub fn second_axes(&self) -> &[Axis<T>] {
        &self.second
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn shape(&self) -> Vec<usize> {
        self.first.iter().chain(&self.second).map(|a| a.points).collect()
    }

    pub fn norm(&self) -> T {
        self.values.iter().fold(T::zero(), |a, v| a + v.norm_sqr()).sqrt()
    }

    fn ensure_exchangeable(&self) -> Result<()> {
        if self.first != self.second {
            return Err(invalid("particle grids differ; exchange is not a grid symmetry"));
        }
        Ok(())
    }
}

fn unravel(mut flat: usize, shape: &[usize], idx: &mut [usize]) {
    for a in (0..shape.len()).rev() {
        idx[a] = flat % shape[a];
        flat /= shape[a];
    }
}

fn ravel(idx: &[usize], shape: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (i, n)| acc * n + i)
}

/// `Π₁₂ f (r₁, r₂) = f(r₂, r₁)` by index transposition.
pub fn exchange_exact<T: Real>(f: &GridFunction<T>) -> Result<GridFunction<T>> {
    f.ensure_exchangeable()?;
    let dim = f.dimension();
    let shape = f.shape();
    let mut idx = vec![0usize; 2 * dim];
    let mut swapped = vec![0usize; 2 * dim];
    let mut values = vec![Complex::new(T::zero(), T::zero()); f.values.len()];
    for (flat, out) in values.iter_mut().enumerate() {
        unravel(flat, &shape, &mut idx);
        swapped[..dim].copy_from_slice(&idx[dim..]);
        swapped[dim..].copy_from_slice(&idx[..dim]);
        *out = f.values[ravel(&swapped, &shape)];
    }
    Ok(GridFunction {
        first: f.first.clone(),
        second: f.second.clone(),
        values,
    })
}

/// Order of the two factors inside each term of the exchange series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SeriesOrdering {
    /// `(i)^n (Δp)^n (Δr)^n`: position factors act first.
    #[default]
    AsWritten,
    /// `(−i)^n (Δr)^n (Δp)^n`: derivatives act first. This is the Taylor
    /// expansion of `f(r₁ + Δr, r₂ − Δr)`.
    MomentumFirst,
}

/// Relative L² distance `‖a − b‖ / ‖b‖`.
pub fn relative_l2<T: Real>(a: &GridFunction<T>, b: &GridFunction<T>) -> Result<T> {
    if a.shape() != b.shape() {
        return Err(Error::GridMismatch("grid functions have different shapes".into()));
    }
    let diff = a
        .values
        .iter()
        .zip(&b.values)
        .fold(T::zero(), |acc, (x, y)| acc + (*x - *y).norm_sqr());
    Ok(diff.sqrt() / b.norm())
}

struct SeriesEngine<T: Real + FftNum> {
    shape: Vec<usize>,
    dim: usize,
    coords: Vec<Vec<T>>,
    waves: Vec<Vec<T>>,
    planner: FftPlanner<T>,
}

impl<T: Real + FftNum> SeriesEngine<T> {
    fn new(f: &GridFunction<T>) -> Result<Self> {
        f.ensure_exchangeable()?;
        if f.first.iter().any(|a| !a.periodic) {
            return Err(invalid("spectral derivatives need periodic axes"));
        }
        Ok(Self {
            shape: f.shape(),
            dim: f.dimension(),
            coords: f
                .first
                .iter()
                .map(|a| (0..a.points).map(|i| a.coord(i)).collect())
                .collect(),
            waves: f.first.iter().map(|a| a.wavenumbers()).collect(),
            planner: FftPlanner::new(),
        })
    }

    fn fft(&mut self, data: &mut [Complex<T>], inverse: bool) {
        let total = data.len();
        let mut stride = total;
        for &len in &self.shape {
            stride /= len;
            let plan = if inverse {
                self.planner.plan_fft_inverse(len)
            } else {
                self.planner.plan_fft_forward(len)
            };
            let mut line = vec![Complex::new(T::zero(), T::zero()); len];
            for outer in 0..total / (len * stride) {
                for inner in 0..stride {
                    let base = outer * len * stride + inner;
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = data[base + i * stride];
                    }
                    plan.process(&mut line);
                    for (i, v) in line.iter().enumerate() {
                        data[base + i * stride] = *v;
                    }
                }
            }
        }
        if inverse {
            let scale = T::one() / T::from_usize_lossy(total);
            for v in data.iter_mut() {
                *v *= scale;
            }
        }
    }

    /// `Π_a (x₂ − x₁)_a^{α_a}` or `Π_a (k₂ − k₁)_a^{α_a}` at every sample.
    fn scale_by(&self, data: &mut [Complex<T>], alpha: &[usize], momentum: bool) {
        let table = if momentum { &self.waves } else { &self.coords };
        let mut idx = vec![0usize; 2 * self.dim];
        for (flat, v) in data.iter_mut().enumerate() {
            unravel(flat, &self.shape, &mut idx);
            let mut factor = T::one();
            for a in 0..self.dim {
                if alpha[a] > 0 {
                    let d = table[a][idx[self.dim + a]] - table[a][idx[a]];
                    factor *= d.powi(alpha[a] as i32);
                }
            }
            *v *= factor;
        }
    }

    /// Sum over `|α| = n` of `Π_a T_a^{α_a}/α_a!` applied to `f`.
    fn term(&mut self, f: &GridFunction<T>, spectrum: &[Complex<T>], n: usize, ordering: SeriesOrdering) -> Vec<Complex<T>> {
        let mut acc = vec![Complex::new(T::zero(), T::zero()); f.values.len()];
        // i^n or (−i)^n
        let phase = match (n % 4, ordering) {
            (0, _) => Complex::new(T::one(), T::zero()),
            (2, _) => Complex::new(-T::one(), T::zero()),
            (1, SeriesOrdering::AsWritten) | (3, SeriesOrdering::MomentumFirst) => Complex::new(T::zero(), T::one()),
            _ => Complex::new(T::zero(), -T::one()),
        };
        for alpha in multi_indices(self.dim, n) {
            let denom = alpha
                .iter()
                .fold(T::one(), |a, &k| a * (1..=k).fold(T::one(), |b, j| b * T::from_usize_lossy(j)));
            let work = match ordering {
                SeriesOrdering::AsWritten => {
                    let mut w = f.values.clone();
                    self.scale_by(&mut w, &alpha, false);
                    self.fft(&mut w, false);
                    self.scale_by(&mut w, &alpha, true);
                    self.fft(&mut w, true);
                    w
                }
                SeriesOrdering::MomentumFirst => {
                    let mut w = spectrum.to_vec();
                    self.scale_by(&mut w, &alpha, true);
                    self.fft(&mut w, true);
                    self.scale_by(&mut w, &alpha, false);
                    w
                }
            };
            let c = phase * (T::one() / denom);
            for (a, w) in acc.iter_mut().zip(&work) {
                *a += *w * c;
            }
        }
        acc
    }
}

/// All `α ∈ ℕ^dim` with `|α| = n`, lexicographic.
fn multi_indices(dim: usize, n: usize) -> Vec<Vec<usize>> {
    if dim == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in (0..=n).rev() {
        for mut rest in multi_indices(dim - 1, n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn partial_sums<T: Real + FftNum>(
    f: &GridFunction<T>,
    order: usize,
    ordering: SeriesOrdering,
    mut visit: impl FnMut(usize, &[Complex<T>]),
) -> Result<()> {
    let mut engine = SeriesEngine::new(f)?;
    let mut spectrum = f.values.clone();
    if ordering == SeriesOrdering::MomentumFirst {
        engine.fft(&mut spectrum, false);
    }
    let mut acc = f.values.clone();
    visit(0, &acc);
    for n in 1..=order {
        let t = engine.term(f, &spectrum, n, ordering);
        for (a, v) in acc.iter_mut().zip(&t) {
            *a += *v;
        }
        visit(n, &acc);
    }
    Ok(())
}

/// Partial sum through order `N` of
/// `Π₁₂ = Σ_n (1/n!) i^n Σ_{|α|=n} (n!/α!) Π_a (Δp_a)^{α_a} (Δr_a)^{α_a}`
/// with `Δr = r₂ − r₁`, `Δp = p₂ − p₁`, `ħ = 1`, and spectral derivatives.
pub fn exchange_series<T: Real + FftNum>(
    f: &GridFunction<T>,
    order: usize,
    ordering: SeriesOrdering,
) -> Result<GridFunction<T>> {
    let mut out = Vec::new();
    partial_sums(f, order, ordering, |n, acc| {
        if n == order {
            out = acc.to_vec();
        }
    })?;
    Ok(GridFunction {
        first: f.first.clone(),
        second: f.second.clone(),
        values: out,
    })
}

/// Relative L² error of every partial sum `N = 0..=max_order` against
/// [`exchange_exact`].
pub fn series_errors<T: Real + FftNum>(
    f: &GridFunction<T>,
    max_order: usize,
    ordering: SeriesOrdering,
) -> Result<Vec<T>> {
    let exact = exchange_exact(f)?;
    let scale = exact.norm();
    let mut errors = Vec::with_capacity(max_order + 1);
    partial_sums(f, max_order, ordering, |_, acc| {
        let d = acc
            .iter()
            .zip(&exact.values)
            .fold(T::zero(), |s, (a, b)| s + (*a - *b).norm_sqr());
        errors.push(d.sqrt() / scale);
    })?;
    Ok(errors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(c: f64) -> impl Fn(&[f64]) -> f64 {
        move |x: &[f64]| x.iter().map(|v| (-(v - c) * (v - c) / 2.0).exp()).product()
    }

    fn axis(n: usize) -> Axis<f64> {
        Axis::periodic(-4.0, 8.0, n)
    }

    #[test]
    fn exact_swap_transposes() {
        let ax = [axis(16)];
        let f = GridFunction::product(&ax, gauss(0.5), gauss(-0.5)).unwrap();
        let g = exchange_exact(&f).unwrap();
        let n = 16;
        for i in 0..n {
            for j in 0..n {
                assert_eq!(g.values()[i * n + j], f.values()[j * n + i]);
            }
        }
        assert_eq!(exchange_exact(&g).unwrap(), f);
        let sym = GridFunction::product(&ax, gauss(0.3), gauss(0.3)).unwrap();
        assert_eq!(exchange_exact(&sym).unwrap(), sym);
    }

    #[test]
    fn mismatched_or_open_grids_rejected() {
        let a = vec![axis(8)];
        let b = vec![Axis::periodic(-4.0, 8.0, 10)];
        let f = GridFunction::new(a.clone(), b, vec![Complex::new(0.0, 0.0); 80]).unwrap();
        assert!(exchange_exact(&f).is_err());
        let open = [Axis::open(-4.0, 8.0, 8)];
        let g = GridFunction::product(&open, gauss(0.5), gauss(-0.5)).unwrap();
        assert!(exchange_exact(&g).is_ok());
        assert!(exchange_series(&g, 2, SeriesOrdering::AsWritten).is_err());
        assert!(GridFunction::product(&[axis(17), axis(17)], gauss(0.0), gauss(0.0)).is_err());
    }

    #[test]
    fn zeroth_order_is_identity() {
        let f = GridFunction::product(&[axis(32)], gauss(0.5), gauss(-0.5)).unwrap();
        for ordering in [SeriesOrdering::AsWritten, SeriesOrdering::MomentumFirst] {
            assert_eq!(exchange_series(&f, 0, ordering).unwrap(), f);
        }
    }

    #[test]
    fn multi_index_counts() {
        assert_eq!(multi_indices(1, 4), vec![vec![4]]);
        assert_eq!(multi_indices(2, 3).len(), 4);
        assert_eq!(multi_indices(3, 4).len(), 15);
        assert!(multi_indices(3, 4).iter().all(|a| a.iter().sum::<usize>() == 4));
    }

    /// The momentum-first series is the Taylor expansion of the swap, so
    /// it converges for band-limited functions. Round-off in every Fourier
    /// mode grows like `exp(|Δr|·|Δk|)`, so the grid is kept coarse.
    #[test]
    fn momentum_first_converges_on_trigonometric_product() {
        let ax = [Axis::periodic(0.0, std::f64::consts::TAU, 4)];
        let f = GridFunction::from_fn(&ax, |a, b| Complex::new(a[0].sin() + b[0].cos(), 0.0)).unwrap();
        let err = series_errors(&f, 50, SeriesOrdering::MomentumFirst).unwrap();
        assert!(err[50] < 1e-8, "{}", err[50]);
        assert!(err[50] < err[10]);
    }

    /// Independent oracle for the written ordering: terms one and two built
    /// from a dense trigonometric differentiation matrix instead of FFTs.
    #[test]
    fn low_order_terms_match_dense_derivative() {
        let n = 24;
        let ax = Axis::periodic(-4.0, 8.0, n);
        let f = GridFunction::product(&[ax], gauss(0.5), gauss(-0.5)).unwrap();
        let k = ax.wavenumbers();
        let x: Vec<f64> = (0..n).map(|i| ax.coord(i)).collect();
        // D[a][b] = (1/n) Σ_q i k_q e^{i k_q (x_a − x_b)}
        let d: Vec<Vec<Complex<f64>>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| {
                        k.iter()
                            .map(|&kq| Complex::new(0.0, kq) * Complex::from_polar(1.0, kq * (x[a] - x[b])))
                            .sum::<Complex<f64>>()
                            / n as f64
                    })
                    .collect()
            })
            .collect();
        // (∂₂ − ∂₁) g with g[i][j], particle 1 index i
        let delta = |g: &Vec<Complex<f64>>| -> Vec<Complex<f64>> {
            let mut out = vec![Complex::new(0.0, 0.0); n * n];
            for i in 0..n {
                for j in 0..n {
                    let mut acc = Complex::new(0.0, 0.0);
                    for b in 0..n {
                        acc += d[j][b] * g[i * n + b] - d[i][b] * g[b * n + j];
                    }
                    out[i * n + j] = acc;
                }
            }
            out
        };
        let times_dr = |g: &Vec<Complex<f64>>, p: i32| -> Vec<Complex<f64>> {
            (0..n * n).map(|q| g[q] * (x[q % n] - x[q / n]).powi(p)).collect()
        };
        let f0 = f.values().to_vec();
        // i^n (Δp)^n = (∂₂ − ∂₁)^n for Δp = −i(∂₂ − ∂₁)
        let t1 = delta(&times_dr(&f0, 1));
        let t2: Vec<Complex<f64>> = delta(&delta(&times_dr(&f0, 2))).iter().map(|v| v * 0.5).collect();
        let s1 = exchange_series(&f, 1, SeriesOrdering::AsWritten).unwrap();
        let s2 = exchange_series(&f, 2, SeriesOrdering::AsWritten).unwrap();
        for q in 0..n * n {
            assert!((s1.values()[q] - f0[q] - t1[q]).norm() < 1e-9);
            assert!((s2.values()[q] - f0[q] - t1[q] - t2[q]).norm() < 1e-8);
        }
    }

    #[test]
    fn wider_separation_converges_worse() {
        let ax = [axis(64)];
        for ordering in [SeriesOrdering::AsWritten, SeriesOrdering::MomentumFirst] {
            let near = GridFunction::product(&ax, gauss(0.5), gauss(-0.5)).unwrap();
            let far = GridFunction::product(&ax, gauss(2.0), gauss(-2.0)).unwrap();
            let en = series_errors(&near, 12, ordering).unwrap();
            let ef = series_errors(&far, 12, ordering).unwrap();
            assert!(ef[12] > en[12]);
        }
    }

    #[test]
    fn three_dimensional_grid_runs() {
        let ax = [axis(6), axis(6), axis(6)];
        let f = GridFunction::product(&ax, gauss(0.5), gauss(-0.5)).unwrap();
        let g = exchange_exact(&f).unwrap();
        assert_eq!(exchange_exact(&g).unwrap(), f);
        let err = series_errors(&f, 2, SeriesOrdering::MomentumFirst).unwrap();
        assert_eq!(err.len(), 3);
        assert!(err.iter().all(|e| e.is_finite()));
    }
}
