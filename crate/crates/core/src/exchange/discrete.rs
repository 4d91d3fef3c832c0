use nalgebra::{DMatrix, DVector};

use crate::error::{invalid, Error, Result};
use crate::linalg::symmetric_eigen;
use crate::scalar::Real;

/// Largest particle count for the dense construction.
pub const MAX_PARTICLES: usize = 3;
/// Largest single-particle dimension (sites times spin states).
pub const MAX_LOCAL_DIM: usize = 16;

/// Single-particle space: `sites` lattice points, optionally times a
/// spin-½ factor. Local index is `site·2 + s` with spin, `site` without.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalSpace {
    pub sites: usize,
    pub spin: bool,
}

impl LocalSpace {
    pub fn dim(&self) -> usize {
        if self.spin {
            2 * self.sites
        } else {
            self.sites
        }
    }
}

/// `k`-fold tensor product of a [`LocalSpace`], particle 0 the most
/// significant digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProductSpace {
    pub k: usize,
    pub local: LocalSpace,
}

impl ProductSpace {
    pub fn new(k: usize, local: LocalSpace) -> Result<Self> {
        if !(2..=MAX_PARTICLES).contains(&k) {
            return Err(invalid(format!("particle count {k} outside [2, {MAX_PARTICLES}]")));
        }
        if local.dim() == 0 || local.dim() > MAX_LOCAL_DIM {
            return Err(invalid(format!(
                "single-particle dimension {} outside [1, {MAX_LOCAL_DIM}]",
                local.dim()
            )));
        }
        Ok(Self { k, local })
    }

    pub fn dim(&self) -> usize {
        self.local.dim().pow(self.k as u32)
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.k)
            .flat_map(|i| (i + 1..self.k).map(move |j| (i, j)))
            .collect()
    }

    fn digits(&self, mut idx: usize) -> Vec<usize> {
        let d = self.local.dim();
        let mut out = vec![0; self.k];
        for p in (0..self.k).rev() {
            out[p] = idx % d;
            idx /= d;
        }
        out
    }

    fn index(&self, digits: &[usize]) -> usize {
        let d = self.local.dim();
        digits.iter().fold(0, |acc, x| acc * d + x)
    }

    /// Image of every basis index under `|a₀ … a_{k−1}⟩ ↦ |a_{σ(0)} … a_{σ(k−1)}⟩`.
    pub fn permutation_map(&self, sigma: &[usize]) -> Vec<usize> {
        (0..self.dim())
            .map(|idx| {
                let d = self.digits(idx);
                let e: Vec<usize> = sigma.iter().map(|&s| d[s]).collect();
                self.index(&e)
            })
            .collect()
    }

    fn check_pair(&self, i: usize, j: usize) -> Result<()> {
        if i == j || i >= self.k || j >= self.k {
            return Err(invalid(format!("pair ({i}, {j}) invalid for {} particles", self.k)));
        }
        Ok(())
    }

    /// Index map of `χ_ij`: full swap of the two particle labels.
    pub fn exchange_map(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        self.check_pair(i, j)?;
        let mut sigma: Vec<usize> = (0..self.k).collect();
        sigma.swap(i, j);
        Ok(self.permutation_map(&sigma))
    }

    /// Index map swapping only the site (`position = true`) or only the
    /// spin part of particles `i` and `j`.
    fn partial_exchange_map(&self, i: usize, j: usize, position: bool) -> Result<Vec<usize>> {
        self.check_pair(i, j)?;
        if !self.local.spin {
            return Err(invalid("position and spin exchange need a spinful local space"));
        }
        Ok((0..self.dim())
            .map(|idx| {
                let mut d = self.digits(idx);
                let (si, ti) = (d[i] / 2, d[i] % 2);
                let (sj, tj) = (d[j] / 2, d[j] % 2);
                if position {
                    d[i] = sj * 2 + ti;
                    d[j] = si * 2 + tj;
                } else {
                    d[i] = si * 2 + tj;
                    d[j] = sj * 2 + ti;
                }
                self.index(&d)
            })
            .collect())
    }

    pub fn position_exchange_map(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        self.partial_exchange_map(i, j, true)
    }

    pub fn spin_exchange_map(&self, i: usize, j: usize) -> Result<Vec<usize>> {
        self.partial_exchange_map(i, j, false)
    }
}

/// Dense matrix of a basis permutation: `P e_a = e_{map[a]}`.
pub fn permutation_matrix<T: Real>(map: &[usize]) -> DMatrix<T> {
    let n = map.len();
    let mut m = DMatrix::zeros(n, n);
    for (a, &b) in map.iter().enumerate() {
        m[(b, a)] = T::one();
    }
    m
}

fn apply_map<T: Real>(map: &[usize], v: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); v.len()];
    for (a, &b) in map.iter().enumerate() {
        out[b] = v[a];
    }
    out
}

/// Every permutation of `0..k` with its sign, by Heap's algorithm.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i32)> {
    fn heap(n: usize, a: &mut Vec<usize>, sign: &mut i32, out: &mut Vec<(Vec<usize>, i32)>) {
        if n <= 1 {
            out.push((a.clone(), *sign));
            return;
        }
        for i in 0..n - 1 {
            heap(n - 1, a, sign, out);
            if n.is_multiple_of(2) {
                a.swap(i, n - 1);
            } else {
                a.swap(0, n - 1);
            }
            *sign = -*sign;
        }
        heap(n - 1, a, sign, out);
    }
    let mut a: Vec<usize> = (0..k).collect();
    let mut out = Vec::new();
    let mut sign = 1;
    heap(k, &mut a, &mut sign, &mut out);
    out
}

/// `A = (1/k!) Σ_σ sgn(σ) P_σ`, summed over all permutations.
pub fn antisymmetrizer<T: Real>(space: &ProductSpace) -> DMatrix<T> {
    let n = space.dim();
    let perms = permutations(space.k);
    let weight = T::one() / T::from_usize_lossy(perms.len());
    let mut a = DMatrix::zeros(n, n);
    for (sigma, sign) in &perms {
        let s = if *sign > 0 { weight } else { -weight };
        for (col, row) in space.permutation_map(sigma).into_iter().enumerate() {
            a[(row, col)] += s;
        }
    }
    a
}

/// Residuals of the two branches of `(Ĥ − P̂)|n⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchResiduals<T> {
    /// `max ‖(Ĥ − P̂)|nᵃ⟩ − E_n|nᵃ⟩‖` over antisymmetric states.
    pub antisymmetric: T,
    /// `max ‖(Ĥ − P̂)|n⟩‖` over all other states.
    pub excluded: T,
    /// `max ‖P̂|nᵃ⟩‖` over antisymmetric states.
    pub annihilation: T,
}

/// Spectral exclusion operator `P̂ = Σ_{n ∉ {nᵃ}} E_n |n⟩⟨n|` on a small
/// multi-particle space.
#[derive(Debug, Clone)]
pub struct DiscretePEO<T> {
    pub space: ProductSpace,
    pub hamiltonian: DMatrix<T>,
    pub energies: Vec<T>,
    /// Symmetry-adapted eigenvectors, one per column.
    pub states: DMatrix<T>,
    pub antisymmetric: Vec<bool>,
    pub peo: DMatrix<T>,
    pub residuals: BranchResiduals<T>,
    /// Largest `|⟨χ_ij⟩ + 1|` over the states classified antisymmetric.
    pub classification_error: T,
}

impl<T: Real> DiscretePEO<T> {
    pub fn dimension(&self) -> usize {
        self.space.dim()
    }

    pub fn antisymmetric_count(&self) -> usize {
        self.antisymmetric.iter().filter(|a| **a).count()
    }

    pub fn antisymmetric_indices(&self) -> Vec<usize> {
        (0..self.energies.len()).filter(|&n| self.antisymmetric[n]).collect()
    }

    pub fn state(&self, n: usize) -> Vec<T> {
        self.states.column(n).iter().copied().collect()
    }
}

fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |a, v| a.max(v.abs()))
}

/// Largest `|H_{ab} − H_{χa,χb}|` for the exchange `χ_ij`.
pub fn exchange_asymmetry<T: Real>(h: &DMatrix<T>, space: &ProductSpace, i: usize, j: usize) -> Result<T> {
    let map = space.exchange_map(i, j)?;
    let n = space.dim();
    let mut worst = T::zero();
    for a in 0..n {
        for b in 0..n {
            worst = worst.max((h[(a, b)] - h[(map[a], map[b])]).abs());
        }
    }
    Ok(worst)
}

/// Diagonalizes `H`, adapts degenerate eigenvectors to the exchange
/// symmetry and assembles the exclusion operator.
///
/// Inside each degenerate block `Σ_{i<j} χ_ij` is diagonalized; a state
/// is antisymmetric when that sum equals `−(number of pairs)`, which
/// forces `χ_ij = −1` for every pair.
pub fn build_discrete_peo<T: Real>(h: &DMatrix<T>, space: ProductSpace) -> Result<DiscretePEO<T>> {
    let n = space.dim();
    if h.nrows() != n || h.ncols() != n {
        return Err(invalid(format!(
            "hamiltonian is {}x{}, space has dimension {n}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = max_abs(h).max(T::one());
    let tol = T::cst(1e-10) * scale;
    let asym = max_abs(&(h - h.transpose()));
    if asym > tol {
        return Err(invalid(format!("hamiltonian is not symmetric (deviation {asym:e})")));
    }
    let pairs = space.pairs();
    let maps: Vec<Vec<usize>> = pairs
        .iter()
        .map(|&(i, j)| space.exchange_map(i, j))
        .collect::<Result<_>>()?;
    for &(i, j) in &pairs {
        let dev = exchange_asymmetry(h, &space, i, j)?;
        if dev > tol {
            return Err(Error::NotExchangeSymmetric {
                i,
                j,
                deviation: dev.as_f64(),
            });
        }
    }

    let (energies, vectors) = symmetric_eigen(h.clone());
    let degenerate = T::cst(1e-8) * scale;
    let n_pairs = T::from_usize_lossy(pairs.len());
    let mut states = DMatrix::zeros(n, n);
    let mut antisymmetric = vec![false; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && energies[end] - energies[end - 1] < degenerate {
            end += 1;
        }
        let block = vectors.columns(start, end - start).into_owned();
        // Σ χ_ij projected on the block
        let mut c_block = block.clone() * T::zero();
        for map in &maps {
            for col in 0..block.ncols() {
                let v: Vec<T> = block.column(col).iter().copied().collect();
                let w = apply_map(map, &v);
                for (r, x) in w.into_iter().enumerate() {
                    c_block[(r, col)] += x;
                }
            }
        }
        let projected = block.transpose() * c_block;
        let sym = (&projected + projected.transpose()) * T::cst(0.5);
        let (labels, rot) = symmetric_eigen(sym);
        let adapted = &block * rot;
        for (b, label) in labels.iter().enumerate() {
            states.set_column(start + b, &adapted.column(b));
            antisymmetric[start + b] = (*label + n_pairs).abs() < T::cst(0.5);
        }
        start = end;
    }

    let mut classification_error = T::zero();
    for s in 0..n {
        if !antisymmetric[s] {
            continue;
        }
        let v: Vec<T> = states.column(s).iter().copied().collect();
        for map in &maps {
            let w = apply_map(map, &v);
            let expect = v.iter().zip(&w).fold(T::zero(), |a, (x, y)| a + *x * *y);
            classification_error = classification_error.max((expect + T::one()).abs());
        }
    }

    let mut peo = DMatrix::zeros(n, n);
    for s in 0..n {
        if antisymmetric[s] {
            continue;
        }
        let v = states.column(s);
        peo += v * v.transpose() * energies[s];
    }
    peo = (&peo + peo.transpose()) * T::cst(0.5);

    let reduced = h - &peo;
    let mut residuals = BranchResiduals {
        antisymmetric: T::zero(),
        excluded: T::zero(),
        annihilation: T::zero(),
    };
    for s in 0..n {
        let v: DVector<T> = states.column(s).into_owned();
        let out = &reduced * &v;
        if antisymmetric[s] {
            residuals.antisymmetric = residuals.antisymmetric.max((out - &v * energies[s]).norm());
            residuals.annihilation = residuals.annihilation.max((&peo * &v).norm());
        } else {
            residuals.excluded = residuals.excluded.max(out.norm());
        }
    }

    Ok(DiscretePEO {
        space,
        hamiltonian: h.clone(),
        energies,
        states,
        antisymmetric,
        peo,
        residuals,
        classification_error,
    })
}

/// Action of `Π_{pairs} χ_ij` in two orderings.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductOrderReport<T> {
    /// `⟨nᵃ|χ₁₂χ₁₃χ₂₃|nᵃ⟩` range over antisymmetric states (min, max).
    pub forward_on_antisymmetric: (T, T),
    /// `⟨nᵃ|χ₂₃χ₁₃χ₁₂|nᵃ⟩` range over antisymmetric states.
    pub reverse_on_antisymmetric: (T, T),
    /// `max ‖(forward − reverse)|n⟩‖` over all other eigenstates.
    pub discrepancy_elsewhere: T,
}

/// Compares the pair-exchange product taken in lexicographic pair order
/// with the reversed order. Needs three particles.
pub fn product_order_check<T: Real>(peo: &DiscretePEO<T>) -> Result<ProductOrderReport<T>> {
    let space = peo.space;
    if space.k != 3 {
        return Err(invalid("product-order check is defined for three particles"));
    }
    let maps: Vec<Vec<usize>> = space
        .pairs()
        .iter()
        .map(|&(i, j)| space.exchange_map(i, j))
        .collect::<Result<_>>()?;
    // operator product A B C acts as A(B(C v))
    let forward = |v: &[T]| apply_map(&maps[0], &apply_map(&maps[1], &apply_map(&maps[2], v)));
    let reverse = |v: &[T]| apply_map(&maps[2], &apply_map(&maps[1], &apply_map(&maps[0], v)));
    let big = T::overflow_guard();
    let mut fwd = (big, -big);
    let mut rev = (big, -big);
    let mut discrepancy = T::zero();
    for s in 0..peo.dimension() {
        let v = peo.state(s);
        let (a, b) = (forward(&v), reverse(&v));
        if peo.antisymmetric[s] {
            let ea = v.iter().zip(&a).fold(T::zero(), |acc, (x, y)| acc + *x * *y);
            let eb = v.iter().zip(&b).fold(T::zero(), |acc, (x, y)| acc + *x * *y);
            fwd = (fwd.0.min(ea), fwd.1.max(ea));
            rev = (rev.0.min(eb), rev.1.max(eb));
        } else {
            let d = a.iter().zip(&b).fold(T::zero(), |acc, (x, y)| acc + (*x - *y) * (*x - *y));
            discrepancy = discrepancy.max(d.sqrt());
        }
    }
    Ok(ProductOrderReport {
        forward_on_antisymmetric: fwd,
        reverse_on_antisymmetric: rev,
        discrepancy_elsewhere: discrepancy,
    })
}

/// Spinless hopping chain with on-site energies, summed over particles,
/// plus a contact interaction `u` between every pair on the same site.
pub fn lattice_hamiltonian<T: Real>(space: &ProductSpace, hopping: T, onsite: &[T], contact: T) -> Result<DMatrix<T>> {
    let sites = space.local.sites;
    if onsite.len() != sites {
        return Err(invalid(format!("{} on-site energies for {sites} sites", onsite.len())));
    }
    let ld = space.local.dim();
    let per_site = if space.local.spin { 2 } else { 1 };
    let mut one = DMatrix::<T>::zeros(ld, ld);
    for s in 0..sites {
        for t in 0..per_site {
            let a = s * per_site + t;
            one[(a, a)] = onsite[s];
            if s + 1 < sites {
                let b = (s + 1) * per_site + t;
                one[(a, b)] = -hopping;
                one[(b, a)] = -hopping;
            }
        }
    }
    let n = space.dim();
    let mut h = DMatrix::zeros(n, n);
    for idx in 0..n {
        let d = space.digits(idx);
        for p in 0..space.k {
            for b in 0..ld {
                let v = one[(d[p], b)];
                if v != T::zero() {
                    let mut e = d.clone();
                    e[p] = b;
                    h[(space.index(&e), idx)] += v;
                }
            }
        }
        for (i, j) in space.pairs() {
            if d[i] / per_site == d[j] / per_site {
                h[(idx, idx)] += contact;
            }
        }
    }
    Ok(h)
}

/// Heisenberg coupling `J Σ_{i<j} s_i·s_j` on a spinful space, acting on
/// the spin parts only.
pub fn heisenberg_term<T: Real>(space: &ProductSpace, coupling: T) -> Result<DMatrix<T>> {
    if !space.local.spin {
        return Err(invalid("Heisenberg term needs a spinful local space"));
    }
    // s_i·s_j = (Σ_ij − ½)/2 with Σ_ij the spin swap
    let n = space.dim();
    let mut h = DMatrix::zeros(n, n);
    let half = T::cst(0.5);
    for (i, j) in space.pairs() {
        let swap = permutation_matrix::<T>(&space.spin_exchange_map(i, j)?);
        h += (swap - DMatrix::identity(n, n) * half) * (half * coupling);
    }
    Ok(h)
}
