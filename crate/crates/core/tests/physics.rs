use nalgebra::DMatrix;

use hooke_peo::exchange::{
    antisymmetrizer, build_discrete_peo, heisenberg_term, lattice_hamiltonian, permutations, LocalSpace,
    ProductSpace,
};
use hooke_peo::kernel::slater_vanishing_check;
use hooke_peo::peo::{spectral_peo_sum, Parity, SpectralSource};
use hooke_peo::radial::{
    fd_energies_extrapolated, solve_state, tabulate_basis, Dimension, RadialGrid, RadialProblem,
};
use hooke_peo::specfun::{hermite_functions_at, hermite_table, uniform_grid};

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn shooting_agrees_with_finite_differences() {
    let grid = RadialGrid::<f64>::new(0.01, 9.0, Dimension::Two).unwrap();
    for m in 0..=3i64 {
        let problem = RadialProblem::new(Dimension::Two, 4.0, m, true).unwrap();
        let oracle = fd_energies_extrapolated(&problem, &grid, 4).unwrap();
        for n in 1..=4 {
            let e = solve_state(&problem, n, &grid).unwrap().energy;
            assert!((e - oracle[n - 1]).abs() < 1e-5, "m={m} n={n}: {e} vs {}", oracle[n - 1]);
        }
    }
}

#[test]
fn single_precision_oscillator() {
    let grid = RadialGrid::<f32>::new(0.01, 8.0, Dimension::Two).unwrap();
    for (m, n, exact) in [(0i64, 1usize, 2.0f32), (1, 1, 4.0), (0, 2, 6.0)] {
        let problem = RadialProblem::new(Dimension::Two, 4.0f32, m, false).unwrap();
        let e = solve_state(&problem, n, &grid).unwrap().energy;
        assert!((e - exact).abs() < 1e-3, "m={m} n={n}: {e}");
    }
    let a = hermite_functions_at::<f32>(20, 0.7).unwrap();
    let b = hermite_functions_at::<f64>(20, 0.7).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((*x as f64 - y).abs() < 1e-5);
    }
}

#[test]
fn hermite_quadrature_orthonormality() {
    let x: Vec<f64> = uniform_grid(-10.0, 10.0, 0.01).unwrap();
    let table = hermite_table(30, &x).unwrap();
    for a in 0..=30 {
        for b in a..=30 {
            let expect = if a == b { 1.0 } else { 0.0 };
            assert!((table.overlap(a, b) - expect).abs() < 1e-6, "{a} {b}");
        }
    }
    assert!(table.quad_safe_n(1e-6) >= 30);
}

#[test]
fn isotropic_sum_peaks_at_reference() {
    let grid = RadialGrid::<f64>::new(0.01, 6.0, Dimension::Two).unwrap();
    let basis = tabulate_basis(4.0, 4, 12, &grid).unwrap();
    let sums = spectral_peo_sum(SpectralSource::Isotropic(&basis), Parity::Even, 1.0, &[0.0]).unwrap();
    let s = &sums[0];
    assert!((s.abscissa[s.argmax()] - 1.0).abs() < 0.15, "{}", s.abscissa[s.argmax()]);
    assert!(s.imaginary.iter().all(|v| v.abs() < 1e-12));
}

#[test]
fn antisymmetrized_trials_see_no_exclusion() {
    let space = ProductSpace::new(2, LocalSpace { sites: 6, spin: false }).unwrap();
    let onsite: Vec<f64> = (0..6).map(|s| 0.2 * s as f64).collect();
    let h = lattice_hamiltonian(&space, 1.0, &onsite, 0.5).unwrap();
    let peo = build_discrete_peo(&h, space).unwrap();
    let perms = permutations(2);
    for idx in 0..space.dim() {
        let mut trial = vec![0.0; space.dim()];
        for (sigma, sign) in &perms {
            trial[space.permutation_map(sigma)[idx]] += *sign as f64;
        }
        if trial.iter().all(|v| *v == 0.0) {
            continue;
        }
        assert!(slater_vanishing_check(&peo, &trial).unwrap() < 1e-12, "ket {idx}");
    }
    // a symmetric trial is fully excluded: ⟨Φ|P|Φ⟩ = ⟨Φ|H|Φ⟩
    let sym: Vec<f64> = (0..space.dim()).map(|i| if i % 7 == 0 { 1.0 } else { 0.0 }).collect();
    let mut s = vec![0.0; space.dim()];
    for (sigma, _) in &perms {
        for (i, v) in sym.iter().enumerate() {
            s[space.permutation_map(sigma)[i]] += v;
        }
    }
    let v = nalgebra::DVector::from_vec(s.clone());
    let expect = (v.dot(&(&h * &v)) / v.dot(&v)).abs();
    assert!((slater_vanishing_check(&peo, &s).unwrap() - expect).abs() < 1e-10);
}

#[test]
fn three_particles_with_spin_count_matches_antisymmetrizer() {
    let sites = 4;
    let space = ProductSpace::new(3, LocalSpace { sites, spin: true }).unwrap();
    let onsite: Vec<f64> = (0..sites).map(|s| 0.3 * s as f64).collect();
    let h = lattice_hamiltonian(&space, 1.0, &onsite, 0.8).unwrap() + heisenberg_term(&space, 0.5).unwrap();
    let peo = build_discrete_peo(&h, space).unwrap();
    let a: DMatrix<f64> = antisymmetrizer(&space);
    assert_eq!(peo.antisymmetric_count(), binomial(2 * sites, 3));
    assert!((a.trace() - peo.antisymmetric_count() as f64).abs() < 1e-9);
    // antisymmetric eigenvectors are fixed by the antisymmetrizer
    for n in peo.antisymmetric_indices() {
        let v = nalgebra::DVector::from_vec(peo.state(n));
        assert!((&a * &v - &v).amax() < 1e-9);
    }
    assert!(peo.residuals.antisymmetric < 1e-9 && peo.residuals.excluded < 1e-9);
}
