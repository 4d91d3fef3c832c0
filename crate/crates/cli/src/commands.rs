//! One function per subcommand. Each writes its data files and a
//! manifest into the configured output directory.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use hooke_peo::aniso::{anisotropy_q, build_matrix, cross_parity_max, diagonalize, AnisoSpectrum, BasisIndexMap};
use hooke_peo::exchange::{
    build_discrete_peo, exchange_exact, heisenberg_term, lattice_hamiltonian, permutations, product_order_check,
    series_errors, spin_exchange, spin_exchange_operator, Axis, GridFunction, LocalSpace, ProductSpace,
    SeriesOrdering, SigmaConvention, SpinConfig,
};
use hooke_peo::kernel::{assemble_channel, slater_vanishing_check, KernelSpec};
use hooke_peo::peo::{fwhm, spectral_peo_sum, Parity, SpectralSource};
use hooke_peo::radial::{tabulate_basis_resuming, BasisTable, Dimension, RadialGrid, ShootingConfig};
use hooke_peo::specfun::{delta_sum_1d, hermite_table, integrate_against, uniform_grid, SpectralSum};

use crate::basis_io::{load_basis, read_state, state_csv, state_file_name, TableParams};
use crate::config::{Command, Figure, RunConfig};
use crate::error::CliError;
use crate::output::{num, Manifest, OutputDir};

pub fn run(config: &RunConfig) -> Result<Manifest, CliError> {
    config.validate()?;
    match config.command {
        Command::Tabulate => cmd_tabulate(config),
        Command::Figure => cmd_figure(config),
        Command::PeoSum => cmd_peo_sum(config),
        Command::Aniso => cmd_aniso(config),
        Command::KernelSolve => cmd_kernel(config),
        Command::ExchangeDemo => cmd_exchange(config),
    }
}

fn table_params(config: &RunConfig) -> TableParams {
    TableParams {
        k: config.k,
        h: config.h,
        r_max: config.r_max,
        interaction: config.interaction,
    }
}

fn basis_from_config(config: &RunConfig) -> Result<(BasisTable<f64>, String), CliError> {
    match &config.basis {
        Some(dir) => {
            let loaded = load_basis(dir)?;
            let prov = loaded.provenance();
            Ok((loaded.table, prov))
        }
        None => Err(CliError::Config(
            "basis: this command reads a basis table; run `hooke-peo tabulate --out DIR` and pass `--basis DIR`".into(),
        )),
    }
}

pub fn cmd_tabulate(config: &RunConfig) -> Result<Manifest, CliError> {
    let params = table_params(config);
    let grid = RadialGrid::new(config.h, config.r_max, Dimension::Two)?;
    let mut out = OutputDir::create(&config.out)?;
    let mut known = Vec::new();
    if config.resume {
        for m in 0..=config.m_max {
            for n in 1..=config.n_max {
                let path = out.path(&state_file_name(m, n));
                if path.exists() {
                    if let Some(state) = read_state(&path, &params, &grid)? {
                        if state.problem.nu() == m && state.n == n {
                            known.push(state);
                        }
                    }
                }
            }
        }
    }
    let reused: BTreeSet<(usize, usize)> = known.iter().map(|s| (s.problem.nu(), s.n)).collect();
    let (table, solved) = tabulate_basis_resuming(
        config.k,
        config.m_max,
        config.n_max,
        &grid,
        config.interaction,
        &ShootingConfig::default(),
        known,
    )?;
    eprintln!("tabulate: solved {} states, reused {}", solved.len(), reused.len());
    let mut states = Vec::with_capacity(table.len());
    for s in table.states() {
        let (m, n) = (s.problem.nu(), s.n);
        let name = state_file_name(m, n);
        if reused.contains(&(m, n)) {
            out.keep_existing(&name)?;
        } else {
            out.write(&name, &state_csv(s, &params))?;
        }
        states.push(json!({
            "m": m,
            "n": n,
            "energy": s.energy,
            "norm": s.norm(),
            "r0": s.r0,
            "file": name,
        }));
    }
    let results = json!({
        "k": config.k,
        "h": config.h,
        "r_max": config.r_max,
        "states": states,
        "max_orthogonality_residual": table.max_orthogonality_residual(),
    });
    out.finish(config, results)
}

fn mrad_tag(dphi: f64) -> String {
    format!("dphi{}mrad", (dphi * 1000.0).round() as i64)
}

fn unique_tags(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let tags: Vec<String> = config.delta_phis.iter().map(|d| mrad_tag(*d)).collect();
    let distinct: BTreeSet<&String> = tags.iter().collect();
    if distinct.len() != tags.len() {
        return Err(CliError::Config("delta_phi: two angles share a milliradian file name".into()));
    }
    Ok(tags)
}

fn parity_sums_csv(even: &SpectralSum<f64>, odd: &SpectralSum<f64>, header: &str) -> String {
    let mut s = format!("# {header}\nr,S_even,S_odd,S_total\n");
    for i in 0..even.abscissa.len() {
        let (e, o) = (even.values[i], odd.values[i]);
        s.push_str(&format!("{},{},{},{}\n", num(even.abscissa[i]), num(e), num(o), num(e + o)));
    }
    s
}

fn sums_summary(even: &SpectralSum<f64>, odd: &SpectralSum<f64>) -> Value {
    let total = even
        .values
        .iter()
        .zip(&odd.values)
        .fold(0.0f64, |a, (e, o)| a.max((e + o).abs()));
    let max_even = even.max_abs();
    let min_odd = odd.values.iter().cloned().fold(f64::INFINITY, f64::min);
    json!({
        "even_peak_r": even.abscissa[even.argmax()],
        "odd_peak_r": odd.abscissa[odd.argmax()],
        "max_abs_even": max_even,
        "max_abs_odd": odd.max_abs(),
        "min_odd": min_odd,
        "max_abs_total": total,
        "cancellation_ratio": total / max_even,
        "fwhm_even": fwhm(&even.abscissa, &even.values),
        "fwhm_odd": fwhm(&odd.abscissa, &odd.values),
        "max_imaginary": even.imaginary.iter().chain(&odd.imaginary).fold(0.0f64, |a, v| a.max(v.abs())),
    })
}

fn spectral_pair(
    source: SpectralSource<'_, f64>,
    r_ref: f64,
    dphis: &[f64],
) -> Result<(Vec<SpectralSum<f64>>, Vec<SpectralSum<f64>>), CliError> {
    let even = spectral_peo_sum(source, Parity::Even, r_ref, dphis)?;
    let odd = spectral_peo_sum(source, Parity::Odd, r_ref, dphis)?;
    Ok((even, odd))
}

fn anisotropic_spectrum(basis: &BasisTable<f64>, q: f64) -> Result<(AnisoSpectrum<f64>, f64, f64), CliError> {
    let map = BasisIndexMap::new(basis.m_max, basis.n_max);
    let matrix = build_matrix(basis, &map, q)?;
    let spectrum = diagonalize(&matrix, &map)?;
    let residual = spectrum.max_residual(&matrix);
    Ok((spectrum, residual, cross_parity_max(&matrix, &map)))
}

fn check_basis_k(basis: &BasisTable<f64>, config: &RunConfig) -> Result<(), CliError> {
    if (basis.k - config.ky).abs() > 1e-12 * config.ky {
        return Err(CliError::Config(format!(
            "ky: {} differs from the basis strength k={}; the anisotropy is measured from k_y",
            config.ky, basis.k
        )));
    }
    Ok(())
}

pub fn cmd_figure(config: &RunConfig) -> Result<Manifest, CliError> {
    match config.figure.expect("validated") {
        Figure::Fig1 => figure1(config),
        Figure::Fig2 => figure2(config),
        Figure::Fig3 => figure3(config),
    }
}

fn figure1(config: &RunConfig) -> Result<Manifest, CliError> {
    let (basis, provenance) = basis_from_config(config)?;
    check_basis_k(&basis, config)?;
    let tags = unique_tags(config)?;
    let q = anisotropy_q(config.kx, config.ky);
    let (spectrum, residual, cross) = anisotropic_spectrum(&basis, q)?;
    let (even, odd) = spectral_pair(SpectralSource::Anisotropic(&basis, &spectrum), config.r_ref, &config.delta_phis)?;
    let mut out = OutputDir::create(&config.out)?;
    out.provenance("basis", provenance);
    let mut panels = Vec::new();
    for (i, tag) in tags.iter().enumerate() {
        let header = format!(
            "r_ref={} delta_phi={} q={} m_max={} n_max={} r_max={}",
            config.r_ref,
            num(config.delta_phis[i]),
            q,
            basis.m_max,
            basis.n_max,
            basis.grid.r_max()
        );
        out.write(&format!("fig1_{tag}.csv"), &parity_sums_csv(&even[i], &odd[i], &header))?;
        let mut summary = sums_summary(&even[i], &odd[i]);
        summary["delta_phi"] = json!(config.delta_phis[i]);
        summary["cancels"] = json!(summary["cancellation_ratio"].as_f64().unwrap_or(f64::INFINITY) < config.threshold);
        panels.push(summary);
    }
    let g01 = basis.values(0, 1).expect("ground state present");
    let mut s = format!("# m=0 n=1 r_max={}\nr,g\n", basis.grid.r_max());
    for (r, g) in basis.grid.r().iter().zip(g01) {
        s.push_str(&format!("{},{}\n", num(*r), num(*g)));
    }
    out.write("fig1_g_m0_n1.csv", &s)?;
    let results = json!({
        "q": q,
        "eigenvalue_residual": residual,
        "cross_parity_max": cross,
        "even_states": spectrum.count(Parity::Even),
        "odd_states": spectrum.count(Parity::Odd),
        "fwhm_g01": fwhm(basis.grid.r(), g01),
        "threshold": config.threshold,
        "panels": panels,
    });
    out.finish(config, results)
}

fn figure2(config: &RunConfig) -> Result<Manifest, CliError> {
    let (basis, provenance) = basis_from_config(config)?;
    let mut out = OutputDir::create(&config.out)?;
    out.provenance("basis", provenance);
    let mm = basis.m_max;
    let picks = [(0usize, 1usize), (mm, 1), (mm, basis.n_max)];
    let mut profiles = Vec::new();
    for (m, n) in picks {
        let state = basis.state(m as i64, n).expect("state in table");
        let name = format!("fig2_g_m{m}_n{n}.csv");
        let mut s = format!("# m={m} n={n} energy={} r_max={}\nr,g\n", num(state.energy), basis.grid.r_max());
        for (r, g) in basis.grid.r().iter().zip(&state.values) {
            s.push_str(&format!("{},{}\n", num(*r), num(*g)));
        }
        out.write(&name, &s)?;
        let at_one = hooke_peo::linalg::interpolate_uniform(0.0, basis.grid.h(), &state.values, 1.0);
        profiles.push(json!({
            "m": m,
            "n": n,
            "energy": state.energy,
            "value_at_1_over_max": at_one.abs() / state.max_abs(),
        }));
    }
    out.finish(config, json!({ "profiles": profiles, "vanishing_threshold": 1e-3 }))
}

/// `exp(1 − 1/(1 − u²))` for `|u| < 1`, zero outside: smooth, compact.
pub fn bump(u: f64) -> f64 {
    if u.abs() < 1.0 {
        (1.0 - 1.0 / (1.0 - u * u)).exp()
    } else {
        0.0
    }
}

/// Smooth test functions supported in [−3, 3] for the completeness check
/// of the 1D sums.
pub const FIG3_TESTS: [(&str, fn(f64) -> f64); 3] = [
    ("bump(x/3)", |x| bump(x / 3.0)),
    ("cos(2x)bump(x/3)", |x| (2.0 * x).cos() * bump(x / 3.0)),
    ("bump(x-1.5)/(1+x^2)", |x| bump(x - 1.5) / (1.0 + x * x)),
];

fn figure3(config: &RunConfig) -> Result<Manifest, CliError> {
    let top = *config.fig3_orders.iter().max().expect("validated");
    let grid = uniform_grid(-5.0, 5.0, config.x_step)?;
    let table = hermite_table(top, &grid)?;
    let mut out = OutputDir::create(&config.out)?;
    let mut curves = Vec::new();
    let mut largest = None;
    for &n in &config.fig3_orders {
        let sum = delta_sum_1d(&table, n, config.x_ref)?;
        out.write(&format!("fig3_nmax{n}.csv"), &sum.to_csv(n))?;
        let errors: Vec<f64> = FIG3_TESTS
            .iter()
            .map(|(_, f)| (integrate_against(&sum, f) - f(config.x_ref)).abs())
            .collect();
        curves.push(json!({
            "n_max": n,
            "peak_x": sum.abscissa[sum.argmax()],
            "peak": sum.values[sum.argmax()],
            "integral_errors": errors,
        }));
        if n == top {
            largest = Some(sum);
        }
    }
    let sum = largest.expect("top order evaluated");
    let mut s = format!("# n_max={top} scale={}\nx,S,cS\n", config.scale);
    for (x, v) in sum.abscissa.iter().zip(&sum.values) {
        s.push_str(&format!("{},{},{}\n", num(*x), num(*v), num(config.scale * v)));
    }
    out.write("fig3_rescaled.csv", &s)?;
    let results = json!({
        "x_ref": config.x_ref,
        "test_functions": FIG3_TESTS.iter().map(|(n, _)| *n).collect::<Vec<_>>(),
        "quad_safe_n": table.quad_safe_n(1e-6),
        "curves": curves,
    });
    out.finish(config, results)
}

pub fn cmd_peo_sum(config: &RunConfig) -> Result<Manifest, CliError> {
    let (basis, provenance) = basis_from_config(config)?;
    let tags = unique_tags(config)?;
    let mut out = OutputDir::create(&config.out)?;
    out.provenance("basis", provenance);
    let spectrum;
    let (source, q) = if config.aniso {
        check_basis_k(&basis, config)?;
        let q = anisotropy_q(config.kx, config.ky);
        spectrum = anisotropic_spectrum(&basis, q)?.0;
        (SpectralSource::Anisotropic(&basis, &spectrum), q)
    } else {
        (SpectralSource::Isotropic(&basis), 0.0)
    };
    let (even, odd) = spectral_pair(source, config.r_ref, &config.delta_phis)?;
    let mut panels = Vec::new();
    for (i, tag) in tags.iter().enumerate() {
        let header = format!(
            "r_ref={} delta_phi={} q={} m_max={} n_max={} r_max={}",
            config.r_ref,
            num(config.delta_phis[i]),
            q,
            basis.m_max,
            basis.n_max,
            basis.grid.r_max()
        );
        out.write(&format!("peo_sum_{tag}.csv"), &parity_sums_csv(&even[i], &odd[i], &header))?;
        let mut summary = sums_summary(&even[i], &odd[i]);
        summary["delta_phi"] = json!(config.delta_phis[i]);
        panels.push(summary);
    }
    out.finish(config, json!({ "q": q, "panels": panels }))
}

pub fn cmd_aniso(config: &RunConfig) -> Result<Manifest, CliError> {
    let mut out = OutputDir::create(&config.out)?;
    let basis = match &config.basis {
        Some(_) => {
            let (b, prov) = basis_from_config(config)?;
            out.provenance("basis", prov);
            b
        }
        None => {
            let grid = RadialGrid::new(config.h, config.r_max, Dimension::Two)?;
            let (b, _) = tabulate_basis_resuming(
                config.ky,
                config.m_max,
                config.n_max,
                &grid,
                config.interaction,
                &ShootingConfig::default(),
                Vec::new(),
            )?;
            let mut basis_cfg = RunConfig::defaults(Command::Tabulate);
            basis_cfg.k = config.ky;
            basis_cfg.m_max = config.m_max;
            basis_cfg.n_max = config.n_max;
            basis_cfg.h = config.h;
            basis_cfg.r_max = config.r_max;
            basis_cfg.interaction = config.interaction;
            out.provenance("basis", crate::output::param_hash(&basis_cfg));
            b
        }
    };
    check_basis_k(&basis, config)?;
    let q = anisotropy_q(config.kx, config.ky);
    let (spectrum, residual, cross) = anisotropic_spectrum(&basis, q)?;
    let mut s = String::from("index,energy,parity\n");
    for (l, e) in spectrum.eigenvalues.iter().enumerate() {
        s.push_str(&format!("{l},{},{}\n", num(*e), spectrum.parity[l].label()));
    }
    out.write("aniso_eigenvalues.csv", &s)?;
    let size = spectrum.map.len();
    let mut v = String::from("# column l is eigenvector l; rows follow the (m,n) index map\nm,n");
    for l in 0..size {
        v.push_str(&format!(",a{l}"));
    }
    v.push('\n');
    for (i, &(m, n)) in spectrum.map.pairs().iter().enumerate() {
        v.push_str(&format!("{m},{n}"));
        for l in 0..size {
            v.push(',');
            v.push_str(&num(spectrum.vectors[(i, l)]));
        }
        v.push('\n');
    }
    out.write("aniso_eigenvectors.csv", &v)?;
    let results = json!({
        "q": q,
        "size": size,
        "even_states": spectrum.count(Parity::Even),
        "odd_states": spectrum.count(Parity::Odd),
        "eigenvalue_residual": residual,
        "cross_parity_max": cross,
        "ground_energy": spectrum.eigenvalues[0],
    });
    out.finish(config, results)
}

pub fn cmd_kernel(config: &RunConfig) -> Result<Manifest, CliError> {
    let grid = RadialGrid::new(config.h, config.r_max, Dimension::Two)?;
    let mut out = OutputDir::create(&config.out)?;
    let mut s = String::from("lambda,m,n,energy\n");
    let mut per_n: Vec<Vec<f64>> = vec![Vec::new(); config.channel_n];
    let mut rank = 0;
    for &lambda in &config.lambdas {
        let mut spec = KernelSpec::default_states(config.mode, config.k, lambda);
        spec.e_c = config.e_c;
        spec.interaction = config.interaction;
        let op = assemble_channel(&spec, config.channel_m, &grid)?;
        rank = op.rank();
        let spectrum = op.spectrum();
        if spectrum.len() < config.channel_n {
            return Err(CliError::Config(format!("n: channel has only {} states", spectrum.len())));
        }
        for n in 1..=config.channel_n {
            let e = spectrum[n - 1];
            per_n[n - 1].push(e);
            s.push_str(&format!("{},{},{n},{}\n", num(lambda), config.channel_m, num(e)));
        }
    }
    out.write("kernel_energies.csv", &s)?;
    let spread: Vec<f64> = per_n
        .iter()
        .map(|v| {
            let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            hi - lo
        })
        .collect();
    let results = json!({
        "m": config.channel_m,
        "correction_rank": rank,
        "lambda_spread_by_n": spread,
        "e_c": config.e_c.unwrap_or(config.k.sqrt()),
    });
    out.finish(config, results)
}

/// Trace of the brute-force antisymmetrizer: the number of fully
/// antisymmetric states, from fixed points of every permutation.
fn antisymmetric_dimension(space: &ProductSpace) -> f64 {
    let perms = permutations(space.k);
    let total: f64 = perms
        .iter()
        .map(|(sigma, sign)| {
            let fixed = space
                .permutation_map(sigma)
                .iter()
                .enumerate()
                .filter(|(a, b)| a == *b)
                .count();
            *sign as f64 * fixed as f64
        })
        .sum();
    total / perms.len() as f64
}

pub fn cmd_exchange(config: &RunConfig) -> Result<Manifest, CliError> {
    let mut out = OutputDir::create(&config.out)?;

    // series on separated 1D Gaussians
    let ax = [Axis::periodic(-4.0, 8.0, 64)];
    let gauss = |c: f64| move |x: &[f64]| (-(x[0] - c) * (x[0] - c) / 2.0).exp();
    let near = GridFunction::product(&ax, gauss(0.5), gauss(-0.5))?;
    let far = GridFunction::product(&ax, gauss(2.0), gauss(-2.0))?;
    let mut columns = Vec::new();
    for f in [&near, &far] {
        for ordering in [SeriesOrdering::AsWritten, SeriesOrdering::MomentumFirst] {
            columns.push(series_errors(f, config.order, ordering)?);
        }
    }
    let mut csv = String::from("order,as_written,momentum_first,as_written_wide,momentum_first_wide\n");
    for n in 0..=config.order {
        csv.push_str(&format!(
            "{n},{},{},{},{}\n",
            num(columns[0][n]),
            num(columns[1][n]),
            num(columns[2][n]),
            num(columns[3][n])
        ));
    }
    out.write("exchange_series.csv", &csv)?;
    let monotone = |e: &[f64]| (4..=config.order).step_by(2).all(|n| e[n] < e[n - 2]);
    let involution = {
        let twice = exchange_exact(&exchange_exact(&near)?)?;
        hooke_peo::exchange::relative_l2(&twice, &near)?
    };

    // spin relations
    let mut spin_residual = 0.0f64;
    for a in [true, false] {
        for b in [true, false] {
            let ket = SpinConfig::<f64>::basis(&[a, b])?;
            let expect = SpinConfig::basis(&[b, a])?;
            let swap = spin_exchange(&ket, 0, 1)?;
            let op = spin_exchange_operator(&ket, 0, 1, SigmaConvention::SpinHalf)?;
            spin_residual = spin_residual.max(swap.max_difference(&expect)).max(op.max_difference(&expect));
        }
    }

    // discrete exclusion operator
    let local = if config.particles == 2 {
        LocalSpace {
            sites: config.sites,
            spin: false,
        }
    } else {
        LocalSpace {
            sites: config.sites,
            spin: true,
        }
    };
    let space = ProductSpace::new(config.particles, local)?;
    let onsite: Vec<f64> = (0..config.sites)
        .map(|s| 0.1 * (s as f64 - (config.sites as f64 - 1.0) / 2.0).powi(2))
        .collect();
    let mut h = lattice_hamiltonian(&space, 1.0, &onsite, 0.7)?;
    if local.spin {
        h += heisenberg_term(&space, 0.5)?;
    }
    let peo = build_discrete_peo(&h, space)?;
    let expected_count = antisymmetric_dimension(&space);
    // trial states: antisymmetrized basis kets
    let perms = permutations(space.k);
    let mut slater = 0.0f64;
    for seed in [1usize, 7, 23, 42] {
        let idx = (seed * 2654435761) % space.dim();
        let mut trial = vec![0.0; space.dim()];
        for (sigma, sign) in &perms {
            trial[space.permutation_map(sigma)[idx]] += *sign as f64;
        }
        if trial.iter().any(|v| *v != 0.0) {
            slater = slater.max(slater_vanishing_check(&peo, &trial)?);
        }
    }
    let order_report = if space.k == 3 {
        let r = product_order_check(&peo)?;
        json!({
            "forward_on_antisymmetric": [r.forward_on_antisymmetric.0, r.forward_on_antisymmetric.1],
            "reverse_on_antisymmetric": [r.reverse_on_antisymmetric.0, r.reverse_on_antisymmetric.1],
            "discrepancy_elsewhere": r.discrepancy_elsewhere,
        })
    } else {
        Value::Null
    };
    let report = json!({
        "series": {
            "orders": config.order,
            "as_written": columns[0],
            "momentum_first": columns[1],
            "as_written_wide": columns[2],
            "momentum_first_wide": columns[3],
            "monotone_as_written": monotone(&columns[0]),
            "monotone_momentum_first": monotone(&columns[1]),
            "exact_swap_involution_error": involution,
        },
        "spin_relation_residual": spin_residual,
        "discrete_peo": {
            "particles": space.k,
            "sites": config.sites,
            "spin": local.spin,
            "dimension": space.dim(),
            "antisymmetric_states": peo.antisymmetric_count(),
            "antisymmetrizer_trace": expected_count,
            "branch_residual_antisymmetric": peo.residuals.antisymmetric,
            "branch_residual_excluded": peo.residuals.excluded,
            "annihilation_residual": peo.residuals.annihilation,
            "classification_error": peo.classification_error,
            "slater_trial_max": slater,
            "product_order": order_report,
        },
    });
    out.write("exchange_report.json", &(serde_json::to_string_pretty(&report).expect("report serializes") + "\n"))?;
    out.finish(config, report)
}

