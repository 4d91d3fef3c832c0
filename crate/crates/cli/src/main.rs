use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hooke_peo_cli::{run, CliError, Command, RunConfig};

#[derive(Parser)]
#[command(name = "hooke-peo", version, about = "Hooke's-atom bound states and Pauli exclusion operators")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Common {
    /// `key = value` file applied before flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Run on a single thread.
    #[arg(long)]
    deterministic: bool,
    /// Extra `key=value` settings.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Args)]
struct Grid {
    #[arg(long)]
    mmax: Option<String>,
    #[arg(long)]
    nmax: Option<String>,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    rmax: Option<String>,
}

#[derive(Subcommand)]
enum Sub {
    /// Solve and store the radial basis g_{m,n}.
    #[command(allow_negative_numbers = true)]
    Tabulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        k: Option<String>,
        /// Drop the Coulomb term.
        #[arg(long)]
        no_interaction: bool,
        /// Reuse state files already in the output directory.
        #[arg(long)]
        resume: bool,
    },
    /// Figure datasets: fig1, fig2 (need --basis) or fig3.
    #[command(allow_negative_numbers = true)]
    Figure {
        which: String,
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        kx: Option<String>,
        #[arg(long)]
        ky: Option<String>,
        /// Comma-separated angles; `pi/3` style accepted.
        #[arg(long)]
        dphi: Option<String>,
        #[arg(long)]
        rref: Option<String>,
        #[arg(long)]
        orders: Option<String>,
        #[arg(long)]
        xstep: Option<String>,
        #[arg(long)]
        xref: Option<String>,
        #[arg(long)]
        scale: Option<String>,
    },
    /// Parity-resolved spectral sums, one CSV per angle.
    #[command(name = "peo-sum", allow_negative_numbers = true)]
    PeoSum {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        dphi: Option<String>,
        #[arg(long)]
        rref: Option<String>,
        /// Sum over the anisotropic eigenbasis.
        #[arg(long)]
        aniso: bool,
        #[arg(long)]
        kx: Option<String>,
        #[arg(long)]
        ky: Option<String>,
    },
    /// Diagonalize the anisotropic atom in the isotropic basis.
    #[command(allow_negative_numbers = true)]
    Aniso {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        grid: Grid,
        #[arg(long)]
        basis: Option<String>,
        #[arg(long)]
        kx: Option<String>,
        #[arg(long)]
        ky: Option<String>,
    },
    /// Channel energies with the kernel correction over a lambda sweep.
    #[command(name = "kernel-solve", allow_negative_numbers = true)]
    KernelSolve {
        #[command(flatten)]
        common: Common,
        /// energy, constant or exact.
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        m: Option<String>,
        /// Number of lowest states reported.
        #[arg(long)]
        n: Option<String>,
        #[arg(long = "Ec")]
        e_c: Option<String>,
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        h: Option<String>,
        #[arg(long)]
        rmax: Option<String>,
    },
    /// Exchange series, spin exchange and a discrete exclusion operator.
    #[command(name = "exchange-demo", allow_negative_numbers = true)]
    ExchangeDemo {
        #[command(flatten)]
        common: Common,
        /// Particle count (2 or 3).
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        sites: Option<String>,
        #[arg(long)]
        order: Option<String>,
    },
}

type Pairs = Vec<(&'static str, Option<String>)>;

fn grid_pairs(g: Grid) -> Pairs {
    vec![("m_max", g.mmax), ("n_max", g.nmax), ("h", g.h), ("r_max", g.rmax)]
}

fn flag(on: bool, key: &'static str, value: &str) -> (&'static str, Option<String>) {
    (key, on.then(|| value.to_string()))
}

fn build(cli: Cli) -> Result<RunConfig, CliError> {
    let (command, common, pairs): (Command, Common, Pairs) = match cli.command {
        Sub::Tabulate {
            common,
            grid,
            k,
            no_interaction,
            resume,
        } => {
            let mut p = grid_pairs(grid);
            p.push(("k", k));
            p.push(flag(no_interaction, "interaction", "false"));
            p.push(flag(resume, "resume", "true"));
            (Command::Tabulate, common, p)
        }
        Sub::Figure {
            which,
            common,
            basis,
            kx,
            ky,
            dphi,
            rref,
            orders,
            xstep,
            xref,
            scale,
        } => (
            Command::Figure,
            common,
            vec![
                ("figure", Some(which)),
                ("basis", basis),
                ("kx", kx),
                ("ky", ky),
                ("delta_phi", dphi),
                ("r_ref", rref),
                ("fig3_orders", orders),
                ("x_step", xstep),
                ("x_ref", xref),
                ("scale", scale),
            ],
        ),
        Sub::PeoSum {
            common,
            basis,
            dphi,
            rref,
            aniso,
            kx,
            ky,
        } => (
            Command::PeoSum,
            common,
            vec![
                ("basis", basis),
                ("delta_phi", dphi),
                ("r_ref", rref),
                flag(aniso, "aniso", "true"),
                ("kx", kx),
                ("ky", ky),
            ],
        ),
        Sub::Aniso {
            common,
            grid,
            basis,
            kx,
            ky,
        } => {
            let mut p = grid_pairs(grid);
            p.extend([("basis", basis), ("kx", kx), ("ky", ky)]);
            (Command::Aniso, common, p)
        }
        Sub::KernelSolve {
            common,
            mode,
            lambda,
            m,
            n,
            e_c,
            k,
            h,
            rmax,
        } => (
            Command::KernelSolve,
            common,
            vec![
                ("mode", mode),
                ("lambda", lambda),
                ("m", m),
                ("n", n),
                ("e_c", e_c),
                ("k", k),
                ("h", h),
                ("r_max", rmax),
            ],
        ),
        Sub::ExchangeDemo { common, k, sites, order } => (
            Command::ExchangeDemo,
            common,
            vec![("particles", k), ("sites", sites), ("order", order)],
        ),
    };
    let mut config = RunConfig::defaults(command);
    if let Some(path) = &common.config {
        config.apply_file(path)?;
    }
    for (key, value) in pairs {
        if let Some(v) = value {
            config.set(key, &v)?;
        }
    }
    if let Some(out) = common.out {
        config.set("out", &out)?;
    }
    if common.deterministic {
        config.deterministic = true;
    }
    for kv in &common.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        config.set(k.trim(), v)?;
    }
    Ok(config)
}

fn thread_count(config: &RunConfig) -> Result<Option<usize>, CliError> {
    if config.deterministic {
        return Ok(Some(1));
    }
    match std::env::var("HOOKE_PEO_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!("HOOKE_PEO_THREADS: expected a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(cli).and_then(|config| {
        if let Some(n) = thread_count(&config)? {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
        }
        run(&config)
    });
    match result {
        Ok(manifest) => {
            println!("{} files written, parameters {}", manifest.files.len(), manifest.param_hash);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
