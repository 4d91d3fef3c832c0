//! Run configuration: defaults per subcommand, `key = value` files, and
//! flag overrides, all funnelled through [`RunConfig::set`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use hooke_peo::kernel::KernelMode;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Tabulate,
    Figure,
    PeoSum,
    Aniso,
    KernelSolve,
    ExchangeDemo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Tabulate => "tabulate",
            Command::Figure => "figure",
            Command::PeoSum => "peo-sum",
            Command::Aniso => "aniso",
            Command::KernelSolve => "kernel-solve",
            Command::ExchangeDemo => "exchange-demo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
}

impl FromStr for Figure {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            _ => Err(format!("unknown figure `{s}` (fig1, fig2, fig3)")),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Figure::Fig1 => "fig1",
            Figure::Fig2 => "fig2",
            Figure::Fig3 => "fig3",
        })
    }
}

fn mode_name(mode: KernelMode) -> &'static str {
    match mode {
        KernelMode::EnergyWeighted => "energy",
        KernelMode::ConstantWeight => "constant",
        KernelMode::ExactDeflation => "exact",
    }
}

fn parse_mode(s: &str) -> Result<KernelMode, String> {
    match s {
        "energy" => Ok(KernelMode::EnergyWeighted),
        "constant" => Ok(KernelMode::ConstantWeight),
        "exact" => Ok(KernelMode::ExactDeflation),
        _ => Err(format!("unknown kernel mode `{s}` (energy, constant, exact)")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub figure: Option<Figure>,
    /// Confinement strength of the isotropic atom.
    pub k: f64,
    pub kx: f64,
    pub ky: f64,
    /// Use the anisotropic eigenbasis in `peo-sum`.
    pub aniso: bool,
    pub m_max: usize,
    pub n_max: usize,
    pub h: f64,
    pub r_max: f64,
    pub interaction: bool,
    pub delta_phis: Vec<f64>,
    pub r_ref: f64,
    /// Relative cancellation threshold for the Δφ = π check.
    pub threshold: f64,
    pub fig3_orders: Vec<usize>,
    pub x_step: f64,
    pub x_ref: f64,
    pub scale: f64,
    pub mode: KernelMode,
    pub lambdas: Vec<f64>,
    pub e_c: Option<f64>,
    pub channel_m: i64,
    pub channel_n: usize,
    pub particles: usize,
    pub sites: usize,
    pub order: usize,
    pub basis: Option<PathBuf>,
    pub out: PathBuf,
    pub resume: bool,
    pub deterministic: bool,
}

/// Keys accepted in config files, in canonical order.
pub const KEYS: &[&str] = &[
    "figure",
    "k",
    "kx",
    "ky",
    "aniso",
    "m_max",
    "n_max",
    "h",
    "r_max",
    "interaction",
    "delta_phi",
    "r_ref",
    "threshold",
    "fig3_orders",
    "x_step",
    "x_ref",
    "scale",
    "mode",
    "lambda",
    "e_c",
    "m",
    "n",
    "particles",
    "sites",
    "order",
    "basis",
    "out",
    "resume",
    "deterministic",
];

/// Keys that do not change results and are left out of the parameter hash.
const NON_PHYSICAL: &[&str] = &["out", "basis", "resume", "deterministic"];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse `{value}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, CliError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| parse(key, s))
        .collect()
}

/// Angles may be written as plain radians or with `pi`: `pi`, `pi/3`,
/// `2pi/3`.
fn parse_angle(key: &str, value: &str) -> Result<f64, CliError> {
    let v = value.trim();
    if let Some(idx) = v.find("pi") {
        let coeff = &v[..idx];
        let c: f64 = if coeff.is_empty() { 1.0 } else { parse(key, coeff)? };
        let rest = &v[idx + 2..];
        let d: f64 = match rest.strip_prefix('/') {
            Some(den) => parse(key, den)?,
            None if rest.is_empty() => 1.0,
            None => return Err(CliError::Config(format!("{key}: cannot parse `{value}`"))),
        };
        return Ok(c * PI / d);
    }
    parse(key, v)
}

fn join<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        let (h, r_max) = match command {
            Command::KernelSolve => (0.02, 8.0),
            _ => (0.005, 12.0),
        };
        Self {
            command,
            figure: None,
            k: 4.0,
            kx: 9.61,
            ky: 4.0,
            aniso: false,
            m_max: 8,
            n_max: 60,
            h,
            r_max,
            interaction: true,
            delta_phis: vec![0.0, PI / 3.0, 2.0 * PI / 3.0, PI],
            r_ref: 1.0,
            threshold: 0.05,
            fig3_orders: vec![50, 125, 250, 500],
            x_step: 1e-3,
            x_ref: 1.0,
            scale: 0.1,
            mode: KernelMode::EnergyWeighted,
            lambdas: vec![0.0, 0.5, 1.0],
            e_c: None,
            channel_m: 0,
            channel_n: 3,
            particles: 2,
            sites: 8,
            order: 12,
            basis: None,
            out: PathBuf::from("."),
            resume: false,
            deterministic: false,
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "figure" => {
                self.figure = match value.trim() {
                    "" => None,
                    v => Some(v.parse().map_err(|e: String| CliError::Config(format!("figure: {e}")))?),
                }
            }
            "k" => self.k = parse(key, value)?,
            "kx" => self.kx = parse(key, value)?,
            "ky" => self.ky = parse(key, value)?,
            "aniso" => self.aniso = parse(key, value)?,
            "m_max" => self.m_max = parse(key, value)?,
            "n_max" => self.n_max = parse(key, value)?,
            "h" => self.h = parse(key, value)?,
            "r_max" => self.r_max = parse(key, value)?,
            "interaction" => self.interaction = parse(key, value)?,
            "delta_phi" => {
                self.delta_phis = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| parse_angle(key, s))
                    .collect::<Result<_, _>>()?
            }
            "r_ref" => self.r_ref = parse(key, value)?,
            "threshold" => self.threshold = parse(key, value)?,
            "fig3_orders" => self.fig3_orders = parse_list(key, value)?,
            "x_step" => self.x_step = parse(key, value)?,
            "x_ref" => self.x_ref = parse(key, value)?,
            "scale" => self.scale = parse(key, value)?,
            "mode" => self.mode = parse_mode(value.trim()).map_err(|e| CliError::Config(format!("mode: {e}")))?,
            "lambda" => self.lambdas = parse_list(key, value)?,
            "e_c" => {
                self.e_c = match value.trim() {
                    "" | "default" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "m" => self.channel_m = parse(key, value)?,
            "n" => self.channel_n = parse(key, value)?,
            "particles" => self.particles = parse(key, value)?,
            "sites" => self.sites = parse(key, value)?,
            "order" => self.order = parse(key, value)?,
            "basis" => {
                self.basis = match value.trim() {
                    "" => None,
                    v => Some(PathBuf::from(v)),
                }
            }
            "out" => self.out = PathBuf::from(value.trim()),
            "resume" => self.resume = parse(key, value)?,
            "deterministic" => self.deterministic = parse(key, value)?,
            _ => return Err(CliError::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> String {
        match key {
            "figure" => self.figure.map(|f| f.to_string()).unwrap_or_default(),
            "k" => self.k.to_string(),
            "kx" => self.kx.to_string(),
            "ky" => self.ky.to_string(),
            "aniso" => self.aniso.to_string(),
            "m_max" => self.m_max.to_string(),
            "n_max" => self.n_max.to_string(),
            "h" => self.h.to_string(),
            "r_max" => self.r_max.to_string(),
            "interaction" => self.interaction.to_string(),
            "delta_phi" => join(&self.delta_phis),
            "r_ref" => self.r_ref.to_string(),
            "threshold" => self.threshold.to_string(),
            "fig3_orders" => join(&self.fig3_orders),
            "x_step" => self.x_step.to_string(),
            "x_ref" => self.x_ref.to_string(),
            "scale" => self.scale.to_string(),
            "mode" => mode_name(self.mode).to_string(),
            "lambda" => join(&self.lambdas),
            "e_c" => self.e_c.map(|v| v.to_string()).unwrap_or_else(|| "default".into()),
            "m" => self.channel_m.to_string(),
            "n" => self.channel_n.to_string(),
            "particles" => self.particles.to_string(),
            "sites" => self.sites.to_string(),
            "order" => self.order.to_string(),
            "basis" => self.basis.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            "out" => self.out.display().to_string(),
            "resume" => self.resume.to_string(),
            "deterministic" => self.deterministic.to_string(),
            _ => String::new(),
        }
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("config file {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    /// Canonical file form; `apply_text` on it reproduces `self`.
    pub fn to_text(&self) -> String {
        let mut s = format!("# {}\n", self.command.name());
        for key in KEYS {
            s.push_str(&format!("{key} = {}\n", self.get(key)));
        }
        s
    }

    /// Parameters that determine results, keyed by name.
    pub fn parameters(&self) -> BTreeMap<String, String> {
        let mut map: BTreeMap<String, String> = KEYS
            .iter()
            .filter(|k| !NON_PHYSICAL.contains(k))
            .map(|k| (k.to_string(), self.get(k)))
            .collect();
        map.insert("command".into(), self.command.name().into());
        map
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let positive = [
            ("k", self.k),
            ("kx", self.kx),
            ("ky", self.ky),
            ("h", self.h),
            ("r_max", self.r_max),
            ("threshold", self.threshold),
            ("x_step", self.x_step),
            ("scale", self.scale),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Config(format!("{name}: must be positive (got {v})")));
            }
        }
        if self.r_max < 20.0 * self.h {
            return Err(CliError::Config(format!(
                "r_max: {} is too small for h={}",
                self.r_max, self.h
            )));
        }
        if self.n_max == 0 {
            return Err(CliError::Config("n_max: must be at least 1".into()));
        }
        if self.r_ref < 0.0 || self.r_ref > self.r_max {
            return Err(CliError::Config(format!("r_ref: {} outside [0, r_max]", self.r_ref)));
        }
        if self.delta_phis.is_empty() {
            return Err(CliError::Config("delta_phi: list is empty".into()));
        }
        if self.lambdas.is_empty() {
            return Err(CliError::Config("lambda: list is empty".into()));
        }
        if self.lambdas.iter().any(|l| !l.is_finite()) {
            return Err(CliError::Config("lambda: values must be finite".into()));
        }
        if let Some(e) = self.e_c {
            if !e.is_finite() {
                return Err(CliError::Config("e_c: must be finite".into()));
            }
        }
        if self.channel_n == 0 {
            return Err(CliError::Config("n: must be at least 1".into()));
        }
        if !(2..=3).contains(&self.particles) {
            return Err(CliError::Config(format!("particles: {} outside [2, 3]", self.particles)));
        }
        if self.sites < 2 {
            return Err(CliError::Config("sites: need at least 2".into()));
        }
        if self.command == Command::Figure && self.figure.is_none() {
            return Err(CliError::Config("figure: choose fig1, fig2 or fig3".into()));
        }
        if self.command == Command::Figure && self.figure == Some(Figure::Fig3) && self.fig3_orders.is_empty() {
            return Err(CliError::Config("fig3_orders: list is empty".into()));
        }
        Ok(())
    }
}
