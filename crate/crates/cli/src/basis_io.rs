//! Basis tables on disk: one `g_m<M>_n<N>.csv` per state plus the
//! tabulation manifest.

use std::fs;
use std::path::{Path, PathBuf};

use hooke_peo::radial::{BasisTable, Dimension, RadialEigenstate, RadialGrid, RadialProblem};

use crate::error::CliError;
use crate::output::{num, read_manifest, Manifest};

pub fn state_file_name(m: usize, n: usize) -> String {
    format!("g_m{m}_n{n}.csv")
}

/// Parameters every state file is stamped with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TableParams {
    pub k: f64,
    pub h: f64,
    pub r_max: f64,
    pub interaction: bool,
}

pub fn state_csv(state: &RadialEigenstate<f64>, params: &TableParams) -> String {
    let mut s = format!(
        "# m={} n={} energy={} r0={} k={} h={} r_max={} interaction={}\nr,g\n",
        state.problem.nu(),
        state.n,
        num(state.energy),
        num(state.r0),
        params.k,
        params.h,
        params.r_max,
        params.interaction
    );
    for (r, g) in state.grid.r().iter().zip(&state.values) {
        s.push_str(&num(*r));
        s.push(',');
        s.push_str(&num(*g));
        s.push('\n');
    }
    s
}

fn header_field<'a>(header: &'a str, key: &str) -> Option<&'a str> {
    header
        .trim_start_matches('#')
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix(key).and_then(|rest| rest.strip_prefix('=')))
}

/// Reads a state file written by [`state_csv`]. Returns `Ok(None)` when
/// the file belongs to a different table (other parameters or grid).
pub fn read_state(path: &Path, params: &TableParams, grid: &RadialGrid<f64>) -> Result<Option<RadialEigenstate<f64>>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |msg: &str| CliError::Data {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    let field = |key: &str| header_field(header, key).ok_or_else(|| bad(&format!("header lacks {key}")));
    let parse_f = |key: &str| -> Result<f64, CliError> {
        field(key)?.parse().map_err(|_| bad(&format!("bad {key}")))
    };
    let stamped = TableParams {
        k: parse_f("k")?,
        h: parse_f("h")?,
        r_max: parse_f("r_max")?,
        interaction: field("interaction")?.parse().map_err(|_| bad("bad interaction"))?,
    };
    if stamped != *params {
        return Ok(None);
    }
    let m: i64 = field("m")?.parse().map_err(|_| bad("bad m"))?;
    let n: usize = field("n")?.parse().map_err(|_| bad("bad n"))?;
    let energy = parse_f("energy")?;
    let r0 = parse_f("r0")?;
    if lines.next() != Some("r,g") {
        return Err(bad("missing `r,g` column header"));
    }
    let mut values = Vec::with_capacity(grid.n_points());
    for line in lines {
        let (_, g) = line.split_once(',').ok_or_else(|| bad("row without comma"))?;
        values.push(g.trim().parse().map_err(|_| bad("bad g value"))?);
    }
    if values.len() != grid.n_points() {
        return Ok(None);
    }
    let problem = RadialProblem::new(Dimension::Two, params.k, m, params.interaction)?;
    Ok(Some(RadialEigenstate {
        problem,
        n,
        energy,
        values,
        r0,
        grid: grid.clone(),
    }))
}

/// A basis table read back from a tabulation directory.
#[derive(Debug, Clone)]
pub struct LoadedBasis {
    pub table: BasisTable<f64>,
    pub manifest: Manifest,
    pub dir: PathBuf,
}

impl LoadedBasis {
    /// Identifies the table: its parameter hash.
    pub fn provenance(&self) -> String {
        self.manifest.param_hash.clone()
    }
}

fn param<T: std::str::FromStr>(manifest: &Manifest, dir: &Path, key: &str) -> Result<T, CliError> {
    manifest
        .parameters
        .get(key)
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| CliError::Data {
            path: dir.join(crate::output::MANIFEST),
            msg: format!("parameter {key} missing or malformed"),
        })
}

pub fn load_basis(dir: &Path) -> Result<LoadedBasis, CliError> {
    let manifest = read_manifest(dir).map_err(|e| match e {
        CliError::Io { .. } => CliError::Config(format!(
            "no basis table in {}; run `hooke-peo tabulate --out {}` first",
            dir.display(),
            dir.display()
        )),
        other => other,
    })?;
    if manifest.command != "tabulate" {
        return Err(CliError::Config(format!(
            "{} holds `{}` output, not a basis table; run `hooke-peo tabulate` first",
            dir.display(),
            manifest.command
        )));
    }
    let params = TableParams {
        k: param(&manifest, dir, "k")?,
        h: param(&manifest, dir, "h")?,
        r_max: param(&manifest, dir, "r_max")?,
        interaction: param(&manifest, dir, "interaction")?,
    };
    let m_max: usize = param(&manifest, dir, "m_max")?;
    let n_max: usize = param(&manifest, dir, "n_max")?;
    let grid = RadialGrid::new(params.h, params.r_max, Dimension::Two)?;
    let mut states = Vec::with_capacity((m_max + 1) * n_max);
    for m in 0..=m_max {
        for n in 1..=n_max {
            let name = state_file_name(m, n);
            let path = dir.join(&name);
            let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
            let listed = manifest.file(&name).map(|f| f.sha256.as_str());
            if listed != Some(crate::output::sha256_hex(&bytes).as_str()) {
                return Err(CliError::Data {
                    path,
                    msg: "checksum does not match the manifest".into(),
                });
            }
            let state = read_state(&path, &params, &grid)?.ok_or_else(|| CliError::Data {
                path: path.clone(),
                msg: "state parameters differ from the manifest".into(),
            })?;
            states.push(state);
        }
    }
    let table = BasisTable::from_states(params.k, params.interaction, m_max, n_max, grid, states)?;
    Ok(LoadedBasis {
        table,
        manifest,
        dir: dir.to_path_buf(),
    })
}
