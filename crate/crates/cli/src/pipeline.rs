//! File → Hamiltonian → eigenpairs → measure reports.

use std::str::FromStr;
use std::sync::Arc;

use fermicorr::fock::enumerate_sector;
use fermicorr::measures::report_with_limit;
use fermicorr::solver::{build_hamiltonian, eigensolve, thermal_ensemble};
use fermicorr::{MeasureReport, State};
use serde::Serialize;

use crate::input::{load, Input};
use crate::Failure;

pub const SCHEMA: u32 = 1;

/// Which state of the spectrum to analyse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    Ground,
    Thermal,
    Eigen(usize),
}

impl Selection {
    pub fn label(&self) -> String {
        match self {
            Selection::Ground => "gs".into(),
            Selection::Thermal => "thermal".into(),
            Selection::Eigen(k) => format!("eigen{k}"),
        }
    }
}

impl FromStr for Selection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gs" => Ok(Selection::Ground),
            "thermal" => Ok(Selection::Thermal),
            _ => s
                .strip_prefix("eigen")
                .map(|k| k.trim_start_matches(':'))
                .and_then(|k| k.parse().ok())
                .map(Selection::Eigen)
                .ok_or_else(|| format!("unknown state `{s}` (expected gs, thermal or eigen<k>)")),
        }
    }
}

impl Serialize for Selection {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.label())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Settings {
    pub beta: f64,
    pub sector: Option<(usize, usize)>,
    pub states: Vec<Selection>,
    pub n_roots: usize,
    pub weight_cutoff: f64,
    pub dense_limit: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorInfo {
    pub n_spatial: usize,
    pub n_up: usize,
    pub n_down: usize,
    pub dim: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Labelled {
    pub state: String,
    pub report: MeasureReport,
}

/// Everything computed for one input file.
#[derive(Debug, Clone, Serialize)]
pub struct Document {
    pub schema: u32,
    pub file: String,
    pub tag: Option<f64>,
    pub sha256: String,
    pub config: Settings,
    pub sector: SectorInfo,
    /// Lowest eigenvalues including the core energy.
    pub energies: Vec<f64>,
    pub reports: Vec<Labelled>,
}

pub fn run(input: &Input, settings: &Settings) -> Result<Document, Failure> {
    let ctx = |e: fermicorr::Error| Failure::input(&input.path, e);
    let loaded = load(&input.path)?;
    let mut table = loaded.table;
    if let Some((nu, nd)) = settings.sector {
        table = table.with_electrons(nu + nd, nu as i64 - nd as i64).map_err(ctx)?;
    }
    let (n_up, n_down) = table.sector().map_err(ctx)?;
    let basis = Arc::new(enumerate_sector(table.n_spatial(), n_up, n_down).map_err(ctx)?);
    log::info!(
        "{}: sector ({n_up}, {n_down}), dimension {}",
        input.path.display(),
        basis.dim()
    );
    let h = build_hamiltonian(&basis, &table, settings.dense_limit).map_err(ctx)?;
    let eig = eigensolve(&h).map_err(ctx)?;

    let mut reports = Vec::with_capacity(settings.states.len());
    for sel in &settings.states {
        let state = match *sel {
            Selection::Ground => State::Pure(eig.state(&basis, 0).map_err(ctx)?),
            Selection::Thermal => {
                State::Mixed(thermal_ensemble(&eig, &basis, settings.beta, settings.weight_cutoff).map_err(ctx)?)
            }
            Selection::Eigen(k) => {
                if k >= eig.len() {
                    return Err(Failure::Input(format!(
                        "{}: eigenstate {k} requested but the sector has {} states",
                        input.path.display(),
                        eig.len()
                    )));
                }
                State::Pure(eig.state(&basis, k).map_err(ctx)?)
            }
        };
        let report = report_with_limit(&state, input.tag, settings.dense_limit).map_err(ctx)?;
        reports.push(Labelled {
            state: sel.label(),
            report,
        });
    }

    Ok(Document {
        schema: SCHEMA,
        file: input.path.display().to_string(),
        tag: input.tag,
        sha256: loaded.sha256,
        config: settings.clone(),
        sector: SectorInfo {
            n_spatial: basis.n_spatial(),
            n_up,
            n_down,
            dim: basis.dim(),
        },
        energies: eig.values.iter().take(settings.n_roots).copied().collect(),
        reports,
    })
}
