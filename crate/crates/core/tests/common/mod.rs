#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fermicorr::fock::enumerate_sector;
use fermicorr::integrals::parse_fcidump;
use fermicorr::measures::{report, MeasureReport};
use fermicorr::solver::{build_hamiltonian, eigensolve, thermal_ensemble, DEFAULT_DENSE_LIMIT, DEFAULT_WEIGHT_CUTOFF};
use fermicorr::{SectorBasis, State, WaveFunction};
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

pub const BETA: f64 = 1000.0;

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/water")
}

#[derive(Debug, Deserialize)]
pub struct ManifestPoint {
    #[serde(rename = "R")]
    pub r: f64,
    pub file: String,
    pub fci_energies: Vec<f64>,
}

#[derive(Debug, Deserialize)]
pub struct Manifest {
    pub points: Vec<ManifestPoint>,
}

pub fn manifest() -> Manifest {
    let text = std::fs::read_to_string(fixture_dir().join("manifest.json")).expect("manifest");
    serde_json::from_str(&text).expect("manifest json")
}

pub struct Solved {
    pub r: f64,
    pub energies: Vec<f64>,
    pub gs: MeasureReport,
    pub thermal: MeasureReport,
    pub thermal_members: usize,
    pub p0: f64,
}

pub fn solve_point(point: &ManifestPoint) -> Solved {
    let text = std::fs::read_to_string(fixture_dir().join(&point.file)).expect("fixture");
    let table = parse_fcidump(&text).expect("parse");
    let (nu, nd) = table.sector().unwrap();
    let basis = Arc::new(enumerate_sector(table.n_spatial(), nu, nd).unwrap());
    let h = build_hamiltonian(&basis, &table, DEFAULT_DENSE_LIMIT).unwrap();
    let eig = eigensolve(&h).unwrap();
    let gs = State::Pure(eig.state(&basis, 0).unwrap());
    let ens = thermal_ensemble(&eig, &basis, BETA, DEFAULT_WEIGHT_CUTOFF).unwrap();
    let thermal_members = ens.members().len();
    let p0 = ens.members()[0].0;
    Solved {
        r: point.r,
        energies: eig.values.clone(),
        gs: report(&gs, Some(point.r)).unwrap(),
        thermal: report(&State::Mixed(ens), Some(point.r)).unwrap(),
        thermal_members,
        p0,
    }
}

/// Solves every fixture point, one thread per point.
pub fn solve_all() -> Vec<Solved> {
    let m = manifest();
    let mut out: Vec<Solved> = std::thread::scope(|s| {
        let handles: Vec<_> = m.points.iter().map(|p| s.spawn(move || solve_point(p))).collect();
        handles.into_iter().map(|h| h.join().expect("solver thread")).collect()
    });
    out.sort_by(|a, b| a.r.total_cmp(&b.r));
    out
}

pub fn basis(n: usize, nu: usize, nd: usize) -> Arc<SectorBasis> {
    Arc::new(enumerate_sector(n, nu, nd).unwrap())
}

pub fn random_state(basis: &Arc<SectorBasis>, rng: &mut ChaCha8Rng) -> WaveFunction {
    let c = (0..basis.dim()).map(|_| rng.random_range(-1.0..1.0)).collect();
    WaveFunction::normalized(basis.clone(), c).unwrap()
}

pub fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let m = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
    m.qr().q()
}

/// A real Slater determinant in rotated orbitals.
pub fn random_sd(basis: &Arc<SectorBasis>, rng: &mut ChaCha8Rng) -> WaveFunction {
    let n = basis.n_spatial();
    let u = random_orthogonal(n, rng);
    let v = random_orthogonal(n, rng);
    WaveFunction::slater(
        basis.clone(),
        &u.columns(0, basis.n_up()).into_owned(),
        &v.columns(0, basis.n_down()).into_owned(),
    )
    .unwrap()
}

/// Maximum absolute difference of two equally sized slices.
pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn matrix_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (a - b).amax()
}
