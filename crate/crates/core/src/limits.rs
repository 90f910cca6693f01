//! Analytic dissociation-limit states of water in a minimal basis, and the exact
//! reference spectra and scalars they produce.
//!
//! Orbital labels: 0 = O 1s, 1 = O 2s, 2 = O 2p_z, 3 = O 2p_y, 4 = H_A 1s,
//! 5 = H_B 1s, 6 = O 2p_x. Bars denote ↓ spin.

use std::sync::Arc;

use num_rational::Rational64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{Op, SectorBasis};
use crate::measures::MeasureReport;
use crate::solver::{Ensemble, State, WaveFunction};

pub const O_1S: usize = 0;
pub const O_2S: usize = 1;
pub const O_2PZ: usize = 2;
pub const O_2PY: usize = 3;
pub const H_A: usize = 4;
pub const H_B: usize = 5;
pub const O_2PX: usize = 6;

pub const ORBITAL_ROLES: [(usize, &str); 7] = [
    (O_1S, "O 1s"),
    (O_2S, "O 2s"),
    (O_2PZ, "O 2p_z"),
    (O_2PY, "O 2p_y"),
    (H_A, "H_A 1s"),
    (H_B, "H_B 1s"),
    (O_2PX, "O 2p_x"),
];

/// A weighted operator product, applied to the vacuum right to left.
pub type Term = (f64, Vec<Op>);

fn ups(orbitals: &[usize]) -> Vec<Op> {
    orbitals.iter().map(|&k| Op::up(k)).collect()
}

fn downs(orbitals: &[usize]) -> Vec<Op> {
    orbitals.iter().map(|&k| Op::down(k)).collect()
}

/// `C†_{i j̄ ±} = (c†_i c†_j̄ ± c†_j c†_ī)/√2`.
pub fn bell_pair(i: usize, j: usize, plus: bool) -> Vec<Term> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        (s, vec![Op::up(i), Op::down(j)]),
        (if plus { s } else { -s }, vec![Op::up(j), Op::down(i)]),
    ]
}

/// Product of two operator sums, `(Σ a)(Σ b)`, written left to right.
pub fn product(a: &[Term], b: &[Term]) -> Vec<Term> {
    a.iter()
        .flat_map(|(x, p)| {
            b.iter().map(move |(y, q)| {
                let mut ops = p.clone();
                ops.extend(q.iter().copied());
                (x * y, ops)
            })
        })
        .collect()
}

pub fn scaled(terms: Vec<Term>, factor: f64) -> Vec<Term> {
    terms.into_iter().map(|(a, ops)| (a * factor, ops)).collect()
}

fn single(ops: Vec<Op>) -> Vec<Term> {
    vec![(1.0, ops)]
}

/// `C†_{012} C†_{0̄1̄2̄}`, the closed core of the ground state.
pub fn gs_core() -> Vec<Term> {
    let mut ops = ups(&[O_1S, O_2S, O_2PZ]);
    ops.extend(downs(&[O_1S, O_2S, O_2PZ]));
    single(ops)
}

/// `C†_{01 0̄1̄}`, the core shared by the degenerate band.
pub fn band_core() -> Vec<Term> {
    let mut ops = ups(&[O_1S, O_2S]);
    ops.extend(downs(&[O_1S, O_2S]));
    single(ops)
}

fn require_water(basis: &SectorBasis) -> Result<()> {
    if (basis.n_spatial(), basis.n_up(), basis.n_down()) != (7, 5, 5) {
        return Err(Error::domain(format!(
            "dissociation-limit states live in the (7, 5, 5) sector, got ({}, {}, {})",
            basis.n_spatial(),
            basis.n_up(),
            basis.n_down()
        )));
    }
    Ok(())
}

fn pair(i: usize, j: usize) -> Vec<Op> {
    vec![Op::up(i), Op::up(j)]
}

fn dpair(i: usize, j: usize) -> Vec<Op> {
    vec![Op::down(i), Op::down(j)]
}

/// Active part of the ground state as a list of `(coefficient, up pair, down pair)`.
pub fn gs_schmidt_terms() -> [(f64, [usize; 2], [usize; 2]); 6] {
    let a = (1.0_f64 / 12.0).sqrt();
    let b = (1.0_f64 / 3.0).sqrt();
    [
        (a, [3, 4], [5, 6]),
        (a, [5, 6], [3, 4]),
        (-a, [3, 5], [4, 6]),
        (-a, [4, 6], [3, 5]),
        (-b, [3, 6], [4, 5]),
        (-b, [4, 5], [3, 6]),
    ]
}

/// The ground state at infinite separation.
pub fn asymptotic_gs(basis: &Arc<SectorBasis>) -> Result<WaveFunction> {
    require_water(basis)?;
    let active: Vec<Term> = gs_schmidt_terms()
        .iter()
        .map(|&(c, u, d)| {
            let mut ops = pair(u[0], u[1]);
            ops.extend(dpair(d[0], d[1]));
            (c, ops)
        })
        .collect();
    WaveFunction::from_terms(basis.clone(), &product(&active, &gs_core()))
}

const P_ORBITALS: [usize; 3] = [O_2PZ, O_2PY, O_2PX];

fn others(i: usize) -> (usize, usize) {
    let rest: Vec<usize> = P_ORBITALS.iter().copied().filter(|&k| k != i).collect();
    (rest[0], rest[1])
}

/// The twelve degenerate `M_S = 0` states `|K⟩`, `K = 1..12`, in order.
pub fn asymptotic_band(basis: &Arc<SectorBasis>) -> Result<Vec<WaveFunction>> {
    require_water(basis)?;
    let mut terms: Vec<Vec<Term>> = Vec::with_capacity(12);
    for &i in &P_ORBITALS {
        let mut p = ups(&P_ORBITALS);
        p.push(Op::down(i));
        terms.push(product(&single(dpair(H_A, H_B)), &single(p)));
    }
    for &i in &P_ORBITALS {
        let mut p = vec![Op::up(i)];
        p.extend(downs(&P_ORBITALS));
        terms.push(product(&single(pair(H_A, H_B)), &single(p)));
    }
    for h in [vec![Op::up(H_A), Op::down(H_B)], vec![Op::up(H_B), Op::down(H_A)]] {
        for &i in &P_ORBITALS {
            let (j, k) = others(i);
            let p = product(&single(vec![Op::up(i), Op::down(i)]), &bell_pair(j, k, false));
            terms.push(product(&single(h.clone()), &p));
        }
    }
    terms
        .iter()
        .map(|t| WaveFunction::from_terms(basis.clone(), &product(t, &band_core())))
        .collect()
}

/// Uniform mixture of the twelve band states.
pub fn thermal_limit(basis: &Arc<SectorBasis>) -> Result<Ensemble> {
    let band = asymptotic_band(basis)?;
    Ensemble::from_weights(band.into_iter().map(|wf| (1.0 / 12.0, wf)).collect())
}

/// A spectrum as exact values with multiplicities; unlisted eigenvalues are zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumRow(pub Vec<(Rational64, usize)>);

impl SpectrumRow {
    fn new(entries: &[(i64, i64, usize)]) -> Self {
        SpectrumRow(entries.iter().map(|&(n, d, m)| (Rational64::new(n, d), m)).collect())
    }

    pub fn trace(&self) -> Rational64 {
        self.0
            .iter()
            .map(|&(v, m)| v * Rational64::from_integer(m as i64))
            .sum()
    }

    /// Descending values, padded with zeros to `dim`.
    pub fn expanded(&self, dim: usize) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .0
            .iter()
            .flat_map(|&(v, m)| std::iter::repeat_n(*v.numer() as f64 / *v.denom() as f64, m))
            .collect();
        out.sort_by(|a, b| b.total_cmp(a));
        out.resize(dim.max(out.len()), 0.0);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitSpectra {
    pub rho1_up: SpectrumRow,
    pub rho2_upup: SpectrumRow,
    pub rho2_updown: SpectrumRow,
    pub rho_up: SpectrumRow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableI {
    pub gs: LimitSpectra,
    pub thermal: LimitSpectra,
}

pub fn table_i_reference() -> TableI {
    TableI {
        gs: LimitSpectra {
            rho1_up: SpectrumRow::new(&[(1, 2, 4), (1, 1, 3)]),
            rho2_upup: SpectrumRow::new(&[(1, 12, 4), (1, 3, 2), (1, 2, 12), (1, 1, 3)]),
            rho2_updown: SpectrumRow::new(&[(1, 12, 4), (1, 3, 2), (1, 2, 24), (3, 4, 4), (1, 1, 9)]),
            rho_up: SpectrumRow::new(&[(1, 12, 4), (1, 3, 2)]),
        },
        thermal: LimitSpectra {
            rho1_up: SpectrumRow::new(&[(1, 2, 2), (2, 3, 3), (1, 1, 2)]),
            rho2_upup: SpectrumRow::new(&[(1, 4, 7), (5, 12, 3), (1, 2, 4), (2, 3, 6), (1, 1, 1)]),
            rho2_updown: SpectrumRow::new(&[(1, 4, 2), (1, 3, 6), (5, 12, 12), (1, 2, 11), (2, 3, 12), (1, 1, 4)]),
            rho_up: SpectrumRow::new(&[(1, 12, 9), (1, 4, 1)]),
        },
    }
}

/// Schmidt coefficient with its up and down pair operators, each carrying a sign:
/// `Γ (s_A C†_A)(s_B C†_B̄)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtPair {
    pub gamma_sq: (i64, i64),
    pub a: (f64, [usize; 2]),
    pub b: (f64, [usize; 2]),
}

/// The ground-state Schmidt decomposition at dissociation.
pub fn table_ii_reference() -> [SchmidtPair; 6] {
    let p = |n, d, sa, a, sb, b| SchmidtPair {
        gamma_sq: (n, d),
        a: (sa, a),
        b: (sb, b),
    };
    [
        p(1, 3, 1.0, [3, 6], -1.0, [4, 5]),
        p(1, 3, -1.0, [4, 5], 1.0, [3, 6]),
        p(1, 12, 1.0, [3, 4], 1.0, [5, 6]),
        p(1, 12, 1.0, [5, 6], 1.0, [3, 4]),
        p(1, 12, -1.0, [3, 5], 1.0, [4, 6]),
        p(1, 12, 1.0, [4, 6], -1.0, [3, 5]),
    ]
}

/// An eigenvector of `ρ(2)↑↓` of the form `C†_{i j̄ ±}|0⟩` with its eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairEigenvector {
    pub lambda: (i64, i64),
    pub i: usize,
    pub j: usize,
    pub plus: bool,
}

/// Active-pair eigenvectors of the ground-state `ρ(2)↑↓` at dissociation.
pub fn table_iii_reference() -> Vec<PairEigenvector> {
    let mut out = Vec::new();
    for (i, j) in [(3, 4), (5, 6), (3, 5), (4, 6)] {
        out.push(PairEigenvector {
            lambda: (3, 4),
            i,
            j,
            plus: true,
        });
        out.push(PairEigenvector {
            lambda: (1, 12),
            i,
            j,
            plus: false,
        });
    }
    for (i, j) in [(3, 6), (4, 5)] {
        out.push(PairEigenvector {
            lambda: (1, 3),
            i,
            j,
            plus: false,
        });
    }
    out
}

/// Exact scalar measures in the dissociation limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitScalars {
    pub n_updown: f64,
    pub n2_updown: f64,
    pub n2_upup: Option<f64>,
    pub i_updown: f64,
    pub i2_updown: f64,
}

pub fn gs_limit_scalars() -> LimitScalars {
    LimitScalars {
        n_updown: 13.0 / 6.0,
        n2_updown: 5.0 / 6.0,
        n2_upup: Some(0.0),
        i_updown: 4.0 / 3.0 + 2.0 * 3f64.log2(),
        i2_updown: 4.0 / 3.0 + 2.0 * 3f64.log2(),
    }
}

pub fn thermal_limit_scalars() -> LimitScalars {
    LimitScalars {
        n_updown: 1.0 / 6.0,
        n2_updown: 0.0,
        n2_upup: None,
        i_updown: 2.0 + 0.5 * 3f64.log2(),
        i2_updown: 0.5 * (-37.0 + 10.0 * 15f64.log2()),
    }
}

/// One named comparison against a reference value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            expected,
            actual,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        (self.expected - self.actual).abs() <= self.tolerance
    }
}

fn spectrum_deviation(reference: &SpectrumRow, actual: &[f64]) -> f64 {
    let expected = reference.expanded(actual.len());
    let mut actual = actual.to_vec();
    actual.resize(expected.len(), 0.0);
    expected
        .iter()
        .zip(&actual)
        .map(|(e, a)| (e - a).abs())
        .fold(0.0, f64::max)
}

/// Compares a report against the dissociation-limit spectra and scalars. Spectrum
/// checks report the largest eigenvalue deviation against an expected value of zero.
pub fn compare_report(
    label: &str,
    report: &MeasureReport,
    spectra: &LimitSpectra,
    scalars: &LimitScalars,
    tolerance: f64,
) -> Vec<Check> {
    let s = &report.spectra;
    let mut out = vec![
        Check::new(
            format!("{label} rho1_up spectrum"),
            0.0,
            spectrum_deviation(&spectra.rho1_up, &s.rho1_up),
            tolerance,
        ),
        Check::new(
            format!("{label} rho2_upup spectrum"),
            0.0,
            spectrum_deviation(&spectra.rho2_upup, &s.rho2_upup),
            tolerance,
        ),
        Check::new(
            format!("{label} rho2_updown spectrum"),
            0.0,
            spectrum_deviation(&spectra.rho2_updown, &s.rho2_updown),
            tolerance,
        ),
        Check::new(
            format!("{label} rho_up spectrum"),
            0.0,
            spectrum_deviation(&spectra.rho_up, &s.rho_up),
            tolerance,
        ),
        Check::new(
            format!("{label} N_updown"),
            scalars.n_updown,
            report.n_updown,
            tolerance,
        ),
        Check::new(
            format!("{label} N2_updown"),
            scalars.n2_updown,
            report.n2_updown,
            tolerance,
        ),
        Check::new(
            format!("{label} I_updown"),
            scalars.i_updown,
            report.i_updown,
            tolerance,
        ),
        Check::new(
            format!("{label} I2_updown"),
            scalars.i2_updown,
            report.i2_updown,
            tolerance,
        ),
    ];
    if let Some(n2) = scalars.n2_upup {
        out.push(Check::new(format!("{label} N2_upup"), n2, report.n2_upup, tolerance));
    }
    out
}

/// Builds both limit states and checks every tabulated spectrum and scalar.
pub fn analytic_checks(tolerance: f64) -> Result<Vec<Check>> {
    let basis = Arc::new(crate::fock::enumerate_sector(7, 5, 5)?);
    let table = table_i_reference();
    let gs_wf = asymptotic_gs(&basis)?;
    let gs_state = State::Pure(gs_wf.clone());
    let gs = crate::measures::report(&gs_state, None)?;
    let thermal = crate::measures::report(&State::Mixed(thermal_limit(&basis)?), None)?;
    let mut out = compare_report("gs", &gs, &table.gs, &gs_limit_scalars(), tolerance);
    out.extend(compare_report(
        "thermal",
        &thermal,
        &table.thermal,
        &thermal_limit_scalars(),
        tolerance,
    ));
    let e = 2.0 / 3.0 * 3f64.log2() + 12f64.log2() / 3.0;
    out.push(Check::new("gs E_updown", e, gs.e_updown.unwrap_or(f64::NAN), tolerance));
    out.push(Check::new(
        "thermal S(p)",
        12f64.log2(),
        thermal.s_p.unwrap_or(f64::NAN),
        tolerance,
    ));

    let sd = crate::measures::schmidt(&gs_wf)?;
    for (k, pair) in table_ii_reference().iter().enumerate() {
        let actual = sd.singular_values.get(k).map_or(0.0, |g| g * g);
        let (n, d) = pair.gamma_sq;
        out.push(Check::new(
            format!("gs Schmidt weight {k}"),
            n as f64 / d as f64,
            actual,
            tolerance,
        ));
    }
    out.push(Check::new("gs Schmidt rank", 6.0, sd.rank() as f64, 0.0));

    let updown = crate::rdm::two_body(&gs_state).updown;
    let n = basis.n_spatial();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for e in table_iii_reference() {
        let mut v = nalgebra::DVector::zeros(n * n);
        v[e.i * n + e.j] = s;
        v[e.j * n + e.i] = if e.plus { s } else { -s };
        let lambda = e.lambda.0 as f64 / e.lambda.1 as f64;
        let residual = (&updown * &v - &v * lambda).amax();
        let sign = if e.plus { '+' } else { '-' };
        out.push(Check::new(
            format!("gs rho2_updown eigenvector ({} {}{sign}) residual", e.i, e.j),
            0.0,
            residual,
            tolerance,
        ));
    }
    Ok(out)
}
