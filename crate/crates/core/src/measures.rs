//! Entropies, mutual informations, negativities and the up-down Schmidt
//! decomposition. All logarithms are base 2.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::binomial;
use crate::linalg;
use crate::rdm::{self, Rdm1, Rdm2, UpDownDensity};
use crate::solver::{State, WaveFunction, DEFAULT_DENSE_LIMIT};

/// Singular values at or below this are not counted in the Schmidt rank.
pub const RANK_CUTOFF: f64 = 1e-8;

const NEG_TOL: f64 = 1e-9;
const ANTISYM_TOL: f64 = 1e-10;

/// `-Σ λ log₂ λ`. Entries in `[-1e-9, 0]` contribute nothing; entries above one
/// contribute negatively.
pub fn entropy(spectrum: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &v in spectrum {
        if v < -NEG_TOL || !v.is_finite() {
            return Err(Error::Numerical(format!("entropy of an invalid eigenvalue {v}")));
        }
        if v > 0.0 {
            s -= v * v.log2();
        }
    }
    Ok(s)
}

#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// `Γ_ν`, descending, above [`RANK_CUTOFF`].
    pub singular_values: Vec<f64>,
    /// Columns over ↑ strings.
    pub left: DMatrix<f64>,
    /// Columns over ↓ strings.
    pub right: DMatrix<f64>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.singular_values.len()
    }

    /// `E↑↓ = S(ρ↑)` from the squared singular values.
    pub fn entanglement_entropy(&self) -> f64 {
        let p: Vec<f64> = self.singular_values.iter().map(|g| g * g).collect();
        entropy(&p).expect("squares are non-negative")
    }

    /// `½((Σ Γ_ν)² - 1)`, the total negativity of a pure state.
    pub fn negativity(&self) -> f64 {
        let s: f64 = self.singular_values.iter().sum();
        0.5 * (s * s - 1.0)
    }
}

pub fn schmidt(wf: &WaveFunction) -> Result<SchmidtDecomposition> {
    let (values, mut u, mut v) = linalg::svd(&wf.gamma())?;
    let rank = values.iter().take_while(|&&g| g > RANK_CUTOFF).count();
    u = u.columns(0, rank).into_owned();
    v = v.columns(0, rank).into_owned();
    let signs = linalg::fix_column_signs(&mut u);
    for (mut col, s) in v.column_iter_mut().zip(signs) {
        col *= s;
    }
    Ok(SchmidtDecomposition {
        singular_values: values[..rank].to_vec(),
        left: u,
        right: v,
    })
}

/// `S(ρ)` of the whole sector state: zero for pure states, otherwise from the full
/// density spectrum.
pub fn state_entropy(state: &State, dense_limit: usize) -> Result<f64> {
    match state {
        State::Pure(_) => Ok(0.0),
        State::Mixed(_) => entropy(&rdm::clamped_spectrum(&rdm::full_density(state, dense_limit)?)?),
    }
}

/// `I↑↓ = S(ρ↑) + S(ρ↓) - S(ρ)`.
pub fn mutual_information_total(state: &State, d: &UpDownDensity) -> Result<f64> {
    let s_up = entropy(&rdm::clamped_spectrum(&d.rho_up)?)?;
    let s_down = entropy(&rdm::clamped_spectrum(&d.rho_down)?)?;
    Ok(s_up + s_down - state_entropy(state, DEFAULT_DENSE_LIMIT)?)
}

/// `I(2)↑↓ = N↓ S(ρ(1)↑) + N↑ S(ρ(1)↓) - S(ρ(2)↑↓)`.
pub fn mutual_information_2body(r1: &Rdm1, r2: &Rdm2) -> Result<f64> {
    if r2.n_up * r2.n_down == 0 {
        return Err(Error::domain("two-body mutual information needs both spin species"));
    }
    let s_up = entropy(&rdm::clamped_spectrum(&r1.up)?)?;
    let s_down = entropy(&rdm::clamped_spectrum(&r1.down)?)?;
    let s_ud = entropy(&rdm::clamped_spectrum(&r2.updown)?)?;
    Ok(r2.n_down as f64 * s_up + r2.n_up as f64 * s_down - s_ud)
}

/// `½(Tr|ρ^{t↓}| - 1)`.
pub fn negativity_total(pt: &DMatrix<f64>) -> Result<f64> {
    Ok(0.5 * (linalg::trace_norm(pt)? - pt.trace()))
}

/// `(ρ(2)t↓)_{ij̄,kl̄} = ρ(2)_{il̄,kj̄}` on the up-down block.
pub fn updown_partial_transpose(updown: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = square_root_dim(updown)?;
    Ok(DMatrix::from_fn(n * n, n * n, |r, c| {
        let (i, j) = (r / n, r % n);
        let (k, l) = (c / n, c % n);
        updown[(i * n + l, k * n + j)]
    }))
}

/// `½(Tr|ρ(2)t↓| - N↑N↓)`, with `N↑N↓` read off the trace.
pub fn negativity_2body_updown(updown: &DMatrix<f64>) -> Result<f64> {
    let pt = updown_partial_transpose(updown)?;
    Ok(0.5 * (linalg::trace_norm(&pt)? - updown.trace()))
}

fn square_root_dim(m: &DMatrix<f64>) -> Result<usize> {
    let n = (m.nrows() as f64).sqrt().round() as usize;
    if n * n != m.nrows() || m.nrows() != m.ncols() {
        return Err(Error::domain(format!(
            "expected a pair-labelled square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(n)
}

/// `ρtp_{ij,kl} = ρ_{il,kj} - ρ_{ik,lj}` on an antisymmetrized two-body matrix.
pub fn antisym_partial_transpose(r: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = square_root_dim(r)?;
    let at = |i: usize, j: usize, k: usize, l: usize| r[(i * d + j, k * d + l)];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let v = at(i, j, k, l);
                    if (v + at(j, i, k, l)).abs() > ANTISYM_TOL || (v + at(i, j, l, k)).abs() > ANTISYM_TOL {
                        return Err(Error::domain(format!(
                            "two-body matrix is not antisymmetric at ({i} {j}, {k} {l})"
                        )));
                    }
                }
            }
        }
    }
    Ok(DMatrix::from_fn(d * d, d * d, |r_, c| {
        let (i, j) = (r_ / d, r_ % d);
        let (k, l) = (c / d, c % d);
        at(i, l, k, j) - at(i, k, l, j)
    }))
}

/// `½(Tr|½ρtp| - ½N(N-1))` for an antisymmetrized matrix of `n_particles` fermions.
pub fn negativity_2body_fermionic(r: &DMatrix<f64>, n_particles: usize) -> Result<f64> {
    let tp = antisym_partial_transpose(r)?;
    let pairs = (n_particles * n_particles.saturating_sub(1)) as f64;
    Ok(0.5 * (0.5 * linalg::trace_norm(&tp)? - 0.5 * pairs))
}

/// Largest attainable entropies for a sector with `n` spatial orbitals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxEntropies {
    pub rho_up: f64,
    pub rho1_up: f64,
    pub rho2_upup: f64,
    pub rho2_updown: f64,
}

pub fn max_entropies(n: usize, n_up: usize, n_down: usize) -> MaxEntropies {
    let log_ratio = |num: f64, den: f64| if den > 0.0 { (num / den).log2() } else { 0.0 };
    let pairs_up = binomial(n_up, 2) as f64;
    let nud = (n_up * n_down) as f64;
    MaxEntropies {
        rho_up: (binomial(n, n_up).min(binomial(n, n_down)) as f64).log2(),
        rho1_up: n_up as f64 * log_ratio(n as f64, n_up as f64),
        rho2_upup: pairs_up * log_ratio(binomial(n, 2) as f64, pairs_up),
        rho2_updown: nud * log_ratio((n * n) as f64, nud),
    }
}

/// `S / S_max` per quantity; `None` where `S_max` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalizedEntropies {
    pub rho_up: Option<f64>,
    pub rho1_up: Option<f64>,
    pub rho2_upup: Option<f64>,
    pub rho2_updown: Option<f64>,
}

pub fn normalized_entropies(report: &MeasureReport) -> NormalizedEntropies {
    let m = max_entropies(report.n_spatial, report.n_up, report.n_down);
    let ratio = |s: f64, max: f64| (max > 1e-12).then(|| s / max);
    NormalizedEntropies {
        rho_up: ratio(report.s_rho_up, m.rho_up),
        rho1_up: ratio(report.s1_up, m.rho1_up),
        rho2_upup: ratio(report.s2_upup, m.rho2_upup),
        rho2_updown: ratio(report.s2_updown, m.rho2_updown),
    }
}

/// Eigenvalue spectra, descending.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectra {
    pub rho_up: Vec<f64>,
    pub rho_down: Vec<f64>,
    pub rho1_up: Vec<f64>,
    pub rho1_down: Vec<f64>,
    pub rho2_upup: Vec<f64>,
    pub rho2_downdown: Vec<f64>,
    pub rho2_updown: Vec<f64>,
    /// Eigenvalues of `ρ^{t↓}`, ascending, only those below `-1e-9`.
    pub pt_negative: Vec<f64>,
    /// Eigenvalues of `ρ(2)t↓`, ascending, only those below `-1e-9`.
    pub pt2_updown_negative: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub kind: &'static str,
    pub geometry: Option<f64>,
    pub n_spatial: usize,
    pub n_up: usize,
    pub n_down: usize,
    /// Energy of a pure state, or the weighted mean energy of an ensemble.
    pub energy: Option<f64>,
    /// Up-down entanglement entropy; defined for pure states only.
    pub e_updown: Option<f64>,
    pub schmidt_rank: Option<usize>,
    pub s_rho_up: f64,
    pub s_rho_down: f64,
    pub s_rho: f64,
    pub i_updown: f64,
    pub e1: f64,
    pub s1_up: f64,
    pub s1_down: f64,
    pub e2: f64,
    pub s2_upup: f64,
    pub s2_downdown: f64,
    pub s2_updown: f64,
    /// Zero when one spin species is empty.
    pub i2_updown: f64,
    pub n_updown: f64,
    pub n2_updown: f64,
    pub n2_upup: f64,
    pub n2_downdown: f64,
    pub lambda_max_r2ud: f64,
    pub s_p: Option<f64>,
    pub s_q: Option<f64>,
    pub beta: Option<f64>,
    pub n_members: usize,
    pub normalized: Option<NormalizedEntropies>,
    pub spectra: Spectra,
}

fn negative_part(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    Ok(linalg::eigvalsh(m)?.into_iter().filter(|&v| v < -NEG_TOL).collect())
}

pub fn report(state: &State, geometry: Option<f64>) -> Result<MeasureReport> {
    report_with_limit(state, geometry, DEFAULT_DENSE_LIMIT)
}

pub fn report_with_limit(state: &State, geometry: Option<f64>, dense_limit: usize) -> Result<MeasureReport> {
    let b = state.basis();
    let (n, n_up, n_down) = (b.n_spatial(), b.n_up(), b.n_down());
    let d = rdm::updown_densities(state);
    let r1 = rdm::one_body_from(b, &d);
    let r2 = rdm::two_body_from(state, &d);

    let rho_up = rdm::clamped_spectrum(&d.rho_up)?;
    let rho_down = rdm::clamped_spectrum(&d.rho_down)?;
    let rho1_up = rdm::clamped_spectrum(&r1.up)?;
    let rho1_down = rdm::clamped_spectrum(&r1.down)?;
    let rho2_upup = rdm::clamped_spectrum(&r2.upup)?;
    let rho2_downdown = rdm::clamped_spectrum(&r2.downdown)?;
    let rho2_updown = rdm::clamped_spectrum(&r2.updown)?;

    let s_rho_up = entropy(&rho_up)?;
    let s_rho_down = entropy(&rho_down)?;
    let s1_up = entropy(&rho1_up)?;
    let s1_down = entropy(&rho1_down)?;
    let s2_upup = entropy(&rho2_upup)?;
    let s2_downdown = entropy(&rho2_downdown)?;
    let s2_updown = entropy(&rho2_updown)?;

    let (_, pt) = rdm::full_density_and_pt(state, dense_limit)?;
    let pt_negative = negative_part(&pt)?;
    let pt2 = updown_partial_transpose(&r2.updown)?;
    let pt2_updown_negative = negative_part(&pt2)?;

    let (e_updown, schmidt_rank, s_rho, energy, s_p, s_q, beta, n_members) = match state {
        State::Pure(wf) => {
            let sd = schmidt(wf)?;
            (
                Some(sd.entanglement_entropy()),
                Some(sd.rank()),
                0.0,
                wf.energy(),
                None,
                None,
                None,
                1,
            )
        }
        State::Mixed(e) => {
            let energy = e
                .members()
                .iter()
                .map(|(w, wf)| wf.energy().map(|x| w * x))
                .sum::<Option<f64>>();
            (
                None,
                None,
                state_entropy(state, dense_limit)?,
                energy,
                Some(e.entropy_p()),
                Some(e.entropy_q()),
                e.beta(),
                e.members().len(),
            )
        }
    };

    let i2_updown = if n_up * n_down == 0 {
        0.0
    } else {
        mutual_information_2body(&r1, &r2)?
    };

    let mut out = MeasureReport {
        kind: if state.is_pure() { "pure" } else { "mixed" },
        geometry,
        n_spatial: n,
        n_up,
        n_down,
        energy,
        e_updown,
        schmidt_rank,
        s_rho_up,
        s_rho_down,
        s_rho,
        i_updown: s_rho_up + s_rho_down - s_rho,
        e1: s1_up + s1_down,
        s1_up,
        s1_down,
        e2: s2_upup + s2_downdown + s2_updown,
        s2_upup,
        s2_downdown,
        s2_updown,
        i2_updown,
        n_updown: negativity_total(&pt)?,
        n2_updown: 0.5 * (linalg::trace_norm(&pt2)? - r2.updown.trace()),
        n2_upup: negativity_2body_fermionic(&r2.upup_unrestricted(), n_up)?,
        n2_downdown: negativity_2body_fermionic(&r2.downdown_unrestricted(), n_down)?,
        lambda_max_r2ud: rho2_updown.first().copied().unwrap_or(0.0),
        s_p,
        s_q,
        beta,
        n_members,
        normalized: None,
        spectra: Spectra {
            rho_up,
            rho_down,
            rho1_up,
            rho1_down,
            rho2_upup,
            rho2_downdown,
            rho2_updown,
            pt_negative,
            pt2_updown_negative,
        },
    };
    out.normalized = Some(normalized_entropies(&out));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{enumerate_sector, Determinant, Op};
    use std::sync::Arc;

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(entropy(&[1.0]).unwrap(), 0.0);
        assert_eq!(entropy(&[1.0, -1e-12]).unwrap(), 0.0);
        assert!(entropy(&[2.0]).unwrap() < 0.0);
        assert!(matches!(entropy(&[1.0, -1e-6]), Err(Error::Numerical(_))));
        let gs = [1.0 / 3.0, 1.0 / 3.0, 1.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0, 1.0 / 12.0];
        let expected = 2.0 / 3.0 * 3f64.log2() + 12f64.log2() / 3.0;
        assert!((entropy(&gs).unwrap() - expected).abs() < 1e-14);
        assert!((expected - 2.2516).abs() < 1e-4);
    }

    #[test]
    fn max_entropy_formulas() {
        let m = max_entropies(7, 5, 5);
        assert!((m.rho1_up - 5.0 * (7.0f64 / 5.0).log2()).abs() < 1e-14);
        assert!((m.rho1_up - 2.4271).abs() < 1e-4);
        assert!((m.rho_up - 21f64.log2()).abs() < 1e-14);
        assert!((m.rho2_upup - 10.0 * 2.1f64.log2()).abs() < 1e-14);
        assert!((m.rho2_updown - 25.0 * (49.0f64 / 25.0).log2()).abs() < 1e-14);
        assert_eq!(max_entropies(3, 0, 0).rho1_up, 0.0);
    }

    #[test]
    fn product_state_report_is_zero() {
        let b = Arc::new(enumerate_sector(4, 2, 1).unwrap());
        let wf = WaveFunction::determinant(b, Determinant::from_orbitals(&[1, 3], &[0])).unwrap();
        let r = report(&State::Pure(wf), None).unwrap();
        for v in [
            r.s_rho_up,
            r.i_updown,
            r.e1,
            r.e2,
            r.i2_updown,
            r.n_updown,
            r.n2_updown,
            r.n2_upup,
        ] {
            assert!(v.abs() < 1e-12, "{r:?}");
        }
        assert_eq!(r.schmidt_rank, Some(1));
    }

    #[test]
    fn two_term_schmidt() {
        let b = Arc::new(enumerate_sector(4, 1, 1).unwrap());
        let p: f64 = 0.3;
        let terms = vec![
            (p.sqrt(), vec![Op::up(0), Op::down(1)]),
            ((1.0 - p).sqrt(), vec![Op::up(2), Op::down(3)]),
        ];
        let wf = WaveFunction::from_terms(b, &terms).unwrap();
        let sd = schmidt(&wf).unwrap();
        assert_eq!(sd.rank(), 2);
        assert!((sd.singular_values[0] - 0.7f64.sqrt()).abs() < 1e-14);
        assert!((sd.singular_values[1] - 0.3f64.sqrt()).abs() < 1e-14);
        let r = report(&State::Pure(wf), None).unwrap();
        assert!((r.n_updown - sd.negativity()).abs() < 1e-12);
        assert!((r.i_updown - 2.0 * sd.entanglement_entropy()).abs() < 1e-12);
    }

    #[test]
    fn two_fermion_negativities() {
        // (c†_0↑ c†_1↓ + c†_1↑ c†_0↓)/√2
        let b = Arc::new(enumerate_sector(2, 1, 1).unwrap());
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let terms = vec![(s, vec![Op::up(0), Op::down(1)]), (s, vec![Op::up(1), Op::down(0)])];
        let st = State::Pure(WaveFunction::from_terms(b, &terms).unwrap());
        let r = report(&st, None).unwrap();
        assert!((r.n_updown - 0.5).abs() < 1e-12);
        assert!((r.n2_updown - r.n_updown).abs() < 1e-12);
        assert!((r.i2_updown - r.i_updown).abs() < 1e-12);
        assert!((r.i_updown - r.e1).abs() < 1e-12);
        let full = crate::rdm::two_body(&st).spin_orbital_unrestricted();
        assert!((negativity_2body_fermionic(&full, 2).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn antisymmetry_is_checked() {
        let mut m = DMatrix::zeros(4, 4);
        m[(1, 1)] = 1.0;
        assert!(matches!(antisym_partial_transpose(&m), Err(Error::Domain(_))));
        assert!(antisym_partial_transpose(&DMatrix::zeros(3, 3)).is_err());
    }

    #[test]
    fn two_body_mi_needs_both_species() {
        let b = Arc::new(enumerate_sector(3, 2, 0).unwrap());
        let st = State::Pure(WaveFunction::determinant(b, Determinant::from_orbitals(&[0, 1], &[])).unwrap());
        let r1 = crate::rdm::one_body(&st);
        let r2 = crate::rdm::two_body(&st);
        assert!(matches!(mutual_information_2body(&r1, &r2), Err(Error::Domain(_))));
        assert_eq!(report(&st, None).unwrap().i2_updown, 0.0);
    }
}
