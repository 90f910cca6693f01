//! Sector Hamiltonian, eigenstates and thermal mixtures.

use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{apply_ops, bit_positions, excitation_info, Determinant, Op, SectorBasis};
use crate::integrals::IntegralTable;
use crate::linalg;
use crate::measures::entropy;

/// Default ceiling on the dimension of any dense matrix we are willing to build.
pub const DEFAULT_DENSE_LIMIT: usize = 20_000;

/// Default weight below which thermal members are dropped.
pub const DEFAULT_WEIGHT_CUTOFF: f64 = 1e-12;

const NORM_TOL: f64 = 1e-10;

/// A normalized state within one sector. `coeffs` is `Γ_αβ` in row-major order.
#[derive(Debug, Clone)]
pub struct WaveFunction {
    basis: Arc<SectorBasis>,
    coeffs: Vec<f64>,
    energy: Option<f64>,
}

impl WaveFunction {
    pub fn new(basis: Arc<SectorBasis>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::domain(format!(
                "{} coefficients for a sector of dimension {}",
                coeffs.len(),
                basis.dim()
            )));
        }
        let norm2: f64 = coeffs.iter().map(|c| c * c).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("state is not normalized (norm² = {norm2})")));
        }
        Ok(WaveFunction {
            basis,
            coeffs,
            energy: None,
        })
    }

    /// Rescales `coeffs` to unit norm.
    pub fn normalized(basis: Arc<SectorBasis>, mut coeffs: Vec<f64>) -> Result<Self> {
        let norm = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        coeffs.iter_mut().for_each(|c| *c /= norm);
        Self::new(basis, coeffs)
    }

    /// The single determinant `det` with coefficient +1.
    pub fn determinant(basis: Arc<SectorBasis>, det: Determinant) -> Result<Self> {
        let idx = basis
            .index_of(&det)
            .ok_or_else(|| Error::domain(format!("{det:?} is not in the sector")))?;
        let mut coeffs = vec![0.0; basis.dim()];
        coeffs[idx] = 1.0;
        Self::new(basis, coeffs)
    }

    /// `Σ_k a_k O_k |0⟩`, where each `O_k` is an operator product in written order.
    /// The result must already be normalized.
    pub fn from_terms(basis: Arc<SectorBasis>, terms: &[(f64, Vec<Op>)]) -> Result<Self> {
        let mut coeffs = vec![0.0; basis.dim()];
        for (amp, ops) in terms {
            let Some((phase, det)) = apply_ops(Determinant::VACUUM, ops, basis.n_spatial())? else {
                continue;
            };
            let idx = basis
                .index_of(&det)
                .ok_or_else(|| Error::domain(format!("term produces {det:?} outside the sector")))?;
            coeffs[idx] += amp * phase;
        }
        Self::new(basis, coeffs)
    }

    /// Slater determinant built from orbital columns: `Π_k (Σ_p U_pk c†_p↑) Π_k (Σ_p V_pk c†_p↓) |0⟩`.
    /// Columns must be orthonormal.
    pub fn slater(basis: Arc<SectorBasis>, up: &DMatrix<f64>, down: &DMatrix<f64>) -> Result<Self> {
        let n = basis.n_spatial();
        for (m, count, label) in [(up, basis.n_up(), "up"), (down, basis.n_down(), "down")] {
            if m.nrows() != n || m.ncols() != count {
                return Err(Error::domain(format!(
                    "{label} orbitals must be {n}x{count}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            let gram = m.transpose() * m;
            if (gram - DMatrix::identity(count, count)).amax() > 1e-10 {
                return Err(Error::domain(format!("{label} orbitals are not orthonormal")));
            }
        }
        let minors = |m: &DMatrix<f64>, strings: &[u64]| -> Vec<f64> {
            strings
                .iter()
                .map(|&s| m.select_rows(bit_positions(s).iter()).determinant())
                .collect()
        };
        let a = minors(up, basis.up_strings());
        let b = minors(down, basis.down_strings());
        let coeffs = a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect();
        Self::new(basis, coeffs)
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn energy(&self) -> Option<f64> {
        self.energy
    }

    pub fn with_energy(mut self, energy: f64) -> Self {
        self.energy = Some(energy);
        self
    }

    /// `Γ` as an `n_up_strings × n_down_strings` matrix.
    pub fn gamma(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.basis.n_up_strings(), self.basis.n_down_strings(), &self.coeffs)
    }

    pub fn overlap(&self, other: &WaveFunction) -> Result<f64> {
        if !self.basis.same_sector(&other.basis) {
            return Err(Error::domain("overlap between different sectors"));
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a * b).sum())
    }
}

/// A probability mixture of states from one sector, weights descending.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, WaveFunction)>,
    beta: Option<f64>,
    raw_weights: Vec<f64>,
    entropy_p: f64,
    entropy_q: f64,
}

impl Ensemble {
    /// Mixture with the given non-negative weights, renormalized to sum to one.
    pub fn from_weights(members: Vec<(f64, WaveFunction)>) -> Result<Self> {
        let raw: Vec<f64> = members.iter().map(|(w, _)| *w).collect();
        Self::assemble(members, raw, None)
    }

    fn assemble(mut members: Vec<(f64, WaveFunction)>, mut raw: Vec<f64>, beta: Option<f64>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(Error::domain("an ensemble needs at least one member"));
        };
        let basis = first.basis().clone();
        if members.iter().any(|(_, wf)| !wf.basis().same_sector(&basis)) {
            return Err(Error::domain("ensemble members belong to different sectors"));
        }
        if members.iter().any(|(w, _)| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::domain("ensemble weights must be finite and non-negative"));
        }
        let total: f64 = members.iter().map(|(w, _)| w).sum();
        if total <= 0.0 {
            return Err(Error::domain("ensemble weights sum to zero"));
        }
        let mut order: Vec<usize> = (0..members.len()).collect();
        order.sort_by(|&a, &b| members[b].0.total_cmp(&members[a].0));
        let mut slots: Vec<Option<(f64, WaveFunction)>> = members.drain(..).map(Some).collect();
        let members: Vec<(f64, WaveFunction)> = order
            .iter()
            .map(|&k| {
                let (w, wf) = slots[k].take().expect("each index once");
                (w / total, wf)
            })
            .collect();
        raw = order.iter().map(|&k| raw[k]).collect();
        let p: Vec<f64> = members.iter().map(|(w, _)| *w).collect();
        Ok(Ensemble {
            entropy_p: entropy(&p)?,
            entropy_q: entropy(&raw)?,
            members,
            beta,
            raw_weights: raw,
        })
    }

    pub fn members(&self) -> &[(f64, WaveFunction)] {
        &self.members
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn raw_weights(&self) -> &[f64] {
        &self.raw_weights
    }

    /// Shannon entropy (bits) of the normalized weights.
    pub fn entropy_p(&self) -> f64 {
        self.entropy_p
    }

    /// `-Σ q log₂ q` of the unnormalized Boltzmann factors.
    pub fn entropy_q(&self) -> f64 {
        self.entropy_q
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        self.members[0].1.basis()
    }
}

#[derive(Debug, Clone)]
pub enum State {
    Pure(WaveFunction),
    Mixed(Ensemble),
}

impl State {
    pub fn basis(&self) -> &Arc<SectorBasis> {
        match self {
            State::Pure(wf) => wf.basis(),
            State::Mixed(e) => e.basis(),
        }
    }

    pub fn is_pure(&self) -> bool {
        matches!(self, State::Pure(_))
    }

    /// `(weight, member)` pairs; a pure state is a single member of weight one.
    pub fn components(&self) -> Vec<(f64, &WaveFunction)> {
        match self {
            State::Pure(wf) => vec![(1.0, wf)],
            State::Mixed(e) => e.members().iter().map(|(w, wf)| (*w, wf)).collect(),
        }
    }
}

impl From<WaveFunction> for State {
    fn from(wf: WaveFunction) -> Self {
        State::Pure(wf)
    }
}

impl From<Ensemble> for State {
    fn from(e: Ensemble) -> Self {
        State::Mixed(e)
    }
}

/// `⟨b|H|a⟩` without the core energy.
pub fn hamiltonian_element(a: &Determinant, b: &Determinant, t: &IntegralTable) -> Result<f64> {
    let exc = excitation_info(a, b)?;
    let Some((up, down)) = &exc.moves else {
        return Ok(0.0);
    };
    let occ_up = bit_positions(a.up);
    let occ_down = bit_positions(a.down);
    match exc.degree {
        0 => {
            let mut e = 0.0;
            for occ in [&occ_up, &occ_down] {
                for (x, &i) in occ.iter().enumerate() {
                    e += t.h(i, i);
                    for &j in &occ[..x] {
                        e += t.eri(i, i, j, j) - t.eri(i, j, j, i);
                    }
                }
            }
            for &i in &occ_up {
                for &j in &occ_down {
                    e += t.eri(i, i, j, j);
                }
            }
            Ok(e)
        }
        1 => {
            let (moves, same, other) = if up.holes.is_empty() {
                (down, &occ_down, &occ_up)
            } else {
                (up, &occ_up, &occ_down)
            };
            let (h, p) = (moves.holes[0], moves.particles[0]);
            let mut v = t.h(p, h);
            for &j in same {
                v += t.eri(p, h, j, j) - t.eri(p, j, j, h);
            }
            for &j in other {
                v += t.eri(p, h, j, j);
            }
            Ok(exc.phase * v)
        }
        _ => {
            let v = match (up.holes.len(), down.holes.len()) {
                (1, 1) => t.eri(up.particles[0], up.holes[0], down.particles[0], down.holes[0]),
                _ => {
                    let m = if up.holes.len() == 2 { up } else { down };
                    let (h1, h2, p1, p2) = (m.holes[0], m.holes[1], m.particles[0], m.particles[1]);
                    t.eri(p1, h1, p2, h2) - t.eri(p1, h2, p2, h1)
                }
            };
            Ok(exc.phase * v)
        }
    }
}

/// Dense sector Hamiltonian with `e_core` on the diagonal.
pub fn build_hamiltonian(basis: &SectorBasis, t: &IntegralTable, dense_limit: usize) -> Result<DMatrix<f64>> {
    if t.n_spatial() != basis.n_spatial() {
        return Err(Error::domain(format!(
            "integral table has {} orbitals, basis has {}",
            t.n_spatial(),
            basis.n_spatial()
        )));
    }
    let dim = basis.dim();
    if dim > dense_limit {
        return Err(Error::Capacity {
            what: "sector Hamiltonian",
            dim,
            limit: dense_limit,
        });
    }
    let dets: Vec<Determinant> = basis.determinants().collect();
    let mut h = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        h[(i, i)] = hamiltonian_element(&dets[i], &dets[i], t)? + t.e_core;
        for j in 0..i {
            let v = hamiltonian_element(&dets[j], &dets[i], t)?;
            h[(i, j)] = v;
            h[(j, i)] = v;
        }
    }
    Ok(h)
}

/// Eigenvalues ascending; eigenvectors as columns with their largest entry positive.
#[derive(Debug, Clone)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigenpairs {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The `k`-th eigenstate as a wavefunction carrying its energy.
    pub fn state(&self, basis: &Arc<SectorBasis>, k: usize) -> Result<WaveFunction> {
        if k >= self.len() {
            return Err(Error::domain(format!(
                "eigenstate {k} requested, only {} available",
                self.len()
            )));
        }
        let coeffs = self.vectors.column(k).iter().copied().collect();
        Ok(WaveFunction::normalized(basis.clone(), coeffs)?.with_energy(self.values[k]))
    }
}

pub fn eigensolve(h: &DMatrix<f64>) -> Result<Eigenpairs> {
    let (values, mut vectors) = linalg::eigh(h)?;
    linalg::fix_column_signs(&mut vectors);
    Ok(Eigenpairs { values, vectors })
}

/// Boltzmann mixture `p_n ∝ exp(-β(E_n - E_0))` of the given eigenstates.
/// `beta = ∞` keeps only the states degenerate with `E_0`.
pub fn thermal_ensemble(
    eigen: &Eigenpairs,
    basis: &Arc<SectorBasis>,
    beta: f64,
    weight_cutoff: f64,
) -> Result<Ensemble> {
    if eigen.is_empty() {
        return Err(Error::domain("thermal ensemble from an empty spectrum"));
    }
    if beta.is_nan() || beta <= 0.0 {
        return Err(Error::domain(format!("beta must be positive, got {beta}")));
    }
    let e0 = eigen.values[0];
    let q: Vec<f64> = eigen
        .values
        .iter()
        .map(|&e| {
            let gap = e - e0;
            if gap <= 0.0 {
                1.0
            } else {
                (-beta * gap).exp()
            }
        })
        .collect();
    let z: f64 = q.iter().sum();
    let kept: Vec<usize> = (0..q.len()).filter(|&k| q[k] / z >= weight_cutoff).collect();
    let members = kept
        .iter()
        .map(|&k| Ok((q[k], eigen.state(basis, k)?)))
        .collect::<Result<Vec<_>>>()?;
    let raw = kept.iter().map(|&k| q[k]).collect();
    Ensemble::assemble(members, raw, Some(beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::enumerate_sector;
    use crate::integrals::{model_table, ModelKind};

    fn basis(n: usize, a: usize, b: usize) -> Arc<SectorBasis> {
        Arc::new(enumerate_sector(n, a, b).unwrap())
    }

    #[test]
    fn degree_three_is_zero() {
        let t = model_table(ModelKind::RandomSymmetric, 6, 3);
        let a = Determinant::from_orbitals(&[0, 1, 2], &[]);
        let b = Determinant::from_orbitals(&[3, 4, 5], &[]);
        assert_eq!(hamiltonian_element(&a, &b, &t).unwrap(), 0.0);
    }

    #[test]
    fn sector_mismatch() {
        let t = model_table(ModelKind::RandomSymmetric, 4, 3);
        let a = Determinant::from_orbitals(&[0], &[1]);
        let b = Determinant::from_orbitals(&[0, 1], &[]);
        assert!(matches!(hamiltonian_element(&a, &b, &t), Err(Error::Domain(_))));
    }

    #[test]
    fn noninteracting_diagonal() {
        let t = model_table(ModelKind::Diagonal, 4, 0);
        let d = Determinant::from_orbitals(&[0, 1], &[0, 1]);
        assert_eq!(hamiltonian_element(&d, &d, &t).unwrap(), 2.0 * (0.0 + 1.0));
    }

    #[test]
    fn empty_sector_is_core_energy() {
        let mut t = IntegralTable::zeros(3, 0, 0).unwrap();
        t.e_core = 1.25;
        let h = build_hamiltonian(&basis(3, 0, 0), &t, DEFAULT_DENSE_LIMIT).unwrap();
        assert_eq!(h.shape(), (1, 1));
        assert_eq!(h[(0, 0)], 1.25);
    }

    #[test]
    fn capacity_and_shape_errors() {
        let t = model_table(ModelKind::RandomSymmetric, 4, 1);
        let err = build_hamiltonian(&basis(4, 2, 2), &t, 10).unwrap_err();
        assert!(matches!(err, Error::Capacity { dim: 36, limit: 10, .. }));
        assert!(matches!(
            build_hamiltonian(&basis(5, 2, 2), &t, DEFAULT_DENSE_LIMIT),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn built_symmetric_and_variational() {
        let t = model_table(ModelKind::RandomSymmetric, 5, 11);
        let b = basis(5, 2, 3);
        let h = build_hamiltonian(&b, &t, DEFAULT_DENSE_LIMIT).unwrap();
        assert_eq!(linalg::max_asymmetry(&h), 0.0);
        let eig = eigensolve(&h).unwrap();
        let min_diag = (0..b.dim()).map(|i| h[(i, i)]).fold(f64::INFINITY, f64::min);
        assert!(eig.values[0] <= min_diag + 1e-12);
        let residual = &h * &eig.vectors - &eig.vectors * DMatrix::from_diagonal(&eig.values.clone().into());
        assert!(residual.amax() < 1e-9);
        let gram = eig.vectors.transpose() * &eig.vectors;
        assert!((gram - DMatrix::identity(b.dim(), b.dim())).amax() < 1e-10);
    }

    #[test]
    fn hubbard_dimer_ground_state() {
        // two sites, one electron of each spin: E0 = U/2 - sqrt(U²/4 + 4t²)
        let t = model_table(
            ModelKind::HubbardLike {
                hopping: 1.0,
                onsite: 4.0,
            },
            2,
            0,
        );
        let h = build_hamiltonian(&basis(2, 1, 1), &t, DEFAULT_DENSE_LIMIT).unwrap();
        let e0 = eigensolve(&h).unwrap().values[0];
        assert!((e0 - (2.0 - 8.0_f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn diagonal_matrix_eigensolve() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -1.0, 0.5]));
        let eig = eigensolve(&h).unwrap();
        assert_eq!(eig.values, vec![-1.0, 0.5, 2.0]);
        assert_eq!(eig.vectors[(1, 0)], 1.0);
        assert_eq!(eig.vectors[(2, 1)], 1.0);
        assert_eq!(eig.vectors[(0, 2)], 1.0);
    }

    #[test]
    fn wavefunction_validation() {
        let b = basis(3, 1, 1);
        assert!(WaveFunction::new(b.clone(), vec![1.0; 3]).is_err());
        assert!(WaveFunction::new(b.clone(), vec![0.5; 9]).is_err());
        assert!(WaveFunction::normalized(b.clone(), vec![0.0; 9]).is_err());
        let wf = WaveFunction::normalized(b, vec![1.0; 9]).unwrap();
        assert!((wf.coeffs()[4] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn from_terms_rejects_foreign_sector() {
        let b = basis(3, 1, 1);
        let terms = vec![(1.0, vec![Op::up(0), Op::up(1)])];
        assert!(matches!(WaveFunction::from_terms(b, &terms), Err(Error::Domain(_))));
    }

    #[test]
    fn slater_matches_operator_expansion() {
        // rotated orbitals: (c0 + c1)/√2 and (c0 - c1)/√2 for ↑, c2 for ↓
        let b = basis(3, 2, 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let up = DMatrix::from_row_slice(3, 2, &[s, s, s, -s, 0.0, 0.0]);
        let down = DMatrix::from_row_slice(3, 1, &[0.0, 0.0, 1.0]);
        let wf = WaveFunction::slater(b.clone(), &up, &down).unwrap();
        let mut terms = Vec::new();
        for (a, p) in [(s, 0), (s, 1)] {
            for (c, q) in [(s, 0), (-s, 1)] {
                terms.push((a * c, vec![Op::up(p), Op::up(q), Op::down(2)]));
            }
        }
        let expanded = WaveFunction::from_terms(b, &terms).unwrap();
        for (x, y) in wf.coeffs().iter().zip(expanded.coeffs()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn thermal_weights() {
        let b = basis(1, 0, 0);
        let eig = Eigenpairs {
            values: vec![0.0],
            vectors: DMatrix::identity(1, 1),
        };
        let ens = thermal_ensemble(&eig, &b, f64::INFINITY, DEFAULT_WEIGHT_CUTOFF).unwrap();
        assert_eq!(ens.members().len(), 1);
        assert_eq!(ens.entropy_p(), 0.0);
        assert!(thermal_ensemble(&eig, &b, 0.0, 1e-12).is_err());
        let empty = Eigenpairs {
            values: vec![],
            vectors: DMatrix::zeros(1, 0),
        };
        assert!(matches!(
            thermal_ensemble(&empty, &b, 1.0, 1e-12),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn thermal_drops_far_states_and_sorts() {
        let b = basis(2, 1, 0);
        // the third state sits far above and must be dropped
        let padded = Eigenpairs {
            values: vec![-1.0, -1.0 + 1e-3, 0.0],
            vectors: DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]),
        };
        let ens = thermal_ensemble(&padded, &b, 1000.0, 1e-12).unwrap();
        assert_eq!(ens.members().len(), 2);
        let p0 = 1.0 / (1.0 + (-1.0_f64).exp());
        assert!((ens.members()[0].0 - p0).abs() < 1e-14);
        assert!(ens.members()[0].0 >= ens.members()[1].0);
        assert_eq!(ens.beta(), Some(1000.0));
    }
}
