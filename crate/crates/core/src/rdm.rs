//! Reduced density matrices: the total ↑/↓ densities, the spin-blocked one-body
//! matrix and the three blocks of the two-body matrix.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{bit_positions, single_move_phase, Determinant, Op, SectorBasis};
use crate::solver::{State, WaveFunction};

/// `ρ↑ = Σ p Γ Γᵀ` and `ρ↓ = Σ p Γᵀ Γ`.
#[derive(Debug, Clone)]
pub struct UpDownDensity {
    pub rho_up: DMatrix<f64>,
    pub rho_down: DMatrix<f64>,
}

pub fn updown_densities(state: &State) -> UpDownDensity {
    let b = state.basis();
    let mut rho_up = DMatrix::zeros(b.n_up_strings(), b.n_up_strings());
    let mut rho_down = DMatrix::zeros(b.n_down_strings(), b.n_down_strings());
    for (w, wf) in state.components() {
        let g = wf.gamma();
        rho_up += w * &g * g.transpose();
        rho_down += w * g.transpose() * &g;
    }
    UpDownDensity { rho_up, rho_down }
}

/// Spin-blocked one-body density, `up[(i, j)] = ⟨c†_j↑ c_i↑⟩`.
#[derive(Debug, Clone)]
pub struct Rdm1 {
    pub up: DMatrix<f64>,
    pub down: DMatrix<f64>,
}

/// One hop `c†_to c_from` inside one spin block: `strings[target] = sign · c†_to c_from strings[source]`.
#[derive(Debug, Clone, Copy)]
struct Hop {
    from: usize,
    to: usize,
    target: usize,
    sign: f64,
}

/// All number-conserving single hops (including `from == to`) out of every string.
fn hops(strings: &[u64], n: usize, index: impl Fn(u64) -> Option<usize>) -> Vec<Vec<Hop>> {
    strings
        .iter()
        .map(|&s| {
            let mut out = Vec::new();
            for from in bit_positions(s) {
                let rest = s & !(1u64 << from);
                for to in 0..n {
                    if to != from && rest & (1u64 << to) != 0 {
                        continue;
                    }
                    let sign = if to == from {
                        1.0
                    } else {
                        single_move_phase(s, from, to)
                    };
                    let target = index(rest | (1u64 << to)).expect("hop stays in the sector");
                    out.push(Hop { from, to, target, sign });
                }
            }
            out
        })
        .collect()
}

fn block_one_body(rho: &DMatrix<f64>, hops: &[Vec<Hop>], n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n, n);
    for (a, list) in hops.iter().enumerate() {
        for hop in list {
            out[(hop.from, hop.to)] += hop.sign * rho[(hop.target, a)];
        }
    }
    out
}

fn up_hops(b: &SectorBasis) -> Vec<Vec<Hop>> {
    hops(b.up_strings(), b.n_spatial(), |s| b.up_index(s))
}

fn down_hops(b: &SectorBasis) -> Vec<Vec<Hop>> {
    hops(b.down_strings(), b.n_spatial(), |s| b.down_index(s))
}

pub fn one_body(state: &State) -> Rdm1 {
    let d = updown_densities(state);
    one_body_from(state.basis(), &d)
}

pub fn one_body_from(b: &SectorBasis, d: &UpDownDensity) -> Rdm1 {
    let n = b.n_spatial();
    Rdm1 {
        up: block_one_body(&d.rho_up, &up_hops(b), n),
        down: block_one_body(&d.rho_down, &down_hops(b), n),
    }
}

/// Restricted pair labels `(i, j)` with `i < j`, in lexicographic order.
pub fn pair_labels(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// Two-body density blocks.
///
/// `upup[(ij), (kl)] = ⟨c†_k c†_l c_j c_i⟩` over restricted labels `i < j`, `k < l`;
/// `updown[(i n + j), (k n + l)] = ⟨c†_k c†_l̄ c_j̄ c_i⟩` over all `n²` labels.
#[derive(Debug, Clone)]
pub struct Rdm2 {
    pub n_spatial: usize,
    pub n_up: usize,
    pub n_down: usize,
    pub upup: DMatrix<f64>,
    pub downdown: DMatrix<f64>,
    pub updown: DMatrix<f64>,
}

fn same_spin_block(
    rho: &DMatrix<f64>,
    strings: &[u64],
    n: usize,
    index: impl Fn(u64) -> Option<usize>,
) -> DMatrix<f64> {
    let labels = pair_labels(n);
    let mut out = DMatrix::zeros(labels.len(), labels.len());
    for (a, &s) in strings.iter().enumerate() {
        let det = Determinant::new(s, 0);
        let occ = bit_positions(s);
        for (x, &i) in occ.iter().enumerate() {
            for &j in &occ[x + 1..] {
                let Some((s1, mid)) = det.apply(Op::annihilate(i, crate::Spin::Up)) else {
                    continue;
                };
                let Some((s2, mid)) = mid.apply(Op::annihilate(j, crate::Spin::Up)) else {
                    continue;
                };
                for &(k, l) in &labels {
                    let Some((s3, fin)) = mid.apply(Op::up(l)) else {
                        continue;
                    };
                    let Some((s4, fin)) = fin.apply(Op::up(k)) else {
                        continue;
                    };
                    let target = index(fin.up).expect("pair hop stays in the sector");
                    out[(pair_index(n, i, j), pair_index(n, k, l))] += s1 * s2 * s3 * s4 * rho[(target, a)];
                }
            }
        }
    }
    out
}

fn updown_block(state: &State, up: &[Vec<Hop>], down: &[Vec<Hop>], n: usize) -> DMatrix<f64> {
    let b = state.basis();
    let nd = b.n_down_strings();
    let mut out = DMatrix::zeros(n * n, n * n);
    for (w, wf) in state.components() {
        let c = wf.coeffs();
        for (a, up_list) in up.iter().enumerate() {
            for (bb, down_list) in down.iter().enumerate() {
                let ket = w * c[a * nd + bb];
                if ket == 0.0 {
                    continue;
                }
                for hu in up_list {
                    for hd in down_list {
                        let bra = c[hu.target * nd + hd.target];
                        out[(hu.from * n + hd.from, hu.to * n + hd.to)] += hu.sign * hd.sign * bra * ket;
                    }
                }
            }
        }
    }
    out
}

pub fn two_body(state: &State) -> Rdm2 {
    let d = updown_densities(state);
    two_body_from(state, &d)
}

pub fn two_body_from(state: &State, d: &UpDownDensity) -> Rdm2 {
    let b = state.basis();
    let n = b.n_spatial();
    Rdm2 {
        n_spatial: n,
        n_up: b.n_up(),
        n_down: b.n_down(),
        upup: same_spin_block(&d.rho_up, b.up_strings(), n, |s| b.up_index(s)),
        downdown: same_spin_block(&d.rho_down, b.down_strings(), n, |s| b.down_index(s)),
        updown: updown_block(state, &up_hops(b), &down_hops(b), n),
    }
}

fn expand_antisymmetric(restricted: &DMatrix<f64>, n: usize, out: &mut DMatrix<f64>, dim: usize, offset: usize) {
    let labels = pair_labels(n);
    for (x, &(i, j)) in labels.iter().enumerate() {
        for (y, &(k, l)) in labels.iter().enumerate() {
            let v = restricted[(x, y)];
            let (i, j, k, l) = (i + offset, j + offset, k + offset, l + offset);
            out[(i * dim + j, k * dim + l)] = v;
            out[(j * dim + i, k * dim + l)] = -v;
            out[(i * dim + j, l * dim + k)] = -v;
            out[(j * dim + i, l * dim + k)] = v;
        }
    }
}

impl Rdm2 {
    /// `upup` over unrestricted labels `(i n + j)`, antisymmetric in each pair.
    /// Its trace is `N↑(N↑ - 1)`.
    pub fn upup_unrestricted(&self) -> DMatrix<f64> {
        let n = self.n_spatial;
        let mut out = DMatrix::zeros(n * n, n * n);
        expand_antisymmetric(&self.upup, n, &mut out, n, 0);
        out
    }

    pub fn downdown_unrestricted(&self) -> DMatrix<f64> {
        let n = self.n_spatial;
        let mut out = DMatrix::zeros(n * n, n * n);
        expand_antisymmetric(&self.downdown, n, &mut out, n, 0);
        out
    }

    /// The full two-body matrix over spin-orbital modes (↑k → k, ↓k → n + k),
    /// unrestricted and antisymmetric. Its trace is `N(N - 1)`.
    pub fn spin_orbital_unrestricted(&self) -> DMatrix<f64> {
        let n = self.n_spatial;
        let m = 2 * n;
        let mut out = DMatrix::zeros(m * m, m * m);
        expand_antisymmetric(&self.upup, n, &mut out, m, 0);
        expand_antisymmetric(&self.downdown, n, &mut out, m, n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let v = self.updown[(i * n + j, k * n + l)];
                        let (ib, jb, kb, lb) = (i, n + j, k, n + l);
                        out[(ib * m + jb, kb * m + lb)] = v;
                        out[(jb * m + ib, kb * m + lb)] = -v;
                        out[(ib * m + jb, lb * m + kb)] = -v;
                        out[(jb * m + ib, lb * m + kb)] = v;
                    }
                }
            }
        }
        out
    }

    /// `Tr↓ updown / N↓` and `Tr↑ updown / N↑`; `None` for an empty species.
    pub fn partial_traces(&self) -> (Option<DMatrix<f64>>, Option<DMatrix<f64>>) {
        let n = self.n_spatial;
        let up = (self.n_down > 0).then(|| {
            DMatrix::from_fn(n, n, |i, k| {
                (0..n).map(|j| self.updown[(i * n + j, k * n + j)]).sum::<f64>() / self.n_down as f64
            })
        });
        let down = (self.n_up > 0).then(|| {
            DMatrix::from_fn(n, n, |j, l| {
                (0..n).map(|i| self.updown[(i * n + j, i * n + l)]).sum::<f64>() / self.n_up as f64
            })
        });
        (up, down)
    }
}

/// The full sector density `ρ = Σ p |Ψ⟩⟨Ψ|` and its partial transpose on the ↓ factor,
/// `ρ^{t↓}[(α β), (α' β')] = ρ[(α β'), (α' β)]`.
pub fn full_density_and_pt(state: &State, dense_limit: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let rho = full_density(state, dense_limit)?;
    let b = state.basis();
    let nd = b.n_down_strings();
    let dim = b.dim();
    let pt = DMatrix::from_fn(dim, dim, |r, c| {
        let (a, bb) = (r / nd, r % nd);
        let (a2, b2) = (c / nd, c % nd);
        rho[(a * nd + b2, a2 * nd + bb)]
    });
    Ok((rho, pt))
}

pub fn full_density(state: &State, dense_limit: usize) -> Result<DMatrix<f64>> {
    let dim = state.basis().dim();
    if dim > dense_limit {
        return Err(Error::Capacity {
            what: "sector density matrix",
            dim,
            limit: dense_limit,
        });
    }
    let mut rho = DMatrix::zeros(dim, dim);
    for (w, wf) in state.components() {
        let v = nalgebra::DVector::from_column_slice(wf.coeffs());
        rho.ger(w, &v, &v, 1.0);
    }
    Ok(rho)
}

/// Eigenvalues of a density-like matrix, descending, with tiny negatives set to zero.
pub fn clamped_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let mut values = crate::linalg::eigvalsh(m)?;
    for v in values.iter_mut() {
        if *v < -1e-9 {
            return Err(Error::Numerical(format!("density matrix has eigenvalue {v}")));
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    values.reverse();
    Ok(values)
}

/// Eigenvalues of `ρ↑` for a pure state, which are the squared Schmidt coefficients.
pub fn pure_up_spectrum(wf: &WaveFunction) -> Result<Vec<f64>> {
    let g = wf.gamma();
    clamped_spectrum(&(&g * g.transpose()))
}
