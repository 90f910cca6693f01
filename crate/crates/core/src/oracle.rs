//! Brute-force reference paths. Every quantity here is computed by applying
//! operator strings term by term, with no excitation screening and no use of the
//! spin-block factorization, so it can cross-check the fast paths.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fock::{apply_ops, Determinant, Op, OpKind, Spin};
use crate::integrals::IntegralTable;
use crate::rdm::{pair_labels, Rdm1, Rdm2};
use crate::solver::{State, WaveFunction};

/// Largest sector the oracle will touch.
pub const ORACLE_LIMIT: usize = 5000;

const SPINS: [Spin; 2] = [Spin::Up, Spin::Down];

fn check_size(dim: usize) -> Result<()> {
    if dim > ORACLE_LIMIT {
        return Err(Error::Capacity {
            what: "oracle sector",
            dim,
            limit: ORACLE_LIMIT,
        });
    }
    Ok(())
}

fn op(kind: OpKind, orbital: usize, spin: Spin) -> Op {
    Op { kind, orbital, spin }
}

/// `H|ψ⟩` with every one- and two-body term applied to every determinant.
pub fn apply_hamiltonian_naive(wf: &WaveFunction, t: &IntegralTable) -> Result<Vec<f64>> {
    let b = wf.basis();
    check_size(b.dim())?;
    let n = b.n_spatial();
    let mut out: Vec<f64> = wf.coeffs().iter().map(|c| t.e_core * c).collect();
    let mut add = |ops: &[Op], amp: f64, det: Determinant, c: f64| -> Result<()> {
        if let Some((phase, target)) = apply_ops(det, ops, n)? {
            let idx = b.index_of(&target).expect("H conserves both spin counts");
            out[idx] += amp * phase * c;
        }
        Ok(())
    };
    for (k, det) in b.determinants().enumerate() {
        let c = wf.coeffs()[k];
        if c == 0.0 {
            continue;
        }
        for &s in &SPINS {
            for p in 0..n {
                for q in 0..n {
                    add(
                        &[op(OpKind::Create, p, s), op(OpKind::Annihilate, q, s)],
                        t.h(p, q),
                        det,
                        c,
                    )?;
                }
            }
        }
        for &s in &SPINS {
            for &u in &SPINS {
                for p in 0..n {
                    for q in 0..n {
                        for r in 0..n {
                            for x in 0..n {
                                let ops = [
                                    op(OpKind::Create, p, s),
                                    op(OpKind::Create, r, u),
                                    op(OpKind::Annihilate, x, u),
                                    op(OpKind::Annihilate, q, s),
                                ];
                                add(&ops, 0.5 * t.eri(p, q, r, x), det, c)?;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The dense Hamiltonian assembled column by column from [`apply_hamiltonian_naive`].
pub fn hamiltonian_naive(basis: &std::sync::Arc<crate::SectorBasis>, t: &IntegralTable) -> Result<DMatrix<f64>> {
    let dim = basis.dim();
    let mut h = DMatrix::zeros(dim, dim);
    for k in 0..dim {
        let mut e = vec![0.0; dim];
        e[k] = 1.0;
        let col = apply_hamiltonian_naive(&WaveFunction::new(basis.clone(), e)?, t)?;
        h.set_column(k, &nalgebra::DVector::from_vec(col));
    }
    Ok(h)
}

/// `⟨ψ|O|ψ⟩` summed over ensemble members.
pub fn expectation(state: &State, ops: &[Op]) -> Result<f64> {
    let b = state.basis();
    check_size(b.dim())?;
    let mut total = 0.0;
    for (w, wf) in state.components() {
        for (k, det) in b.determinants().enumerate() {
            let c = wf.coeffs()[k];
            if c == 0.0 {
                continue;
            }
            if let Some((phase, target)) = apply_ops(det, ops, b.n_spatial())? {
                if let Some(idx) = b.index_of(&target) {
                    total += w * c * phase * wf.coeffs()[idx];
                }
            }
        }
    }
    Ok(total)
}

pub fn rdm1_naive(state: &State) -> Result<Rdm1> {
    let n = state.basis().n_spatial();
    let block = |s: Spin| -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = expectation(state, &[op(OpKind::Create, j, s), op(OpKind::Annihilate, i, s)])?;
            }
        }
        Ok(m)
    };
    Ok(Rdm1 {
        up: block(Spin::Up)?,
        down: block(Spin::Down)?,
    })
}

pub fn rdm2_naive(state: &State) -> Result<Rdm2> {
    let b = state.basis();
    let n = b.n_spatial();
    let labels = pair_labels(n);
    let same = |s: Spin| -> Result<DMatrix<f64>> {
        let mut m = DMatrix::zeros(labels.len(), labels.len());
        for (x, &(i, j)) in labels.iter().enumerate() {
            for (y, &(k, l)) in labels.iter().enumerate() {
                let ops = [
                    op(OpKind::Create, k, s),
                    op(OpKind::Create, l, s),
                    op(OpKind::Annihilate, j, s),
                    op(OpKind::Annihilate, i, s),
                ];
                m[(x, y)] = expectation(state, &ops)?;
            }
        }
        Ok(m)
    };
    let mut updown = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let ops = [
                        Op::up(k),
                        Op::down(l),
                        Op::annihilate(j, Spin::Down),
                        Op::annihilate(i, Spin::Up),
                    ];
                    updown[(i * n + j, k * n + l)] = expectation(state, &ops)?;
                }
            }
        }
    }
    Ok(Rdm2 {
        n_spatial: n,
        n_up: b.n_up(),
        n_down: b.n_down(),
        upup: same(Spin::Up)?,
        downdown: same(Spin::Down)?,
        updown,
    })
}

/// `⟨S²⟩ = S_z² + S_z + ‖S₊ψ‖²` with `S₊ = Σ_p c†_p↑ c_p↓`.
pub fn s_squared(wf: &WaveFunction) -> Result<f64> {
    let b = wf.basis();
    let sz = (b.n_up() as f64 - b.n_down() as f64) / 2.0;
    let mut raised: HashMap<Determinant, f64> = HashMap::new();
    for (k, det) in b.determinants().enumerate() {
        let c = wf.coeffs()[k];
        if c == 0.0 {
            continue;
        }
        for p in 0..b.n_spatial() {
            if let Some((phase, target)) = apply_ops(det, &[Op::up(p), Op::annihilate(p, Spin::Down)], b.n_spatial())? {
                *raised.entry(target).or_insert(0.0) += phase * c;
            }
        }
    }
    let norm2: f64 = raised.values().map(|v| v * v).sum();
    Ok(sz * sz + sz + norm2)
}
