//! Slater determinants as spin-resolved bitsets and fermionic operator algebra.
//!
//! Spin orbitals are ordered with the whole ↑ block first, each block in ascending
//! spatial index. A determinant with ↑ occupations `α` and ↓ occupations `β` is
//!
//! ```text
//! |αβ̄⟩ = c†_{α1} c†_{α2} … c†_{β̄1} c†_{β̄2} … |0⟩      (α1 < α2 < …, β1 < β2 < …)
//! ```
//!
//! so acting with `c_k` or `c†_k` on ↑ orbital `k` costs `(-1)^(#occupied ↑ below k)`,
//! and on ↓ orbital `k` costs `(-1)^(N↑) · (-1)^(#occupied ↓ below k)`.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest supported number of spatial orbitals (one `u64` per spin block).
pub const MAX_SPATIAL: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Spin {
    Up,
    Down,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpKind {
    Create,
    Annihilate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Op {
    pub kind: OpKind,
    pub orbital: usize,
    pub spin: Spin,
}

impl Op {
    pub fn create(orbital: usize, spin: Spin) -> Self {
        Op {
            kind: OpKind::Create,
            orbital,
            spin,
        }
    }

    pub fn annihilate(orbital: usize, spin: Spin) -> Self {
        Op {
            kind: OpKind::Annihilate,
            orbital,
            spin,
        }
    }

    pub fn up(orbital: usize) -> Self {
        Self::create(orbital, Spin::Up)
    }

    pub fn down(orbital: usize) -> Self {
        Self::create(orbital, Spin::Down)
    }
}

#[inline]
fn below(bits: u64, k: usize) -> u64 {
    bits & ((1u64 << k) - 1)
}

#[inline]
fn parity(count: u32) -> f64 {
    if count.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Determinant {
    pub up: u64,
    pub down: u64,
}

impl Determinant {
    pub const VACUUM: Determinant = Determinant { up: 0, down: 0 };

    pub fn new(up: u64, down: u64) -> Self {
        Determinant { up, down }
    }

    pub fn from_orbitals(up: &[usize], down: &[usize]) -> Self {
        Determinant {
            up: up.iter().fold(0, |acc, &k| acc | (1u64 << k)),
            down: down.iter().fold(0, |acc, &k| acc | (1u64 << k)),
        }
    }

    pub fn n_up(&self) -> usize {
        self.up.count_ones() as usize
    }

    pub fn n_down(&self) -> usize {
        self.down.count_ones() as usize
    }

    pub fn occupied(&self, spin: Spin) -> Vec<usize> {
        bit_positions(self.block(spin))
    }

    pub fn block(&self, spin: Spin) -> u64 {
        match spin {
            Spin::Up => self.up,
            Spin::Down => self.down,
        }
    }

    pub fn is_occupied(&self, orbital: usize, spin: Spin) -> bool {
        self.block(spin) >> orbital & 1 == 1
    }

    /// Creation string that builds this determinant from the vacuum with phase +1.
    pub fn creation_ops(&self) -> Vec<Op> {
        bit_positions(self.up)
            .into_iter()
            .map(Op::up)
            .chain(bit_positions(self.down).into_iter().map(Op::down))
            .collect()
    }

    /// Applies one operator without range checks.
    #[inline]
    pub fn apply(self, op: Op) -> Option<(f64, Determinant)> {
        let k = op.orbital;
        let bit = 1u64 << k;
        let (block, prefix) = match op.spin {
            Spin::Up => (self.up, 0),
            Spin::Down => (self.down, self.up.count_ones()),
        };
        let occupied = block & bit != 0;
        let new_block = match op.kind {
            OpKind::Create if !occupied => block | bit,
            OpKind::Annihilate if occupied => block & !bit,
            _ => return None,
        };
        let sign = parity(prefix + below(block, k).count_ones());
        let det = match op.spin {
            Spin::Up => Determinant {
                up: new_block,
                down: self.down,
            },
            Spin::Down => Determinant {
                up: self.up,
                down: new_block,
            },
        };
        Some((sign, det))
    }
}

pub(crate) fn bit_positions(mut bits: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(bits.count_ones() as usize);
    while bits != 0 {
        out.push(bits.trailing_zeros() as usize);
        bits &= bits - 1;
    }
    out
}

/// Applies an operator product as written: the rightmost operator acts first.
///
/// Returns `None` when the product annihilates the determinant.
pub fn apply_ops(det: Determinant, ops: &[Op], n_spatial: usize) -> Result<Option<(f64, Determinant)>> {
    if let Some(bad) = ops.iter().find(|op| op.orbital >= n_spatial) {
        return Err(Error::domain(format!(
            "orbital {} out of range for {n_spatial} spatial orbitals",
            bad.orbital
        )));
    }
    let mut phase = 1.0;
    let mut current = det;
    for &op in ops.iter().rev() {
        match current.apply(op) {
            Some((s, next)) => {
                phase *= s;
                current = next;
            }
            None => return Ok(None),
        }
    }
    Ok(Some((phase, current)))
}

/// Binomial coefficients up to `MAX_SPATIAL`.
pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

/// All bitsets of `count` ones below bit `n`, in ascending integer order.
fn strings(n: usize, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(binomial(n, count));
    if count == 0 {
        out.push(0);
        return out;
    }
    let limit = 1u64 << n;
    let mut v: u64 = (1u64 << count) - 1;
    while v < limit {
        out.push(v);
        // Gosper's hack: next integer with the same popcount.
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    out
}

/// The fixed-(N↑, N↓) determinant basis.
///
/// ↑ and ↓ strings are each listed in ascending integer order of their bitsets, and
/// the global index is `up_index * n_down_strings + down_index`, which is the
/// row-major layout of the coefficient tensor `Γ_αβ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SectorBasis {
    n_spatial: usize,
    n_up: usize,
    n_down: usize,
    up_strings: Vec<u64>,
    down_strings: Vec<u64>,
    binom: Vec<Vec<usize>>,
}

/// Enumerates the (n_up, n_down) sector over `n_spatial` orbitals.
pub fn enumerate_sector(n_spatial: usize, n_up: usize, n_down: usize) -> Result<SectorBasis> {
    if n_spatial > MAX_SPATIAL {
        return Err(Error::domain(format!(
            "{n_spatial} spatial orbitals exceed the supported {MAX_SPATIAL}"
        )));
    }
    if n_up > n_spatial || n_down > n_spatial {
        return Err(Error::domain(format!(
            "occupancy ({n_up}, {n_down}) exceeds {n_spatial} spatial orbitals"
        )));
    }
    let binom = (0..=n_spatial)
        .map(|n| (0..=n_spatial).map(|k| binomial(n, k)).collect())
        .collect();
    Ok(SectorBasis {
        n_spatial,
        n_up,
        n_down,
        up_strings: strings(n_spatial, n_up),
        down_strings: strings(n_spatial, n_down),
        binom,
    })
}

impl SectorBasis {
    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    pub fn n_electrons(&self) -> usize {
        self.n_up + self.n_down
    }

    pub fn up_strings(&self) -> &[u64] {
        &self.up_strings
    }

    pub fn down_strings(&self) -> &[u64] {
        &self.down_strings
    }

    pub fn n_up_strings(&self) -> usize {
        self.up_strings.len()
    }

    pub fn n_down_strings(&self) -> usize {
        self.down_strings.len()
    }

    pub fn dim(&self) -> usize {
        self.up_strings.len() * self.down_strings.len()
    }

    pub fn same_sector(&self, other: &SectorBasis) -> bool {
        self.n_spatial == other.n_spatial && self.n_up == other.n_up && self.n_down == other.n_down
    }

    /// Colex rank of a bitset among strings of the same popcount.
    fn rank(&self, bits: u64) -> usize {
        let mut rank = 0;
        let mut remaining = bits;
        let mut k = 1;
        while remaining != 0 {
            let pos = remaining.trailing_zeros() as usize;
            rank += self.binom[pos][k];
            remaining &= remaining - 1;
            k += 1;
        }
        rank
    }

    /// Position of an ↑ string, if it belongs to this sector.
    pub fn up_index(&self, bits: u64) -> Option<usize> {
        (bits.count_ones() as usize == self.n_up && bits >> self.n_spatial == 0).then(|| self.rank(bits))
    }

    pub fn down_index(&self, bits: u64) -> Option<usize> {
        (bits.count_ones() as usize == self.n_down && bits >> self.n_spatial == 0).then(|| self.rank(bits))
    }

    pub fn index_of(&self, det: &Determinant) -> Option<usize> {
        Some(self.up_index(det.up)? * self.down_strings.len() + self.down_index(det.down)?)
    }

    pub fn determinant(&self, index: usize) -> Determinant {
        let nd = self.down_strings.len();
        Determinant {
            up: self.up_strings[index / nd],
            down: self.down_strings[index % nd],
        }
    }

    pub fn determinants(&self) -> impl Iterator<Item = Determinant> + '_ {
        self.up_strings
            .iter()
            .flat_map(move |&up| self.down_strings.iter().map(move |&down| Determinant { up, down }))
    }

    pub fn contains(&self, det: &Determinant) -> bool {
        self.index_of(det).is_some()
    }
}

/// Particle–hole description of `b` relative to `a`, per spin block.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpinMoves {
    /// Orbitals occupied in `a` but not in `b`, ascending.
    pub holes: Vec<usize>,
    /// Orbitals occupied in `b` but not in `a`, ascending.
    pub particles: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Excitation {
    /// Half the Hamming distance, summed over both spin blocks.
    pub degree: usize,
    /// Set only for degree ≤ 2.
    pub moves: Option<(SpinMoves, SpinMoves)>,
    /// Phase `s` with `c†_{p1} c†_{p2} … c_{h2} c_{h1} |a⟩ = s |b⟩`, ↑ moves listed
    /// before ↓ moves. Zero when `degree > 2`.
    pub phase: f64,
}

/// Phase of `c†_p c_h` on a single spin block (`h` occupied, `p` empty).
#[inline]
pub(crate) fn single_move_phase(block: u64, hole: usize, particle: usize) -> f64 {
    let (lo, hi) = if hole < particle {
        (hole, particle)
    } else {
        (particle, hole)
    };
    let between = block & ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    parity(between.count_ones())
}

fn block_moves(a: u64, b: u64) -> (SpinMoves, f64) {
    let holes = bit_positions(a & !b);
    let particles = bit_positions(b & !a);
    let mut phase = 1.0;
    let mut block = a;
    for (&h, &p) in holes.iter().zip(&particles) {
        phase *= single_move_phase(block, h, p);
        block = (block & !(1u64 << h)) | (1u64 << p);
    }
    (SpinMoves { holes, particles }, phase)
}

/// Classifies the excitation connecting `a` to `b`.
pub fn excitation_info(a: &Determinant, b: &Determinant) -> Result<Excitation> {
    if a.n_up() != b.n_up() || a.n_down() != b.n_down() {
        return Err(Error::domain(format!(
            "determinants belong to different sectors ({}, {}) vs ({}, {})",
            a.n_up(),
            a.n_down(),
            b.n_up(),
            b.n_down()
        )));
    }
    let degree = ((a.up ^ b.up).count_ones() + (a.down ^ b.down).count_ones()) as usize / 2;
    if degree > 2 {
        return Ok(Excitation {
            degree,
            moves: None,
            phase: 0.0,
        });
    }
    let (up, up_phase) = block_moves(a.up, b.up);
    let (down, down_phase) = block_moves(a.down, b.down);
    Ok(Excitation {
        degree,
        moves: Some((up, down)),
        phase: up_phase * down_phase,
    })
}

impl Excitation {
    /// The operator product realizing the excitation, in written order.
    pub fn operator_string(&self) -> Option<Vec<Op>> {
        let (up, down) = self.moves.as_ref()?;
        let mut ops: Vec<Op> = up
            .particles
            .iter()
            .map(|&p| Op::create(p, Spin::Up))
            .chain(down.particles.iter().map(|&p| Op::create(p, Spin::Down)))
            .collect();
        let annihilators: Vec<Op> = up
            .holes
            .iter()
            .map(|&h| Op::annihilate(h, Spin::Up))
            .chain(down.holes.iter().map(|&h| Op::annihilate(h, Spin::Down)))
            .collect();
        ops.extend(annihilators.into_iter().rev());
        Some(ops)
    }
}
