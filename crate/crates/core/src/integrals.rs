//! One- and two-electron integrals over real spatial orbitals.
//!
//! Conventions: two-electron integrals are chemists' notation `(pq|rs)`, and the
//! Hamiltonian they define is
//!
//! ```text
//! H = e_core + Σ_{pq,σ} h_pq c†_pσ c_qσ + ½ Σ_{pqrs,στ} (pq|rs) c†_pσ c†_rτ c_sτ c_qσ
//! ```
//!
//! The spin-orbital matrix elements are spin independent, `(pσ qσ|rτ sτ) = (pq|rs)`,
//! and the spin deltas are carried by the operators. Integrals in physicists'
//! ordering `<pr|qs>` equal `(pq|rs)` here.

use std::collections::HashMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Agreement threshold between symmetry partners before a duplicate line is reported.
const DUPLICATE_WARN_TOL: f64 = 1e-10;

#[inline]
fn pair_index(p: usize, q: usize) -> usize {
    let (a, b) = if p >= q { (p, q) } else { (q, p) };
    a * (a + 1) / 2 + b
}

/// Canonical compound index over `p≥q, r≥s, pq≥rs`.
#[inline]
fn eri_index(p: usize, q: usize, r: usize, s: usize) -> usize {
    let pq = pair_index(p, q);
    let rs = pair_index(r, s);
    pair_index(pq, rs)
}

fn eri_len(n: usize) -> usize {
    let npair = n * (n + 1) / 2;
    npair * (npair + 1) / 2
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralTable {
    n_spatial: usize,
    h: DMatrix<f64>,
    eri: Vec<f64>,
    pub e_core: f64,
    pub n_electrons: usize,
    pub ms2: i64,
}

impl IntegralTable {
    /// An all-zero table.
    pub fn zeros(n_spatial: usize, n_electrons: usize, ms2: i64) -> Result<Self> {
        if n_spatial == 0 {
            return Err(Error::domain("n_spatial must be at least 1"));
        }
        check_electrons(n_spatial, n_electrons, ms2)?;
        Ok(Self {
            n_spatial,
            h: DMatrix::zeros(n_spatial, n_spatial),
            eri: vec![0.0; eri_len(n_spatial)],
            e_core: 0.0,
            n_electrons,
            ms2,
        })
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    /// Number of spin orbitals.
    pub fn n_spin_orbitals(&self) -> usize {
        2 * self.n_spatial
    }

    pub fn h(&self, p: usize, q: usize) -> f64 {
        self.h[(p, q)]
    }

    pub fn one_body(&self) -> &DMatrix<f64> {
        &self.h
    }

    /// Sets `h_pq` and `h_qp`.
    pub fn set_h(&mut self, p: usize, q: usize, value: f64) {
        self.h[(p, q)] = value;
        self.h[(q, p)] = value;
    }

    /// `(pq|rs)` in chemists' notation.
    #[inline]
    pub fn eri(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.eri[eri_index(p, q, r, s)]
    }

    /// Sets `(pq|rs)` and, by construction, its seven symmetry partners.
    pub fn set_eri(&mut self, p: usize, q: usize, r: usize, s: usize, value: f64) {
        self.eri[eri_index(p, q, r, s)] = value;
    }

    /// Target (N↑, N↓) implied by `n_electrons` and `ms2`.
    pub fn sector(&self) -> Result<(usize, usize)> {
        let n = self.n_electrons as i64;
        if (n + self.ms2) % 2 != 0 || self.ms2.abs() > n {
            return Err(Error::domain(format!(
                "NELEC={} and MS2={} do not define a spin sector",
                self.n_electrons, self.ms2
            )));
        }
        let n_up = ((n + self.ms2) / 2) as usize;
        let n_down = ((n - self.ms2) / 2) as usize;
        if n_up > self.n_spatial || n_down > self.n_spatial {
            return Err(Error::domain(format!(
                "sector ({n_up}, {n_down}) does not fit in {} orbitals",
                self.n_spatial
            )));
        }
        Ok((n_up, n_down))
    }

    /// Replaces the electron count and spin projection.
    pub fn with_electrons(mut self, n_electrons: usize, ms2: i64) -> Result<Self> {
        check_electrons(self.n_spatial, n_electrons, ms2)?;
        self.n_electrons = n_electrons;
        self.ms2 = ms2;
        Ok(self)
    }

    /// Largest deviation from `h_pq = h_qp` and from the 8-fold `(pq|rs)` closure,
    /// scanned over every index quadruple.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n_spatial;
        let mut worst: f64 = 0.0;
        for p in 0..n {
            for q in 0..n {
                worst = worst.max((self.h(p, q) - self.h(q, p)).abs());
                for r in 0..n {
                    for s in 0..n {
                        let v = self.eri(p, q, r, s);
                        for w in [
                            self.eri(q, p, r, s),
                            self.eri(p, q, s, r),
                            self.eri(q, p, s, r),
                            self.eri(r, s, p, q),
                            self.eri(s, r, p, q),
                            self.eri(r, s, q, p),
                            self.eri(s, r, q, p),
                        ] {
                            worst = worst.max((v - w).abs());
                        }
                    }
                }
            }
        }
        worst
    }

    /// Serializes to FCIDUMP text. Only nonzero integrals are written; values use the
    /// shortest exactly-round-tripping representation.
    pub fn write_fcidump(&self) -> String {
        let n = self.n_spatial;
        let mut out = String::new();
        let _ = writeln!(out, " &FCI NORB={},NELEC={},MS2={},", n, self.n_electrons, self.ms2);
        out.push_str(" &END\n");
        for p in 0..n {
            for q in 0..=p {
                for r in 0..n {
                    for s in 0..=r {
                        if pair_index(p, q) < pair_index(r, s) {
                            continue;
                        }
                        let v = self.eri(p, q, r, s);
                        if v != 0.0 {
                            let _ = writeln!(out, "{:e} {} {} {} {}", v, p + 1, q + 1, r + 1, s + 1);
                        }
                    }
                }
            }
        }
        for p in 0..n {
            for q in 0..=p {
                let v = self.h(p, q);
                if v != 0.0 {
                    let _ = writeln!(out, "{:e} {} {} 0 0", v, p + 1, q + 1);
                }
            }
        }
        let _ = writeln!(out, "{:e} 0 0 0 0", self.e_core);
        out
    }
}

fn check_electrons(n_spatial: usize, n_electrons: usize, ms2: i64) -> Result<()> {
    if n_electrons > 2 * n_spatial {
        return Err(Error::domain(format!(
            "{n_electrons} electrons do not fit in {n_spatial} spatial orbitals"
        )));
    }
    if ms2.unsigned_abs() as usize > n_electrons {
        return Err(Error::domain(format!(
            "|MS2|={} exceeds NELEC={n_electrons}",
            ms2.abs()
        )));
    }
    Ok(())
}

fn parse_value(token: &str, line: usize) -> Result<f64> {
    let normalized = token.replace(['D', 'd'], "e");
    normalized
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::parse(line, format!("non-numeric value `{token}`")))
}

struct Header {
    values: HashMap<String, Vec<String>>,
    body_start: usize,
}

/// Reads the `&FCI ... &END` (or `/`) namelist. Returns key → raw value list and the
/// index of the first body line.
fn parse_header(lines: &[&str]) -> Result<Header> {
    let first = lines
        .iter()
        .position(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::parse(1, "empty input, expected `&FCI` header"))?;
    let opening = lines[first].trim_start();
    if !opening.to_ascii_uppercase().starts_with("&FCI") {
        return Err(Error::parse(first + 1, "expected `&FCI` namelist header"));
    }

    let mut text = String::new();
    let mut body_start = None;
    for (idx, raw) in lines.iter().enumerate().skip(first) {
        let mut l = raw.trim().to_string();
        if idx == first {
            l = l[4..].to_string();
        }
        let upper = l.to_ascii_uppercase();
        let end = upper
            .find("&END")
            .map(|p| (p, 4))
            .or_else(|| upper.find('/').map(|p| (p, 1)));
        if let Some((pos, _)) = end {
            text.push(' ');
            text.push_str(&l[..pos]);
            body_start = Some(idx + 1);
            break;
        }
        text.push(' ');
        text.push_str(&l);
    }
    let body_start = body_start.ok_or_else(|| Error::parse(lines.len(), "unterminated `&FCI` namelist"))?;

    let mut values: HashMap<String, Vec<String>> = HashMap::new();
    let mut current: Option<String> = None;
    for token in text.split([',', ' ', '\t']).filter(|t| !t.is_empty()) {
        if let Some((key, rest)) = token.split_once('=') {
            let key = key.trim().to_ascii_uppercase();
            if key.is_empty() {
                return Err(Error::parse(first + 1, format!("malformed header token `{token}`")));
            }
            let entry = values.entry(key.clone()).or_default();
            if !rest.is_empty() {
                entry.push(rest.to_string());
            }
            current = Some(key);
        } else {
            match &current {
                Some(key) => values.get_mut(key).expect("key inserted").push(token.to_string()),
                None => return Err(Error::parse(first + 1, format!("header value `{token}` without a key"))),
            }
        }
    }
    Ok(Header { values, body_start })
}

fn header_int(header: &Header, key: &str, line: usize) -> Result<Option<i64>> {
    match header.values.get(key) {
        None => Ok(None),
        Some(v) if v.len() == 1 => v[0]
            .parse::<i64>()
            .map(Some)
            .map_err(|_| Error::parse(line, format!("{key} must be an integer, got `{}`", v[0]))),
        Some(v) => Err(Error::parse(line, format!("{key} expects one value, got {}", v.len()))),
    }
}

/// Parses FCIDUMP text.
///
/// `ORBSYM` and `ISYM` are accepted and ignored, as are orbital-energy records
/// `value i 0 0 0`. When several lines address the same canonical integral the last
/// one wins; a warning is logged if it disagrees with the earlier value.
pub fn parse_fcidump(text: &str) -> Result<IntegralTable> {
    let lines: Vec<&str> = text.lines().collect();
    let header = parse_header(&lines)?;
    let hline = header.body_start;

    let norb = header_int(&header, "NORB", hline)?.ok_or_else(|| Error::parse(hline, "header is missing NORB"))?;
    let nelec = header_int(&header, "NELEC", hline)?.ok_or_else(|| Error::parse(hline, "header is missing NELEC"))?;
    let ms2 = header_int(&header, "MS2", hline)?.unwrap_or(0);
    if norb < 1 {
        return Err(Error::parse(hline, format!("NORB must be positive, got {norb}")));
    }
    if nelec < 0 {
        return Err(Error::parse(hline, format!("NELEC must be non-negative, got {nelec}")));
    }
    let n = norb as usize;
    let mut table = IntegralTable::zeros(n, nelec as usize, ms2).map_err(|e| Error::parse(hline, e.to_string()))?;

    let mut seen_eri: HashMap<usize, f64> = HashMap::new();
    let mut seen_h: HashMap<usize, f64> = HashMap::new();
    for (idx, raw) in lines.iter().enumerate().skip(header.body_start) {
        let line_no = idx + 1;
        let fields: Vec<&str> = raw.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if fields.len() != 5 {
            return Err(Error::parse(
                line_no,
                format!("expected `value i j k l`, found {} fields", fields.len()),
            ));
        }
        let value = parse_value(fields[0], line_no)?;
        let mut ix = [0usize; 4];
        for (slot, tok) in ix.iter_mut().zip(&fields[1..]) {
            let v: i64 = tok
                .parse()
                .map_err(|_| Error::parse(line_no, format!("non-integer index `{tok}`")))?;
            if v < 0 || v > norb {
                return Err(Error::parse(line_no, format!("index {v} outside [0, {norb}]")));
            }
            *slot = v as usize;
        }
        match ix {
            [0, 0, 0, 0] => table.e_core = value,
            [i, j, 0, 0] if i > 0 && j > 0 => {
                let (p, q) = (i - 1, j - 1);
                let key = pair_index(p, q);
                if let Some(prev) = seen_h.insert(key, value) {
                    warn_duplicate(line_no, prev, value);
                }
                table.set_h(p, q, value);
            }
            [_, 0, 0, 0] => {}
            [i, j, k, l] if i > 0 && j > 0 && k > 0 && l > 0 => {
                let (p, q, r, s) = (i - 1, j - 1, k - 1, l - 1);
                let key = eri_index(p, q, r, s);
                if let Some(prev) = seen_eri.insert(key, value) {
                    warn_duplicate(line_no, prev, value);
                }
                table.set_eri(p, q, r, s, value);
            }
            _ => return Err(Error::parse(line_no, format!("unsupported index pattern {:?}", ix))),
        }
    }
    Ok(table)
}

fn warn_duplicate(line: usize, previous: f64, value: f64) {
    if (previous - value).abs() > DUPLICATE_WARN_TOL {
        log::warn!("line {line}: integral redefined from {previous:e} to {value:e} (symmetry partner disagrees)");
    }
}

/// Synthetic integral families used as self-contained fixtures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelKind {
    /// `h_pp = p`, no off-diagonal one-body terms, no interaction.
    Diagonal,
    /// Open chain with hopping `-hopping` between neighbours and on-site `(pp|pp) = onsite`.
    HubbardLike { hopping: f64, onsite: f64 },
    /// Uniform draws on [-1, 1] for `h`, `(pq|rs)` and `e_core`.
    RandomSymmetric,
}

/// Builds a model table at half filling (`n_electrons = n_spatial`, lowest |MS2|).
/// Use [`IntegralTable::with_electrons`] to pick another sector.
pub fn model_table(kind: ModelKind, n_spatial: usize, seed: u64) -> IntegralTable {
    let n = n_spatial.max(1);
    let mut table = IntegralTable::zeros(n, n, (n % 2) as i64).expect("half filling always fits");
    match kind {
        ModelKind::Diagonal => {
            for p in 0..n {
                table.set_h(p, p, p as f64);
            }
        }
        ModelKind::HubbardLike { hopping, onsite } => {
            for p in 0..n.saturating_sub(1) {
                table.set_h(p, p + 1, -hopping);
            }
            for p in 0..n {
                table.set_eri(p, p, p, p, onsite);
            }
        }
        ModelKind::RandomSymmetric => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for p in 0..n {
                for q in 0..=p {
                    table.set_h(p, q, rng.random_range(-1.0..1.0));
                }
            }
            for v in table.eri.iter_mut() {
                *v = rng.random_range(-1.0..1.0);
            }
            table.e_core = rng.random_range(-1.0..1.0);
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    const WATER_HEADER: &str = " &FCI NORB=   7,NELEC=10,MS2=0,\n  ORBSYM=1,1,1,1,1,1,1,\n  ISYM=1,\n &END\n";

    #[test]
    fn water_style_header() {
        let text = format!("{WATER_HEADER} 0.5 1 1 1 1\n -1.25 1 1 0 0\n 9.0 0 0 0 0\n");
        let t = parse_fcidump(&text).unwrap();
        assert_eq!(t.n_spatial(), 7);
        assert_eq!(t.n_electrons, 10);
        assert_eq!(t.ms2, 0);
        assert_eq!(t.eri(0, 0, 0, 0), 0.5);
        assert_eq!(t.h(0, 0), -1.25);
        assert_eq!(t.e_core, 9.0);
        assert_eq!(t.sector().unwrap(), (5, 5));
    }

    #[test]
    fn core_energy_only() {
        let t = parse_fcidump("&FCI NORB=2, NELEC=2, MS2=0 /\n1.5 0 0 0 0\n").unwrap();
        assert_eq!(t.e_core, 1.5);
        assert!(t.one_body().iter().all(|&v| v == 0.0));
        for p in 0..2 {
            for q in 0..2 {
                for r in 0..2 {
                    for s in 0..2 {
                        assert_eq!(t.eri(p, q, r, s), 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn eri_symmetry_partners() {
        let t = parse_fcidump("&FCI NORB=4,NELEC=2,MS2=0 &END\n0.25 1 2 3 4\n").unwrap();
        for (p, q, r, s) in [
            (0, 1, 2, 3),
            (1, 0, 2, 3),
            (0, 1, 3, 2),
            (1, 0, 3, 2),
            (2, 3, 0, 1),
            (3, 2, 0, 1),
            (2, 3, 1, 0),
            (3, 2, 1, 0),
        ] {
            assert_eq!(t.eri(p, q, r, s), 0.25);
        }
        assert_eq!(t.eri(0, 2, 1, 3), 0.0);
    }

    #[test]
    fn fortran_exponents_and_orbital_energies() {
        let t = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0,\n&END\n1.0D-01 1 1 1 1\n-0.5 2 0 0 0\n").unwrap();
        assert!((t.eri(0, 0, 0, 0) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn last_duplicate_wins() {
        let t = parse_fcidump("&FCI NORB=2,NELEC=2,MS2=0 &END\n0.1 1 2 1 2\n0.3 2 1 2 1\n").unwrap();
        assert_eq!(t.eri(0, 1, 0, 1), 0.3);
    }

    #[test]
    fn header_errors() {
        assert!(matches!(parse_fcidump(""), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(
            parse_fcidump("\n\n 0.1 1 1 1 1\n"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(parse_fcidump("&FCI NELEC=2 &END\n"), Err(Error::Parse { .. })));
        assert!(matches!(
            parse_fcidump("&FCI NORB=2 NELEC=2\n0.1 1 1 1 1\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_fcidump("&FCI NORB=x,NELEC=2 &END\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn body_errors_carry_line_numbers() {
        let head = "&FCI NORB=2,NELEC=2,MS2=0\n&END\n";
        match parse_fcidump(&format!("{head}0.1 1 1 3 1\n")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        match parse_fcidump(&format!("{head}0.1 1 1 1 1\nabc 1 1 1 1\n")) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        assert!(parse_fcidump(&format!("{head}0.1 1 1 -1 1\n")).is_err());
        assert!(parse_fcidump(&format!("{head}0.1 1 1 1\n")).is_err());
        assert!(parse_fcidump(&format!("{head}0.1 0 1 1 1\n")).is_err());
    }

    #[test]
    fn model_tables() {
        let d = model_table(ModelKind::Diagonal, 3, 0);
        assert_eq!(d.h(2, 2), 2.0);
        assert_eq!(d.h(0, 1), 0.0);

        let hub = model_table(
            ModelKind::HubbardLike {
                hopping: 1.0,
                onsite: 4.0,
            },
            3,
            0,
        );
        assert_eq!(hub.h(0, 1), -1.0);
        assert_eq!(hub.h(1, 2), -1.0);
        assert_eq!(hub.h(0, 2), 0.0);
        assert_eq!(hub.eri(1, 1, 1, 1), 4.0);
        assert_eq!(hub.eri(0, 0, 1, 1), 0.0);

        let a = model_table(ModelKind::RandomSymmetric, 4, 42);
        let b = model_table(ModelKind::RandomSymmetric, 4, 42);
        assert_eq!(a, b);
        assert_ne!(a, model_table(ModelKind::RandomSymmetric, 4, 43));
    }

    #[test]
    fn constructors_are_symmetric() {
        for n in 1..=6 {
            for kind in [
                ModelKind::Diagonal,
                ModelKind::HubbardLike {
                    hopping: 0.7,
                    onsite: 2.0,
                },
                ModelKind::RandomSymmetric,
            ] {
                assert_eq!(model_table(kind, n, n as u64).symmetry_defect(), 0.0);
            }
        }
    }

    #[test]
    fn round_trip() {
        let t = model_table(ModelKind::RandomSymmetric, 5, 7)
            .with_electrons(6, 2)
            .unwrap();
        let back = parse_fcidump(&t.write_fcidump()).unwrap();
        assert_eq!(back.n_electrons, 6);
        assert_eq!(back.ms2, 2);
        assert!((back.e_core - t.e_core).abs() <= 1e-15);
        assert!((back.one_body() - t.one_body()).amax() <= 1e-15);
        let max_eri = back
            .eri
            .iter()
            .zip(&t.eri)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(max_eri <= 1e-15);
    }

    #[test]
    fn electron_count_validation() {
        assert!(IntegralTable::zeros(2, 5, 1).is_err());
        assert!(IntegralTable::zeros(0, 0, 0).is_err());
        assert!(IntegralTable::zeros(2, 2, 4).is_err());
        let odd = IntegralTable::zeros(3, 3, 0).unwrap();
        assert!(odd.sector().is_err());
    }
}
