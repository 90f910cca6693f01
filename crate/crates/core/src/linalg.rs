//! Thin wrappers over nalgebra's dense symmetric eigensolver and SVD with
//! deterministic ordering.

use nalgebra::{DMatrix, SymmetricEigen, SVD};

use crate::error::{Error, Result};

pub fn check_finite(m: &DMatrix<f64>, what: &str) -> Result<()> {
    if m.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numerical(format!("{what} contains non-finite entries")))
    }
}

/// Largest `|m_ij - m_ji|`.
pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues and eigenvectors (columns) in ascending eigenvalue order.
pub fn eigh(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    check_finite(m, "matrix")?;
    if m.nrows() != m.ncols() {
        return Err(Error::Numerical(format!(
            "eigensolver needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok((Vec::new(), DMatrix::zeros(0, 0)));
    }
    let eig = SymmetricEigen::new(symmetrized(m));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigensolver did not converge".into()));
    }
    Ok((values, vectors))
}

/// Index sets of the connected components of the nonzero pattern of `m`.
fn components(m: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for j in 0..n {
        for i in 0..j {
            if m[(i, j)] != 0.0 || m[(j, i)] != 0.0 {
                let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let r = root(&mut parent, i);
        groups[r].push(i);
    }
    groups.retain(|g| !g.is_empty());
    groups
}

/// Eigenvalues only, ascending. Sparse inputs are split into independent blocks first.
pub fn eigvalsh(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_finite(m, "matrix")?;
    if m.nrows() != m.ncols() {
        return Err(Error::Numerical("eigensolver needs a square matrix".into()));
    }
    let sym = symmetrized(m);
    let mut values = Vec::with_capacity(m.nrows());
    for group in components(&sym) {
        if group.len() == 1 {
            values.push(sym[(group[0], group[0])]);
            continue;
        }
        let block = sym.select_rows(group.iter()).select_columns(group.iter());
        values.extend(block.symmetric_eigenvalues().iter().copied());
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("eigensolver did not converge".into()));
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Flips the sign of each column so that its largest-magnitude entry is positive.
/// Returns the applied signs.
pub fn fix_column_signs(v: &mut DMatrix<f64>) -> Vec<f64> {
    let mut signs = Vec::with_capacity(v.ncols());
    for mut col in v.column_iter_mut() {
        let mut best = 0.0_f64;
        let mut sign = 1.0;
        for &x in col.iter() {
            // strict comparison keeps the first of equal-magnitude entries
            if x.abs() > best + 1e-12 {
                best = x.abs();
                sign = x.signum();
            }
        }
        if sign < 0.0 {
            col.neg_mut();
        }
        signs.push(sign);
    }
    signs
}

/// Thin SVD with singular values in descending order.
pub fn svd(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>, DMatrix<f64>)> {
    check_finite(m, "matrix")?;
    let k = m.nrows().min(m.ncols());
    if k == 0 {
        return Ok((Vec::new(), DMatrix::zeros(m.nrows(), 0), DMatrix::zeros(m.ncols(), 0)));
    }
    let dec = SVD::try_new(m.clone(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let u = dec.u.expect("requested U");
    let v_t = dec.v_t.expect("requested V^T");
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| dec.singular_values[b].total_cmp(&dec.singular_values[a]));
    let values = order.iter().map(|&i| dec.singular_values[i]).collect();
    let u_sorted = DMatrix::from_fn(m.nrows(), k, |r, c| u[(r, order[c])]);
    let v_sorted = DMatrix::from_fn(m.ncols(), k, |r, c| v_t[(order[c], r)]);
    Ok((values, u_sorted, v_sorted))
}

/// `Σ |λ|` of a symmetric matrix.
pub fn trace_norm(m: &DMatrix<f64>) -> Result<f64> {
    Ok(eigvalsh(m)?.iter().map(|v| v.abs()).sum())
}
