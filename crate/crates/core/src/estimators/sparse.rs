use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Largest sample count accepted by [`sparse_sup_f`].
pub const SPARSE_ENUMERATION_LIMIT: usize = 20;

/// Value of `f(k, [n])` and one subset attaining it.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSup {
    pub value: f64,
    pub support: Vec<usize>,
}

fn top_eigenvalue(g: &DMatrix<f64>, idx: &[usize]) -> f64 {
    let sub = g.select_rows(idx).select_columns(idx);
    sub.symmetric_eigenvalues().max()
}

/// `sup ‖Σ y_j X_j‖₂²` over unit `y` with at most `k` nonzeros, by exhaustive
/// search. Principal submatrices of a Gram matrix have smaller top
/// eigenvalues, so only subsets of size `min(k, n)` are visited.
pub fn sparse_sup_f(x: &DMatrix<f64>, k: usize) -> Result<SparseSup> {
    let n = x.nrows();
    if n > SPARSE_ENUMERATION_LIMIT {
        return Err(Error::EnumerationLimit {
            size: n,
            limit: SPARSE_ENUMERATION_LIMIT,
        });
    }
    if n == 0 || k == 0 || k > n {
        return Err(Error::invalid("k", format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let g = x * x.transpose();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut best = SparseSup {
        value: f64::NEG_INFINITY,
        support: idx.clone(),
    };
    loop {
        let v = top_eigenvalue(&g, &idx);
        if v > best.value {
            best = SparseSup {
                value: v,
                support: idx.clone(),
            };
        }
        // next k-combination in lexicographic order
        let Some(pos) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            break;
        };
        idx[pos] += 1;
        for i in pos + 1..k {
            idx[i] = idx[i - 1] + 1;
        }
    }
    best.value = best.value.max(0.0);
    Ok(best)
}
