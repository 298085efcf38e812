//! Ky Fan and Schatten norms, and the two weak-majorization relations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matcore::HermitianMatrix;

/// Outcome of a partial-sum comparison `sum_{j<=k} a_j <= sum_{j<=k} b_j`.
///
/// `worst_k` is 1-based. `deficit` is the largest `S_a(k) - S_b(k)`; a
/// positive value means the relation is violated at `worst_k`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MajorizationVerdict {
    pub holds: bool,
    pub worst_k: usize,
    pub deficit: f64,
    pub partial_sums_a: Vec<f64>,
    pub partial_sums_b: Vec<f64>,
}

pub fn partial_sums(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

/// Singular values of a Hermitian matrix, i.e. `|lambda|` sorted descending.
pub fn singular_values(h: &HermitianMatrix) -> Result<Vec<f64>> {
    let mut s: Vec<f64> = h.eigenvalues()?.iter().map(|x| x.abs()).collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(s)
}

/// Sum of the `k` largest singular values.
pub fn kyfan_norm(h: &HermitianMatrix, k: usize) -> Result<f64> {
    if k == 0 || k > h.n() {
        return Err(Error::IndexOutOfRange { k, n: h.n() });
    }
    Ok(singular_values(h)?[..k].iter().sum())
}

/// All Ky Fan norms `k = 1..=n` from one eigensolve.
pub fn kyfan_norms(h: &HermitianMatrix) -> Result<Vec<f64>> {
    Ok(partial_sums(&singular_values(h)?))
}

/// `(sum sigma_j^p)^(1/p)`; `p = f64::INFINITY` gives the spectral norm.
pub fn schatten_norm(h: &HermitianMatrix, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidNormOrder(p));
    }
    let s = singular_values(h)?;
    if p.is_infinite() {
        return Ok(s[0]);
    }
    Ok(s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p))
}

/// Partial sums compared in the given order, no sorting.
pub fn weak_major_no_rearrange(a: &[f64], b: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let partial_sums_a = partial_sums(a);
    let partial_sums_b = partial_sums(b);
    let mut deficit = f64::NEG_INFINITY;
    let mut worst_k = 1;
    for (k, (sa, sb)) in partial_sums_a.iter().zip(&partial_sums_b).enumerate() {
        let d = sa - sb;
        if d > deficit {
            deficit = d;
            worst_k = k + 1;
        }
    }
    if a.is_empty() {
        deficit = 0.0;
    }
    Ok(MajorizationVerdict {
        holds: deficit <= tol,
        worst_k,
        deficit,
        partial_sums_a,
        partial_sums_b,
    })
}

/// Classical `a_down <_w b_down`: both vectors sorted descending first.
pub fn weak_major_sorted(a: &[f64], b: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    weak_major_no_rearrange(&sorted_desc(a), &sorted_desc(b), tol)
}

pub fn sorted_desc(v: &[f64]) -> Vec<f64> {
    let mut s = v.to_vec();
    s.sort_by(|a, b| b.partial_cmp(a).expect("NaN in vector"));
    s
}
