//! The dominated-majorization vector `delta(B; A)`.
//!
//! `sum_{j<=k} delta_j(B; A)` is the one-sided derivative at `t = 0+` of the
//! sum of the `k` largest eigenvalues of `A + tB`. It is computed in closed
//! form: cluster the spectrum of `A`, compress `B` onto each eigenspace, and
//! concatenate the descending spectra of the compressions. That is the
//! diagonal of `B` in the eigenbasis of `A` that block-diagonalizes `B`,
//! which agrees with the derivative for every `k`, including `k` that split
//! a degenerate eigenvalue.

use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::major::{weak_major_no_rearrange, MajorizationVerdict};
use crate::matcore::{eigh, CMatrix, HermitianMatrix, SpectralDecomposition};
use crate::par::{self, Execution};
use crate::report::TrialReport;

/// Gaps inside this band make the eigenspace split of `A` ill-conditioned.
pub const NEAR_DEGENERATE_BAND: (f64, f64) = (1e-9, 1e-6);

/// Default probe grid for conditions quantified over all large `a`.
pub const DEFAULT_A_GRID: [f64; 6] = [1.0, 2.0, 5.0, 10.0, 100.0, 1000.0];

/// Distinct eigenvalues (cluster means, strictly decreasing) with their
/// multiplicities and the index ranges they absorb.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumClusters {
    pub values: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub members: Vec<Range<usize>>,
}

impl SpectrumClusters {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The indices `k = r_1 + ... + r_l` at which the top-k eigenprojector is
    /// well defined.
    pub fn entire_sums(&self) -> Vec<usize> {
        self.members.iter().map(|r| r.end).collect()
    }
}

/// Single-linkage clustering along the sorted chain: neighbours closer than
/// `gap_tol` share a cluster.
pub fn cluster_spectrum(eigenvalues: &[f64], gap_tol: f64) -> SpectrumClusters {
    let mut members: Vec<Range<usize>> = Vec::new();
    let mut start = 0;
    for j in 1..=eigenvalues.len() {
        if j == eigenvalues.len() || eigenvalues[j - 1] - eigenvalues[j] >= gap_tol {
            if j > start {
                members.push(start..j);
            }
            start = j;
        }
    }
    let values = members
        .iter()
        .map(|r| eigenvalues[r.clone()].iter().sum::<f64>() / r.len() as f64)
        .collect();
    let multiplicities = members.iter().map(|r| r.len()).collect();
    SpectrumClusters {
        values,
        multiplicities,
        members,
    }
}

/// `1e-7 * (1 + ||A||)`.
pub fn default_gap_tol(eigenvalues: &[f64]) -> f64 {
    let norm = eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    1e-7 * (1.0 + norm)
}

/// `delta(B; A)` together with the cluster structure of `A`.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaVector {
    pub entries: Vec<f64>,
    pub clusters: SpectrumClusters,
    /// Descending spectrum of the compression of `B` onto each eigenspace.
    pub block_spectra: Vec<Vec<f64>>,
    /// Some gap of `A` falls in [`NEAR_DEGENERATE_BAND`].
    pub near_degenerate: bool,
}

impl DeltaVector {
    pub fn partial_sums(&self) -> Vec<f64> {
        crate::major::partial_sums(&self.entries)
    }
}

/// Spectral data of `A` prepared once and reused for many `delta(.; A)`.
#[derive(Clone, Debug)]
pub struct DeltaBasis {
    decomposition: SpectralDecomposition,
    clusters: SpectrumClusters,
    frames: Vec<CMatrix>,
    near_degenerate: bool,
}

impl DeltaBasis {
    pub fn new(a: &HermitianMatrix, gap_tol: Option<f64>) -> Result<Self> {
        Ok(Self::from_decomposition(eigh(a)?, gap_tol))
    }

    pub fn from_decomposition(decomposition: SpectralDecomposition, gap_tol: Option<f64>) -> Self {
        let ev = &decomposition.eigenvalues;
        let tol = gap_tol.unwrap_or_else(|| default_gap_tol(ev));
        let clusters = cluster_spectrum(ev, tol);
        let frames = clusters
            .members
            .iter()
            .map(|r| decomposition.frame.columns(r.clone()))
            .collect();
        let (lo, hi) = NEAR_DEGENERATE_BAND;
        let near_degenerate = ev.windows(2).any(|w| {
            let gap = w[0] - w[1];
            (lo..=hi).contains(&gap)
        });
        DeltaBasis {
            decomposition,
            clusters,
            frames,
            near_degenerate,
        }
    }

    pub fn n(&self) -> usize {
        self.decomposition.n()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.decomposition.eigenvalues
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomposition
    }

    pub fn clusters(&self) -> &SpectrumClusters {
        &self.clusters
    }

    pub fn delta(&self, b: &HermitianMatrix) -> Result<DeltaVector> {
        if b.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: b.n(),
            });
        }
        let mut entries = Vec::with_capacity(self.n());
        let mut block_spectra = Vec::with_capacity(self.frames.len());
        for frame in &self.frames {
            let block = b.compress(frame);
            let spectrum = if block.n() == 1 {
                vec![block.get(0, 0).re]
            } else {
                eigh(&block)?.eigenvalues
            };
            entries.extend_from_slice(&spectrum);
            block_spectra.push(spectrum);
        }
        Ok(DeltaVector {
            entries,
            clusters: self.clusters.clone(),
            block_spectra,
            near_degenerate: self.near_degenerate,
        })
    }
}

pub fn delta_vector(
    b: &HermitianMatrix,
    a: &HermitianMatrix,
    gap_tol: Option<f64>,
) -> Result<DeltaVector> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    DeltaBasis::new(a, gap_tol)?.delta(b)
}

/// `[sum_{j<=k} lambda_j(A + tB) - sum_{j<=k} lambda_j(A)] / t`.
pub fn delta_fd_oracle(b: &HermitianMatrix, a: &HermitianMatrix, k: usize, t: f64) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            expected: a.n(),
            found: b.n(),
        });
    }
    if k == 0 || k > a.n() {
        return Err(Error::IndexOutOfRange { k, n: a.n() });
    }
    let base = a.eigenvalues()?;
    let moved = a.add_scaled(t, b).eigenvalues()?;
    Ok(fd_quotient(&base, &moved, k, t))
}

fn fd_quotient(base: &[f64], moved: &[f64], k: usize, t: f64) -> f64 {
    let s0: f64 = base[..k].iter().sum();
    let s1: f64 = moved[..k].iter().sum();
    (s1 - s0) / t
}

#[derive(Clone, Debug, Serialize)]
pub struct FdRow {
    pub t: f64,
    pub k: usize,
    pub finite_difference: f64,
    pub analytic: f64,
    pub abs_err: f64,
}

/// Finite-difference quotients for every `k` at each step in `steps`,
/// alongside the analytic partial sums of `delta(B; A)`.
pub fn fd_table(
    b: &HermitianMatrix,
    a: &HermitianMatrix,
    steps: &[f64],
    gap_tol: Option<f64>,
    exec: Execution,
) -> Result<Vec<FdRow>> {
    for &t in steps {
        if !(t > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "step t = {t} must be positive"
            )));
        }
    }
    let basis = DeltaBasis::new(a, gap_tol)?;
    let analytic = basis.delta(b)?.partial_sums();
    let base = basis.eigenvalues().to_vec();
    let per_step = par::map(exec, 0..steps.len() as u64, |i| {
        let t = steps[i as usize];
        a.add_scaled(t, b).eigenvalues().map(|moved| {
            (1..=a.n())
                .map(|k| {
                    let fd = fd_quotient(&base, &moved, k, t);
                    FdRow {
                        t,
                        k,
                        finite_difference: fd,
                        analytic: analytic[k - 1],
                        abs_err: (fd - analytic[k - 1]).abs(),
                    }
                })
                .collect::<Vec<_>>()
        })
    });
    let mut rows = Vec::with_capacity(steps.len() * a.n());
    for r in per_step {
        rows.extend(r?);
    }
    Ok(rows)
}

/// `B` is `A`-majorized by `C`: `delta(B; A) <_w delta(C; A)` without
/// rearrangement.
pub fn a_majorizes(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    c: &HermitianMatrix,
    gap_tol: Option<f64>,
    tol: f64,
) -> Result<MajorizationVerdict> {
    let basis = DeltaBasis::new(a, gap_tol)?;
    a_majorizes_in(&basis, b, c, tol)
}

pub fn a_majorizes_in(
    basis: &DeltaBasis,
    b: &HermitianMatrix,
    c: &HermitianMatrix,
    tol: f64,
) -> Result<MajorizationVerdict> {
    let db = basis.delta(b)?;
    let dc = basis.delta(c)?;
    weak_major_no_rearrange(&db.entries, &dc.entries, tol)
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() || grid.iter().any(|&a| !(a > 0.0)) || grid.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidConfig(
            "a-grid must be non-empty, positive and strictly ascending".into(),
        ));
    }
    Ok(())
}

/// `lambda(aA + B) <_w lambda(aA + C)` (eigenvalues are already sorted).
fn eigen_form(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    c: &HermitianMatrix,
    scale: f64,
    tol: f64,
) -> Result<MajorizationVerdict> {
    let lb = b.add_scaled(scale, a).eigenvalues()?;
    let lc = c.add_scaled(scale, a).eigenvalues()?;
    weak_major_no_rearrange(&lb, &lc, tol)
}

/// Samples the large-`a` hypothesis
/// `sum_{j<=k} lambda_j(aA + B) <= sum_{j<=k} lambda_j(aA + C)` on `a_grid`
/// and evaluates the conclusion `delta(B; A) <_w delta(C; A)`.
///
/// A hypothesis that holds on the whole grid while the conclusion fails is
/// flagged as an anomaly. Otherwise the margin is the conclusion deficit when
/// the hypothesis holds, and non-positive when it does not.
pub fn check_prop_ainf(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    c: &HermitianMatrix,
    a_grid: &[f64],
    gap_tol: Option<f64>,
    tol: f64,
) -> Result<TrialReport> {
    check_grid(a_grid)?;
    let conclusion = a_majorizes(a, b, c, gap_tol, tol)?;
    let mut hypothesis = Vec::with_capacity(a_grid.len());
    let mut first_failing_a = None;
    let mut max_hyp_deficit = f64::NEG_INFINITY;
    for &s in a_grid {
        let v = eigen_form(a, b, c, s, tol)?;
        if !v.holds && first_failing_a.is_none() {
            first_failing_a = Some(s);
        }
        max_hyp_deficit = max_hyp_deficit.max(v.deficit);
        hypothesis.push((s, v.holds, v.deficit));
    }
    let hypothesis_holds = first_failing_a.is_none();
    let margin = if hypothesis_holds {
        conclusion.deficit
    } else {
        (-max_hyp_deficit).min(0.0)
    };
    let mut report = TrialReport::new("prop1.ainf", margin, conclusion.worst_k)
        .with_matrix("A", a)
        .with_matrix("B", b)
        .with_matrix("C", c)
        .with_detail("hypothesis_sampled_true", hypothesis_holds)
        .with_detail("hypothesis", &hypothesis)
        .with_detail("first_failing_a", first_failing_a)
        .with_detail("conclusion", &conclusion);
    report.anomaly = hypothesis_holds && !conclusion.holds;
    Ok(report)
}

/// For co-diagonal `(A, B)` samples the three equivalent conditions
///
/// 1. `lambda(aA + B) <_w lambda(aA + C)` for `a` on the grid,
/// 2. `delta(B; A) <_w delta(C; A)`,
/// 3. `delta(aA + B; A) <_w delta(aA + C; A)` for `a` on the grid.
///
/// The margin collects the sampled implications that must hold: when (2)
/// holds, every deficit of (1) and (3); and always the mismatch between the
/// deficits of (3) and (2), which agree exactly by shift covariance. When
/// (2) fails while (1) holds on the whole grid, the grid was simply too
/// small; that is recorded as `grid_inconclusive`, not as a violation.
pub fn check_prop3_equiv(
    a: &HermitianMatrix,
    b: &HermitianMatrix,
    c: &HermitianMatrix,
    a_grid: &[f64],
    gap_tol: Option<f64>,
    tol: f64,
) -> Result<TrialReport> {
    check_grid(a_grid)?;
    let basis = DeltaBasis::new(a, gap_tol)?;
    let pp2 = a_majorizes_in(&basis, b, c, tol)?;
    let mut margin = f64::NEG_INFINITY;
    let mut worst_k = pp2.worst_k;
    let mut pp1_all = true;
    let mut rows = Vec::with_capacity(a_grid.len());
    for &s in a_grid {
        let pp1 = eigen_form(a, b, c, s, tol)?;
        let pp3 = a_majorizes_in(&basis, &b.add_scaled(s, a), &c.add_scaled(s, a), tol)?;
        pp1_all &= pp1.holds;
        let shift_mismatch = pp3
            .partial_sums_a
            .iter()
            .zip(&pp3.partial_sums_b)
            .zip(pp2.partial_sums_a.iter().zip(&pp2.partial_sums_b))
            .map(|((s3a, s3b), (s2a, s2b))| ((s3a - s3b) - (s2a - s2b)).abs())
            .fold(0.0, f64::max);
        margin = margin.max(shift_mismatch);
        if pp2.holds {
            if pp1.deficit > margin {
                margin = pp1.deficit;
                worst_k = pp1.worst_k;
            }
            if pp3.deficit > margin {
                margin = pp3.deficit;
                worst_k = pp3.worst_k;
            }
        }
        rows.push(serde_json::json!({
            "a": s,
            "eigen_form": {"holds": pp1.holds, "deficit": pp1.deficit},
            "shifted_delta_form": {"holds": pp3.holds, "deficit": pp3.deficit},
        }));
    }
    Ok(TrialReport::new("prop3.equiv", margin, worst_k)
        .with_matrix("A", a)
        .with_matrix("B", b)
        .with_matrix("C", c)
        .with_detail("delta_form", &pp2)
        .with_detail("grid", rows)
        .with_detail("grid_inconclusive", pp1_all && !pp2.holds)
        .flag_if_above(tol))
}
