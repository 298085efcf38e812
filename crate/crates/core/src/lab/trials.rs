//! Seeded random instances for every checker.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::ineq::{
    check_ando_zhan_inverse, check_prop3, check_prop4, check_q1, check_q2, check_q3,
    check_subadd_concave, check_superadd_convex, check_thm1, check_thm1_convex, check_tru,
    CheckerId,
};
use crate::matcore::{
    check_dim, random_codiagonal_pair, random_hermitian, random_psd, rng_from_seed, HermitianMatrix,
};
use crate::report::TrialReport;
use crate::specfun::{sample_concave_with, sample_convex_with, PiecewiseFn};

/// Largest number of knots in sampled functions.
pub const MAX_KNOTS: usize = 5;
/// Thresholds probed by the trace inequality.
pub const TRU_GRID: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
/// Dominance offsets for `A = ||B|| I + eps P`.
pub const THM1_EPS: [f64; 3] = [0.0, 1e-3, 1.0];

/// Explicit operands for a trial; missing pieces are sampled from the seed.
#[derive(Clone, Debug, Default)]
pub struct TrialInputs {
    pub pair: Option<(HermitianMatrix, HermitianMatrix)>,
    pub function: Option<PiecewiseFn>,
}

fn psd_pair(rng: &mut ChaCha8Rng, n: usize) -> (HermitianMatrix, HermitianMatrix) {
    let a = random_psd(rng, n);
    let b = random_psd(rng, n);
    (a, b)
}

fn concave(rng: &mut ChaCha8Rng) -> PiecewiseFn {
    sample_concave_with(rng, MAX_KNOTS, 1.0)
}

fn concave_origin(rng: &mut ChaCha8Rng) -> PiecewiseFn {
    concave(rng).with_constant(0.0)
}

fn convex(rng: &mut ChaCha8Rng) -> PiecewiseFn {
    sample_convex_with(rng, MAX_KNOTS, 1.0)
}

/// Concave, `f(0) = 0`, with every slope at least `5%` of the initial one.
fn strictly_increasing_concave(rng: &mut ChaCha8Rng) -> Result<PiecewiseFn> {
    let f = concave_origin(rng);
    let last = *f.segment_slopes().last().expect("at least one slope");
    if last >= 0.05 * f.slope() {
        return Ok(f);
    }
    let terms = f.terms().iter().map(|&(b, t)| (0.5 * b, t)).collect();
    PiecewiseFn::new(0.0, f.slope(), terms)
}

/// `A = ||B|| I + eps P` with `eps` drawn from [`THM1_EPS`].
fn dominant_pair(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> Result<(HermitianMatrix, HermitianMatrix, f64)> {
    let b = random_psd(rng, n);
    let p = random_psd(rng, n);
    let eps = THM1_EPS[rng.random_range(0..THM1_EPS.len())];
    let a = p.scale(eps).shift(b.op_norm()?);
    Ok((a, b, eps))
}

/// Runs one trial of `checker` at dimension `dim` from `seed`.
pub fn run_trial(checker: CheckerId, dim: usize, seed: u64, tol: f64) -> Result<TrialReport> {
    run_trial_with(checker, dim, seed, tol, &TrialInputs::default())
}

pub fn run_trial_with(
    checker: CheckerId,
    dim: usize,
    seed: u64,
    tol: f64,
    inputs: &TrialInputs,
) -> Result<TrialReport> {
    check_dim(dim)?;
    let mut rng = rng_from_seed(seed);
    let pair = |rng: &mut ChaCha8Rng| match &inputs.pair {
        Some(p) => p.clone(),
        None => psd_pair(rng, dim),
    };
    let pick = |sampled: PiecewiseFn| inputs.function.clone().unwrap_or(sampled);

    let report = match checker {
        CheckerId::SubaddConcave => {
            let (a, b) = pair(&mut rng);
            check_subadd_concave(&a, &b, &pick(concave(&mut rng)), tol)?
        }
        CheckerId::SuperaddConvex => {
            let (a, b) = pair(&mut rng);
            check_superadd_convex(&a, &b, &pick(convex(&mut rng)), tol)?
        }
        CheckerId::Q1 => {
            let (a, b) = pair(&mut rng);
            check_q1(&a, &b, &pick(convex(&mut rng)), tol)?
        }
        CheckerId::Q2Norm | CheckerId::Q2Star => {
            let (b, d) = pair(&mut rng);
            let r = check_q2(&b, &d, &pick(convex(&mut rng)), tol)?;
            if checker == CheckerId::Q2Norm {
                r.norm
            } else {
                r.star
            }
        }
        CheckerId::Q3 => {
            let (b, d) = pair(&mut rng);
            check_q3(&b, &d, &pick(concave_origin(&mut rng)), tol)?
        }
        CheckerId::Thm1Concave | CheckerId::Thm1ConvexCor => {
            let (a, b, eps) = match &inputs.pair {
                Some((a, b)) => (a.clone(), b.clone(), f64::NAN),
                None => dominant_pair(&mut rng, dim)?,
            };
            let r = if checker == CheckerId::Thm1Concave {
                check_thm1(&a, &b, &pick(concave(&mut rng)), tol)?
            } else {
                check_thm1_convex(&a, &b, &pick(convex(&mut rng)), tol)?
            };
            if eps.is_nan() {
                r
            } else {
                r.with_scalar("eps", eps)
            }
        }
        CheckerId::Tru => {
            let (a, b) = pair(&mut rng);
            let mut worst: Option<TrialReport> = None;
            for u in TRU_GRID {
                let r = check_tru(&a, &b, u, tol)?;
                if worst.as_ref().is_none_or(|w| r.margin > w.margin) {
                    worst = Some(r);
                }
            }
            worst
                .expect("non-empty grid")
                .with_detail("u_grid", TRU_GRID)
        }
        CheckerId::Prop4 => {
            let (a, b) = pair(&mut rng);
            check_prop4(&a, &b, &pick(concave_origin(&mut rng)), tol)?
        }
        CheckerId::AndoZhanTransfer => {
            let (a, b) = pair(&mut rng);
            let f = match &inputs.function {
                Some(f) => f.clone(),
                None => strictly_increasing_concave(&mut rng)?,
            };
            check_ando_zhan_inverse(&a, &b, &f, tol)?
        }
        CheckerId::Prop3Equiv => {
            let (a, b) = match &inputs.pair {
                Some(p) => p.clone(),
                None => random_codiagonal_pair(&mut rng, dim),
            };
            let c = if rng.random_bool(0.5) {
                let s = rng.random::<f64>();
                b.add_scaled(s, &random_psd(&mut rng, dim))
            } else {
                random_hermitian(&mut rng, dim)
            };
            check_prop3(&a, &b, &c, tol)?
        }
    };
    Ok(report)
}
