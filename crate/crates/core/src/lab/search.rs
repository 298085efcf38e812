//! Randomized counterexample search.
//!
//! Trial `i` always uses seed `base_seed + i`. Work is cut into batches whose
//! size does not depend on the worker count, and results are merged in trial
//! order, so a search is reproducible from its configuration alone.
//!
//! `q2`, whether `|||g(B + Delta) - g(B)||| >= |||g(Delta)|||` can fail, is
//! searched in its dominated-majorization form: with
//! `t = 1`, find `X >= 0`, `Y > 0` such that `(Y - t)_+` is not
//! `Y`-majorized by `(X + Y - t)_+ - (X - t)_+`. Chains of `restart_every`
//! trials hill-climb from a fresh sample by Gaussian perturbation. A find is
//! lifted to a norm-form counterexample with `g(x) = alpha x + (x - t)_+`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::delta::{a_majorizes_in, DeltaBasis};
use crate::error::{Error, Result};
use crate::ineq::{check_q2, CheckerId, Q2Reports};
use crate::lab::trials::{run_trial_with, TrialInputs};
use crate::matcore::{
    check_dim, positive_part, random_hermitian, random_unitary, rng_from_seed, split_seed,
    HermitianMatrix,
};
use crate::par::{self, Execution};
use crate::report::TrialReport;
use crate::specfun::PiecewiseFn;

/// Threshold of the hinge in the `q2` objective.
pub const Q2_THRESHOLD: f64 = 1.0;
/// Smallest eigenvalue kept for `Y` while climbing.
pub const Y_FLOOR: f64 = 1e-2;
/// `lambda_min(Delta)` at or below this cannot be lifted.
pub const LIFT_MIN_EIGENVALUE: f64 = 1e-9;
const LIFT_ATTEMPTS: usize = 12;
const DIRECT_BATCH: u64 = 1024;
const CHAINS_PER_BATCH: u64 = 16;

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub question_id: String,
    pub dim: usize,
    pub n_trials: u64,
    pub base_seed: u64,
    pub step_scale: f64,
    pub restart_every: u64,
    pub margin_goal: f64,
    pub tol: f64,
    /// Starting point `(X, Y)` of the first chain instead of a fresh sample.
    pub start: Option<(HermitianMatrix, HermitianMatrix)>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            question_id: "q2".into(),
            dim: 3,
            n_trials: 1000,
            base_seed: 0,
            step_scale: 0.05,
            restart_every: 500,
            margin_goal: f64::INFINITY,
            tol: 1e-9,
            start: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    /// `q2` in dominated-majorization form, hill-climbing.
    Q2Delta,
    /// Independent samples scored by a checker.
    Direct(CheckerId),
}

impl Target {
    pub fn parse(question_id: &str) -> Result<Self> {
        match question_id {
            "q2" | "q2.delta" => Ok(Target::Q2Delta),
            other => other.parse().map(Target::Direct),
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<Target> {
        check_dim(self.dim)?;
        if self.n_trials == 0 || self.restart_every == 0 {
            return Err(Error::InvalidConfig(
                "n_trials and restart_every must be at least 1".into(),
            ));
        }
        if !(self.step_scale >= 0.0 && self.step_scale.is_finite()) {
            return Err(Error::InvalidConfig(
                "step_scale must be finite and >= 0".into(),
            ));
        }
        if self.margin_goal.is_nan() || self.tol.is_nan() {
            return Err(Error::InvalidConfig(
                "margin_goal and tol must not be NaN".into(),
            ));
        }
        if let Some((x, y)) = &self.start {
            if x.n() != self.dim || y.n() != self.dim {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    found: x.n().max(y.n()),
                });
            }
        }
        Target::parse(&self.question_id)
    }
}

/// Norm-form counterexample obtained from a dominated-majorization find.
#[derive(Clone, Debug, Serialize)]
pub struct LiftAttempt {
    pub alpha: f64,
    pub norm_margin: f64,
    pub star_margin: f64,
    pub difference_psd: bool,
}

#[derive(Clone, Debug)]
pub struct LiftOutcome {
    /// `ceil(-lambda_min(h(B + Delta) - h(B)) / lambda_min(Delta)) + 1`.
    pub formula_alpha: f64,
    pub alpha: f64,
    pub function: PiecewiseFn,
    pub attempts: Vec<LiftAttempt>,
    pub reports: Q2Reports,
    /// Positive norm-form margin with `g(B + Delta) - g(B)` PSD.
    pub verified: bool,
}

#[derive(Clone, Debug)]
pub struct SearchSummary {
    pub trials_run: u64,
    pub best: Option<TrialReport>,
    pub reached_goal: bool,
    pub anomalies: u64,
    pub lift: Option<LiftOutcome>,
}

impl SearchSummary {
    pub fn best_margin(&self) -> f64 {
        self.best.as_ref().map_or(f64::NEG_INFINITY, |r| r.margin)
    }
}

/// `x` beats `y`; NaN beats everything so it is never hidden.
fn better(x: f64, y: f64) -> bool {
    x.is_nan() && !y.is_nan() || x > y
}

/// Converts `g(x) = alpha x + (x - t)_+` instances until the norm form of the
/// `q2` inequality fails, starting from the closed-form `alpha`.
pub fn alpha_lift(
    b: &HermitianMatrix,
    delta: &HermitianMatrix,
    t: f64,
    tol: f64,
) -> Result<LiftOutcome> {
    let lam = delta.min_eigenvalue()?;
    if lam <= LIFT_MIN_EIGENVALUE {
        return Err(Error::PreconditionUnmet(format!(
            "lambda_min(Delta) = {lam:e} is not positive"
        )));
    }
    let diff = &positive_part(&(b + delta).shift(-t))? - &positive_part(&b.shift(-t))?;
    let formula_alpha = (-diff.min_eigenvalue()? / lam).ceil() + 1.0;
    let mut alpha = formula_alpha.max(1.0);
    let mut attempts = Vec::new();
    for _ in 0..LIFT_ATTEMPTS {
        let g = PiecewiseFn::convex_angle(alpha, t)?;
        let reports = check_q2(b, delta, &g, tol)?;
        attempts.push(LiftAttempt {
            alpha,
            norm_margin: reports.norm.margin,
            star_margin: reports.star.margin,
            difference_psd: reports.difference_psd,
        });
        let verified = reports.difference_psd && reports.norm.margin > 0.0;
        if verified || attempts.len() == LIFT_ATTEMPTS {
            return Ok(LiftOutcome {
                formula_alpha,
                alpha,
                function: g,
                attempts,
                reports,
                verified,
            });
        }
        alpha *= 10.0;
    }
    unreachable!("loop returns on its last attempt")
}

/// Dominated-majorization deficit of `(Y - t)_+` against
/// `(X + Y - t)_+ - (X - t)_+` with respect to `Y`.
pub fn q2_delta_objective(
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    t: f64,
) -> Result<(f64, usize)> {
    let basis = DeltaBasis::new(y, None)?;
    let hinge_y = basis.decomposition().positive_part_shifted(t);
    let c = &positive_part(&(x + y).shift(-t))? - &positive_part(&x.shift(-t))?;
    let v = a_majorizes_in(&basis, &hinge_y, &c, 0.0)?;
    Ok((v.deficit, v.worst_k))
}

fn q2_report(
    trial: u64,
    seed: u64,
    x: &HermitianMatrix,
    y: &HermitianMatrix,
    margin: f64,
    k: usize,
) -> TrialReport {
    TrialReport::new("q2.delta", margin, k)
        .with_trial(trial, seed)
        .with_matrix("X", x)
        .with_matrix("Y", y)
        .with_scalar("t", Q2_THRESHOLD)
}

fn spectral(rng: &mut ChaCha8Rng, values: &[f64]) -> HermitianMatrix {
    HermitianMatrix::diag(values).conjugate(&random_unitary(rng, values.len()))
}

fn fresh_point(rng: &mut ChaCha8Rng, n: usize) -> (HermitianMatrix, HermitianMatrix) {
    let xs: Vec<f64> = (0..n)
        .map(|_| 2.0 * Q2_THRESHOLD * rng.random::<f64>())
        .collect();
    let ys: Vec<f64> = (0..n)
        .map(|_| Y_FLOOR + (Q2_THRESHOLD - Y_FLOOR) * rng.random::<f64>())
        .collect();
    let x = spectral(rng, &xs);
    let y = spectral(rng, &ys);
    (x, y)
}

fn clamp_below(h: &HermitianMatrix, floor: f64) -> Result<HermitianMatrix> {
    let d = h.eigh()?;
    let values: Vec<f64> = d.eigenvalues.iter().map(|&v| v.max(floor)).collect();
    Ok(d.reconstruct_with(&values))
}

/// Gaussian step with a log-uniform size in `[step / 100, step]`.
fn perturb(
    rng: &mut ChaCha8Rng,
    point: &(HermitianMatrix, HermitianMatrix),
    step: f64,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let n = point.0.n();
    let s = step * 10f64.powf(-2.0 * rng.random::<f64>());
    let x = clamp_below(&point.0.add_scaled(s, &random_hermitian(rng, n)), 0.0)?;
    let y = clamp_below(&point.1.add_scaled(s, &random_hermitian(rng, n)), Y_FLOOR)?;
    Ok((x, y))
}

struct Evaluated {
    trial: u64,
    margin: f64,
    worst_k: usize,
    point: (HermitianMatrix, HermitianMatrix),
}

fn run_chain(cfg: &SearchConfig, range: std::ops::Range<u64>) -> Result<Vec<Evaluated>> {
    let mut out = Vec::with_capacity((range.end - range.start) as usize);
    let mut current: Option<(f64, (HermitianMatrix, HermitianMatrix))> = None;
    for i in range {
        let mut rng = rng_from_seed(cfg.base_seed.wrapping_add(i));
        let point = match (&current, i, &cfg.start) {
            (None, 0, Some(start)) => start.clone(),
            (None, _, _) => fresh_point(&mut rng, cfg.dim),
            (Some((_, p)), _, _) => perturb(&mut rng, p, cfg.step_scale)?,
        };
        let (margin, worst_k) = q2_delta_objective(&point.0, &point.1, Q2_THRESHOLD)?;
        if current.as_ref().is_none_or(|(m, _)| !better(*m, margin)) {
            current = Some((margin, point.clone()));
        }
        out.push(Evaluated {
            trial: i,
            margin,
            worst_k,
            point,
        });
    }
    Ok(out)
}

fn direct_trial(cfg: &SearchConfig, checker: CheckerId, trial: u64) -> Result<TrialReport> {
    let seed = cfg.base_seed.wrapping_add(trial);
    let function = match checker {
        CheckerId::Q1 => {
            let mut rng = rng_from_seed(split_seed(seed, 1));
            Some(PiecewiseFn::convex_angle(
                rng.random::<f64>(),
                2.0 * rng.random::<f64>(),
            )?)
        }
        CheckerId::Q3 => {
            let mut rng = rng_from_seed(split_seed(seed, 1));
            let b = if rng.random_bool(0.5) {
                1.0
            } else {
                rng.random::<f64>()
            };
            Some(PiecewiseFn::new(
                0.0,
                1.0,
                vec![(-b, 2.0 * rng.random::<f64>())],
            )?)
        }
        _ => None,
    };
    let inputs = TrialInputs {
        pair: None,
        function,
    };
    Ok(run_trial_with(checker, cfg.dim, seed, cfg.tol, &inputs)?.with_trial(trial, seed))
}

/// Sink receiving every report in trial order.
pub type Sink<'a> = &'a mut (dyn FnMut(&TrialReport) -> Result<()> + Send);

/// Runs the search described by `cfg`. Every trial's report is passed to
/// `sink` in trial order.
pub fn search(
    cfg: &SearchConfig,
    exec: Execution,
    mut sink: Option<Sink<'_>>,
) -> Result<SearchSummary> {
    let target = cfg.validate()?;
    par::scope(exec, |exec| {
        let mut summary = SearchSummary {
            trials_run: 0,
            best: None,
            reached_goal: false,
            anomalies: 0,
            lift: None,
        };
        match target {
            Target::Direct(checker) => {
                let mut start = 0;
                while start < cfg.n_trials && !summary.reached_goal {
                    let end = (start + DIRECT_BATCH).min(cfg.n_trials);
                    let batch = par::map(exec, start..end, |i| direct_trial(cfg, checker, i));
                    for r in batch {
                        let r = r?;
                        summary.trials_run += 1;
                        summary.anomalies += r.anomaly as u64;
                        if let Some(s) = sink.as_mut() {
                            s(&r)?;
                        }
                        let goal = r.margin >= cfg.margin_goal;
                        if summary
                            .best
                            .as_ref()
                            .is_none_or(|b| better(r.margin, b.margin))
                        {
                            summary.best = Some(r);
                        }
                        if goal {
                            summary.reached_goal = true;
                            break;
                        }
                    }
                    start = end;
                }
            }
            Target::Q2Delta => {
                let chains = cfg.n_trials.div_ceil(cfg.restart_every);
                let mut best: Option<Evaluated> = None;
                let mut chain = 0;
                'outer: while chain < chains {
                    let last = (chain + CHAINS_PER_BATCH).min(chains);
                    let batch = par::map(exec, chain..last, |c| {
                        let lo = c * cfg.restart_every;
                        run_chain(cfg, lo..(lo + cfg.restart_every).min(cfg.n_trials))
                    });
                    for results in batch {
                        for e in results? {
                            summary.trials_run += 1;
                            if let Some(s) = sink.as_mut() {
                                let seed = cfg.base_seed.wrapping_add(e.trial);
                                s(&q2_report(
                                    e.trial, seed, &e.point.0, &e.point.1, e.margin, e.worst_k,
                                ))?;
                            }
                            let goal = e.margin >= cfg.margin_goal;
                            if best.as_ref().is_none_or(|b| better(e.margin, b.margin)) {
                                best = Some(e);
                            }
                            if goal {
                                summary.reached_goal = true;
                                break 'outer;
                            }
                        }
                    }
                    chain = last;
                }
                if let Some(e) = best {
                    let seed = cfg.base_seed.wrapping_add(e.trial);
                    if e.margin > 0.0 {
                        summary.lift =
                            Some(alpha_lift(&e.point.0, &e.point.1, Q2_THRESHOLD, cfg.tol)?);
                    }
                    summary.best = Some(q2_report(
                        e.trial, seed, &e.point.0, &e.point.1, e.margin, e.worst_k,
                    ));
                }
            }
        }
        Ok(summary)
    })
}
