//! Acceptance criteria. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line.

use std::time::{Duration, Instant};

use majolab::delta::{delta_fd_oracle, DeltaBasis};
use majolab::ineq::{check_q2, CheckerId};
use majolab::lab::registry::{reproduce, xy_matrices};
use majolab::lab::search::{search, SearchConfig};
use majolab::lab::trials::run_trial;
use majolab::major::partial_sums;
use majolab::matcore::{random_hermitian, random_psd_degenerate, rng_from_seed, split_seed};
use majolab::par::{self, Execution};
use majolab::HermitianMatrix;

/// Seed whose q2 search reaches a margin of 1e-5 (found at trial 209).
const FROZEN_Q2_SEED: u64 = 1;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn reproduce_case(case: &str, budget: Duration) -> Outcome {
    let start = Instant::now();
    let out = match reproduce(case) {
        Ok(o) => o,
        Err(e) => return outcome(false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let bad: Vec<String> = out
        .quantities
        .iter()
        .filter(|q| !q.ok)
        .map(|q| format!("{}={:.8}", q.id, q.computed))
        .collect();
    let values: Vec<String> = out
        .quantities
        .iter()
        .map(|q| format!("{}={:.6}", q.id, q.computed))
        .collect();
    outcome(
        out.passed && elapsed < budget,
        format!(
            "{} quantities, mismatches [{}], {:.2?} (budget {budget:?}); {}",
            out.quantities.len(),
            bad.join(", "),
            elapsed,
            values.join(" ")
        ),
    )
}

fn theorem_suites() -> Outcome {
    let start = Instant::now();
    let checkers = [
        CheckerId::SubaddConcave,
        CheckerId::SuperaddConvex,
        CheckerId::Thm1Concave,
        CheckerId::Thm1ConvexCor,
        CheckerId::Tru,
        CheckerId::Prop4,
        CheckerId::Prop3Equiv,
    ];
    let mut worst = f64::NEG_INFINITY;
    let mut worst_at = String::new();
    let mut errors = 0usize;
    let mut anomalies = 0usize;
    for checker in checkers {
        for dim in [2usize, 3, 4, 6] {
            let margins = par::map(Execution::Parallel, 0..1000, |i| {
                run_trial(checker, dim, 10_000 * dim as u64 + i, 1e-9)
                    .map(|r| (r.margin, r.anomaly))
            });
            for (i, m) in margins.into_iter().enumerate() {
                match m {
                    Ok((margin, anomaly)) => {
                        anomalies += anomaly as usize;
                        if !(margin <= worst) {
                            worst = if margin.is_nan() {
                                f64::INFINITY
                            } else {
                                margin
                            };
                            worst_at = format!("{checker} dim {dim} trial {i}");
                        }
                    }
                    Err(_) => errors += 1,
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && anomalies == 0 && errors == 0 && elapsed < Duration::from_secs(60),
        format!(
            "28000 trials, max margin {worst:+.3e} at {worst_at}, anomalies {anomalies}, errors {errors}, {:.2?}",
            elapsed
        ),
    )
}

const SPECTRUM_TYPES: [&[usize]; 5] = [&[1, 1, 1, 1], &[2, 1], &[2, 2], &[3, 1], &[2, 2, 1]];

fn degenerate_pair(mults: &[usize], seed: u64) -> (HermitianMatrix, HermitianMatrix) {
    let mut rng = rng_from_seed(seed);
    let n = mults.iter().sum();
    let a = random_psd_degenerate(&mut rng, n, mults).expect("valid multiplicities");
    let b = random_hermitian(&mut rng, n);
    (a, b)
}

/// `max_k |(sum_{j<=k} lambda_j(A + tB) - sum_{j<=k} lambda_j(A)) / t - s_k|`,
/// computed from raw eigenvalues.
fn fd_error(a: &HermitianMatrix, b: &HermitianMatrix, analytic: &[f64], t: f64) -> f64 {
    let base = partial_sums(&a.eigenvalues().unwrap());
    let moved = partial_sums(&a.add_scaled(t, b).eigenvalues().unwrap());
    base.iter()
        .zip(&moved)
        .zip(analytic)
        .map(|((s0, s1), s)| ((s1 - s0) / t - s).abs())
        .fold(0.0, f64::max)
}

fn delta_consistency() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut scaled = 0usize;
    let mut total = 0usize;
    let mut oracle_gap = 0.0f64;
    for (ti, mults) in SPECTRUM_TYPES.iter().enumerate() {
        let rows = par::map(Execution::Parallel, 0..200, |i| {
            let (a, b) = degenerate_pair(mults, split_seed(600 + ti as u64, i));
            let analytic = DeltaBasis::new(&a, None)
                .unwrap()
                .delta(&b)
                .unwrap()
                .partial_sums();
            let e5 = fd_error(&a, &b, &analytic, 1e-5);
            let e3 = fd_error(&a, &b, &analytic, 1e-3);
            let e4 = fd_error(&a, &b, &analytic, 1e-4);
            let lib = (1..=a.n())
                .map(|k| (delta_fd_oracle(&b, &a, k, 1e-5).unwrap() - analytic[k - 1]).abs())
                .fold(0.0, f64::max);
            (e5, e3 >= 5.0 * e4, (lib - e5).abs())
        });
        for (e5, ok, gap) in rows {
            worst = worst.max(e5);
            scaled += ok as usize;
            total += 1;
            oracle_gap = oracle_gap.max(gap);
        }
    }
    let frac = scaled as f64 / total as f64;
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-3 && frac >= 0.95 && elapsed < Duration::from_secs(30),
        format!(
            "{total} pairs, max |fd(1e-5) - delta| {worst:.3e}, 5x shrink on {:.1}%, library oracle gap {oracle_gap:.1e}, {:.2?}",
            100.0 * frac,
            elapsed
        ),
    )
}

fn delta_algebra() -> Outcome {
    let start = Instant::now();
    let rows = par::map(Execution::Parallel, 0..200, |i| {
        let mults = SPECTRUM_TYPES[i as usize % SPECTRUM_TYPES.len()];
        let (a, b) = degenerate_pair(mults, split_seed(700, i));
        let c = random_hermitian(&mut rng_from_seed(split_seed(701, i)), a.n());
        let basis = DeltaBasis::new(&a, None).unwrap();
        let db = basis.delta(&b).unwrap();
        let trace = (db.entries.iter().sum::<f64>() - b.trace()).abs();
        let lambda = a.eigenvalues().unwrap();
        let mut shift = 0.0f64;
        for s in [0.5, 1.0, 10.0] {
            let d = basis.delta(&b.add_scaled(s, &a)).unwrap();
            for j in 0..a.n() {
                shift = shift.max((d.entries[j] - db.entries[j] - s * lambda[j]).abs());
            }
        }
        let dc = basis.delta(&c).unwrap().partial_sums();
        let dsum = basis.delta(&(&b + &c)).unwrap().partial_sums();
        let pb = db.partial_sums();
        let linear = db
            .clusters
            .entire_sums()
            .iter()
            .map(|&k| (dsum[k - 1] - pb[k - 1] - dc[k - 1]).abs())
            .fold(0.0, f64::max);
        (trace, shift, linear)
    });
    let (mut trace, mut shift, mut linear) = (0.0f64, 0.0f64, 0.0f64);
    for (t, s, l) in rows {
        trace = trace.max(t);
        shift = shift.max(s);
        linear = linear.max(l);
    }
    let elapsed = start.elapsed();
    outcome(
        trace <= 1e-9 && shift <= 1e-8 && linear <= 1e-8 && elapsed < Duration::from_secs(10),
        format!(
            "200 pairs, trace {trace:.1e}, shift {shift:.1e}, entire-sum linearity {linear:.1e}, {:.2?}",
            elapsed
        ),
    )
}

fn search_regression() -> Outcome {
    let start = Instant::now();
    let cfg = SearchConfig {
        question_id: "q2".into(),
        dim: 3,
        n_trials: 1_000_000,
        base_seed: FROZEN_Q2_SEED,
        margin_goal: 1e-5,
        ..SearchConfig::default()
    };
    let summary = match search(&cfg, Execution::Parallel, None) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("search error: {e}")),
    };
    let found = summary.reached_goal && summary.best_margin() >= 1e-5;
    let lifted = summary.lift.as_ref().is_some_and(|l| {
        let best = summary.best.as_ref().unwrap();
        let x = majolab::matcore::parse_matrix(best.inputs["X"].get()).unwrap();
        let y = majolab::matcore::parse_matrix(best.inputs["Y"].get()).unwrap();
        let again = check_q2(&x, &y, &l.function, 1e-9).unwrap();
        l.verified && again.difference_psd && again.norm.margin > 0.0
    });

    let fallback = SearchConfig {
        n_trials: 1,
        start: Some(xy_matrices()),
        ..cfg.clone()
    };
    let registry = search(&fallback, Execution::Sequential, None)
        .map(|s| s.best_margin() > 0.0 && s.lift.is_some_and(|l| l.verified))
        .unwrap_or(false);
    let elapsed = start.elapsed();
    outcome(
        found && lifted && registry && elapsed < Duration::from_secs(300),
        format!(
            "seed {FROZEN_Q2_SEED}: {} trials, margin {:+.3e}, lift alpha {}, norm-form verified {lifted}, registry start {registry}, {:.2?}",
            summary.trials_run,
            summary.best_margin(),
            summary.lift.as_ref().map_or(f64::NAN, |l| l.alpha),
            elapsed
        ),
    )
}

fn negative_control() -> Outcome {
    let start = Instant::now();
    let cfg = SearchConfig {
        question_id: "ineq1.concave".into(),
        dim: 3,
        n_trials: 100_000,
        base_seed: 9,
        ..SearchConfig::default()
    };
    let s = match search(&cfg, Execution::Parallel, None) {
        Ok(s) => s,
        Err(e) => return outcome(false, format!("search error: {e}")),
    };
    let elapsed = start.elapsed();
    outcome(
        s.trials_run == 100_000
            && s.best_margin() <= 1e-9
            && s.anomalies == 0
            && elapsed < Duration::from_secs(120),
        format!(
            "{} trials, best margin {:+.3e}, anomalies {}, {:.2?}",
            s.trials_run,
            s.best_margin(),
            s.anomalies,
            elapsed
        ),
    )
}

fn main() {
    let fast = Duration::from_millis(100);
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        (
            "reproduce q1.angle2x2",
            Box::new(move || reproduce_case("q1.angle2x2", fast)),
        ),
        (
            "reproduce q3.min3x3",
            Box::new(move || reproduce_case("q3.min3x3", fast)),
        ),
        (
            "reproduce q2.delta_xy",
            Box::new(move || reproduce_case("q2.delta_xy", fast)),
        ),
        (
            "reproduce q2.g101",
            Box::new(move || reproduce_case("q2.g101", fast)),
        ),
        ("theorem-backed suites", Box::new(theorem_suites)),
        ("delta vs finite differences", Box::new(delta_consistency)),
        ("delta algebra", Box::new(delta_algebra)),
        ("q2 search regression", Box::new(search_regression)),
        ("negative control search", Box::new(negative_control)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!(
            "[{}] criterion {}: {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += !o.passed as usize;
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
