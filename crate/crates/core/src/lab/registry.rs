//! Published counterexamples, stored as printed (six significant digits),
//! with the quantities they are expected to reproduce.

use serde::Serialize;

use crate::delta::{a_majorizes_in, DeltaBasis};
use crate::error::{Error, Result};
use crate::ineq::{check_q1, check_q2, check_q3, CheckerId};
use crate::matcore::{positive_part, HermitianMatrix};
use crate::report::TrialReport;
use crate::specfun::PiecewiseFn;

pub const CASE_IDS: [&str; 4] = ["q1.angle2x2", "q3.min3x3", "q2.delta_xy", "q2.g101"];

/// What a recomputed quantity must satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    Near { value: f64, tol: f64 },
    Above { bound: f64 },
}

impl Expectation {
    pub fn accepts(&self, x: f64) -> bool {
        match *self {
            Expectation::Near { value, tol } => (x - value).abs() <= tol,
            Expectation::Above { bound } => x > bound,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpectedQuantity {
    pub id: &'static str,
    pub expect: Expectation,
    /// Where the expected figure comes from.
    pub source: &'static str,
}

const PUBLISHED: &str = "published value";
const STRUCTURAL: &str = "structural property";

fn near(id: &'static str, value: f64, tol: f64) -> ExpectedQuantity {
    ExpectedQuantity {
        id,
        expect: Expectation::Near { value, tol },
        source: PUBLISHED,
    }
}

fn above(id: &'static str, bound: f64) -> ExpectedQuantity {
    ExpectedQuantity {
        id,
        expect: Expectation::Above { bound },
        source: STRUCTURAL,
    }
}

#[derive(Clone, Debug)]
pub struct RegistryCase {
    pub case_id: &'static str,
    pub checker_id: &'static str,
    pub matrices: Vec<(&'static str, HermitianMatrix)>,
    pub function: PiecewiseFn,
    pub expected: Vec<ExpectedQuantity>,
}

impl RegistryCase {
    pub fn matrix(&self, name: &str) -> &HermitianMatrix {
        &self
            .matrices
            .iter()
            .find(|(n, _)| *n == name)
            .expect("registry matrix present")
            .1
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuantityCheck {
    pub id: &'static str,
    pub computed: f64,
    pub expect: Expectation,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct ReproduceOutcome {
    pub report: TrialReport,
    pub quantities: Vec<QuantityCheck>,
    pub passed: bool,
}

fn real(n: usize, entries: &[f64]) -> HermitianMatrix {
    HermitianMatrix::from_real(n, entries).expect("registry literal is Hermitian")
}

/// 2x2 pair with `|||g(A) - g(B)||| < |||g(|A - B|)|||` for
/// `g(x) = x + (x - 1)_+`.
pub fn q1_matrices() -> (HermitianMatrix, HermitianMatrix) {
    (
        HermitianMatrix::diag(&[0.9, 0.6]),
        real(2, &[0.8, 0.5, 0.5, 0.4]),
    )
}

/// `B` and diagonal `Delta` with `||f(B + Delta) - f(B)|| > ||f(Delta)||` for
/// `f(x) = min(x, 1)`.
pub fn q3_matrices() -> (HermitianMatrix, HermitianMatrix) {
    (
        real(
            3,
            &[
                0.701816, 0.317887, 0.198910, //
                0.317887, 1.014950, -0.093826, //
                0.198910, -0.093826, 0.274236,
            ],
        ),
        HermitianMatrix::diag(&[0.192713, 0.446505, 0.455416]),
    )
}

/// `X` (PSD) and `Y` (PD, diagonal) with
/// `|||g(X + Y) - g(X)||| < |||g(Y)|||` for `g(x) = 101 x + (x - 1)_+`.
pub fn xy_matrices() -> (HermitianMatrix, HermitianMatrix) {
    (
        real(
            3,
            &[
                0.35614, -0.053243, 0.10116, //
                -0.053243, 0.87456, 0.40559, //
                0.10116, 0.40559, 0.82474,
            ],
        ),
        HermitianMatrix::diag(&[0.53642, 0.42018, 0.094866]),
    )
}

pub fn case(case_id: &str) -> Result<RegistryCase> {
    Ok(match case_id {
        "q1.angle2x2" => {
            let (a, b) = q1_matrices();
            RegistryCase {
                case_id: "q1.angle2x2",
                checker_id: CheckerId::Q1.as_str(),
                matrices: vec![("A", a), ("B", b)],
                function: PiecewiseFn::convex_angle(1.0, 1.0)?,
                expected: vec![
                    near("eig_g_abs_diff.1", 0.65249, 5e-5),
                    near("eig_g_abs_diff.2", 0.35249, 5e-5),
                    near("eig_g_diff.1", 0.65010, 5e-5),
                    near("eig_g_diff.2", -0.48862, 5e-5),
                    near("margin", 0.00239, 1e-4),
                ],
            }
        }
        "q3.min3x3" => {
            let (b, d) = q3_matrices();
            RegistryCase {
                case_id: "q3.min3x3",
                checker_id: CheckerId::Q3.as_str(),
                matrices: vec![("B", b), ("Delta", d)],
                function: PiecewiseFn::angle_min(1.0)?,
                expected: vec![
                    near("op_norm_f_delta", 0.455416, 1e-5),
                    near("op_norm_difference", 0.455776, 1e-5),
                    near("margin", 0.00036, 1e-5),
                ],
            }
        }
        "q2.delta_xy" => {
            let (x, y) = xy_matrices();
            RegistryCase {
                case_id: "q2.delta_xy",
                checker_id: "q2.delta",
                matrices: vec![("X", x), ("Y", y)],
                function: PiecewiseFn::hinge(1.0)?,
                expected: vec![
                    near("delta_hinge_y.1", 0.0, 1e-4),
                    near("delta_hinge_y.2", 0.0, 1e-4),
                    near("delta_hinge_y.3", 0.0, 1e-4),
                    near("delta_c.1", -0.00018194, 1e-4),
                    near("delta_c.2", 0.2573, 1e-4),
                    near("delta_c.3", 0.04, 1e-4),
                    near("c_11_in_y_basis", -0.00018194, 1e-6),
                    near("delta_y.1", 0.53642, 1e-4),
                    near("delta_y.2", 0.42018, 1e-4),
                    near("delta_y.3", 0.094866, 1e-4),
                    near("delta_y_plus_c.1", 0.53624, 1e-4),
                    near("delta_y_plus_c.2", 0.67748, 1e-4),
                    near("delta_y_plus_c.3", 0.13487, 1e-4),
                    above("min_eig_y_plus_c", 0.0),
                    above("a_major_deficit", 0.0),
                    above("a_major_deficit_alpha1", 0.0),
                ],
            }
        }
        "q2.g101" => {
            let (x, y) = xy_matrices();
            RegistryCase {
                case_id: "q2.g101",
                checker_id: CheckerId::Q2Star.as_str(),
                matrices: vec![("X", x), ("Y", y)],
                function: PiecewiseFn::convex_angle(101.0, 1.0)?,
                expected: vec![
                    near("eig_difference.1", 54.17824, 2e-4),
                    near("eig_difference.2", 42.69595, 2e-4),
                    near("eig_difference.3", 9.621004, 2e-4),
                    near("eig_g_delta.1", 54.17842, 2e-4),
                    near("eig_g_delta.2", 42.43818, 2e-4),
                    near("eig_g_delta.3", 9.581466, 2e-4),
                    above("star_margin", 0.0),
                    above("star_fails_at_k1", 0.0),
                    above("min_eig_difference", -1e-9),
                ],
            }
        }
        other => return Err(Error::UnknownCase(other.to_string())),
    })
}

pub fn all_cases() -> Vec<RegistryCase> {
    CASE_IDS
        .iter()
        .map(|id| case(id).expect("known case"))
        .collect()
}

fn push_vec(out: &mut Vec<(String, f64)>, prefix: &str, v: &[f64]) {
    for (i, x) in v.iter().enumerate() {
        out.push((format!("{prefix}.{}", i + 1), *x));
    }
}

fn f64s(v: &serde_json::Value) -> Vec<f64> {
    v.as_array()
        .map(|a| a.iter().filter_map(|x| x.as_f64()).collect())
        .unwrap_or_default()
}

/// Recomputes every quantity of a case and the associated checker report.
fn compute(case: &RegistryCase, tol: f64) -> Result<(TrialReport, Vec<(String, f64)>)> {
    let mut q = Vec::new();
    let report = match case.case_id {
        "q1.angle2x2" => {
            let r = check_q1(case.matrix("A"), case.matrix("B"), &case.function, tol)?;
            push_vec(
                &mut q,
                "eig_g_abs_diff",
                &f64s(&r.details["eig_g_abs_diff"]),
            );
            push_vec(&mut q, "eig_g_diff", &f64s(&r.details["eig_g_diff"]));
            q.push(("margin".into(), r.margin));
            r
        }
        "q3.min3x3" => {
            let r = check_q3(case.matrix("B"), case.matrix("Delta"), &case.function, tol)?;
            q.push((
                "op_norm_f_delta".into(),
                r.details["op_norm_f_delta"].as_f64().unwrap_or(f64::NAN),
            ));
            q.push((
                "op_norm_difference".into(),
                r.details["op_norm_difference"].as_f64().unwrap_or(f64::NAN),
            ));
            q.push(("margin".into(), r.margin));
            r
        }
        "q2.delta_xy" => {
            let (x, y) = (case.matrix("X"), case.matrix("Y"));
            let t = 1.0;
            let basis = DeltaBasis::new(y, None)?;
            let hinge_y = basis.decomposition().positive_part_shifted(t);
            let c = &positive_part(&(x + y).shift(-t))? - &positive_part(&x.shift(-t))?;
            let y_plus_c = y + &c;
            push_vec(&mut q, "delta_hinge_y", &basis.delta(&hinge_y)?.entries);
            push_vec(&mut q, "delta_c", &basis.delta(&c)?.entries);
            let c_in_basis = c.conjugate(&basis.decomposition().frame.adjoint());
            q.push(("c_11_in_y_basis".into(), c_in_basis.get(0, 0).re));
            push_vec(&mut q, "delta_y", &basis.delta(y)?.entries);
            push_vec(&mut q, "delta_y_plus_c", &basis.delta(&y_plus_c)?.entries);
            q.push(("min_eig_y_plus_c".into(), y_plus_c.min_eigenvalue()?));
            let v = a_majorizes_in(&basis, &hinge_y, &c, tol)?;
            let v1 = a_majorizes_in(&basis, y, &y_plus_c, tol)?;
            q.push(("a_major_deficit".into(), v.deficit));
            q.push(("a_major_deficit_alpha1".into(), v1.deficit));
            TrialReport::new(case.checker_id, v.deficit, v.worst_k)
                .with_matrix("X", x)
                .with_matrix("Y", y)
                .with_scalar("t", t)
                .with_detail("a_majorization", &v)
                .with_detail("a_majorization_alpha1", &v1)
        }
        "q2.g101" => {
            let (x, y) = (case.matrix("X"), case.matrix("Y"));
            let r = check_q2(x, y, &case.function, tol)?;
            let diff = f64s(&r.star.details["eig_difference"]);
            push_vec(&mut q, "eig_difference", &diff);
            push_vec(&mut q, "eig_g_delta", &f64s(&r.star.details["eig_g_delta"]));
            q.push(("star_margin".into(), r.star.margin));
            let k1 = if r.star.worst_k == 1 {
                r.star.margin
            } else {
                f64::NAN
            };
            q.push(("star_fails_at_k1".into(), k1));
            q.push((
                "min_eig_difference".into(),
                diff.last().copied().unwrap_or(f64::NAN),
            ));
            r.star.with_detail("norm_margin", r.norm.margin)
        }
        _ => unreachable!("registry case without a recipe"),
    };
    Ok((report, q))
}

/// Recomputes the registry case and compares against its expected values.
pub fn reproduce(case_id: &str) -> Result<ReproduceOutcome> {
    let case = case(case_id)?;
    let (report, computed) = compute(&case, 1e-12)?;
    let quantities: Vec<QuantityCheck> = case
        .expected
        .iter()
        .map(|e| {
            let x = computed
                .iter()
                .find(|(id, _)| id == e.id)
                .map(|(_, x)| *x)
                .unwrap_or(f64::NAN);
            QuantityCheck {
                id: e.id,
                computed: x,
                expect: e.expect,
                ok: e.expect.accepts(x),
            }
        })
        .collect();
    let passed = quantities.iter().all(|q| q.ok);
    let report = report
        .with_detail("case", case.case_id)
        .with_detail("quantities", &quantities)
        .with_detail("passed", passed);
    Ok(ReproduceOutcome {
        report,
        quantities,
        passed,
    })
}
