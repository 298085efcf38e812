//! Results checked against values computed independently in test code.

use majolab::ineq::{
    block_majorization, check_q1, check_q2, check_q3, check_superadd_convex, check_thm1, check_tru,
};
use majolab::matcore::{random_psd, rng_from_seed};
use majolab::specfun::{sample_concave, sample_convex, ClosedForm, PiecewiseFn};
use majolab::HermitianMatrix;
use num_complex::Complex64;
use rand::Rng;

fn eig2(a: f64, d: f64, z: Complex64) -> [f64; 2] {
    let m = 0.5 * (a + d);
    let r = (0.25 * (a - d) * (a - d) + z.norm_sqr()).sqrt();
    [m + r, m - r]
}

/// Closed-form eigenvalues of a real symmetric 3x3 matrix.
fn eig3(m: [[f64; 3]; 3]) -> [f64; 3] {
    let p1 = m[0][1].powi(2) + m[0][2].powi(2) + m[1][2].powi(2);
    let q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
    let p2 = (0..3).map(|i| (m[i][i] - q).powi(2)).sum::<f64>() + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            b[i][j] = (m[i][j] - if i == j { q } else { 0.0 }) / p;
        }
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let phi = (det / 2.0).clamp(-1.0, 1.0).acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    [l1, 3.0 * q - l1 - l3, l3]
}

/// `max_k sum of top k |x|` minus the same for `y`.
fn kyfan_gap(x: &[f64], y: &[f64]) -> f64 {
    let sorted = |v: &[f64]| {
        let mut a: Vec<f64> = v.iter().map(|t| t.abs()).collect();
        a.sort_by(|p, q| q.total_cmp(p));
        a
    };
    let (x, y) = (sorted(x), sorted(y));
    let (mut sx, mut sy, mut best) = (0.0, 0.0, f64::NEG_INFINITY);
    for k in 0..x.len() {
        sx += x[k];
        sy += y[k];
        best = f64::max(best, sx - sy);
    }
    best
}

fn g(f: &PiecewiseFn, x: f64) -> f64 {
    f.eval(x).unwrap()
}

#[test]
fn two_by_two_closed_form() {
    let mut rng = rng_from_seed(11);
    for _ in 0..500 {
        let (a, d) = (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let z = Complex64::new(rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0));
        let h = HermitianMatrix::from_complex(
            2,
            vec![Complex64::new(a, 0.0), z, z.conj(), Complex64::new(d, 0.0)],
        )
        .unwrap();
        let got = h.eigenvalues().unwrap();
        let want = eig2(a, d, z);
        for k in 0..2 {
            assert!((got[k] - want[k]).abs() <= 1e-12 * (1.0 + want[0].abs()));
        }
    }
}

#[test]
fn three_by_three_trigonometric() {
    let mut rng = rng_from_seed(12);
    for _ in 0..500 {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in i..3 {
                m[i][j] = rng.random_range(-3.0..3.0);
                m[j][i] = m[i][j];
            }
        }
        let flat: Vec<f64> = m.iter().flatten().copied().collect();
        let got = HermitianMatrix::from_real(3, &flat)
            .unwrap()
            .eigenvalues()
            .unwrap();
        let want = eig3(m);
        for k in 0..3 {
            assert!((got[k] - want[k]).abs() <= 1e-9, "{got:?} vs {want:?}");
        }
    }
}

#[test]
fn trace_inequality_matches_direct_eigenvalues() {
    for seed in 0..200 {
        let mut rng = rng_from_seed(seed);
        let n = rng.random_range(2..=5);
        let a = random_psd(&mut rng, n);
        let b = random_psd(&mut rng, n);
        assert!(block_majorization(&a, &b, 1e-9).unwrap().holds);
        let (ea, eb, es) = (
            a.eigenvalues().unwrap(),
            b.eigenvalues().unwrap(),
            (&a + &b).eigenvalues().unwrap(),
        );
        for u in [0.0, 0.3, 1.0, 2.5] {
            let tp = |v: &[f64]| v.iter().map(|x| (x - u).max(0.0)).sum::<f64>();
            let r = check_tru(&a, &b, u, 1e-9).unwrap();
            assert!((r.margin - (tp(&ea) + tp(&eb) - tp(&es))).abs() <= 1e-10);
            assert!(r.margin <= 1e-9);
        }
    }
}

#[test]
fn diagonal_pairs_reduce_to_scalars() {
    let mut rng = rng_from_seed(13);
    for seed in 0..300 {
        let n = rng.random_range(1..=5);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
        let (dx, dy) = (HermitianMatrix::diag(&x), HermitianMatrix::diag(&y));
        let conv = sample_convex(seed, 4, 1.0);
        let conc = sample_concave(seed, 4, 1.0).with_constant(0.0);

        let lhs: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(a, b)| g(&conv, (a - b).abs()))
            .collect();
        let rhs: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(a, b)| g(&conv, *a) - g(&conv, *b))
            .collect();
        let q1 = check_q1(&dx, &dy, &conv, 1e-9).unwrap();
        assert!((q1.margin - kyfan_gap(&lhs, &rhs)).abs() <= 1e-10);
        assert!(q1.margin <= 1e-12);

        let lhs: Vec<f64> = y.iter().map(|d| g(&conv, *d)).collect();
        let rhs: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(b, d)| g(&conv, b + d) - g(&conv, *b))
            .collect();
        let q2 = check_q2(&dx, &dy, &conv, 1e-9).unwrap();
        assert!((q2.norm.margin - kyfan_gap(&lhs, &rhs)).abs() <= 1e-10);
        assert!(q2.norm.margin <= 1e-12 && q2.difference_psd);

        let lhs: Vec<f64> = x
            .iter()
            .zip(&y)
            .map(|(b, d)| g(&conc, b + d) - g(&conc, *b))
            .collect();
        let rhs: Vec<f64> = y.iter().map(|d| g(&conc, *d)).collect();
        let q3 = check_q3(&dx, &dy, &conc, 1e-9).unwrap();
        assert!((q3.margin - kyfan_gap(&lhs, &rhs)).abs() <= 1e-10);
        assert!(q3.margin <= 1e-12);
    }
}

#[test]
fn scalar_superadditivity() {
    let gf = PiecewiseFn::convex_angle(1.0, 1.0).unwrap();
    let r = check_superadd_convex(
        &HermitianMatrix::diag(&[2.0]),
        &HermitianMatrix::diag(&[3.0]),
        &gf,
        1e-9,
    )
    .unwrap();
    assert!((r.margin - (8.0 - 9.0)).abs() <= 1e-12);
}

#[test]
fn sqrt_on_scalar_matrices() {
    let a = HermitianMatrix::identity(3).scale(4.0);
    let b = HermitianMatrix::identity(3);
    let r = check_thm1(&a, &b, &ClosedForm::Sqrt, 1e-9).unwrap();
    assert!((r.margin - (1.0 - 3f64.sqrt())).abs() <= 1e-12);
}
