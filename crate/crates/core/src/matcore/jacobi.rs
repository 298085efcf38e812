use num_complex::Complex64;

use super::{CMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Converged when the off-diagonal Frobenius norm drops below this multiple
/// of the input's Frobenius norm.
const OFF_DIAGONAL_RTOL: f64 = 1e-13;

/// Eigenvalues sorted non-increasing, with the unitary frame whose column
/// `j` is an eigenvector for `eigenvalues[j]`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    pub frame: CMatrix,
}

impl SpectralDecomposition {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `frame * diag(values) * frame^*`.
    pub fn reconstruct_with(&self, values: &[f64]) -> HermitianMatrix {
        let n = self.n();
        assert_eq!(values.len(), n);
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for (j, &lam) in values.iter().enumerate() {
            if lam == 0.0 {
                continue;
            }
            for r in 0..n {
                let ur = self.frame.get(r, j) * lam;
                for c in 0..n {
                    out[r * n + c] += ur * self.frame.get(c, j).conj();
                }
            }
        }
        HermitianMatrix::symmetrized(n, out)
    }

    pub fn reconstruct(&self) -> HermitianMatrix {
        self.reconstruct_with(&self.eigenvalues)
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Ties in the eigenvalue ordering are broken by ascending Jacobi column
/// index, so the result is a deterministic function of the input bits.
pub fn eigh(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let n = h.n();
    let mut a: Vec<Complex64> = h.data().to_vec();
    let mut v = CMatrix::identity(n);
    let norm = h.frobenius();
    let target = OFF_DIAGONAL_RTOL * norm;

    let mut converged = n == 1 || norm == 0.0;
    let mut sweeps = 0;
    while !converged {
        if off_diagonal(&a, n) <= target {
            converged = true;
            break;
        }
        if sweeps == MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NonConvergence {
            sweeps,
            residual: off_diagonal(&a, n),
        });
    }

    let diag: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    // Stable sort keeps ascending column index among ties.
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).expect("NaN eigenvalue"));

    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut frame = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for r in 0..n {
            frame.set(r, dst, v.get(r, src));
        }
    }
    Ok(SpectralDecomposition { eigenvalues, frame })
}

fn off_diagonal(a: &[Complex64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `G = diag(1, e^{-i phi}) * R(theta)`
/// acting on coordinates (p, q), updating `a <- G^* a G` and `v <- v G`.
fn rotate(a: &mut [Complex64], v: &mut CMatrix, n: usize, p: usize, q: usize) {
    let b = a[p * n + q];
    let mag = b.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
        sign / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase = (b / mag).conj();

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase * (-s);
    let g_qq = phase * c;

    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = akp * g_pp + akq * g_qp;
        a[k * n + q] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[q * n + k] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[p * n + q] = Complex64::new(0.0, 0.0);
    a[q * n + p] = Complex64::new(0.0, 0.0);
    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);

    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * g_pp + vkq * g_qp);
        v.set(k, q, vkp * g_pq + vkq * g_qq);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{random_hermitian, random_psd, rng_from_seed};

    fn check_invariants(h: &HermitianMatrix) {
        let d = eigh(h).unwrap();
        assert!(d.frame.unitarity_defect() <= 1e-10);
        let rec = d.reconstruct();
        assert!(rec.max_abs_diff(h) <= 1e-9 * (1.0 + h.max_abs()));
        for w in d.eigenvalues.windows(2) {
            assert!(w[0] >= w[1]);
        }
    }

    #[test]
    fn diagonal_input_is_fixed_point() {
        let d = eigh(&HermitianMatrix::diag(&[2.0, 1.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![2.0, 1.0]);
        assert_eq!(d.frame, CMatrix::identity(2));
    }

    #[test]
    fn pauli_x_spectrum() {
        let x = HermitianMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let d = eigh(&x).unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((d.eigenvalues[1] + 1.0).abs() < 1e-15);
        check_invariants(&x);
    }

    #[test]
    fn pauli_y_complex_entries() {
        let y = HermitianMatrix::from_complex(
            2,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -1.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        let d = eigh(&y).unwrap();
        assert!((d.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((d.eigenvalues[1] + 1.0).abs() < 1e-14);
        check_invariants(&y);
    }

    #[test]
    fn ties_sorted_by_column_index() {
        let d = eigh(&HermitianMatrix::diag(&[1.0, 3.0, 1.0])).unwrap();
        assert_eq!(d.eigenvalues, vec![3.0, 1.0, 1.0]);
        assert_eq!(d.frame.get(0, 1), Complex64::new(1.0, 0.0));
        assert_eq!(d.frame.get(2, 2), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn random_matrices_reconstruct() {
        let mut rng = rng_from_seed(11);
        for n in [1, 2, 3, 5, 8, 16, 33, 64] {
            check_invariants(&random_hermitian(&mut rng, n));
            check_invariants(&random_psd(&mut rng, n));
        }
    }

    #[test]
    fn deterministic_bits() {
        let mut rng = rng_from_seed(5);
        let h = random_hermitian(&mut rng, 7);
        let a = eigh(&h).unwrap();
        let b = eigh(&h).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.frame, b.frame);
    }

    #[test]
    fn zero_matrix() {
        let d = eigh(&HermitianMatrix::zeros(3)).unwrap();
        assert_eq!(d.eigenvalues, vec![0.0; 3]);
    }
}
