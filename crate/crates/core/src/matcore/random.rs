use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{check_dim, eigh, CMatrix, HermitianMatrix};
use crate::error::{Error, Result};

/// Ensembles produced by [`random_matrix`].
#[derive(Clone, Debug, PartialEq)]
pub enum MatrixKind {
    /// `G G^* / n` with complex Gaussian `G`.
    Psd,
    /// `(G + G^*) / (2 sqrt(n))`.
    Hermitian,
    /// Diagonal with `|N(0,1)|` entries sorted non-increasing.
    DiagonalPsd,
    /// `V diag(values) V^*` where the i-th largest distinct value is repeated
    /// `multiplicities[i]` times. Distinct values are at least 0.3 apart.
    PsdDegenerate(Vec<usize>),
    /// Commuting `(A, B)`, diagonal in a shared random frame with both
    /// diagonals sorted non-increasing there.
    CodiagonalPair,
}

#[derive(Clone, Debug)]
pub enum Sample {
    Single(HermitianMatrix),
    Pair(HermitianMatrix, HermitianMatrix),
}

impl Sample {
    pub fn single(self) -> Option<HermitianMatrix> {
        match self {
            Sample::Single(m) => Some(m),
            Sample::Pair(..) => None,
        }
    }

    pub fn pair(self) -> Option<(HermitianMatrix, HermitianMatrix)> {
        match self {
            Sample::Pair(a, b) => Some((a, b)),
            Sample::Single(_) => None,
        }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent sub-seed (splitmix64 finalizer).
pub fn split_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seeded sample from one of the ensembles in [`MatrixKind`].
pub fn random_matrix(seed: u64, n: usize, kind: MatrixKind) -> Result<Sample> {
    check_dim(n)?;
    let mut rng = rng_from_seed(seed);
    Ok(match kind {
        MatrixKind::Psd => Sample::Single(random_psd(&mut rng, n)),
        MatrixKind::Hermitian => Sample::Single(random_hermitian(&mut rng, n)),
        MatrixKind::DiagonalPsd => {
            let mut d: Vec<f64> = (0..n).map(|_| gauss(&mut rng).abs()).collect();
            sort_desc(&mut d);
            Sample::Single(HermitianMatrix::diag(&d))
        }
        MatrixKind::PsdDegenerate(mults) => {
            Sample::Single(random_psd_degenerate(&mut rng, n, &mults)?)
        }
        MatrixKind::CodiagonalPair => {
            let (a, b) = random_codiagonal_pair(&mut rng, n);
            Sample::Pair(a, b)
        }
    })
}

fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

fn sort_desc(v: &mut [f64]) {
    v.sort_by(|a, b| b.partial_cmp(a).expect("NaN"));
}

fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let data = (0..n * n)
        .map(|_| Complex64::new(gauss(rng), gauss(rng)))
        .collect();
    CMatrix::from_vec(n, n, data)
}

pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    let g = gaussian_matrix(rng, n);
    let p = g.mul(&g.adjoint());
    HermitianMatrix::symmetrized(n, p.into_vec()).scale(1.0 / n as f64)
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    let g = gaussian_matrix(rng, n);
    // symmetrized() averages g with g^*.
    HermitianMatrix::symmetrized(n, g.into_vec()).scale(1.0 / (n as f64).sqrt())
}

/// Eigenvector frame of a random Hermitian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    eigh(&random_hermitian(rng, n))
        .expect("Jacobi converges on random input")
        .frame
}

pub fn random_psd_degenerate<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    mults: &[usize],
) -> Result<HermitianMatrix> {
    if mults.is_empty() || mults.contains(&0) || mults.iter().sum::<usize>() != n {
        return Err(Error::InvalidMultiplicities {
            mults: mults.to_vec(),
            n,
        });
    }
    let mut distinct = Vec::with_capacity(mults.len());
    let mut v = 0.1 + 0.5 * rng.random::<f64>();
    for _ in 0..mults.len() {
        distinct.push(v);
        v += 0.3 + 0.7 * rng.random::<f64>();
    }
    distinct.reverse();
    let values: Vec<f64> = distinct
        .iter()
        .zip(mults)
        .flat_map(|(&x, &r)| std::iter::repeat_n(x, r))
        .collect();
    let u = random_unitary(rng, n);
    Ok(HermitianMatrix::diag(&values).conjugate(&u))
}

/// `A` PSD and `B` Hermitian, sharing a random eigenframe in which both
/// diagonals are sorted non-increasing.
pub fn random_codiagonal_pair<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
) -> (HermitianMatrix, HermitianMatrix) {
    let mut da: Vec<f64> = (0..n).map(|_| gauss(rng).abs()).collect();
    let mut db: Vec<f64> = (0..n).map(|_| gauss(rng)).collect();
    sort_desc(&mut da);
    sort_desc(&mut db);
    let u = random_unitary(rng, n);
    (
        HermitianMatrix::diag(&da).conjugate(&u),
        HermitianMatrix::diag(&db).conjugate(&u),
    )
}
