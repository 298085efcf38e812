use super::{eigh, HermitianMatrix, SpectralDecomposition};
use crate::error::Result;
use crate::specfun::ScalarFn;

/// Eigenvalues in `[-DOMAIN_CLAMP, 0)` are treated as zero by functions
/// restricted to the non-negative axis; anything lower is a domain error.
pub const DOMAIN_CLAMP: f64 = 1e-9;

/// `f(H) = U diag(f(lambda)) U^*`.
pub fn apply_fn<F: ScalarFn + ?Sized>(h: &HermitianMatrix, f: &F) -> Result<HermitianMatrix> {
    let d = eigh(h)?;
    apply_fn_decomposed(&d, f)
}

/// Same as [`apply_fn`] but reuses an existing decomposition.
pub fn apply_fn_decomposed<F: ScalarFn + ?Sized>(
    d: &SpectralDecomposition,
    f: &F,
) -> Result<HermitianMatrix> {
    let values = map_eigenvalues(&d.eigenvalues, f)?;
    Ok(d.reconstruct_with(&values))
}

pub(crate) fn map_eigenvalues<F: ScalarFn + ?Sized>(eigs: &[f64], f: &F) -> Result<Vec<f64>> {
    eigs.iter()
        .map(|&x| crate::specfun::eval_checked(f, x))
        .collect()
}

pub fn abs_matrix(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = eigh(h)?;
    let values: Vec<f64> = d.eigenvalues.iter().map(|x| x.abs()).collect();
    Ok(d.reconstruct_with(&values))
}

/// `H_+ = (H + |H|) / 2`, the image of `x -> max(x, 0)`.
pub fn positive_part(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    let d = eigh(h)?;
    let values: Vec<f64> = d.eigenvalues.iter().map(|x| x.max(0.0)).collect();
    Ok(d.reconstruct_with(&values))
}

impl SpectralDecomposition {
    /// `f` applied through this decomposition.
    pub fn map<F: ScalarFn + ?Sized>(&self, f: &F) -> Result<HermitianMatrix> {
        apply_fn_decomposed(self, f)
    }

    /// `(H - t)_+` through this decomposition.
    pub fn positive_part_shifted(&self, t: f64) -> HermitianMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|x| (x - t).max(0.0)).collect();
        self.reconstruct_with(&values)
    }
}
