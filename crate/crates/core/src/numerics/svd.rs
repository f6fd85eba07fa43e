//! Dense complex singular value decomposition (LAPACK divide-and-conquer).

use ndarray::{Array2, ArrayView2};
use ndarray_linalg::{JobSvd, SVDDC};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `a = u · diag(s) · vh` with `u`, `vh` unitary and `s` descending, ≥ 0.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Array2<Complex64>,
    pub s: Vec<f64>,
    pub vh: Array2<Complex64>,
}

fn check_finite(a: &ArrayView2<Complex64>) -> Result<()> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("matrix has non-finite entries".into()));
    }
    Ok(())
}

/// Full SVD of a dense complex matrix.
pub fn svd(a: &ArrayView2<Complex64>) -> Result<Svd> {
    check_finite(a)?;
    let (u, s, vh) = a
        .to_owned()
        .svddc(JobSvd::All)
        .map_err(|e| Error::Linalg(format!("svd: {e}")))?;
    Ok(Svd {
        u: u.expect("JobSvd::All returns U"),
        s: s.to_vec(),
        vh: vh.expect("JobSvd::All returns V^H"),
    })
}

/// Singular values only (much cheaper for convergence loops).
pub fn singular_values(a: &ArrayView2<Complex64>) -> Result<Vec<f64>> {
    check_finite(a)?;
    let (_, s, _) = a
        .to_owned()
        .svddc(JobSvd::None)
        .map_err(|e| Error::Linalg(format!("svd: {e}")))?;
    Ok(s.to_vec())
}
