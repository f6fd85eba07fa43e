//! Takagi factorization `A = F · diag(r) · Fᵀ` of a complex symmetric matrix.

use ndarray::{Array2, ArrayView2};
use ndarray_linalg::{Eigh, Norm, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `a = f · diag(r) · fᵀ` with `f` unitary and `r` descending, ≥ 0. The `r`
/// equal the singular values of `a`.
#[derive(Debug, Clone)]
pub struct Takagi {
    pub f: Array2<Complex64>,
    pub r: Vec<f64>,
}

/// Factor a complex symmetric matrix.
///
/// Writes `A = X + iY` and solves the real symmetric eigenproblem of the
/// doubled matrix `[[X, Y], [Y, -X]]`: an eigenpair `(r, [u; w])` gives a
/// con-eigenvector `f = u + i w` with `A f* = r f`, and eigenvalues come in
/// `±r` pairs. Eigenvectors of the positive branch are automatically
/// orthonormal in the complex sense for `r > 0`; a final modified
/// Gram–Schmidt pass cleans up the (unused) near-null columns. This handles
/// degenerate singular values uniformly, with no phase bookkeeping.
pub fn takagi(a: &ArrayView2<Complex64>, sym_tol: f64) -> Result<Takagi> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::Domain(format!("takagi: matrix is {}x{}", n, a.ncols())));
    }
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Domain("takagi: non-finite entries".into()));
    }
    let norm = a.norm_l2();
    let asym = (a.to_owned() - a.t().to_owned()).norm_l2();
    if norm > 0.0 && asym > sym_tol * norm {
        return Err(Error::Domain(format!(
            "takagi: input not symmetric (‖A - Aᵀ‖/‖A‖ = {:.3e} > {:.1e})",
            asym / norm,
            sym_tol
        )));
    }
    if norm == 0.0 {
        return Ok(Takagi { f: Array2::eye(n), r: vec![0.0; n] });
    }

    let mut doubled = Array2::<f64>::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            // Symmetrize away rounding-level asymmetry before embedding.
            let z = 0.5 * (a[(i, j)] + a[(j, i)]);
            doubled[(i, j)] = z.re;
            doubled[(i, j + n)] = z.im;
            doubled[(i + n, j)] = z.im;
            doubled[(i + n, j + n)] = -z.re;
        }
    }

    let (evals, evecs) = doubled
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Linalg(format!("takagi eigh: {e}")))?;

    // eigh returns ascending order; the top n eigenvalues are the +r branch.
    let mut f = Array2::<Complex64>::zeros((n, n));
    let mut r = Vec::with_capacity(n);
    for (col, idx) in (n..2 * n).rev().enumerate() {
        r.push(evals[idx].max(0.0));
        for i in 0..n {
            f[(i, col)] = Complex64::new(evecs[(i, idx)], evecs[(i + n, idx)]);
        }
    }

    // MGS in descending-r order: the large-r columns are already orthonormal,
    // so this only repairs the near-null subspace where ± branches mix.
    for j in 0..n {
        let mut reseed = 0usize;
        loop {
            for k in 0..j {
                let proj: Complex64 = (0..n).map(|i| f[(i, k)].conj() * f[(i, j)]).sum();
                for i in 0..n {
                    let sub = proj * f[(i, k)];
                    f[(i, j)] -= sub;
                }
            }
            let nrm: f64 = (0..n).map(|i| f[(i, j)].norm_sqr()).sum::<f64>().sqrt();
            if nrm > 1e-8 {
                for i in 0..n {
                    f[(i, j)] /= nrm;
                }
                break;
            }
            // Column collapsed under projection (complex-linearly dependent
            // null vectors); reseed from the canonical basis and retry.
            if reseed >= n {
                return Err(Error::Linalg("takagi: could not complete unitary basis".into()));
            }
            for i in 0..n {
                f[(i, j)] =
                    if i == reseed { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            }
            reseed += 1;
        }
    }

    Ok(Takagi { f, r })
}

/// Reconstruction defect `‖A - F diag(r) Fᵀ‖ / ‖A‖` (0.0 for `A = 0` exact).
pub fn reconstruction_defect(a: &ArrayView2<Complex64>, t: &Takagi) -> f64 {
    let mut fr = t.f.clone();
    for (j, rj) in t.r.iter().enumerate() {
        fr.column_mut(j).mapv_inplace(|z| z * rj);
    }
    let rec = fr.dot(&t.f.t());
    let norm = a.norm_l2();
    if norm == 0.0 {
        return if rec.norm_l2() == 0.0 { 0.0 } else { 1.0 };
    }
    (&rec - a).norm_l2() / norm
}
