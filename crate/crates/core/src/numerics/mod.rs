//! Shared numerical kernels with deterministic, tolerance-controlled
//! contracts: adaptive quadrature, bracketed root finding, monotone cubic
//! interpolation, dense complex SVD and Takagi factorization.

pub mod interp;
pub mod quad;
pub mod roots;
pub mod svd;
pub mod takagi;

pub use interp::Pchip;
pub use quad::{adaptive_quad, adaptive_quad_complex, adaptive_quad_segmented, QuadResult};
pub use roots::{brent, golden_min};
pub use svd::{singular_values, svd, Svd};
pub use takagi::{takagi, Takagi};

use crate::error::{Error, Result};

/// Convergence budget shared by the iterative routines.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    /// Absolute tolerance (units of the quantity being computed).
    pub abs: f64,
    /// Relative tolerance.
    pub rel: f64,
    /// Iteration / subdivision budget.
    pub max_iter: usize,
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64, max_iter: usize) -> Result<Self> {
        if !(abs > 0.0) || !(rel > 0.0) || max_iter == 0 {
            return Err(Error::Domain(format!(
                "tolerances must be positive (abs={abs}, rel={rel}, max_iter={max_iter})"
            )));
        }
        Ok(Self { abs, rel, max_iter })
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { abs: 1e-300, rel: 1e-10, max_iter: 2000 }
    }
}
