use thiserror::Error;

/// Errors surfaced by the physics and numerics layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Arguments violate a precondition (non-positive Q, sign mismatch, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A value falls outside a declared validity range (e.g. dispersion band).
    #[error("out of range: {0}")]
    Range(String),

    /// The phase `ω·n_eff(ω)·R/c` is not monotone on the requested band, so
    /// the resonance comb is not uniquely defined.
    #[error("ambiguous resonance comb: {0}")]
    AmbiguousComb(String),

    /// Mode-profile or JSA grids do not line up.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// An iterative routine hit its budget before reaching tolerance.
    #[error("failed to converge: {0}")]
    NonConvergence(String),

    /// A dense linear-algebra backend call failed.
    #[error("linear algebra error: {0}")]
    Linalg(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed data in {path}: {msg}")]
    Malformed { path: String, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
