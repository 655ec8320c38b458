use thiserror::Error;

/// Errors surfaced by evaluators, operators and samplers.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the analyticity / admissibility region of the target.
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature failed to converge to the requested tolerance.
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// The Bernstein function is not in B (phi'(0+) diverges).
    #[error("not in class B: {0}")]
    NotInB(String),

    /// An integer-product evaluation left the f64 range; use the log-space variant.
    #[error("overflow: {0}")]
    Overflow(String),

    /// The requested operation has no supported route for this spec.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Series argument on or outside the convergence disk |z| < phi(inf).
    #[error("outside series radius: {0}")]
    Radius(String),

    /// Series truncation budget exhausted before reaching tolerance.
    #[error("series did not converge: {0}")]
    NonConvergence(String),

    /// No admissible Mellin-Barnes contour abscissa exists.
    #[error("contour placement failed: {0}")]
    Contour(String),

    /// A simulated path never reached the target level inside the horizon.
    #[error("simulation horizon exceeded: {0}")]
    Horizon(String),

    /// Inconsistent simulation configuration.
    #[error("bad configuration: {0}")]
    Config(String),

    /// Malformed spec string / config file.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
