use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("non-finite value {what} at |ζ| = {at}")]
    NonFinite { what: &'static str, at: f64 },
    #[error("point |ζ| = {at} is not on the boundary (rho = {rho:e})")]
    NotOnBoundary { at: f64, rho: f64 },
    #[error("Levi form is not negative definite at |ζ| = {at} (max eigenvalue {max_eig:e})")]
    NotPseudoconcave { at: f64, max_eig: f64 },
    #[error("tangential curvature of the weight is negative at |ζ| = {at} (slope {slope:e})")]
    NegativeSlope { at: f64, slope: f64 },
    #[error("matrix is not positive definite (pivot {pivot:e} at step {step})")]
    NotPositiveDefinite { step: usize, pivot: f64 },
    #[error("ill-conditioned Gram matrix: smallest eigenvalue {min_eig:e}")]
    IllConditioned { min_eig: f64 },
    #[error("quadrature did not reach tolerance: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },
    #[error("quadrature rule is under-resolved: {0}")]
    Resolution(String),
    #[error("dimension overflow for n = {n}, k = {k}")]
    Overflow { n: usize, k: usize },
    #[error("kernel vanishes at |ζ| = {at}")]
    SingularPoint { at: f64 },
    #[error("slope function is not constant on the boundary (spread {spread:e})")]
    NonConstantSlope { spread: f64, min: f64, max: f64 },
    #[error("iteration did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}
