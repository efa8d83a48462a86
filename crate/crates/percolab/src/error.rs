use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A domain precondition was violated (non-positive radius, bad range...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature ran out of subdivisions before reaching the
    /// requested tolerance. Carries the best estimate and what was achieved.
    #[error(
        "quadrature did not converge: achieved error {achieved:.3e}, requested {requested:.3e} \
         (best estimate {value:.9e})"
    )]
    QuadratureNonConvergence {
        value: f64,
        achieved: f64,
        requested: f64,
    },

    /// An empirical estimator was asked for but no secondary user sees an
    /// opportunity in the sample.
    #[error("empty sample: no secondary user sees an opportunity")]
    EmptySample,

    /// The crossing probability is below the threshold even with no primary
    /// transmitters, so no boundary density exists at this secondary density.
    #[error(
        "secondary density {lambda_s:.6e} m^-2 is below takeoff: crossing probability \
         {crossing_at_zero:.3} at zero primary density is below threshold {threshold}"
    )]
    BelowTakeoff {
        lambda_s: f64,
        crossing_at_zero: f64,
        threshold: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
