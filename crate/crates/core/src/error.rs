use thiserror::Error;

/// Errors raised by the scattering, transformation and bound machinery.
///
/// The `Display` output always starts with the variant name so that
/// command-line callers can report the violated condition verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("UnknownProfile: no potential named `{0}`")]
    UnknownProfile(String),

    #[error("UnknownParam: profile `{profile}` has no parameter `{param}`")]
    UnknownParam { profile: String, param: String },

    #[error("InvalidParam: {0}")]
    InvalidParam(String),

    #[error("InvalidEnergy: E = {energy} must exceed max(V(-inf), V(+inf)) = {threshold}")]
    InvalidEnergy { energy: f64, threshold: f64 },

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("NonConvergent: T still changed by {last_change:e} (relative) at {grid_size} segments")]
    NonConvergent { last_change: f64, grid_size: usize },

    #[error("NoOracle: no closed-form transmission for `{0}`")]
    NoOracle(String),

    #[error("NonPositive: trial function value {value} <= 0 at x = {x}")]
    NonPositive { x: f64, value: f64 },

    #[error("DivergentAsymptotics: {0}")]
    DivergentAsymptotics(String),

    #[error("PreconditionFailed: {0}")]
    PreconditionFailed(String),

    #[error("ForbiddenRegionPresent: k^2 < 0 on part of the domain (min k^2 = {min_k2:e})")]
    ForbiddenRegionPresent { min_k2: f64 },

    #[error("AsymmetricAsymptotics: k(-inf) = {k_minus} differs from k(+inf) = {k_plus}")]
    AsymmetricAsymptotics { k_minus: f64, k_plus: f64 },

    #[error("InvalidDelta: {0}")]
    InvalidDelta(String),

    #[error("DivergentBound: the bound integral does not converge (T >= sech^2(inf) = 0)")]
    DivergentBound,

    #[error("ToleranceNotMet: quadrature estimate {estimate:e} with error {error:e}")]
    ToleranceNotMet { estimate: f64, error: f64 },

    #[error("NoConvergence: {0}")]
    NoConvergence(String),

    #[error("ForbiddenRegionUnresolved: {0}")]
    ForbiddenRegionUnresolved(String),
}

impl Error {
    /// True for errors that report a violated assumption of a bound or
    /// transform, as opposed to a numerical failure.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::NonPositive { .. }
                | Error::DivergentAsymptotics(_)
                | Error::PreconditionFailed(_)
                | Error::ForbiddenRegionPresent { .. }
                | Error::AsymmetricAsymptotics { .. }
                | Error::InvalidDelta(_)
                | Error::InvalidEnergy { .. }
                | Error::NoOracle(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
