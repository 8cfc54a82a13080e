use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Validation(String),

    /// A degree, grid point or index lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A square-root argument of the symmetric difference operator went negative.
    #[error("invariant violated: {factor} = {value} is negative at x = {x}")]
    NegativeRadicand {
        factor: &'static str,
        x: i64,
        value: f64,
    },

    /// The truncated tail of a semi-infinite support carries too much mass.
    #[error("truncation tail mass {tail:e} at X_max = {x_max} exceeds {threshold:e}; use X_max >= {suggested}")]
    Truncation {
        x_max: usize,
        tail: f64,
        threshold: f64,
        suggested: usize,
    },

    /// The Cayley resolvent is (numerically) singular for the requested step.
    #[error("step size {eps} gives resolvent condition number {condition:e}")]
    StepSize { eps: f64, condition: f64 },

    /// Lattice momentum requested at the tangent pole m = N/2.
    #[error("mode index m = {m} hits the tangent pole of an N = {n} lattice")]
    Pole { m: usize, n: usize },

    /// Every basis seed was annihilated by the on-shell projector.
    #[error("degenerate spinor seed: projector annihilated all basis vectors")]
    DegenerateSeed,

    /// Combinatorial guard for the symmetrized products.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
