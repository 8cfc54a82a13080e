//! Orthogonal polynomials of a discrete variable with their ladder
//! structure and continuum limits, a Cayley-transform Heisenberg stepper
//! for Hamiltonians in `qp + pq`, and a lattice Dirac operator whose
//! plane-wave dispersion is `k = (2/ε) tan(πm/N)`.

pub mod continuum;
pub mod dirac;
pub mod discrete_time;
pub mod error;
pub mod families;
pub mod numeric;
pub mod poly;

pub use error::{Error, Result};
pub use families::{make_family, FamilyKind, FamilyParams, IdentityId};
pub use numeric::Residual;
pub use poly::{DiscreteFamily, OrthonormalTable, Support};
