//! Weighted Bergman spaces of polynomials restricted to `X`.

mod basis;
mod state;
mod sup;

pub use basis::{dimension, grlex, MonomialBasis};
pub use state::{KernelState, Scaled, StateKind, StateParts, PIVOT_FLOOR};
pub use sup::{sup_metric, SupMetric};
