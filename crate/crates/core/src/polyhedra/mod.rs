//! Open homogeneous cones decided by exact linear programming.

mod cone;
mod simplex;

pub use cone::{format_inequality, primitive, StrictCone};
pub use simplex::{LinearProgram, LpOutcome, Relation};
