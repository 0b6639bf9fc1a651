//! Exact scalars and Laurent polynomials over Gaussian rationals.

mod laurent;
pub mod matrix;
mod number;
mod registry;

pub use laurent::{LaurentPoly, Monomial};
pub use number::{format_rational, int, parse_rational, rat, rational_to_f64, GaussianRational, Rational};
pub use registry::{VarKind, VarRegistry, Variable};
