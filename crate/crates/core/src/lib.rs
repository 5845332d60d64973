//! Nyström solver and localization certificates for systems of two
//! Hammerstein integral equations
//!
//! ```text
//! u(t) = ∫₀¹ k1(t, s) f(s, u(s), v(s)) ds
//! v(t) = ∫₀¹ k2(t, s) g(s, u(s), v(s)) ds
//! ```
//!
//! The crate checks, on grids and by quadrature, the integral conditions
//! that place a solution in a conical shell for `u` times an order interval
//! or a ball for `v`, computes solutions by Newton–Nyström or damped Picard
//! iteration, and confirms that the computed solution lands where the
//! conditions predict.
//!
//! All checks are numerical and sampling-based; nothing here is a rigorous
//! computer-assisted proof.

pub mod certify;
pub mod expr;
pub mod grid;
pub mod kernels;
pub mod operators;
pub mod presets;
pub mod quadrature;
pub mod solve;

pub use expr::Expression;
pub use grid::GridFunction;
pub use kernels::{ConeData, Kernel};
pub use operators::{Nystrom, Problem};
