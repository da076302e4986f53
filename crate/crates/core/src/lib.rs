//! Equilibria of economies whose producers borrow against a fraction of
//! their project value.
//!
//! * [`linear`] solves two-period economies with linear technologies exactly.
//! * [`concave`] handles strictly concave technologies by bisection on
//!   aggregate capital demand.
//! * [`sensitivity`] differentiates equilibrium output, runs parameter
//!   sweeps and checks when productivity shocks lower output.
//! * [`ramsey`] builds closed-form equilibrium paths of the infinite-horizon
//!   model with log utility and verifies them from first-order conditions.
//!
//! ```
//! use credeq::econ::StaticEconomy;
//! use credeq::linear::solve_equilibrium_linear;
//!
//! let econ = StaticEconomy::linear(&[0.9, 1.0], &[0.2, 0.2], &[1.0, 0.7]);
//! let eq = solve_equilibrium_linear(&econ).unwrap();
//! assert!((eq.y - 1.62).abs() < 1e-12);
//! ```

pub mod concave;
pub mod econ;
pub mod error;
pub mod linear;
pub mod ramsey;
pub mod sensitivity;
mod roots;

pub use error::{Error, Result};
pub use roots::golden_section_min;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub mod intro {}
    #[doc = include_str!("../../../book/src/linear.md")]
    pub mod linear {}
    #[doc = include_str!("../../../book/src/concave.md")]
    pub mod concave {}
    #[doc = include_str!("../../../book/src/sensitivity.md")]
    pub mod sensitivity {}
    #[doc = include_str!("../../../book/src/ramsey.md")]
    pub mod ramsey {}
}
