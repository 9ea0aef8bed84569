//! Higher Franz-Reidemeister torsion and higher complex torsion.
//!
//! The crate is organised around the objects the torsion calculus needs:
//!
//! * [`charclass`]: exact truncated cohomology rings and Chern-character
//!   calculus through the splitting principle.
//! * [`polylog`]: certified evaluation of `L_{k+1}` on roots of unity and
//!   odd zeta values.
//! * [`torsion`]: closed-form torsion calculators and the algebraic
//!   combinators relating them.
//! * [`twisted`]: twisted cochains, twisted tensor products and their
//!   homology.
//! * [`kamber_tondeur`]: numerical Kamber-Tondeur cochains of matrix
//!   families.
//! * [`transfer`]: simplicial transfers along finite coverings and graded
//!   push-downs.
//!
//! [`suite`] bundles the invariant checks into named verification suites
//! producing [`report::Report`] values.

pub mod charclass;
pub mod kamber_tondeur;
pub mod error;
pub mod linalg;
pub mod polylog;
pub mod rational;
pub mod report;
pub mod simplicial;
pub mod suite;
pub mod torsion;
pub mod transfer;
pub mod twisted;

pub use error::{Error, Result};
pub use rational::Q;
