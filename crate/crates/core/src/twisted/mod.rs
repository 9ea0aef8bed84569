//! Twisted cochains on simplicial bases with values in strictly upper
//! triangular endomorphisms of graded posets, the twisted tensor product
//! they define, and the block-diagonalisation lemma for extensions.

mod family;
pub mod fixtures;
mod json;
mod poset;
mod splitting;
mod total;

pub use family::DeltaFamily;
pub use json::{CochainJson, FamilyJson};
pub use poset::{Element, GradedPoset, UTEndomorphism};
pub use splitting::{contraction, is_acyclic, kill_cross_term, CrossTermKill};
pub use total::{fiber_homology, homology_ranks, kunneth, total_complex, TwistedTensorProduct};
