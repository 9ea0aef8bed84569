//! Closed-form torsion calculators and the combinators relating them.
//!
//! Degrees follow the torsion index: a class of degree `k` has a body in
//! cohomological degree `2k`. Real torsion of sphere bundles and even
//! dimensional closed fibers lives in degree `2k` (body degree `4k`).

mod checks;
mod class;
mod formulas;
mod framing;

pub use checks::{compare_checks, unoriented_relations, verify_complex_transfer, verify_lens_paths};
pub use class::{Comparison, Constant, Term, TermJson, TorsionClass, TorsionJson};
pub use formulas::{
    boundary_corrected_complex_torsion, complex_torsion_closed, real_even_closed,
    torsion_circle_bundle, torsion_combinators, torsion_lens_bundle, torsion_lens_via_splitting,
    torsion_sphere_bundle, Combinator,
};
pub use framing::{complex_framing_pushdown, framing_correction, MorseSection, MorseSectionData};
