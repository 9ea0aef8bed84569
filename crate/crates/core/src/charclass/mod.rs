//! Truncated even-degree cohomology rings and characteristic classes of
//! bundles presented through their Chern roots.

mod bundle;
mod newton;
mod ring;

pub use bundle::{
    chern_character_component, half_ch_complexification, half_ch_via_pontryagin, hom_end_bundle,
    pontryagin_classes, rank_class, BundleKind, BundleModel,
};
pub use newton::{elementary_ring, elementary_symmetric, newton_polynomial, verify_newton};
pub use ring::{
    monomial_key, parse_monomial_key, ring_arith, Generator, Monomial, RingClass, RingOp, RingSpec,
};
