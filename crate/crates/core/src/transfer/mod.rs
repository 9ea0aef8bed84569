//! Transfers along finite simplicial coverings, alternating push-downs over
//! graded sheets, and the cochain-level comparison of Kamber-Tondeur
//! cochains with transfer.

mod cochain;
mod covering;
mod kt;
mod sheets;

pub use cochain::{pullback, transfer_cochain, Coefficient, CochainJson, CochainValue, SimplicialCochain};
pub use covering::CoveringMap;
pub use kt::{
    check_face_compatibility, double_cover_scenario, icosahedron, transfer_expansion_kt, FamilyAssignment,
    SimplexCatalog, VertexMatrix, EXPANSION_TOL,
};
pub use sheets::{cyclic_cover_of_hexagon, euler_fixtures, euler_multiplication_check, pushdown_alternating, GradedSheets, Sheet};
