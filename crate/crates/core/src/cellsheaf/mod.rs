//! Cellular sheaves on finite face posets and their derived machinery.
//!
//! Cells are indexed `0..n_cells`; open sets are upward-closed cell sets,
//! closed sets downward-closed. Sheaf cohomology of compact (closed
//! regular) models is computed by the incidence cochain complex; the
//! injective-resolution machinery computes hypercohomology on every poset
//! and realizes supported sections and open pushforwards termwise.

mod complexes;
mod poset;
mod resolution;
mod sheaf;

pub use complexes::{
    cohomology_sheaf, flatten, flatten_map, gamma_comparison, gamma_total,
    gamma_truncation_filtered, restriction_comparison, sheaf_map_space, triv_fixture,
    truncate_sheaf_complex, truncation_filtered, GammaTotal, Hyper, SheafComplex, SheafMap,
    TrivFixture,
};
pub use poset::{CellSet, FacePoset, Flag};
pub use resolution::{
    injective_resolution, resolve_map, rj_star, supported_sections, ElementarySum,
    InjectiveResolution, RjStarData, SupportData,
};
pub use sheaf::{
    flag_filtered_complex, flag_restriction_kernels, gamma_flag_filtered_complex,
    open_section_subcomplex, restriction_map, sheaf_cochains, CellularSheaf, OpenSectionData,
    RestrictionData,
};
