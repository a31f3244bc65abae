//! Spectral boundary layer meshes in one and two dimensions.

pub mod mesh1d;
pub mod mesh2d;

pub use mesh1d::{build_mesh_1d, Region1D, SblMesh1D};
pub use mesh2d::{
    apply_needle_split, build_asymptotic_mesh_disk, build_sbl_mesh_disk, Element2D, ElementMap,
    ElementTag, ParentMap, RefEdge, SblMesh2D,
};
