//! Mixed C⁰ rp-FEM for `ε²Δ²u − bΔu + cu = f` on the unit disk.

pub mod approx;
pub mod assembly;
pub mod norms;
pub mod problem;
pub mod space;

pub use approx::{
    bl_size, chi2, chi2_norms, interpolate_gl, nodal_error_integrals, project_regular,
    regular_elements, special_representatives_2d, ProjectionMode, RegularProjection,
    SpecialRepresentatives2D, SumField,
};
pub use assembly::{
    assemble_mixed, galerkin_residual, solve_mixed, solve_mixed_on_mesh, AssembledMixed,
    DiskMeshConfig, MixedNumbering,
};
pub use norms::{error_integrals, field_pair_integrals, norms_2d, NormReport2D, PairIntegrals};
pub use problem::{
    Decomposition2D, Difference2D, ExactSolution2D, Field2D, ProblemSpec2D, RadialField,
    ScalarFn2D, SharedField, ZeroField,
};
pub use space::{DofMap2D, MixedDiscreteField, NodalField};
