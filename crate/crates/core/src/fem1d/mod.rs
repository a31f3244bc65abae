//! C¹ Galerkin discretization of `ε²u'''' − (bu')' + cu = f` with clamped
//! ends on the 1D SBL mesh.

pub mod galerkin;
pub mod norms;
pub mod problem;
pub mod space;

pub use galerkin::{
    assemble_1d, bilinear_discrete, galerkin_residual, solve_1d, solve_on_mesh, Assembled1D,
};
pub use norms::{energy_norm, mesh_integrals, norms_1d, sampled_max, Integrals, NormReport};
pub use problem::{
    Decomposition1D, Difference, ExactSolution1D, Field1D, FiniteDifference, ProblemSpec1D,
    ScalarFn, Zero,
};
pub use space::{DiscreteField1D, DofMap1D};
