//! Manufactured and exact problems with closed-form decompositions.

pub mod bessel;
pub mod catalog1d;
pub mod disk;
pub mod expr;

pub use bessel::{scaled_i0, scaled_i1, BesselOrder};
pub use catalog1d::{catalog_1d, catalog_entry_1d, Catalog1DEntry, CATALOG_1D};
pub use disk::{bessel_exact_disk, bump_disk, catalog_2d, BesselDisk, CATALOG_2D};
pub use expr::{Expr, Term};
