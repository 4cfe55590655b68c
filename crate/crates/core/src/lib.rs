//! Gauss maps of hypersurfaces of the unit sphere as Lagrangian immersions
//! into the complex hyperquadric, with residual checks of their structure.

pub mod catalog;
pub mod cli;
pub mod error;
pub mod gauss;
pub mod numeric;
pub mod quadric;
pub mod rotational;
pub mod verify;
