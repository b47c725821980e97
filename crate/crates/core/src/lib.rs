//! Unfitted space-time finite element kernels for the transport equation on
//! moving level-set domains.
//!
//! The crate covers the computational core: a fixed simplicial background
//! mesh, slab-wise discrete level sets and element classification, cut-cell
//! quadrature (fixed-time and space-time), tensor-product CG×DG(time) spaces
//! restricted to active elements, assembly of the upwind space-time transport
//! form with direct ghost penalty, and error/diagnostic functionals.
//!
//! Everything here is deterministic and IO-free (`no_std` + `alloc`); solvers,
//! drivers and file formats live in the companion crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod forms;
pub mod levelset;
pub mod linalg;
pub mod math;
pub mod mesh;
pub mod quadrature;
pub mod space;
pub mod time;


pub use levelset::{classify_slab, sample_levelset, ElementMark, SlabGeometry, SlabLevelSet};
pub use mesh::{AffineMap, Box2, Mesh, SplitPattern};
pub use quadrature::CutRule;

pub use time::TimePartition;
