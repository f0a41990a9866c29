//! Guillotine-operad calculus for two-dimensional lattice Markov processes.
//!
//! The crate is organised bottom-up:
//!
//! - [`tensor`]: boundary tensor spaces `T_{p,q}` with the West-East and
//!   South-North gluing products and the dihedral symmetries.
//! - [`lattice`]: face weights, partition functions (operadic and brute force),
//!   exact laws on small rectangles, marginal boundary weights, observables and
//!   gauge transforms.
//! - [`rope`]: rectangular operator product environments, i.e. boundary weights
//!   written as traced matrix products around the rectangle, together with their
//!   constructors, combinations and the restriction to inner rectangles.
//! - [`eigen`]: Perron-Frobenius machinery and the half-strip / corner / full-plane
//!   eigen-equations checked numerically, with exact builders for the two solvable
//!   benchmark models.
//! - [`gibbs`]: consistency of boundary families, closed-form partition functions,
//!   free energies and correlation functions along horizontal lines.
//!
//! Everything is `no_std` + `alloc`; file formats and the command-line driver live
//! in the companion `guillotine-cli` crate.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod eigen;
pub mod error;
pub mod gibbs;
pub mod lattice;
pub mod linalg;
pub mod math;
pub mod rope;
pub mod tensor;

pub use error::{Error, Result};
pub use lattice::{FaceWeight, Offsets, RectLaw};
pub use linalg::Matrix;
pub use rope::{Rope, RopeRep};
pub use tensor::{Boundary, Dihedral, GuillotineTensor, Limits, Shape, StateSpaces};
