//! Numerical toolkit for the universal orthogonal and unitary compact quantum
//! groups `A_o(F)` and `A_u(F)`.
//!
//! The crate classifies defining matrices, realizes the representation
//! categories as concrete matrix data, transports morphisms along the fiber
//! functors between monoidally equivalent realizations, and builds the
//! truncated linking *-algebras and dual 2-cocycles attached to such pairs.

pub mod category;
pub mod cocycle;
pub mod config;
pub mod diagram;
pub mod error;
pub mod fmatrix;
pub mod io;
pub mod linalg;
pub mod linking;
pub mod random;
pub mod verify;
pub mod word;

pub use category::{FusionMap, JwProjection, MorphismSpace, Realization};
pub use cocycle::CocycleBlocks;
pub use config::Tolerances;
pub use diagram::{Diagram, Morphism};
pub use error::{Error, Result};
pub use fmatrix::{AoParams, AuParams, CanonicalFormAo, FMatrix, Sign};
pub use linking::{BasisIndex, Element, LinkingAlgebra, Side};
pub use word::{Letter, Variant, Word};
