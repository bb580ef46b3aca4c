//! Shape-space machinery for stereo-vision point configurations.
//!
//! Scenes are 4×n matrices of homogeneous coordinates acted on by
//! `A ↦ g·A·diag(d)`. The crate provides the matrix classes and
//! numerical-rank predicates ([`linalg`]), the full and restricted
//! group actions with freeness and properness witnesses ([`action`]),
//! the perspective map and its compensating diagonal ([`projection`]),
//! an orbit-equivalence decision procedure ([`equivalence`]), a
//! finite-structure consistency checker ([`consistency`]), shared file
//! formats ([`io`]), and randomized verification batteries ([`suites`])
//! that run on rayon under the default `parallel` feature and
//! sequentially without it.

pub mod action;
pub mod consistency;
pub mod equivalence;
pub mod error;
pub mod io;
pub mod linalg;
pub mod projection;
pub mod seeding;
pub mod suites;
pub mod svd;

pub use action::{FullTransform, RestrictedTransform};
pub use consistency::{AutomorphismGroup, FiniteStructure, RepresentationMap};
pub use equivalence::{EquivalenceDecision, EquivalenceStatus};
pub use error::{Error, Result};
pub use linalg::{ConfigClass, ConfigMatrix, Tolerances};
pub use projection::ImageMatrix;
