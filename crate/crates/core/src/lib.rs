//! Entanglement and classical-correlation measures for finite-dimensional
//! density operators, plus a harness that checks the monogamy identities and
//! inequalities relating them.
//!
//! All entropies are in bits. Multipartite states use a lexicographic product
//! basis with the leftmost subsystem most significant.

pub mod entropy;
pub mod error;
pub mod io;
pub mod keyrates;
pub mod linalg;
pub mod monogamy;
pub mod povm;
pub mod qstate;
pub mod squashed;
pub mod variational;

pub use error::{Error, Result};
pub use povm::{LabeledEnsemble, Povm};
pub use qstate::{catalog, CatalogEntry, PureState, QState, State};
