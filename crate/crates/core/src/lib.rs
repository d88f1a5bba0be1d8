//! Certified entanglement analysis for low-rank bipartite and tripartite states.
//!
//! Every verdict the library produces carries data that can be re-checked
//! against the input matrix alone: product decompositions reconstruct the
//! state, distillability witnesses evaluate to a negative number on the
//! partial transpose.

pub mod analyze;
pub mod cli;
pub mod certificate;
pub mod criteria;
mod error;
pub mod families;
pub mod io;
pub mod linalg;
pub mod product_search;
pub mod rank4;
pub mod sampling;
pub mod state;
pub mod structure;
pub mod tolerance;
pub mod tripartite;

pub use certificate::{Certificate, ProductTerm, Verdict, Witness, WitnessKind};
pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
pub use state::{BipartiteState, BlockForm, PureState, Side};
pub use tolerance::ToleranceConfig;
