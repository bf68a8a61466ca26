//! Rewriting of And-Inverter graphs with precomputed 5-input circuits.
//!
//! The usual flow is: mine the NPN classes that occur in a corpus
//! ([`mine`]), generate candidate circuits for them ([`forest`]), then
//! rewrite circuits read from AIGER files ([`aiger`], [`rewrite`]) and
//! check the result ([`equiv`]).

pub mod aig;
pub mod aiger;
pub mod cut;
pub mod equiv;
pub mod forest;
pub mod mine;
pub mod rewrite;
pub mod synthetic;
pub mod truth;

pub use aig::{Aig, AigError, Lit, NodeId};
pub use truth::{NpnTransform, TruthTable};
