//! Maximal Ferrers diagram rank-metric codes: finite fields, linear algebra,
//! diagram combinatorics, code constructions and genericity experiments.

pub mod code;
pub mod construct;
pub mod error;
pub mod ferrers;
pub mod genericity;
pub mod gf;
pub mod matrix;
pub mod rng;

pub use code::{DistanceMode, DistanceReport, RankMetricCode, VerificationReport, Verdict};
pub use error::{Error, Result};
pub use ferrers::{BoundProfile, Dot, FerrersDiagram};
pub use gf::{Elem, Field, FieldCtx, OrderedBasis};
pub use matrix::{GfMatrix, Subspace};
