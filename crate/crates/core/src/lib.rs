//! Operational theories over ordered vector spaces: cone spaces, general
//! actions, correlations, transformations, an evaluator for wired networks
//! with probability weights, and numerical audits of the structural
//! postulates.

pub mod audit;
pub mod born;
pub mod cli;
pub mod cone;
pub mod correlations;
pub mod error;
pub mod evaluator;
pub mod io;
pub mod linalg;
pub mod ocb;
pub mod operations;
pub mod transformations;

pub use audit::{AuditReport, DimensionCensus, Evidence, Postulate, Verdict};
pub use cone::{ConeKind, ConeSpace, Element, Family};
pub use correlations::{Correlation, Pairing, ProbabilityTable};
pub use error::{Error, Result};
pub use evaluator::{evaluate, evaluate_with, EvalOptions, EvaluationResult, Network};
pub use io::{parse_theory, read_theory, Theory};
pub use operations::{GeneralAction, Operation, Outcome};
pub use transformations::Transformation;
