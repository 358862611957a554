//! Heuristic terms, declarative value-function specs and external evaluators.

mod external;
mod spec;
mod terms;

pub use external::{
    decode_request, decode_response, encode_request, eval_external, materialize_python_program, python_handle, serve,
    ExternalEvaluator, ExternalEvaluatorHandle, PROTOCOL_VERSION,
};
pub use spec::{
    canonical_post10, canonical_pre10, canonical_specs, eval_spec, Origin, ValueFunctionSpec, WeightedTerm,
};
pub use terms::{eval_term, HeuristicTerm, TermKind, ADJACENT_PAIRS, SNAKE_PATH};

use crate::engine::Board;

/// Anything that scores a board. Must be shareable across game threads.
pub trait Evaluator: Send + Sync {
    fn evaluate(&self, board: Board) -> Result<f64, EvalError>;
}

/// Adapts a plain function to [`Evaluator`].
pub struct FnEvaluator<F>(pub F);

impl<F> Evaluator for FnEvaluator<F>
where
    F: Fn(Board) -> f64 + Send + Sync,
{
    fn evaluate(&self, board: Board) -> Result<f64, EvalError> {
        Ok((self.0)(board))
    }
}

impl<T: Evaluator + ?Sized> Evaluator for &T {
    fn evaluate(&self, board: Board) -> Result<f64, EvalError> {
        (**self).evaluate(board)
    }
}

impl<T: Evaluator + ?Sized> Evaluator for Box<T> {
    fn evaluate(&self, board: Board) -> Result<f64, EvalError> {
        (**self).evaluate(board)
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpecError {
    #[error("unknown heuristic term {0:?}")]
    UnknownTerm(String),
    #[error("term {term} has no parameter {param:?}")]
    UnknownParam { term: String, param: String },
    #[error("term {term}: parameter {param} = {value} is out of range")]
    InvalidParam { term: String, param: String, value: f64 },
    #[error("term {term} has invalid weight {weight}; weights must be finite and nonnegative")]
    InvalidWeight { term: String, weight: f64 },
    #[error("term {0} appears more than once")]
    DuplicateTerm(String),
    #[error("spec needs at least one positive weight")]
    NoPositiveWeight,
    #[error("spec id is empty")]
    EmptyId,
    #[error("spec document: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("evaluator did not answer within {0} ms")]
    Timeout(u64),
    #[error("malformed evaluator response: {0}")]
    Malformed(String),
    #[error("evaluator returned non-finite value {0}")]
    NonFinite(f64),
    #[error("evaluator handshake failed, got {0:?}")]
    Handshake(String),
    #[error("could not start evaluator: {0}")]
    Spawn(String),
    #[error("evaluator closed its output")]
    Closed,
    #[error("evaluator io: {0}")]
    Io(String),
    #[error("evaluator disabled after earlier failure: {0}")]
    Poisoned(String),
}
