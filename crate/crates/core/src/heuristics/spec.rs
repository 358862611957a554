use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::terms::{eval_weighted, HeuristicTerm, TermKind};
use super::{EvalError, Evaluator, SpecError};
use crate::engine::Board;

/// How a spec came to exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    Seed,
    Mutated,
    RolledBack,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Origin::Seed => "seed",
            Origin::Mutated => "mutated",
            Origin::RolledBack => "rolled_back",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedTerm {
    pub term: HeuristicTerm,
    pub weight: f64,
}

impl WeightedTerm {
    pub fn new(kind: TermKind, weight: f64) -> Self {
        WeightedTerm {
            term: HeuristicTerm::new(kind),
            weight,
        }
    }
}

/// A versioned, declarative value function: a weighted sum of heuristic terms.
///
/// When `program` is set the spec is backed by an out-of-process evaluator
/// program whose listing is stored verbatim; `terms` are carried over from the
/// parent for lineage context only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecDocument", into = "SpecDocument")]
pub struct ValueFunctionSpec {
    pub id: String,
    pub lineage: Option<String>,
    pub origin: Origin,
    pub created_cycle: u32,
    pub terms: Vec<WeightedTerm>,
    pub program: Option<String>,
}

/// On-disk shape of a spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SpecDocument {
    id: String,
    lineage: Option<String>,
    origin: Origin,
    created_cycle: u32,
    terms: Vec<TermDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    program: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct TermDocument {
    name: String,
    weight: f64,
    #[serde(default)]
    params: std::collections::BTreeMap<String, f64>,
}

impl TryFrom<SpecDocument> for ValueFunctionSpec {
    type Error = SpecError;

    fn try_from(doc: SpecDocument) -> Result<Self, SpecError> {
        let terms = doc
            .terms
            .into_iter()
            .map(|t| {
                Ok(WeightedTerm {
                    term: HeuristicTerm {
                        kind: t.name.parse()?,
                        params: t.params,
                    },
                    weight: t.weight,
                })
            })
            .collect::<Result<Vec<_>, SpecError>>()?;
        let spec = ValueFunctionSpec {
            id: doc.id,
            lineage: doc.lineage,
            origin: doc.origin,
            created_cycle: doc.created_cycle,
            terms,
            program: doc.program,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<ValueFunctionSpec> for SpecDocument {
    fn from(spec: ValueFunctionSpec) -> Self {
        SpecDocument {
            id: spec.id,
            lineage: spec.lineage,
            origin: spec.origin,
            created_cycle: spec.created_cycle,
            terms: spec
                .terms
                .into_iter()
                .map(|t| TermDocument {
                    name: t.term.kind.name().to_string(),
                    weight: t.weight,
                    params: t.term.params,
                })
                .collect(),
            program: spec.program,
        }
    }
}

impl ValueFunctionSpec {
    pub fn seed(id: impl Into<String>, terms: Vec<WeightedTerm>) -> Result<Self, SpecError> {
        let spec = ValueFunctionSpec {
            id: id.into(),
            lineage: None,
            origin: Origin::Seed,
            created_cycle: 0,
            terms,
            program: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Checks weights (finite, nonnegative, at least one positive), unique term names and parameters.
    pub fn validate(&self) -> Result<(), SpecError> {
        if self.id.trim().is_empty() {
            return Err(SpecError::EmptyId);
        }
        let mut seen = BTreeSet::new();
        for t in &self.terms {
            if !t.weight.is_finite() || t.weight < 0.0 {
                return Err(SpecError::InvalidWeight {
                    term: t.term.kind.name().to_string(),
                    weight: t.weight,
                });
            }
            if !seen.insert(t.term.kind) {
                return Err(SpecError::DuplicateTerm(t.term.kind.name().to_string()));
            }
            t.term.validate()?;
        }
        if !self.terms.iter().any(|t| t.weight > 0.0) {
            return Err(SpecError::NoPositiveWeight);
        }
        Ok(())
    }

    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    pub fn weight_of(&self, kind: TermKind) -> Option<f64> {
        self.terms.iter().find(|t| t.term.kind == kind).map(|t| t.weight)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Parse(e.to_string()))
    }
}

/// Weighted sum of the spec's terms on `board`.
pub fn eval_spec(spec: &ValueFunctionSpec, board: Board) -> f64 {
    eval_weighted(spec.terms.iter().map(|t| (&t.term, t.weight)), board)
}

impl Evaluator for ValueFunctionSpec {
    fn evaluate(&self, board: Board) -> Result<f64, EvalError> {
        Ok(eval_spec(self, board))
    }
}

/// Value function in use before the first structural refinement.
pub fn canonical_pre10() -> ValueFunctionSpec {
    ValueFunctionSpec::seed(
        "seed-pre10",
        vec![
            WeightedTerm::new(TermKind::EmptyRatio, 0.35),
            WeightedTerm::new(TermKind::HighestRatio, 0.20),
            WeightedTerm::new(TermKind::CornerBonus, 0.15),
            WeightedTerm::new(TermKind::BottomRowRatio, 0.10),
            WeightedTerm::new(TermKind::MergeValueRatio, 0.10),
            WeightedTerm::new(TermKind::MergeRatio, 0.05),
            WeightedTerm::new(TermKind::MonotonicityScore, 0.05),
        ],
    )
    .expect("canonical spec is valid")
}

/// Value function after the first structural refinement: corner proximity, smoothness and snake terms.
pub fn canonical_post10() -> ValueFunctionSpec {
    ValueFunctionSpec::seed(
        "seed-post10",
        vec![
            WeightedTerm::new(TermKind::EmptyRatio, 0.30),
            WeightedTerm::new(TermKind::HighestRatio, 0.20),
            WeightedTerm::new(TermKind::CornerProximity, 0.15),
            WeightedTerm::new(TermKind::MergeRatio, 0.10),
            WeightedTerm::new(TermKind::SmoothnessRatio, 0.10),
            WeightedTerm::new(TermKind::SnakeRatio, 0.15),
        ],
    )
    .expect("canonical spec is valid")
}

pub fn canonical_specs() -> (ValueFunctionSpec, ValueFunctionSpec) {
    (canonical_pre10(), canonical_post10())
}
