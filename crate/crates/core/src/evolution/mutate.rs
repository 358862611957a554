use rand::Rng;
use rand_distr::StandardNormal;

use super::{CycleReport, EvolutionError};
use crate::agents::{build_refine_prompt, parse_reply, AgentClient, Payload, PayloadKind, RefineHistory, RefineTarget};
use crate::engine::GameRecord;
use crate::heuristics::{HeuristicTerm, TermKind, ValueFunctionSpec, WeightedTerm};
use crate::rng::StreamRng;

/// What a mutator may look at when proposing the next value function.
#[derive(Debug, Clone, Copy, Default)]
pub struct MutationContext<'a> {
    pub cycle: u32,
    pub reports: &'a [CycleReport],
    /// Games of the most recent cycle, oldest first.
    pub games: &'a [GameRecord],
}

/// Proposes a child of `parent`. The caller assigns id, lineage, origin and cycle.
pub trait Mutator: Send + Sync {
    fn mutate(
        &self,
        parent: &ValueFunctionSpec,
        ctx: &MutationContext<'_>,
        rng: &mut StreamRng,
    ) -> Result<ValueFunctionSpec, EvolutionError>;
}

/// Seeded weight perturbation with occasional term toggling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterministicMutator {
    pub sigma: f64,
    pub toggle_prob: f64,
}

impl Default for DeterministicMutator {
    fn default() -> Self {
        DeterministicMutator {
            sigma: 0.05,
            toggle_prob: 0.2,
        }
    }
}

impl DeterministicMutator {
    pub fn identity() -> Self {
        DeterministicMutator {
            sigma: 0.0,
            toggle_prob: 0.0,
        }
    }

    /// Perturbs every weight by `N(0, (sigma * mass)^2)`, clamps at zero, toggles
    /// one vocabulary term with probability `toggle_prob` (a removal only happens
    /// if another positive weight survives), then renormalizes to sum 1.
    ///
    /// A program-backed parent yields a declarative child built from its terms.
    pub fn perturb(&self, parent: &ValueFunctionSpec, rng: &mut StreamRng) -> ValueFunctionSpec {
        let mass = parent.weight_sum();
        let scale = self.sigma * mass;
        let mut terms: Vec<WeightedTerm> = parent
            .terms
            .iter()
            .map(|t| {
                let z: f64 = rng.sample(StandardNormal);
                WeightedTerm {
                    term: t.term.clone(),
                    weight: (t.weight + scale * z).max(0.0),
                }
            })
            .collect();

        let toggle = rng.random::<f64>() < self.toggle_prob;
        let pick = rng.random_range(0..TermKind::ALL.len());
        if toggle {
            let kind = TermKind::ALL[pick];
            match terms.iter().position(|t| t.term.kind == kind) {
                Some(i) => {
                    let others_positive = terms.iter().enumerate().any(|(j, t)| j != i && t.weight > 0.0);
                    if others_positive {
                        terms.remove(i);
                    }
                }
                None => {
                    let mean = if terms.is_empty() {
                        0.0
                    } else {
                        terms.iter().map(|t| t.weight).sum::<f64>() / terms.len() as f64
                    };
                    let weight = if mean > 0.0 { mean } else { mass / (terms.len() + 1) as f64 };
                    terms.push(WeightedTerm {
                        term: HeuristicTerm::new(kind),
                        weight,
                    });
                }
            }
        }

        let sum: f64 = terms.iter().map(|t| t.weight).sum();
        if sum <= 0.0 {
            terms = parent.terms.clone();
        }
        let sum: f64 = terms.iter().map(|t| t.weight).sum();
        if (sum - 1.0).abs() > 1e-12 {
            for t in &mut terms {
                t.weight /= sum;
            }
        }
        ValueFunctionSpec {
            terms,
            program: None,
            ..parent.clone()
        }
    }
}

impl Mutator for DeterministicMutator {
    fn mutate(
        &self,
        parent: &ValueFunctionSpec,
        _ctx: &MutationContext<'_>,
        rng: &mut StreamRng,
    ) -> Result<ValueFunctionSpec, EvolutionError> {
        Ok(self.perturb(parent, rng))
    }
}

/// Asks a model for a revised value function: either a weight listing or a
/// program for the out-of-process evaluator. After `attempts` unusable replies
/// it falls back to the deterministic mutator.
pub struct LlmMutator {
    pub client: AgentClient,
    pub fallback: DeterministicMutator,
    pub attempts: u32,
}

impl LlmMutator {
    pub fn new(client: AgentClient, fallback: DeterministicMutator) -> Self {
        LlmMutator {
            client,
            fallback,
            attempts: 3,
        }
    }
}

impl Mutator for LlmMutator {
    fn mutate(
        &self,
        parent: &ValueFunctionSpec,
        ctx: &MutationContext<'_>,
        rng: &mut StreamRng,
    ) -> Result<ValueFunctionSpec, EvolutionError> {
        let mut last = String::from("no completed games to show");
        if !ctx.games.is_empty() {
            let history = RefineHistory {
                reports: ctx.reports,
                games: ctx.games,
                notes: &[],
            };
            let bundle = build_refine_prompt(history, RefineTarget::Spec(parent), self.client.endpoint.char_budget())?;
            for attempt in 1..=self.attempts {
                let reply = match self.client.request(&bundle, PayloadKind::Spec) {
                    Ok(r) => r,
                    Err(e) => {
                        last = e.to_string();
                        log::warn!("cycle {}: mutation request {attempt} failed: {e}", ctx.cycle);
                        continue;
                    }
                };
                if let Some(Payload::Spec(s)) = reply.payload {
                    return Ok(ValueFunctionSpec {
                        terms: s.terms,
                        program: None,
                        ..parent.clone()
                    });
                }
                if let Ok(Payload::Program(listing)) = parse_reply(&reply.raw, PayloadKind::Program) {
                    return Ok(ValueFunctionSpec {
                        program: Some(listing),
                        ..parent.clone()
                    });
                }
                last = reply.parse_error.unwrap_or_default();
                log::warn!("cycle {}: mutation reply {attempt} unusable: {last}", ctx.cycle);
            }
        }
        log::warn!("cycle {}: falling back to deterministic mutation ({last})", ctx.cycle);
        self.fallback.mutate(parent, ctx, rng)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::{AgentEndpoint, MockTransport, ScriptedTransport};
    use crate::heuristics::{canonical_post10, canonical_pre10};
    use crate::engine::play_game;
    use crate::rng::stream_rng;
    use proptest::prelude::*;
    use std::sync::Arc;

    #[test]
    fn zero_noise_is_identity() {
        let p = canonical_pre10();
        let c = DeterministicMutator::identity().perturb(&p, &mut stream_rng(3));
        assert_eq!(c.terms, p.terms);
    }

    #[test]
    fn reproducible() {
        let p = canonical_post10();
        let m = DeterministicMutator::default();
        assert_eq!(m.perturb(&p, &mut stream_rng(9)), m.perturb(&p, &mut stream_rng(9)));
        assert_ne!(m.perturb(&p, &mut stream_rng(9)).terms, p.terms);
    }

    #[test]
    fn thousand_mutations_stay_normalized() {
        let m = DeterministicMutator::default();
        let mut rng = stream_rng(2024);
        let mut spec = canonical_pre10();
        for _ in 0..1_000 {
            spec = m.perturb(&spec, &mut rng);
            assert!(spec.validate().is_ok());
            assert!(spec.terms.iter().all(|t| t.weight >= 0.0));
            assert!((spec.weight_sum() - 1.0).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn always_toggling_keeps_a_positive_weight(seed: u64) {
            let m = DeterministicMutator { sigma: 0.5, toggle_prob: 1.0 };
            let mut rng = stream_rng(seed);
            let mut spec = canonical_post10();
            for _ in 0..20 {
                spec = m.perturb(&spec, &mut rng);
                prop_assert!(spec.validate().is_ok());
            }
        }
    }

    fn endpoint() -> AgentEndpoint {
        AgentEndpoint {
            backoff_ms: 0,
            max_retries: 0,
            ..AgentEndpoint::default()
        }
    }

    fn games() -> Vec<GameRecord> {
        vec![play_game(1, |b| crate::engine::legal_moves(b)[0])]
    }

    #[test]
    fn llm_listing_becomes_child() {
        let reply = "```\nempty_ratio 0.5\nsnake_ratio 0.5\n```";
        let client = AgentClient::new(endpoint(), Arc::new(MockTransport::constant(reply))).unwrap();
        let m = LlmMutator::new(client, DeterministicMutator::default());
        let g = games();
        let ctx = MutationContext {
            cycle: 2,
            games: &g,
            ..Default::default()
        };
        let child = m.mutate(&canonical_pre10(), &ctx, &mut stream_rng(0)).unwrap();
        assert_eq!(child.terms.len(), 2);
        assert_eq!(child.weight_of(TermKind::SnakeRatio), Some(0.5));
    }

    #[test]
    fn llm_program_is_kept_verbatim() {
        let reply = "```python\ndef evaluate(board):\n    return 0.25\n```";
        let client = AgentClient::new(endpoint(), Arc::new(MockTransport::constant(reply))).unwrap();
        let m = LlmMutator::new(client, DeterministicMutator::default());
        let g = games();
        let ctx = MutationContext {
            cycle: 2,
            games: &g,
            ..Default::default()
        };
        let parent = canonical_pre10();
        let child = m.mutate(&parent, &ctx, &mut stream_rng(0)).unwrap();
        assert_eq!(child.program.as_deref(), Some("def evaluate(board):\n    return 0.25\n"));
        assert_eq!(child.terms, parent.terms);
    }

    #[test]
    fn unparseable_replies_fall_back_after_three_attempts() {
        let t = Arc::new(ScriptedTransport::new(vec![Ok("no idea".into())]));
        let client = AgentClient::new(endpoint(), t.clone()).unwrap();
        let m = LlmMutator::new(client, DeterministicMutator::default());
        let g = games();
        let ctx = MutationContext {
            cycle: 2,
            games: &g,
            ..Default::default()
        };
        let parent = canonical_pre10();
        let child = m.mutate(&parent, &ctx, &mut stream_rng(4)).unwrap();
        assert_eq!(t.calls(), 3);
        assert_eq!(child, DeterministicMutator::default().perturb(&parent, &mut stream_rng(4)));
    }
}
