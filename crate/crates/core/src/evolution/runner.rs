use serde::{Deserialize, Serialize};

use super::{
    rollback_select, run_cycle, Candidate, CycleEvaluator, CycleReport, EvolutionConfig, EvolutionError,
    LineageTree, MutationContext, Mutator, RollbackEvent, RunDir, RunSnapshot, SegmentState,
};
use crate::agents::AgentEndpoint;
use crate::engine::GameRecord;
use crate::heuristics::{canonical_pre10, materialize_python_program, python_handle, Origin, ValueFunctionSpec};
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::search::SearchConfig;

/// Progress persisted after every cycle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub next_cycle: u32,
    pub last_evaluated: Option<String>,
    pub segment: SegmentState,
}

#[derive(Default)]
pub struct RunOptions<'a> {
    /// Stop (as if interrupted) once this cycle has been persisted.
    pub stop_after: Option<u32>,
    /// Recorded in the configuration snapshot.
    pub agent: Option<AgentEndpoint>,
    pub progress: Option<&'a (dyn Fn(&CycleReport) + Sync)>,
}

#[derive(Debug, Clone)]
pub struct EvolutionOutcome {
    pub reports: Vec<CycleReport>,
    pub lineage: LineageTree,
    /// The spec the next cycle would start from.
    pub final_spec_id: String,
    pub completed: bool,
}

/// Seed of game `game` in cycle `cycle`.
pub fn game_seed(master: u64, cycle: u32, game: u32) -> u64 {
    derive_seed(master, Stream::GameSeed, &[cycle as u64, game as u64])
}

fn stamp(mut child: ValueFunctionSpec, id: String, parent: &str, origin: Origin, cycle: u32) -> ValueFunctionSpec {
    child.id = id;
    child.lineage = Some(parent.to_string());
    child.origin = origin;
    child.created_cycle = cycle;
    child
}

/// Runs (or resumes) value-function refinement in `dir`.
///
/// Cycle 1 evaluates the canonical pre-10 spec. Every later cycle evaluates a
/// mutation of the previously evaluated spec, or of the segment base right
/// after a rollback. When a segment holds `segment_length` candidates one of
/// them is drawn with score-proportional weights and copied into the next base.
/// All randomness is derived from `master_seed` per cycle, so a resumed run
/// replays exactly what an uninterrupted one would have done.
pub fn run_evolution(
    cfg: &EvolutionConfig,
    search: &SearchConfig,
    dir: &RunDir,
    mutator: &dyn Mutator,
    opts: &RunOptions<'_>,
) -> Result<EvolutionOutcome, EvolutionError> {
    cfg.validate()?;
    search
        .validate()
        .map_err(|e| EvolutionError::InvalidConfig(e.to_string()))?;
    let _lock = dir.lock()?;
    dir.create()?;

    let snapshot = RunSnapshot {
        mode: "evolve".into(),
        evolution: cfg.clone(),
        search: search.clone(),
        metaprompt: None,
        agent: opts.agent.clone(),
    };
    if dir.config_path().exists() {
        let existing: RunSnapshot = dir.read_json(&dir.config_path())?;
        // A finished run may be extended with more cycles; anything else must match.
        let same = EvolutionConfig {
            cycles: cfg.cycles,
            ..existing.evolution.clone()
        } == snapshot.evolution
            && existing.search == snapshot.search;
        if !same {
            return Err(EvolutionError::ConfigMismatch(dir.config_path().display().to_string()));
        }
    } else {
        dir.write_json(&dir.config_path(), &snapshot)?;
    }

    let seed = canonical_pre10();
    let (mut ck, mut lineage) = if dir.checkpoint_path().exists() {
        let ck: Checkpoint = dir.read_json(&dir.checkpoint_path())?;
        let lineage: LineageTree = dir.read_json(&dir.lineage_path())?;
        (ck, lineage)
    } else {
        dir.write_spec(&seed)?;
        let mut lineage = LineageTree::default();
        lineage.add(&seed);
        let ck = Checkpoint {
            next_cycle: 1,
            last_evaluated: None,
            segment: SegmentState::new(0, seed.id.clone()),
        };
        (ck, lineage)
    };

    let mut reports: Vec<CycleReport> = dir
        .read_cycles()?
        .into_values()
        .filter(|r| r.cycle_index < ck.next_cycle)
        .collect();
    let mut last_games: Vec<GameRecord> = match reports.last() {
        Some(r) => dir.read_cycle_games(r)?,
        None => Vec::new(),
    };

    let mut completed = ck.next_cycle > cfg.cycles;
    for c in ck.next_cycle..=cfg.cycles {
        let spec = if c == 1 {
            seed.clone()
        } else {
            let parent_id = match (&ck.last_evaluated, ck.segment.candidates.is_empty()) {
                (Some(last), false) => last.clone(),
                _ => ck.segment.base_spec_id.clone(),
            };
            let parent = dir.read_spec(&parent_id)?;
            let ctx = MutationContext {
                cycle: c,
                reports: &reports,
                games: &last_games,
            };
            let mut rng = stream_rng(derive_seed(cfg.master_seed, Stream::Mutation, &[c as u64]));
            let child = mutator.mutate(&parent, &ctx, &mut rng)?;
            let child = stamp(child, format!("c{c:04}-m"), &parent_id, Origin::Mutated, c);
            child.validate()?;
            dir.write_spec(&child)?;
            lineage.add(&child);
            child
        };

        let seeds: Vec<u64> = (0..cfg.games_per_cycle).map(|g| game_seed(cfg.master_seed, c, g)).collect();
        let evaluator = match &spec.program {
            None => CycleEvaluator::Declarative(&spec),
            Some(listing) => {
                let path = materialize_python_program(&dir.programs_dir(), &spec.id, listing)
                    .map_err(|e| EvolutionError::Io {
                        path: dir.programs_dir().display().to_string(),
                        message: e.to_string(),
                    })?;
                CycleEvaluator::External(python_handle(&path, cfg.evaluator_timeout_ms))
            }
        };
        let outcome = run_cycle(&evaluator, &spec.id, c, search, &seeds);
        let mut report = outcome.report;
        report.game_records = dir.write_games(c, &outcome.records)?;
        dir.write_cycle(&report)?;
        if let Some(p) = opts.progress {
            p(&report);
        }

        ck.segment.candidates.push(Candidate {
            spec_id: spec.id.clone(),
            cycle_index: c,
            mean_score: report.mean_score,
            failed: report.is_failed(),
        });
        ck.last_evaluated = Some(spec.id.clone());

        if ck.segment.candidates.len() as u32 == cfg.segment_length {
            let mut rng = stream_rng(derive_seed(cfg.master_seed, Stream::Rollback, &[ck.segment.segment_index as u64]));
            let choice = rollback_select(&ck.segment, cfg.selection_floor, &mut rng);
            let (chosen, new_base) = match choice {
                Some(i) => {
                    let chosen_id = ck.segment.candidates[i].spec_id.clone();
                    let source = dir.read_spec(&chosen_id)?;
                    let base = stamp(source, format!("c{c:04}-rb"), &chosen_id, Origin::RolledBack, c);
                    dir.write_spec(&base)?;
                    lineage.add(&base);
                    (Some(chosen_id), base.id)
                }
                None => {
                    log::warn!("segment {}: every candidate failed; keeping the previous base", ck.segment.segment_index);
                    (None, ck.segment.base_spec_id.clone())
                }
            };
            lineage.rollbacks.retain(|r| r.segment_index != ck.segment.segment_index);
            lineage.rollbacks.push(RollbackEvent {
                segment_index: ck.segment.segment_index,
                closed_at_cycle: c,
                candidates: ck.segment.candidates.clone(),
                chosen,
                new_base: new_base.clone(),
            });
            ck.segment = SegmentState::new(ck.segment.segment_index + 1, new_base);
        }

        ck.next_cycle = c + 1;
        dir.write_json(&dir.lineage_path(), &lineage)?;
        dir.write_json(&dir.checkpoint_path(), &ck)?;
        reports.push(report);
        last_games = outcome.records;

        if c == cfg.cycles {
            completed = true;
        }
        if opts.stop_after == Some(c) {
            break;
        }
    }

    let final_spec_id = match (&ck.last_evaluated, ck.segment.candidates.is_empty()) {
        (Some(last), false) => last.clone(),
        _ => ck.segment.base_spec_id.clone(),
    };
    Ok(EvolutionOutcome {
        reports,
        lineage,
        final_spec_id,
        completed,
    })
}
