use std::sync::OnceLock;

use regex::Regex;

use super::ParseError;
use crate::engine::MoveDir;
use crate::heuristics::{HeuristicTerm, Origin, ValueFunctionSpec, WeightedTerm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    Move,
    Strategy,
    Spec,
    Program,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Move(MoveDir),
    Strategy(String),
    /// Weights are normalized to sum to 1. The id is a placeholder for the caller to replace.
    Spec(ValueFunctionSpec),
    /// A program listing, verbatim.
    Program(String),
}

fn regex(cell: &'static OnceLock<Regex>, pattern: &str) -> &'static Regex {
    cell.get_or_init(|| Regex::new(pattern).expect("valid pattern"))
}

fn final_marker() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    regex(&R, r"(?i)\bFINAL\s*:\s*\**\s*(up|down|left|right)\b")
}

fn move_word() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    regex(&R, r"(?i)\b(up|down|left|right)\b")
}

fn fenced_block() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    regex(&R, r"(?s)```[^\n]*\n(.*?)```")
}

fn name_weight_line() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    regex(
        &R,
        r"^([A-Za-z_]+)\s*[:=]?\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)((?:\s+[A-Za-z_]+\s*=\s*[-+]?[0-9]*\.?[0-9]+)*)\s*,?$",
    )
}

fn weight_times_name_line() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    regex(&R, r"^([0-9]*\.?[0-9]+)\s*\*\s*([A-Za-z_]+)\s*\+?\s*,?$")
}

fn param_pair() -> &'static Regex {
    static R: OnceLock<Regex> = OnceLock::new();
    regex(&R, r"([A-Za-z_]+)\s*=\s*([-+]?[0-9]*\.?[0-9]+)")
}

fn parse_move(raw: &str) -> Result<MoveDir, ParseError> {
    let word = final_marker()
        .captures(raw)
        .or_else(|| move_word().captures(raw))
        .ok_or(ParseError::NoMove)?;
    word[1].parse().map_err(|_| ParseError::NoMove)
}

fn parse_weight_line(line: &str) -> Option<Result<WeightedTerm, ParseError>> {
    let (name, weight, params) = if let Some(c) = name_weight_line().captures(line) {
        (c[1].to_string(), c[2].to_string(), c.get(3).map_or("", |m| m.as_str()).to_string())
    } else if let Some(c) = weight_times_name_line().captures(line) {
        (c[2].to_string(), c[1].to_string(), String::new())
    } else {
        return None;
    };
    let build = || -> Result<WeightedTerm, ParseError> {
        let mut term = HeuristicTerm::new(name.to_ascii_lowercase().parse()?);
        for p in param_pair().captures_iter(&params) {
            term.params.insert(p[1].to_string(), p[2].parse().unwrap_or(f64::NAN));
        }
        Ok(WeightedTerm {
            term,
            weight: weight.parse().unwrap_or(f64::NAN),
        })
    };
    Some(build())
}

/// A block is a weight listing when every non-blank, non-comment line is a
/// weight line. `Ok(None)` means the block is something else.
fn parse_weight_block(block: &str) -> Result<Option<ValueFunctionSpec>, ParseError> {
    let mut terms = Vec::new();
    for line in block.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match parse_weight_line(line) {
            Some(t) => terms.push(t?),
            None => return Ok(None),
        }
    }
    if terms.is_empty() {
        return Ok(None);
    }
    let mut spec = ValueFunctionSpec {
        id: "reply".to_string(),
        lineage: None,
        origin: Origin::Mutated,
        created_cycle: 0,
        terms,
        program: None,
    };
    spec.validate()?;
    let sum = spec.weight_sum();
    for t in &mut spec.terms {
        t.weight /= sum;
    }
    Ok(Some(spec))
}

fn parse_spec(raw: &str) -> Result<ValueFunctionSpec, ParseError> {
    let mut first_error = None;
    let blocks: Vec<&str> = fenced_block().captures_iter(raw).map(|c| c.get(1).unwrap().as_str()).collect();
    let candidates = if blocks.is_empty() { vec![raw] } else { blocks };
    for block in candidates {
        match parse_weight_block(block) {
            Ok(Some(spec)) => return Ok(spec),
            Ok(None) => {}
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    Err(first_error.unwrap_or(ParseError::NoWeightListing))
}

fn parse_program(raw: &str) -> Result<String, ParseError> {
    let mut any = false;
    for c in fenced_block().captures_iter(raw) {
        any = true;
        let body = c.get(1).unwrap().as_str();
        if body.contains("def evaluate(") {
            return Ok(body.to_string());
        }
    }
    Err(if any { ParseError::NoProgram } else { ParseError::NoFencedBlock })
}

/// Extracts the first well-formed payload of `kind` from a model reply.
///
/// Moves: a `FINAL: <dir>` marker wins; otherwise the first whole-word
/// direction, case-insensitive. Specs: the first fenced block made only of
/// `term weight` lines (`:`/`=` separators, `k=v` params and `w * term` also
/// accepted), falling back to the unfenced reply. Programs: the first fenced
/// block defining `evaluate(`.
pub fn parse_reply(raw: &str, kind: PayloadKind) -> Result<Payload, ParseError> {
    match kind {
        PayloadKind::Move => parse_move(raw).map(Payload::Move),
        PayloadKind::Strategy => {
            let t = raw.trim();
            if t.is_empty() {
                Err(ParseError::Empty)
            } else {
                Ok(Payload::Strategy(t.to_string()))
            }
        }
        PayloadKind::Spec => parse_spec(raw).map(Payload::Spec),
        PayloadKind::Program => parse_program(raw).map(Payload::Program),
    }
}
