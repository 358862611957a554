use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Candidate, CycleReport, EvolutionConfig, EvolutionError, MetapromptConfig};
use crate::agents::AgentEndpoint;
use crate::engine::{read_jsonl, GameRecord};
use crate::heuristics::{Origin, ValueFunctionSpec};
use crate::search::SearchConfig;

/// Configuration snapshot stored as `config.json` at the root of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSnapshot {
    pub mode: String,
    pub evolution: EvolutionConfig,
    pub search: SearchConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metaprompt: Option<MetapromptConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agent: Option<AgentEndpoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineageNode {
    pub id: String,
    pub parent: Option<String>,
    pub origin: Origin,
    pub created_cycle: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollbackEvent {
    pub segment_index: u32,
    pub closed_at_cycle: u32,
    pub candidates: Vec<Candidate>,
    /// The candidate whose spec was copied into the new base; `None` when the old base was kept.
    pub chosen: Option<String>,
    pub new_base: String,
}

/// Every spec of a run with its parent, plus the rollback events.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LineageTree {
    pub nodes: Vec<LineageNode>,
    pub rollbacks: Vec<RollbackEvent>,
}

impl LineageTree {
    /// Adds a node, replacing an existing node with the same id.
    pub fn add(&mut self, spec: &ValueFunctionSpec) {
        let node = LineageNode {
            id: spec.id.clone(),
            parent: spec.lineage.clone(),
            origin: spec.origin,
            created_cycle: spec.created_cycle,
        };
        match self.nodes.iter_mut().find(|n| n.id == node.id) {
            Some(n) => *n = node,
            None => self.nodes.push(node),
        }
    }

    pub fn node(&self, id: &str) -> Option<&LineageNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Ids from `id`'s parent up to its root.
    pub fn ancestors(&self, id: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut cur = self.node(id).and_then(|n| n.parent.clone());
        while let Some(p) = cur {
            if out.contains(&p) {
                break;
            }
            cur = self.node(&p).and_then(|n| n.parent.clone());
            out.push(p);
        }
        out
    }

    /// Checks that the nodes form a forest: unique ids, parents exist, seeds
    /// are the only roots, no cycles.
    pub fn validate(&self) -> Result<(), String> {
        let mut ids = BTreeSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                return Err(format!("duplicate node {}", n.id));
            }
        }
        for n in &self.nodes {
            match (&n.parent, n.origin) {
                (None, Origin::Seed) => {}
                (None, _) => return Err(format!("{} has no parent but is not a seed", n.id)),
                (Some(_), Origin::Seed) => return Err(format!("seed {} has a parent", n.id)),
                (Some(p), _) if !ids.contains(p.as_str()) => {
                    return Err(format!("{} names missing parent {p}", n.id))
                }
                _ => {}
            }
            let mut seen = BTreeSet::new();
            let mut cur = Some(n.id.as_str());
            while let Some(c) = cur {
                if !seen.insert(c) {
                    return Err(format!("cycle through {c}"));
                }
                cur = self.node(c).and_then(|x| x.parent.as_deref());
            }
        }
        Ok(())
    }
}

/// Holds a run directory's `.lock` file for as long as it lives.
#[derive(Debug)]
pub struct RunLock {
    path: PathBuf,
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

fn lock_holder_alive(pid: u32) -> bool {
    if cfg!(target_os = "linux") {
        Path::new(&format!("/proc/{pid}")).exists()
    } else {
        true
    }
}

/// Paths and atomic JSON persistence for one run directory.
///
/// ```text
/// config.json  checkpoint.json  lineage.json  report.json  *.csv
/// specs/<id>.json  cycles/<n>.json  games/<n>/<game>.jsonl
/// programs/<id>.py  strategies/<n>.json
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunDir {
    root: PathBuf,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> EvolutionError {
    EvolutionError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

impl RunDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        RunDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn create(&self) -> Result<(), EvolutionError> {
        for sub in ["specs", "cycles", "games"] {
            let p = self.root.join(sub);
            fs::create_dir_all(&p).map_err(|e| io_err(&p, e))?;
        }
        Ok(())
    }

    pub fn config_path(&self) -> PathBuf {
        self.root.join("config.json")
    }
    pub fn checkpoint_path(&self) -> PathBuf {
        self.root.join("checkpoint.json")
    }
    pub fn lineage_path(&self) -> PathBuf {
        self.root.join("lineage.json")
    }
    pub fn spec_path(&self, id: &str) -> PathBuf {
        self.root.join("specs").join(format!("{id}.json"))
    }
    pub fn cycle_path(&self, cycle: u32) -> PathBuf {
        self.root.join("cycles").join(format!("{cycle}.json"))
    }
    pub fn programs_dir(&self) -> PathBuf {
        self.root.join("programs")
    }
    pub fn strategy_path(&self, round: u32) -> PathBuf {
        self.root.join("strategies").join(format!("{round}.json"))
    }
    pub fn game_relpath(cycle: u32, game: usize) -> String {
        format!("games/{cycle}/{game}.jsonl")
    }

    /// Creates `.lock`, failing if a live process already holds it.
    pub fn lock(&self) -> Result<RunLock, EvolutionError> {
        fs::create_dir_all(&self.root).map_err(|e| io_err(&self.root, e))?;
        let path = self.root.join(".lock");
        for _ in 0..2 {
            match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
                Ok(mut f) => {
                    write!(f, "{}", std::process::id()).map_err(|e| io_err(&path, e))?;
                    return Ok(RunLock { path });
                }
                Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                    let holder = fs::read_to_string(&path).ok().and_then(|s| s.trim().parse::<u32>().ok());
                    match holder {
                        Some(pid) if !lock_holder_alive(pid) => {
                            log::warn!("removing stale lock left by process {pid}");
                            let _ = fs::remove_file(&path);
                        }
                        _ => return Err(EvolutionError::Locked(self.root.display().to_string())),
                    }
                }
                Err(e) => return Err(io_err(&path, e)),
            }
        }
        Err(EvolutionError::Locked(self.root.display().to_string()))
    }

    /// Writes through a temporary file and a rename so readers never see a partial file.
    pub fn write_text(&self, path: &Path, text: &str) -> Result<(), EvolutionError> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text).map_err(|e| io_err(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| io_err(path, e))
    }

    pub fn write_json<T: Serialize>(&self, path: &Path, value: &T) -> Result<(), EvolutionError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
        text.push('\n');
        self.write_text(path, &text)
    }

    pub fn read_json<T: DeserializeOwned>(&self, path: &Path) -> Result<T, EvolutionError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| EvolutionError::Corrupt {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn write_spec(&self, spec: &ValueFunctionSpec) -> Result<(), EvolutionError> {
        self.write_json(&self.spec_path(&spec.id), spec)
    }

    pub fn read_spec(&self, id: &str) -> Result<ValueFunctionSpec, EvolutionError> {
        self.read_json(&self.spec_path(id))
    }

    /// Writes each record to its own file and returns the relative paths.
    pub fn write_games(&self, cycle: u32, records: &[GameRecord]) -> Result<Vec<String>, EvolutionError> {
        records
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let rel = Self::game_relpath(cycle, i);
                self.write_text(&self.root.join(&rel), &format!("{}\n", r.to_json_line()))?;
                Ok(rel)
            })
            .collect()
    }

    pub fn read_game_file(&self, rel: &str) -> Result<Vec<GameRecord>, EvolutionError> {
        let path = self.root.join(rel);
        let f = fs::File::open(&path).map_err(|e| io_err(&path, e))?;
        read_jsonl(BufReader::new(f)).map_err(|e| EvolutionError::Corrupt {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn read_cycle_games(&self, report: &CycleReport) -> Result<Vec<GameRecord>, EvolutionError> {
        let mut out = Vec::new();
        for rel in &report.game_records {
            out.extend(self.read_game_file(rel)?);
        }
        Ok(out)
    }

    pub fn write_cycle(&self, report: &CycleReport) -> Result<(), EvolutionError> {
        self.write_json(&self.cycle_path(report.cycle_index), report)
    }

    /// Indices of the completed cycle files, ascending.
    pub fn cycle_indices(&self) -> Result<Vec<u32>, EvolutionError> {
        let dir = self.root.join("cycles");
        if !dir.is_dir() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for entry in fs::read_dir(&dir).map_err(|e| io_err(&dir, e))? {
            let name = entry.map_err(|e| io_err(&dir, e))?.file_name();
            let name = name.to_string_lossy();
            if let Some(n) = name.strip_suffix(".json").and_then(|s| s.parse::<u32>().ok()) {
                out.push(n);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    pub fn read_cycles(&self) -> Result<BTreeMap<u32, CycleReport>, EvolutionError> {
        self.cycle_indices()?
            .into_iter()
            .map(|n| Ok((n, self.read_json(&self.cycle_path(n))?)))
            .collect()
    }
}
