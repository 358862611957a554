//! Out-of-process value functions.
//!
//! Protocol (line-delimited, UTF-8):
//!
//! ```text
//! evaluator -> EVAL2048 1                       (once, on startup)
//! host      -> 0 1 0 0 0 0 2 0 0 0 0 0 0 0 0 11 (16 cell exponents, row-major)
//! evaluator -> 0.4375                           (one finite real)
//! ```
//!
//! Requests are serialized per process. A timeout, malformed reply or
//! non-finite value poisons the evaluator; the caller should quarantine the
//! value function behind it.

use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{EvalError, Evaluator};
use crate::engine::Board;

pub const PROTOCOL_VERSION: u32 = 1;
pub const HANDSHAKE_PREFIX: &str = "EVAL2048";

/// How to start an external evaluator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExternalEvaluatorHandle {
    pub command: String,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default = "default_protocol")]
    pub protocol_version: u32,
    pub timeout_ms: u64,
}

fn default_protocol() -> u32 {
    PROTOCOL_VERSION
}

impl ExternalEvaluatorHandle {
    pub fn new(command: impl Into<String>, args: Vec<String>, timeout_ms: u64) -> Self {
        ExternalEvaluatorHandle {
            command: command.into(),
            args,
            protocol_version: PROTOCOL_VERSION,
            timeout_ms,
        }
    }

    pub fn timeout(&self) -> Duration {
        Duration::from_millis(self.timeout_ms)
    }
}

struct Channel {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    poisoned: Option<String>,
}

/// A running evaluator process.
pub struct ExternalEvaluator {
    handle: ExternalEvaluatorHandle,
    channel: Mutex<Channel>,
}

impl ExternalEvaluator {
    /// Starts the process and waits for its handshake line.
    pub fn spawn(handle: &ExternalEvaluatorHandle) -> Result<Self, EvalError> {
        let mut child = Command::new(&handle.command)
            .args(&handle.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| EvalError::Spawn(format!("{}: {e}", handle.command)))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let mut channel = Channel {
            child,
            stdin,
            lines: rx,
            poisoned: None,
        };
        let hello = recv_line(&mut channel, handle.timeout())?;
        let expected = format!("{HANDSHAKE_PREFIX} {}", handle.protocol_version);
        if hello.trim() != expected {
            let _ = channel.child.kill();
            let _ = channel.child.wait();
            return Err(EvalError::Handshake(hello));
        }
        Ok(ExternalEvaluator {
            handle: handle.clone(),
            channel: Mutex::new(channel),
        })
    }

    pub fn handle(&self) -> &ExternalEvaluatorHandle {
        &self.handle
    }
}

fn recv_line(channel: &mut Channel, timeout: Duration) -> Result<String, EvalError> {
    match channel.lines.recv_timeout(timeout) {
        Ok(Ok(line)) => Ok(line),
        Ok(Err(e)) => Err(EvalError::Io(e.to_string())),
        Err(RecvTimeoutError::Timeout) => Err(EvalError::Timeout(timeout.as_millis() as u64)),
        Err(RecvTimeoutError::Disconnected) => Err(EvalError::Closed),
    }
}

/// Renders the request line for a board.
pub fn encode_request(board: Board) -> String {
    let cells: Vec<String> = board.exponents().iter().map(|e| e.to_string()).collect();
    cells.join(" ")
}

pub fn decode_request(line: &str) -> Result<Board, EvalError> {
    let cells: Vec<u8> = line
        .split_whitespace()
        .map(|t| t.parse::<u8>())
        .collect::<Result<_, _>>()
        .map_err(|e| EvalError::Malformed(format!("{line:?}: {e}")))?;
    let cells: [u8; 16] = cells
        .try_into()
        .map_err(|v: Vec<u8>| EvalError::Malformed(format!("expected 16 cells, got {}", v.len())))?;
    Board::from_exponents(cells).map_err(|e| EvalError::Malformed(e.to_string()))
}

pub fn decode_response(line: &str) -> Result<f64, EvalError> {
    let v: f64 = line
        .trim()
        .parse()
        .map_err(|_| EvalError::Malformed(format!("{line:?} is not a real number")))?;
    if !v.is_finite() {
        return Err(EvalError::NonFinite(v));
    }
    Ok(v)
}

impl Evaluator for ExternalEvaluator {
    fn evaluate(&self, board: Board) -> Result<f64, EvalError> {
        let mut ch = self.channel.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(reason) = &ch.poisoned {
            return Err(EvalError::Poisoned(reason.clone()));
        }
        let result = (|| {
            writeln!(ch.stdin, "{}", encode_request(board)).map_err(|e| EvalError::Io(e.to_string()))?;
            ch.stdin.flush().map_err(|e| EvalError::Io(e.to_string()))?;
            let line = recv_line(&mut ch, self.handle.timeout())?;
            decode_response(&line)
        })();
        if let Err(e) = &result {
            ch.poisoned = Some(e.to_string());
        }
        result
    }
}

impl Drop for ExternalEvaluator {
    fn drop(&mut self) {
        let ch = self.channel.get_mut().unwrap_or_else(|p| p.into_inner());
        let _ = ch.child.kill();
        let _ = ch.child.wait();
    }
}

/// One-shot query: starts the evaluator, asks for one board, shuts it down.
pub fn eval_external(handle: &ExternalEvaluatorHandle, board: Board) -> Result<f64, EvalError> {
    ExternalEvaluator::spawn(handle)?.evaluate(board)
}

/// Serves the evaluator side of the protocol until `input` closes.
pub fn serve<R: BufRead, W: Write>(evaluator: &dyn Evaluator, input: R, mut output: W) -> Result<(), EvalError> {
    let io = |e: std::io::Error| EvalError::Io(e.to_string());
    writeln!(output, "{HANDSHAKE_PREFIX} {PROTOCOL_VERSION}").map_err(io)?;
    output.flush().map_err(io)?;
    for line in input.lines() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let board = decode_request(&line)?;
        let v = evaluator.evaluate(board)?;
        // `{}` on f64 prints the shortest representation that round-trips exactly.
        writeln!(output, "{v}").map_err(io)?;
        output.flush().map_err(io)?;
    }
    Ok(())
}

const PYTHON_DRIVER: &str = r#"

# ---- protocol driver (appended by evo2048) ----
import sys as _sys

def _main():
    _sys.stdout.write("EVAL2048 1\n")
    _sys.stdout.flush()
    for _line in _sys.stdin:
        _cells = [int(_t) for _t in _line.split()]
        if len(_cells) != 16:
            continue
        _board = [[(1 << _cells[4 * _r + _c]) if _cells[4 * _r + _c] else 0 for _c in range(4)] for _r in range(4)]
        _sys.stdout.write(repr(float(evaluate(_board))) + "\n")
        _sys.stdout.flush()

if __name__ == "__main__":
    _main()
"#;

/// Writes a generated Python listing plus the protocol driver to `dir/<id>.py`.
///
/// The listing must define `evaluate(board)` taking a 4x4 list of tile values.
pub fn materialize_python_program(dir: &Path, id: &str, listing: &str) -> std::io::Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{id}.py"));
    let mut text = listing.trim_end().to_string();
    text.push_str(PYTHON_DRIVER);
    std::fs::write(&path, text)?;
    Ok(path)
}

/// Handle that runs a materialized Python program in isolated mode.
pub fn python_handle(program: &Path, timeout_ms: u64) -> ExternalEvaluatorHandle {
    ExternalEvaluatorHandle::new(
        "python3",
        vec!["-I".to_string(), program.display().to_string()],
        timeout_ms,
    )
}
