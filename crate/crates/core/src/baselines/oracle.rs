//! Newline-delimited JSON protocol for external black-box classifiers.
//!
//! Each request is one line `{"id": n, "example": {...}}`, answered by one
//! line `{"id": n, "label": "..."}`.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::{BaselineError, Classifier};
use crate::executor::Example;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRequest {
    pub id: u64,
    pub example: Example,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResponse {
    pub id: u64,
    pub label: String,
}

struct Channel<R, W> {
    reader: R,
    writer: W,
    next_id: u64,
}

/// Client side of the protocol over any reader/writer pair.
pub struct NdjsonClassifier<R, W> {
    channel: Mutex<Channel<R, W>>,
}

impl<R: BufRead, W: Write> NdjsonClassifier<R, W> {
    pub fn new(reader: R, writer: W) -> Self {
        NdjsonClassifier {
            channel: Mutex::new(Channel {
                reader,
                writer,
                next_id: 0,
            }),
        }
    }

    pub fn into_inner(self) -> (R, W) {
        let c = self.channel.into_inner().expect("channel lock poisoned");
        (c.reader, c.writer)
    }
}

fn io_err(e: impl std::fmt::Display) -> BaselineError {
    BaselineError::Classifier(e.to_string())
}

impl<R: BufRead + Send, W: Write + Send> Classifier for NdjsonClassifier<R, W> {
    fn predict(&self, example: &Example) -> Result<String, BaselineError> {
        let mut c = self.channel.lock().expect("channel lock poisoned");
        let id = c.next_id;
        c.next_id += 1;
        let line = serde_json::to_string(&OracleRequest {
            id,
            example: example.clone(),
        })
        .map_err(io_err)?;
        writeln!(c.writer, "{line}").map_err(io_err)?;
        c.writer.flush().map_err(io_err)?;
        let mut buf = String::new();
        if c.reader.read_line(&mut buf).map_err(io_err)? == 0 {
            return Err(BaselineError::Classifier("oracle closed its output".into()));
        }
        let resp: OracleResponse = serde_json::from_str(buf.trim_end()).map_err(io_err)?;
        if resp.id != id {
            return Err(BaselineError::Classifier(format!(
                "response id {} does not match request id {id}",
                resp.id
            )));
        }
        Ok(resp.label)
    }
}

/// A classifier behind a child process speaking the protocol on stdin/stdout.
pub struct SubprocessClassifier {
    child: Child,
    inner: NdjsonClassifier<BufReader<ChildStdout>, ChildStdin>,
}

impl SubprocessClassifier {
    pub fn spawn(program: &str, args: &[String]) -> std::io::Result<Self> {
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(SubprocessClassifier {
            child,
            inner: NdjsonClassifier::new(stdout, stdin),
        })
    }
}

impl Classifier for SubprocessClassifier {
    fn predict(&self, example: &Example) -> Result<String, BaselineError> {
        self.inner.predict(example)
    }
}

impl Drop for SubprocessClassifier {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Server side: answers every request line from `reader` until end of input.
/// Returns the number of requests served.
pub fn serve_ndjson<R: BufRead, W: Write>(
    reader: R,
    mut writer: W,
    classifier: &dyn Classifier,
) -> Result<usize, BaselineError> {
    let mut served = 0;
    for line in reader.lines() {
        let line = line.map_err(io_err)?;
        if line.trim().is_empty() {
            continue;
        }
        let req: OracleRequest = serde_json::from_str(&line).map_err(io_err)?;
        let label = classifier.predict(&req.example)?;
        let out = serde_json::to_string(&OracleResponse { id: req.id, label }).map_err(io_err)?;
        writeln!(writer, "{out}").map_err(io_err)?;
        writer.flush().map_err(io_err)?;
        served += 1;
    }
    Ok(served)
}
