//! Subprocess stage backend speaking the newline-delimited JSON
//! protocol over standard streams.
//!
//! One request per line on the child's stdin, one response per line on
//! its stdout. A dedicated reader thread forwards stdout lines through a
//! channel so a stalled child turns into a timeout instead of a hang.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver};
use std::time::{Duration, Instant};

use super::{PipelineError, StageBackend, StageTask, WireRequest, WireResponse};

pub struct ExternalProcessBackend {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
    timeout: Duration,
    command: String,
}

impl ExternalProcessBackend {
    /// Spawns `command` (program + arguments) with piped standard
    /// streams. `timeout_secs` bounds the wait for each response batch.
    pub fn spawn(command: &[String], timeout_secs: u64) -> Result<ExternalProcessBackend, PipelineError> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| PipelineError::Config("empty backend command".to_string()))?;
        let mut child = Command::new(program)
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| PipelineError::Backend(format!("failed to spawn {program:?}: {e}")))?;
        let stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let (sender, lines) = mpsc::channel();
        std::thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if sender.send(line).is_err() {
                    break; // backend dropped
                }
            }
        });
        Ok(ExternalProcessBackend {
            child,
            stdin,
            lines,
            timeout: Duration::from_secs(timeout_secs),
            command: command.join(" "),
        })
    }

    fn next_line(&mut self, deadline: Instant) -> Result<String, PipelineError> {
        let remaining = deadline
            .checked_duration_since(Instant::now())
            .ok_or(PipelineError::Timeout(self.timeout.as_secs()))?;
        match self.lines.recv_timeout(remaining) {
            Ok(Ok(line)) => Ok(line),
            Ok(Err(e)) => Err(PipelineError::Backend(format!(
                "reading from {}: {e}",
                self.command
            ))),
            Err(mpsc::RecvTimeoutError::Timeout) => {
                Err(PipelineError::Timeout(self.timeout.as_secs()))
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => Err(PipelineError::Backend(format!(
                "backend {} closed its output stream",
                self.command
            ))),
        }
    }
}

impl StageBackend for ExternalProcessBackend {
    fn classify(
        &mut self,
        _task: StageTask,
        requests: &[WireRequest],
    ) -> Result<Vec<WireResponse>, PipelineError> {
        let mut payload = String::new();
        for request in requests {
            payload.push_str(
                &serde_json::to_string(request)
                    .map_err(|e| PipelineError::Backend(e.to_string()))?,
            );
            payload.push('\n');
        }
        self.stdin
            .write_all(payload.as_bytes())
            .and_then(|_| self.stdin.flush())
            .map_err(|e| {
                PipelineError::Backend(format!("writing to {}: {e}", self.command))
            })?;

        let deadline = Instant::now() + self.timeout;
        let mut responses = Vec::with_capacity(requests.len());
        while responses.len() < requests.len() {
            let line = self.next_line(deadline)?;
            if line.trim().is_empty() {
                continue;
            }
            let response: WireResponse =
                serde_json::from_str(&line).map_err(|e| PipelineError::Protocol {
                    message: format!("malformed response line: {e}"),
                    payload: line.clone(),
                })?;
            responses.push(response);
        }
        Ok(responses)
    }
}

impl Drop for ExternalProcessBackend {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}
