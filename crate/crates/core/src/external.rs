//! Adapter that turns a long-lived child process into a [`Program`].
//!
//! Wire protocol, one UTF-8 JSON object per line:
//!
//! ```text
//! -> {"id":0,"data":<datum>}
//! <- {"id":0,"data":<datum>}        or        {"id":0,"error":"message"}
//! ```
//!
//! At most one request is in flight per process. A timeout, a crash or an
//! unreadable response becomes a [`Fault`] for that trial; after a timeout or
//! crash the child is killed and restarted on the next request.

use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Mutex;
use std::thread;
use std::time::Duration;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::ConfigError;
use crate::generators::gen_real_sequence;
use crate::pipeline::{
    ExecCtx, Fault, Judgement, ModeTag, MutationDescriptor, Program, RelationCtx, SuiteDefinition,
};
use crate::rng::Rng;

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(10);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Forward,
    Backward,
}

impl Role {
    fn as_str(self) -> &'static str {
        match self {
            Role::Forward => "forward",
            Role::Backward => "backward",
        }
    }
}

struct Running {
    child: Child,
    stdin: ChildStdin,
    lines: Receiver<std::io::Result<String>>,
}

impl Running {
    fn spawn(argv: &[String]) -> std::io::Result<Self> {
        let (program, args) = argv.split_first().ok_or_else(|| {
            std::io::Error::new(std::io::ErrorKind::InvalidInput, "empty command")
        })?;
        let mut command = Command::new(program);
        command
            .args(args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit());
        // Own process group, so that killing a shell wrapper also kills
        // whatever it started.
        #[cfg(unix)]
        std::os::unix::process::CommandExt::process_group(&mut command, 0);
        let mut child = command.spawn()?;
        let stdin = child.stdin.take().expect("stdin is piped");
        let stdout = child.stdout.take().expect("stdout is piped");
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        Ok(Self {
            child,
            stdin,
            lines: rx,
        })
    }

    fn kill(mut self) {
        #[cfg(unix)]
        if let Ok(pid) = libc::pid_t::try_from(self.child.id()) {
            // SAFETY: plain syscall; the group id is the child's pid, which
            // has not been reaped yet and so cannot have been reused.
            unsafe {
                libc::kill(-pid, libc::SIGKILL);
            }
        }
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// A child process speaking the line-JSON protocol.
pub struct ExternalProgram {
    argv: Vec<String>,
    role: Role,
    timeout: Duration,
    next_id: AtomicU64,
    running: Mutex<Option<Running>>,
}

impl ExternalProgram {
    /// Starts the child immediately so that a bad command is reported as a
    /// configuration error.
    pub fn spawn(role: Role, argv: Vec<String>, timeout: Duration) -> Result<Self, ConfigError> {
        let running = Running::spawn(&argv).map_err(|e| ConfigError::Spawn {
            command: argv.join(" "),
            reason: e.to_string(),
        })?;
        Ok(Self {
            argv,
            role,
            timeout,
            next_id: AtomicU64::new(0),
            running: Mutex::new(Some(running)),
        })
    }

    pub fn role(&self) -> Role {
        self.role
    }

    fn fault(&self, message: impl std::fmt::Display) -> Fault {
        Fault::failed(format!(
            "external {} program `{}`: {message}",
            self.role.as_str(),
            self.argv.join(" ")
        ))
    }

    /// Sends one datum and waits for its response.
    pub fn call(&self, data: Value) -> Result<Value, Fault> {
        let mut guard = self.running.lock().unwrap_or_else(|p| p.into_inner());
        if guard.is_none() {
            *guard = Some(
                Running::spawn(&self.argv)
                    .map_err(|e| self.fault(format!("restart failed: {e}")))?,
            );
        }
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let request = json!({ "id": id, "data": data }).to_string();

        let running = guard.as_mut().expect("just ensured");
        let sent = writeln!(running.stdin, "{request}").and_then(|_| running.stdin.flush());
        if let Err(e) = sent {
            if let Some(r) = guard.take() {
                r.kill();
            }
            return Err(self.fault(format!("write failed: {e}")));
        }

        let line = match running.lines.recv_timeout(self.timeout) {
            Ok(Ok(line)) => line,
            Ok(Err(e)) => {
                if let Some(r) = guard.take() {
                    r.kill();
                }
                return Err(self.fault(format!("read failed: {e}")));
            }
            Err(RecvTimeoutError::Disconnected) => {
                if let Some(r) = guard.take() {
                    r.kill();
                }
                return Err(self.fault("exited without responding"));
            }
            Err(RecvTimeoutError::Timeout) => {
                if let Some(r) = guard.take() {
                    r.kill();
                }
                return Err(self.fault(format!("timed out after {:?}", self.timeout)));
            }
        };
        drop(guard);
        self.decode_response(id, &line)
    }

    fn decode_response(&self, id: u64, line: &str) -> Result<Value, Fault> {
        let value: Value = serde_json::from_str(line)
            .map_err(|e| self.fault(format!("malformed response `{line}`: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| self.fault(format!("response is not an object: `{line}`")))?;
        match obj.get("id").and_then(Value::as_u64) {
            Some(got) if got == id => {}
            _ => return Err(self.fault(format!("response id mismatch, expected {id}: `{line}`"))),
        }
        if let Some(err) = obj.get("error") {
            let msg = err.as_str().map_or_else(|| err.to_string(), str::to_owned);
            return Err(self.fault(format!("reported error: {msg}")));
        }
        obj.get("data")
            .cloned()
            .ok_or_else(|| self.fault(format!("response has neither data nor error: `{line}`")))
    }
}

impl Drop for ExternalProgram {
    fn drop(&mut self) {
        if let Some(r) = self.running.get_mut().ok().and_then(Option::take) {
            r.kill();
        }
    }
}

impl<I, O> Program<I, O> for ExternalProgram
where
    I: Serialize,
    O: DeserializeOwned,
{
    fn run(&self, input: &I, ctx: &mut ExecCtx<'_>) -> Result<O, Fault> {
        ctx.tick(1)?;
        let data = serde_json::to_value(input)
            .map_err(|e| self.fault(format!("cannot encode input: {e}")))?;
        let out = self.call(data)?;
        serde_json::from_value(out).map_err(|e| self.fault(format!("cannot decode output: {e}")))
    }
}

/// Suite around two external programs: random real sequences (as JSON
/// arrays) go through forward then backward and must come back unchanged.
/// Trials run sequentially.
pub fn external_identity_suite(
    forward: ExternalProgram,
    backward: ExternalProgram,
) -> SuiteDefinition<Value, Value> {
    let forward: std::sync::Arc<dyn Program<Value, Value>> = std::sync::Arc::new(forward);
    let backward: std::sync::Arc<dyn Program<Value, Value>> = std::sync::Arc::new(backward);
    SuiteDefinition::builder("external", ModeTag::Integrated)
        .generator(|rng: &mut Rng| {
            let xs = gen_real_sequence(rng, 1, 16, -1.0, 1.0)
                .map_err(|e| Fault::failed(e.to_string()))?;
            Ok(json!(xs))
        })
        .variant_arc("correct", forward, backward)
        .relation(
            |m1: &Value, m1p: &Value, _: &MutationDescriptor, _: &RelationCtx| {
                Ok(if m1 == m1p {
                    Judgement::Holds
                } else {
                    Judgement::Broken("round trip changed the datum".to_owned())
                })
            },
        )
        .sequential(true)
        .build()
        .expect("external suite is complete")
}
