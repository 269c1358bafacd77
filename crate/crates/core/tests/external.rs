//! External-program adapter against small shell fixtures.

use std::time::{Duration, Instant};

use retromorphic::external::{external_identity_suite, ExternalProgram, Role};
use retromorphic::{run_suite, Stage, SuiteConfig, Verdict};
use serde_json::json;

const SHORT: Duration = Duration::from_millis(300);

fn sh(script: &str) -> Vec<String> {
    vec!["sh".into(), "-c".into(), script.into()]
}

fn program(role: Role, script: &str) -> ExternalProgram {
    ExternalProgram::spawn(role, sh(script), SHORT).unwrap()
}

#[test]
fn loopback_passes_identity_trials() {
    let suite = external_identity_suite(
        program(Role::Forward, "cat"),
        program(Role::Backward, "cat"),
    );
    let (summary, reports) = run_suite(&suite, &SuiteConfig::default().iterations(100)).unwrap();
    assert_eq!(
        summary.pass,
        100,
        "{:?}",
        reports.iter().find(|r| !r.verdict.is_pass())
    );
}

#[test]
fn reported_error_becomes_a_fault() {
    let p = program(
        Role::Forward,
        r#"sed -u 's/"data":.*/"error":"bad input"}/'"#,
    );
    let err = p.call(json!([1.0])).unwrap_err();
    assert!(err.to_string().contains("bad input"), "{err}");
    // the process survives an error response
    assert!(p.call(json!([2.0])).is_err());
}

#[test]
fn stall_times_out_and_restarts() {
    let suite = external_identity_suite(
        program(Role::Forward, "sleep 30"),
        program(Role::Backward, "cat"),
    );
    let start = Instant::now();
    let (summary, reports) = run_suite(&suite, &SuiteConfig::default().iterations(2)).unwrap();
    assert!(start.elapsed() < Duration::from_secs(5));
    assert_eq!(summary.program_error, 2);
    for r in &reports {
        match &r.verdict {
            Verdict::ProgramError { stage, message } => {
                assert_eq!(*stage, Stage::ForwardExec);
                assert!(message.contains("timed out"), "{message}");
            }
            other => panic!("expected a timeout, got {other:?}"),
        }
    }
}

#[test]
fn crash_is_reported_and_next_call_restarts() {
    // answers the first request, then exits
    let p = program(Role::Backward, "read line; echo \"$line\"");
    assert_eq!(p.call(json!("x")).unwrap(), json!("x"));
    assert!(p.call(json!("y")).is_err());
    assert_eq!(p.call(json!("z")).unwrap(), json!("z"));
}

#[test]
fn malformed_and_mismatched_responses() {
    let garbage = program(Role::Forward, "while read l; do echo not-json; done");
    assert!(garbage
        .call(json!(1))
        .unwrap_err()
        .to_string()
        .contains("malformed"));
    let wrong_id = program(
        Role::Forward,
        r#"while read l; do echo '{"id":99,"data":1}'; done"#,
    );
    assert!(wrong_id
        .call(json!(1))
        .unwrap_err()
        .to_string()
        .contains("id mismatch"));
}

#[test]
fn missing_executable_is_a_config_error() {
    let err = ExternalProgram::spawn(Role::Forward, vec!["/nonexistent/program".into()], SHORT);
    assert!(err.is_err());
}
