use std::process::{Command, Output};

/// Runs the compiled binary with the given arguments.
pub fn bridgetail(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bridgetail"))
        .args(args)
        .output()
        .expect("binary launches")
}

/// Runs the binary, asserts success, and parses stdout as JSON.
pub fn stdout_json(args: &[&str]) -> serde_json::Value {
    let out = bridgetail(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}
