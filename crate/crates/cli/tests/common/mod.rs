#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Output {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {}", self.stdout))
    }
}

pub fn tmi<S: AsRef<std::ffi::OsStr>>(args: &[S]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_tmi"))
        .args(args)
        .output()
        .expect("binary runs");
    Output {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

/// Runs `tmi synth` and returns (features, labels) paths.
pub fn synth(dir: &Path, name: &str, extra: &[&str]) -> (PathBuf, PathBuf) {
    let prefix = dir.join(name);
    let mut args = vec![
        "synth".to_string(),
        "--out-prefix".into(),
        prefix.display().to_string(),
    ];
    args.extend(extra.iter().map(|s| s.to_string()));
    let out = tmi(&args);
    assert_eq!(out.code, 0, "synth failed: {}", out.stderr);
    (
        dir.join(format!("{name}_features.csv")),
        dir.join(format!("{name}_labels.csv")),
    )
}

/// Pretty JSON text with the top-level `"timing"` object removed.
pub fn strip_timing(text: &str) -> String {
    let mut out = Vec::new();
    let mut skipping = false;
    for line in text.lines() {
        if !skipping && line.starts_with("  \"timing\": {") {
            skipping = !line.ends_with('}') && !line.ends_with("},");
            continue;
        }
        if skipping {
            if line == "  }" || line == "  }," {
                skipping = false;
            }
            continue;
        }
        out.push(line);
    }
    out.join("\n")
}
