use std::fmt::Display;

use serde::Serialize;
use specgrowth::ErrorKind;

/// A stage error with its exit-code class.
#[derive(Debug)]
pub struct Failure {
    pub stage: &'static str,
    pub kind: ErrorKind,
    pub message: String,
}

#[derive(Serialize)]
struct FailureJson<'a> {
    error: &'a str,
    kind: &'static str,
    stage: &'a str,
}

impl Failure {
    pub fn validation(stage: &'static str, message: impl Display) -> Self {
        Failure { stage, kind: ErrorKind::Validation, message: message.to_string() }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind {
            ErrorKind::Validation => 1,
            ErrorKind::ResourceCap => 2,
            ErrorKind::NonConvergence => 3,
        }
    }

    pub fn to_json(&self) -> String {
        let kind = match self.kind {
            ErrorKind::Validation => "validation",
            ErrorKind::ResourceCap => "resource_cap",
            ErrorKind::NonConvergence => "non_convergence",
        };
        serde_json::to_string(&FailureJson { error: &self.message, kind, stage: self.stage })
            .expect("failure JSON")
    }
}

/// Tags library errors with the stage they came from.
pub trait Stage<T> {
    fn stage(self, stage: &'static str) -> Result<T, Failure>;
}

impl<T, E: Into<specgrowth::Error>> Stage<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, Failure> {
        self.map_err(|e| {
            let e: specgrowth::Error = e.into();
            Failure { stage, kind: e.kind(), message: e.to_string() }
        })
    }
}

pub fn io_stage<T>(r: std::io::Result<T>, stage: &'static str) -> Result<T, Failure> {
    r.map_err(|e| Failure::validation(stage, e))
}
