use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: Value,
    pub seed: Option<u64>,
    pub tolerances: Value,
    pub results: Value,
}

impl Report {
    pub fn new(command: &'static str, inputs: Value, seed: Option<u64>, tolerances: Value, results: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            tool: "evlab",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            seed,
            tolerances,
            results,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain { kind: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain { .. } => 1,
        }
    }

    pub fn format(message: impl Into<String>) -> Self {
        CliError::Domain {
            kind: "Format".into(),
            message: message.into(),
        }
    }

    pub fn to_value(&self) -> Value {
        match self {
            CliError::Usage(m) => json!({"kind": "Usage", "message": m}),
            CliError::Domain { kind, message } => json!({"kind": kind, "message": message}),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Domain { message, .. } => f.write_str(message),
        }
    }
}

impl From<evlab_core::Error> for CliError {
    fn from(e: evlab_core::Error) -> Self {
        let debug = format!("{e:?}");
        let kind = debug
            .split(|c: char| !c.is_alphanumeric())
            .next()
            .unwrap_or("Error")
            .to_string();
        CliError::Domain {
            kind,
            message: e.to_string(),
        }
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

pub fn render(report: &Report) -> String {
    serde_json::to_string_pretty(report).expect("report serializes")
}

pub fn error_report(command: &str, e: &CliError) -> String {
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "tool": "evlab",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "error": e.to_value(),
    });
    serde_json::to_string_pretty(&v).expect("error report serializes")
}
