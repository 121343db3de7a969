use serde_json::{json, Value};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown configuration keys: {}", .0.join(", "))]
    UnknownKeys(Vec<String>),

    #[error(transparent)]
    Model(#[from] adsorb_core::Error),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &std::path::Path, err: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), message: err.to_string() }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::UnknownKeys(_) => "unknown-keys",
            CliError::Model(e) => e.kind(),
            CliError::Io { .. } => "io",
        }
    }

    /// 2: unusable configuration, 3: the model admits no solution,
    /// 4: a solver failed, 5: file system trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownKeys(_) => 2,
            CliError::Model(e) => match e {
                adsorb_core::Error::Domain(_)
                | adsorb_core::Error::Inconsistent { .. }
                | adsorb_core::Error::Existence(_)
                | adsorb_core::Error::InvalidArgument(_) => 3,
                _ => 4,
            },
            CliError::Io { .. } => 5,
        }
    }

    /// Machine-readable description written to standard error.
    pub fn to_json(&self) -> Value {
        let mut body = json!({
            "kind": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        match self {
            CliError::UnknownKeys(keys) => body["keys"] = json!(keys),
            CliError::Model(adsorb_core::Error::Existence(report)) => {
                body["report"] = serde_json::to_value(report).unwrap_or(Value::Null)
            }
            _ => {}
        }
        json!({ "error": body })
    }
}
