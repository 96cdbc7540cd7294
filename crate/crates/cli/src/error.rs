use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] sdof::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io(_) => "IO_ERROR",
            CliError::Config(_) | CliError::Json(_) | CliError::Csv(_) => "CONFIG_ERROR",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.code() {
            "CONFIG_ERROR" | "INVALID_SCENARIO" | "CONSTRAINT_VIOLATION" => 2,
            _ => 1,
        }
    }

    pub fn record(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: &'a str,
            message: String,
        }
        serde_json::to_string(&Record { error: self.code(), message: self.to_string() })
            .unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", self.code()))
    }
}
