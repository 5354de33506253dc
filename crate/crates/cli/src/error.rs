use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] nlcomp_core::Error),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

#[derive(Serialize)]
struct Record<'a> {
    error: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    message: String,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "ParseError",
            CliError::Validation(_) => "ValidationError",
            CliError::Io(_) => "IoError",
            CliError::Core(e) => e.kind(),
        }
    }

    /// Single-line JSON record for stderr.
    pub fn record(&self) -> String {
        let line = match self {
            CliError::Parse { line, .. } if *line > 0 => Some(*line),
            _ => None,
        };
        let message = match self {
            CliError::Parse { message, .. } => message.clone(),
            other => other.to_string(),
        };
        let rec = Record {
            error: self.kind(),
            line,
            message: message.replace('\n', " "),
        };
        serde_json::to_string(&rec).expect("record serializes")
    }
}
