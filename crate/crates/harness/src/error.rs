use faithex_core::baselines::BaselineError;
use faithex_core::executor::ExecError;
use faithex_core::explainer::SearchError;
use faithex_core::explang::ParseError;
use faithex_core::taskforge::TaskError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("malformed CSV at line {line}: {msg}")]
    MalformedCsv { line: u64, msg: String },
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("unsupported classifier kind {0:?}")]
    UnsupportedKind(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("could not draw a subset with both predicted classes after {0} attempts")]
    DegenerateSubsets(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Exec(#[from] ExecError),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error(transparent)]
    Task(#[from] TaskError),
}

impl HarnessError {
    /// Process exit code: 2 for input and configuration problems, 3 when a
    /// budget ran out, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::MalformedCsv { .. }
            | HarnessError::EmptyDataset
            | HarnessError::UnsupportedKind(_)
            | HarnessError::Config(_)
            | HarnessError::Json(_)
            | HarnessError::Toml(_)
            | HarnessError::Parse(_) => 2,
            HarnessError::Baseline(BaselineError::BudgetExhausted { .. }) => 3,
            _ => 1,
        }
    }
}
