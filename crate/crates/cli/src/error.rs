//! Error-to-exit-code mapping: 1 for validation/schema problems, 2 for
//! backend/protocol problems.

use argmine::agreement::AgreementError;
use argmine::analysis::AnalysisError;
use argmine::baselines::{BaselineError, LexiconError};
use argmine::corpus::{CorpusError, SplitError};
use argmine::features::{ScalerError, TrainError};
use argmine::metrics::MetricsError;
use argmine::pipeline::PipelineError;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> CliError {
        CliError {
            code: 1,
            message: message.into(),
        }
    }

    pub fn backend(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

macro_rules! validation_from {
    ($($ty:ty),*) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> CliError {
                CliError::validation(e.to_string())
            }
        })*
    };
}

validation_from!(
    CorpusError,
    SplitError,
    AgreementError,
    MetricsError,
    AnalysisError,
    LexiconError,
    BaselineError,
    TrainError,
    ScalerError,
    std::io::Error,
    csv::Error,
    serde_json::Error
);

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> CliError {
        match e {
            // a bad config file is the user's input, not the backend's fault
            PipelineError::Config(_) => CliError::validation(e.to_string()),
            other => CliError::backend(other.to_string()),
        }
    }
}
