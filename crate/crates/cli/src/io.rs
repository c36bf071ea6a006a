use std::fmt::Display;
use std::path::Path;

use linf_equilateral::Error;
use serde::de::DeserializeOwned;
use serde::Serialize;

pub const INVALID_INPUT: u8 = 2;
pub const VERIFICATION_FAILED: u8 = 3;
pub const BUDGET_EXCEEDED: u8 = 4;
pub const NON_CONVERGENCE: u8 = 5;
pub const SANDWICH_VIOLATION: u8 = 6;

#[derive(Debug)]
pub struct CmdError {
    pub code: u8,
    pub message: String,
}

impl CmdError {
    pub fn new(code: u8, message: impl Display) -> Self {
        CmdError {
            code,
            message: message.to_string(),
        }
    }

    pub fn invalid(message: impl Display) -> Self {
        Self::new(INVALID_INPUT, message)
    }
}

impl From<Error> for CmdError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::BudgetExceeded { .. } => BUDGET_EXCEEDED,
            Error::NonConvergence(_) => NON_CONVERGENCE,
            Error::SandwichViolation { .. } => SANDWICH_VIOLATION,
            Error::InternalConsistency(_) => VERIFICATION_FAILED,
            _ => INVALID_INPUT,
        };
        CmdError::new(code, e)
    }
}

pub type CmdResult<T = ()> = Result<T, CmdError>;

/// Parses JSON, reporting the field path and line/column of the first problem.
pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> CmdResult<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        CmdError::invalid(format!(
            "{what}: {inner} (at {path})",
        ))
    })
}

pub fn read<T: DeserializeOwned>(path: &Path) -> CmdResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CmdError::invalid(format!("{}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable");
    s.push('\n');
    s
}

/// Writes to `path`, or stdout when absent.
pub fn emit(text: &str, path: Option<&Path>) -> CmdResult {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CmdError::invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
