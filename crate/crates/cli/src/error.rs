use polymod::combinatorics::{LabelError, WeightError};
use polymod::complex::ComplexError;
use polymod::fiber::FiberError;
use polymod::moduli::ModuliError;
use serde_json::json;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURES: i32 = 1;
    pub const INPUT: i32 = 2;
    pub const NO_INTERSECTION: i32 = 3;
    pub const INCONSISTENT: i32 = 4;
    pub const NOT_EQUAL_WEIGHT: i32 = 5;
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub kind: String,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, kind: impl Into<String>, message: impl Into<String>) -> Self {
        CliError { code, kind: kind.into(), message: message.into() }
    }

    pub fn input(kind: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::new(exit::INPUT, kind, message)
    }

    pub fn document(&self) -> serde_json::Value {
        json!({
            "schema": "polymod-error/1",
            "version": env!("CARGO_PKG_VERSION"),
            "error": {"kind": self.kind, "message": self.message, "exit_code": self.code},
        })
    }
}

impl From<WeightError> for CliError {
    fn from(e: WeightError) -> Self {
        CliError::input(e.kind(), e.to_string())
    }
}

impl From<LabelError> for CliError {
    fn from(e: LabelError) -> Self {
        CliError::input(e.kind(), e.to_string())
    }
}

impl From<ModuliError> for CliError {
    fn from(e: ModuliError) -> Self {
        CliError::new(exit::FAILURES, e.kind(), e.to_string())
    }
}

impl From<FiberError> for CliError {
    fn from(e: FiberError) -> Self {
        let code = match e {
            FiberError::NoIntersection { .. } => exit::NO_INTERSECTION,
            FiberError::InconsistentPair { .. } => exit::INCONSISTENT,
            FiberError::NotInUpperHalfPlane { .. } | FiberError::NotInTheta(_) => exit::INPUT,
            _ => exit::FAILURES,
        };
        CliError::new(code, e.kind(), e.to_string())
    }
}

impl From<ComplexError> for CliError {
    fn from(e: ComplexError) -> Self {
        let code = match e {
            ComplexError::NotEqualWeight => exit::NOT_EQUAL_WEIGHT,
            ComplexError::Lorentz(_) | ComplexError::Moduli(_) | ComplexError::PairingFailure { .. } | ComplexError::Export(_) => {
                exit::FAILURES
            }
            _ => exit::INPUT,
        };
        CliError::new(code, e.kind(), e.to_string())
    }
}
