use serde_json::{json, Value};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// A failed run, reported as `{"error": {"class": ..., "message": ...}}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Failure {
    pub class: String,
    pub message: String,
    pub exit: u8,
}

impl Failure {
    pub fn new(class: &str, message: impl Into<String>, exit: u8) -> Self {
        Failure {
            class: class.to_string(),
            message: message.into(),
            exit,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Failure::new("UsageError", message, EXIT_USAGE)
    }

    pub fn to_json(&self) -> Value {
        json!({ "error": { "class": self.class, "message": self.message } })
    }
}

impl From<driftgreen::Error> for Failure {
    fn from(e: driftgreen::Error) -> Self {
        let exit = match e {
            driftgreen::Error::Divergence { .. } | driftgreen::Error::NonConvergence { .. } => {
                EXIT_NUMERICAL
            }
            _ => EXIT_USAGE,
        };
        Failure::new(e.class(), e.to_string(), exit)
    }
}
