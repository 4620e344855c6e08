use thiserror::Error;

/// Failures mapped to the process exit codes.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Io(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    /// While reading the file: structural failures are invariant errors, everything else is a parse error.
    pub fn from_core_input(e: cartan_core::Error, at: &str) -> Self {
        use cartan_core::Error as E;
        match e {
            E::Invariant(m) => CliError::Invariant(format!("{at}: {m}")),
            E::Numeric(m) => CliError::Numeric(format!("{at}: {m}")),
            other => CliError::Parse(format!("{at}: {other}")),
        }
    }

    /// While running a task: unmet preconditions count as invariant violations.
    pub fn from_core_task(e: cartan_core::Error, task: &str) -> Self {
        use cartan_core::Error as E;
        match e {
            E::Numeric(m) => CliError::Numeric(format!("{task}: {m}")),
            E::DimensionMismatch(_) | E::UnknownBuiltin(_) => CliError::Parse(format!("{task}: {e}")),
            E::Invariant(m) | E::InvalidInput(m) => CliError::Invariant(format!("{task}: {m}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cartan_core::Error as E;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::from_core_task(E::Numeric("x".into()), "t").exit_code(), 4);
        assert_eq!(CliError::from_core_task(E::Invariant("x".into()), "t").exit_code(), 3);
        assert_eq!(CliError::from_core_task(E::InvalidInput("x".into()), "t").exit_code(), 3);
        assert_eq!(CliError::from_core_input(E::InvalidInput("x".into()), "t").exit_code(), 2);
        assert_eq!(CliError::from_core_input(E::Numeric("x".into()), "t").exit_code(), 4);
    }
}
