use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cullen_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use cullen_core::Error as E;
        match self {
            CliError::Io { .. } | CliError::Input(_) => 1,
            CliError::Mismatch(_) => 5,
            CliError::Core(e) => match e {
                E::InvalidRecurrence(_) | E::InvalidPolynomial(_) | E::InvalidInput(_) | E::MissingAValues => 1,
                E::Hypothesis(_)
                | E::DegenerateDominantCoefficient
                | E::NoDominantRoot
                | E::RepeatedRoots
                | E::NonPositiveGamma => 2,
                E::PrecisionExhausted { .. } | E::SingularBasis | E::Divergence | E::DivisionByZeroSymbol => 3,
                E::ScaleCapExceeded { .. } => 4,
            },
        }
    }
}
