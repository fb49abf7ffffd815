use std::process::ExitCode;

use thiserror::Error;
use vsi_core::device::DeviceError;
use vsi_core::dose::DoseError;
use vsi_core::electrometry::ElectrometryError;
use vsi_core::odmr::OdmrError;
use vsi_core::spin::SpinError;

use crate::formats::FormatError;

/// Command failure, classified by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config file or input file. Exit 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// The data do not determine the requested quantity. Exit 3.
    #[error("statistical error: {0}")]
    Statistical(String),
    /// Exit 4.
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    /// Writing results failed. Exit 1.
    #[error("output error: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Output(_) => 1,
            CliError::Config(_) => 2,
            CliError::Statistical(_) => 3,
            CliError::NotConverged(_) => 4,
        })
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<SpinError> for CliError {
    fn from(e: SpinError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DoseError> for CliError {
    fn from(e: DoseError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<OdmrError> for CliError {
    fn from(e: OdmrError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<DeviceError> for CliError {
    fn from(e: DeviceError) -> Self {
        match e {
            DeviceError::SingularSystem { .. } => CliError::NotConverged(e.to_string()),
            e => CliError::Config(e.to_string()),
        }
    }
}

impl From<ElectrometryError> for CliError {
    fn from(e: ElectrometryError) -> Self {
        use ElectrometryError as E;
        match e {
            E::PerpRatioTooLarge { .. }
            | E::DegenerateDesign(_)
            | E::IllConditionedRatio { .. }
            | E::UnphysicalFrequency { .. }
            | E::AmbiguousBranch { .. }
            | E::NonDecreasingModel => CliError::Statistical(e.to_string()),
            E::InvalidSeries(_) | E::InvalidInput(_) | E::Spin(_) => CliError::Config(e.to_string()),
        }
    }
}
