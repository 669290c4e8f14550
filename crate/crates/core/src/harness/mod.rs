//! Command pipeline: record, simulate, detect, report, experiment and
//! calibrate, all driven by one TOML config.

mod config;
mod pipeline;
mod report;
mod svg;

use std::path::PathBuf;

use thiserror::Error;

use crate::detector::DetectorError;
use crate::mimicry::MimicError;
use crate::profile::ProfileError;
use crate::simulator::SimError;
use crate::telemetry::TraceError;

pub use config::{CalibrationConfig, ExperimentConfig, GateConfig, LoadedConfig, Player, PlayerConfig};
pub use pipeline::{
    cmd_calibrate, cmd_detect, cmd_experiment, cmd_record, cmd_report, cmd_simulate, experiment_seed, record_seed,
    Condition, Layout, RunSummary,
};
pub use report::{read_csv, write_csv, CsvTable};
pub use svg::{render_chart, ChartSeries};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing input: {0}")]
    Dependency(String),
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("bootstrap gate rejected: {0}")]
    Gate(String),
    #[error(transparent)]
    Simulation(#[from] SimError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Mimic(#[from] MimicError),
    #[error(transparent)]
    Detector(#[from] DetectorError),
    #[error(transparent)]
    Trace(#[from] TraceError),
}

impl HarnessError {
    /// 1 for a rejected gate, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Gate(_) => 1,
            _ => 2,
        }
    }
}
