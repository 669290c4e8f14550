//! Profile-constrained aim assistance and a naive baseline bot.

mod controller;
mod naive;
mod plan;
mod trajectory;

use thiserror::Error;

use crate::telemetry::Tick;

pub use controller::{AssistState, AuditEntry, AuditKind, Epoch, LiveEstimates, MimicConfig, MimicController};
pub use naive::NaiveAimbot;
pub use plan::{
    plan_adjustment, AdjustmentPlan, Decision, DecisionWeights, Direction, ImprovementObjective, PlanEntry, ADJUSTED,
};
pub use trajectory::{synthesize_trajectory, AimTrajectory, TrajectoryStyle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MimicError {
    #[error("profile of `{0}` has not passed the bootstrap gate")]
    Gate(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("event at tick {tick} precedes already observed tick {last}")]
    Sequence { tick: Tick, last: Tick },
}
