//! Simulated FPS engagements, fifteen-property player profiles, adaptive
//! behaviour-mimicking aim assistance, and detectors that try to tell
//! assisted play from genuine play.

pub mod detector;
pub mod harness;
pub mod mimicry;
pub mod profile;
pub mod simulator;
pub mod telemetry;
