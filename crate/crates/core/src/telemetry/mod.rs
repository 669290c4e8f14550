//! Tick-level event model and the persistent trace format.

mod engagement;
mod event;
mod format;
mod validate;
mod vec3;

pub use engagement::{engagements, Engagement, Milestones};
pub use event::{BodyPart, EngagementTrace, EventKind, GameEvent, Outcome, Tick, WeaponSlot, DEFAULT_TICK_RATE};
pub use format::{parse_trace, read_trace, write_trace, write_trace_string, TraceError, SCHEMA_VERSION};
pub use validate::{validate_trace, ValidationReport, Violation, ViolationKind};
pub use vec3::{GreatCircle, Vec3, UNIT_TOLERANCE};
