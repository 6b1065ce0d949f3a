//! Calendar points, intervals and the constraint store that decides them.

pub mod calendar;
pub mod interval;
pub mod store;

use thiserror::Error;

pub use calendar::TimePoint;
pub use interval::{has_property, holds, Interval, Property, Relation};
pub use store::{Pt, Span, Store};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TemporalError {
    #[error("invalid time point {0}")]
    InvalidTimePoint(String),
    #[error("empty interval {0}")]
    EmptyInterval(String),
    #[error("hour offset {0} is outside the supported calendar range")]
    OutOfRange(i64),
}

/// The posted constraints have no solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("inconsistent temporal constraints")]
pub struct Inconsistent;
