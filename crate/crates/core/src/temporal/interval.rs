use std::fmt;

use super::calendar::TimePoint;
use super::TemporalError;
use crate::logic::Term;

/// A nonempty half-open period `[start, end)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Interval {
    pub start: TimePoint,
    pub end: TimePoint,
}

/// Binary interval relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    Overlap,
    Within,
    Before,
    Meets,
}

impl Relation {
    pub fn from_name(name: &str) -> Option<Relation> {
        match name {
            "overlap" => Some(Relation::Overlap),
            "within" => Some(Relation::Within),
            "before" => Some(Relation::Before),
            "meets" => Some(Relation::Meets),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Relation::Overlap => "overlap",
            Relation::Within => "within",
            Relation::Before => "before",
            Relation::Meets => "meets",
        }
    }

    pub const ALL: [Relation; 4] = [Relation::Overlap, Relation::Within, Relation::Before, Relation::Meets];
}

/// Unary interval properties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    /// Any nonempty interval.
    Int,
    /// A one-hour interval; points live on the hour grid.
    Point,
    Hour,
    /// A whole calendar day starting at hour 0.
    DayA,
}

impl Property {
    pub fn from_name(name: &str) -> Option<Property> {
        match name {
            "int" => Some(Property::Int),
            "point" => Some(Property::Point),
            "hour" => Some(Property::Hour),
            "day_a" => Some(Property::DayA),
            _ => None,
        }
    }
}

impl Interval {
    pub fn new(start: TimePoint, end: TimePoint) -> Result<Interval, TemporalError> {
        if start.to_hours() >= end.to_hours() {
            return Err(TemporalError::EmptyInterval(format!("int({start},{end})")));
        }
        Ok(Interval { start, end })
    }

    pub fn from_hours(start: i64, end: i64) -> Result<Interval, TemporalError> {
        Interval::new(TimePoint::from_hours(start)?, TimePoint::from_hours(end)?)
    }

    pub fn hours(&self) -> (i64, i64) {
        (self.start.to_hours(), self.end.to_hours())
    }

    pub fn duration(&self) -> i64 {
        let (s, e) = self.hours();
        e - s
    }

    pub fn to_term(&self) -> Term {
        Term::app("int", vec![self.start.to_term(), self.end.to_term()])
    }

    /// Reads a ground `int(ts(..),ts(..))`. `Ok(None)` if the term has a
    /// different shape.
    pub fn from_term(t: &Term) -> Result<Option<Interval>, TemporalError> {
        let Some((f, 2)) = t.functor() else { return Ok(None) };
        if &**f != "int" {
            return Ok(None);
        }
        let (Some(s), Some(e)) = (TimePoint::from_term(&t.args()[0])?, TimePoint::from_term(&t.args()[1])?) else {
            return Ok(None);
        };
        Interval::new(s, e).map(Some)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "int({},{})", self.start, self.end)
    }
}

/// Ground truth of a relation over hour endpoints `[sa,ea)`, `[sb,eb)`.
pub fn holds_hours(rel: Relation, (sa, ea): (i64, i64), (sb, eb): (i64, i64)) -> bool {
    match rel {
        Relation::Overlap => sa < eb && sb < ea,
        Relation::Within => sb <= sa && ea <= eb,
        Relation::Before => ea <= sb,
        Relation::Meets => ea == sb,
    }
}

pub fn holds(rel: Relation, a: &Interval, b: &Interval) -> bool {
    holds_hours(rel, a.hours(), b.hours())
}

pub fn has_property_hours(p: Property, (s, e): (i64, i64)) -> bool {
    match p {
        Property::Int => s < e,
        Property::Point | Property::Hour => e - s == 1,
        Property::DayA => e - s == 24 && s.rem_euclid(24) == 0,
    }
}

pub fn has_property(p: Property, a: &Interval) -> bool {
    has_property_hours(p, a.hours())
}
