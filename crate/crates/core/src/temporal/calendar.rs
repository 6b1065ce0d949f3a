use std::fmt;

use chrono::{Datelike, NaiveDate};

use super::TemporalError;
use crate::logic::Term;

/// A calendar instant at hour resolution, written `ts(Y,M,D,H)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimePoint {
    pub year: i32,
    pub month: u32,
    pub day: u32,
    pub hour: u32,
}

fn epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch")
}

impl TimePoint {
    pub fn new(year: i32, month: u32, day: u32, hour: u32) -> Result<TimePoint, TemporalError> {
        let p = TimePoint { year, month, day, hour };
        if hour > 23 || NaiveDate::from_ymd_opt(year, month, day).is_none() {
            return Err(TemporalError::InvalidTimePoint(p.to_string()));
        }
        Ok(p)
    }

    fn date(&self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, self.day).expect("validated on construction")
    }

    /// Hours since 1970-01-01 00:00 in the proleptic Gregorian calendar.
    pub fn to_hours(&self) -> i64 {
        let days = (self.date() - epoch()).num_days();
        days * 24 + i64::from(self.hour)
    }

    pub fn from_hours(hours: i64) -> Result<TimePoint, TemporalError> {
        let days = hours.div_euclid(24);
        let hour = hours.rem_euclid(24) as u32;
        let date = epoch()
            .checked_add_signed(chrono::TimeDelta::try_days(days).ok_or(TemporalError::OutOfRange(hours))?)
            .ok_or(TemporalError::OutOfRange(hours))?;
        Ok(TimePoint { year: date.year(), month: date.month(), day: date.day(), hour })
    }

    pub fn to_term(&self) -> Term {
        Term::app(
            "ts",
            vec![
                Term::int(self.year.into()),
                Term::int(self.month.into()),
                Term::int(self.day.into()),
                Term::int(self.hour.into()),
            ],
        )
    }

    /// Reads a ground `ts/4` term. `Ok(None)` means the term is not a `ts`
    /// literal at all; a malformed or calendar-invalid one is an error.
    pub fn from_term(t: &Term) -> Result<Option<TimePoint>, TemporalError> {
        let Some((f, 4)) = t.functor() else { return Ok(None) };
        if &**f != "ts" {
            return Ok(None);
        }
        let bad = || TemporalError::InvalidTimePoint(t.to_string());
        let nums: Vec<i64> = t.args().iter().map(|a| a.as_int().ok_or_else(bad)).collect::<Result<_, _>>()?;
        let year = i32::try_from(nums[0]).map_err(|_| bad())?;
        let month = u32::try_from(nums[1]).map_err(|_| bad())?;
        let day = u32::try_from(nums[2]).map_err(|_| bad())?;
        let hour = u32::try_from(nums[3]).map_err(|_| bad())?;
        TimePoint::new(year, month, day, hour).map(Some)
    }
}

impl fmt::Display for TimePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ts({},{},{},{})", self.year, self.month, self.day, self.hour)
    }
}

impl std::str::FromStr for TimePoint {
    type Err = TemporalError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = crate::kr::parse_term(s.trim()).map_err(|_| TemporalError::InvalidTimePoint(s.to_string()))?;
        TimePoint::from_term(&t)?.ok_or_else(|| TemporalError::InvalidTimePoint(s.to_string()))
    }
}
