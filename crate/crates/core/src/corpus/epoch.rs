use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Calendar month that maps to month index 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Epoch {
    year: i32,
    month: u32,
}

impl Default for Epoch {
    /// January 1893, the first month of the APS record.
    fn default() -> Self {
        Epoch {
            year: 1893,
            month: 1,
        }
    }
}

fn parse_year_month(s: &str) -> Result<(i32, u32)> {
    let bad = || Error::InvalidMonth(format!("`{s}` is not a YYYY-MM date"));
    let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
    let year: i32 = y.parse().map_err(|_| bad())?;
    let month: u32 = m.parse().map_err(|_| bad())?;
    if !(1..=12).contains(&month) || y.len() != 4 {
        return Err(bad());
    }
    Ok((year, month))
}

impl Epoch {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidMonth(format!("{year}-{month}")));
        }
        Ok(Epoch { year, month })
    }

    fn ordinal(year: i32, month: u32) -> i64 {
        i64::from(year) * 12 + i64::from(month) - 1
    }

    /// Month index of a `YYYY-MM` date.
    pub fn month_index(&self, date: &str) -> Result<u32> {
        let (y, m) = parse_year_month(date)?;
        let idx = Self::ordinal(y, m) - Self::ordinal(self.year, self.month);
        u32::try_from(idx)
            .map_err(|_| Error::InvalidMonth(format!("{date} precedes the epoch {self}")))
    }

    /// Accepts either a `YYYY-MM` date or a bare month index.
    pub fn parse_month(&self, s: &str) -> Result<u32> {
        if let Ok(idx) = s.trim().parse::<u32>() {
            return Ok(idx);
        }
        self.month_index(s)
    }

    pub fn format(&self, month: u32) -> String {
        let ord = Self::ordinal(self.year, self.month) + i64::from(month);
        format!("{:04}-{:02}", ord.div_euclid(12), ord.rem_euclid(12) + 1)
    }
}

impl fmt::Display for Epoch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Epoch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (year, month) = parse_year_month(s)?;
        Ok(Epoch { year, month })
    }
}

impl TryFrom<String> for Epoch {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Epoch> for String {
    fn from(e: Epoch) -> String {
        e.to_string()
    }
}
