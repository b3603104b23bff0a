//! The `start:stop:count` grid syntax.

use std::fmt;
use std::str::FromStr;

use biharmonic::grid::MAX_GRID_POINTS;
use biharmonic::SweepGrid;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad grid `{input}`: {reason}")]
pub struct GridParseError {
    pub input: String,
    pub reason: String,
}

/// `count` evenly spaced points from `start` to `stop`, both inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn to_grid(&self) -> biharmonic::Result<SweepGrid> {
        SweepGrid::linspace(self.start, self.stop, self.count)
    }
}

pub fn parse_grid(input: &str) -> Result<GridSpec, GridParseError> {
    input.parse()
}

impl FromStr for GridSpec {
    type Err = GridParseError;

    fn from_str(input: &str) -> Result<Self, Self::Err> {
        let fail = |reason: &str| GridParseError {
            input: input.to_owned(),
            reason: reason.to_owned(),
        };
        let parts: Vec<&str> = input.split(':').collect();
        let [start, stop, count] = parts.as_slice() else {
            return Err(fail("expected start:stop:count"));
        };
        let start: f64 = start.trim().parse().map_err(|_| fail("start is not a number"))?;
        let stop: f64 = stop.trim().parse().map_err(|_| fail("stop is not a number"))?;
        let count: usize = count.trim().parse().map_err(|_| fail("count is not a non-negative integer"))?;
        if !start.is_finite() || !stop.is_finite() {
            return Err(fail("endpoints must be finite"));
        }
        if count > MAX_GRID_POINTS {
            return Err(fail(&format!("count must not exceed {MAX_GRID_POINTS}")));
        }
        match count {
            0 => return Err(fail("count must be at least 1")),
            1 if start != stop => return Err(fail("a single-point grid needs start == stop")),
            1 => {}
            _ if stop <= start => return Err(fail("stop must exceed start")),
            _ => {}
        }
        let spec = GridSpec { start, stop, count };
        spec.to_grid().map_err(|e| fail(&e.to_string()))?;
        Ok(spec)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

impl TryFrom<String> for GridSpec {
    type Error = GridParseError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

impl From<GridSpec> for String {
    fn from(spec: GridSpec) -> Self {
        spec.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_inclusive_grid() {
        let g = parse_grid("0.01:0.99:490").unwrap();
        assert_eq!((g.start, g.stop, g.count), (0.01, 0.99, 490));
        let grid = g.to_grid().unwrap();
        assert_eq!(grid.first(), 0.01);
        assert_eq!(grid.last(), 0.99);
        assert_eq!(grid.len(), 490);
    }

    #[test]
    fn accepts_negative_and_exponent_forms() {
        let g = parse_grid("-3:3e0:25").unwrap();
        assert_eq!((g.start, g.stop, g.count), (-3.0, 3.0, 25));
        assert!(parse_grid("2:2:1").is_ok());
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "1:2", "1:2:3:4", "a:1:3", "0:1:-2", "0:1:0", "1:0:5", "0:0:3", "0:1:1", "nan:1:3", "0:inf:3", "0:1:2.5", "0:1:99999999999"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn display_round_trips() {
        for text in ["0.05:4:80", "-3:3:25", "0.1:0.30000000000000004:7"] {
            let g = parse_grid(text).unwrap();
            assert_eq!(g.to_string(), text);
            assert_eq!(parse_grid(&g.to_string()).unwrap(), g);
        }
    }
}
