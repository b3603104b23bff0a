//! Rectangular sweep grids, scalar-field maps and grid extremum refinement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest number of points [`SweepGrid::linspace`] will build.
pub const MAX_GRID_POINTS: usize = 1 << 24;

/// A strictly increasing list of sample points along one parameter axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct SweepGrid {
    values: Vec<f64>,
}

impl SweepGrid {
    /// `count` evenly spaced points from `start` to `stop`, both inclusive.
    pub fn linspace(start: f64, stop: f64, count: usize) -> Result<Self> {
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::invalid("grid", "endpoints must be finite"));
        }
        if count > MAX_GRID_POINTS {
            return Err(Error::invalid("grid", format!("count {count} exceeds {MAX_GRID_POINTS}")));
        }
        let values = match count {
            0 => return Err(Error::invalid("grid", "count must be at least 1")),
            1 => {
                if start != stop {
                    return Err(Error::invalid(
                        "grid",
                        "a single-point grid needs start == stop",
                    ));
                }
                vec![start]
            }
            n => {
                let step = (stop - start) / (n - 1) as f64;
                // Last point pinned to `stop`.
                (0..n)
                    .map(|i| if i == n - 1 { stop } else { start + step * i as f64 })
                    .collect()
            }
        };
        Self::from_values(values)
    }

    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("grid", "grid is empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid", "grid values must be finite"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid", "grid must be strictly increasing"));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.values[0]
    }

    pub fn last(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}

impl TryFrom<Vec<f64>> for SweepGrid {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::from_values(values)
    }
}

impl From<SweepGrid> for Vec<f64> {
    fn from(grid: SweepGrid) -> Self {
        grid.values
    }
}

/// Scalar field sampled on `rows x cols`, stored row-major.
///
/// Cells whose evaluation failed are `None`; `masked` counts them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapResult {
    pub rows: SweepGrid,
    pub cols: SweepGrid,
    pub cells: Vec<Option<f64>>,
    pub masked: usize,
}

impl MapResult {
    pub fn new(rows: SweepGrid, cols: SweepGrid, cells: Vec<Option<f64>>) -> Self {
        assert_eq!(cells.len(), rows.len() * cols.len(), "cell count mismatch");
        let masked = cells.iter().filter(|c| c.is_none()).count();
        Self {
            rows,
            cols,
            cells,
            masked,
        }
    }

    pub fn get(&self, row: usize, col: usize) -> Option<f64> {
        self.cells[row * self.cols.len() + col]
    }

    pub fn row(&self, row: usize) -> &[Option<f64>] {
        let n = self.cols.len();
        &self.cells[row * n..(row + 1) * n]
    }
}

/// Location of a refined grid extremum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Refined abscissa.
    pub x: f64,
    /// Value of the fitted parabola at `x` (the grid value at the edges).
    pub value: f64,
    /// Index of the best raw grid sample.
    pub index: usize,
}

/// Argmax of sampled `ys` over `xs`, refined by a three-point parabola
/// through the best sample and its two neighbours.
///
/// `None` entries are skipped. Returns `None` when nothing is finite.
pub fn refine_argmax(xs: &[f64], ys: &[Option<f64>]) -> Option<Extremum> {
    assert_eq!(xs.len(), ys.len());
    let (index, best) = ys
        .iter()
        .enumerate()
        .filter_map(|(i, y)| y.filter(|v| v.is_finite()).map(|v| (i, v)))
        .fold(None, |acc: Option<(usize, f64)>, (i, v)| match acc {
            Some((_, b)) if b >= v => acc,
            _ => Some((i, v)),
        })?;

    if index == 0 || index + 1 == xs.len() {
        return Some(Extremum {
            x: xs[index],
            value: best,
            index,
        });
    }
    let (Some(y0), Some(y2)) = (ys[index - 1], ys[index + 1]) else {
        return Some(Extremum {
            x: xs[index],
            value: best,
            index,
        });
    };
    let (x0, x1, x2) = (xs[index - 1], xs[index], xs[index + 1]);
    let y1 = best;

    // Vertex of the interpolating parabola through three (possibly uneven) points.
    let d0 = (y1 - y0) / (x1 - x0);
    let d1 = (y2 - y1) / (x2 - x1);
    let curvature = (d1 - d0) / (x2 - x0);
    if !(curvature < 0.0) {
        return Some(Extremum {
            x: x1,
            value: y1,
            index,
        });
    }
    let b = d0 - curvature * (x0 + x1);
    let x = (-b / (2.0 * curvature)).clamp(x0, x2);
    let value = y1 + (x - x1) * (d0 + curvature * (x - x0));
    Some(Extremum { x, value, index })
}

/// Argmin counterpart of [`refine_argmax`].
pub fn refine_argmin(xs: &[f64], ys: &[Option<f64>]) -> Option<Extremum> {
    let negated: Vec<Option<f64>> = ys.iter().map(|y| y.map(|v| -v)).collect();
    refine_argmax(xs, &negated).map(|e| Extremum {
        value: -e.value,
        ..e
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_is_inclusive() {
        let g = SweepGrid::linspace(0.0, 1.0, 201).unwrap();
        assert_eq!(g.len(), 201);
        assert_eq!(g.first(), 0.0);
        assert_eq!(g.last(), 1.0);
        assert!((g.values()[100] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SweepGrid::linspace(0.0, 1.0, 0).is_err());
        assert!(SweepGrid::linspace(1.0, 0.0, 5).is_err());
        assert!(SweepGrid::linspace(0.0, 1.0, 1).is_err());
        assert!(SweepGrid::from_values(vec![0.0, 0.0]).is_err());
        assert!(SweepGrid::from_values(vec![0.0, f64::NAN]).is_err());
        assert!(SweepGrid::linspace(2.0, 2.0, 1).is_ok());
        assert!(SweepGrid::linspace(0.0, 1.0, MAX_GRID_POINTS + 1).is_err());
    }

    #[test]
    fn parabolic_refinement_recovers_vertex() {
        let g = SweepGrid::linspace(0.0, 1.0, 11).unwrap();
        let ys: Vec<Option<f64>> = g
            .values()
            .iter()
            .map(|x| Some(-(x - 0.537_f64).powi(2)))
            .collect();
        let e = refine_argmax(g.values(), &ys).unwrap();
        assert!((e.x - 0.537).abs() < 1e-12);
        let m = refine_argmin(g.values(), &ys.iter().map(|y| y.map(|v| -v)).collect::<Vec<_>>()).unwrap();
        assert!((m.x - 0.537).abs() < 1e-12);
    }

    #[test]
    fn masked_cells_are_skipped() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [Some(1.0), None, Some(3.0), Some(2.0)];
        let e = refine_argmax(&xs, &ys).unwrap();
        assert_eq!(e.index, 2);
        assert!(refine_argmax(&xs, &[None, None, None, None]).is_none());
    }
}
