use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `n x n` tiling of the unit square.
///
/// Region id is `row * n + col` with `col = floor(x n)` and `row = floor(y n)`;
/// coordinates equal to 1.0 fall in the last cell of their axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridPartition {
    pub cells_per_axis: u32,
}

impl GridPartition {
    pub fn new(cells_per_axis: u32) -> Result<Self> {
        if cells_per_axis == 0 || cells_per_axis > u16::MAX as u32 {
            return Err(Error::Validation(format!(
                "grid needs between 1 and {} cells per axis, got {cells_per_axis}",
                u16::MAX
            )));
        }
        Ok(GridPartition { cells_per_axis })
    }

    pub fn region_count(&self) -> u32 {
        self.cells_per_axis * self.cells_per_axis
    }

    fn cell(&self, v: f64) -> u32 {
        let n = self.cells_per_axis;
        ((v * n as f64).floor() as u32).min(n - 1)
    }

    pub fn region_of(&self, x: f64, y: f64) -> Result<u32> {
        for v in [x, y] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Validation(format!(
                    "point ({x}, {y}) lies outside the unit square"
                )));
            }
        }
        Ok(self.cell(y) * self.cells_per_axis + self.cell(x))
    }
}
