use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Finest supported resolution.
pub const MAX_LEVEL: u8 = 12;

/// Largest number of mesh cells a single factor may carry.
const MAX_FACTOR_CELLS_LOG2: u32 = 16;

/// The two parameters of the product torus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    /// The `n`-dimensional factor (variable `x1`).
    First,
    /// The `m`-dimensional factor (variable `x2`).
    Second,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::First => Axis::Second,
            Axis::Second => Axis::First,
        }
    }

    /// 1 for the first factor, 2 for the second.
    pub fn number(self) -> u8 {
        match self {
            Axis::First => 1,
            Axis::Second => 2,
        }
    }

    pub fn from_number(k: u8) -> Result<Axis> {
        match k {
            1 => Ok(Axis::First),
            2 => Ok(Axis::Second),
            _ => Err(Error::InvalidArgument(format!("axis must be 1 or 2, got {k}"))),
        }
    }
}

/// One factor of the torus: dimension and mesh resolution.
///
/// The mesh has `2^level` cells per coordinate. Cells are numbered with the
/// first coordinate varying fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Factor {
    dim: u8,
    level: u8,
}

impl Factor {
    pub fn new(dim: u8, level: u8) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidArgument(format!("dimension must be 1 or 2, got {dim}")));
        }
        if level == 0 || level > MAX_LEVEL {
            return Err(Error::Resolution(format!(
                "resolution must lie in 1..={MAX_LEVEL}, got {level}"
            )));
        }
        if dim as u32 * level as u32 > MAX_FACTOR_CELLS_LOG2 {
            return Err(Error::Resolution(format!(
                "2^({dim}*{level}) cells exceed the supported mesh size"
            )));
        }
        Ok(Self { dim, level })
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    /// Mesh resolution `L`.
    pub fn level(&self) -> u8 {
        self.level
    }

    /// Cells per coordinate, `2^L`.
    pub fn side(&self) -> u32 {
        1 << self.level
    }

    /// Total number of cells, `2^(L d)`.
    pub fn len(&self) -> usize {
        1usize << (self.level as usize * self.dim as usize)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Lebesgue measure of one cell.
    pub fn cell_volume(&self) -> f64 {
        (0.5f64).powi(self.level as i32 * self.dim as i32)
    }

    /// Number of cubes at `level` in any dyadic grid of this factor.
    pub fn cubes_at(&self, level: u8) -> usize {
        1usize << (level as usize * self.dim as usize)
    }

    /// Number of cells in a cube at `level`.
    pub fn cells_per_cube(&self, level: u8) -> usize {
        1usize << ((self.level - level) as usize * self.dim as usize)
    }

    /// Number of cubes over all levels `0..=L`.
    pub fn total_cubes(&self) -> usize {
        (0..=self.level).map(|j| self.cubes_at(j)).sum()
    }

    pub fn coords(&self, cell: usize) -> [u32; 2] {
        let n = self.side() as usize;
        if self.dim == 1 {
            [cell as u32, 0]
        } else {
            [(cell % n) as u32, (cell / n) as u32]
        }
    }

    pub fn cell(&self, coords: [u32; 2]) -> usize {
        if self.dim == 1 {
            coords[0] as usize
        } else {
            coords[0] as usize + self.side() as usize * coords[1] as usize
        }
    }

    pub(crate) fn check_level(&self, level: u8) -> Result<()> {
        if level > self.level {
            Err(Error::Resolution(format!("level {level} exceeds resolution {}", self.level)))
        } else {
            Ok(())
        }
    }
}
