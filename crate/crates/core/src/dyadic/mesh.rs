use serde::{Deserialize, Serialize};

use super::factor::{Axis, Factor};
use super::grid::{DyadicGrid, GridShift};
use crate::error::{Error, Result};

/// The product mesh of `[0,1)^n × [0,1)^m` at resolution `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mesh {
    first: Factor,
    second: Factor,
}

impl Mesh {
    pub fn new(n: u8, m: u8, level: u8) -> Result<Self> {
        Ok(Self { first: Factor::new(n, level)?, second: Factor::new(m, level)? })
    }

    /// `n = m = 1`.
    pub fn square(level: u8) -> Result<Self> {
        Self::new(1, 1, level)
    }

    pub fn from_factors(first: Factor, second: Factor) -> Result<Self> {
        if first.level() != second.level() {
            return Err(Error::MeshMismatch("factors must share the resolution".into()));
        }
        Ok(Self { first, second })
    }

    pub fn first(&self) -> Factor {
        self.first
    }

    pub fn second(&self) -> Factor {
        self.second
    }

    pub fn factor(&self, axis: Axis) -> Factor {
        match axis {
            Axis::First => self.first,
            Axis::Second => self.second,
        }
    }

    pub fn n(&self) -> u8 {
        self.first.dim()
    }

    pub fn m(&self) -> u8 {
        self.second.dim()
    }

    pub fn level(&self) -> u8 {
        self.first.level()
    }

    /// Number of cells, `2^(L(n+m))`.
    pub fn len(&self) -> usize {
        self.first.len() * self.second.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn rows(&self) -> usize {
        self.first.len()
    }

    pub fn cols(&self) -> usize {
        self.second.len()
    }

    pub fn cell_volume(&self) -> f64 {
        self.first.cell_volume() * self.second.cell_volume()
    }

    /// Exchange the two factors.
    pub fn transposed(&self) -> Self {
        Self { first: self.second, second: self.first }
    }
}

/// A grid on each factor.
#[derive(Clone, Debug, PartialEq)]
pub struct GridPair {
    pub first: DyadicGrid,
    pub second: DyadicGrid,
}

impl GridPair {
    pub fn standard(mesh: &Mesh) -> Self {
        Self {
            first: DyadicGrid::standard(Axis::First, mesh.first()),
            second: DyadicGrid::standard(Axis::Second, mesh.second()),
        }
    }

    pub fn shifted(first: GridShift, second: GridShift) -> Result<Self> {
        if first.axis() != Axis::First || second.axis() != Axis::Second {
            return Err(Error::AxisMismatch("grid pair needs a first-axis and a second-axis shift".into()));
        }
        if first.factor().level() != second.factor().level() {
            return Err(Error::MeshMismatch("grid resolutions differ".into()));
        }
        Ok(Self { first: DyadicGrid::shifted(first), second: DyadicGrid::shifted(second) })
    }

    pub fn mesh(&self) -> Mesh {
        Mesh::from_factors(self.first.factor(), self.second.factor()).unwrap()
    }

    pub fn grid(&self, axis: Axis) -> &DyadicGrid {
        match axis {
            Axis::First => &self.first,
            Axis::Second => &self.second,
        }
    }

    /// Exchange the roles of the factors.
    pub fn transposed(&self) -> Self {
        let f = |g: &DyadicGrid, axis: Axis| {
            let s = g.shift();
            DyadicGrid::shifted(GridShift::from_bits(axis, g.factor(), s.bits().to_vec()).unwrap())
        };
        Self { first: f(&self.second, Axis::First), second: f(&self.first, Axis::Second) }
    }

    /// Key identifying the grid pair (equal keys iff equal grids).
    pub fn grid_key(&self) -> u64 {
        let a = self.first.shift().grid_key();
        let b = self.second.shift().grid_key();
        let w = (self.first.factor().dim() as u32) * (self.first.resolution() as u32);
        a | b << w
    }
}
