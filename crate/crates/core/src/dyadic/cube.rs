use std::fmt;

use serde::{Deserialize, Serialize};

use super::factor::{Axis, Factor};
use crate::error::{Error, Result};

/// A dyadic cube on one factor of the torus, possibly wrapped mod 1.
///
/// `origin` is the lower corner in mesh units; the side is `2^(L - level)` cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicCube {
    axis: Axis,
    factor: Factor,
    level: u8,
    origin: [u32; 2],
}

impl DyadicCube {
    pub fn new(axis: Axis, factor: Factor, level: u8, origin: [u32; 2]) -> Result<Self> {
        factor.check_level(level)?;
        let n = factor.side();
        for (c, &o) in origin.iter().enumerate() {
            let bound = if c < factor.dim() as usize { n } else { 1 };
            if o >= bound {
                return Err(Error::InvalidArgument(format!(
                    "origin coordinate {o} out of range for a {}-dimensional factor",
                    factor.dim()
                )));
            }
        }
        Ok(Self { axis, factor, level, origin })
    }

    /// The level-0 cube, the whole factor torus.
    pub fn torus(axis: Axis, factor: Factor) -> Self {
        Self { axis, factor, level: 0, origin: [0, 0] }
    }

    pub(crate) fn new_unchecked(axis: Axis, factor: Factor, level: u8, origin: [u32; 2]) -> Self {
        Self { axis, factor, level, origin }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn factor(&self) -> Factor {
        self.factor
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn origin(&self) -> [u32; 2] {
        self.origin
    }

    /// Side length in mesh cells.
    pub fn side_cells(&self) -> u32 {
        1 << (self.factor.level() - self.level)
    }

    pub fn side_length(&self) -> f64 {
        (0.5f64).powi(self.level as i32)
    }

    /// Lebesgue measure `|Q|`.
    pub fn measure(&self) -> f64 {
        (0.5f64).powi(self.level as i32 * self.factor.dim() as i32)
    }

    pub fn num_cells(&self) -> usize {
        self.factor.cells_per_cube(self.level)
    }

    pub fn is_finest(&self) -> bool {
        self.level == self.factor.level()
    }

    pub fn is_wrapped(&self) -> bool {
        let n = self.factor.side();
        (0..self.factor.dim() as usize).any(|c| self.origin[c] + self.side_cells() > n)
    }

    pub fn contains_cell(&self, cell: usize) -> bool {
        let n = self.factor.side();
        let s = self.side_cells();
        let x = self.factor.coords(cell);
        (0..self.factor.dim() as usize).all(|c| (x[c] + n - self.origin[c]) % n < s)
    }

    /// Set containment mod 1.
    pub fn contains(&self, other: &DyadicCube) -> bool {
        if self.axis != other.axis || self.factor != other.factor || other.level < self.level {
            return false;
        }
        let n = self.factor.side();
        let s = self.side_cells();
        let t = other.side_cells();
        (0..self.factor.dim() as usize)
            .all(|c| (other.origin[c] + n - self.origin[c]) % n + t <= s)
    }

    /// Cells of the cube in recursive (Z) order: every child occupies a
    /// contiguous block, children ordered by their offset pattern.
    pub fn cells(&self) -> Vec<usize> {
        let d = self.factor.dim() as usize;
        let n = self.factor.side();
        (0..self.num_cells())
            .map(|p| {
                let r = z_decode(p, d, self.factor.level() - self.level);
                let mut x = [0u32; 2];
                for c in 0..d {
                    x[c] = (self.origin[c] + r[c]) % n;
                }
                self.factor.cell(x)
            })
            .collect()
    }

    /// The `2^d` children. Child `k` is shifted by half a side in every
    /// coordinate `c` whose bit is set in `k`; in one dimension this is
    /// `(left, right)`.
    pub fn children(&self) -> Result<Vec<DyadicCube>> {
        if self.is_finest() {
            return Err(Error::Resolution(format!("{self} is at the finest level")));
        }
        let d = self.factor.dim() as usize;
        let half = self.side_cells() / 2;
        let n = self.factor.side();
        Ok((0..1usize << d)
            .map(|k| {
                let mut o = self.origin;
                for (c, oc) in o.iter_mut().enumerate().take(d) {
                    if k >> c & 1 == 1 {
                        *oc = (*oc + half) % n;
                    }
                }
                DyadicCube::new_unchecked(self.axis, self.factor, self.level + 1, o)
            })
            .collect())
    }

    /// Cells of the concentric cube with three times the side, wrapped on
    /// the torus (clipped to the whole factor when it would overlap itself).
    pub fn tripled_cells(&self) -> Vec<usize> {
        let d = self.factor.dim() as usize;
        let n = self.factor.side();
        let s = self.side_cells();
        let ranges: Vec<Vec<u32>> = (0..2)
            .map(|c| {
                if c >= d {
                    vec![0]
                } else if 3 * s >= n {
                    (0..n).collect()
                } else {
                    (0..3 * s).map(|t| (self.origin[c] + n - s + t) % n).collect()
                }
            })
            .collect();
        let mut out = Vec::with_capacity(ranges[0].len() * ranges[1].len());
        for &y in &ranges[1] {
            for &x in &ranges[0] {
                out.push(self.factor.cell([x, y]));
            }
        }
        out
    }
}

/// Relative coordinates of position `p` in the Z-order of a cube with
/// `2^depth` cells per side.
pub(crate) fn z_decode(p: usize, d: usize, depth: u8) -> [u32; 2] {
    if d == 1 {
        return [p as u32, 0];
    }
    let mut r = [0u32; 2];
    for b in 0..depth as usize {
        for (c, rc) in r.iter_mut().enumerate() {
            *rc |= (((p >> (d * b + c)) & 1) as u32) << b;
        }
    }
    r
}

fn fmt_interval(f: &mut fmt::Formatter<'_>, o: u32, s: u32, n: u32) -> fmt::Result {
    let frac = |v: u32| -> String {
        if v == 0 {
            return "0".into();
        }
        if v == n {
            return "1".into();
        }
        let g = gcd(v, n);
        format!("{}/{}", v / g, n / g)
    };
    if o + s <= n {
        write!(f, "[{},{})", frac(o), frac(o + s))
    } else {
        write!(f, "[{},1)∪[0,{})", frac(o), frac(o + s - n))
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.factor.side();
        let s = self.side_cells();
        for c in 0..self.factor.dim() as usize {
            if c > 0 {
                write!(f, "×")?;
            }
            fmt_interval(f, self.origin[c], s, n)?;
        }
        Ok(())
    }
}

/// A product `I × J` of a first-axis cube and a second-axis cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicRectangle {
    pub first: DyadicCube,
    pub second: DyadicCube,
}

impl DyadicRectangle {
    pub fn new(first: DyadicCube, second: DyadicCube) -> Result<Self> {
        if first.axis() != Axis::First || second.axis() != Axis::Second {
            return Err(Error::AxisMismatch(
                "a rectangle needs a first-axis cube and a second-axis cube".into(),
            ));
        }
        Ok(Self { first, second })
    }

    pub fn measure(&self) -> f64 {
        self.first.measure() * self.second.measure()
    }

    pub fn contains(&self, other: &DyadicRectangle) -> bool {
        self.first.contains(&other.first) && self.second.contains(&other.second)
    }

    /// Row-major mesh cell indices `x1 * N2 + x2`.
    pub fn cells(&self) -> Vec<usize> {
        let cols = self.second.factor().len();
        let b = self.second.cells();
        let mut out = Vec::with_capacity(self.first.num_cells() * b.len());
        for x1 in self.first.cells() {
            for &x2 in &b {
                out.push(x1 * cols + x2);
            }
        }
        out
    }
}

impl fmt::Display for DyadicRectangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} × {}", self.first, self.second)
    }
}
