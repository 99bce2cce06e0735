use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cube::{z_decode, DyadicCube};
use super::factor::{Axis, Factor};
use crate::error::{Error, Result};

/// Random translation parameter of one factor, truncated to the mesh.
///
/// `bits[i - 1]` is the bit vector `ω^i` of scale `2^-i`, `i = 1..=L`; bit `c`
/// of it belongs to coordinate `c`. A cube of level `j` is translated by
/// `Σ_{i > j} 2^-i ω^i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridShift {
    axis: Axis,
    factor: Factor,
    bits: Vec<u8>,
}

impl GridShift {
    pub fn zero(axis: Axis, factor: Factor) -> Self {
        Self { axis, factor, bits: vec![0; factor.level() as usize] }
    }

    pub fn from_bits(axis: Axis, factor: Factor, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != factor.level() as usize {
            return Err(Error::InvalidArgument(format!(
                "expected {} scale bit vectors, got {}",
                factor.level(),
                bits.len()
            )));
        }
        let limit = 1u8 << factor.dim();
        if let Some(b) = bits.iter().find(|&&b| b >= limit) {
            return Err(Error::InvalidArgument(format!("bit vector {b} has more than {} bits", factor.dim())));
        }
        Ok(Self { axis, factor, bits })
    }

    /// Every stored bit i.i.d. uniform.
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, axis: Axis, factor: Factor) -> Self {
        let mask = (1u8 << factor.dim()) - 1;
        let bits = (0..factor.level()).map(|_| rng.gen::<u8>() & mask).collect();
        Self { axis, factor, bits }
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn factor(&self) -> Factor {
        self.factor
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Translation of level-`level` cubes in mesh units.
    ///
    /// The level-0 cube is the whole torus; it is anchored at the origin of
    /// its level-1 children, so the scale-1 bits never change the grid or the
    /// orientation of its Haar functions.
    pub fn translation(&self, level: u8) -> [u32; 2] {
        self.partial_sum(level.max(1) + 1)
    }

    fn partial_sum(&self, from_scale: u8) -> [u32; 2] {
        let l = self.factor.level();
        let mut t = [0u32; 2];
        for i in from_scale..=l {
            let b = self.bits[i as usize - 1];
            for (c, tc) in t.iter_mut().enumerate().take(self.factor.dim() as usize) {
                *tc += ((b >> c) & 1) as u32 * (1 << (l - i));
            }
        }
        t
    }

    /// `Σ_{i=1..L} 2^-i ω^i` per coordinate.
    pub fn total_translation(&self) -> [f64; 2] {
        let t = self.partial_sum(1);
        let n = self.factor.side() as f64;
        [t[0] as f64 / n, t[1] as f64 / n]
    }

    /// The same grid with the inert scale-1 bits cleared.
    pub fn canonical(&self) -> Self {
        let mut s = self.clone();
        if let Some(b) = s.bits.first_mut() {
            *b = 0;
        }
        s
    }

    /// Identifies the shifted grid: equal keys iff equal grids.
    pub fn grid_key(&self) -> u64 {
        let d = self.factor.dim() as u32;
        self.bits
            .iter()
            .skip(1)
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (b as u64) << (d * i as u32))
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&b| b == 0)
    }
}

#[derive(Debug)]
struct Layout {
    tau: Vec<[u32; 2]>,
    offsets: Vec<usize>,
    cells: Vec<Vec<u32>>,
    cube_of: Vec<Vec<u32>>,
    children: Vec<Vec<u32>>,
}

/// A (possibly shifted) dyadic grid on one factor, truncated to levels `0..=L`.
///
/// Cubes are addressed by a dense id: levels in increasing order, and within
/// a level by the offset of the cube from the grid origin.
#[derive(Clone, Debug)]
pub struct DyadicGrid {
    shift: GridShift,
    layout: Arc<Layout>,
}

impl PartialEq for DyadicGrid {
    fn eq(&self, other: &Self) -> bool {
        self.shift.axis == other.shift.axis
            && self.shift.factor == other.shift.factor
            && self.layout.tau == other.layout.tau
    }
}

impl DyadicGrid {
    pub fn standard(axis: Axis, factor: Factor) -> Self {
        Self::shifted(GridShift::zero(axis, factor))
    }

    pub fn shifted(shift: GridShift) -> Self {
        let factor = shift.factor;
        let l = factor.level();
        let d = factor.dim() as usize;
        let n = factor.side();
        let tau: Vec<[u32; 2]> = (0..=l).map(|j| shift.translation(j)).collect();
        let mut offsets = Vec::with_capacity(l as usize + 2);
        let mut acc = 0;
        for j in 0..=l {
            offsets.push(acc);
            acc += factor.cubes_at(j);
        }
        offsets.push(acc);
        let mut cells = Vec::with_capacity(l as usize + 1);
        let mut cube_of = Vec::with_capacity(l as usize + 1);
        for j in 0..=l {
            let per_side = 1u32 << j;
            let s = n >> j;
            let count = factor.cubes_at(j);
            let vol = factor.cells_per_cube(j);
            let rel: Vec<[u32; 2]> = (0..vol).map(|p| z_decode(p, d, l - j)).collect();
            let mut list = Vec::with_capacity(factor.len());
            let mut owner = vec![0u32; factor.len()];
            for a in 0..count {
                let ac = [a as u32 % per_side, a as u32 / per_side];
                for r in &rel {
                    let mut x = [0u32; 2];
                    for c in 0..d {
                        x[c] = (tau[j as usize][c] + ac[c] * s + r[c]) % n;
                    }
                    let cell = factor.cell(x);
                    list.push(cell as u32);
                    owner[cell] = a as u32;
                }
            }
            cells.push(list);
            cube_of.push(owner);
        }
        let mut children = Vec::with_capacity(l as usize);
        for j in 0..l {
            let count = factor.cubes_at(j);
            let vol = factor.cells_per_cube(j);
            let block = vol >> d;
            let mut ch = Vec::with_capacity(count << d);
            for a in 0..count {
                for k in 0..1usize << d {
                    let first = cells[j as usize][a * vol + k * block] as usize;
                    ch.push(cube_of[j as usize + 1][first]);
                }
            }
            children.push(ch);
        }
        Self { shift, layout: Arc::new(Layout { tau, offsets, cells, cube_of, children }) }
    }

    pub fn axis(&self) -> Axis {
        self.shift.axis
    }

    pub fn factor(&self) -> Factor {
        self.shift.factor
    }

    pub fn shift(&self) -> &GridShift {
        &self.shift
    }

    /// Mesh resolution `L`.
    pub fn resolution(&self) -> u8 {
        self.shift.factor.level()
    }

    /// Translation of level-`level` cubes in mesh units.
    pub fn translation(&self, level: u8) -> [u32; 2] {
        self.layout.tau[level as usize]
    }

    pub fn cubes_at(&self, level: u8) -> usize {
        self.factor().cubes_at(level)
    }

    /// Number of cubes over all levels.
    pub fn cube_count(&self) -> usize {
        *self.layout.offsets.last().unwrap()
    }

    /// Id range of the cubes at `level`.
    pub fn level_ids(&self, level: u8) -> std::ops::Range<usize> {
        self.layout.offsets[level as usize]..self.layout.offsets[level as usize + 1]
    }

    /// Ids of all cubes strictly above the finest level.
    pub fn coarse_ids(&self) -> std::ops::Range<usize> {
        0..self.layout.offsets[self.resolution() as usize]
    }

    pub fn id(&self, level: u8, local: usize) -> usize {
        self.layout.offsets[level as usize] + local
    }

    pub fn level_of(&self, id: usize) -> u8 {
        let off = &self.layout.offsets;
        let mut j = 0;
        while off[j + 1] <= id {
            j += 1;
        }
        j as u8
    }

    fn split(&self, id: usize) -> (u8, usize) {
        let j = self.level_of(id);
        (j, id - self.layout.offsets[j as usize])
    }

    pub fn cube(&self, id: usize) -> DyadicCube {
        let (j, a) = self.split(id);
        let f = self.factor();
        let per_side = 1usize << j;
        let s = f.side() >> j;
        let n = f.side();
        let tau = self.layout.tau[j as usize];
        let mut o = [0u32; 2];
        o[0] = (tau[0] + (a % per_side) as u32 * s) % n;
        if f.dim() == 2 {
            o[1] = (tau[1] + (a / per_side) as u32 * s) % n;
        }
        DyadicCube::new_unchecked(self.axis(), f, j, o)
    }

    /// All cubes of `level`, in id order.
    pub fn cubes(&self, level: u8) -> Result<Vec<DyadicCube>> {
        self.factor().check_level(level)?;
        Ok(self.level_ids(level).map(|id| self.cube(id)).collect())
    }

    /// Cells of cube `id` in Z-order (children contiguous).
    pub fn cells(&self, id: usize) -> &[u32] {
        let (j, a) = self.split(id);
        let vol = self.factor().cells_per_cube(j);
        &self.layout.cells[j as usize][a * vol..(a + 1) * vol]
    }

    /// Concatenated cell lists of all cubes at `level`.
    pub fn level_cells(&self, level: u8) -> &[u32] {
        &self.layout.cells[level as usize]
    }

    /// Children of the level-`level` cubes as local indices at `level + 1`,
    /// `2^d` consecutive entries per cube.
    pub(crate) fn children_local(&self, level: u8) -> &[u32] {
        &self.layout.children[level as usize]
    }

    /// Id of the level-`level` cube containing `cell`.
    pub fn locate(&self, level: u8, cell: usize) -> usize {
        self.layout.offsets[level as usize] + self.layout.cube_of[level as usize][cell] as usize
    }

    pub fn contains_cube(&self, cube: &DyadicCube) -> bool {
        if cube.axis() != self.axis() || cube.factor() != self.factor() {
            return false;
        }
        let n = self.factor().side();
        let s = cube.side_cells();
        let tau = self.layout.tau[cube.level() as usize];
        (0..self.factor().dim() as usize).all(|c| (cube.origin()[c] + n - tau[c]) % s == 0)
    }

    /// Id of `cube`, which must belong to this grid.
    pub fn id_of(&self, cube: &DyadicCube) -> Result<usize> {
        if !self.contains_cube(cube) {
            return Err(Error::NotInGrid(cube.to_string()));
        }
        let first = self.factor().cell(cube.origin());
        Ok(self.locate(cube.level(), first))
    }

    /// The unique grid cube `Q^(k)` containing `cube`, `k` levels up.
    pub fn ancestor(&self, cube: &DyadicCube, k: u8) -> Result<DyadicCube> {
        let id = self.id_of(cube)?;
        if k > cube.level() {
            return Err(Error::Resolution(format!(
                "{cube} at level {} has no ancestor {k} levels up",
                cube.level()
            )));
        }
        Ok(self.cube(self.ancestor_id(id, k)))
    }

    pub fn ancestor_id(&self, id: usize, k: u8) -> usize {
        let j = self.level_of(id);
        debug_assert!(k <= j);
        self.locate(j - k, self.cells(id)[0] as usize)
    }

    /// Ids of the `2^d` children, ordered like [`DyadicCube::children`].
    pub fn children_ids(&self, id: usize) -> Result<Vec<usize>> {
        let (j, a) = self.split(id);
        if j == self.resolution() {
            return Err(Error::Resolution("cube at the finest level has no children".into()));
        }
        let k = 1usize << self.factor().dim();
        let off = self.layout.offsets[j as usize + 1];
        Ok(self.layout.children[j as usize][a * k..(a + 1) * k]
            .iter()
            .map(|&c| off + c as usize)
            .collect())
    }

    /// Ids of the descendants `I` with `I^(depth) = cube id`, in Z-order.
    pub fn descendants(&self, id: usize, depth: u8) -> Result<Vec<usize>> {
        let j = self.level_of(id);
        let target = j as u32 + depth as u32;
        if target > self.resolution() as u32 {
            return Err(Error::Resolution(format!(
                "depth {depth} below level {j} exceeds resolution {}",
                self.resolution()
            )));
        }
        let target = target as u8;
        let block = self.factor().cells_per_cube(target);
        Ok(self
            .cells(id)
            .chunks(block)
            .map(|ch| self.locate(target, ch[0] as usize))
            .collect())
    }
}

/// Translates a cube of the standard grid by `shift` (`I + ω`).
pub fn shift_cube(cube: &DyadicCube, shift: &GridShift) -> Result<DyadicCube> {
    if cube.axis() != shift.axis() || cube.factor() != shift.factor() {
        return Err(Error::AxisMismatch("shift and cube belong to different factors".into()));
    }
    let s = cube.side_cells();
    if cube.origin().iter().any(|&o| o % s != 0) {
        return Err(Error::NotInGrid(format!("{cube} (standard grid)")));
    }
    let f = cube.factor();
    let n = f.side();
    let t = shift.translation(cube.level());
    let mut o = cube.origin();
    for c in 0..f.dim() as usize {
        o[c] = (o[c] + t[c]) % n;
    }
    Ok(DyadicCube::new_unchecked(cube.axis(), f, cube.level(), o))
}

/// Cubes of a grid at one level (`2^(level d)` of them, tiling the torus).
pub fn enumerate_cubes(grid: &DyadicGrid, level: u8) -> Result<Vec<DyadicCube>> {
    grid.cubes(level)
}
