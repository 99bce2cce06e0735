//! Fast transforms between cell values and cube coefficients.

use crate::dyadic::{Axis, DyadicGrid, GridPair, Mesh, Profile};
use crate::error::{Error, Result};

use super::function::GridFunction;

/// Dense matrix of coefficients, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Table {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_data(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        Self { rows: self.cols, cols: self.rows, data: transpose(&self.data, self.rows, self.cols) }
    }

    /// Apply `f` to every row.
    pub fn map_rows(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Self {
        let mut data = Vec::new();
        let mut cols = 0;
        for i in 0..self.rows {
            let r = f(self.row(i));
            cols = r.len();
            data.extend(r);
        }
        Self { rows: self.rows, cols, data }
    }
}

pub(crate) fn transpose(data: &[f64], rows: usize, cols: usize) -> Vec<f64> {
    let mut out = vec![0.0; data.len()];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = data[i * cols + j];
        }
    }
    out
}

/// Sums of `values` over every cube of the grid, indexed by cube id.
pub fn cube_sums(values: &[f64], grid: &DyadicGrid) -> Vec<f64> {
    let f = grid.factor();
    let l = f.level();
    let k = 1usize << f.dim();
    let mut sums = vec![0.0; grid.cube_count()];
    let fin = grid.level_ids(l).start;
    for (a, &cell) in grid.level_cells(l).iter().enumerate() {
        sums[fin + a] = values[cell as usize];
    }
    for j in (0..l).rev() {
        let ch = grid.children_local(j);
        let base = grid.level_ids(j).start;
        let next = grid.level_ids(j + 1).start;
        for a in 0..f.cubes_at(j) {
            sums[base + a] = ch[a * k..(a + 1) * k].iter().map(|&c| sums[next + c as usize]).sum();
        }
    }
    sums
}

fn coefficients_from_sums(sums: &[f64], grid: &DyadicGrid, profile: Profile) -> Vec<f64> {
    let f = grid.factor();
    let l = f.level();
    let k = 1usize << f.dim();
    let cv = f.cell_volume();
    let mut out = vec![0.0; sums.len()];
    for j in 0..=l {
        let meas = (0.5f64).powi(j as i32 * f.dim() as i32);
        let ids = grid.level_ids(j);
        match profile {
            Profile::Average => {
                for id in ids {
                    out[id] = sums[id] * cv / meas;
                }
            }
            Profile::HaarZero => {
                let amp = cv / meas.sqrt();
                for id in ids {
                    out[id] = sums[id] * amp;
                }
            }
            Profile::Haar(_) => {
                if j == l {
                    continue;
                }
                let amp = cv / meas.sqrt();
                let ch = grid.children_local(j);
                let next = grid.level_ids(j + 1).start;
                for (a, id) in ids.enumerate() {
                    let s: f64 = (0..k).map(|t| profile.sign(t) * sums[next + ch[a * k + t] as usize]).sum();
                    out[id] = amp * s;
                }
            }
        }
    }
    out
}

/// `⟨v, φ_Q⟩` for every cube `Q` of the grid, indexed by cube id. Cancellative
/// profiles give 0 at the finest level, where they are undefined.
pub fn factor_coefficients(values: &[f64], grid: &DyadicGrid, profile: Profile) -> Vec<f64> {
    coefficients_from_sums(&cube_sums(values, grid), grid, profile)
}

/// `Σ_Q c_Q φ_Q` on the factor mesh.
pub fn factor_synthesis(coeffs: &[f64], grid: &DyadicGrid, profile: Profile) -> Vec<f64> {
    let f = grid.factor();
    let l = f.level();
    let k = 1usize << f.dim();
    let mut out = vec![0.0; f.len()];
    let mut acc = vec![0.0];
    for j in 0..=l {
        let meas = (0.5f64).powi(j as i32 * f.dim() as i32);
        let amp = profile.amplitude(meas);
        let ids = grid.level_ids(j);
        let start = ids.start;
        let local = |id: usize| id - start;
        let mut base: Vec<f64> = ids
            .clone()
            .map(|id| {
                let b = acc[local(id)];
                if profile.is_cancellative() {
                    b
                } else {
                    b + coeffs[id] * amp
                }
            })
            .collect();
        if j == l {
            for (a, &cell) in grid.level_cells(l).iter().enumerate() {
                out[cell as usize] = base[a];
            }
            break;
        }
        let ch = grid.children_local(j);
        let mut next = vec![0.0; f.cubes_at(j + 1)];
        for (a, id) in ids.enumerate() {
            let b = std::mem::take(&mut base[a]);
            for t in 0..k {
                let extra = if profile.is_cancellative() { coeffs[id] * amp * profile.sign(t) } else { 0.0 };
                next[ch[a * k + t] as usize] = b + extra;
            }
        }
        acc = next;
    }
    out
}

/// `⟨f, φ_I ⊗ ψ_J⟩` for all rectangles, rows indexed by first-grid ids and
/// columns by second-grid ids.
pub fn pairing_table(f: &GridFunction, grids: &GridPair, p1: Profile, p2: Profile) -> Result<Table> {
    check(f.mesh(), grids)?;
    let m = f.mesh();
    let a = Table::from_data(m.rows(), m.cols(), f.values().to_vec());
    let a = a.map_rows(|r| factor_coefficients(r, &grids.second, p2)).transpose();
    Ok(a.map_rows(|c| factor_coefficients(c, &grids.first, p1)).transpose())
}

/// `Σ_{I,J} t_{IJ} φ_I ⊗ ψ_J`.
pub fn synthesize_table(t: &Table, grids: &GridPair, p1: Profile, p2: Profile) -> GridFunction {
    let mesh = grids.mesh();
    let b = t.transpose().map_rows(|r| factor_synthesis(r, &grids.first, p1));
    let out = b.transpose().map_rows(|r| factor_synthesis(r, &grids.second, p2));
    GridFunction::from_values(mesh, out.data).expect("synthesis preserves the mesh")
}

/// `⟨f, φ_Q⟩_axis` for every cube of `grid`: rows indexed by cube id, columns
/// by the cells of the other factor.
pub fn axis_coefficients(f: &GridFunction, grid: &DyadicGrid, profile: Profile) -> Result<Table> {
    let m = f.mesh();
    if m.factor(grid.axis()) != grid.factor() {
        return Err(Error::MeshMismatch("grid does not match the function's factor".into()));
    }
    let t = Table::from_data(m.rows(), m.cols(), f.values().to_vec());
    Ok(match grid.axis() {
        Axis::First => t.transpose().map_rows(|c| factor_coefficients(c, grid, profile)).transpose(),
        Axis::Second => t.map_rows(|r| factor_coefficients(r, grid, profile)).transpose(),
    })
}

/// `Σ_Q φ_Q ⊗ g_Q` (or `g_Q ⊗ φ_Q` on the second axis) from a table laid out
/// like [`axis_coefficients`].
pub fn axis_synthesis(t: &Table, grid: &DyadicGrid, profile: Profile, mesh: Mesh) -> GridFunction {
    let out = match grid.axis() {
        Axis::First => t.transpose().map_rows(|r| factor_synthesis(r, grid, profile)).transpose(),
        Axis::Second => t.transpose().map_rows(|r| factor_synthesis(r, grid, profile)),
    };
    GridFunction::from_values(mesh, out.data).expect("synthesis preserves the mesh")
}

fn check(mesh: Mesh, grids: &GridPair) -> Result<()> {
    if grids.mesh() != mesh {
        Err(Error::MeshMismatch("grid pair does not match the function's mesh".into()))
    } else {
        Ok(())
    }
}

/// Parent id of every cube (`usize::MAX` for the top cube).
pub(crate) fn parent_ids(grid: &DyadicGrid) -> Vec<usize> {
    let mut out = vec![usize::MAX; grid.cube_count()];
    for (id, p) in out.iter_mut().enumerate().skip(1) {
        *p = grid.ancestor_id(id, 1);
    }
    out
}

/// Measure of every cube, by id.
pub(crate) fn id_measures(grid: &DyadicGrid) -> Vec<f64> {
    let f = grid.factor();
    let mut out = Vec::with_capacity(grid.cube_count());
    for j in 0..=f.level() {
        let meas = (0.5f64).powi(j as i32 * f.dim() as i32);
        out.extend(grid.level_ids(j).map(|_| meas));
    }
    out
}
