use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicGrid, GridPair, Profile};
use crate::error::{Error, Result};
use crate::signal::{id_measures, pairing_table, parent_ids, synthesize_table, GridFunction, Table};

/// `sup_{V₀} (|V₀|^{-1} Σ_{V ⊂ V₀} |a_V|²)^{1/2}` for scalars indexed by the
/// cube ids of `grid`. Exact.
pub fn cube_sequence_bmo(grid: &DyadicGrid, values: &[f64]) -> Result<f64> {
    if values.len() != grid.cube_count() {
        return Err(Error::InvalidArgument(format!(
            "{} scalars for a grid of {} cubes",
            values.len(),
            grid.cube_count()
        )));
    }
    let par = parent_ids(grid);
    let meas = id_measures(grid);
    let mut s: Vec<f64> = values.iter().map(|x| x * x).collect();
    for id in (1..s.len()).rev() {
        s[par[id]] += s[id];
    }
    Ok(s.iter().zip(&meas).map(|(x, m)| (x / m).sqrt()).fold(0.0, f64::max))
}

/// Squared scalars `|a_R|²` indexed by the rectangles of a grid pair (rows:
/// first-grid ids, columns: second-grid ids).
#[derive(Clone, Debug)]
pub struct RectangleSequence {
    grids: GridPair,
    squares: Table,
}

impl RectangleSequence {
    pub fn new(grids: GridPair, values: &Table) -> Result<Self> {
        let mut s = Self::zeros(grids);
        s.add(values)?;
        Ok(s)
    }

    pub fn zeros(grids: GridPair) -> Self {
        let squares = Table::zeros(grids.first.cube_count(), grids.second.cube_count());
        Self { grids, squares }
    }

    /// Add `|values|²` entrywise (several Haar indices on one rectangle).
    pub fn add(&mut self, values: &Table) -> Result<()> {
        if values.rows() != self.squares.rows() || values.cols() != self.squares.cols() {
            return Err(Error::MeshMismatch("table does not match the grid pair".into()));
        }
        for (s, v) in self.squares.data_mut().iter_mut().zip(values.data()) {
            *s += v * v;
        }
        Ok(())
    }

    /// `|⟨b, h_I^{η₁} ⊗ h_J^{η₂}⟩|²`, summed over the cancellative `η`.
    pub fn from_function(b: &GridFunction, grids: &GridPair) -> Result<Self> {
        let mut s = Self::zeros(grids.clone());
        for p1 in Profile::cancellative(grids.first.factor().dim()) {
            for p2 in Profile::cancellative(grids.second.factor().dim()) {
                s.add(&pairing_table(b, grids, p1, p2)?)?;
            }
        }
        Ok(s)
    }

    pub fn grids(&self) -> &GridPair {
        &self.grids
    }

    pub fn squares(&self) -> &Table {
        &self.squares
    }

    /// `S_a = (Σ_R |a_R|² 1_R/|R|)^{1/2}`.
    pub fn square_function(&self) -> GridFunction {
        synthesize_table(&self.squares, &self.grids, Profile::Average, Profile::Average).map(|x| x.max(0.0).sqrt())
    }

    /// `min_{x ∈ R} g(x)` for every rectangle.
    fn rectangle_minima(&self, g: &GridFunction) -> Table {
        let cols = g.mesh().cols();
        let v = g.values();
        let mut out = Table::zeros(self.squares.rows(), self.squares.cols());
        for i in 0..out.rows() {
            let ci = self.grids.first.cells(i);
            for j in 0..out.cols() {
                let cj = self.grids.second.cells(j);
                let mut m = f64::INFINITY;
                for &x1 in ci {
                    for &x2 in cj {
                        m = m.min(v[x1 as usize * cols + x2 as usize]);
                    }
                }
                out.set(i, j, m);
            }
        }
        out
    }

    /// `(|Ω|^{-1} Σ_{R ⊂ Ω} |a_R|²)^{1/2}` for a set of mesh cells. Every set
    /// of cells is admissible: its cells are themselves rectangles of the
    /// grid pair.
    pub fn value_on(&self, cells: &[usize]) -> Result<f64> {
        let mesh = self.grids.mesh();
        if cells.is_empty() {
            return Err(Error::EmptySet);
        }
        let ind = GridFunction::indicator(mesh, cells.iter().copied());
        let count = ind.values().iter().filter(|&&x| x > 0.0).count();
        let mins = self.rectangle_minima(&ind);
        let s: f64 = mins.data().iter().zip(self.squares.data()).filter(|(m, _)| **m > 0.0).map(|(_, s)| s).sum();
        Ok((s / (count as f64 * mesh.cell_volume())).sqrt())
    }
}

/// The sets `Ω` a product-BMO estimate ranges over. Single dyadic rectangles
/// are always included.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct OmegaFamily {
    /// Also use every superlevel set `{S_a ≥ t}` of the square function.
    pub thresholds: bool,
    /// Extra sets, as lists of mesh cells.
    pub sets: Vec<Vec<usize>>,
}

impl OmegaFamily {
    pub fn rectangles() -> Self {
        Self::default()
    }

    pub fn with_thresholds() -> Self {
        Self { thresholds: true, sets: Vec::new() }
    }

    pub fn describe(&self) -> String {
        let mut s = String::from("dyadic rectangles");
        if self.thresholds {
            s.push_str(" + superlevel sets of S_a");
        }
        if !self.sets.is_empty() {
            s.push_str(&format!(" + {} supplied sets", self.sets.len()));
        }
        s
    }
}

/// Product-BMO norm bracket. `lower ≤ ‖a‖_{BMO_prod} ≤ upper`; `rectangles`
/// is the part of `lower` coming from single rectangles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductBmoEstimate {
    pub rectangles: f64,
    pub lower: f64,
    pub upper: f64,
    pub family: String,
}

pub fn rectangle_sequence_bmo(a: &RectangleSequence, family: &OmegaFamily) -> Result<ProductBmoEstimate> {
    let (p1, p2) = (parent_ids(&a.grids.first), parent_ids(&a.grids.second));
    let (m1, m2) = (id_measures(&a.grids.first), id_measures(&a.grids.second));
    // Subtree sums: t[I][J] = Σ_{I' ⊂ I, J' ⊂ J} |a_{I'×J'}|².
    let mut t = a.squares.clone();
    for i in (1..t.rows()).rev() {
        for j in 0..t.cols() {
            let v = t.get(i, j);
            t.add(p1[i], j, v);
        }
    }
    for j in (1..t.cols()).rev() {
        for i in 0..t.rows() {
            let v = t.get(i, j);
            t.add(i, p2[j], v);
        }
    }
    let mut rect = 0.0f64;
    for i in 0..t.rows() {
        for j in 0..t.cols() {
            rect = rect.max((t.get(i, j) / (m1[i] * m2[j])).sqrt());
        }
    }
    let s = a.square_function();
    let upper = s.max_abs();
    let mut lower = rect;
    if family.thresholds {
        lower = lower.max(threshold_sup(a, &s));
    }
    for set in &family.sets {
        lower = lower.max(a.value_on(set)?);
    }
    Ok(ProductBmoEstimate { rectangles: rect, lower, upper: upper.max(lower), family: family.describe() })
}

/// Supremum over the superlevel sets `{S ≥ t}`: a rectangle lies in the set
/// iff its minimum of `S` is at least `t`.
fn threshold_sup(a: &RectangleSequence, s: &GridFunction) -> f64 {
    let mins = a.rectangle_minima(s);
    let mut rects: Vec<(f64, f64)> =
        mins.data().iter().zip(a.squares.data()).filter(|(_, q)| **q > 0.0).map(|(m, q)| (*m, *q)).collect();
    rects.sort_by(|x, y| y.0.total_cmp(&x.0));
    let mut vals: Vec<f64> = s.values().to_vec();
    vals.sort_by(|x, y| y.total_cmp(x));
    let vol = s.mesh().cell_volume();
    let (mut k, mut acc, mut best) = (0usize, 0.0, 0.0f64);
    let mut idx = 0;
    while idx < vals.len() {
        let t = vals[idx];
        while idx < vals.len() && vals[idx] == t {
            idx += 1;
        }
        while k < rects.len() && rects[k].0 >= t {
            acc += rects[k].1;
            k += 1;
        }
        best = best.max((acc / (idx as f64 * vol)).sqrt());
    }
    best
}

/// Product-BMO bracket of a function through its Haar coefficients.
pub fn product_bmo_estimate(b: &GridFunction, grids: &GridPair, family: &OmegaFamily) -> Result<ProductBmoEstimate> {
    rectangle_sequence_bmo(&RectangleSequence::from_function(b, grids)?, family)
}
