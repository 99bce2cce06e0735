use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Axis, DyadicGrid, GridPair, GridShift, Mesh};
use crate::error::{Error, Result};
use crate::norms::{cube_sequence_bmo, rectangle_sequence_bmo, OmegaFamily, RectangleSequence};
use crate::signal::Table;

/// Share of every rectangle that must stay inside `F`.
const COVERAGE: f64 = 0.99;

/// Random cube ids of `grid`: a uniform level, then a uniform cube on it.
/// Returns every cube when `size` is at least the number available.
fn random_ids<R: Rng + ?Sized>(rng: &mut R, grid: &DyadicGrid, size: usize) -> Vec<usize> {
    let total = grid.cube_count();
    if size >= total {
        return (0..total).collect();
    }
    let l = grid.resolution();
    let mut set = BTreeSet::new();
    while set.len() < size {
        let j = rng.gen_range(0..=l);
        let r = grid.level_ids(j);
        set.insert(rng.gen_range(r));
    }
    set.into_iter().collect()
}

fn random_rectangles<R: Rng + ?Sized>(rng: &mut R, grids: &GridPair, size: usize) -> Vec<(usize, usize)> {
    let (c1, c2) = (grids.first.cube_count(), grids.second.cube_count());
    let total = c1 * c2;
    if size >= total {
        return (0..total).map(|k| (k / c2, k % c2)).collect();
    }
    let (l1, l2) = (grids.first.resolution(), grids.second.resolution());
    let mut set = BTreeSet::new();
    while set.len() < size {
        let (j1, j2) = (rng.gen_range(0..=l1), rng.gen_range(0..=l2));
        let i = rng.gen_range(grids.first.level_ids(j1));
        let j = rng.gen_range(grids.second.level_ids(j2));
        set.insert((i, j));
    }
    set.into_iter().collect()
}

/// `F`: the union of the rectangles with random cells removed as long as
/// each rectangle keeps 99% of its cells.
fn carve<R: Rng + ?Sized>(rng: &mut R, mesh: Mesh, rects: &[Vec<usize>]) -> Vec<bool> {
    let mut inside = vec![false; mesh.len()];
    let mut owners: Vec<Vec<u32>> = vec![Vec::new(); mesh.len()];
    for (k, cells) in rects.iter().enumerate() {
        for &x in cells {
            inside[x] = true;
            owners[x].push(k as u32);
        }
    }
    let mut room: Vec<usize> = rects.iter().map(|c| c.len() - (COVERAGE * c.len() as f64).ceil() as usize).collect();
    let mut cells: Vec<usize> = (0..mesh.len()).filter(|&x| inside[x]).collect();
    cells.shuffle(rng);
    for x in cells {
        if owners[x].iter().all(|&k| room[k as usize] > 0) {
            for &k in &owners[x] {
                room[k as usize] -= 1;
            }
            inside[x] = false;
        }
    }
    inside
}

pub(crate) fn rectangle_cells(grids: &GridPair, i: usize, j: usize) -> Vec<usize> {
    let cols = grids.mesh().cols();
    let a = grids.first.cells(i);
    let b = grids.second.cells(j);
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x as usize * cols + y as usize);
        }
    }
    out
}

fn random_shifts<R: Rng + ?Sized>(rng: &mut R, mesh: &Mesh) -> Result<GridPair> {
    GridPair::shifted(
        GridShift::sample(rng, Axis::First, mesh.first()),
        GridShift::sample(rng, Axis::Second, mesh.second()),
    )
}

/// Scalars `b_R = g_R |R|^{1/2}`, and `a_{R+ω}` equal to `b_R` (aligned) or
/// drawn the same way independently.
fn coefficients<R: Rng + ?Sized>(rng: &mut R, measures: &[f64], aligned: bool) -> (Vec<f64>, Vec<f64>) {
    let b: Vec<f64> = measures.iter().map(|m| rng.sample::<f64, _>(StandardNormal) * m.sqrt()).collect();
    let a = if aligned {
        b.clone()
    } else {
        measures.iter().map(|m| rng.sample::<f64, _>(StandardNormal) * m.sqrt()).collect()
    };
    (a, b)
}

/// A collection `C ⊂ D₀`, a set `F` with `|R ∩ F| ≥ 99/100 |R|` on `C`,
/// and scalars `a_{R+ω}`, `b_R`.
#[derive(Clone, Debug)]
pub struct DualityInstance {
    /// The shifted grids `D_ω` carrying `a`.
    pub grids: GridPair,
    /// Rectangles of `C` as id pairs; the same ids address `R` in the
    /// standard grids and `R + ω` in `grids`.
    pub collection: Vec<(usize, usize)>,
    pub requested: usize,
    pub f: Vec<bool>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub requested: usize,
    pub size: usize,
    /// `Σ |a_{R+ω} b_R|`.
    pub lhs: f64,
    /// Product-BMO bracket of `{a_{R+ω}}` on `D_ω`.
    pub a_lower: f64,
    pub a_upper: f64,
    /// `∫_F (Σ |b_R|² 1_R/|R|)^{1/2}`.
    pub integral: f64,
    /// `lhs / (a_lower · integral)`, an upper estimate of the constant.
    pub ratio: f64,
    /// `lhs / (a_upper · integral)`.
    pub ratio_upper_norm: f64,
    pub min_coverage: f64,
}

/// Draws a random instance of the two-parameter duality estimate.
pub fn duality_instance<R: Rng + ?Sized>(rng: &mut R, mesh: Mesh, size: usize, aligned: bool) -> Result<DualityInstance> {
    if size == 0 {
        return Err(Error::InvalidArgument("empty collection".into()));
    }
    let grids = random_shifts(rng, &mesh)?;
    let standard = GridPair::standard(&mesh);
    let collection = random_rectangles(rng, &standard, size);
    let cells: Vec<Vec<usize>> = collection.iter().map(|&(i, j)| rectangle_cells(&standard, i, j)).collect();
    let f = carve(rng, mesh, &cells);
    let measures: Vec<f64> = cells.iter().map(|c| c.len() as f64 * mesh.cell_volume()).collect();
    let (a, b) = coefficients(rng, &measures, aligned);
    Ok(DualityInstance { grids, collection, requested: size, f, a, b })
}

impl DualityInstance {
    pub fn report(&self) -> Result<DualityReport> {
        let mesh = self.grids.mesh();
        let vol = mesh.cell_volume();
        let standard = GridPair::standard(&mesh);
        let mut s2 = vec![0.0; mesh.len()];
        let mut min_coverage: f64 = 1.0;
        let mut lhs = 0.0;
        let mut table = Table::zeros(self.grids.first.cube_count(), self.grids.second.cube_count());
        for (k, &(i, j)) in self.collection.iter().enumerate() {
            let cells = rectangle_cells(&standard, i, j);
            let w = self.b[k] * self.b[k] / (cells.len() as f64 * vol);
            let mut hit = 0;
            for &x in &cells {
                s2[x] += w;
                hit += self.f[x] as usize;
            }
            min_coverage = min_coverage.min(hit as f64 / cells.len() as f64);
            lhs += (self.a[k] * self.b[k]).abs();
            table.set(i, j, self.a[k]);
        }
        let integral: f64 = s2.iter().zip(&self.f).filter(|(_, &f)| f).map(|(s, _)| s.sqrt()).sum::<f64>() * vol;
        let est = rectangle_sequence_bmo(&RectangleSequence::new(self.grids.clone(), &table)?, &OmegaFamily::with_thresholds())?;
        let ratio = |n: f64| if n * integral > 0.0 { lhs / (n * integral) } else { 0.0 };
        Ok(DualityReport {
            requested: self.requested,
            size: self.collection.len(),
            lhs,
            a_lower: est.lower,
            a_upper: est.upper,
            integral,
            ratio: ratio(est.lower),
            ratio_upper_norm: ratio(est.upper),
            min_coverage,
        })
    }
}

/// The one-parameter form: `K₀ × V` for a fixed cube `K₀` of the first
/// factor and `V` in a random collection of cubes of the second.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneParameterReport {
    pub requested: usize,
    pub size: usize,
    pub k0_measure: f64,
    pub lhs: f64,
    /// Exact `‖{a_{V+ω₂}}‖_{BMO(D_{ω₂})}`.
    pub a_norm: f64,
    /// `∫_F 1_{K₀}/|K₀| ⊗ (Σ |b_V|² 1_V/|V|)^{1/2}`.
    pub integral: f64,
    pub ratio: f64,
    /// Rectangle-family product norm of `ã_{K₀×(V+ω₂)} = a_{V+ω₂}`.
    pub embedded_norm: f64,
    /// `|embedded_norm − |K₀|^{-1/2} a_norm|`.
    pub reduction_error: f64,
    pub min_coverage: f64,
}

pub fn one_parameter_duality<R: Rng + ?Sized>(
    rng: &mut R,
    mesh: Mesh,
    size: usize,
    aligned: bool,
) -> Result<OneParameterReport> {
    if size == 0 {
        return Err(Error::InvalidArgument("empty collection".into()));
    }
    let vol = mesh.cell_volume();
    let standard = GridPair::standard(&mesh);
    let shifted2 = GridShift::sample(rng, Axis::Second, mesh.second());
    let grids = GridPair::shifted(GridShift::zero(Axis::First, mesh.first()), shifted2)?;
    let k0_level = rng.gen_range(0..=mesh.first().level());
    let k0 = rng.gen_range(standard.first.level_ids(k0_level));
    let k0_measure = standard.first.cube(k0).measure();
    let vs = random_ids(rng, &standard.second, size);
    let cells: Vec<Vec<usize>> = vs.iter().map(|&v| rectangle_cells(&standard, k0, v)).collect();
    let f = carve(rng, mesh, &cells);
    let v_measures: Vec<f64> = vs.iter().map(|&v| standard.second.cube(v).measure()).collect();
    let (a, b) = coefficients(rng, &v_measures, aligned);

    let mut s2 = vec![0.0; mesh.len()];
    let mut lhs = 0.0;
    let mut min_coverage: f64 = 1.0;
    let mut seq = vec![0.0; grids.second.cube_count()];
    for (k, &v) in vs.iter().enumerate() {
        let w = b[k] * b[k] / v_measures[k];
        let mut hit = 0;
        for &x in &cells[k] {
            s2[x] += w;
            hit += f[x] as usize;
        }
        min_coverage = min_coverage.min(hit as f64 / cells[k].len() as f64);
        lhs += (a[k] * b[k]).abs();
        seq[v] = a[k];
    }
    let integral: f64 = s2.iter().zip(&f).filter(|(_, &f)| f).map(|(s, _)| s.sqrt()).sum::<f64>() * vol / k0_measure;
    let a_norm = cube_sequence_bmo(&grids.second, &seq)?;
    let mut table = Table::zeros(grids.first.cube_count(), grids.second.cube_count());
    table.row_mut(k0).copy_from_slice(&seq);
    let embedded_norm = rectangle_sequence_bmo(&RectangleSequence::new(grids, &table)?, &OmegaFamily::rectangles())?.lower;
    let ratio = if a_norm * integral > 0.0 { lhs / (a_norm * integral) } else { 0.0 };
    Ok(OneParameterReport {
        requested: size,
        size: vs.len(),
        k0_measure,
        lhs,
        a_norm,
        integral,
        ratio,
        embedded_norm,
        reduction_error: (embedded_norm - a_norm / k0_measure.sqrt()).abs(),
        min_coverage,
    })
}
