use serde::{Deserialize, Serialize};

use crate::analysis::{maximal, MaximalMode};
use crate::dyadic::{GridPair, Mesh, Profile};
use crate::error::{Error, Result};
use crate::signal::{pairing_table, GridFunction};

const MAX_DOUBLINGS: usize = 200;
const MAX_LEVELS: usize = 400;

/// Enlargement constant `c` with `R ∈ R̂_u ⇒ 3R ⊆ Ω̃_u`: a rectangle meeting
/// `Ω_u` in a hundredth of its measure gives `M1_{Ω_u} ≥ 1/(100·3^{n+m})`
/// on `3R`.
pub fn default_enlargement(mesh: &Mesh) -> f64 {
    1.0 / (200.0 * 3f64.powi((mesh.n() + mesh.m()) as i32))
}

/// One level `u` of the construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSet {
    pub u: usize,
    pub threshold: f64,
    pub omega_measure: f64,
    pub enlarged_measure: f64,
    /// `|R̂_u|`.
    pub hat_count: usize,
    /// `|R_u| = |R̂_u \ R̂_{u−1}|` (`|R̂_0|` at `u = 0`).
    pub new_count: usize,
    #[serde(skip)]
    pub omega: Vec<bool>,
    #[serde(skip)]
    pub enlarged: Vec<bool>,
    /// `R̂_u` as standard-grid id pairs.
    #[serde(skip)]
    pub hat: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSetReport {
    /// The constant `C` of the level sets after doubling.
    pub constant: f64,
    pub doublings: usize,
    /// Enlargement constant `c`.
    pub enlargement: f64,
    pub r: f64,
    pub e_measure: f64,
    pub e_prime_measure: f64,
    pub e_prime: Vec<usize>,
    pub levels: Vec<LevelSet>,
}

impl ExceptionalSetReport {
    pub fn satisfies_measure_bound(&self) -> bool {
        self.e_prime_measure >= 0.99 * self.e_measure
    }
}

fn level_set(phi: &GridFunction, t: f64) -> Vec<bool> {
    phi.values().iter().map(|&x| x > t).collect()
}

fn enlarge(mesh: Mesh, omega: &[bool], c: f64) -> Result<Vec<bool>> {
    let ind = GridFunction::from_values(mesh, omega.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())?;
    let m = maximal(&ind, MaximalMode::Strong)?;
    Ok(m.values().iter().map(|&x| x > c).collect())
}

/// The level sets `Ω_u = {Φ > C 2^{-u} |E|^{-1/r}}`, their enlargements
/// `Ω̃_u = {M 1_{Ω_u} > c}` (strong maximal function), `E′ = E \ Ω̃₀` and the
/// rectangle classes `R̂_u = {R : |R ∩ Ω_u| ≥ |R|/100}` over the standard
/// grids. `C` doubles from 1 until `|E′| ≥ (99/100)|E|`; the levels stop at
/// the first `u` where `Ω_u = {Φ > 0}`, after which they no longer change.
pub fn exceptional_set(phi: &GridFunction, e: &[usize], r: f64, c: Option<f64>) -> Result<ExceptionalSetReport> {
    let mesh = phi.mesh();
    let vol = mesh.cell_volume();
    let mut in_e = vec![false; mesh.len()];
    for &x in e {
        if x >= mesh.len() {
            return Err(Error::InvalidArgument(format!("cell {x} outside the mesh")));
        }
        in_e[x] = true;
    }
    let e_count = in_e.iter().filter(|&&b| b).count();
    if e_count == 0 {
        return Err(Error::EmptySet);
    }
    if !(r > 0.5 && r < 1.0) {
        return Err(Error::Exponent(format!("r = {r} is not in (1/2, 1)")));
    }
    if phi.values().iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidArgument("Φ must be finite and nonnegative".into()));
    }
    let c = c.unwrap_or_else(|| default_enlargement(&mesh));
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidArgument(format!("enlargement constant {c} is not in (0, 1)")));
    }
    let e_measure = e_count as f64 * vol;
    let scale = e_measure.powf(-1.0 / r);
    let mut constant = 1.0;
    let mut doublings = 0;
    let e_prime = loop {
        let omega = level_set(phi, constant * scale);
        let enlarged = enlarge(mesh, &omega, c)?;
        let kept: Vec<usize> = (0..mesh.len()).filter(|&x| in_e[x] && !enlarged[x]).collect();
        if kept.len() as f64 >= 0.99 * e_count as f64 {
            break kept;
        }
        if doublings == MAX_DOUBLINGS {
            return Err(Error::InvalidArgument("no constant C leaves 99% of E".into()));
        }
        constant *= 2.0;
        doublings += 1;
    };
    let grids = GridPair::standard(&mesh);
    let positive: Vec<bool> = phi.values().iter().map(|&x| x > 0.0).collect();
    let mut levels: Vec<LevelSet> = Vec::new();
    for u in 0..MAX_LEVELS {
        let threshold = constant * scale * 0.5f64.powi(u as i32);
        let omega = level_set(phi, threshold);
        let enlarged = enlarge(mesh, &omega, c)?;
        let ind = GridFunction::from_values(mesh, omega.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())?;
        let share = pairing_table(&ind, &grids, Profile::Average, Profile::Average)?;
        let mut hat = Vec::new();
        for i in 0..share.rows() {
            for j in 0..share.cols() {
                if share.get(i, j) >= 0.01 {
                    hat.push((i, j));
                }
            }
        }
        let new_count = hat.len() - levels.last().map_or(0, |l| l.hat.len());
        let count = |v: &[bool]| v.iter().filter(|&&b| b).count() as f64 * vol;
        let stable = omega == positive;
        levels.push(LevelSet {
            u,
            threshold,
            omega_measure: count(&omega),
            enlarged_measure: count(&enlarged),
            hat_count: hat.len(),
            new_count,
            omega,
            enlarged,
            hat,
        });
        if stable {
            break;
        }
    }
    Ok(ExceptionalSetReport {
        constant,
        doublings,
        enlargement: c,
        r,
        e_measure,
        e_prime_measure: e_prime.len() as f64 * vol,
        e_prime,
        levels,
    })
}

/// Cells of `3I × 3J` for standard-grid ids `(i, j)`.
pub fn tripled_rectangle_cells(mesh: &Mesh, i: usize, j: usize) -> Vec<usize> {
    let grids = GridPair::standard(mesh);
    let a = grids.first.cube(i).tripled_cells();
    let b = grids.second.cube(j).tripled_cells();
    let cols = mesh.cols();
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in &a {
        for &y in &b {
            out.push(x * cols + y);
        }
    }
    out
}
