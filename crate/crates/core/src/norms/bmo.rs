use crate::analysis::{Family, Windows};
use crate::dyadic::{Factor, GridPair};
use crate::error::{Error, Result};
use crate::signal::{FactorFunction, GridFunction};

/// Which BMO-type norm of a bi-parameter function.
#[derive(Clone, Copy, Debug)]
pub enum BmoMode<'a> {
    /// Dyadic little BMO, `sup_{R ∈ 𝒟} ⟨|b − ⟨b⟩_R|⟩_R`.
    Dyadic(&'a GridPair),
    /// Little BMO over every mesh-aligned rectangle.
    NonDyadic,
    /// Largest dyadic BMO norm of a one-variable slice, in either variable.
    DyadicSlices(&'a GridPair),
    /// Largest non-dyadic BMO norm of a one-variable slice.
    Slices,
}

/// Mean oscillation `⟨|v − ⟨v⟩_Q|⟩_Q` of the values at `cells`.
fn oscillation(v: &[f64], cells: impl Iterator<Item = usize> + Clone) -> f64 {
    let mut n = 0usize;
    let mut s = 0.0;
    for c in cells.clone() {
        s += v[c];
        n += 1;
    }
    let mean = s / n as f64;
    cells.map(|c| (v[c] - mean).abs()).sum::<f64>() / n as f64
}

fn slice_bmo(factor: Factor, v: &[f64], family: Family) -> f64 {
    match family {
        Family::Dyadic(g) => (0..g.cube_count())
            .map(|id| oscillation(v, g.cells(id).iter().map(|&c| c as usize)))
            .fold(0.0, f64::max),
        Family::All => {
            let w = Windows::new(factor);
            let mut best = 0.0f64;
            for a in 0..w.starts() {
                for s in 2..=w.sides() {
                    best = best.max(oscillation(v, w.cells(a, s).into_iter()));
                }
            }
            best
        }
    }
}

/// BMO norm of a function of one factor over a grid or over every
/// mesh-aligned cube.
pub fn factor_bmo_norm(v: &FactorFunction, family: Family) -> Result<f64> {
    if let Family::Dyadic(g) = family {
        if g.factor() != v.factor() {
            return Err(Error::MeshMismatch("grid does not match the function's factor".into()));
        }
    }
    Ok(slice_bmo(v.factor(), v.values(), family))
}

pub fn bmo_norm(b: &GridFunction, mode: BmoMode) -> Result<f64> {
    let m = b.mesh();
    let cols = m.cols();
    let v = b.values();
    let rect = |r: &[usize], c: &[usize]| oscillation(v, r.iter().flat_map(|&x1| c.iter().map(move |&x2| x1 * cols + x2)));
    match mode {
        BmoMode::Dyadic(grids) => {
            if grids.mesh() != m {
                return Err(Error::MeshMismatch("grid pair does not match the function's mesh".into()));
            }
            let c1: Vec<Vec<usize>> =
                (0..grids.first.cube_count()).map(|i| grids.first.cells(i).iter().map(|&c| c as usize).collect()).collect();
            let c2: Vec<Vec<usize>> =
                (0..grids.second.cube_count()).map(|j| grids.second.cells(j).iter().map(|&c| c as usize).collect()).collect();
            let mut best = 0.0f64;
            for r in &c1 {
                for c in &c2 {
                    best = best.max(rect(r, c));
                }
            }
            Ok(best)
        }
        BmoMode::NonDyadic => {
            let w1 = Windows::new(m.first());
            let w2 = Windows::new(m.second());
            let c2: Vec<Vec<usize>> =
                (0..w2.starts()).flat_map(|a| (1..=w2.sides()).map(move |s| (a, s))).map(|(a, s)| w2.cells(a, s)).collect();
            let mut best = 0.0f64;
            for a1 in 0..w1.starts() {
                for s1 in 1..=w1.sides() {
                    let r = w1.cells(a1, s1);
                    for c in &c2 {
                        best = best.max(rect(&r, c));
                    }
                }
            }
            Ok(best)
        }
        BmoMode::DyadicSlices(grids) => {
            if grids.mesh() != m {
                return Err(Error::MeshMismatch("grid pair does not match the function's mesh".into()));
            }
            Ok(slices(b, Family::Dyadic(&grids.first), Family::Dyadic(&grids.second)))
        }
        BmoMode::Slices => Ok(slices(b, Family::All, Family::All)),
    }
}

fn slices(b: &GridFunction, f1: Family, f2: Family) -> f64 {
    let m = b.mesh();
    let rows = (0..m.rows()).map(|x1| slice_bmo(m.second(), b.row(x1), f2)).fold(0.0, f64::max);
    let cols = (0..m.cols()).map(|x2| slice_bmo(m.first(), &b.column(x2), f1)).fold(0.0, f64::max);
    rows.max(cols)
}
