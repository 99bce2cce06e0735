use crate::dyadic::{Axis, DyadicGrid, Factor, GridPair, Mesh, Profile};
use crate::error::{Error, Result};
use crate::signal::{cube_sums, pairing_table, FactorFunction, GridFunction};

use super::window::Windows;

/// The cubes a maximal function takes its supremum over.
#[derive(Clone, Copy, Debug)]
pub enum Family<'a> {
    /// The cubes of one dyadic grid.
    Dyadic(&'a DyadicGrid),
    /// Every mesh-aligned cube, wrapped on the torus.
    All,
}

/// Which maximal operator to apply to a bi-parameter function.
#[derive(Clone, Copy, Debug)]
pub enum MaximalMode<'a> {
    /// `M¹` or `M²`: a one-parameter maximal function in one variable.
    Partial(Axis, Family<'a>),
    /// `M_{𝒟ⁿ,𝒟ᵐ}` over dyadic rectangles.
    StrongDyadic(&'a GridPair),
    /// Supremum over all mesh-aligned rectangles.
    Strong,
}

pub(crate) fn maximal_slice(factor: Factor, v: &[f64], family: Family) -> Vec<f64> {
    let abs: Vec<f64> = v.iter().map(|x| x.abs()).collect();
    match family {
        Family::Dyadic(grid) => {
            let sums = cube_sums(&abs, grid);
            let mut out = vec![0.0f64; abs.len()];
            for j in 0..=factor.level() {
                let vol = factor.cells_per_cube(j) as f64;
                for (x, o) in out.iter_mut().enumerate() {
                    *o = o.max(sums[grid.locate(j, x)] / vol);
                }
            }
            out
        }
        Family::All => nondyadic_slice(&Windows::new(factor), &abs),
    }
}

pub(crate) fn nondyadic_slice(w: &Windows, abs: &[f64]) -> Vec<f64> {
    let n = w.sides();
    let mut avg = w.sums(abs);
    for (k, a) in avg.iter_mut().enumerate() {
        *a /= w.volume(k % n + 1) as f64;
    }
    w.sup_over_containing(&avg)
}

/// One-parameter maximal function of a function of one factor.
pub fn factor_maximal(v: &FactorFunction, family: Family) -> Result<FactorFunction> {
    if let Family::Dyadic(g) = family {
        if g.factor() != v.factor() {
            return Err(Error::MeshMismatch("grid does not match the function's factor".into()));
        }
    }
    FactorFunction::from_values(v.factor(), maximal_slice(v.factor(), v.values(), family))
}

/// Apply `op` to every slice of `f` along `axis` (the slice varies the
/// coordinate of that axis).
pub(crate) fn map_slices(f: &GridFunction, axis: Axis, mut op: impl FnMut(&[f64]) -> Vec<f64>) -> GridFunction {
    let m = f.mesh();
    let (rows, cols) = (m.rows(), m.cols());
    let mut out = vec![0.0; f.values().len()];
    match axis {
        Axis::Second => {
            for x1 in 0..rows {
                out[x1 * cols..(x1 + 1) * cols].copy_from_slice(&op(f.row(x1)));
            }
        }
        Axis::First => {
            for x2 in 0..cols {
                let r = op(&f.column(x2));
                for (x1, v) in r.into_iter().enumerate() {
                    out[x1 * cols + x2] = v;
                }
            }
        }
    }
    GridFunction::from_values(m, out).expect("slices preserve the mesh")
}

pub fn maximal(f: &GridFunction, mode: MaximalMode) -> Result<GridFunction> {
    let m = f.mesh();
    match mode {
        MaximalMode::Partial(axis, family) => {
            if let Family::Dyadic(g) = family {
                if g.axis() != axis || g.factor() != m.factor(axis) {
                    return Err(Error::MeshMismatch("grid does not match the requested axis".into()));
                }
            }
            let factor = m.factor(axis);
            if let Family::All = family {
                let w = Windows::new(factor);
                return Ok(map_slices(f, axis, |s| {
                    let abs: Vec<f64> = s.iter().map(|x| x.abs()).collect();
                    nondyadic_slice(&w, &abs)
                }));
            }
            Ok(map_slices(f, axis, |s| maximal_slice(factor, s, family)))
        }
        MaximalMode::StrongDyadic(grids) => {
            if grids.mesh() != m {
                return Err(Error::MeshMismatch("grid pair does not match the function's mesh".into()));
            }
            let t = pairing_table(&f.abs(), grids, Profile::Average, Profile::Average)?;
            let (l1, l2) = (m.first().level(), m.second().level());
            let cols = m.cols();
            let mut out = vec![0.0f64; m.len()];
            for x1 in 0..m.rows() {
                let ids1: Vec<usize> = (0..=l1).map(|j| grids.first.locate(j, x1)).collect();
                for x2 in 0..cols {
                    let mut best = 0.0f64;
                    for j in 0..=l2 {
                        let b = grids.second.locate(j, x2);
                        for &a in &ids1 {
                            best = best.max(t.get(a, b));
                        }
                    }
                    out[x1 * cols + x2] = best;
                }
            }
            GridFunction::from_values(m, out)
        }
        MaximalMode::Strong => Ok(strong_all(&f.abs())),
    }
}

/// Average of the nonnegative `g` over every rectangle with first-axis
/// start `a1`, laid out as `[s1 − 1][a2][s2 − 1]`.
pub(crate) fn rectangle_averages(g: &GridFunction, w1: &Windows, w2: &Windows, a1: usize) -> Vec<f64> {
    let cols = g.mesh().cols();
    let (n1, n2, p2) = (w1.sides(), w2.sides(), w2.starts());
    let mut vals = vec![0.0; n1 * p2 * n2];
    for s1 in 1..=n1 {
        let mut col = vec![0.0; cols];
        for x1 in w1.cells(a1, s1) {
            for (c, v) in col.iter_mut().zip(g.row(x1)) {
                *c += v;
            }
        }
        let sums = w2.sums(&col);
        let block = &mut vals[(s1 - 1) * p2 * n2..s1 * p2 * n2];
        for a2 in 0..p2 {
            for s2 in 1..=n2 {
                block[a2 * n2 + s2 - 1] = sums[a2 * n2 + s2 - 1] / (w1.volume(s1) * w2.volume(s2)) as f64;
            }
        }
    }
    vals
}

/// Supremum over all mesh-aligned rectangles containing each cell of a value
/// attached to every rectangle; `vals(a1)` returns the values of the
/// rectangles with first-axis start `a1` in the layout of
/// [`rectangle_averages`].
pub(crate) fn strong_sup(
    mesh: Mesh,
    w1: &Windows,
    w2: &Windows,
    mut vals: impl FnMut(usize) -> Vec<f64>,
) -> GridFunction {
    let (n1, n2) = (w1.sides(), w2.sides());
    let (p1, p2) = (w1.starts(), w2.starts());
    let cols = mesh.cols();
    let mut out = vec![f64::NEG_INFINITY; mesh.len()];
    let mut best = vec![0.0; n1 * n2];
    let off2: Vec<Vec<usize>> = (0..p2).map(|a2| (0..p2).map(|x2| w2.offset(x2, a2)).collect()).collect();
    for a1 in 0..p1 {
        let v = vals(a1);
        let off1: Vec<usize> = (0..p1).map(|x1| w1.offset(x1, a1)).collect();
        for a2 in 0..p2 {
            // best[t1][t2] = max over s1 > t1, s2 > t2.
            for t1 in (0..n1).rev() {
                for t2 in (0..n2).rev() {
                    let mut b = v[t1 * p2 * n2 + a2 * n2 + t2];
                    if t2 + 1 < n2 {
                        b = b.max(best[t1 * n2 + t2 + 1]);
                    }
                    if t1 + 1 < n1 {
                        b = b.max(best[(t1 + 1) * n2 + t2]);
                    }
                    best[t1 * n2 + t2] = b;
                }
            }
            let o2 = &off2[a2];
            for (x1, &t1) in off1.iter().enumerate() {
                let b = &best[t1 * n2..(t1 + 1) * n2];
                let row = &mut out[x1 * cols..(x1 + 1) * cols];
                for (o, &t2) in row.iter_mut().zip(o2) {
                    if b[t2] > *o {
                        *o = b[t2];
                    }
                }
            }
        }
    }
    GridFunction::from_values(mesh, out).expect("same mesh")
}

pub(crate) fn strong_all(g: &GridFunction) -> GridFunction {
    let m = g.mesh();
    let w1 = Windows::new(m.first());
    let w2 = Windows::new(m.second());
    strong_sup(m, &w1, &w2, |a1| rectangle_averages(g, &w1, &w2, a1))
}
