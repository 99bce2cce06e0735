use crate::dyadic::{Axis, Mesh};
use crate::error::{Error, Result};
use crate::signal::{FactorFunction, GridFunction};

use super::maximal::{map_slices, strong_sup};
use super::window::Windows;

/// Which adapted maximal function to compute.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdaptedMode {
    /// `M_b` acting in one variable, the other one frozen.
    OneParameter(Axis),
    /// Supremum over all mesh-aligned rectangles.
    BiParameter,
}

/// `M_b f(x) = sup_{I ∋ x} |I|^{-1} ∫_I |b − ⟨b⟩_I| |f|` over every
/// mesh-aligned window of the factor.
pub(crate) fn adapted_slice(w: &Windows, b: &[f64], f: &[f64]) -> Vec<f64> {
    let n = w.sides();
    let mut vals = vec![0.0; w.starts() * n];
    if f.iter().all(|&x| x == 0.0) {
        return vec![0.0; f.len()];
    }
    let mut cells = Vec::new();
    for a in 0..w.starts() {
        for s in 1..=n {
            cells.clear();
            cells.extend(w.cells(a, s));
            let vol = cells.len() as f64;
            let mean = cells.iter().map(|&c| b[c]).sum::<f64>() / vol;
            vals[a * n + s - 1] = cells.iter().map(|&c| (b[c] - mean).abs() * f[c].abs()).sum::<f64>() / vol;
        }
    }
    w.sup_over_containing(&vals)
}

/// One-parameter adapted maximal function of functions of one factor.
pub fn factor_adapted_maximal(b: &FactorFunction, f: &FactorFunction) -> Result<FactorFunction> {
    if b.factor() != f.factor() {
        return Err(Error::MeshMismatch("b and f live on different factors".into()));
    }
    let w = Windows::new(f.factor());
    FactorFunction::from_values(f.factor(), adapted_slice(&w, b.values(), f.values()))
}

pub fn adapted_maximal(b: &GridFunction, f: &GridFunction, mode: AdaptedMode) -> Result<GridFunction> {
    b.check_mesh(f)?;
    let m = f.mesh();
    match mode {
        AdaptedMode::OneParameter(axis) => {
            let w = Windows::new(m.factor(axis));
            let bt = slices(b, axis);
            let mut k = 0;
            Ok(map_slices(f, axis, |s| {
                let r = adapted_slice(&w, &bt[k], s);
                k += 1;
                r
            }))
        }
        AdaptedMode::BiParameter => Ok(adapted_strong(m, b, f)),
    }
}

fn slices(g: &GridFunction, axis: Axis) -> Vec<Vec<f64>> {
    let m = g.mesh();
    match axis {
        Axis::Second => (0..m.rows()).map(|x1| g.row(x1).to_vec()).collect(),
        Axis::First => (0..m.cols()).map(|x2| g.column(x2)).collect(),
    }
}

fn adapted_strong(m: Mesh, b: &GridFunction, f: &GridFunction) -> GridFunction {
    let w1 = Windows::new(m.first());
    let w2 = Windows::new(m.second());
    let (n1, n2, p2) = (w1.sides(), w2.sides(), w2.starts());
    let cols = m.cols();
    let (bv, fv) = (b.values(), f.values());
    strong_sup(m, &w1, &w2, |a1| {
        let mut vals = vec![0.0; n1 * p2 * n2];
        for s1 in 1..=n1 {
            let rows = w1.cells(a1, s1);
            for a2 in 0..p2 {
                for s2 in 1..=n2 {
                    let cs = w2.cells(a2, s2);
                    let vol = (rows.len() * cs.len()) as f64;
                    let mut mean = 0.0;
                    for &x1 in &rows {
                        mean += cs.iter().map(|&x2| bv[x1 * cols + x2]).sum::<f64>();
                    }
                    mean /= vol;
                    let mut acc = 0.0;
                    for &x1 in &rows {
                        for &x2 in &cs {
                            let c = x1 * cols + x2;
                            acc += (bv[c] - mean).abs() * fv[c].abs();
                        }
                    }
                    vals[(s1 - 1) * p2 * n2 + a2 * n2 + s2 - 1] = acc / vol;
                }
            }
        }
        vals
    })
}
