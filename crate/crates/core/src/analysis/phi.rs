use crate::dyadic::{DyadicGrid, Profile};
use crate::error::Result;
use crate::signal::{axis_coefficients, axis_synthesis, GridFunction, Table};

use super::adapted::adapted_slice;
use super::maximal::nondyadic_slice;
use super::window::Windows;

/// `φ_𝒟 f = Σ_Q h_Q ⊗ M⟨f, h_Q⟩`, with `Q` in `grid`, the pairing taken in
/// the grid's variable and the non-dyadic `M` acting in the other one.
pub fn phi_sharp(f: &GridFunction, grid: &DyadicGrid) -> Result<GridFunction> {
    let m = f.mesh();
    let w = Windows::new(m.factor(grid.axis().other()));
    let mut out = GridFunction::zeros(m);
    for p in Profile::cancellative(grid.factor().dim()) {
        let t = axis_coefficients(f, grid, p)?;
        let t = map_coarse(&t, grid, |_, r| {
            let abs: Vec<f64> = r.iter().map(|x| x.abs()).collect();
            nondyadic_slice(&w, &abs)
        });
        out += &axis_synthesis(&t, grid, p, m);
    }
    Ok(out)
}

/// `φ_{𝒟,b} f = Σ_Q M_{⟨b⟩_Q} ⟨f, h_Q⟩ ⊗ h_Q`: like [`phi_sharp`] with the
/// adapted maximal function of the slice average `⟨b⟩_Q` in place of `M`.
pub fn phi_adapted(b: &GridFunction, f: &GridFunction, grid: &DyadicGrid) -> Result<GridFunction> {
    b.check_mesh(f)?;
    let m = f.mesh();
    let w = Windows::new(m.factor(grid.axis().other()));
    let avg = axis_coefficients(b, grid, Profile::Average)?;
    let mut out = GridFunction::zeros(m);
    for p in Profile::cancellative(grid.factor().dim()) {
        let t = axis_coefficients(f, grid, p)?;
        let t = map_coarse(&t, grid, |id, r| adapted_slice(&w, avg.row(id), r));
        out += &axis_synthesis(&t, grid, p, m);
    }
    Ok(out)
}

/// Apply `op` to the rows of cubes above the finest level; finest rows are
/// zero.
pub(crate) fn map_coarse(t: &Table, grid: &DyadicGrid, mut op: impl FnMut(usize, &[f64]) -> Vec<f64>) -> Table {
    let mut out = Table::zeros(t.rows(), t.cols());
    for id in grid.coarse_ids() {
        let r = op(id, t.row(id));
        out.row_mut(id).copy_from_slice(&r);
    }
    out
}
