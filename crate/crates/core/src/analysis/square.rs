use crate::dyadic::{DyadicGrid, GridPair, Profile};
use crate::error::{Error, Result};
use crate::signal::{
    axis_coefficients, axis_synthesis, factor_coefficients, factor_synthesis, id_measures, pairing_table,
    parent_ids, synthesize_table, FactorFunction, GridFunction, Table,
};

/// Square functions of a bi-parameter function.
#[derive(Clone, Copy, Debug)]
pub enum SquareMode<'a> {
    /// `(Σ_{I,J} |Δ_{I×J} f|²)^{1/2}`.
    Rectangles(&'a GridPair),
    /// `(Σ_Q |Δ_Q f|²)^{1/2}` along the axis of the grid.
    Axis(&'a DyadicGrid),
    /// `S̃_ω`: `(Σ_V |⟨f, h_{V+ω}⟩|² ⊗ 1_V/|V|)^{1/2}` along the axis of the
    /// shifted grid, `V` running over the standard grid.
    Shifted(&'a DyadicGrid),
}

pub fn square_function(f: &GridFunction, mode: SquareMode) -> Result<GridFunction> {
    let m = f.mesh();
    match mode {
        SquareMode::Rectangles(grids) => {
            let a = pairing_table(f, grids, Profile::Average, Profile::Average)?;
            let (p1, p2) = (parent_ids(&grids.first), parent_ids(&grids.second));
            let (m1, m2) = (id_measures(&grids.first), id_measures(&grids.second));
            let mut q = Table::zeros(a.rows(), a.cols());
            for i in 1..a.rows() {
                let pi = p1[i];
                for j in 1..a.cols() {
                    let pj = p2[j];
                    let v = a.get(i, j) - a.get(i, pj) - a.get(pi, j) + a.get(pi, pj);
                    q.set(i, j, v * v * m1[i] * m2[j]);
                }
            }
            Ok(synthesize_table(&q, grids, Profile::Average, Profile::Average).map(f64::sqrt))
        }
        SquareMode::Axis(grid) => {
            let a = axis_coefficients(f, grid, Profile::Average)?;
            let (par, meas) = (parent_ids(grid), id_measures(grid));
            let mut q = Table::zeros(a.rows(), a.cols());
            for i in 1..a.rows() {
                let (r, pr) = (a.row(i), a.row(par[i]));
                for (o, (x, y)) in q.row_mut(i).iter_mut().zip(r.iter().zip(pr)) {
                    *o = (x - y) * (x - y) * meas[i];
                }
            }
            Ok(axis_synthesis(&q, grid, Profile::Average, m).map(f64::sqrt))
        }
        SquareMode::Shifted(grid) => {
            let mut q: Option<Table> = None;
            for p in Profile::cancellative(grid.factor().dim()) {
                let mut t = axis_coefficients(f, grid, p)?;
                t.data_mut().iter_mut().for_each(|x| *x *= *x);
                q = Some(match q {
                    None => t,
                    Some(mut acc) => {
                        acc.data_mut().iter_mut().zip(t.data()).for_each(|(a, b)| *a += b);
                        acc
                    }
                });
            }
            let q = q.expect("at least one cancellative profile");
            let std = DyadicGrid::standard(grid.axis(), grid.factor());
            Ok(axis_synthesis(&q, &std, Profile::Average, m).map(f64::sqrt))
        }
    }
}

/// `S̃_ω u` for a function of one factor.
pub fn factor_shifted_square(u: &FactorFunction, grid: &DyadicGrid) -> Result<FactorFunction> {
    if u.factor() != grid.factor() {
        return Err(Error::MeshMismatch("grid does not match the function's factor".into()));
    }
    let mut q = vec![0.0; grid.cube_count()];
    for p in Profile::cancellative(grid.factor().dim()) {
        for (a, c) in q.iter_mut().zip(factor_coefficients(u.values(), grid, p)) {
            *a += c * c;
        }
    }
    let std = DyadicGrid::standard(grid.axis(), grid.factor());
    let v = factor_synthesis(&q, &std, Profile::Average).into_iter().map(f64::sqrt).collect();
    FactorFunction::from_values(u.factor(), v)
}
