//! Bi-parameter paraproducts `A₁ … A₈`, one-parameter paraproducts `aᵢʲ`,
//! and the expansions of `bf` paired against Haar and average profiles.
//!
//! Every operator here is a sum over parent cubes of products of local
//! martingale differences and averages. On a child block `I' × J'` of
//! `I × J` each such factor is constant, so the sums are evaluated from
//! tables of averages in one pass and never re-paired against Haar
//! functions.

mod expand;

pub use expand::{expand_product, local_blocks, Expander, Expansion, ProductExpansion, Term};

use crate::dyadic::{DyadicGrid, GridPair, Profile};
use crate::error::{Error, Result};
use crate::signal::{
    axis_coefficients, axis_synthesis, id_measures, pairing_table, parent_ids, synthesize_table, GridFunction, Table,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Op {
    /// Martingale difference `Δ_Q`.
    D,
    /// Average `E_Q`.
    E,
}

use Op::{D, E};

/// `(b-side, f-side)` operators of `A₁ … A₈`, each written `[first, second]`.
pub(crate) const A_OPS: [([Op; 2], [Op; 2]); 8] = [
    ([D, D], [D, D]),
    ([D, D], [E, D]),
    ([D, D], [D, E]),
    ([D, D], [E, E]),
    ([E, D], [D, D]),
    ([E, D], [D, E]),
    ([D, E], [D, D]),
    ([D, E], [E, D]),
];

/// Value of `(op₁ ⊗ op₂)_{I×J} g` on the child block `I' × J'`, from the
/// average table of `g`.
#[inline]
pub(crate) fn block_value(a: &Table, i: usize, pi: usize, j: usize, pj: usize, ops: [Op; 2]) -> f64 {
    match ops {
        [D, D] => a.get(i, j) - a.get(i, pj) - a.get(pi, j) + a.get(pi, pj),
        [E, D] => a.get(pi, j) - a.get(pi, pj),
        [D, E] => a.get(i, pj) - a.get(pi, pj),
        [E, E] => a.get(pi, pj),
    }
}

/// Averages of `b` and `f` on every rectangle of a grid pair, shared by the
/// eight bi-parameter paraproducts.
pub struct ParaproductTables<'g> {
    grids: &'g GridPair,
    b: Table,
    f: Table,
    parents: [Vec<usize>; 2],
    measures: [Vec<f64>; 2],
}

impl<'g> ParaproductTables<'g> {
    pub fn new(b: &GridFunction, f: &GridFunction, grids: &'g GridPair) -> Result<Self> {
        b.check_mesh(f)?;
        Ok(Self {
            grids,
            b: pairing_table(b, grids, Profile::Average, Profile::Average)?,
            f: pairing_table(f, grids, Profile::Average, Profile::Average)?,
            parents: [parent_ids(&grids.first), parent_ids(&grids.second)],
            measures: [id_measures(&grids.first), id_measures(&grids.second)],
        })
    }

    /// `A_i(b, f)`, `1 ≤ i ≤ 8`.
    pub fn operator(&self, i: u8) -> Result<GridFunction> {
        let (ob, of) = a_ops(i)?;
        let (p1, p2) = (&self.parents[0], &self.parents[1]);
        let (m1, m2) = (&self.measures[0], &self.measures[1]);
        let mut q = Table::zeros(self.b.rows(), self.b.cols());
        for i1 in 1..q.rows() {
            let pi = p1[i1];
            for j1 in 1..q.cols() {
                let pj = p2[j1];
                let v = block_value(&self.b, i1, pi, j1, pj, ob) * block_value(&self.f, i1, pi, j1, pj, of);
                q.set(i1, j1, v * m1[i1] * m2[j1]);
            }
        }
        Ok(synthesize_table(&q, self.grids, Profile::Average, Profile::Average))
    }
}

fn a_ops(i: u8) -> Result<([Op; 2], [Op; 2])> {
    if !(1..=8).contains(&i) {
        return Err(Error::InvalidArgument(format!("paraproduct index {i} is not in 1..=8")));
    }
    Ok(A_OPS[i as usize - 1])
}

/// The bi-parameter paraproduct `A_i(b, f)` on the grid pair.
#[allow(non_snake_case)]
pub fn paraproduct_A(i: u8, b: &GridFunction, f: &GridFunction, grids: &GridPair) -> Result<GridFunction> {
    a_ops(i)?;
    ParaproductTables::new(b, f, grids)?.operator(i)
}

/// The one-parameter paraproduct along the axis of `grid`: `a₁ = Σ Δ_Q b Δ_Q f`
/// for `j = 1`, `a₂ = Σ Δ_Q b E_Q f` for `j = 2`.
pub fn paraproduct_a(j: u8, b: &GridFunction, f: &GridFunction, grid: &DyadicGrid) -> Result<GridFunction> {
    if !(1..=2).contains(&j) {
        return Err(Error::InvalidArgument(format!("one-parameter paraproduct index {j} is not 1 or 2")));
    }
    b.check_mesh(f)?;
    let tb = axis_coefficients(b, grid, Profile::Average)?;
    let tf = axis_coefficients(f, grid, Profile::Average)?;
    let (par, meas) = (parent_ids(grid), id_measures(grid));
    let mut q = Table::zeros(tb.rows(), tb.cols());
    for i in 1..q.rows() {
        let p = par[i];
        let (bi, bp, fi, fp) = (tb.row(i), tb.row(p), tf.row(i), tf.row(p));
        for (x, o) in q.row_mut(i).iter_mut().enumerate() {
            let g = if j == 1 { fi[x] - fp[x] } else { fp[x] };
            *o = (bi[x] - bp[x]) * g * meas[i];
        }
    }
    Ok(axis_synthesis(&q, grid, Profile::Average, f.mesh()))
}
