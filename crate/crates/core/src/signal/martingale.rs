use serde::{Deserialize, Serialize};

use crate::dyadic::{Axis, DyadicCube};
use crate::error::{Error, Result};

use super::function::{FactorFunction, GridFunction};

/// A projection acting on functions supported in one cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalOp {
    /// Restriction to the cube.
    Identity,
    /// `E_Q f = ⟨f⟩_Q 1_Q`.
    Expect,
    /// `Δ_Q f = Σ_{Q' child} (⟨f⟩_{Q'} − ⟨f⟩_Q) 1_{Q'}`.
    Delta,
    /// Martingale block `Δ_{Q,i} = Σ_{P^(i) = Q} Δ_P`.
    Block(u8),
}

impl LocalOp {
    fn depth(self) -> Option<u8> {
        match self {
            LocalOp::Delta => Some(0),
            LocalOp::Block(i) => Some(i),
            _ => None,
        }
    }
}

/// Apply `op` along the first index of a `rows × cols` row-major patch whose
/// rows are the Z-ordered cells of a cube of dimension `d`.
pub(crate) fn apply_rows(patch: &mut [f64], rows: usize, cols: usize, d: usize, op: LocalOp) -> Result<()> {
    match op {
        LocalOp::Identity => {}
        LocalOp::Expect => {
            let mut mean = vec![0.0; cols];
            for r in patch.chunks(cols) {
                for (m, v) in mean.iter_mut().zip(r) {
                    *m += v;
                }
            }
            let inv = 1.0 / rows as f64;
            for m in &mut mean {
                *m *= inv;
            }
            for r in patch.chunks_mut(cols) {
                r.copy_from_slice(&mean);
            }
        }
        LocalOp::Delta | LocalOp::Block(_) => {
            let depth = op.depth().unwrap() as usize;
            let chunk = rows >> (d * depth);
            if chunk <= 1 || chunk << (d * depth) != rows {
                return Err(Error::Resolution("martingale difference below the finest level".into()));
            }
            let child = chunk >> d;
            let kids = 1usize << d;
            let mut means = vec![0.0; kids * cols];
            let mut total = vec![0.0; cols];
            let inv = 1.0 / child as f64;
            for block in patch.chunks_mut(chunk * cols) {
                means.iter_mut().for_each(|m| *m = 0.0);
                total.iter_mut().for_each(|m| *m = 0.0);
                for (k, kid) in block.chunks(child * cols).enumerate() {
                    let mk = &mut means[k * cols..(k + 1) * cols];
                    for r in kid.chunks(cols) {
                        for (m, v) in mk.iter_mut().zip(r) {
                            *m += v;
                        }
                    }
                    for (t, m) in total.iter_mut().zip(mk.iter_mut()) {
                        *m *= inv;
                        *t += *m / kids as f64;
                    }
                }
                for (k, kid) in block.chunks_mut(child * cols).enumerate() {
                    let mk = &means[k * cols..(k + 1) * cols];
                    for r in kid.chunks_mut(cols) {
                        for ((x, m), t) in r.iter_mut().zip(mk).zip(&total) {
                            *x = m - t;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Apply `op` along the second index of a row-major patch.
pub(crate) fn apply_cols(patch: &mut [f64], rows: usize, cols: usize, d: usize, op: LocalOp) -> Result<()> {
    if op == LocalOp::Identity {
        return Ok(());
    }
    for r in patch.chunks_mut(cols) {
        apply_rows(r, cols, 1, d, op)?;
    }
    let _ = rows;
    Ok(())
}

/// `(op1 ⊗ op2)(1_{I×J} f)`: zero outside `I × J`.
pub fn local_projection(
    f: &GridFunction,
    i: &DyadicCube,
    op1: LocalOp,
    j: &DyadicCube,
    op2: LocalOp,
) -> Result<GridFunction> {
    let m = f.mesh();
    if i.axis() != Axis::First || j.axis() != Axis::Second {
        return Err(Error::AxisMismatch("expected a first-axis and a second-axis cube".into()));
    }
    if m.first() != i.factor() || m.second() != j.factor() {
        return Err(Error::MeshMismatch("cubes are not aligned with the mesh".into()));
    }
    let a = i.cells();
    let b = j.cells();
    let cols = m.cols();
    let mut patch = Vec::with_capacity(a.len() * b.len());
    for &x1 in &a {
        let row = &f.values()[x1 * cols..(x1 + 1) * cols];
        patch.extend(b.iter().map(|&x2| row[x2]));
    }
    apply_rows(&mut patch, a.len(), b.len(), m.n() as usize, op1)?;
    apply_cols(&mut patch, a.len(), b.len(), m.m() as usize, op2)?;
    let mut out = GridFunction::zeros(m);
    let v = out.values_mut();
    for (p, &x1) in a.iter().enumerate() {
        for (q, &x2) in b.iter().enumerate() {
            v[x1 * cols + x2] = patch[p * b.len() + q];
        }
    }
    Ok(out)
}

/// Named martingale projections of a bi-parameter function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Martingale {
    /// `Δ¹_I` or `Δ²_J`, depending on the cube's axis.
    Delta(DyadicCube),
    /// `E¹_I` or `E²_J`.
    Expect(DyadicCube),
    /// `Δ_{I×J} = Δ¹_I Δ²_J`.
    Rect(DyadicCube, DyadicCube),
}

/// The projection named by `mode`; each `Δ` includes every cancellative η.
pub fn martingale_difference(f: &GridFunction, mode: &Martingale) -> Result<GridFunction> {
    let m = f.mesh();
    let torus = |axis: Axis| DyadicCube::torus(axis, m.factor(axis));
    let along = |q: &DyadicCube, op: LocalOp| match q.axis() {
        Axis::First => local_projection(f, q, op, &torus(Axis::Second), LocalOp::Identity),
        Axis::Second => local_projection(f, &torus(Axis::First), LocalOp::Identity, q, op),
    };
    match mode {
        Martingale::Delta(q) => along(q, LocalOp::Delta),
        Martingale::Expect(q) => along(q, LocalOp::Expect),
        Martingale::Rect(i, j) => local_projection(f, i, LocalOp::Delta, j, LocalOp::Delta),
    }
}

/// One-parameter `Δ_Q v` on a factor function.
pub fn delta(v: &FactorFunction, q: &DyadicCube) -> Result<FactorFunction> {
    factor_op(v, q, LocalOp::Delta)
}

/// One-parameter `E_Q v = ⟨v⟩_Q 1_Q`.
pub fn expectation(v: &FactorFunction, q: &DyadicCube) -> Result<FactorFunction> {
    factor_op(v, q, LocalOp::Expect)
}

/// One-parameter martingale block `Δ_{K,i} v`.
pub fn factor_block(v: &FactorFunction, k: &DyadicCube, i: u8) -> Result<FactorFunction> {
    factor_op(v, k, LocalOp::Block(i))
}

fn factor_op(v: &FactorFunction, q: &DyadicCube, op: LocalOp) -> Result<FactorFunction> {
    if v.factor() != q.factor() {
        return Err(Error::MeshMismatch("cube is not aligned with the function's mesh".into()));
    }
    let cells = q.cells();
    let mut patch: Vec<f64> = cells.iter().map(|&c| v.values()[c]).collect();
    apply_rows(&mut patch, cells.len(), 1, q.factor().dim() as usize, op)?;
    let mut out = FactorFunction::zeros(v.factor());
    for (&c, x) in cells.iter().zip(patch) {
        out.values_mut()[c] = x;
    }
    Ok(out)
}

/// Martingale blocks: `Δ_{K,i}` along the axis of `k`, or the bi-parameter
/// `Δ^{i,j}_{K×V} = Δ¹_{K,i} Δ²_{V,j}` when `second` is given.
pub fn martingale_block(
    f: &GridFunction,
    k: &DyadicCube,
    i: u8,
    second: Option<(&DyadicCube, u8)>,
) -> Result<GridFunction> {
    let m = f.mesh();
    let check = |q: &DyadicCube, depth: u8| -> Result<()> {
        if q.level() as u32 + depth as u32 >= m.level() as u32 {
            Err(Error::Resolution(format!(
                "block of depth {depth} below level {} exceeds resolution {}",
                q.level(),
                m.level()
            )))
        } else {
            Ok(())
        }
    };
    check(k, i)?;
    match second {
        None => match k.axis() {
            Axis::First => local_projection(
                f,
                k,
                LocalOp::Block(i),
                &DyadicCube::torus(Axis::Second, m.second()),
                LocalOp::Identity,
            ),
            Axis::Second => local_projection(
                f,
                &DyadicCube::torus(Axis::First, m.first()),
                LocalOp::Identity,
                k,
                LocalOp::Block(i),
            ),
        },
        Some((v, j)) => {
            check(v, j)?;
            local_projection(f, k, LocalOp::Block(i), v, LocalOp::Block(j))
        }
    }
}
