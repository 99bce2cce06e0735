use rayon::prelude::*;

use crate::dyadic::{Axis, DyadicGrid, Profile, ShiftSampler};
use crate::error::{Error, Result};
use crate::paraproducts::paraproduct_a;
use crate::signal::{axis_coefficients, axis_synthesis, GridFunction, Table};

use super::maximal::{maximal, nondyadic_slice, Family, MaximalMode};
use super::phi::{map_coarse, phi_adapted, phi_sharp};
use super::square::{square_function, SquareMode};
use super::window::Windows;

/// The auxiliary operators used by the sparse-domination arguments.
#[derive(Clone, Copy, Debug)]
pub enum AuxKind<'a> {
    /// `Φ₁ f = E_{ω₂} M¹ S̃²_{ω₂}(φ²_{ω₂,b} f)` (partial paraproduct case).
    PartialFirst { b: &'a GridFunction },
    /// `Φ₂ˡ f = (Σ_K E_{ω₁} (M¹ Δ¹_{K+ω₁,l} φ¹_{ω₁} f)²)^{1/2}`.
    PartialSecond { l: u8 },
    /// `Φ₁ f = E_{ω₂} (Σ_V (M⟨f, h_{V+ω₂}⟩₂)² ⊗ 1_V/|V|)^{1/2}` (full paraproduct case).
    FullFirst,
    /// `Φ₂ f = E_{ω₁} (Σ_K 1_K/|K| ⊗ (M⟨a¹_{i,ω₁}(b,f), h_{K+ω₁}⟩₁)²)^{1/2}`.
    FullSecond { b: &'a GridFunction, i: u8 },
}

/// Estimate of the operator named by `kind`, the expectation over shifted
/// grids taken with `sampler`.
pub fn aux_phi(f: &GridFunction, kind: AuxKind, sampler: &ShiftSampler) -> Result<GridFunction> {
    let m = f.mesh();
    match kind {
        AuxKind::PartialFirst { b } => {
            b.check_mesh(f)?;
            let grids = sampler.axis_grids(&m, Axis::Second)?;
            expect(&grids, |g| {
                let s = square_function(&phi_adapted(b, f, g)?, SquareMode::Shifted(g))?;
                maximal(&s, MaximalMode::Partial(Axis::First, Family::All))
            })
        }
        AuxKind::PartialSecond { l } => {
            if l >= m.level() {
                return Err(Error::Resolution(format!("no cube admits a block of depth {l} at resolution {}", m.level())));
            }
            let grids = sampler.axis_grids(&m, Axis::First)?;
            Ok(expect(&grids, |g| block_squares(&phi_sharp(f, g)?, g, l))?.map(f64::sqrt))
        }
        AuxKind::FullFirst => {
            let grids = sampler.axis_grids(&m, Axis::Second)?;
            expect(&grids, |g| shifted_maximal_square(f, g))
        }
        AuxKind::FullSecond { b, i } => {
            b.check_mesh(f)?;
            if !(1..=2).contains(&i) {
                return Err(Error::InvalidArgument(format!("one-parameter paraproduct index {i} is not 1 or 2")));
            }
            let grids = sampler.axis_grids(&m, Axis::First)?;
            expect(&grids, |g| shifted_maximal_square(&paraproduct_a(i, b, f, g)?, g))
        }
    }
}

fn expect(grids: &[DyadicGrid], op: impl Fn(&DyadicGrid) -> Result<GridFunction> + Sync + Send) -> Result<GridFunction> {
    let parts = grids.par_iter().map(op).collect::<Result<Vec<_>>>()?;
    let mut it = parts.into_iter();
    let mut acc = it.next().ok_or(Error::NoSamples)?;
    for p in it {
        acc += &p;
    }
    Ok(acc.scale(1.0 / grids.len() as f64))
}

/// `(Σ_V (M⟨g, h_{V+ω}⟩)² ⊗ 1_V/|V|)^{1/2}`, `V` standard, the pairing along
/// the axis of the shifted grid and `M` non-dyadic in the other variable.
fn shifted_maximal_square(g: &GridFunction, grid: &DyadicGrid) -> Result<GridFunction> {
    let m = g.mesh();
    let w = Windows::new(m.factor(grid.axis().other()));
    let mut q: Option<Table> = None;
    for p in Profile::cancellative(grid.factor().dim()) {
        let t = axis_coefficients(g, grid, p)?;
        let t = map_coarse(&t, grid, |_, r| {
            let abs: Vec<f64> = r.iter().map(|x| x.abs()).collect();
            nondyadic_slice(&w, &abs).into_iter().map(|x| x * x).collect()
        });
        q = Some(match q {
            None => t,
            Some(mut acc) => {
                acc.data_mut().iter_mut().zip(t.data()).for_each(|(a, b)| *a += b);
                acc
            }
        });
    }
    let std = DyadicGrid::standard(grid.axis(), grid.factor());
    Ok(axis_synthesis(&q.expect("cancellative profile"), &std, Profile::Average, m).map(f64::sqrt))
}

/// `Σ_K (M¹ Δ¹_{K,l} g)²` over the cubes `K` of a first-axis grid.
pub(crate) fn block_squares(g: &GridFunction, grid: &DyadicGrid, l: u8) -> Result<GridFunction> {
    let m = g.mesh();
    let level = m.level();
    let a = axis_coefficients(g, grid, Profile::Average)?;
    let w = Windows::new(m.first());
    let cols = m.cols();
    let mut out = GridFunction::zeros(m);
    let mut slice = vec![0.0; m.rows()];
    for j in 0..level - l {
        for id in grid.level_ids(j) {
            let cells = grid.cells(id);
            for x2 in 0..cols {
                let mut any = false;
                for &c in cells {
                    let c = c as usize;
                    let d = a.get(grid.locate(j + l + 1, c), x2) - a.get(grid.locate(j + l, c), x2);
                    slice[c] = d.abs();
                    any |= d != 0.0;
                }
                if any {
                    let mx = nondyadic_slice(&w, &slice);
                    let v = out.values_mut();
                    for (x1, y) in mx.into_iter().enumerate() {
                        v[x1 * cols + x2] += y * y;
                    }
                }
                for &c in cells {
                    slice[c as usize] = 0.0;
                }
            }
        }
    }
    Ok(out)
}
