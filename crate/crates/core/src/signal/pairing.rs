use crate::dyadic::{Axis, DyadicCube, DyadicRectangle, HaarIndex, Profile};
use crate::error::{Error, Result};

use super::function::{FactorFunction, GridFunction};

/// Nonzero values of `profile` on `cube` as `(cell, value)` pairs.
pub fn profile_support(cube: &DyadicCube, profile: Profile) -> Vec<(usize, f64)> {
    let amp = profile.amplitude(cube.measure());
    let cells = cube.cells();
    let block = if cube.is_finest() { 1 } else { cells.len() >> cube.factor().dim() };
    cells.iter().enumerate().map(|(p, &c)| (c, amp * profile.sign(p / block))).collect()
}

fn check_axis(cube: &DyadicCube, f: &GridFunction, axis: Axis) -> Result<()> {
    if cube.axis() != axis {
        return Err(Error::AxisMismatch(format!("{cube} is not on axis {}", axis.number())));
    }
    if f.mesh().factor(axis) != cube.factor() {
        return Err(Error::MeshMismatch(format!("{cube} is not aligned with the mesh")));
    }
    Ok(())
}

/// `∫ f g` over the torus.
pub fn pair(f: &GridFunction, g: &GridFunction) -> Result<f64> {
    f.check_mesh(g)?;
    let s: f64 = f.values().iter().zip(g.values()).map(|(a, b)| a * b).sum();
    Ok(s * f.mesh().cell_volume())
}

/// `⟨f, φ_I ⊗ ψ_J⟩` for arbitrary profiles.
pub fn profile_pair(f: &GridFunction, i: &DyadicCube, p1: Profile, j: &DyadicCube, p2: Profile) -> Result<f64> {
    check_axis(i, f, Axis::First)?;
    check_axis(j, f, Axis::Second)?;
    let a = profile_support(i, p1);
    let b = profile_support(j, p2);
    let cols = f.mesh().cols();
    let v = f.values();
    let mut s = 0.0;
    for &(x1, u) in &a {
        let row = &v[x1 * cols..(x1 + 1) * cols];
        let inner: f64 = b.iter().map(|&(x2, w)| row[x2] * w).sum();
        s += u * inner;
    }
    Ok(s * f.mesh().cell_volume())
}

/// `⟨f, h_I^η ⊗ h_J^θ⟩`.
pub fn haar_pair(f: &GridFunction, hx: &HaarIndex, hy: &HaarIndex) -> Result<f64> {
    profile_pair(f, hx.cube(), hx.profile(), hy.cube(), hy.profile())
}

/// `⟨f, φ_Q⟩_axis` as a function of the other variable.
pub fn partial_profile_pair(f: &GridFunction, q: &DyadicCube, profile: Profile) -> Result<FactorFunction> {
    let axis = q.axis();
    check_axis(q, f, axis)?;
    let m = f.mesh();
    let sup = profile_support(q, profile);
    let cv = q.factor().cell_volume();
    let other = m.factor(axis.other());
    let mut out = vec![0.0; other.len()];
    let cols = m.cols();
    let v = f.values();
    match axis {
        Axis::First => {
            for &(x1, w) in &sup {
                for (o, &x) in out.iter_mut().zip(&v[x1 * cols..(x1 + 1) * cols]) {
                    *o += w * x * cv;
                }
            }
        }
        Axis::Second => {
            for (x1, o) in out.iter_mut().enumerate() {
                let row = &v[x1 * cols..(x1 + 1) * cols];
                *o = sup.iter().map(|&(x2, w)| w * row[x2]).sum::<f64>() * cv;
            }
        }
    }
    FactorFunction::from_values(other, out)
}

/// `⟨f, h⟩_axis`, a function of the other variable. `axis` must be the axis
/// of `h`.
pub fn partial_pair(f: &GridFunction, h: &HaarIndex, axis: Axis) -> Result<FactorFunction> {
    if h.cube().axis() != axis {
        return Err(Error::AxisMismatch(format!(
            "Haar function lives on axis {}, pairing requested on axis {}",
            h.cube().axis().number(),
            axis.number()
        )));
    }
    partial_profile_pair(f, h.cube(), h.profile())
}

/// `⟨f⟩_R`.
pub fn cube_average(f: &GridFunction, r: &DyadicRectangle) -> Result<f64> {
    profile_pair(f, &r.first, Profile::Average, &r.second, Profile::Average)
}

/// `⟨f⟩_{Q,axis}` as a function of the other variable.
pub fn axis_average(f: &GridFunction, q: &DyadicCube) -> Result<FactorFunction> {
    partial_profile_pair(f, q, Profile::Average)
}
