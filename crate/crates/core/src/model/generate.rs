use rand::Rng;
use rand_distr::StandardNormal;

use super::field::{CoefficientField, Entry, OperatorKind, Shape};
use super::{admissible_tuples, audit_partial, audit_shift, full_estimate, tuple_bound};
use crate::dyadic::{Axis, GridPair};
use crate::error::{Error, Result};
use crate::norms::cube_sequence_bmo;
use crate::signal::id_measures;

fn check_density(density: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::InvalidArgument(format!("density {density} outside [0, 1]")));
    }
    Ok(())
}

fn infeasible(what: &str, grids: &GridPair) -> Error {
    Error::Resolution(format!("{what} infeasible at resolution {}", grids.first.resolution()))
}

fn to_u32(t: [usize; 4]) -> [u32; 4] {
    t.map(|x| x as u32)
}

/// Random partial paraproduct of complexity `k` with shift structure on the
/// first axis. Each `(K, (Iᵢ))` is kept with probability `density`; its
/// `V`-family is Gaussian times `|V|^{1/2}`, rescaled so the sequence-BMO bound holds with
/// equality.
pub fn generate_partial_coeffs<R: Rng + ?Sized>(
    rng: &mut R,
    grids: &GridPair,
    k: [u8; 3],
    zero_slot: u8,
    haar_slot: u8,
    density: f64,
) -> Result<CoefficientField> {
    check_density(density)?;
    let shape = Shape::partial(k, zero_slot, haar_slot)?;
    let kind = OperatorKind::Partial { shift_axis: Axis::First, zero_slot, haar_slot };
    let tuples = admissible_tuples(&grids.first, k, shape.first);
    if tuples.is_empty() {
        return Err(infeasible(&format!("complexity {k:?}"), grids));
    }
    let cubes: Vec<usize> = admissible_tuples(&grids.second, [0; 3], shape.second).iter().map(|t| t[0]).collect();
    let meas = id_measures(&grids.first);
    let second_meas = id_measures(&grids.second);
    let mut field = CoefficientField::empty(kind, grids, shape);
    let mut vals = vec![0.0; grids.second.cube_count()];
    for t in tuples {
        if !rng.gen_bool(density) {
            continue;
        }
        vals.iter_mut().for_each(|x| *x = 0.0);
        for &v in &cubes {
            vals[v] = rng.sample::<f64, _>(StandardNormal) * second_meas[v].sqrt();
        }
        let norm = cube_sequence_bmo(&grids.second, &vals)?;
        if norm == 0.0 {
            continue;
        }
        let c = tuple_bound(&meas, to_u32(t)) / norm;
        for &v in &cubes {
            field.push(t, [v; 4], vals[v] * c);
        }
    }
    field.provenance.density = Some(density);
    field.provenance.normalization = "sequence-BMO of every V-family equal to its bound".into();
    field.provenance.achieved = Some(audit_partial(grids, &field)?);
    Ok(field)
}

/// Random full paraproduct of the given form with coefficients Gaussian
/// times `|K × V|^{1/2}`, scaled by the rigorous upper
/// bound `‖S_a‖_∞` on its product-BMO norm.
pub fn generate_full_coeffs<R: Rng + ?Sized>(
    rng: &mut R,
    grids: &GridPair,
    first_slot: u8,
    second_slot: u8,
    density: f64,
) -> Result<CoefficientField> {
    check_density(density)?;
    let shape = Shape::full(first_slot, second_slot)?;
    let kind = OperatorKind::Full { first_slot, second_slot };
    let ks = admissible_tuples(&grids.first, [0; 3], shape.first);
    let vs = admissible_tuples(&grids.second, [0; 3], shape.second);
    if ks.is_empty() || vs.is_empty() {
        return Err(infeasible("full paraproduct", grids));
    }
    let (m1, m2) = (id_measures(&grids.first), id_measures(&grids.second));
    let mut field = CoefficientField::empty(kind, grids, shape);
    for kt in &ks {
        for vt in &vs {
            if rng.gen_bool(density) {
                let g: f64 = rng.sample(StandardNormal);
                let a = g * (m1[kt[0]] * m2[vt[0]]).sqrt();
                field.push(*kt, *vt, a);
            }
        }
    }
    field.provenance.density = Some(density);
    field.provenance.normalization = "divided by sup of the coefficient square function".into();
    if !field.is_empty() {
        let upper = full_estimate(grids, &field)?.upper;
        if upper > 0.0 {
            field.scale(upper.recip());
        }
    }
    field.provenance.achieved = Some(full_estimate(grids, &field)?.lower);
    Ok(field)
}

/// Random shift with every kept coefficient at `±` its pointwise bound.
pub fn generate_shift_coeffs<R: Rng + ?Sized>(
    rng: &mut R,
    grids: &GridPair,
    shape: Shape,
    density: f64,
) -> Result<CoefficientField> {
    check_density(density)?;
    let a = admissible_tuples(&grids.first, shape.k, shape.first);
    let b = admissible_tuples(&grids.second, shape.v, shape.second);
    if a.is_empty() || b.is_empty() {
        return Err(infeasible(&format!("complexity ({:?}, {:?})", shape.k, shape.v), grids));
    }
    let (m1, m2) = (id_measures(&grids.first), id_measures(&grids.second));
    let mut field = CoefficientField::empty(OperatorKind::Shift, grids, shape);
    for s in &a {
        let bs = tuple_bound(&m1, to_u32(*s));
        for t in &b {
            if rng.gen_bool(density) {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                let value = sign * bs * tuple_bound(&m2, to_u32(*t));
                field.entries.push(Entry { first: to_u32(*s), second: to_u32(*t), value });
            }
        }
    }
    field.provenance.density = Some(density);
    field.provenance.normalization = "coefficients at the pointwise bound".into();
    field.provenance.achieved = Some(audit_shift(grids, &field)?);
    Ok(field)
}
