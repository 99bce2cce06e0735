use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{sample_rng, GridPair, Mesh, ShiftSampler};
use crate::error::{Error, Result};
use crate::model::{
    generate_full_coeffs, generate_partial_coeffs, generate_shift_coeffs, ModelOperator, Shape, COMMUTATOR_FULL,
};
use crate::norms::lp_norm;
use crate::signal::GridFunction;

use super::commutator;

/// `E_ω F(ω)` over the grid pairs of `sampler`; `F` receives the sample
/// index and the grids. Samples run in parallel and are summed in order.
pub fn expectation_over_grids<F>(mesh: &Mesh, sampler: &ShiftSampler, f: F) -> Result<GridFunction>
where
    F: Fn(usize, &GridPair) -> Result<GridFunction> + Sync + Send,
{
    let pairs = sampler.pairs(mesh)?;
    if pairs.is_empty() {
        return Err(Error::NoSamples);
    }
    let outs: Vec<GridFunction> = pairs
        .into_par_iter()
        .enumerate()
        .map(|(k, (a, b))| f(k, &GridPair::shifted(a, b)?))
        .collect::<Result<_>>()?;
    let n = outs.len() as f64;
    let mut acc = GridFunction::zeros(*mesh);
    for o in &outs {
        o.check_mesh(&acc)?;
        acc += o;
    }
    Ok(acc.scale(n.recip()))
}

/// `α_{k,v} = 2^{−α max kᵢ / 2} 2^{−α max vⱼ / 2}`.
pub fn compute_alpha(k: [u8; 3], v: [u8; 3], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("kernel exponent {alpha} is not positive")));
    }
    let mk = *k.iter().max().unwrap() as f64;
    let mv = *v.iter().max().unwrap() as f64;
    Ok((-alpha * mk / 2.0).exp2() * (-alpha * mv / 2.0).exp2())
}

/// One `(k, v, u)` family: a fresh random operator on every sampled grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisEntry {
    pub k: [u8; 3],
    pub v: [u8; 3],
    pub u: u32,
    pub density: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthesisSpec {
    /// Kernel regularity exponent `α > 0`.
    pub alpha: f64,
    /// The constant `C_T`.
    pub c_t: f64,
    pub entries: Vec<SynthesisEntry>,
    pub sampler: ShiftSampler,
}

impl SynthesisSpec {
    pub fn new(alpha: f64, sampler: ShiftSampler) -> Self {
        Self { alpha, c_t: 1.0, entries: Vec::new(), sampler }
    }
}

/// Operator of a family on one grid pair: a full paraproduct when
/// `k = v = 0`, a partial paraproduct when exactly one of them vanishes
/// (shift structure on the nonzero side), a dyadic shift otherwise.
pub fn operator_for(entry: &SynthesisEntry, grids: &GridPair, sample: usize) -> Result<ModelOperator> {
    let mut rng = sample_rng(entry.seed ^ ((entry.u as u64) << 32), sample);
    let kz = entry.k == [0; 3];
    let vz = entry.v == [0; 3];
    let field = match (kz, vz) {
        (true, true) => generate_full_coeffs(&mut rng, grids, COMMUTATOR_FULL.0, COMMUTATOR_FULL.1, entry.density)?,
        (false, true) => generate_partial_coeffs(&mut rng, grids, entry.k, 0, 0, entry.density)?,
        (true, false) => {
            generate_partial_coeffs(&mut rng, &grids.transposed(), entry.v, 0, 0, entry.density)?.transposed()
        }
        (false, false) => generate_shift_coeffs(&mut rng, grids, Shape::shift(entry.k, entry.v), entry.density)?,
    };
    ModelOperator::on_grids(grids, field)
}

#[derive(Clone, Debug)]
pub struct SynthesisOutput {
    /// `C_T Σ α_{k,v} E_ω [b, U_ω]₁(f₁, f₂)`.
    pub total: GridFunction,
    /// The weighted summands, in entry order.
    pub terms: Vec<GridFunction>,
    pub weights: Vec<f64>,
}

/// The weighted sum of grid-averaged first-slot commutators.
pub fn synthesize(spec: &SynthesisSpec, b: &GridFunction, f1: &GridFunction, f2: &GridFunction) -> Result<SynthesisOutput> {
    b.check_mesh(f1)?;
    b.check_mesh(f2)?;
    let mesh = b.mesh();
    let mut total = GridFunction::zeros(mesh);
    let mut terms = Vec::with_capacity(spec.entries.len());
    let mut weights = Vec::with_capacity(spec.entries.len());
    for entry in &spec.entries {
        let w = spec.c_t * compute_alpha(entry.k, entry.v, spec.alpha)?;
        let avg = expectation_over_grids(&mesh, &spec.sampler, |k, g| {
            commutator(b, &operator_for(entry, g, k)?, 1, f1, f2)
        })?;
        let term = avg.scale(w);
        total += &term;
        terms.push(term);
        weights.push(w);
    }
    Ok(SynthesisOutput { total, terms, weights })
}

/// `Σ ‖gᵢ‖_r^r`, the right-hand side of the quasi-triangle inequality
/// `‖Σ gᵢ‖_r^r ≤ Σ ‖gᵢ‖_r^r` for `r ≤ 1`.
pub fn quasi_norm_budget(terms: &[GridFunction], r: f64) -> Result<f64> {
    terms.iter().map(|t| Ok(lp_norm(t, r, None)?.powf(r))).sum()
}
