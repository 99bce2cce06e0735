use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::analysis::{aux_phi, maximal, AuxKind, MaximalMode};
use crate::dyadic::{sample_rng, Factor, GridPair, Mesh, ShiftSampler};
use crate::error::{Error, Result};
use crate::model::{
    generate_full_coeffs, generate_partial_coeffs, CoefficientField, ModelOperator, OperatorKind, Shape,
};
use crate::norms::lp_norm;
use crate::signal::GridFunction;

use super::exceptional::exceptional_set;
use super::synthesis::expectation_over_grids;
use super::commutator;

const EXPONENT_TOL: f64 = 1e-12;

/// Exponents with `1/p + 1/q = 1/r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentTriple {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl ExponentTriple {
    /// Requires `p, q ∈ (1, ∞)`, `r > 1/2` and the Hölder relation to `1e-12`.
    pub fn new(p: f64, q: f64, r: f64) -> Result<Self> {
        for (name, x) in [("p", p), ("q", q)] {
            if !(x > 1.0 && x.is_finite()) {
                return Err(Error::Exponent(format!("{name} = {x} is not in (1, ∞)")));
            }
        }
        if !(r > 0.5 && r.is_finite()) {
            return Err(Error::Exponent(format!("r = {r} is not in (1/2, ∞)")));
        }
        let gap = 1.0 / p + 1.0 / q - 1.0 / r;
        if gap.abs() > EXPONENT_TOL {
            return Err(Error::Exponent(format!("1/p + 1/q − 1/r = {gap:e}")));
        }
        Ok(Self { p, q, r })
    }

    /// The quasi-Banach range `r < 1` of the weak-type argument.
    pub fn check_weak(&self) -> Result<()> {
        if self.r >= 1.0 {
            return Err(Error::Exponent(format!("weak-type estimates need r < 1, got {}", self.r)));
        }
        Ok(())
    }
}

/// A random model operator drawn afresh on every grid pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum OperatorFamily {
    Zero,
    /// Shift structure on the first axis.
    Partial { k: [u8; 3], zero_slot: u8, haar_slot: u8, density: f64 },
    Full { first_slot: u8, second_slot: u8, density: f64 },
}

impl OperatorFamily {
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, grids: &GridPair) -> Result<ModelOperator> {
        let field = match *self {
            OperatorFamily::Zero => {
                let kind = OperatorKind::Partial { shift_axis: crate::dyadic::Axis::First, zero_slot: 0, haar_slot: 0 };
                CoefficientField::empty(kind, grids, Shape::partial([0; 3], 0, 0)?)
            }
            OperatorFamily::Partial { k, zero_slot, haar_slot, density } => {
                generate_partial_coeffs(rng, grids, k, zero_slot, haar_slot, density)?
            }
            OperatorFamily::Full { first_slot, second_slot, density } => {
                generate_full_coeffs(rng, grids, first_slot, second_slot, density)?
            }
        };
        ModelOperator::on_grids(grids, field)
    }

    /// `max kᵢ`.
    pub fn complexity(&self) -> u8 {
        match self {
            OperatorFamily::Partial { k, .. } => *k.iter().max().unwrap(),
            _ => 0,
        }
    }
}

/// Cells whose centres lie in `[u, u + s)` (mod 1) in every coordinate of
/// the factor.
fn interval_cells<R: Rng + ?Sized>(rng: &mut R, factor: Factor, min_side: f64, max_side: f64) -> Vec<bool> {
    let n = factor.side() as f64;
    let d = factor.dim() as usize;
    let spans: Vec<(f64, f64)> = (0..d).map(|_| (rng.gen::<f64>(), rng.gen_range(min_side..max_side))).collect();
    (0..factor.len())
        .map(|c| {
            let x = factor.coords(c);
            spans.iter().enumerate().all(|(i, &(u, s))| {
                let t = ((x[i] as f64 + 0.5) / n - u).rem_euclid(1.0);
                t < s
            })
        })
        .collect()
}

fn random_rectangle<R: Rng + ?Sized>(rng: &mut R, mesh: &Mesh, min_side: f64, max_side: f64) -> Vec<bool> {
    let a = interval_cells(rng, mesh.first(), min_side, max_side);
    let b = interval_cells(rng, mesh.second(), min_side, max_side);
    let mut out = Vec::with_capacity(mesh.len());
    for &x in &a {
        for &y in &b {
            out.push(x && y);
        }
    }
    out
}

/// A sum of four indicators of random rectangles (sides in `[1/16, 1/2)`,
/// positions continuous, wrapped) with Gaussian heights. The ensemble does
/// not depend on the resolution beyond rounding to the mesh.
pub fn random_test_function<R: Rng + ?Sized>(rng: &mut R, mesh: Mesh) -> GridFunction {
    let mut out = GridFunction::zeros(mesh);
    for _ in 0..4 {
        let h: f64 = rng.sample(StandardNormal);
        let r = random_rectangle(rng, &mesh, 1.0 / 16.0, 0.5);
        for (v, inside) in out.values_mut().iter_mut().zip(r) {
            if inside {
                *v += h;
            }
        }
    }
    out
}

/// A union of one to three random rectangles; never empty.
pub fn random_set<R: Rng + ?Sized>(rng: &mut R, mesh: Mesh) -> Vec<usize> {
    let mut inside = vec![false; mesh.len()];
    for _ in 0..rng.gen_range(1..=3) {
        for (a, b) in inside.iter_mut().zip(random_rectangle(rng, &mesh, 1.0 / 16.0, 0.5)) {
            *a |= b;
        }
    }
    let mut cells: Vec<usize> = (0..mesh.len()).filter(|&c| inside[c]).collect();
    if cells.is_empty() {
        cells.push(rng.gen_range(0..mesh.len()));
    }
    cells
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTrial {
    pub trial: usize,
    /// `sup_{|f₃| ≤ 1_{E′}} |⟨E_ω[b, P_ω]₁(f₁, f₂), f₃⟩| = ∫_{E′} |E_ω[b, P_ω]₁(f₁, f₂)|`.
    pub value: f64,
    pub f1_norm: f64,
    pub f2_norm: f64,
    pub e_measure: f64,
    pub e_prime_measure: f64,
    pub constant: f64,
    pub levels: usize,
    /// `value / (‖f₁‖_p ‖f₂‖_q |E|^{1/r′})`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeReport {
    pub exponents: ExponentTriple,
    pub family: OperatorFamily,
    pub trials: Vec<WeakTrial>,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub median_ratio: f64,
    pub min_e_prime_share: f64,
}

/// The product `Φ₁(f₁)Φ₂(f₂)` whose level sets define the exceptional set.
fn phi_product(
    b: &GridFunction,
    family: &OperatorFamily,
    f1: &GridFunction,
    f2: &GridFunction,
    sampler: &ShiftSampler,
) -> Result<GridFunction> {
    match family {
        OperatorFamily::Full { .. } => {
            let m = maximal(f1, MaximalMode::Strong)?;
            Ok(&m * &aux_phi(f2, AuxKind::FullFirst, sampler)?)
        }
        _ => {
            let l = match family {
                OperatorFamily::Partial { k, .. } => k[1],
                _ => 0,
            };
            let a = aux_phi(f1, AuxKind::PartialFirst { b }, sampler)?;
            Ok(&a * &aux_phi(f2, AuxKind::PartialSecond { l }, sampler)?)
        }
    }
}

/// Restricted weak-type test of `E_ω [b, P_ω]₁` over random `f₁, f₂, E`.
/// The supremum over `|f₃| ≤ 1_{E′}` is attained by cellwise sign
/// alignment, so each trial's value is the `L¹(E′)` norm of the averaged
/// commutator.
pub fn weak_type_verify(
    b: &GridFunction,
    family: &OperatorFamily,
    exponents: ExponentTriple,
    trials: usize,
    sampler: &ShiftSampler,
    seed: u64,
) -> Result<WeakTypeReport> {
    exponents.check_weak()?;
    let mesh = b.mesh();
    let vol = mesh.cell_volume();
    let mut out = Vec::with_capacity(trials);
    for t in 0..trials {
        let mut rng = sample_rng(seed, t);
        let f1 = random_test_function(&mut rng, mesh);
        let f2 = random_test_function(&mut rng, mesh);
        let e = random_set(&mut rng, mesh);
        let op_seed: u64 = rng.gen();
        let g = expectation_over_grids(&mesh, sampler, |k, grids| {
            let op = family.draw(&mut sample_rng(op_seed, k), grids)?;
            commutator(b, &op, 1, &f1, &f2)
        })?;
        let phi = phi_product(b, family, &f1, &f2, sampler)?;
        let rep = exceptional_set(&phi, &e, exponents.r, None)?;
        let value = rep.e_prime.iter().map(|&c| g.values()[c].abs()).sum::<f64>() * vol;
        let f1_norm = lp_norm(&f1, exponents.p, None)?;
        let f2_norm = lp_norm(&f2, exponents.q, None)?;
        let denom = f1_norm * f2_norm * rep.e_measure.powf(1.0 - 1.0 / exponents.r);
        let ratio = if denom > 0.0 { value / denom } else { 0.0 };
        out.push(WeakTrial {
            trial: t,
            value,
            f1_norm,
            f2_norm,
            e_measure: rep.e_measure,
            e_prime_measure: rep.e_prime_measure,
            constant: rep.constant,
            levels: rep.levels.len(),
            ratio,
        });
    }
    let mut ratios: Vec<f64> = out.iter().map(|t| t.ratio).collect();
    ratios.sort_by(f64::total_cmp);
    let n = ratios.len();
    let (max_ratio, mean_ratio, median_ratio) = if n == 0 {
        (0.0, 0.0, 0.0)
    } else {
        let median = if n % 2 == 1 { ratios[n / 2] } else { 0.5 * (ratios[n / 2 - 1] + ratios[n / 2]) };
        (ratios[n - 1], ratios.iter().sum::<f64>() / n as f64, median)
    };
    let min_e_prime_share = out.iter().map(|t| t.e_prime_measure / t.e_measure).fold(1.0, f64::min);
    Ok(WeakTypeReport {
        exponents,
        family: *family,
        trials: out,
        max_ratio,
        mean_ratio,
        median_ratio,
        min_e_prime_share,
    })
}
