use rand::Rng;
use rand_distr::StandardNormal;

use crate::dyadic::{GridPair, Mesh, Profile};
use crate::error::{Error, Result};
use crate::signal::{id_measures, synthesize_table, GridFunction, Table};

use super::ap::Weight;
use super::bmo::{bmo_norm, BmoMode};

const MAX_DRAWS: usize = 16;

/// A random symbol with Haar coefficients `N(0,1)·|R|^{1/2}` on the standard
/// grids (one-variable terms `h_I ⊗ 1` and `1 ⊗ h_J` included, no constant
/// term), rescaled so that `bmo_norm(·, mode) = target`.
pub fn generate_bmo_function<R: Rng + ?Sized>(rng: &mut R, mesh: Mesh, target: f64, mode: BmoMode) -> Result<GridFunction> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::InvalidArgument(format!("target norm {target} is not positive")));
    }
    let grids = GridPair::standard(&mesh);
    for _ in 0..MAX_DRAWS {
        let b = draw(rng, &grids);
        let norm = bmo_norm(&b, mode)?;
        if norm > 1e-12 {
            return Ok(b.scale(target / norm));
        }
    }
    Err(Error::InvalidArgument("every draw of the symbol was degenerate".into()))
}

fn draw<R: Rng + ?Sized>(rng: &mut R, grids: &GridPair) -> GridFunction {
    let (g1, g2) = (&grids.first, &grids.second);
    let (m1, m2) = (id_measures(g1), id_measures(g2));
    let mut out = GridFunction::zeros(grids.mesh());
    let mut gauss = |scale: f64| -> f64 { rng.sample::<f64, _>(StandardNormal) * scale };
    for p1 in Profile::cancellative(g1.factor().dim()) {
        for p2 in Profile::cancellative(g2.factor().dim()) {
            let mut t = Table::zeros(m1.len(), m2.len());
            for i in g1.coarse_ids() {
                for j in g2.coarse_ids() {
                    t.set(i, j, gauss((m1[i] * m2[j]).sqrt()));
                }
            }
            out += &synthesize_table(&t, grids, p1, p2);
        }
        // h_I ⊗ 1: the top second-axis cube with the non-cancellative profile.
        let mut t = Table::zeros(m1.len(), m2.len());
        for i in g1.coarse_ids() {
            t.set(i, 0, gauss(m1[i].sqrt()));
        }
        out += &synthesize_table(&t, grids, p1, Profile::HaarZero);
    }
    for p2 in Profile::cancellative(g2.factor().dim()) {
        let mut t = Table::zeros(m1.len(), m2.len());
        for j in g2.coarse_ids() {
            t.set(0, j, gauss(m2[j].sqrt()));
        }
        out += &synthesize_table(&t, grids, Profile::HaarZero, p2);
    }
    out
}

/// `w = exp(λ b)` with `b` a generated symbol of unit dyadic little BMO norm.
pub fn generate_weight<R: Rng + ?Sized>(rng: &mut R, mesh: Mesh, lambda: f64) -> Result<Weight> {
    if !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("weight strength {lambda} is not finite")));
    }
    let grids = GridPair::standard(&mesh);
    let b = generate_bmo_function(rng, mesh, 1.0, BmoMode::Dyadic(&grids))?;
    Weight::new(b.map(|x| (lambda * x).exp()))
}
