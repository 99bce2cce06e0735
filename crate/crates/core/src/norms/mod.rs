//! Lebesgue and weighted norms, BMO-type norms, `A_p` characteristics and
//! random generators for symbols and weights.
//!
//! Product BMO cannot be computed exactly: its supremum runs over arbitrary
//! open sets. [`ProductBmoEstimate`] reports a lower bound over an explicit
//! family of sets together with the upper bound `‖S_a‖_∞`.

mod ap;
mod bmo;
mod generate;
mod sequence;

pub use ap::{ap_characteristic, factor_ap_characteristic, ApMode, Weight};
pub use bmo::{bmo_norm, factor_bmo_norm, BmoMode};
pub use generate::{generate_bmo_function, generate_weight};
pub use sequence::{
    cube_sequence_bmo, product_bmo_estimate, rectangle_sequence_bmo, OmegaFamily, ProductBmoEstimate,
    RectangleSequence,
};

use crate::error::{Error, Result};
use crate::signal::GridFunction;

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        Err(Error::Exponent(format!("exponent {p} is not positive")))
    } else {
        Ok(())
    }
}

/// `(∫ |f|^p w)^{1/p}`, or the maximum of `|f|` for `p = ∞`. Quasi-norms
/// (`p < 1`) are allowed.
pub fn lp_norm(f: &GridFunction, p: f64, weight: Option<&Weight>) -> Result<f64> {
    check_exponent(p)?;
    if let Some(w) = weight {
        f.check_mesh(w.function())?;
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let vol = f.mesh().cell_volume();
    let s: f64 = match weight {
        None => f.values().iter().map(|x| x.abs().powf(p)).sum(),
        Some(w) => f.values().iter().zip(w.function().values()).map(|(x, w)| x.abs().powf(p) * w).sum(),
    };
    Ok((s * vol).powf(1.0 / p))
}

#[cfg(test)]
mod tests;
