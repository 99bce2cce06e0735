//! Grid functions, pairings and the martingale-difference calculus.
//!
//! A [`GridFunction`] is constant on the cells of a [`Mesh`](crate::dyadic::Mesh);
//! every pairing below is an exact finite sum. Each `Δ` projection sums over
//! all cancellative sign patterns of its cube.

mod function;
pub mod io;
mod martingale;
mod pairing;
mod transform;

pub use function::{FactorFunction, GridFunction};
pub use martingale::{
    delta, expectation, factor_block, local_projection, martingale_block, martingale_difference, LocalOp,
    Martingale,
};
pub use pairing::{
    axis_average, cube_average, haar_pair, pair, partial_pair, partial_profile_pair, profile_pair, profile_support,
};
pub(crate) use transform::{id_measures, parent_ids};
pub use transform::{
    axis_coefficients, axis_synthesis, cube_sums, factor_coefficients, factor_synthesis, pairing_table,
    synthesize_table, Table,
};

#[cfg(test)]
mod tests;
