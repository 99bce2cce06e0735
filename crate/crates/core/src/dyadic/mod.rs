//! Dyadic grids on the torus `[0,1)^d`, random shifts and Haar indexing.
//!
//! A grid of resolution `L` holds the cubes of side `2^-j`, `0 ≤ j ≤ L`.
//! Shifted grids translate level-`j` cubes by `Σ_{i>j} 2^-i ω^i`, so every
//! shifted grid is nested and aligned with the `2^-L` mesh. Cubes may wrap
//! around the torus.

mod cube;
mod factor;
mod grid;
mod haar;
mod mesh;
mod sampling;

pub use cube::{DyadicCube, DyadicRectangle};
pub use factor::{Axis, Factor, MAX_LEVEL};
pub use grid::{enumerate_cubes, shift_cube, DyadicGrid, GridShift};
pub use haar::{profile_values, HaarIndex, Profile};
pub use mesh::{GridPair, Mesh};
pub use sampling::{sample_rng, ShiftSampler};

#[cfg(test)]
mod tests;
