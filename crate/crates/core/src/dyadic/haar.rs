use serde::{Deserialize, Serialize};

use super::cube::DyadicCube;
use crate::error::{Error, Result};

/// One-factor building block attached to a cube.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Profile {
    /// Cancellative Haar function `h_Q^η`, `η ≠ 0`.
    Haar(u8),
    /// Non-cancellative `h_Q^0 = |Q|^{-1/2} 1_Q`.
    HaarZero,
    /// Normalized indicator `1_Q / |Q|`.
    Average,
}

impl Profile {
    pub fn is_cancellative(self) -> bool {
        matches!(self, Profile::Haar(_))
    }

    /// Whether the function exists on a cube at `level` of a factor with
    /// resolution `resolution`.
    pub fn defined_at(self, level: u8, resolution: u8) -> bool {
        match self {
            Profile::Haar(_) => level < resolution,
            _ => true,
        }
    }

    /// Absolute value of the function on its support.
    pub fn amplitude(self, cube_measure: f64) -> f64 {
        match self {
            Profile::Haar(_) | Profile::HaarZero => cube_measure.sqrt().recip(),
            Profile::Average => cube_measure.recip(),
        }
    }

    /// Sign on child block `k` of the cube.
    pub fn sign(self, k: usize) -> f64 {
        match self {
            Profile::Haar(eta) => {
                if (eta as usize & k).count_ones() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            _ => 1.0,
        }
    }

    /// The cancellative profiles of a `dim`-dimensional factor.
    pub fn cancellative(dim: u8) -> impl Iterator<Item = Profile> {
        (1u8..(1 << dim)).map(Profile::Haar)
    }
}

/// A Haar function `h_Q^η`: `η = 0` is the non-cancellative `h^0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HaarIndex {
    cube: DyadicCube,
    eta: u8,
}

impl HaarIndex {
    pub fn new(cube: DyadicCube, eta: u8) -> Result<Self> {
        let d = cube.factor().dim();
        if eta >= 1 << d {
            return Err(Error::InvalidArgument(format!("sign pattern {eta} needs more than {d} bits")));
        }
        if eta != 0 && cube.is_finest() {
            return Err(Error::Resolution(format!(
                "cancellative Haar function on finest-level cube {cube}"
            )));
        }
        Ok(Self { cube, eta })
    }

    pub fn cube(&self) -> &DyadicCube {
        &self.cube
    }

    pub fn eta(&self) -> u8 {
        self.eta
    }

    pub fn is_cancellative(&self) -> bool {
        self.eta != 0
    }

    pub fn profile(&self) -> Profile {
        if self.eta == 0 {
            Profile::HaarZero
        } else {
            Profile::Haar(self.eta)
        }
    }

    /// Values on the factor mesh.
    pub fn values(&self) -> Vec<f64> {
        profile_values(&self.cube, self.profile())
    }
}

/// Values of `profile` on `cube` over the whole factor mesh.
pub fn profile_values(cube: &DyadicCube, profile: Profile) -> Vec<f64> {
    let f = cube.factor();
    let mut v = vec![0.0; f.len()];
    let amp = profile.amplitude(cube.measure());
    let cells = cube.cells();
    let block = if cube.is_finest() { 1 } else { cells.len() >> f.dim() };
    for (p, &c) in cells.iter().enumerate() {
        v[c] = amp * profile.sign(p / block);
    }
    v
}
