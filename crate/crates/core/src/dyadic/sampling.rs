use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::factor::{Axis, Factor};
use super::grid::{DyadicGrid, GridShift};
use super::mesh::Mesh;
use crate::error::{Error, Result};

/// Largest number of grids an enumerating sampler may produce.
const MAX_ENUMERATION_LOG2: u32 = 20;

/// How the expectation over random grids is realized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShiftSampler {
    /// `samples` independent shifts; sample `k` is drawn from its own
    /// ChaCha stream so results do not depend on evaluation order.
    MonteCarlo { samples: usize, seed: u64 },
    /// Every distinct shifted grid once (scale-1 bits are inert and fixed to 0).
    Exact,
    /// Every raw bit pattern, scale 1 included.
    AllBits,
}

impl ShiftSampler {
    pub fn monte_carlo(samples: usize, seed: u64) -> Self {
        ShiftSampler::MonteCarlo { samples, seed }
    }

    /// Shifts of both factors, one pair per sample.
    pub fn pairs(&self, mesh: &Mesh) -> Result<Vec<(GridShift, GridShift)>> {
        match *self {
            ShiftSampler::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(Error::NoSamples);
                }
                Ok((0..samples)
                    .map(|k| {
                        let mut rng = sample_rng(seed, k);
                        let a = GridShift::sample(&mut rng, Axis::First, mesh.first());
                        let b = GridShift::sample(&mut rng, Axis::Second, mesh.second());
                        (a, b)
                    })
                    .collect())
            }
            _ => {
                let a = self.axis_shifts(mesh, Axis::First)?;
                let b = self.axis_shifts(mesh, Axis::Second)?;
                check_size((a.len() * b.len()) as u64)?;
                let mut out = Vec::with_capacity(a.len() * b.len());
                for x in &a {
                    for y in &b {
                        out.push((x.clone(), y.clone()));
                    }
                }
                Ok(out)
            }
        }
    }

    /// Shifts of one factor. For Monte-Carlo sampling these are the
    /// corresponding components of [`ShiftSampler::pairs`].
    pub fn axis_shifts(&self, mesh: &Mesh, axis: Axis) -> Result<Vec<GridShift>> {
        let factor = mesh.factor(axis);
        match *self {
            ShiftSampler::MonteCarlo { .. } => Ok(self
                .pairs(mesh)?
                .into_iter()
                .map(|(a, b)| if axis == Axis::First { a } else { b })
                .collect()),
            ShiftSampler::Exact => enumerate(axis, factor, true),
            ShiftSampler::AllBits => enumerate(axis, factor, false),
        }
    }

    pub fn axis_grids(&self, mesh: &Mesh, axis: Axis) -> Result<Vec<DyadicGrid>> {
        Ok(self.axis_shifts(mesh, axis)?.into_iter().map(DyadicGrid::shifted).collect())
    }
}

/// Random source of Monte-Carlo sample `k`.
pub fn sample_rng(seed: u64, k: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    rng
}

fn check_size(count: u64) -> Result<()> {
    if count > 1u64 << MAX_ENUMERATION_LOG2 {
        Err(Error::Resolution(format!(
            "exact enumeration of {count} grids exceeds 2^{MAX_ENUMERATION_LOG2}"
        )))
    } else {
        Ok(())
    }
}

fn enumerate(axis: Axis, factor: Factor, canonical: bool) -> Result<Vec<GridShift>> {
    let d = factor.dim() as u32;
    let l = factor.level() as u32;
    let free = if canonical { l - 1 } else { l };
    if d * free > MAX_ENUMERATION_LOG2 {
        return Err(Error::Resolution(format!(
            "exact enumeration of 2^{} grids exceeds 2^{MAX_ENUMERATION_LOG2}",
            d * free
        )));
    }
    let mask = (1u64 << d) - 1;
    (0..1u64 << (d * free))
        .map(|code| {
            let mut bits = vec![0u8; l as usize];
            for t in 0..free as usize {
                let scale = if canonical { t + 1 } else { t };
                bits[scale] = ((code >> (d as usize * t)) & mask) as u8;
            }
            GridShift::from_bits(axis, factor, bits)
        })
        .collect()
}
