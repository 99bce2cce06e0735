use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::commutators::ExponentTriple;
use crate::dyadic::{Mesh, ShiftSampler};
use crate::error::{Error, Result};

/// An exponent kept as an exact rational until the Hölder relation has been
/// checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exponent(pub Ratio<i64>);

impl Exponent {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self(Ratio::new(num, den)))
    }

    pub fn value(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl FromStr for Exponent {
    type Err = Error;

    /// Accepts `a`, `a/b` and terminating decimals such as `1.5`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("`{s}` is not a rational exponent"));
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let den = 10i64.pow(frac.len() as u32);
            let digits: i64 = format!("{int}{frac}").parse().map_err(|_| bad())?;
            return Exponent::new(digits, den);
        }
        let r = Ratio::<i64>::from_str(s).map_err(|_| bad())?;
        Ok(Self(r))
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self.0.denom() == 1 {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        let text = match Raw::deserialize(d)? {
            Raw::Int(i) => i.to_string(),
            Raw::Float(x) => format!("{x}"),
            Raw::Text(s) => s,
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Checks `1/p + 1/q = 1/r` exactly, then once more in floating point.
pub fn exponent_triple(p: Exponent, q: Exponent, r: Exponent) -> Result<ExponentTriple> {
    let zero = Ratio::from_integer(0);
    if p.0 <= zero || q.0 <= zero || r.0 <= zero {
        return Err(Error::Exponent("exponents must be positive".into()));
    }
    if p.0.recip() + q.0.recip() != r.0.recip() {
        return Err(Error::Exponent(format!("1/{p} + 1/{q} ≠ 1/{r}")));
    }
    ExponentTriple::new(p.value(), q.value(), r.value())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Identities,
    Measures,
    Norms,
    Duality,
    WeakType,
    ComplexitySweep,
    Synthesis,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Identities => "identities",
            Experiment::Measures => "measures",
            Experiment::Norms => "norms",
            Experiment::Duality => "duality",
            Experiment::WeakType => "weak-type",
            Experiment::ComplexitySweep => "complexity-sweep",
            Experiment::Synthesis => "synthesis",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub experiment: Experiment,
    #[serde(rename = "L")]
    pub level: u8,
    pub n: u8,
    pub m: u8,
    pub seed: u64,
    pub trials: usize,
    pub shifts: usize,
    pub p: Exponent,
    pub q: Exponent,
    pub r: Exponent,
    pub k: [u8; 3],
    pub v: [u8; 3],
    pub kmax: u8,
    pub exact_expectation: bool,
    /// Extra resolutions for the norm and duality experiments; empty means
    /// `L` alone.
    pub levels: Vec<u8>,
    /// Collection sizes for the duality experiment.
    pub sizes: Vec<usize>,
    /// Kernel exponent of the synthesis experiment.
    pub alpha: f64,
    pub density: f64,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            experiment: Experiment::Identities,
            level: 5,
            n: 1,
            m: 1,
            seed: 0,
            trials: 50,
            shifts: 64,
            p: Exponent::new(4, 3).unwrap(),
            q: Exponent::new(4, 3).unwrap(),
            r: Exponent::new(2, 3).unwrap(),
            k: [1, 0, 1],
            v: [0, 0, 0],
            kmax: 3,
            exact_expectation: false,
            levels: Vec::new(),
            sizes: vec![10, 100, 1000],
            alpha: 1.0,
            density: 1.0,
        }
    }
}

impl Config {
    pub fn mesh(&self) -> Result<Mesh> {
        Mesh::new(self.n, self.m, self.level)
    }

    pub fn mesh_at(&self, level: u8) -> Result<Mesh> {
        Mesh::new(self.n, self.m, level)
    }

    pub fn levels(&self) -> Vec<u8> {
        if self.levels.is_empty() {
            vec![self.level]
        } else {
            self.levels.clone()
        }
    }

    pub fn exponents(&self) -> Result<ExponentTriple> {
        exponent_triple(self.p, self.q, self.r)
    }

    /// Enumerated grids with `exact_expectation`, otherwise `shifts`
    /// Monte-Carlo samples on a stream derived from the seed.
    pub fn sampler(&self) -> ShiftSampler {
        if self.exact_expectation {
            ShiftSampler::Exact
        } else {
            ShiftSampler::monte_carlo(self.shifts, self.seed ^ 0x5eed_0f_9d1d5)
        }
    }

    pub fn validate(&self) -> Result<()> {
        for l in self.levels() {
            self.mesh_at(l)?;
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        if !self.exact_expectation && self.shifts == 0 {
            return Err(Error::NoSamples);
        }
        if !(0.0..=1.0).contains(&self.density) {
            return Err(Error::InvalidArgument(format!("density {} is not in [0, 1]", self.density)));
        }
        if !(self.alpha > 0.0) {
            return Err(Error::InvalidArgument(format!("kernel exponent {} is not positive", self.alpha)));
        }
        Ok(())
    }
}
