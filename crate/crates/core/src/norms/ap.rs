use std::collections::HashMap;
use std::sync::Mutex;

use crate::analysis::Windows;
use crate::dyadic::Axis;
use crate::error::{Error, Result};
use crate::signal::{FactorFunction, GridFunction};

/// Which `A_p` class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ApMode {
    /// Intervals in one variable, uniformly over the other.
    OneParameter(Axis),
    /// All mesh-aligned rectangles.
    BiParameter,
}

/// A strictly positive weight with cached `A_p` characteristics.
#[derive(Debug)]
pub struct Weight {
    w: GridFunction,
    cache: Mutex<HashMap<(u64, ApMode), f64>>,
}

impl Clone for Weight {
    fn clone(&self) -> Self {
        let cache = self.cache.lock().expect("weight cache").clone();
        Self { w: self.w.clone(), cache: Mutex::new(cache) }
    }
}

impl Weight {
    pub fn new(w: GridFunction) -> Result<Self> {
        if !w.values().iter().all(|&x| x > 0.0 && x.is_finite()) {
            return Err(Error::InvalidArgument("weights must be finite and strictly positive".into()));
        }
        Ok(Self { w, cache: Mutex::new(HashMap::new()) })
    }

    pub fn unit(mesh: crate::dyadic::Mesh) -> Self {
        Self::new(GridFunction::constant(mesh, 1.0)).unwrap()
    }

    pub fn function(&self) -> &GridFunction {
        &self.w
    }

    /// `[w]_{A_p}`, computed once per `(p, mode)`.
    pub fn characteristic(&self, p: f64, mode: ApMode) -> Result<f64> {
        check_p(p)?;
        let key = (p.to_bits(), mode);
        if let Some(&v) = self.cache.lock().expect("weight cache").get(&key) {
            return Ok(v);
        }
        let v = compute(&self.w, p, mode);
        self.cache.lock().expect("weight cache").insert(key, v);
        Ok(v)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p <= 1.0 || p.is_infinite() {
        Err(Error::Exponent(format!("A_p needs 1 < p < ∞, got {p}")))
    } else {
        Ok(())
    }
}

/// `sup_R ⟨w⟩_R ⟨w^{1−p'}⟩_R^{p−1}` over the family of `mode`.
pub fn ap_characteristic(w: &Weight, p: f64, mode: ApMode) -> Result<f64> {
    w.characteristic(p, mode)
}

/// One-parameter characteristic of a weight on one factor, over every
/// mesh-aligned cube.
pub fn factor_ap_characteristic(w: &FactorFunction, p: f64) -> Result<f64> {
    check_p(p)?;
    if !w.values().iter().all(|&x| x > 0.0) {
        return Err(Error::InvalidArgument("weights must be strictly positive".into()));
    }
    let win = Windows::new(w.factor());
    Ok(slice_characteristic(&win, w.values(), p))
}

fn dual(v: &[f64], p: f64) -> Vec<f64> {
    let e = -1.0 / (p - 1.0);
    v.iter().map(|x| x.powf(e)).collect()
}

fn slice_characteristic(win: &Windows, w: &[f64], p: f64) -> f64 {
    let sigma = dual(w, p);
    let (a, b) = (win.sums(w), win.sums(&sigma));
    let n = win.sides();
    let mut best = 0.0f64;
    for (k, (x, y)) in a.iter().zip(&b).enumerate() {
        let vol = win.volume(k % n + 1) as f64;
        best = best.max((x / vol) * (y / vol).powf(p - 1.0));
    }
    best
}

fn compute(w: &GridFunction, p: f64, mode: ApMode) -> f64 {
    let m = w.mesh();
    match mode {
        ApMode::OneParameter(axis) => {
            let win = Windows::new(m.factor(axis));
            let slices: Vec<Vec<f64>> = match axis {
                Axis::First => (0..m.cols()).map(|x2| w.column(x2)).collect(),
                Axis::Second => (0..m.rows()).map(|x1| w.row(x1).to_vec()).collect(),
            };
            slices.iter().map(|s| slice_characteristic(&win, s, p)).fold(0.0, f64::max)
        }
        ApMode::BiParameter => {
            let w1 = Windows::new(m.first());
            let w2 = Windows::new(m.second());
            let sigma = GridFunction::from_values(m, dual(w.values(), p)).expect("same mesh");
            let mut best = 0.0f64;
            for a1 in 0..w1.starts() {
                let x = crate::analysis::rectangle_averages(w, &w1, &w2, a1);
                let y = crate::analysis::rectangle_averages(&sigma, &w1, &w2, a1);
                for (u, v) in x.iter().zip(&y) {
                    best = best.max(u * v.powf(p - 1.0));
                }
            }
            best
        }
    }
}
