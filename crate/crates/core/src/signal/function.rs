use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::dyadic::{Factor, Mesh};
use crate::error::{Error, Result};

/// A function of one factor, constant on mesh cells.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorFunction {
    factor: Factor,
    values: Vec<f64>,
}

impl FactorFunction {
    pub fn zeros(factor: Factor) -> Self {
        Self { factor, values: vec![0.0; factor.len()] }
    }

    pub fn constant(factor: Factor, c: f64) -> Self {
        Self { factor, values: vec![c; factor.len()] }
    }

    pub fn from_values(factor: Factor, values: Vec<f64>) -> Result<Self> {
        if values.len() != factor.len() {
            return Err(Error::MeshMismatch(format!(
                "expected {} values, got {}",
                factor.len(),
                values.len()
            )));
        }
        Ok(Self { factor, values })
    }

    pub fn from_fn(factor: Factor, f: impl FnMut(usize) -> f64) -> Self {
        Self { factor, values: (0..factor.len()).map(f).collect() }
    }

    pub fn factor(&self) -> Factor {
        self.factor
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.factor.cell_volume()
    }

    /// `∫ u v`.
    pub fn pair(&self, other: &FactorFunction) -> Result<f64> {
        if self.factor != other.factor {
            return Err(Error::MeshMismatch("factor functions on different meshes".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum::<f64>() * self.factor.cell_volume())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { factor: self.factor, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// A function on the product torus, constant on mesh cells.
///
/// Values are stored row-major: cell `(x1, x2)` lives at `x1 * N2 + x2`,
/// where `x1` and `x2` are the cell indices of the two factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    mesh: Mesh,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn zeros(mesh: Mesh) -> Self {
        Self { mesh, values: vec![0.0; mesh.len()] }
    }

    pub fn constant(mesh: Mesh, c: f64) -> Self {
        Self { mesh, values: vec![c; mesh.len()] }
    }

    pub fn from_values(mesh: Mesh, values: Vec<f64>) -> Result<Self> {
        if values.len() != mesh.len() {
            return Err(Error::MeshMismatch(format!(
                "expected {} values, got {}",
                mesh.len(),
                values.len()
            )));
        }
        Ok(Self { mesh, values })
    }

    /// `f(x1, x2)` evaluated on factor cell indices.
    pub fn from_fn(mesh: Mesh, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let cols = mesh.cols();
        Self { mesh, values: (0..mesh.len()).map(|i| f(i / cols, i % cols)).collect() }
    }

    /// `g ⊗ u`.
    pub fn tensor(g: &FactorFunction, u: &FactorFunction) -> Result<Self> {
        let mesh = Mesh::from_factors(g.factor(), u.factor())?;
        let mut values = Vec::with_capacity(mesh.len());
        for &a in g.values() {
            values.extend(u.values().iter().map(|&b| a * b));
        }
        Ok(Self { mesh, values })
    }

    /// Indicator of a set of cells (row-major indices).
    pub fn indicator(mesh: Mesh, cells: impl IntoIterator<Item = usize>) -> Self {
        let mut f = Self::zeros(mesh);
        for c in cells {
            f.values[c] = 1.0;
        }
        f
    }

    pub fn mesh(&self) -> Mesh {
        self.mesh
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, x1: usize, x2: usize) -> f64 {
        self.values[x1 * self.mesh.cols() + x2]
    }

    /// The slice `x2 ↦ f(x1, x2)`.
    pub fn row(&self, x1: usize) -> &[f64] {
        let c = self.mesh.cols();
        &self.values[x1 * c..(x1 + 1) * c]
    }

    /// The slice `x1 ↦ f(x1, x2)`.
    pub fn column(&self, x2: usize) -> Vec<f64> {
        let c = self.mesh.cols();
        (0..self.mesh.rows()).map(|x1| self.values[x1 * c + x2]).collect()
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.mesh.cell_volume()
    }

    /// Average over the torus (which has measure 1).
    pub fn mean(&self) -> f64 {
        self.integral()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { mesh: self.mesh, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_map(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_mesh(other)?;
        Ok(Self {
            mesh: self.mesh,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Largest cellwise difference.
    pub fn distance(&self, other: &GridFunction) -> f64 {
        self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Swap the roles of the two factors: `(x1, x2) ↦ f(x2, x1)`.
    pub fn transpose(&self) -> Self {
        let (r, c) = (self.mesh.rows(), self.mesh.cols());
        let mut values = vec![0.0; self.values.len()];
        for x1 in 0..r {
            for x2 in 0..c {
                values[x2 * r + x1] = self.values[x1 * c + x2];
            }
        }
        Self { mesh: self.mesh.transposed(), values }
    }

    pub fn check_mesh(&self, other: &GridFunction) -> Result<()> {
        if self.mesh != other.mesh {
            Err(Error::MeshMismatch(format!("{:?} vs {:?}", self.mesh, other.mesh)))
        } else {
            Ok(())
        }
    }

    fn combine(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.mesh, other.mesh, "grid functions on different meshes");
        Self {
            mesh: self.mesh,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }
}

// Operators panic on mesh mismatch; use `zip_map` for a fallible variant.

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.combine(rhs, |a, b| a + b)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.combine(rhs, |a, b| a - b)
    }
}

/// Pointwise product.
impl Mul for &GridFunction {
    type Output = GridFunction;
    fn mul(self, rhs: &GridFunction) -> GridFunction {
        self.combine(rhs, |a, b| a * b)
    }
}

impl Mul<&GridFunction> for f64 {
    type Output = GridFunction;
    fn mul(self, rhs: &GridFunction) -> GridFunction {
        rhs.scale(self)
    }
}

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.scale(-1.0)
    }
}

impl AddAssign<&GridFunction> for GridFunction {
    fn add_assign(&mut self, rhs: &GridFunction) {
        assert_eq!(self.mesh, rhs.mesh, "grid functions on different meshes");
        for (a, b) in self.values.iter_mut().zip(&rhs.values) {
            *a += b;
        }
    }
}

impl SubAssign<&GridFunction> for GridFunction {
    fn sub_assign(&mut self, rhs: &GridFunction) {
        assert_eq!(self.mesh, rhs.mesh, "grid functions on different meshes");
        for (a, b) in self.values.iter_mut().zip(&rhs.values) {
            *a -= b;
        }
    }
}
