use serde::{Deserialize, Serialize};

use crate::dyadic::{Axis, GridPair, GridShift, Mesh, Profile};
use crate::error::{Error, Result};

/// Which family a coefficient field belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    /// Shift structure on `shift_axis`, paraproduct structure on the other
    /// axis. `zero_slot` carries `h⁰` on the shift side, `haar_slot` the
    /// cancellative Haar function on the paraproduct side. Slots are 0, 1, 2
    /// for `f₁`, `f₂`, `f₃`.
    Partial { shift_axis: Axis, zero_slot: u8, haar_slot: u8 },
    /// Zero complexity; the first-axis Haar function sits in `first_slot`,
    /// the second-axis one in `second_slot`, averages elsewhere.
    Full { first_slot: u8, second_slot: u8 },
    /// Haar type tags per slot on both axes.
    Shift,
}

impl OperatorKind {
    pub fn transposed(self) -> Self {
        match self {
            OperatorKind::Partial { shift_axis, zero_slot, haar_slot } => {
                OperatorKind::Partial { shift_axis: shift_axis.other(), zero_slot, haar_slot }
            }
            OperatorKind::Full { first_slot, second_slot } => {
                OperatorKind::Full { first_slot: second_slot, second_slot: first_slot }
            }
            OperatorKind::Shift => OperatorKind::Shift,
        }
    }
}

/// Complexities and slot profiles of a model operator.
///
/// Entry tuples are `(K, I₁, I₂, I₃)` on the first axis with `Iₛ^(k[s]) = K`,
/// and `(V, J₁, J₂, J₃)` on the second with `Jₛ^(v[s]) = V`. Slot `s` pairs
/// `f_{s+1}` with `first[s](Iₛ) ⊗ second[s](Jₛ)`; the output is synthesized
/// from slot 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Shape {
    pub k: [u8; 3],
    pub v: [u8; 3],
    pub first: [Profile; 3],
    pub second: [Profile; 3],
}

impl Shape {
    /// A partial paraproduct with shift structure on the first axis.
    pub fn partial(k: [u8; 3], zero_slot: u8, haar_slot: u8) -> Result<Self> {
        check_slot(zero_slot)?;
        check_slot(haar_slot)?;
        let mut first = [Profile::Haar(1); 3];
        first[zero_slot as usize] = Profile::HaarZero;
        let mut second = [Profile::Average; 3];
        second[haar_slot as usize] = Profile::Haar(1);
        Ok(Self { k, v: [0; 3], first, second })
    }

    pub fn full(first_slot: u8, second_slot: u8) -> Result<Self> {
        check_slot(first_slot)?;
        check_slot(second_slot)?;
        let mut first = [Profile::Average; 3];
        first[first_slot as usize] = Profile::Haar(1);
        let mut second = [Profile::Average; 3];
        second[second_slot as usize] = Profile::Haar(1);
        Ok(Self { k: [0; 3], v: [0; 3], first, second })
    }

    /// All slots cancellative.
    pub fn shift(k: [u8; 3], v: [u8; 3]) -> Self {
        Self { k, v, first: [Profile::Haar(1); 3], second: [Profile::Haar(1); 3] }
    }

    pub fn transposed(&self) -> Self {
        Self { k: self.v, v: self.k, first: self.second, second: self.first }
    }

    pub fn complexity(&self, axis: Axis) -> [u8; 3] {
        match axis {
            Axis::First => self.k,
            Axis::Second => self.v,
        }
    }

    pub fn profiles(&self, axis: Axis) -> [Profile; 3] {
        match axis {
            Axis::First => self.first,
            Axis::Second => self.second,
        }
    }
}

fn check_slot(s: u8) -> Result<()> {
    if s > 2 {
        return Err(Error::InvalidArgument(format!("slot {s} is not one of 0, 1, 2")));
    }
    Ok(())
}

/// One coefficient: first-axis tuple, second-axis tuple, value. Tuples hold
/// cube ids of the operator's grids.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub first: [u32; 4],
    pub second: [u32; 4],
    pub value: f64,
}

impl Entry {
    pub fn transposed(&self) -> Self {
        Self { first: self.second, second: self.first, value: self.value }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: Option<u64>,
    pub density: Option<f64>,
    pub normalization: String,
    /// Constraint norm recomputed after normalization (for full paraproducts
    /// the family-relative lower bound).
    pub achieved: Option<f64>,
}

impl Provenance {
    pub fn manual() -> Self {
        Self { seed: None, density: None, normalization: "none".into(), achieved: None }
    }
}

/// Grid, complexity and type of a field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub kind: OperatorKind,
    pub mesh: Mesh,
    pub shifts: [GridShift; 2],
    pub shape: Shape,
}

/// Finitely supported coefficients of a model operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub header: FieldHeader,
    pub provenance: Provenance,
    pub entries: Vec<Entry>,
}

impl CoefficientField {
    pub fn empty(kind: OperatorKind, grids: &GridPair, shape: Shape) -> Self {
        Self {
            header: FieldHeader {
                kind,
                mesh: grids.mesh(),
                shifts: [grids.first.shift().clone(), grids.second.shift().clone()],
                shape,
            },
            provenance: Provenance::manual(),
            entries: Vec::new(),
        }
    }

    pub fn with_entries(mut self, entries: Vec<Entry>) -> Self {
        self.entries = entries;
        self
    }

    pub fn push(&mut self, first: [usize; 4], second: [usize; 4], value: f64) {
        let c = |t: [usize; 4]| t.map(|x| x as u32);
        self.entries.push(Entry { first: c(first), second: c(second), value });
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn grids(&self) -> Result<GridPair> {
        let [a, b] = self.header.shifts.clone();
        GridPair::shifted(a, b)
    }

    pub fn transposed(&self) -> Self {
        let h = &self.header;
        let shifts = [
            GridShift::from_bits(Axis::First, h.shifts[1].factor(), h.shifts[1].bits().to_vec()).unwrap(),
            GridShift::from_bits(Axis::Second, h.shifts[0].factor(), h.shifts[0].bits().to_vec()).unwrap(),
        ];
        Self {
            header: FieldHeader {
                kind: h.kind.transposed(),
                mesh: h.mesh.transposed(),
                shifts,
                shape: h.shape.transposed(),
            },
            provenance: self.provenance.clone(),
            entries: self.entries.iter().map(Entry::transposed).collect(),
        }
    }

    pub fn scale(&mut self, c: f64) {
        for e in &mut self.entries {
            e.value *= c;
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}
