//! Bilinear bi-parameter model operators: partial paraproducts, full
//! paraproducts and dyadic shifts.
//!
//! Every operator is stored as a [`CoefficientField`] over index tuples and
//! evaluated through pairing tables, so applying an operator costs one Haar
//! transform per input plus one pass over the coefficients.

mod field;
mod generate;

pub use field::{CoefficientField, Entry, FieldHeader, OperatorKind, Provenance, Shape};
pub use generate::{generate_full_coeffs, generate_partial_coeffs, generate_shift_coeffs};

use std::collections::HashMap;
use std::ops::Deref;

use crate::dyadic::{Axis, DyadicGrid, GridPair, Profile};
use crate::error::{Error, Result};
use crate::norms::{rectangle_sequence_bmo, cube_sequence_bmo, OmegaFamily, RectangleSequence};
use crate::signal::{id_measures, pairing_table, synthesize_table, GridFunction, Table};

const AUDIT_SLACK: f64 = 1e-9;

/// A model operator: grids plus a validated coefficient field.
#[derive(Clone, Debug)]
pub struct ModelOperator {
    grids: GridPair,
    field: CoefficientField,
}

impl ModelOperator {
    pub fn new(field: CoefficientField) -> Result<Self> {
        let grids = field.grids()?;
        Self::on_grids(&grids, field)
    }

    /// Like [`ModelOperator::new`] but reuses already built grids, which must
    /// match the field header.
    pub fn on_grids(grids: &GridPair, field: CoefficientField) -> Result<Self> {
        let h = &field.header;
        if h.mesh != grids.mesh() {
            return Err(Error::MeshMismatch("field header and grid pair disagree on the mesh".into()));
        }
        if &h.shifts[0] != grids.first.shift() || &h.shifts[1] != grids.second.shift() {
            return Err(Error::InvalidArgument("field header and grid pair disagree on the shifts".into()));
        }
        let op = Self { grids: grids.clone(), field };
        op.validate()?;
        Ok(op)
    }

    pub fn grids(&self) -> &GridPair {
        &self.grids
    }

    pub fn field(&self) -> &CoefficientField {
        &self.field
    }

    pub fn kind(&self) -> OperatorKind {
        self.field.header.kind
    }

    pub fn shape(&self) -> Shape {
        self.field.header.shape
    }

    pub fn entries(&self) -> &[Entry] {
        &self.field.entries
    }

    /// `T(f₁, f₂)`.
    pub fn apply(&self, f1: &GridFunction, f2: &GridFunction) -> Result<GridFunction> {
        self.apply_with(f1, f2, |_| 1.0)
    }

    /// `T` with every coefficient multiplied by `weight(entry)`.
    pub fn apply_with(
        &self,
        f1: &GridFunction,
        f2: &GridFunction,
        weight: impl Fn(&Entry) -> f64,
    ) -> Result<GridFunction> {
        let s = self.shape();
        let t1 = pairing_table(f1, &self.grids, s.first[0], s.second[0])?;
        let t2 = pairing_table(f2, &self.grids, s.first[1], s.second[1])?;
        let mut out = Table::zeros(self.grids.first.cube_count(), self.grids.second.cube_count());
        for e in self.entries() {
            let (i, j) = (e.first.map(|x| x as usize), e.second.map(|x| x as usize));
            let c = e.value * weight(e) * t1.get(i[1], j[1]) * t2.get(i[2], j[2]);
            out.add(i[3], j[3], c);
        }
        Ok(synthesize_table(&out, &self.grids, s.first[2], s.second[2]))
    }

    /// `⟨T(f₁, f₂), f₃⟩` summed directly over the coefficients.
    pub fn trilinear(&self, f1: &GridFunction, f2: &GridFunction, f3: &GridFunction) -> Result<f64> {
        self.trilinear_with(f1, f2, f3, |_| 1.0)
    }

    pub fn trilinear_with(
        &self,
        f1: &GridFunction,
        f2: &GridFunction,
        f3: &GridFunction,
        weight: impl Fn(&Entry) -> f64,
    ) -> Result<f64> {
        let s = self.shape();
        let t: Vec<Table> = [f1, f2, f3]
            .iter()
            .enumerate()
            .map(|(k, f)| pairing_table(f, &self.grids, s.first[k], s.second[k]))
            .collect::<Result<_>>()?;
        Ok(self
            .entries()
            .iter()
            .map(|e| {
                let (i, j) = (e.first.map(|x| x as usize), e.second.map(|x| x as usize));
                e.value * weight(e) * t[0].get(i[1], j[1]) * t[1].get(i[2], j[2]) * t[2].get(i[3], j[3])
            })
            .sum())
    }

    /// The same operator with the factors exchanged.
    pub fn transposed(&self) -> Self {
        Self { grids: self.grids.transposed(), field: self.field.transposed() }
    }

    /// `c T`. Skips the normalization audit, so `c` may exceed 1.
    pub fn scaled(&self, c: f64) -> Self {
        let mut field = self.field.clone();
        field.scale(c);
        Self { grids: self.grids.clone(), field }
    }

    fn validate(&self) -> Result<()> {
        let s = self.shape();
        for e in self.entries() {
            check_tuple(&self.grids.first, e.first, s.k, s.first)?;
            check_tuple(&self.grids.second, e.second, s.v, s.second)?;
            if !e.value.is_finite() {
                return Err(Error::InvalidArgument("coefficient is not finite".into()));
            }
        }
        match self.kind() {
            OperatorKind::Partial { shift_axis, zero_slot, haar_slot } => {
                let expect = Shape::partial(s.complexity(shift_axis), zero_slot, haar_slot)?;
                let expect = if shift_axis == Axis::First { expect } else { expect.transposed() };
                if expect != s {
                    return Err(Error::InvalidArgument("shape does not match the partial paraproduct type".into()));
                }
                audit_partial(&self.grids, &self.field).map(|_| ())
            }
            OperatorKind::Full { first_slot, second_slot } => {
                if Shape::full(first_slot, second_slot)? != s {
                    return Err(Error::InvalidArgument("shape does not match the full paraproduct form".into()));
                }
                let lower = audit_full(&self.grids, &self.field)?;
                if lower > 1.0 + AUDIT_SLACK {
                    return Err(Error::InvalidArgument(format!(
                        "product-BMO lower bound {lower} exceeds 1"
                    )));
                }
                Ok(())
            }
            OperatorKind::Shift => {
                for axis in [Axis::First, Axis::Second] {
                    if !s.profiles(axis).iter().any(|p| p.is_cancellative()) {
                        return Err(Error::InvalidArgument(format!("no cancellative slot on {axis:?} axis")));
                    }
                }
                audit_shift(&self.grids, &self.field).map(|_| ())
            }
        }
    }
}

fn check_tuple(grid: &DyadicGrid, t: [u32; 4], c: [u8; 3], p: [Profile; 3]) -> Result<()> {
    let count = grid.cube_count();
    if t.iter().any(|&x| x as usize >= count) {
        return Err(Error::NotInGrid(format!("id tuple {t:?}")));
    }
    let k = t[0] as usize;
    let lk = grid.level_of(k);
    for s in 0..3 {
        let id = t[s + 1] as usize;
        let l = grid.level_of(id);
        if l != lk + c[s] || grid.ancestor_id(id, c[s]) != k {
            return Err(Error::InvalidArgument(format!(
                "cube {id} is not a depth-{} descendant of {k}",
                c[s]
            )));
        }
        if !p[s].defined_at(l, grid.resolution()) {
            return Err(Error::Resolution(format!("{:?} is undefined on cube {id}", p[s])));
        }
    }
    Ok(())
}

/// All admissible tuples `(K, I₁, I₂, I₃)` for complexities `c` and slot
/// profiles `p`.
pub fn admissible_tuples(grid: &DyadicGrid, c: [u8; 3], p: [Profile; 3]) -> Vec<[usize; 4]> {
    let l = grid.resolution();
    let mut out = Vec::new();
    for k in 0..grid.cube_count() {
        let j = grid.level_of(k);
        let ok = (0..3).all(|s| {
            let t = j as u32 + c[s] as u32;
            t <= l as u32 && p[s].defined_at(t as u8, l)
        });
        if !ok {
            continue;
        }
        let d: Vec<Vec<usize>> = (0..3).map(|s| grid.descendants(k, c[s]).unwrap()).collect();
        for &a in &d[0] {
            for &b in &d[1] {
                for &e in &d[2] {
                    out.push([k, a, b, e]);
                }
            }
        }
    }
    out
}

/// `∏|Iₛ|^{1/2} / |K|²` for a tuple.
pub(crate) fn tuple_bound(meas: &[f64], t: [u32; 4]) -> f64 {
    (1..4).map(|s| meas[t[s] as usize].sqrt()).product::<f64>() / (meas[t[0] as usize] * meas[t[0] as usize])
}

/// Largest ratio of a family's sequence-BMO norm to its bound. Errors if
/// any family exceeds its bound by more than the audit slack.
pub(crate) fn audit_partial(grids: &GridPair, field: &CoefficientField) -> Result<f64> {
    let OperatorKind::Partial { shift_axis, .. } = field.header.kind else {
        return Err(Error::InvalidArgument("not a partial paraproduct".into()));
    };
    let (sg, pg) = (grids.grid(shift_axis), grids.grid(shift_axis.other()));
    let meas = id_measures(sg);
    let mut families: HashMap<[u32; 4], Vec<f64>> = HashMap::new();
    for e in &field.entries {
        let (st, pt) = match shift_axis {
            Axis::First => (e.first, e.second),
            Axis::Second => (e.second, e.first),
        };
        if pt.iter().any(|&x| x != pt[0]) {
            return Err(Error::InvalidArgument("paraproduct side must repeat one cube".into()));
        }
        families.entry(st).or_insert_with(|| vec![0.0; pg.cube_count()])[pt[0] as usize] += e.value;
    }
    let mut worst: f64 = 0.0;
    for (t, vals) in &families {
        let bound = tuple_bound(&meas, *t);
        let norm = cube_sequence_bmo(pg, vals)?;
        if norm > bound * (1.0 + AUDIT_SLACK) {
            return Err(Error::InvalidArgument(format!(
                "family {t:?} has sequence-BMO norm {norm} above its bound {bound}"
            )));
        }
        worst = worst.max(norm / bound);
    }
    Ok(worst)
}

/// Family-relative lower bound on the product-BMO norm of a full
/// paraproduct field.
pub(crate) fn audit_full(grids: &GridPair, field: &CoefficientField) -> Result<f64> {
    Ok(full_estimate(grids, field)?.lower)
}

pub(crate) fn full_estimate(grids: &GridPair, field: &CoefficientField) -> Result<crate::norms::ProductBmoEstimate> {
    let mut t = Table::zeros(grids.first.cube_count(), grids.second.cube_count());
    for e in &field.entries {
        t.add(e.first[0] as usize, e.second[0] as usize, e.value);
    }
    rectangle_sequence_bmo(&RectangleSequence::new(grids.clone(), &t)?, &OmegaFamily::rectangles())
}

/// Normalization audit of a field on its grids. Partial paraproducts: the
/// largest ratio of a family's sequence-BMO norm to its bound. Full
/// paraproducts: the product-BMO lower bound over rectangles and superlevel
/// sets. Shifts: the largest `|a| / bound`.
pub fn audit_field(grids: &GridPair, field: &CoefficientField) -> Result<f64> {
    match field.header.kind {
        OperatorKind::Partial { .. } => audit_partial(grids, field),
        OperatorKind::Full { .. } => {
            let mut t = Table::zeros(grids.first.cube_count(), grids.second.cube_count());
            for e in &field.entries {
                t.add(e.first[0] as usize, e.second[0] as usize, e.value);
            }
            Ok(rectangle_sequence_bmo(&RectangleSequence::new(grids.clone(), &t)?, &OmegaFamily::with_thresholds())?.lower)
        }
        OperatorKind::Shift => audit_shift(grids, field),
    }
}

/// Largest ratio `|a| / bound` over the merged coefficients of a shift.
pub(crate) fn audit_shift(grids: &GridPair, field: &CoefficientField) -> Result<f64> {
    let (m1, m2) = (id_measures(&grids.first), id_measures(&grids.second));
    let mut merged: HashMap<([u32; 4], [u32; 4]), f64> = HashMap::new();
    for e in &field.entries {
        *merged.entry((e.first, e.second)).or_default() += e.value;
    }
    let mut worst: f64 = 0.0;
    for ((a, b), v) in merged {
        let bound = tuple_bound(&m1, a) * tuple_bound(&m2, b);
        if v.abs() > bound * (1.0 + AUDIT_SLACK) {
            return Err(Error::InvalidArgument(format!("shift coefficient {v} above its bound {bound}")));
        }
        worst = worst.max(v.abs() / bound);
    }
    Ok(worst)
}

macro_rules! wrapper {
    ($(#[$m:meta])* $name:ident, $pat:pat, $what:literal) => {
        $(#[$m])*
        #[derive(Clone, Debug)]
        pub struct $name(ModelOperator);

        impl $name {
            pub fn new(field: CoefficientField) -> Result<Self> {
                Self::from_operator(ModelOperator::new(field)?)
            }

            pub fn on_grids(grids: &GridPair, field: CoefficientField) -> Result<Self> {
                Self::from_operator(ModelOperator::on_grids(grids, field)?)
            }

            pub fn from_operator(op: ModelOperator) -> Result<Self> {
                match op.kind() {
                    $pat => Ok(Self(op)),
                    k => Err(Error::InvalidArgument(format!("{k:?} is not a {}", $what))),
                }
            }

            pub fn operator(&self) -> &ModelOperator {
                &self.0
            }

            pub fn into_operator(self) -> ModelOperator {
                self.0
            }

            pub fn transposed(&self) -> Self {
                Self(self.0.transposed())
            }
        }

        impl Deref for $name {
            type Target = ModelOperator;

            fn deref(&self) -> &ModelOperator {
                &self.0
            }
        }

        impl From<$name> for ModelOperator {
            fn from(w: $name) -> ModelOperator {
                w.0
            }
        }
    };
}

wrapper!(
    /// Partial paraproduct of complexity `k`; nine types by `(zero_slot, haar_slot)`.
    PartialParaproduct,
    OperatorKind::Partial { .. },
    "partial paraproduct"
);
wrapper!(
    /// Full paraproduct; nine forms by the slots of the two Haar functions.
    FullParaproduct,
    OperatorKind::Full { .. },
    "full paraproduct"
);
wrapper!(
    /// Bilinear dyadic shift of complexity `(k, v)`.
    DyadicShiftBilinear,
    OperatorKind::Shift,
    "dyadic shift"
);

impl PartialParaproduct {
    /// The shift-side complexity.
    pub fn complexity(&self) -> [u8; 3] {
        match self.kind() {
            OperatorKind::Partial { shift_axis, .. } => self.shape().complexity(shift_axis),
            _ => unreachable!(),
        }
    }

    /// Rectangle ids `(Iₛ, Jₛ)` of slot `s` of an entry.
    pub fn slot_rectangle(e: &Entry, s: usize) -> (usize, usize) {
        (e.first[s + 1] as usize, e.second[s + 1] as usize)
    }
}

/// Canonical full paraproduct form: averages on `f₁, f₂`, `h_K ⊗ h_V` on `f₃`.
pub const CANONICAL_FULL: (u8, u8) = (2, 2);

/// The form used in the commutator estimate: `h_K` on `f₃`, `h_V` on `f₂`.
pub const COMMUTATOR_FULL: (u8, u8) = (2, 1);

#[cfg(test)]
mod tests;
