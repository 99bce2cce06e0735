//! Commutators `[b, T]₁`, `[b, T]₂` of model operators, their splitting into
//! paraproduct terms, the exceptional-set construction of the weak-type
//! argument, averages over random grids and the synthesis of a singular
//! integral commutator from model operators.

mod duality;
mod exceptional;
mod synthesis;
mod weak;

pub use duality::{duality_instance, one_parameter_duality, DualityInstance, DualityReport, OneParameterReport};
pub use exceptional::{default_enlargement, exceptional_set, tripled_rectangle_cells, ExceptionalSetReport, LevelSet};
pub use synthesis::{
    compute_alpha, expectation_over_grids, operator_for, quasi_norm_budget, synthesize, SynthesisEntry,
    SynthesisOutput, SynthesisSpec,
};
pub use weak::{
    random_set, random_test_function, weak_type_verify, ExponentTriple, OperatorFamily, WeakTrial, WeakTypeReport,
};

use serde::{Deserialize, Serialize};

use crate::dyadic::{Axis, Profile};
use crate::error::{Error, Result};
use crate::model::{ModelOperator, PartialParaproduct};
use crate::norms::{bmo_norm, BmoMode};
use crate::paraproducts::{Expander, Expansion, Term};
use crate::signal::{id_measures, pair, pairing_table, GridFunction, Table};

fn check_slot(slot: u8) -> Result<()> {
    if slot != 1 && slot != 2 {
        return Err(Error::InvalidArgument(format!("commutator slot {slot} is not 1 or 2")));
    }
    Ok(())
}

/// `[b, T]₁(f₁, f₂) = b T(f₁, f₂) − T(b f₁, f₂)`, and `[b, T]₂` with `b`
/// moved onto `f₂`.
pub fn commutator(
    b: &GridFunction,
    op: &ModelOperator,
    slot: u8,
    f1: &GridFunction,
    f2: &GridFunction,
) -> Result<GridFunction> {
    check_slot(slot)?;
    b.check_mesh(f1)?;
    b.check_mesh(f2)?;
    let t = op.apply(f1, f2)?;
    let moved = if slot == 1 { op.apply(&(b * f1), f2)? } else { op.apply(f1, &(b * f2))? };
    Ok(&(b * &t) - &moved)
}

/// `⟨[b, T]ₛ(f₁, f₂), f₃⟩` split into the expansion terms of `b f₃` (names
/// prefixed `f3:`), minus those of `b fₛ` (prefixed `f1:` or `f2:`), and the
/// term `Pb` collecting the two averages of `b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommutatorSplit {
    pub direct: f64,
    pub terms: Vec<Term>,
    pub residual: f64,
}

impl CommutatorSplit {
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// `|residual| / max(1, |direct|)`.
    pub fn relative_residual(&self) -> f64 {
        self.residual.abs() / self.direct.abs().max(1.0)
    }
}

/// The expansion used for a slot profile pair and the factor turning an
/// `h⁰` profile into the normalized indicator the expansion pairs with.
fn expansion_for(p1: Profile, p2: Profile) -> Expansion {
    match (p1, p2) {
        (Profile::Haar(a), Profile::Haar(b)) => Expansion::Biparameter([a, b]),
        (Profile::Haar(a), _) => Expansion::Mixed(Axis::First, a),
        (_, Profile::Haar(b)) => Expansion::Mixed(Axis::Second, b),
        _ => Expansion::Plain,
    }
}

fn zero_scale(p: Profile, meas: f64) -> f64 {
    if p == Profile::HaarZero {
        meas.sqrt()
    } else {
        1.0
    }
}

/// Split of `⟨[b, T]ₛ(f₁, f₂), f₃⟩` for any model operator, following the
/// bi-parameter, one-parameter or trivial expansion of each pairing of `b`
/// with a function, by the cancellation of its slot.
pub fn split_commutator(
    b: &GridFunction,
    op: &ModelOperator,
    slot: u8,
    f1: &GridFunction,
    f2: &GridFunction,
    f3: &GridFunction,
) -> Result<CommutatorSplit> {
    check_slot(slot)?;
    let direct = pair(&commutator(b, op, slot, f1, f2)?, f3)?;
    let g = op.grids();
    let s = op.shape();
    let fs = [f1, f2, f3];
    let t: Vec<Table> = (0..3)
        .map(|k| pairing_table(fs[k], g, s.first[k], s.second[k]))
        .collect::<Result<_>>()?;
    let bavg = pairing_table(b, g, Profile::Average, Profile::Average)?;
    let (m1, m2) = (id_measures(&g.first), id_measures(&g.second));
    let j = slot as usize - 1;
    let out = Expander::new(b, f3, g, expansion_for(s.first[2], s.second[2]))?;
    let inp = Expander::new(b, fs[j], g, expansion_for(s.first[j], s.second[j]))?;
    let named = |e: &Expander| e.tables().iter().filter(|(n, _)| n != "mean").count();
    let mut acc_out = vec![0.0; named(&out)];
    let mut acc_in = vec![0.0; named(&inp)];
    let mut pb = 0.0;
    for e in op.entries() {
        let (i, jj) = (e.first.map(|x| x as usize), e.second.map(|x| x as usize));
        let c = |k: usize| t[k].get(i[k + 1], jj[k + 1]);
        let rect = |k: usize| (i[k + 1], jj[k + 1]);
        let scale = |k: usize| zero_scale(s.first[k], m1[i[k + 1]]) * zero_scale(s.second[k], m2[jj[k + 1]]);
        let (r3, rj) = (rect(2), rect(j));
        let other = if j == 0 { c(1) } else { c(0) };
        let w_out = e.value * c(0) * c(1) * scale(2);
        for (a, (_, tab)) in acc_out.iter_mut().zip(out.tables()) {
            *a += w_out * tab.get(r3.0, r3.1);
        }
        let w_in = e.value * other * c(2) * scale(j);
        for (a, (_, tab)) in acc_in.iter_mut().zip(inp.tables()) {
            *a -= w_in * tab.get(rj.0, rj.1);
        }
        pb += e.value * (bavg.get(r3.0, r3.1) - bavg.get(rj.0, rj.1)) * c(0) * c(1) * c(2);
    }
    let mut terms = Vec::new();
    for (a, (n, _)) in acc_out.iter().zip(out.tables()) {
        terms.push(Term { name: format!("f3:{n}"), value: *a });
    }
    for (a, (n, _)) in acc_in.iter().zip(inp.tables()) {
        terms.push(Term { name: format!("f{slot}:{n}"), value: *a });
    }
    terms.push(Term { name: "Pb".into(), value: pb });
    let residual = direct - terms.iter().map(|t| t.value).sum::<f64>();
    Ok(CommutatorSplit { direct, terms, residual })
}

/// The split of `⟨[b, P]₁(f₁, f₂), f₃⟩` for a partial paraproduct. For the
/// type with `h⁰` on `f₁` and `h_V` on `f₁` the terms are `f3:a1`, `f3:a2`
/// (the one-parameter paraproducts of `b f₃`), `f3:middle` (the average
/// difference `⟨b⟩_{I₃,1} − ⟨b⟩_{I₃×V}`), `f1:a1`, `f1:a2`, `f1:middle`
/// (`⟨b⟩_{V,2} − ⟨b⟩_{I₁×V}`) and `Pb`.
pub fn split_partial_commutator(
    b: &GridFunction,
    p: &PartialParaproduct,
    f1: &GridFunction,
    f2: &GridFunction,
    f3: &GridFunction,
) -> Result<CommutatorSplit> {
    split_commutator(b, p, 1, f1, f2, f3)
}

/// Size of the averages difference carried by `Pb`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PbBound {
    /// `max |⟨b⟩_{I₃×J₃} − ⟨b⟩_{I₁×J₁}|` over the coefficients.
    pub max_difference: f64,
    /// Dyadic little BMO norm of `b` on the operator's grids.
    pub bmo: f64,
    /// `max_difference / (bmo · max(1, max kᵢ))`.
    pub ratio: f64,
}

/// Checks every coefficient index of a partial paraproduct.
pub fn pb_bound(b: &GridFunction, p: &PartialParaproduct) -> Result<PbBound> {
    let g = p.grids();
    let bavg = pairing_table(b, g, Profile::Average, Profile::Average)?;
    let mut max_difference: f64 = 0.0;
    for e in p.entries() {
        let d = bavg.get(e.first[3] as usize, e.second[3] as usize) - bavg.get(e.first[1] as usize, e.second[1] as usize);
        max_difference = max_difference.max(d.abs());
    }
    let bmo = bmo_norm(b, BmoMode::Dyadic(g))?;
    let k = *p.complexity().iter().max().unwrap_or(&0) as f64;
    let ratio = if bmo > 0.0 { max_difference / (bmo * k.max(1.0)) } else { 0.0 };
    Ok(PbBound { max_difference, bmo, ratio })
}
