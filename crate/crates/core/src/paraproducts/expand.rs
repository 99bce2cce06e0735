use serde::{Deserialize, Serialize};

use crate::dyadic::{Axis, DyadicGrid, GridPair, Profile};
use crate::error::{Error, Result};
use crate::signal::{
    axis_coefficients, factor_coefficients, id_measures, pairing_table, synthesize_table, GridFunction, Table,
};

use super::{block_value, paraproduct_a, Op, ParaproductTables};

/// How `bf` is paired and expanded at a target rectangle `I₀ × J₀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expansion {
    /// `⟨bf, h_{I₀}^{η₁} ⊗ h_{J₀}^{η₂}⟩` through `A₁ … A₈`.
    Biparameter([u8; 2]),
    /// `⟨bf, h_{Q₀}^η ⊗ 1/|·|⟩` with the Haar function on the given axis,
    /// through the one-parameter paraproducts of that axis.
    Mixed(Axis, u8),
    /// `⟨bf⟩_{I₀×J₀}`, not expanded.
    Plain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub name: String,
    pub value: f64,
}

/// One expansion: the left-hand side, its named terms and `lhs − Σ terms`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductExpansion {
    pub lhs: f64,
    pub terms: Vec<Term>,
    pub residual: f64,
}

impl ProductExpansion {
    pub fn term(&self, name: &str) -> Option<f64> {
        self.terms.iter().find(|t| t.name == name).map(|t| t.value)
    }
}

/// Every term of one expansion mode at every target rectangle, as tables
/// indexed by first-grid and second-grid ids.
pub struct Expander {
    mode: Expansion,
    lhs: Table,
    terms: Vec<(String, Table)>,
    coarse: [usize; 2],
}

impl Expander {
    pub fn new(b: &GridFunction, f: &GridFunction, grids: &GridPair, mode: Expansion) -> Result<Self> {
        b.check_mesh(f)?;
        let bf = b * f;
        let coarse = [grids.first.coarse_ids().end, grids.second.coarse_ids().end];
        let avg = |g: &GridFunction| pairing_table(g, grids, Profile::Average, Profile::Average);
        let (lhs, terms) = match mode {
            Expansion::Biparameter([e1, e2]) => {
                check_eta(e1, grids.first.factor().dim())?;
                check_eta(e2, grids.second.factor().dim())?;
                let (p1, p2) = (Profile::Haar(e1), Profile::Haar(e2));
                let tables = ParaproductTables::new(b, f, grids)?;
                let mut terms = Vec::with_capacity(9);
                for i in 1..=8u8 {
                    terms.push((format!("A{i}"), pairing_table(&tables.operator(i)?, grids, p1, p2)?));
                }
                let mean = hadamard(&avg(b)?, &pairing_table(f, grids, p1, p2)?);
                terms.push(("mean".to_string(), mean));
                (pairing_table(&bf, grids, p1, p2)?, terms)
            }
            Expansion::Mixed(Axis::First, eta) => {
                check_eta(eta, grids.first.factor().dim())?;
                let p = Profile::Haar(eta);
                let pair = |g: &GridFunction| pairing_table(g, grids, p, Profile::Average);
                let bavg = avg(b)?;
                let fha = pair(f)?;
                let mut terms = Vec::with_capacity(4);
                for j in 1..=2u8 {
                    terms.push((format!("a{j}"), pair(&paraproduct_a(j, b, f, &grids.first)?)?));
                }
                // ⟨⟨b⟩_{I,1} ⟨f,h_I⟩₁⟩_J − ⟨b⟩_{I×J} ⟨⟨f,h_I⟩₁⟩_J
                let beta = axis_coefficients(b, &grids.first, Profile::Average)?;
                let g = axis_coefficients(f, &grids.first, p)?;
                let mut middle = Table::zeros(beta.rows(), bavg.cols());
                for i in grids.first.coarse_ids() {
                    let prod: Vec<f64> = beta.row(i).iter().zip(g.row(i)).map(|(x, y)| x * y).collect();
                    let c = factor_coefficients(&prod, &grids.second, Profile::Average);
                    for (j, v) in c.into_iter().enumerate() {
                        middle.set(i, j, v - bavg.get(i, j) * fha.get(i, j));
                    }
                }
                terms.push(("middle".to_string(), middle));
                terms.push(("mean".to_string(), hadamard(&bavg, &fha)));
                (pair(&bf)?, terms)
            }
            Expansion::Mixed(Axis::Second, eta) => {
                let t = Expander::new(&b.transpose(), &f.transpose(), &grids.transposed(), Expansion::Mixed(Axis::First, eta))?;
                let terms = t.terms.into_iter().map(|(n, x)| (n, x.transpose())).collect();
                (t.lhs.transpose(), terms)
            }
            Expansion::Plain => {
                let bavg = avg(b)?;
                let favg = avg(f)?;
                let osc = oscillation_table(b, f, grids, &bavg);
                (avg(&bf)?, vec![("oscillation".to_string(), osc), ("mean".to_string(), hadamard(&bavg, &favg))])
            }
        };
        Ok(Self { mode, lhs, terms, coarse })
    }

    pub fn mode(&self) -> Expansion {
        self.mode
    }

    /// Named term tables, `mean` last.
    pub(crate) fn tables(&self) -> &[(String, Table)] {
        &self.terms
    }

    /// Expansion at the rectangle with ids `(i0, j0)`.
    pub fn at(&self, i0: usize, j0: usize) -> Result<ProductExpansion> {
        let (r, c) = (self.lhs.rows(), self.lhs.cols());
        if i0 >= r || j0 >= c {
            return Err(Error::NotInGrid(format!("rectangle ({i0}, {j0}) is outside the grid pair")));
        }
        let needs = match self.mode {
            Expansion::Biparameter(_) => [true, true],
            Expansion::Mixed(Axis::First, _) => [true, false],
            Expansion::Mixed(Axis::Second, _) => [false, true],
            Expansion::Plain => [false, false],
        };
        if (needs[0] && i0 >= self.coarse[0]) || (needs[1] && j0 >= self.coarse[1]) {
            return Err(Error::Resolution("cancellative Haar function at the finest level".into()));
        }
        let lhs = self.lhs.get(i0, j0);
        let terms: Vec<Term> =
            self.terms.iter().map(|(n, t)| Term { name: n.clone(), value: t.get(i0, j0) }).collect();
        let residual = lhs - terms.iter().map(|t| t.value).sum::<f64>();
        Ok(ProductExpansion { lhs, terms, residual })
    }

    /// Every admissible target rectangle, as `(i0, j0)` id pairs.
    pub fn targets(&self) -> Vec<(usize, usize)> {
        let (r, c) = (self.lhs.rows(), self.lhs.cols());
        let (r, c) = match self.mode {
            Expansion::Biparameter(_) => (self.coarse[0], self.coarse[1]),
            Expansion::Mixed(Axis::First, _) => (self.coarse[0], c),
            Expansion::Mixed(Axis::Second, _) => (r, self.coarse[1]),
            Expansion::Plain => (r, c),
        };
        (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).collect()
    }
}

/// The expansion of `bf` at the rectangle with ids `(i0, j0)`.
pub fn expand_product(
    b: &GridFunction,
    f: &GridFunction,
    grids: &GridPair,
    mode: Expansion,
    i0: usize,
    j0: usize,
) -> Result<ProductExpansion> {
    Expander::new(b, f, grids, mode)?.at(i0, j0)
}

fn check_eta(eta: u8, dim: u8) -> Result<()> {
    if eta == 0 || eta >= 1 << dim {
        Err(Error::InvalidArgument(format!("η = {eta} is not a cancellative index in dimension {dim}")))
    } else {
        Ok(())
    }
}

fn hadamard(a: &Table, b: &Table) -> Table {
    let data = a.data().iter().zip(b.data()).map(|(x, y)| x * y).collect();
    Table::from_data(a.rows(), a.cols(), data)
}

/// `⟨(b − ⟨b⟩_R) f⟩_R` for every rectangle, summed cell by cell.
fn oscillation_table(b: &GridFunction, f: &GridFunction, grids: &GridPair, bavg: &Table) -> Table {
    let cols = b.mesh().cols();
    let (bv, fv) = (b.values(), f.values());
    let mut out = Table::zeros(bavg.rows(), bavg.cols());
    for i in 0..out.rows() {
        let ci = grids.first.cells(i);
        for j in 0..out.cols() {
            let cj = grids.second.cells(j);
            let mean = bavg.get(i, j);
            let mut acc = 0.0;
            for &x1 in ci {
                let row = x1 as usize * cols;
                for &x2 in cj {
                    let c = row + x2 as usize;
                    acc += (bv[c] - mean) * fv[c];
                }
            }
            out.set(i, j, acc / (ci.len() * cj.len()) as f64);
        }
    }
    out
}

/// The four blocks of `1_{I₀×J₀} b`: the bi-parameter differences inside
/// `I₀ × J₀`, `E¹_{I₀}Δ²_{J₁}` terms, `Δ¹_{I₁}E²_{J₀}` terms and `E_{I₀×J₀} b`.
pub fn local_blocks(b: &GridFunction, grids: &GridPair, i0: usize, j0: usize) -> Result<[GridFunction; 4]> {
    let a = pairing_table(b, grids, Profile::Average, Profile::Average)?;
    let sub1 = subtree(&grids.first, i0)?;
    let sub2 = subtree(&grids.second, j0)?;
    let (m1, m2) = (id_measures(&grids.first), id_measures(&grids.second));
    let (l1, l2) = (grids.first.resolution(), grids.second.resolution());
    let kids = |g: &DyadicGrid, id: usize, l: u8| -> Result<Vec<usize>> {
        if g.level_of(id) == l {
            Ok(Vec::new())
        } else {
            g.children_ids(id)
        }
    };
    let synth = |q: &Table| synthesize_table(q, grids, Profile::Average, Profile::Average);
    let mut q = [Table::zeros(a.rows(), a.cols()), Table::zeros(a.rows(), a.cols()), Table::zeros(a.rows(), a.cols())];
    for &i in &sub1 {
        for &j in &sub2 {
            for ic in kids(&grids.first, i, l1)? {
                for jc in kids(&grids.second, j, l2)? {
                    q[0].add(ic, jc, block_value(&a, ic, i, jc, j, [Op::D, Op::D]) * m1[ic] * m2[jc]);
                }
            }
        }
    }
    for &j in &sub2 {
        for jc in kids(&grids.second, j, l2)? {
            q[1].add(i0, jc, block_value(&a, i0, i0, jc, j, [Op::E, Op::D]) * m1[i0] * m2[jc]);
        }
    }
    for &i in &sub1 {
        for ic in kids(&grids.first, i, l1)? {
            q[2].add(ic, j0, block_value(&a, ic, i, j0, j0, [Op::D, Op::E]) * m1[ic] * m2[j0]);
        }
    }
    let mut top = Table::zeros(a.rows(), a.cols());
    top.set(i0, j0, a.get(i0, j0) * m1[i0] * m2[j0]);
    Ok([synth(&q[0]), synth(&q[1]), synth(&q[2]), synth(&top)])
}

fn subtree(grid: &DyadicGrid, id: usize) -> Result<Vec<usize>> {
    if id >= grid.cube_count() {
        return Err(Error::NotInGrid(format!("cube id {id} is outside the grid")));
    }
    let mut out = Vec::new();
    for d in 0..=grid.resolution() - grid.level_of(id) {
        out.extend(grid.descendants(id, d)?);
    }
    Ok(out)
}
