use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analysis::{aux_phi, AuxKind};
use crate::commutators::{exceptional_set, random_set, random_test_function, split_commutator, tripled_rectangle_cells};
use crate::dyadic::{sample_rng, Axis, GridPair, GridShift, Mesh, Profile, ShiftSampler};
use crate::error::Result;
use crate::model::{audit_field, generate_full_coeffs, generate_partial_coeffs, ModelOperator};
use crate::paraproducts::{Expander, Expansion};
use crate::signal::{
    factor_synthesis, martingale_difference, pair, pairing_table, synthesize_table, FactorFunction, GridFunction,
    Martingale, Table,
};

/// Largest residual of one identity over a batch of random instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub name: String,
    pub instances: usize,
    pub max_residual: f64,
}

fn uniform<R: Rng + ?Sized>(rng: &mut R, mesh: Mesh) -> GridFunction {
    GridFunction::from_fn(mesh, |_, _| rng.gen_range(-1.0..1.0))
}

pub(crate) fn random_grids<R: Rng + ?Sized>(rng: &mut R, mesh: &Mesh) -> Result<GridPair> {
    GridPair::shifted(
        GridShift::sample(rng, Axis::First, mesh.first()),
        GridShift::sample(rng, Axis::Second, mesh.second()),
    )
}

fn eta<R: Rng + ?Sized>(rng: &mut R, dim: u8) -> u8 {
    rng.gen_range(1..1u8 << dim)
}

/// Largest `|lhs − Σ terms|` over all target rectangles, relative to the
/// largest `|lhs|`.
fn expansion_residual(e: &Expander) -> Result<f64> {
    let (mut res, mut scale) = (0.0f64, 0.0f64);
    for (i, j) in e.targets() {
        let x = e.at(i, j)?;
        res = res.max(x.residual.abs());
        scale = scale.max(x.lhs.abs()).max(x.terms.iter().map(|t| t.value.abs()).fold(0.0, f64::max));
    }
    Ok(if scale > 0.0 { res / scale } else { res })
}

/// The bi-parameter, mixed and unexpanded product expansions of `bf` on
/// `trials` random `(b, f, ω)` each.
pub fn expansion_suite(mesh: Mesh, trials: usize, seed: u64) -> Result<Vec<ResidualSummary>> {
    let mut out = Vec::new();
    for (name, salt) in [("biparameter", 1u64), ("mixed", 2), ("plain", 3)] {
        let mut worst = 0.0f64;
        for t in 0..trials {
            let mut rng = sample_rng(seed ^ (salt << 40), t);
            let grids = random_grids(&mut rng, &mesh)?;
            let (b, f) = (uniform(&mut rng, mesh), uniform(&mut rng, mesh));
            let mode = match salt {
                1 => Expansion::Biparameter([eta(&mut rng, mesh.n()), eta(&mut rng, mesh.m())]),
                2 if t % 2 == 0 => Expansion::Mixed(Axis::First, eta(&mut rng, mesh.n())),
                2 => Expansion::Mixed(Axis::Second, eta(&mut rng, mesh.m())),
                _ => Expansion::Plain,
            };
            worst = worst.max(expansion_residual(&Expander::new(&b, &f, &grids, mode)?)?);
        }
        out.push(ResidualSummary { name: name.into(), instances: trials, max_residual: worst });
    }
    Ok(out)
}

/// The commutator split of random partial paraproducts, cycling through the
/// nine slot types; the residual is relative to `|direct| + Σ |terms|`.
pub fn split_suite(mesh: Mesh, trials: usize, seed: u64) -> Result<ResidualSummary> {
    let kmax = mesh.level().min(2);
    let mut worst = 0.0f64;
    for t in 0..trials {
        let mut rng = sample_rng(seed ^ (4 << 40), t);
        let grids = random_grids(&mut rng, &mesh)?;
        let k = [rng.gen_range(0..=kmax), rng.gen_range(0..=kmax), rng.gen_range(0..=kmax)];
        let (zs, hs) = ((t % 3) as u8, ((t / 3) % 3) as u8);
        let field = generate_partial_coeffs(&mut rng, &grids, k, zs, hs, 1.0)?;
        let op = ModelOperator::on_grids(&grids, field)?;
        let fs: Vec<GridFunction> = (0..4).map(|_| uniform(&mut rng, mesh)).collect();
        let s = split_commutator(&fs[0], &op, 1, &fs[1], &fs[2], &fs[3])?;
        let scale = s.direct.abs() + s.terms.iter().map(|t| t.value.abs()).sum::<f64>();
        worst = worst.max(if scale > 0.0 { s.residual.abs() / scale } else { s.residual.abs() });
    }
    Ok(ResidualSummary { name: "split".into(), instances: trials, max_residual: worst })
}

fn haar_function(grids: &GridPair, i: usize, p1: Profile, j: usize, p2: Profile) -> Result<GridFunction> {
    let one_hot = |n: usize, at: usize| {
        let mut v = vec![0.0; n];
        v[at] = 1.0;
        v
    };
    let (g1, g2) = (&grids.first, &grids.second);
    let a = FactorFunction::from_values(g1.factor(), factor_synthesis(&one_hot(g1.cube_count(), i), g1, p1))?;
    let b = FactorFunction::from_values(g2.factor(), factor_synthesis(&one_hot(g2.cube_count(), j), g2, p2))?;
    GridFunction::tensor(&a, &b)
}

/// Every rectangle Haar coefficient of `f`, top averages included, as
/// `(profiles, table)` with the tables restricted to the terms of the
/// orthonormal basis.
fn basis_tables(f: &GridFunction, grids: &GridPair) -> Result<Vec<(Profile, Profile, Table)>> {
    let mesh = f.mesh();
    let (top1, top2) = (grids.first.level_ids(0).start, grids.second.level_ids(0).start);
    let mut out = Vec::new();
    for p2 in Profile::cancellative(mesh.m()) {
        let t = pairing_table(f, grids, Profile::HaarZero, p2)?;
        let mut keep = Table::zeros(t.rows(), t.cols());
        keep.row_mut(top1).copy_from_slice(t.row(top1));
        out.push((Profile::HaarZero, p2, keep));
    }
    for p1 in Profile::cancellative(mesh.n()) {
        let t = pairing_table(f, grids, p1, Profile::HaarZero)?;
        let mut keep = Table::zeros(t.rows(), t.cols());
        for a in grids.first.coarse_ids() {
            keep.set(a, top2, t.get(a, top2));
        }
        out.push((p1, Profile::HaarZero, keep));
        for p2 in Profile::cancellative(mesh.m()) {
            out.push((p1, p2, pairing_table(f, grids, p1, p2)?));
        }
    }
    Ok(out)
}

/// Haar orthonormality, reconstruction from the Haar expansion, Parseval
/// and `Δ¹_I Δ²_J = Δ²_J Δ¹_I = Δ_{I×J}`, each on random shifted grids.
pub fn linear_algebra_suite(mesh: Mesh, trials: usize, seed: u64) -> Result<Vec<ResidualSummary>> {
    let mut rng = sample_rng(seed ^ (5 << 40), 0);
    let grids = random_grids(&mut rng, &mesh)?;
    let mut ortho = 0.0f64;
    let c1: Vec<Profile> = Profile::cancellative(mesh.n()).collect();
    let c2: Vec<Profile> = Profile::cancellative(mesh.m()).collect();
    let mut count = 0;
    for &p1 in &c1 {
        for &p2 in &c2 {
            for i in grids.first.coarse_ids() {
                for j in grids.second.coarse_ids() {
                    let h = haar_function(&grids, i, p1, j, p2)?;
                    count += 1;
                    for &q1 in &c1 {
                        for &q2 in &c2 {
                            let t = pairing_table(&h, &grids, q1, q2)?;
                            for a in grids.first.coarse_ids() {
                                for b in grids.second.coarse_ids() {
                                    let want = if (a, b, q1, q2) == (i, j, p1, p2) { 1.0 } else { 0.0 };
                                    ortho = ortho.max((t.get(a, b) - want).abs());
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    let (mut recon, mut parseval, mut commute) = (0.0f64, 0.0f64, 0.0f64);
    for t in 0..trials {
        let mut rng = sample_rng(seed ^ (6 << 40), t);
        let grids = random_grids(&mut rng, &mesh)?;
        let f = uniform(&mut rng, mesh);
        let mut sum = GridFunction::constant(mesh, f.mean());
        let mut energy = f.mean().powi(2);
        for (p1, p2, tab) in basis_tables(&f, &grids)? {
            sum += &synthesize_table(&tab, &grids, p1, p2);
            energy += tab.data().iter().map(|v| v * v).sum::<f64>();
        }
        recon = recon.max(sum.distance(&f));
        let norm2 = pair(&f, &f)?;
        parseval = parseval.max((energy - norm2).abs() / norm2.max(1.0));
        let depth = mesh.level().saturating_sub(1).min(2);
        for l1 in 0..=depth {
            for l2 in 0..=depth {
                let i = grids.first.cube(rng.gen_range(grids.first.level_ids(l1)));
                let j = grids.second.cube(rng.gen_range(grids.second.level_ids(l2)));
                let r = martingale_difference(&f, &Martingale::Rect(i, j))?;
                let a = martingale_difference(&martingale_difference(&f, &Martingale::Delta(j))?, &Martingale::Delta(i))?;
                let b = martingale_difference(&martingale_difference(&f, &Martingale::Delta(i))?, &Martingale::Delta(j))?;
                commute = commute.max(r.distance(&a)).max(r.distance(&b));
            }
        }
    }
    Ok(vec![
        ResidualSummary { name: "haar-orthonormality".into(), instances: count, max_residual: ortho },
        ResidualSummary { name: "reconstruction".into(), instances: trials, max_residual: recon },
        ResidualSummary { name: "parseval".into(), instances: trials, max_residual: parseval },
        ResidualSummary { name: "delta-commutation".into(), instances: trials, max_residual: commute },
    ])
}

/// Structural checks of the exceptional-set construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSummary {
    pub runs: usize,
    /// Runs with `|E′| ≥ 99/100 |E|`.
    pub measure_ok: usize,
    pub min_share: f64,
    /// Runs where some `Ω_{u−1} ⊄ Ω_u` or `R̂_{u−1} ⊄ R̂_u`.
    pub monotonicity_failures: usize,
    /// Rectangles `R ∈ R̂_u` with `3R ⊄ Ω̃_u`.
    pub containment_failures: usize,
    /// Runs where the `R_u` do not partition the participating rectangles.
    pub partition_failures: usize,
    pub max_constant: f64,
    pub max_levels: usize,
}

/// Runs the construction on `Φ₁(f₁)Φ₂^l(f₂)` for random `b, f₁, f₂, E`.
pub fn exceptional_suite(mesh: Mesh, runs: usize, r: f64, sampler: &ShiftSampler, seed: u64) -> Result<ExceptionalSummary> {
    let mut s = ExceptionalSummary {
        runs,
        measure_ok: 0,
        min_share: 1.0,
        monotonicity_failures: 0,
        containment_failures: 0,
        partition_failures: 0,
        max_constant: 0.0,
        max_levels: 0,
    };
    for t in 0..runs {
        let mut rng = sample_rng(seed ^ (7 << 40), t);
        let b = uniform(&mut rng, mesh);
        let f1 = random_test_function(&mut rng, mesh);
        let f2 = random_test_function(&mut rng, mesh);
        let l = rng.gen_range(0..=mesh.level().min(2));
        let phi = &aux_phi(&f1, AuxKind::PartialFirst { b: &b }, sampler)?
            * &aux_phi(&f2, AuxKind::PartialSecond { l }, sampler)?;
        let e = random_set(&mut rng, mesh);
        let rep = exceptional_set(&phi, &e, r, None)?;
        s.measure_ok += rep.satisfies_measure_bound() as usize;
        s.min_share = s.min_share.min(rep.e_prime_measure / rep.e_measure);
        s.max_constant = s.max_constant.max(rep.constant);
        s.max_levels = s.max_levels.max(rep.levels.len());
        let monotone = rep.levels.windows(2).all(|w| {
            w[0].omega.iter().zip(&w[1].omega).all(|(a, b)| !a || *b) && w[0].hat.iter().all(|x| w[1].hat.binary_search(x).is_ok())
        });
        s.monotonicity_failures += (!monotone) as usize;
        for lv in &rep.levels {
            for &(i, j) in &lv.hat {
                if !tripled_rectangle_cells(&mesh, i, j).into_iter().all(|x| lv.enlarged[x]) {
                    s.containment_failures += 1;
                }
            }
        }
        let last = rep.levels.last().map_or(0, |l| l.hat_count);
        let total: usize = rep.levels.iter().map(|l| l.new_count).sum();
        s.partition_failures += (total != last) as usize;
    }
    Ok(s)
}

/// Normalization audits of generated coefficient fields.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationSummary {
    pub partial_fields: usize,
    /// Largest sequence-BMO norm over its bound, over every family.
    pub worst_partial: f64,
    pub full_fields: usize,
    /// Largest product-BMO lower-bound estimate.
    pub worst_full: f64,
}

/// Draws fields of all nine partial types and all nine full forms on
/// random grids and audits each one independently of the generator.
pub fn normalization_suite(mesh: Mesh, trials: usize, seed: u64) -> Result<NormalizationSummary> {
    let kmax = mesh.level().min(2);
    let mut s = NormalizationSummary { partial_fields: 0, worst_partial: 0.0, full_fields: 0, worst_full: 0.0 };
    for t in 0..trials {
        let mut rng = sample_rng(seed ^ (8 << 40), t);
        let grids = random_grids(&mut rng, &mesh)?;
        for a in 0..3u8 {
            for b in 0..3u8 {
                let density = if t % 2 == 0 { 1.0 } else { rng.gen_range(0.1..1.0) };
                let k = [rng.gen_range(0..=kmax), rng.gen_range(0..=kmax), rng.gen_range(0..=kmax)];
                let field = generate_partial_coeffs(&mut rng, &grids, k, a, b, density)?;
                s.worst_partial = s.worst_partial.max(audit_field(&grids, &field)?);
                s.partial_fields += 1;
                let field = generate_full_coeffs(&mut rng, &grids, a, b, density)?;
                s.worst_full = s.worst_full.max(audit_field(&grids, &field)?);
                s.full_fields += 1;
            }
        }
    }
    Ok(s)
}
