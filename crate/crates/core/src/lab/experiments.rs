use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::commutators::{
    commutator, compute_alpha, duality_instance, one_parameter_duality, quasi_norm_budget, random_test_function,
    synthesize, weak_type_verify, ExponentTriple, OperatorFamily, SynthesisEntry, SynthesisSpec,
};
use crate::dyadic::{sample_rng, GridPair, Mesh, ShiftSampler};
use crate::error::{Error, Result};
use crate::model::COMMUTATOR_FULL;
use crate::norms::{generate_bmo_function, lp_norm, BmoMode};
use crate::signal::GridFunction;

use super::checks::{exceptional_suite, expansion_suite, linear_algebra_suite, normalization_suite, split_suite};
use super::config::Config;
use super::report::{Assertion, DataTable, Report};

const SYMBOL: u64 = 0x0b5e_55ed;
const OPERATORS: u64 = 0x0de5_1a7e;

/// A `b` with slice-BMO norm one, the same for every experiment at a given
/// seed and resolution.
pub fn bmo_symbol(seed: u64, mesh: Mesh) -> Result<GridFunction> {
    generate_bmo_function(&mut sample_rng(seed ^ SYMBOL, mesh.level() as usize), mesh, 1.0, BmoMode::Slices)
}

/// Ratios `‖E_ω [b, P_ω]₁(f₁, f₂)‖_r / (‖f₁‖_p ‖f₂‖_q)` over random test
/// functions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub ratios: Vec<f64>,
    pub max: f64,
    pub mean: f64,
}

/// The grid expectation is shared by all trials: operator `k` is drawn once
/// per sampled grid pair and applied to every trial's inputs.
pub fn estimate_norm(
    b: &GridFunction,
    family: &OperatorFamily,
    exps: ExponentTriple,
    trials: usize,
    sampler: &ShiftSampler,
    seed: u64,
) -> Result<NormEstimate> {
    let mesh = b.mesh();
    let inputs: Vec<(GridFunction, GridFunction)> = (0..trials)
        .map(|t| {
            let mut rng = sample_rng(seed, t);
            (random_test_function(&mut rng, mesh), random_test_function(&mut rng, mesh))
        })
        .collect();
    let pairs = sampler.pairs(&mesh)?;
    if pairs.is_empty() {
        return Err(Error::NoSamples);
    }
    let mut acc = vec![GridFunction::zeros(mesh); trials];
    for (k, (a, s)) in pairs.iter().enumerate() {
        let grids = GridPair::shifted(a.clone(), s.clone())?;
        let op = family.draw(&mut sample_rng(seed ^ OPERATORS, k), &grids)?;
        acc.par_iter_mut().zip(&inputs).try_for_each(|(g, (f1, f2))| -> Result<()> {
            *g += &commutator(b, &op, 1, f1, f2)?;
            Ok(())
        })?;
    }
    let n = pairs.len() as f64;
    let ratios = acc
        .iter()
        .zip(&inputs)
        .map(|(g, (f1, f2))| {
            let d = lp_norm(f1, exps.p, None)? * lp_norm(f2, exps.q, None)?;
            Ok(if d > 0.0 { lp_norm(&g.scale(n.recip()), exps.r, None)? / d } else { 0.0 })
        })
        .collect::<Result<Vec<f64>>>()?;
    let max = ratios.iter().cloned().fold(0.0, f64::max);
    let mean = ratios.iter().sum::<f64>() / ratios.len().max(1) as f64;
    Ok(NormEstimate { ratios, max, mean })
}

fn partial_family(config: &Config, k: [u8; 3]) -> OperatorFamily {
    OperatorFamily::Partial { k, zero_slot: 0, haar_slot: 0, density: config.density }
}

fn full_family(config: &Config) -> OperatorFamily {
    OperatorFamily::Full { first_slot: COMMUTATOR_FULL.0, second_slot: COMMUTATOR_FULL.1, density: config.density }
}

pub(super) fn identities(config: &Config) -> Result<Report> {
    let mesh = config.mesh()?;
    let mut rep = Report::new(config, "none");
    let mut table = DataTable::new("identities", &["identity", "instances", "max_residual", "tolerance"]);
    let mut check = |rep: &mut Report, s: super::ResidualSummary, tol: f64| {
        table.push(row![s.name, s.instances, s.max_residual, tol]);
        rep.set(&format!("residual:{}", s.name), s.max_residual);
        rep.assert(Assertion::at_most(&s.name, s.max_residual, tol));
    };
    for s in expansion_suite(mesh, config.trials, config.seed)? {
        check(&mut rep, s, 1e-10);
    }
    check(&mut rep, split_suite(mesh, config.trials, config.seed)?, 1e-10);
    for s in linear_algebra_suite(mesh, config.trials.min(10), config.seed)? {
        check(&mut rep, s, 1e-12);
    }
    rep.tables.push(table);
    Ok(rep)
}

pub(super) fn measures(config: &Config) -> Result<Report> {
    let mesh = config.mesh()?;
    let mut rep = Report::new(config, "exceptional-set");
    let r = config.exponents()?.r;
    let e = exceptional_suite(mesh, config.trials, r, &config.sampler(), config.seed)?;
    rep.set("exceptional:min_share", e.min_share);
    rep.set("exceptional:max_constant", e.max_constant);
    rep.set("exceptional:max_levels", e.max_levels as f64);
    rep.assert(Assertion::at_least("exceptional:measure", e.measure_ok as f64 / e.runs as f64, 1.0));
    rep.assert(Assertion::at_most("exceptional:monotonicity", e.monotonicity_failures as f64, 0.0));
    rep.assert(Assertion::at_most("exceptional:containment", e.containment_failures as f64, 0.0));
    rep.assert(Assertion::at_most("exceptional:partition", e.partition_failures as f64, 0.0));
    let n = normalization_suite(mesh, config.trials.min(10), config.seed)?;
    rep.set("normalization:partial_fields", n.partial_fields as f64);
    rep.set("normalization:full_fields", n.full_fields as f64);
    rep.assert(Assertion::at_most("normalization:partial", n.worst_partial, 1.0 + 1e-9));
    rep.assert(Assertion::at_most("normalization:full", n.worst_full, 1.0 + 1e-9));
    Ok(rep)
}

pub(super) fn norms(config: &Config) -> Result<Report> {
    let exps = config.exponents()?;
    let sampler = config.sampler();
    let mut rep = Report::new(config, format!("partial k={:?}, full {:?}", config.k, COMMUTATOR_FULL));
    let mut table = DataTable::new("norms", &["L", "family", "trial", "ratio"]);
    let families = [("partial", partial_family(config, config.k)), ("full", full_family(config))];
    let levels = config.levels();
    let mut maxima = vec![Vec::new(); families.len()];
    for &level in &levels {
        let mesh = config.mesh_at(level)?;
        let b = bmo_symbol(config.seed, mesh)?;
        for (fi, (name, fam)) in families.iter().enumerate() {
            let est = estimate_norm(&b, fam, exps, config.trials, &sampler, config.seed)?;
            for (t, x) in est.ratios.iter().enumerate() {
                table.push(row![level, name, t, x]);
            }
            rep.set(&format!("max_ratio:{name}:L{level}"), est.max);
            rep.set(&format!("mean_ratio:{name}:L{level}"), est.mean);
            maxima[fi].push(est.max);
        }
    }
    if levels.len() > 1 {
        let growth = maxima
            .iter()
            .map(|m| m[m.len() - 1] / m[0] - 1.0)
            .fold(f64::NEG_INFINITY, f64::max);
        rep.set("growth", growth);
        rep.assert(Assertion::at_most("growth", growth, 0.5));
    }
    rep.tables.push(table);
    Ok(rep)
}

/// Sweep shapes at complexity `c`: all mass in one slot, or in all three.
pub fn sweep_shapes(c: u8) -> Vec<[u8; 3]> {
    if c == 0 {
        vec![[0; 3]]
    } else {
        vec![[c, 0, 0], [0, c, 0], [0, 0, c], [c, c, c]]
    }
}

/// Least-squares `y ≈ a + s x` and the largest relative deviation from it.
pub fn affine_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let dev = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let fit = intercept + slope * a;
            (b - fit).abs() / fit.abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    (intercept, slope, dev)
}

pub(super) fn complexity_sweep(config: &Config) -> Result<Report> {
    let mesh = config.mesh()?;
    if config.kmax >= mesh.level() {
        return Err(Error::Resolution(format!("kmax {} needs L > {}", config.kmax, config.kmax)));
    }
    let exps = config.exponents()?;
    let sampler = config.sampler();
    let b = bmo_symbol(config.seed, mesh)?;
    let mut rep = Report::new(config, "partial, zero and haar slot 1");
    let mut table = DataTable::new("complexity", &["complexity", "k1", "k2", "k3", "max_ratio", "mean_ratio"]);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for c in 0..=config.kmax {
        let mut best = 0.0f64;
        for k in sweep_shapes(c) {
            let est = estimate_norm(&b, &partial_family(config, k), exps, config.trials, &sampler, config.seed)?;
            table.push(row![c, k[0], k[1], k[2], est.max, est.mean]);
            best = best.max(est.max);
        }
        rep.set(&format!("norm:{c}"), best);
        xs.push(1.0 + c as f64);
        ys.push(best);
    }
    let (intercept, slope, dev) = affine_fit(&xs, &ys);
    rep.set("fit:intercept", intercept);
    rep.set("fit:slope", slope);
    rep.set("fit:max_relative_deviation", dev);
    rep.assert(Assertion::at_most("linear-growth", dev, 0.2));
    rep.tables.push(table);
    Ok(rep)
}

pub(super) fn weak_type(config: &Config) -> Result<Report> {
    let mesh = config.mesh()?;
    let exps = config.exponents()?;
    exps.check_weak()?;
    let sampler = config.sampler();
    let b = bmo_symbol(config.seed, mesh)?;
    let mut rep = Report::new(config, format!("partial k={:?}, full {:?}", config.k, COMMUTATOR_FULL));
    let mut table = DataTable::new(
        "weak_type",
        &["family", "trial", "value", "f1_norm", "f2_norm", "e_measure", "e_prime_measure", "levels", "ratio"],
    );
    let families = [("partial", partial_family(config, config.k)), ("full", full_family(config))];
    for (salt, (name, fam)) in families.iter().enumerate() {
        let w = weak_type_verify(&b, fam, exps, config.trials, &sampler, config.seed ^ ((salt as u64 + 1) << 48))?;
        for t in &w.trials {
            table.push(row![name, t.trial, t.value, t.f1_norm, t.f2_norm, t.e_measure, t.e_prime_measure, t.levels, t.ratio]);
        }
        rep.set(&format!("max_ratio:{name}"), w.max_ratio);
        rep.set(&format!("median_ratio:{name}"), w.median_ratio);
        rep.assert(Assertion::at_least(&format!("e_prime_share:{name}"), w.min_e_prime_share, 0.99));
    }
    rep.tables.push(table);
    Ok(rep)
}

pub(super) fn duality(config: &Config) -> Result<Report> {
    let mut rep = Report::new(config, "none");
    let mut table = DataTable::new(
        "duality",
        &["L", "requested", "size", "aligned", "trial", "lhs", "a_lower", "a_upper", "integral", "ratio", "ratio_upper_norm", "min_coverage"],
    );
    let mut one = DataTable::new(
        "one_parameter",
        &["L", "requested", "size", "aligned", "trial", "k0_measure", "a_norm", "embedded_norm", "reduction_error", "ratio", "min_coverage"],
    );
    let (mut worst_c, mut best_c) = (0.0f64, f64::INFINITY);
    let (mut coverage, mut reduction) = (1.0f64, 0.0f64);
    let mut overall = 0.0f64;
    for &level in &config.levels() {
        let mesh = config.mesh_at(level)?;
        for (si, &size) in config.sizes.iter().enumerate() {
            let mut cell = 0.0f64;
            for aligned in [true, false] {
                for t in 0..config.trials {
                    let stream = ((level as u64) << 40) ^ ((si as u64) << 20) ^ (aligned as u64) << 60;
                    let mut rng = sample_rng(config.seed ^ stream, t);
                    let d = duality_instance(&mut rng, mesh, size, aligned)?.report()?;
                    table.push(row![
                        level, size, d.size, aligned, t, d.lhs, d.a_lower, d.a_upper, d.integral, d.ratio,
                        d.ratio_upper_norm, d.min_coverage
                    ]);
                    cell = cell.max(d.ratio);
                    coverage = coverage.min(d.min_coverage);
                    let o = one_parameter_duality(&mut rng, mesh, size, aligned)?;
                    one.push(row![
                        level, size, o.size, aligned, t, o.k0_measure, o.a_norm, o.embedded_norm, o.reduction_error,
                        o.ratio, o.min_coverage
                    ]);
                    coverage = coverage.min(o.min_coverage);
                    reduction = reduction.max(o.reduction_error);
                }
            }
            rep.set(&format!("C:L{level}:size{size}"), cell);
            worst_c = worst_c.max(cell);
            best_c = best_c.min(cell);
            overall = overall.max(cell);
        }
    }
    rep.set("C", overall);
    let spread = if best_c > 0.0 { worst_c / best_c } else { f64::INFINITY };
    rep.set("C_spread", spread);
    rep.assert(Assertion::at_least("coverage", coverage, 0.99));
    rep.assert(Assertion::at_most("one_parameter_reduction", reduction, 1e-12));
    rep.assert(Assertion::at_most("C_spread", spread, 2.0));
    rep.tables.push(table);
    rep.tables.push(one);
    Ok(rep)
}

/// `(k, v)` families of the synthesis run: the full paraproduct, `k` alone,
/// `v` alone (or `k` transposed) and the shift `(k, v)`.
pub fn synthesis_entries(config: &Config) -> Vec<SynthesisEntry> {
    let v = if config.v == [0; 3] { config.k } else { config.v };
    [([0; 3], [0; 3]), (config.k, [0; 3]), ([0; 3], v), (config.k, v)]
        .into_iter()
        .enumerate()
        .map(|(u, (k, v))| SynthesisEntry { k, v, u: u as u32, density: config.density, seed: config.seed ^ OPERATORS })
        .collect()
}

pub(super) fn synthesis(config: &Config) -> Result<Report> {
    let mesh = config.mesh()?;
    let r = config.exponents()?.r;
    let mut spec = SynthesisSpec::new(config.alpha, config.sampler());
    spec.entries = synthesis_entries(config);
    let mut rep = Report::new(config, "sum of paraproducts and shifts");
    let mut weights = DataTable::new("weights", &["u", "k1", "k2", "k3", "v1", "v2", "v3", "alpha"]);
    let mut kernel = 0.0;
    for e in &spec.entries {
        let a = compute_alpha(e.k, e.v, config.alpha)?;
        kernel += a.powf(r.min(1.0));
        weights.push(row![e.u, e.k[0], e.k[1], e.k[2], e.v[0], e.v[1], e.v[2], a]);
    }
    rep.set("alpha_budget", kernel);
    let b = bmo_symbol(config.seed, mesh)?;
    let mut table = DataTable::new("synthesis", &["trial", "total", "budget"]);
    let mut slack = f64::INFINITY;
    for t in 0..config.trials {
        let mut rng = sample_rng(config.seed ^ SYMBOL, t);
        let f1 = random_test_function(&mut rng, mesh);
        let f2 = random_test_function(&mut rng, mesh);
        let out = synthesize(&spec, &b, &f1, &f2)?;
        let (total, budget) = if r <= 1.0 {
            (lp_norm(&out.total, r, None)?.powf(r), quasi_norm_budget(&out.terms, r)?)
        } else {
            let sum = out.terms.iter().map(|g| lp_norm(g, r, None)).sum::<Result<f64>>()?;
            (lp_norm(&out.total, r, None)?, sum)
        };
        table.push(row![t, total, budget]);
        slack = slack.min(budget * (1.0 + 1e-12) - total);
    }
    rep.set("min_slack", slack);
    rep.assert(Assertion::at_least("quasi-triangle", slack, 0.0));
    rep.tables.push(weights);
    rep.tables.push(table);
    Ok(rep)
}
