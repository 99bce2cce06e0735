use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::analysis::Family;
use crate::dyadic::{Axis, DyadicCube, DyadicGrid, Factor, GridPair, GridShift, HaarIndex, Mesh, Profile};
use crate::signal::{FactorFunction, GridFunction, Table};

fn random(mesh: Mesh, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::from_fn(mesh, |_, _| rng.gen_range(-1.0..1.0))
}

fn shifted_pair(mesh: &Mesh, seed: u64) -> GridPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridPair::shifted(
        GridShift::sample(&mut rng, Axis::First, mesh.first()),
        GridShift::sample(&mut rng, Axis::Second, mesh.second()),
    )
    .unwrap()
}

#[test]
fn lp_norm_examples() {
    let mesh = Mesh::square(3).unwrap();
    let one = GridFunction::constant(mesh, 1.0);
    for p in [0.3, 2.0 / 3.0, 1.0, 2.0, 7.5, f64::INFINITY] {
        assert!((lp_norm(&one, p, None).unwrap() - 1.0).abs() < 1e-14);
        assert!((lp_norm(&one, p, Some(&Weight::unit(mesh))).unwrap() - 1.0).abs() < 1e-14);
    }
    let half = GridFunction::from_fn(mesh, |x1, _| if x1 < 4 { 1.0 } else { 0.0 });
    assert!((lp_norm(&half, 2.0 / 3.0, None).unwrap() - 0.5f64.powf(1.5)).abs() < 1e-14);
    for p in [0.0, -1.0, f64::NAN] {
        assert!(matches!(lp_norm(&one, p, None), Err(crate::Error::Exponent(_))));
    }
    let w = Weight::new(GridFunction::from_fn(mesh, |x1, _| if x1 < 4 { 3.0 } else { 1.0 })).unwrap();
    assert!((lp_norm(&one, 2.0, Some(&w)).unwrap() - 2.0f64.sqrt()).abs() < 1e-14);
    assert!(Weight::new(GridFunction::zeros(mesh)).is_err());
}

#[test]
fn lp_quasi_triangle_and_homogeneity() {
    let mesh = Mesh::square(4).unwrap();
    let r = 2.0 / 3.0;
    for seed in 0..100 {
        let f = random(mesh, seed);
        let g = random(mesh, seed + 1000);
        let lhs = lp_norm(&(&f + &g), r, None).unwrap().powf(r);
        let rhs = lp_norm(&f, r, None).unwrap().powf(r) + lp_norm(&g, r, None).unwrap().powf(r);
        assert!(lhs <= rhs * (1.0 + 1e-12));
    }
    let f = random(mesh, 1);
    for p in [0.5, 1.0, 3.0, f64::INFINITY] {
        let a = lp_norm(&f.scale(-2.5), p, None).unwrap();
        assert!((a - 2.5 * lp_norm(&f, p, None).unwrap()).abs() < 1e-12 * a);
    }
}

#[test]
fn bmo_examples() {
    let mesh = Mesh::square(3).unwrap();
    let grids = shifted_pair(&mesh, 1);
    let c = GridFunction::constant(mesh, 5.0);
    for mode in [BmoMode::Dyadic(&grids), BmoMode::NonDyadic, BmoMode::DyadicSlices(&grids), BmoMode::Slices] {
        assert!(bmo_norm(&c, mode).unwrap() < 1e-12);
        let b = random(mesh, 2);
        let x = bmo_norm(&b, mode).unwrap();
        assert!((bmo_norm(&(&b + &c), mode).unwrap() - x).abs() < 1e-12);
        assert!((bmo_norm(&b.scale(-3.0), mode).unwrap() - 3.0 * x).abs() < 1e-12);
    }
    let factor = Factor::new(1, 4).unwrap();
    let grid = DyadicGrid::standard(Axis::First, factor);
    let h = FactorFunction::from_values(factor, HaarIndex::new(grid.cube(0), 1).unwrap().values()).unwrap();
    assert!((factor_bmo_norm(&h, Family::Dyadic(&grid)).unwrap() - 1.0).abs() < 1e-14);
    // Every dyadic cube is mesh aligned, so the non-dyadic norm dominates.
    assert!(factor_bmo_norm(&h, Family::All).unwrap() >= 1.0);
}

#[test]
fn nondyadic_bmo_dominates_shifted_dyadic() {
    let mesh = Mesh::square(3).unwrap();
    for seed in 0..20 {
        let b = random(mesh, seed);
        let grids = shifted_pair(&mesh, seed + 7);
        assert!(bmo_norm(&b, BmoMode::NonDyadic).unwrap() + 1e-12 >= bmo_norm(&b, BmoMode::Dyadic(&grids)).unwrap());
        assert!(bmo_norm(&b, BmoMode::Slices).unwrap() + 1e-12 >= bmo_norm(&b, BmoMode::DyadicSlices(&grids)).unwrap());
    }
}

#[test]
fn little_bmo_is_comparable_to_slice_bmo() {
    let mesh = Mesh::square(4).unwrap();
    let grids = GridPair::standard(&mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut lo, mut hi) = (f64::MAX, 0.0f64);
    for _ in 0..50 {
        let b = generate_bmo_function(&mut rng, mesh, 1.0, BmoMode::Dyadic(&grids)).unwrap();
        let r = bmo_norm(&b, BmoMode::DyadicSlices(&grids)).unwrap();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    // Slices never exceed twice the rectangle norm; the reverse bracket is empirical.
    assert!(hi <= 2.0 + 1e-12 && lo > 0.25, "slice / bmo ratios in [{lo}, {hi}]");
}

#[test]
fn cube_sequence_bmo_examples() {
    let grid = DyadicGrid::standard(Axis::Second, Factor::new(1, 5).unwrap());
    let mut a = vec![0.0; grid.cube_count()];
    a[0] = -0.7;
    assert!((cube_sequence_bmo(&grid, &a).unwrap() - 0.7).abs() < 1e-15);
    let a: Vec<f64> = (0..grid.cube_count()).map(|id| grid.cube(id).measure().sqrt()).collect();
    assert!((cube_sequence_bmo(&grid, &a).unwrap() - 6f64.sqrt()).abs() < 1e-12);
    assert_eq!(cube_sequence_bmo(&grid, &vec![0.0; grid.cube_count()]).unwrap(), 0.0);
    assert!(cube_sequence_bmo(&grid, &[1.0]).is_err());
    // Brute force over V₀.
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a: Vec<f64> = (0..grid.cube_count()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut want = 0.0f64;
    for v0 in 0..grid.cube_count() {
        let q0 = grid.cube(v0);
        let s: f64 = (0..grid.cube_count()).filter(|&v| q0.contains(&grid.cube(v))).map(|v| a[v] * a[v]).sum();
        want = want.max((s / q0.measure()).sqrt());
    }
    assert!((cube_sequence_bmo(&grid, &a).unwrap() - want).abs() < 1e-12);
}

#[test]
fn single_rectangle_product_bmo() {
    let mesh = Mesh::square(4).unwrap();
    let grids = GridPair::standard(&mesh);
    let i = DyadicCube::new(Axis::First, mesh.first(), 2, [4, 0]).unwrap();
    let j = DyadicCube::new(Axis::Second, mesh.second(), 1, [8, 0]).unwrap();
    let hi = FactorFunction::from_values(mesh.first(), HaarIndex::new(i, 1).unwrap().values()).unwrap();
    let hj = FactorFunction::from_values(mesh.second(), HaarIndex::new(j, 1).unwrap().values()).unwrap();
    let b = GridFunction::tensor(&hi, &hj).unwrap().scale(-1.5);
    let est = product_bmo_estimate(&b, &grids, &OmegaFamily::with_thresholds()).unwrap();
    let want = 1.5 / (i.measure() * j.measure()).sqrt();
    assert!((est.rectangles - want).abs() < 1e-12);
    assert!(est.lower >= est.rectangles && est.upper + 1e-12 >= est.lower);
    let c = product_bmo_estimate(&GridFunction::constant(mesh, 2.0), &grids, &OmegaFamily::with_thresholds()).unwrap();
    assert!(c.lower < 1e-12 && c.upper < 1e-12);
}

#[test]
fn product_bmo_family_brackets() {
    let mesh = Mesh::square(3).unwrap();
    for seed in 0..10 {
        let grids = shifted_pair(&mesh, seed);
        let b = random(mesh, seed);
        let seq = RectangleSequence::from_function(&b, &grids).unwrap();
        let mut fam = OmegaFamily::with_thresholds();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..5 {
            fam.sets.push((0..mesh.len()).filter(|_| rng.gen_bool(0.5)).collect());
        }
        let est = rectangle_sequence_bmo(&seq, &fam).unwrap();
        for set in &fam.sets {
            if !set.is_empty() {
                assert!(seq.value_on(set).unwrap() <= est.lower + 1e-12);
                assert!(seq.value_on(set).unwrap() <= est.upper + 1e-12);
            }
        }
        assert!(est.rectangles <= est.lower && est.lower <= est.upper + 1e-12);
        // The whole torus is a superlevel set.
        let all: Vec<usize> = (0..mesh.len()).collect();
        assert!(seq.value_on(&all).unwrap() <= est.lower + 1e-12);
    }
}

#[test]
fn embedded_norm_reduction_is_exact() {
    for level in [3u8, 4, 5] {
        let mesh = Mesh::square(level).unwrap();
        let grids = shifted_pair(&mesh, level as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a: Vec<f64> = (0..grids.second.cube_count())
            .map(|v| if grids.second.level_of(v) < level { rng.gen_range(-1.0..1.0) } else { 0.0 })
            .collect();
        for k0 in [0, 1, grids.first.level_ids(2).start + 1] {
            let mut t = Table::zeros(grids.first.cube_count(), grids.second.cube_count());
            t.row_mut(k0).copy_from_slice(&a);
            let est = rectangle_sequence_bmo(&RectangleSequence::new(grids.clone(), &t).unwrap(), &OmegaFamily::rectangles()).unwrap();
            let want = grids.first.cube(k0).measure().powf(-0.5) * cube_sequence_bmo(&grids.second, &a).unwrap();
            assert!((est.rectangles - want).abs() < 1e-12 * want);
        }
    }
}

#[test]
fn little_bmo_embeds_in_product_bmo() {
    let mesh = Mesh::square(4).unwrap();
    let grids = GridPair::standard(&mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let b = generate_bmo_function(&mut rng, mesh, 1.0, BmoMode::Dyadic(&grids)).unwrap();
        let est = product_bmo_estimate(&b, &grids, &OmegaFamily::with_thresholds()).unwrap();
        worst = worst.max(est.lower);
    }
    assert!(worst.is_finite() && worst < 10.0, "C = {worst}");
}

#[test]
fn ap_examples() {
    let mesh = Mesh::square(3).unwrap();
    let unit = Weight::unit(mesh);
    for mode in [ApMode::BiParameter, ApMode::OneParameter(Axis::First), ApMode::OneParameter(Axis::Second)] {
        assert!((ap_characteristic(&unit, 2.0, mode).unwrap() - 1.0).abs() < 1e-14);
        assert!((ap_characteristic(&unit, 1.5, mode).unwrap() - 1.0).abs() < 1e-14);
    }
    assert!(ap_characteristic(&unit, 1.0, ApMode::BiParameter).is_err());
    let factor = Factor::new(1, 3).unwrap();
    let w = FactorFunction::from_fn(factor, |x| if x < 4 { 2.0 } else { 1.0 });
    assert!((factor_ap_characteristic(&w, 2.0).unwrap() - 9.0 / 8.0).abs() < 1e-14);
}

#[test]
fn ap_slices_are_dominated() {
    let mesh = Mesh::square(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..20 {
        let w = generate_weight(&mut rng, mesh, 0.5).unwrap();
        let bi = ap_characteristic(&w, 2.0, ApMode::BiParameter).unwrap();
        for axis in [Axis::First, Axis::Second] {
            assert!(ap_characteristic(&w, 2.0, ApMode::OneParameter(axis)).unwrap() <= bi + 1e-12);
        }
        assert!(bi > 1.0);
        // Cached value is returned unchanged.
        assert_eq!(ap_characteristic(&w, 2.0, ApMode::BiParameter).unwrap(), bi);
    }
}

#[test]
fn bi_parameter_ap_matches_brute_force() {
    let mesh = Mesh::square(2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let w = Weight::new(GridFunction::from_fn(mesh, |_, _| rng.gen_range(0.2..3.0))).unwrap();
    let p = 3.0;
    let mut want = 0.0f64;
    for a1 in 0..4 {
        for s1 in 1..=4 {
            for a2 in 0..4 {
                for s2 in 1..=4 {
                    let cells: Vec<(usize, usize)> =
                        (0..s1).flat_map(|u| (0..s2).map(move |v| ((a1 + u) % 4, (a2 + v) % 4))).collect();
                    let n = cells.len() as f64;
                    let x: f64 = cells.iter().map(|&(i, j)| w.function().get(i, j)).sum::<f64>() / n;
                    let y: f64 = cells.iter().map(|&(i, j)| w.function().get(i, j).powf(-0.5)).sum::<f64>() / n;
                    want = want.max(x * y * y);
                }
            }
        }
    }
    assert!((ap_characteristic(&w, p, ApMode::BiParameter).unwrap() - want).abs() < 1e-12 * want);
}

#[test]
fn generators() {
    let mesh = Mesh::square(4).unwrap();
    let grids = GridPair::standard(&mesh);
    let mut r1 = ChaCha8Rng::seed_from_u64(1);
    let mut r2 = ChaCha8Rng::seed_from_u64(2);
    for mode in [BmoMode::Dyadic(&grids), BmoMode::Slices] {
        let b = generate_bmo_function(&mut r1, mesh, 1.0, mode).unwrap();
        assert!((bmo_norm(&b, mode).unwrap() - 1.0).abs() < 1e-9);
        assert!(b.mean().abs() < 1e-12);
        let c = generate_bmo_function(&mut r2, mesh, 1.0, mode).unwrap();
        assert!(b.distance(&c) > 1e-3);
    }
    assert!(generate_bmo_function(&mut r1, mesh, 0.0, BmoMode::Slices).is_err());
    let w0 = generate_weight(&mut ChaCha8Rng::seed_from_u64(3), mesh, 0.0).unwrap();
    assert!((ap_characteristic(&w0, 2.0, ApMode::BiParameter).unwrap() - 1.0).abs() < 1e-14);
    let mut prev = 1.0;
    for lambda in [0.125, 0.25, 0.5, 1.0] {
        let w = generate_weight(&mut ChaCha8Rng::seed_from_u64(3), mesh, lambda).unwrap();
        let a = ap_characteristic(&w, 2.0, ApMode::BiParameter).unwrap();
        assert!(a > prev, "λ = {lambda}: {a} ≤ {prev}");
        prev = a;
    }
    // Generated coefficients live on the standard grid's Haar functions only.
    let b = generate_bmo_function(&mut r1, mesh, 1.0, BmoMode::Dyadic(&grids)).unwrap();
    let t = crate::signal::pairing_table(&b, &grids, Profile::Average, Profile::Average).unwrap();
    assert!(t.get(0, 0).abs() < 1e-12);
}
