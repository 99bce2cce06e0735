use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::dyadic::{Axis, DyadicCube, DyadicGrid, DyadicRectangle, GridPair, GridShift, HaarIndex, Mesh, Profile};

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

fn haar_fn(mesh: Mesh, h1: &HaarIndex, h2: &HaarIndex) -> GridFunction {
    let a = FactorFunction::from_values(mesh.first(), h1.values()).unwrap();
    let b = FactorFunction::from_values(mesh.second(), h2.values()).unwrap();
    GridFunction::tensor(&a, &b).unwrap()
}

fn cube(axis: Axis, mesh: &Mesh, level: u8, origin: u32) -> DyadicCube {
    DyadicCube::new(axis, mesh.factor(axis), level, [origin, 0]).unwrap()
}

#[test]
fn pair_examples() {
    let mesh = Mesh::square(3).unwrap();
    let one = GridFunction::constant(mesh, 1.0);
    assert!((pair(&one, &one).unwrap() - 1.0).abs() < 1e-15);
    let i = cube(Axis::First, &mesh, 1, 4);
    let j = cube(Axis::Second, &mesh, 2, 2);
    let h = haar_fn(mesh, &HaarIndex::new(i, 1).unwrap(), &HaarIndex::new(j, 1).unwrap());
    assert!(pair(&h, &one).unwrap().abs() < 1e-15);
    assert!((pair(&h, &h).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn haar_pair_examples() {
    let mesh = Mesh::square(3).unwrap();
    let i = HaarIndex::new(cube(Axis::First, &mesh, 1, 0), 1).unwrap();
    let j = HaarIndex::new(cube(Axis::Second, &mesh, 2, 4), 1).unwrap();
    let h = haar_fn(mesh, &i, &j);
    assert!((haar_pair(&h, &i, &j).unwrap() - 1.0).abs() < 1e-12);
    assert!(haar_pair(&GridFunction::constant(mesh, 3.0), &i, &j).unwrap().abs() < 1e-15);
    let half = GridFunction::from_fn(mesh, |x1, _| if x1 < 4 { 1.0 } else { 0.0 });
    let top1 = HaarIndex::new(DyadicCube::torus(Axis::First, mesh.first()), 1).unwrap();
    let top2 = HaarIndex::new(DyadicCube::torus(Axis::Second, mesh.second()), 1).unwrap();
    assert!(haar_pair(&half, &top1, &top2).unwrap().abs() < 1e-15);
    assert!(haar_pair(&half, &top1, &HaarIndex::new(*top2.cube(), 0).unwrap()).unwrap().abs() > 0.1);
}

#[test]
fn partial_pair_examples() {
    let mesh = Mesh::square(3).unwrap();
    let g = FactorFunction::from_fn(mesh.first(), |x| (x as f64).sin());
    let u = FactorFunction::from_fn(mesh.second(), |x| 1.0 + x as f64);
    let f = GridFunction::tensor(&g, &u).unwrap();
    let h = HaarIndex::new(cube(Axis::First, &mesh, 1, 4), 1).unwrap();
    let gh = FactorFunction::from_values(mesh.first(), h.values()).unwrap();
    let got = partial_pair(&f, &h, Axis::First).unwrap();
    let c = g.pair(&gh).unwrap();
    for (a, b) in got.values().iter().zip(u.values()) {
        assert!((a - c * b).abs() < 1e-12);
    }
    let z = partial_pair(&GridFunction::constant(mesh, 1.0), &h, Axis::First).unwrap();
    assert!(z.max_abs() < 1e-15);
    let hj = HaarIndex::new(cube(Axis::Second, &mesh, 2, 2), 1).unwrap();
    let hh = haar_fn(mesh, &h, &hj);
    let got = partial_pair(&hh, &h, Axis::First).unwrap();
    for (a, b) in got.values().iter().zip(hj.values()) {
        assert!((a - b).abs() < 1e-12);
    }
    assert!(partial_pair(&hh, &h, Axis::Second).is_err());
}

#[test]
fn cube_average_examples() {
    let mesh = Mesh::square(3).unwrap();
    let r = DyadicRectangle::new(cube(Axis::First, &mesh, 1, 4), cube(Axis::Second, &mesh, 2, 6)).unwrap();
    assert!((cube_average(&GridFunction::constant(mesh, 2.5), &r).unwrap() - 2.5).abs() < 1e-14);
    let h = haar_fn(
        mesh,
        &HaarIndex::new(r.first, 1).unwrap(),
        &HaarIndex::new(r.second, 1).unwrap(),
    );
    assert!(cube_average(&h, &r).unwrap().abs() < 1e-14);
    let left = GridFunction::from_fn(mesh, |x1, _| if (4..6).contains(&x1) { 1.0 } else { 0.0 });
    assert!((cube_average(&left, &r).unwrap() - 0.5).abs() < 1e-14);
    let one_axis = axis_average(&left, &r.first).unwrap();
    assert!(one_axis.values().iter().all(|v| (v - 0.5).abs() < 1e-14));
}

#[test]
fn martingale_difference_examples() {
    let mesh = Mesh::square(4).unwrap();
    let c = GridFunction::constant(mesh, 1.7);
    let i = cube(Axis::First, &mesh, 2, 4);
    let j = cube(Axis::Second, &mesh, 1, 8);
    for mode in [Martingale::Delta(i), Martingale::Delta(j), Martingale::Rect(i, j)] {
        assert!(martingale_difference(&c, &mode).unwrap().max_abs() < 1e-14);
    }
    let e = martingale_difference(&c, &Martingale::Expect(i)).unwrap();
    let ind = GridFunction::from_fn(mesh, |x1, _| if i.contains_cell(x1) { 1.7 } else { 0.0 });
    assert!(e.distance(&ind) < 1e-14);

    let h = HaarIndex::new(i, 1).unwrap();
    let u = FactorFunction::from_fn(mesh.second(), |x| (x as f64).cos());
    let f = GridFunction::tensor(&FactorFunction::from_values(mesh.first(), h.values()).unwrap(), &u).unwrap();
    assert!(martingale_difference(&f, &Martingale::Delta(i)).unwrap().distance(&f) < 1e-12);

    let finest = cube(Axis::First, &mesh, 4, 3);
    assert!(martingale_difference(&c, &Martingale::Delta(finest)).is_err());
}

#[test]
fn rectangle_difference_is_the_composition_in_both_orders() {
    let mesh = Mesh::new(1, 2, 3).unwrap();
    let f = random(mesh, 11);
    let grids = shifted_pair(&mesh, 5);
    for i in grids.first.cubes(1).unwrap() {
        for j in grids.second.cubes(2).unwrap() {
            let r = martingale_difference(&f, &Martingale::Rect(i, j)).unwrap();
            let a = martingale_difference(&martingale_difference(&f, &Martingale::Delta(j)).unwrap(), &Martingale::Delta(i))
                .unwrap();
            let b = martingale_difference(&martingale_difference(&f, &Martingale::Delta(i)).unwrap(), &Martingale::Delta(j))
                .unwrap();
            assert!(r.distance(&a) < 1e-12 && r.distance(&b) < 1e-12);
        }
    }
}

#[test]
fn delta_is_the_haar_projection() {
    let mesh = Mesh::new(2, 1, 3).unwrap();
    let f = random(mesh, 3);
    let i = cube(Axis::First, &mesh, 1, 4);
    let mut expect = GridFunction::zeros(mesh);
    for p in Profile::cancellative(2) {
        let g = partial_profile_pair(&f, &i, p).unwrap();
        let h = FactorFunction::from_values(mesh.first(), crate::dyadic::profile_values(&i, p)).unwrap();
        expect += &GridFunction::tensor(&h, &g).unwrap();
    }
    let d = martingale_difference(&f, &Martingale::Delta(i)).unwrap();
    assert!(d.distance(&expect) < 1e-12);
}

#[test]
fn block_examples_and_telescoping() {
    let mesh = Mesh::square(4).unwrap();
    let f = random(mesh, 8);
    let k = cube(Axis::First, &mesh, 1, 0);
    let b0 = martingale_block(&f, &k, 0, None).unwrap();
    assert!(b0.distance(&martingale_difference(&f, &Martingale::Delta(k)).unwrap()) < 1e-14);
    assert!(martingale_block(&GridFunction::constant(mesh, 2.0), &k, 2, None).unwrap().max_abs() < 1e-14);
    assert!(martingale_block(&f, &k, 3, None).is_err());

    // f = Σ_j E at level 1 + Σ_{K at level 1} Σ_{i} Δ_{K,i} f along the first axis.
    let grid = DyadicGrid::standard(Axis::First, mesh.first());
    let mut sum = GridFunction::zeros(mesh);
    for q in grid.cubes(1).unwrap() {
        sum += &martingale_difference(&f, &Martingale::Expect(q)).unwrap();
        for i in 0..3 {
            sum += &martingale_block(&f, &q, i, None).unwrap();
        }
    }
    assert!(sum.distance(&f) < 1e-12);

    let v = cube(Axis::Second, &mesh, 2, 4);
    let bi = martingale_block(&f, &k, 1, Some((&v, 1))).unwrap();
    let mut direct = GridFunction::zeros(mesh);
    for a in grid.descendants(grid.id_of(&k).unwrap(), 1).unwrap() {
        let g2 = DyadicGrid::standard(Axis::Second, mesh.second());
        for b in g2.descendants(g2.id_of(&v).unwrap(), 1).unwrap() {
            direct += &martingale_difference(&f, &Martingale::Rect(grid.cube(a), g2.cube(b))).unwrap();
        }
    }
    assert!(bi.distance(&direct) < 1e-12);
}

#[test]
fn idempotence_and_orthogonality() {
    let mesh = Mesh::square(4).unwrap();
    let f = random(mesh, 21);
    let grid = DyadicGrid::standard(Axis::Second, mesh.second());
    let cubes = grid.cubes(2).unwrap();
    let d: Vec<_> = cubes.iter().map(|q| martingale_difference(&f, &Martingale::Delta(*q)).unwrap()).collect();
    for (a, qa) in cubes.iter().enumerate() {
        let dd = martingale_difference(&d[a], &Martingale::Delta(*qa)).unwrap();
        assert!(dd.distance(&d[a]) < 1e-12);
        for (b, _) in cubes.iter().enumerate().filter(|&(b, _)| b != a) {
            assert!(martingale_difference(&d[b], &Martingale::Delta(*qa)).unwrap().max_abs() < 1e-12);
        }
    }
}

#[test]
fn haar_orthonormality_on_shifted_grids() {
    let mesh = Mesh::new(2, 1, 2).unwrap();
    let grids = shifted_pair(&mesh, 9);
    let mut idx = Vec::new();
    for id in grids.first.coarse_ids() {
        for eta in 1..4 {
            idx.push(HaarIndex::new(grids.first.cube(id), eta).unwrap());
        }
    }
    let mut jdx = Vec::new();
    for id in grids.second.coarse_ids() {
        jdx.push(HaarIndex::new(grids.second.cube(id), 1).unwrap());
    }
    let fns: Vec<_> = idx.iter().flat_map(|a| jdx.iter().map(move |b| (*a, *b))).collect();
    for (p, (a, b)) in fns.iter().enumerate() {
        let f = haar_fn(mesh, a, b);
        for (q, (c, d)) in fns.iter().enumerate() {
            let v = haar_pair(&f, c, d).unwrap();
            let want = if p == q { 1.0 } else { 0.0 };
            assert!((v - want).abs() < 1e-12, "{p} {q} {v}");
        }
    }
}

#[test]
fn tables_match_direct_pairings() {
    let mesh = Mesh::new(1, 2, 3).unwrap();
    let f = random(mesh, 4);
    let grids = shifted_pair(&mesh, 17);
    for (p1, p2) in [(Profile::Haar(1), Profile::Haar(3)), (Profile::Average, Profile::HaarZero)] {
        let t = pairing_table(&f, &grids, p1, p2).unwrap();
        for a in grids.first.coarse_ids() {
            for b in grids.second.coarse_ids() {
                let direct = profile_pair(&f, &grids.first.cube(a), p1, &grids.second.cube(b), p2).unwrap();
                assert!((t.get(a, b) - direct).abs() < 1e-12);
            }
        }
    }
    let t = axis_coefficients(&f, &grids.second, Profile::Haar(2)).unwrap();
    for b in grids.second.coarse_ids() {
        let g = partial_profile_pair(&f, &grids.second.cube(b), Profile::Haar(2)).unwrap();
        for (x, y) in t.row(b).iter().zip(g.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

fn reconstruct(f: &GridFunction, grids: &GridPair) -> GridFunction {
    let mesh = f.mesh();
    let mut out = GridFunction::constant(mesh, f.mean());
    let p1s: Vec<_> = Profile::cancellative(mesh.n()).collect();
    let p2s: Vec<_> = Profile::cancellative(mesh.m()).collect();
    // Top averages times cancellative terms on the other axis, then rectangles.
    let top = |axis: Axis| grids.grid(axis).level_ids(0).start;
    for &p2 in &p2s {
        let t = pairing_table(f, grids, Profile::HaarZero, p2).unwrap();
        let mut keep = Table::zeros(t.rows(), t.cols());
        for b in grids.second.coarse_ids() {
            keep.set(top(Axis::First), b, t.get(top(Axis::First), b));
        }
        out += &synthesize_table(&keep, grids, Profile::HaarZero, p2);
    }
    for &p1 in &p1s {
        let t = pairing_table(f, grids, p1, Profile::HaarZero).unwrap();
        let mut keep = Table::zeros(t.rows(), t.cols());
        for a in grids.first.coarse_ids() {
            keep.set(a, top(Axis::Second), t.get(a, top(Axis::Second)));
        }
        out += &synthesize_table(&keep, grids, p1, Profile::HaarZero);
        for &p2 in &p2s {
            let t = pairing_table(f, grids, p1, p2).unwrap();
            out += &synthesize_table(&t, grids, p1, p2);
        }
    }
    out
}

#[test]
fn bi_parameter_reconstruction_and_parseval() {
    for (mesh, seed) in [(Mesh::square(4).unwrap(), 1), (Mesh::new(2, 1, 3).unwrap(), 2), (Mesh::new(2, 2, 2).unwrap(), 3)] {
        for t in 0..5 {
            let f = random(mesh, 100 * seed + t);
            let grids = shifted_pair(&mesh, seed + t);
            assert!(reconstruct(&f, &grids).distance(&f) < 1e-12);

            let mut energy = f.mean().powi(2);
            let tables = |p1, p2| pairing_table(&f, &grids, p1, p2).unwrap();
            let top1 = grids.first.level_ids(0).start;
            let top2 = grids.second.level_ids(0).start;
            for p2 in Profile::cancellative(mesh.m()) {
                let t = tables(Profile::HaarZero, p2);
                energy += t.row(top1).iter().map(|v| v * v).sum::<f64>();
            }
            for p1 in Profile::cancellative(mesh.n()) {
                let t = tables(p1, Profile::HaarZero);
                energy += (0..t.rows()).map(|a| t.get(a, top2).powi(2)).sum::<f64>();
                for p2 in Profile::cancellative(mesh.m()) {
                    energy += tables(p1, p2).data().iter().map(|v| v * v).sum::<f64>();
                }
            }
            let norm2 = pair(&f, &f).unwrap();
            assert!((energy - norm2).abs() < 1e-12 * norm2.max(1.0));
        }
    }
}

#[test]
fn one_parameter_reconstruction() {
    let mesh = Mesh::new(2, 1, 3).unwrap();
    let f = random(mesh, 77);
    let grid = DyadicGrid::shifted(GridShift::from_bits(Axis::First, mesh.first(), vec![1, 2, 3]).unwrap());
    let mut avg = axis_coefficients(&f, &grid, Profile::Average).unwrap();
    for id in 1..avg.rows() {
        avg.row_mut(id).iter_mut().for_each(|v| *v = 0.0);
    }
    let mut out = axis_synthesis(&avg, &grid, Profile::Average, mesh);
    for p in Profile::cancellative(2) {
        out += &axis_synthesis(&axis_coefficients(&f, &grid, p).unwrap(), &grid, p, mesh);
    }
    assert!(out.distance(&f) < 1e-12);
}

#[test]
fn serialization_round_trips() {
    let mesh = Mesh::new(1, 2, 2).unwrap();
    let f = random(mesh, 5);
    let mut bin = Vec::new();
    io::write_binary(&f, &mut bin).unwrap();
    assert_eq!(io::read_binary(&bin[..]).unwrap(), f);
    let mut text = Vec::new();
    io::write_csv(&f, &mut text).unwrap();
    assert!(String::from_utf8_lossy(&text).starts_with("# dyadic-lab grid-function v1 n=1 m=2 L=2"));
    assert_eq!(io::read_csv(&text[..]).unwrap(), f);
    assert!(io::read_binary(&b"XXXX"[..]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn synthesis_inverts_coefficients(seed in any::<u64>(), bits in proptest::collection::vec(0u8..2, 4)) {
        let mesh = Mesh::square(4).unwrap();
        let f = random(mesh, seed);
        let grid = DyadicGrid::shifted(GridShift::from_bits(Axis::Second, mesh.second(), bits).unwrap());
        let mut out = GridFunction::zeros(mesh);
        let mut avg = axis_coefficients(&f, &grid, Profile::Average).unwrap();
        for id in 1..avg.rows() {
            avg.row_mut(id).iter_mut().for_each(|v| *v = 0.0);
        }
        out += &axis_synthesis(&avg, &grid, Profile::Average, mesh);
        out += &axis_synthesis(&axis_coefficients(&f, &grid, Profile::Haar(1)).unwrap(), &grid, Profile::Haar(1), mesh);
        prop_assert!(out.distance(&f) < 1e-12);
    }

    #[test]
    fn deltas_commute_across_axes(seed in any::<u64>(), a in 0u32..4, b in 0u32..2) {
        let mesh = Mesh::square(3).unwrap();
        let f = random(mesh, seed);
        let i = cube(Axis::First, &mesh, 2, 2 * a);
        let j = cube(Axis::Second, &mesh, 1, 4 * b);
        let x = martingale_difference(&martingale_difference(&f, &Martingale::Delta(i)).unwrap(), &Martingale::Delta(j)).unwrap();
        let y = martingale_difference(&martingale_difference(&f, &Martingale::Delta(j)).unwrap(), &Martingale::Delta(i)).unwrap();
        prop_assert!(x.distance(&y) < 1e-12);
    }

    #[test]
    fn delta_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), c in -3.0f64..3.0) {
        let mesh = Mesh::square(3).unwrap();
        let f = random(mesh, s1);
        let g = random(mesh, s2);
        let q = cube(Axis::First, &mesh, 1, 4);
        let lhs = martingale_difference(&(&f + &(c * &g)), &Martingale::Delta(q)).unwrap();
        let rhs = &martingale_difference(&f, &Martingale::Delta(q)).unwrap() + &(c * &martingale_difference(&g, &Martingale::Delta(q)).unwrap());
        prop_assert!(lhs.distance(&rhs) < 1e-12);
    }
}
