use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;

fn line(level: u8) -> Factor {
    Factor::new(1, level).unwrap()
}

fn names(cubes: &[DyadicCube]) -> Vec<String> {
    cubes.iter().map(|c| c.to_string()).collect()
}

#[test]
fn standard_levels_zero_and_one() {
    let g = DyadicGrid::standard(Axis::First, line(3));
    assert_eq!(names(&enumerate_cubes(&g, 0).unwrap()), ["[0,1)"]);
    assert_eq!(names(&enumerate_cubes(&g, 1).unwrap()), ["[0,1/2)", "[1/2,1)"]);
    assert!(enumerate_cubes(&g, 4).is_err());
}

#[test]
fn quarter_shift_at_level_one() {
    // A translation of 1/4 for level-1 cubes comes from the scale-2 bit.
    let f = line(3);
    let shift = GridShift::from_bits(Axis::First, f, vec![0, 1, 0]).unwrap();
    let g = DyadicGrid::shifted(shift);
    assert_eq!(names(&g.cubes(1).unwrap()), ["[1/4,3/4)", "[3/4,1)∪[0,1/4)"]);
}

#[test]
fn ancestors_in_the_standard_grid() {
    let f = line(3);
    let g = DyadicGrid::standard(Axis::First, f);
    let q = DyadicCube::new(Axis::First, f, 2, [0, 0]).unwrap();
    assert_eq!(g.ancestor(&q, 1).unwrap().to_string(), "[0,1/2)");
    assert_eq!(g.ancestor(&q, 0).unwrap(), q);
    let e = DyadicCube::new(Axis::First, f, 3, [3, 0]).unwrap();
    assert_eq!(e.to_string(), "[3/8,1/2)");
    assert_eq!(g.ancestor(&e, 1).unwrap().to_string(), "[1/4,1/2)");
    assert_eq!(g.ancestor(&e, 2).unwrap().to_string(), "[0,1/2)");
    assert_eq!(g.ancestor(&e, 3).unwrap().to_string(), "[0,1)");
    assert!(g.ancestor(&e, 4).is_err());
}

#[test]
fn children_examples() {
    let f = line(3);
    let top = DyadicCube::torus(Axis::First, f);
    assert_eq!(names(&top.children().unwrap()), ["[0,1/2)", "[1/2,1)"]);
    let right = DyadicCube::new(Axis::First, f, 1, [4, 0]).unwrap();
    assert_eq!(names(&right.children().unwrap()), ["[1/2,3/4)", "[3/4,1)"]);
    let wrapped = DyadicCube::new(Axis::First, f, 1, [6, 0]).unwrap();
    assert_eq!(wrapped.to_string(), "[3/4,1)∪[0,1/4)");
    assert_eq!(names(&wrapped.children().unwrap()), ["[3/4,1)", "[0,1/4)"]);
    let finest = DyadicCube::new(Axis::First, f, 3, [1, 0]).unwrap();
    assert!(finest.children().is_err());
}

#[test]
fn shift_cube_examples() {
    let f = line(3);
    let omega = GridShift::from_bits(Axis::First, f, vec![0, 1, 0]).unwrap();
    let left = DyadicCube::new(Axis::First, f, 1, [0, 0]).unwrap();
    assert_eq!(shift_cube(&left, &omega).unwrap().to_string(), "[1/4,3/4)");
    let right = DyadicCube::new(Axis::First, f, 1, [4, 0]).unwrap();
    assert_eq!(shift_cube(&right, &omega).unwrap().to_string(), "[3/4,1)∪[0,1/4)");
    let zero = GridShift::zero(Axis::First, f);
    assert_eq!(shift_cube(&right, &zero).unwrap(), right);
    // The scale-1 bit never moves a cube of level >= 1.
    let top_bit = GridShift::from_bits(Axis::First, f, vec![1, 0, 0]).unwrap();
    assert_eq!(shift_cube(&right, &top_bit).unwrap(), right);
}

#[test]
fn shifting_does_not_commute_with_ancestors_in_general() {
    // I = [0,1/4), ω² = 1: I + ω = [0,1/4) (scale 2 is not below ℓ(I)),
    // while I^(1) + ω = [1/4,3/4) and the shifted parent of [0,1/4) wraps.
    let f = line(3);
    let omega = GridShift::from_bits(Axis::First, f, vec![0, 1, 0]).unwrap();
    let std = DyadicGrid::standard(Axis::First, f);
    let shifted = DyadicGrid::shifted(omega.clone());
    let i = DyadicCube::new(Axis::First, f, 2, [0, 0]).unwrap();
    let a = shift_cube(&std.ancestor(&i, 1).unwrap(), &omega).unwrap();
    let b = shifted.ancestor(&shift_cube(&i, &omega).unwrap(), 1).unwrap();
    assert_eq!(a.to_string(), "[1/4,3/4)");
    assert_eq!(b.to_string(), "[3/4,1)∪[0,1/4)");
}

#[test]
fn one_level_shift_support() {
    let f = line(1);
    let shifts = ShiftSampler::AllBits.axis_shifts(&Mesh::square(1).unwrap(), Axis::First).unwrap();
    let mut totals: Vec<f64> = shifts.iter().map(|s| s.total_translation()[0]).collect();
    totals.sort_by(f64::total_cmp);
    assert_eq!(totals, [0.0, 0.5]);
    // Both resulting grids coincide: level 0 is the torus, level 1 is unshifted.
    let g0 = DyadicGrid::shifted(shifts[0].clone());
    let g1 = DyadicGrid::shifted(shifts[1].clone());
    assert_eq!(g0, g1);
    assert_eq!(f.side(), 2);
}

#[test]
fn sampling_is_reproducible() {
    let f = line(5);
    let a = GridShift::sample(&mut ChaCha8Rng::seed_from_u64(11), Axis::First, f);
    let b = GridShift::sample(&mut ChaCha8Rng::seed_from_u64(11), Axis::First, f);
    assert_eq!(a, b);
    let mesh = Mesh::square(5).unwrap();
    let s = ShiftSampler::monte_carlo(8, 3);
    assert_eq!(s.pairs(&mesh).unwrap(), s.pairs(&mesh).unwrap());
    assert!(ShiftSampler::monte_carlo(0, 3).pairs(&mesh).is_err());
}

#[test]
fn mean_translation_matches_bernoulli_sum() {
    // E Σ_{i=1..L} 2^-i B_i = (1/2)(1 - 2^-L), variance Σ 4^-i / 4.
    for (dim, level) in [(1u8, 4u8), (2, 3)] {
        let f = Factor::new(dim, level).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let n = 10_000;
        let mut sum = [0.0; 2];
        for _ in 0..n {
            let t = GridShift::sample(&mut rng, Axis::First, f).total_translation();
            sum[0] += t[0];
            sum[1] += t[1];
        }
        let mean = 0.5 * (1.0 - (0.5f64).powi(level as i32));
        let var: f64 = (1..=level as i32).map(|i| 0.25 * (0.25f64).powi(i)).sum();
        let sigma = (var / n as f64).sqrt();
        for c in 0..dim as usize {
            assert!((sum[c] / n as f64 - mean).abs() < 3.0 * sigma, "coordinate {c}");
        }
    }
}

#[test]
fn exact_enumeration_counts() {
    let mesh = Mesh::new(1, 2, 3).unwrap();
    assert_eq!(ShiftSampler::Exact.axis_shifts(&mesh, Axis::First).unwrap().len(), 4);
    assert_eq!(ShiftSampler::Exact.axis_shifts(&mesh, Axis::Second).unwrap().len(), 16);
    assert_eq!(ShiftSampler::AllBits.pairs(&mesh).unwrap().len(), 8 * 64);
    // Canonical enumeration produces pairwise distinct grids.
    let grids = ShiftSampler::Exact.axis_grids(&mesh, Axis::Second).unwrap();
    for i in 0..grids.len() {
        for j in 0..i {
            assert!(grids[i] != grids[j]);
        }
    }
}

#[test]
fn haar_index_validation() {
    let f = line(2);
    let finest = DyadicCube::new(Axis::First, f, 2, [1, 0]).unwrap();
    assert!(HaarIndex::new(finest, 1).is_err());
    assert!(HaarIndex::new(finest, 0).is_ok());
    let top = DyadicCube::torus(Axis::First, f);
    assert!(HaarIndex::new(top, 2).is_err());
    assert_eq!(HaarIndex::new(top, 1).unwrap().values(), [1.0, 1.0, -1.0, -1.0]);
}

fn arb_shift(dim: u8, level: u8) -> impl Strategy<Value = GridShift> {
    proptest::collection::vec(0u8..(1 << dim), level as usize)
        .prop_map(move |bits| GridShift::from_bits(Axis::First, Factor::new(dim, level).unwrap(), bits).unwrap())
}

proptest! {
    #[test]
    fn levels_tile_the_torus(shift in (1u8..=2, 1u8..=4).prop_flat_map(|(d, l)| arb_shift(d, l))) {
        let g = DyadicGrid::shifted(shift);
        let f = g.factor();
        for j in 0..=f.level() {
            let mut count = vec![0u32; f.len()];
            for q in g.cubes(j).unwrap() {
                for c in q.cells() {
                    count[c] += 1;
                }
            }
            prop_assert!(count.iter().all(|&k| k == 1));
            prop_assert_eq!(g.cubes(j).unwrap().len(), f.cubes_at(j));
        }
    }

    #[test]
    fn shifted_grids_are_nested(shift in (1u8..=2, 1u8..=4).prop_flat_map(|(d, l)| arb_shift(d, l))) {
        let g = DyadicGrid::shifted(shift);
        for id in g.coarse_ids() {
            let q = g.cube(id);
            let kids = q.children().unwrap();
            let ids = g.children_ids(id).unwrap();
            for (k, child) in kids.iter().enumerate() {
                prop_assert!(g.contains_cube(child));
                prop_assert_eq!(g.cube(ids[k]), *child);
                prop_assert!(q.contains(child));
                prop_assert_eq!(g.ancestor(child, 1).unwrap(), q);
            }
        }
    }

    #[test]
    fn shift_cube_is_a_levelwise_bijection(shift in (1u8..=2, 1u8..=4).prop_flat_map(|(d, l)| arb_shift(d, l))) {
        let f = shift.factor();
        let std = DyadicGrid::standard(Axis::First, f);
        let g = DyadicGrid::shifted(shift.clone());
        for j in 0..=f.level() {
            let mut image: Vec<_> = std.cubes(j).unwrap().iter().map(|q| shift_cube(q, &shift).unwrap()).collect();
            let mut target = g.cubes(j).unwrap();
            let key = |q: &DyadicCube| q.origin();
            image.sort_by_key(key);
            target.sort_by_key(key);
            prop_assert_eq!(image, target);
        }
    }

    #[test]
    fn commutation_when_intermediate_bits_vanish(
        (shift, j, k) in (1u8..=2, 2u8..=4).prop_flat_map(|(d, l)| (arb_shift(d, l), 1..=l)).prop_flat_map(|(s, j)| (Just(s), Just(j), 0..=j))
    ) {
        // Clear the bits of scales j-k+1..=j, the only ones separating the two translations.
        let f = shift.factor();
        let mut bits = shift.bits().to_vec();
        for i in (j - k + 1)..=j {
            bits[i as usize - 1] = 0;
        }
        let shift = GridShift::from_bits(Axis::First, f, bits).unwrap();
        let std = DyadicGrid::standard(Axis::First, f);
        let g = DyadicGrid::shifted(shift.clone());
        for q in std.cubes(j).unwrap() {
            let lhs = shift_cube(&std.ancestor(&q, k).unwrap(), &shift).unwrap();
            let rhs = g.ancestor(&shift_cube(&q, &shift).unwrap(), k).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn descendants_have_the_cube_as_ancestor(shift in (1u8..=2, 1u8..=4).prop_flat_map(|(d, l)| arb_shift(d, l))) {
        let g = DyadicGrid::shifted(shift);
        let l = g.resolution();
        for id in 0..g.cube_count() {
            let j = g.level_of(id);
            for depth in 0..=(l - j) {
                let ds = g.descendants(id, depth).unwrap();
                prop_assert_eq!(ds.len(), 1usize << (depth as usize * g.factor().dim() as usize));
                for d in ds {
                    prop_assert_eq!(g.ancestor_id(d, depth), id);
                }
            }
        }
    }
}
