use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::dyadic::{profile_values, GridShift, Mesh};
use crate::signal::{pair, FactorFunction};

fn random(mesh: Mesh, rng: &mut ChaCha8Rng) -> GridFunction {
    GridFunction::from_fn(mesh, |_, _| rng.gen_range(-1.0..1.0))
}

fn shifted_pair(mesh: &Mesh, rng: &mut ChaCha8Rng) -> GridPair {
    GridPair::shifted(
        GridShift::sample(rng, Axis::First, mesh.first()),
        GridShift::sample(rng, Axis::Second, mesh.second()),
    )
    .unwrap()
}

fn slot_function(op: &ModelOperator, e: &Entry, s: usize) -> GridFunction {
    let g = op.grids();
    let sh = op.shape();
    let a = FactorFunction::from_values(
        g.first.factor(),
        profile_values(&g.first.cube(e.first[s + 1] as usize), sh.first[s]),
    )
    .unwrap();
    let b = FactorFunction::from_values(
        g.second.factor(),
        profile_values(&g.second.cube(e.second[s + 1] as usize), sh.second[s]),
    )
    .unwrap();
    GridFunction::tensor(&a, &b).unwrap()
}

/// Term-by-term evaluation with explicit test functions.
fn brute_apply(op: &ModelOperator, f1: &GridFunction, f2: &GridFunction) -> GridFunction {
    let mut out = GridFunction::zeros(f1.mesh());
    for e in op.entries() {
        let c = e.value * pair(f1, &slot_function(op, e, 0)).unwrap() * pair(f2, &slot_function(op, e, 1)).unwrap();
        out += &slot_function(op, e, 2).scale(c);
    }
    out
}

fn all_kinds(grids: &GridPair, rng: &mut ChaCha8Rng) -> Vec<ModelOperator> {
    let mut ops = Vec::new();
    for a in 0..3u8 {
        for b in 0..3u8 {
            let f = generate_partial_coeffs(rng, grids, [1, 0, 1], a, b, 0.5).unwrap();
            ops.push(ModelOperator::on_grids(grids, f).unwrap());
            let f = generate_full_coeffs(rng, grids, a, b, 0.5).unwrap();
            ops.push(ModelOperator::on_grids(grids, f).unwrap());
        }
    }
    let f = generate_shift_coeffs(rng, grids, Shape::shift([1, 0, 1], [0, 1, 1]), 0.3).unwrap();
    ops.push(ModelOperator::on_grids(grids, f).unwrap());
    ops
}

#[test]
fn zero_coefficients_give_zero() {
    let mesh = Mesh::square(3).unwrap();
    let grids = GridPair::standard(&mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (f1, f2) = (random(mesh, &mut rng), random(mesh, &mut rng));
    let fields = [
        generate_partial_coeffs(&mut rng, &grids, [1, 1, 1], 0, 0, 0.0).unwrap(),
        generate_full_coeffs(&mut rng, &grids, 2, 2, 0.0).unwrap(),
        generate_shift_coeffs(&mut rng, &grids, Shape::shift([0; 3], [0; 3]), 0.0).unwrap(),
    ];
    for f in fields {
        assert!(f.is_empty());
        let op = ModelOperator::new(f).unwrap();
        assert_eq!(op.apply(&f1, &f2).unwrap().max_abs(), 0.0);
    }
}

#[test]
fn single_partial_entry_on_the_torus() {
    let mesh = Mesh::square(3).unwrap();
    let grids = GridPair::standard(&mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let shape = Shape::partial([0; 3], 0, 0).unwrap();
    let kind = OperatorKind::Partial { shift_axis: Axis::First, zero_slot: 0, haar_slot: 0 };
    let mut field = CoefficientField::empty(kind, &grids, shape);
    field.push([0; 4], [0; 4], 1.0);
    let op = ModelOperator::new(field.clone()).unwrap();
    let mut over = field.clone();
    over.entries[0].value = 1.0 + 1e-6;
    assert!(ModelOperator::new(over).is_err());

    // a ⟨f₁, h⁰ ⊗ h⟩ ⟨f₂, h ⊗ 1⟩ h ⊗ 1 with every cube the torus.
    let n = mesh.rows();
    let h = |x: usize| if x < n / 2 { 1.0 } else { -1.0 };
    let (f1, f2) = (random(mesh, &mut rng), random(mesh, &mut rng));
    let c1 = pair(&f1, &GridFunction::from_fn(mesh, |_, y| h(y))).unwrap();
    let c2 = pair(&f2, &GridFunction::from_fn(mesh, |x, _| h(x))).unwrap();
    let expect = GridFunction::from_fn(mesh, |x, _| c1 * c2 * h(x));
    assert!(op.apply(&f1, &f2).unwrap().distance(&expect) < 1e-12);
}

#[test]
fn single_shift_entry_is_one_haar_term() {
    let mesh = Mesh::square(2).unwrap();
    let grids = GridPair::standard(&mesh);
    let mut field = CoefficientField::empty(OperatorKind::Shift, &grids, Shape::shift([0; 3], [0; 3]));
    field.push([0; 4], [0; 4], -1.0);
    let op = ModelOperator::new(field).unwrap();
    let n = mesh.rows();
    let h = |x: usize| if x < n / 2 { 1.0 } else { -1.0 };
    let hh = GridFunction::from_fn(mesh, |x, y| h(x) * h(y));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (f1, f2) = (random(mesh, &mut rng), random(mesh, &mut rng));
    let c = -pair(&f1, &hh).unwrap() * pair(&f2, &hh).unwrap();
    assert!(op.apply(&f1, &f2).unwrap().distance(&hh.scale(c)) < 1e-12);
}

#[test]
fn commutator_form_single_entry() {
    // a ⟨f₁⟩_{K×V} ⟨f₂, 1_K/|K| ⊗ h_V⟩ h_K ⊗ 1_V/|V| on K = [0,1/2), V = [1/2,1).
    let mesh = Mesh::square(3).unwrap();
    let grids = GridPair::standard(&mesh);
    let (fs, ss) = COMMUTATOR_FULL;
    let mut field = CoefficientField::empty(OperatorKind::Full { first_slot: fs, second_slot: ss }, &grids, Shape::full(fs, ss).unwrap());
    let (k, v) = (grids.first.id(1, 0), grids.second.id(1, 1));
    field.push([k; 4], [v; 4], 0.25);
    let op = ModelOperator::new(field).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (f1, f2) = (random(mesh, &mut rng), random(mesh, &mut rng));
    let in_k = |x: usize| x < 4;
    let in_v = |y: usize| y >= 4;
    let r = 2f64.sqrt();
    let hk = |x: usize| if x < 2 { r } else if x < 4 { -r } else { 0.0 };
    let hv = |y: usize| if (4..6).contains(&y) { r } else if y >= 6 { -r } else { 0.0 };
    let avg = pair(&f1, &GridFunction::from_fn(mesh, |x, y| if in_k(x) && in_v(y) { 4.0 } else { 0.0 })).unwrap();
    let c2 = pair(&f2, &GridFunction::from_fn(mesh, |x, y| if in_k(x) { 2.0 * hv(y) } else { 0.0 })).unwrap();
    let expect = GridFunction::from_fn(mesh, |x, y| if in_v(y) { 0.25 * avg * c2 * hk(x) * 2.0 } else { 0.0 });
    assert!(op.apply(&f1, &f2).unwrap().distance(&expect) < 1e-12);
}

#[test]
fn canonical_form_on_constants() {
    let mesh = Mesh::new(1, 1, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let grids = shifted_pair(&mesh, &mut rng);
    let (fs, ss) = CANONICAL_FULL;
    let field = generate_full_coeffs(&mut rng, &grids, fs, ss, 0.6).unwrap();
    let op = ModelOperator::on_grids(&grids, field).unwrap();
    let one = GridFunction::constant(mesh, 1.0);
    let mut t = Table::zeros(grids.first.cube_count(), grids.second.cube_count());
    for e in op.entries() {
        t.add(e.first[0] as usize, e.second[0] as usize, e.value);
    }
    let expect = synthesize_table(&t, &grids, Profile::Haar(1), Profile::Haar(1));
    assert!(op.apply(&one, &one).unwrap().distance(&expect) < 1e-12);
}

#[test]
fn apply_matches_term_by_term_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for mesh in [Mesh::square(3).unwrap(), Mesh::new(2, 1, 2).unwrap()] {
        let grids = shifted_pair(&mesh, &mut rng);
        for op in all_kinds(&grids, &mut rng) {
            let (f1, f2) = (random(mesh, &mut rng), random(mesh, &mut rng));
            let d = op.apply(&f1, &f2).unwrap().distance(&brute_apply(&op, &f1, &f2));
            assert!(d < 1e-11, "{:?}: {d}", op.kind());
        }
    }
}

#[test]
fn duality_for_every_type_and_form() {
    let mesh = Mesh::square(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grids = shifted_pair(&mesh, &mut rng);
    let ops = all_kinds(&grids, &mut rng);
    assert_eq!(ops.len(), 19);
    for op in &ops {
        for _ in 0..5 {
            let (f1, f2, f3) = (random(mesh, &mut rng), random(mesh, &mut rng), random(mesh, &mut rng));
            let a = pair(&op.apply(&f1, &f2).unwrap(), &f3).unwrap();
            let b = op.trilinear(&f1, &f2, &f3).unwrap();
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "{:?}", op.kind());
        }
    }
    // Fifty triples for the partial paraproduct form used in the commutator estimate.
    let op = &ops[0];
    for _ in 0..50 {
        let (f1, f2, f3) = (random(mesh, &mut rng), random(mesh, &mut rng), random(mesh, &mut rng));
        let a = pair(&op.apply(&f1, &f2).unwrap(), &f3).unwrap();
        assert!((a - op.trilinear(&f1, &f2, &f3).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn transposition_identity() {
    let mesh = Mesh::new(1, 2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let grids = shifted_pair(&mesh, &mut rng);
    for op in all_kinds(&grids, &mut rng) {
        let t = op.transposed();
        let t = ModelOperator::on_grids(t.grids(), t.field().clone()).unwrap();
        let (f1, f2) = (random(mesh, &mut rng), random(mesh, &mut rng));
        let a = t.apply(&f1.transpose(), &f2.transpose()).unwrap().transpose();
        assert!(a.distance(&op.apply(&f1, &f2).unwrap()) < 1e-12);
    }
    let p = PartialParaproduct::new(generate_partial_coeffs(&mut rng, &grids, [0, 1, 1], 1, 2, 1.0).unwrap()).unwrap();
    let q = p.transposed();
    assert!(matches!(q.kind(), OperatorKind::Partial { shift_axis: Axis::Second, zero_slot: 1, haar_slot: 2 }));
    assert_eq!(q.complexity(), [0, 1, 1]);
}

#[test]
fn partial_generator_saturates_every_family() {
    let mesh = Mesh::square(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let grids = shifted_pair(&mesh, &mut rng);
    for k in [[0, 0, 0], [1, 2, 0], [3, 3, 3]] {
        let f = generate_partial_coeffs(&mut rng, &grids, k, 0, 0, 0.7).unwrap();
        assert!((f.provenance.achieved.unwrap() - 1.0).abs() < 1e-9);
        let meas = id_measures(&grids.first);
        let mut fam: HashMap<[u32; 4], Vec<f64>> = HashMap::new();
        for e in &f.entries {
            fam.entry(e.first).or_insert_with(|| vec![0.0; grids.second.cube_count()])[e.second[0] as usize] = e.value;
        }
        for (t, v) in fam {
            let norm = cube_sequence_bmo(&grids.second, &v).unwrap();
            assert!((norm / tuple_bound(&meas, t) - 1.0).abs() < 1e-9);
        }
    }
    assert!(matches!(
        generate_partial_coeffs(&mut rng, &grids, [4, 0, 0], 1, 0, 1.0),
        Err(Error::Resolution(_))
    ));
    assert!(generate_partial_coeffs(&mut rng, &grids, [4, 0, 0], 0, 0, 1.0).is_ok());
    assert!(generate_partial_coeffs(&mut rng, &grids, [0; 3], 0, 0, 1.5).is_err());
}

#[test]
fn full_generator_is_normalized() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // One admissible rectangle: the torus, so the single entry saturates |a| ≤ |R₀|^{1/2}.
    let mesh = Mesh::square(1).unwrap();
    let f = generate_full_coeffs(&mut rng, &GridPair::standard(&mesh), 2, 2, 1.0).unwrap();
    assert_eq!(f.len(), 1);
    assert!((f.entries[0].value.abs() - 1.0).abs() < 1e-12);
    let mesh = Mesh::square(4).unwrap();
    for _ in 0..10 {
        let grids = shifted_pair(&mesh, &mut rng);
        let f = generate_full_coeffs(&mut rng, &grids, 2, 1, 0.5).unwrap();
        let e = full_estimate(&grids, &f).unwrap();
        assert!(e.lower <= 1.0 + 1e-12 && (e.upper - 1.0).abs() < 1e-9);
    }
}

#[test]
fn shift_generator_is_extremal() {
    let mesh = Mesh::square(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let grids = shifted_pair(&mesh, &mut rng);
    let f = generate_shift_coeffs(&mut rng, &grids, Shape::shift([1, 1, 0], [0, 0, 1]), 1.0).unwrap();
    assert!((f.provenance.achieved.unwrap() - 1.0).abs() < 1e-12);
    let mut g = f.clone();
    g.entries[0].value *= 1.01;
    assert!(ModelOperator::new(g).is_err());
    let mut lazy = Shape::shift([0; 3], [0; 3]);
    lazy.second = [Profile::Average; 3];
    assert!(generate_shift_coeffs(&mut rng, &grids, lazy, 1.0).is_ok_and(|f| ModelOperator::new(f).is_err()));
}

#[test]
fn shift_l1_bound_is_moderate() {
    let mesh = Mesh::square(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let grids = shifted_pair(&mesh, &mut rng);
        let f = generate_shift_coeffs(&mut rng, &grids, Shape::shift([1, 0, 1], [1, 1, 0]), 1.0).unwrap();
        let op = ModelOperator::on_grids(&grids, f).unwrap();
        let (f1, f2) = (random(mesh, &mut rng), random(mesh, &mut rng));
        let out = op.apply(&f1, &f2).unwrap();
        let l1 = out.abs().integral();
        let l2 = |f: &GridFunction| pair(f, f).unwrap().sqrt();
        worst = worst.max(l1 / (l2(&f1) * l2(&f2)));
    }
    assert!(worst.is_finite() && worst < 10.0, "{worst}");
}

#[test]
fn field_json_round_trip_is_exact() {
    let mesh = Mesh::new(2, 1, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let grids = shifted_pair(&mesh, &mut rng);
    for op in all_kinds(&grids, &mut rng) {
        let s = op.field().to_json().unwrap();
        let back = CoefficientField::from_json(&s).unwrap();
        assert_eq!(&back, op.field());
        assert!(ModelOperator::new(back).is_ok());
    }
    assert!(CoefficientField::from_json("{").is_err());
}

#[test]
fn wrappers_check_the_kind() {
    let mesh = Mesh::square(2).unwrap();
    let grids = GridPair::standard(&mesh);
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let f = generate_full_coeffs(&mut rng, &grids, 0, 1, 1.0).unwrap();
    assert!(FullParaproduct::new(f.clone()).is_ok());
    assert!(PartialParaproduct::new(f.clone()).is_err());
    assert!(DyadicShiftBilinear::new(f).is_err());
    let mut bad = CoefficientField::empty(OperatorKind::Shift, &grids, Shape::shift([1, 0, 0], [0; 3]));
    bad.push([0, 0, 0, 0], [0; 4], 0.0);
    assert!(ModelOperator::new(bad).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operators_are_bilinear(seed in any::<u64>(), s in -3.0f64..3.0, t in -3.0f64..3.0) {
        let mesh = Mesh::square(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grids = shifted_pair(&mesh, &mut rng);
        let ops = all_kinds(&grids, &mut rng);
        let op = &ops[rng.gen_range(0..ops.len())];
        let (f, g, h) = (random(mesh, &mut rng), random(mesh, &mut rng), random(mesh, &mut rng));
        let lin1 = op.apply(&(&f.scale(s) + &g.scale(t)), &h).unwrap();
        let sum1 = &op.apply(&f, &h).unwrap().scale(s) + &op.apply(&g, &h).unwrap().scale(t);
        prop_assert!(lin1.distance(&sum1) < 1e-12);
        let lin2 = op.apply(&h, &(&f.scale(s) + &g.scale(t))).unwrap();
        let sum2 = &op.apply(&h, &f).unwrap().scale(s) + &op.apply(&h, &g).unwrap().scale(t);
        prop_assert!(lin2.distance(&sum2) < 1e-12);
    }
}
