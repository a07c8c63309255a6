mod common;

use lipschitz_h1b::atoms::{odd_atom, two_bump_function};
use lipschitz_h1b::commutator::Variant;
use lipschitz_h1b::symbols::{sawtooth, smooth_bump};
use lipschitz_h1b::{
    apply_commutator, approx_factor_atom_with_m, commutator_norm_estimate, decompose_two_bump, estimate_residual_h1b,
    h1_factor_from_h1b, h1b_norm_upper, kernel_bounds_check, pi_b, pi_classic, residual, weak_factorize,
    AccretiveWeight, AtomicDecomposition, CommutatorSpec, GridFunction, Interval, LipschitzCurve, UniformGrid,
};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{corpus_grid, curves, random_function, random_pairs, CORPUS_SEED};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn real_symbol(grid: UniformGrid, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = (0..grid.count())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
        .collect();
    GridFunction::full(grid, samples).unwrap()
}

#[test]
fn transfer_identity_node_for_node() {
    let grid = corpus_grid();
    for (k, (name, curve)) in curves().into_iter().enumerate() {
        let w = AccretiveWeight::new(curve);
        let phi = real_symbol(grid, 7 + k as u64);
        let cauchy = CommutatorSpec::from_divided(&phi, w.clone(), Variant::Cauchy).unwrap();
        let related = cauchy.with_variant(Variant::Related);
        for (f, _) in random_pairs(CORPUS_SEED + 400 + k as u64, grid, 5) {
            let bf = f.map_nodes(|x, z| z * w.eval(x));
            let lhs = apply_commutator(&cauchy, &f).unwrap();
            let rhs = apply_commutator(&related, &bf).unwrap();
            for (u, v) in lhs.samples().iter().zip(rhs.samples()) {
                assert!((u - v).norm() <= 1e-10 * (1.0 + v.norm()), "{name}: {u} vs {v}");
            }
        }
    }
}

#[test]
fn commutator_is_linear_in_function_and_symbol() {
    let grid = UniformGrid::new(-4.0, 1.0 / 32.0, 257).unwrap();
    let w = AccretiveWeight::new(LipschitzCurve::tent());
    let (p1, p2) = (real_symbol(grid, 1), real_symbol(grid, 2));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (f, g) = (random_function(&mut rng, grid), random_function(&mut rng, grid));
    let c = Complex64::new(0.7, -1.3);
    let spec = |phi: &GridFunction| CommutatorSpec::from_divided(phi, w.clone(), Variant::Cauchy).unwrap();
    let s1 = spec(&p1);
    let lhs = apply_commutator(&s1, &f.add(&g.scaled(c)).unwrap()).unwrap();
    let rhs = apply_commutator(&s1, &f)
        .unwrap()
        .add(&apply_commutator(&s1, &g).unwrap().scaled(c))
        .unwrap();
    assert!(lhs.sub(&rhs).unwrap().sup_norm() <= 1e-12 * (1.0 + rhs.sup_norm()));

    let sum = p1.add(&p2.scaled(Complex64::new(2.5, 0.0))).unwrap();
    let lhs = apply_commutator(&spec(&sum), &f).unwrap();
    let rhs = apply_commutator(&s1, &f)
        .unwrap()
        .add(
            &apply_commutator(&spec(&p2), &f)
                .unwrap()
                .scaled(Complex64::new(2.5, 0.0)),
        )
        .unwrap();
    assert!(lhs.sub(&rhs).unwrap().sup_norm() <= 1e-12 * (1.0 + rhs.sup_norm()));
}

#[test]
fn norm_estimate_ignores_constants_and_scales_linearly() {
    let grid = UniformGrid::new(-8.0, 1.0 / 32.0, 512).unwrap();
    let w = AccretiveWeight::new(LipschitzCurve::tent());
    let phi = sawtooth(grid, 1.0);
    let est = |p: &GridFunction| {
        let spec = CommutatorSpec::from_divided(p, w.clone(), Variant::Cauchy).unwrap();
        commutator_norm_estimate(&spec, 2.0, 0, 0).unwrap().value
    };
    let base = est(&phi);
    let plus_five = phi.samples().iter().map(|z| z + 5.0).collect();
    let shifted = est(&GridFunction::full(grid, plus_five).unwrap());
    assert!((shifted / base - 1.0).abs() <= 0.01, "{base} vs {shifted}");
    let scaled = est(&phi.scaled(Complex64::new(3.0, 0.0)));
    assert!((scaled / (3.0 * base) - 1.0).abs() <= 1e-6, "{scaled} vs 3 x {base}");
}

#[test]
fn h1_factors_from_h1b_factors() {
    for (name, curve) in curves() {
        let w = AccretiveWeight::new(curve);
        let l = w.curve().lipschitz_constant();
        let grid = UniformGrid::new(-2.0, 1.0 / 16.0, 2200).unwrap();
        let a = odd_atom(&w, grid, 0.0, 1.0).unwrap();
        let pair = approx_factor_atom_with_m(&w, &a, &Interval::new(0.0, 1.0).unwrap(), 128.0).unwrap();
        let (g, h) = (pair.g.clone(), pair.h.clone());
        let (big_g, big_h) = h1_factor_from_h1b(&w, &pair);
        assert_eq!(big_g, g);
        let ratio = big_h.lp_norm(2.0).unwrap() / h.lp_norm(2.0).unwrap();
        assert!(
            ratio >= 1.0 - 1e-12 && ratio <= (1.0 + l * l).sqrt() + 1e-12,
            "{name}: {ratio}"
        );
        if name == "flat" {
            assert_eq!(big_h, h);
        }
        let lhs = pi_classic(&w, &big_g, &big_h).unwrap().map_nodes(|x, z| z / w.eval(x));
        let rhs = pi_b(&w, &g, &h).unwrap();
        for (u, v) in lhs.samples().iter().zip(rhs.samples()) {
            assert!((u - v).norm() <= 1e-10 * (1.0 + v.norm()));
        }
    }
}

#[test]
fn pi_b_support_is_exactly_the_factor_supports() {
    let grid = corpus_grid();
    let w = AccretiveWeight::new(LipschitzCurve::tent());
    for (g, h) in random_pairs(CORPUS_SEED + 500, grid, 10) {
        let pb = pi_b(&w, &g, &h).unwrap();
        for (i, z) in pb.samples().iter().enumerate() {
            if g.samples()[i] == Complex64::new(0.0, 0.0) && h.samples()[i] == Complex64::new(0.0, 0.0) {
                assert_eq!(*z, Complex64::new(0.0, 0.0));
            }
        }
    }
}

// Atomic estimate of Π_b(g, h) = a − residual, against ‖g‖ ‖h‖.
#[test]
fn pi_b_atomic_estimate_is_bounded_by_factor_norms() {
    let mut worst: f64 = 0.0;
    for (name, curve) in curves() {
        let w = AccretiveWeight::new(curve);
        for m in [128.0, 256.0, 512.0, 1024.0] {
            let grid = UniformGrid::new(-2.0, 1.0 / 16.0, (16.0 * (m + 4.0)) as usize + 1).unwrap();
            let a = odd_atom(&w, grid, 0.0, 1.0).unwrap();
            let support = Interval::new(0.0, 1.0).unwrap();
            let pair = approx_factor_atom_with_m(&w, &a, &support, m).unwrap();
            let res = residual(&w, &a, &pair).unwrap();
            let atom_norm = h1b_norm_upper(&AtomicDecomposition::single(&w, ONE, a.clone(), support).unwrap()).unwrap();
            let est = atom_norm + estimate_residual_h1b(&w, &res, pair.x0, pair.y0, 1.0).unwrap();
            let c = est / pair.l2_product().unwrap();
            worst = worst.max(c);
            assert!(c.is_finite(), "{name} M = {m}");
        }
    }
    println!("Π_b atomic estimate / (‖g‖ ‖h‖) ≤ {worst:.4e}");
    assert!(worst <= 0.02, "{worst}");
}

#[test]
fn empty_run_returns_initial_residual() {
    let w = AccretiveWeight::new(LipschitzCurve::flat());
    let grid = UniformGrid::new(-2.0, 1.0 / 16.0, 65).unwrap();
    let a = odd_atom(&w, grid, 0.0, 1.0).unwrap();
    let initial = AtomicDecomposition::single(&w, ONE, a, Interval::new(0.0, 1.0).unwrap()).unwrap();
    let wf = weak_factorize(&w, &initial, 0.05, 0).unwrap();
    assert!(wf.stages.is_empty());
    assert_eq!(wf.residual_trace, vec![h1b_norm_upper(&initial).unwrap()]);
}

#[test]
fn weak_factorization_of_two_bump_input() {
    let w = AccretiveWeight::new(LipschitzCurve::tent());
    let grid = UniformGrid::new(-2.0, 1.0 / 8.0, 8 * 134).unwrap();
    let f = two_bump_function(&w, grid, 0.0, 128.0, 1.0).unwrap();
    let initial = decompose_two_bump(&w, &f, 0.0, 128.0, 1.0).unwrap();
    let wf = weak_factorize(&w, &initial, 0.05, 2).unwrap();
    assert_eq!(wf.stages[0].len(), initial.terms.len());
    let ratios = wf.contraction_ratios();
    assert!(
        ratios.iter().all(|q| *q < 0.05 * wf.params.c0_measured + 0.05),
        "{ratios:?}"
    );
}

#[test]
fn curve_and_weight_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    for (name, curve) in curves() {
        let l = curve.lipschitz_constant();
        let max_slope = curve.slopes().iter().fold(0.0f64, |m, s| m.max(s.abs()));
        assert_eq!(l, max_slope, "{name}");
        let w = AccretiveWeight::new(curve.clone());
        for _ in 0..10_000 {
            let (x, y) = (rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
            assert!((curve.eval(x) - curve.eval(y)).abs() <= l * (x - y).abs() * (1.0 + 1e-12) + 1e-12);
            assert_eq!(w.eval(x).re, 1.0);
        }
    }
}

#[test]
fn kernel_constants_are_finite_and_curve_dependent() {
    for (name, curve) in curves() {
        let kb = kernel_bounds_check(&curve, 2000, 9);
        assert!(
            kb.size_constant.is_finite() && kb.smoothness_constant.is_finite(),
            "{name}"
        );
        assert!(
            kb.size_constant >= 1.0 / (std::f64::consts::PI * 1.3),
            "{name}: {}",
            kb.size_constant
        );
    }
}

#[test]
fn smooth_symbol_commutator_vanishes_off_the_symbol_support_interaction() {
    // [φ, T] f = 0 at nodes where φ vanishes, for f supported where φ vanishes too
    let grid = UniformGrid::new(-8.0, 1.0 / 16.0, 257).unwrap();
    let w = AccretiveWeight::new(LipschitzCurve::tent());
    let spec = CommutatorSpec::from_divided(&smooth_bump(grid, 1.0), w, Variant::Cauchy).unwrap();
    let f = GridFunction::indicator(grid, Interval::new(5.0, 1.0).unwrap());
    let out = apply_commutator(&spec, &f).unwrap();
    for (x, z) in grid.nodes().zip(out.samples()) {
        if x.abs() >= 2.0 {
            assert_eq!(*z, Complex64::new(0.0, 0.0), "x = {x}");
        }
    }
}
