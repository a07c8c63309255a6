//! The Cauchy integral `C_Γ` along a Lipschitz graph, the related operator
//! `C̃_Γ` with kernel `(1/πi) / (y − x + i(A(y) − A(x)))`, and their adjoints
//! with respect to the bilinear pairing.
//!
//! Principal values are discretized by the punctured trapezoid sum that skips
//! the diagonal node. The resulting matrix `w_i K(x_i, x_j) w_j` is exactly
//! antisymmetric in floating point, because swapping `x` and `y` negates both
//! coordinate differences and leaves the squared modulus unchanged. Adjoint and
//! cancellation identities therefore hold to rounding.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::curve::LipschitzCurve;
use crate::grid::GridFunction;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `C̃_Γ(x, y)` from the coordinate differences `dx = y − x`, `da = A(y) − A(x)`.
#[inline]
pub(crate) fn related_kernel_from_diff(dx: f64, da: f64) -> Complex64 {
    // 1/(πi (dx + i da)) = (−da − i dx) / (π (dx² + da²))
    let d = PI * (dx * dx + da * da);
    Complex64::new(-da / d, -dx / d)
}

/// A sample of the related Cauchy kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyKernelSample {
    pub x: f64,
    pub y: f64,
    pub value: Complex64,
}

/// `C̃_Γ(x, y)` for `x ≠ y`.
pub fn related_kernel(curve: &LipschitzCurve, x: f64, y: f64) -> CauchyKernelSample {
    CauchyKernelSample {
        x,
        y,
        value: related_kernel_from_diff(y - x, curve.eval(y) - curve.eval(x)),
    }
}

/// Punctured sums `Σ_{j≠i} K(x_i, x_j) w_j f_j` at the requested rows.
///
/// Columns where `f` vanishes contribute an exact zero and are skipped, so the
/// result is bit-identical to the full dense row sum.
pub(crate) fn related_rows(curve: &LipschitzCurve, f: &GridFunction, rows: &[usize]) -> Vec<Complex64> {
    let grid = f.grid();
    // (index, x, A(x), w f) for every nonzero column
    let cols: Vec<(usize, f64, f64, Complex64)> = f
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.re != 0.0 || z.im != 0.0)
        .map(|(j, &z)| {
            let y = grid.node(j);
            (j, y, curve.eval(y), z * grid.weight(j))
        })
        .collect();
    rows.par_iter()
        .map(|&i| {
            let x = grid.node(i);
            let ax = curve.eval(x);
            let mut acc = ZERO;
            for &(j, y, ay, c) in &cols {
                if j != i {
                    acc += related_kernel_from_diff(y - x, ay - ax) * c;
                }
            }
            acc
        })
        .collect()
}

/// `C̃_Γ f` at every node of `f`'s grid. The result is declared to be supported
/// on the whole grid.
pub fn apply_related_cauchy(curve: &LipschitzCurve, f: &GridFunction) -> GridFunction {
    let rows: Vec<usize> = (0..f.grid().count()).collect();
    let samples = if f.is_zero() {
        vec![ZERO; rows.len()]
    } else {
        related_rows(curve, f, &rows)
    };
    GridFunction::full(*f.grid(), samples).expect("full support admits any samples")
}

/// Multiplies by `b = 1 + iA'` at the nodes.
pub(crate) fn times_b(curve: &LipschitzCurve, f: &GridFunction) -> GridFunction {
    f.map_nodes(|x, z| z * Complex64::new(1.0, curve.slope_at(x)))
}

/// `C_Γ f`, computed as `C̃_Γ(b f)`.
pub fn apply_cauchy(curve: &LipschitzCurve, f: &GridFunction) -> GridFunction {
    apply_related_cauchy(curve, &times_b(curve, f))
}

/// `C_Γ^* g = b · (C̃_Γ)^* g = −b · C̃_Γ g`, adjoint for the bilinear pairing.
pub fn apply_cauchy_adjoint(curve: &LipschitzCurve, g: &GridFunction) -> GridFunction {
    let t = apply_related_cauchy(curve, g);
    times_b(curve, &t.scaled(Complex64::new(-1.0, 0.0)))
}

/// Empirical Calderón–Zygmund constants of the related kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelBounds {
    /// `max |K(x,y)|·|x − y|`
    pub size_constant: f64,
    /// `max (|K(x,y) − K(x₀,y)| + |K(y,x) − K(y,x₀)|)·|x − y|² / |x − x₀|`
    pub smoothness_constant: f64,
}

/// Samples `trials` triples `(x, x₀, y)` with `0 < |x − x₀| ≤ |y − x|/2` and
/// reports the largest size and smoothness ratios observed.
///
/// Points are drawn from a window that covers every breakpoint with a margin
/// of 4 on each side.
pub fn kernel_bounds_check(curve: &LipschitzCurve, trials: usize, seed: u64) -> KernelBounds {
    let bps = curve.breakpoints();
    let (lo, hi) = match (bps.first(), bps.last()) {
        (Some(&a), Some(&b)) => (a - 4.0, b + 4.0),
        _ => (-4.0, 4.0),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = |x: f64, y: f64| related_kernel_from_diff(y - x, curve.eval(y) - curve.eval(x));
    let mut out = KernelBounds {
        size_constant: 0.0,
        smoothness_constant: 0.0,
    };
    let mut done = 0;
    while done < trials {
        let x: f64 = rng.gen_range(lo..hi);
        let y: f64 = rng.gen_range(lo..hi);
        let t: f64 = rng.gen_range(-1.0..1.0);
        let dist = (y - x).abs();
        let x0 = x + t * dist / 2.0;
        if dist == 0.0 || x0 == x {
            continue;
        }
        done += 1;
        out.size_constant = out.size_constant.max(k(x, y).norm() * dist);
        let diff = (k(x, y) - k(x0, y)).norm() + (k(y, x) - k(y, x0)).norm();
        out.smoothness_constant = out.smoothness_constant.max(diff * dist * dist / (x - x0).abs());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{pair, Interval, UniformGrid};

    fn hilbert_indicator(x: f64, a: f64, b: f64) -> f64 {
        ((x - a) / (x - b)).abs().ln() / PI
    }

    fn grid(n: usize) -> UniformGrid {
        UniformGrid::new(-8.0, 16.0 / n as f64, n).unwrap()
    }

    // χ_[−1,1] including the nodes ±1.
    fn unit_indicator(g: UniformGrid) -> GridFunction {
        let h = g.spacing();
        GridFunction::indicator(g, Interval::new(0.0, 1.0 + 0.5 * h).unwrap())
    }

    fn max_oracle_error(n: usize) -> f64 {
        let g = grid(n);
        let out = apply_related_cauchy(&LipschitzCurve::flat(), &unit_indicator(g));
        let mut worst: f64 = 0.0;
        for (i, x) in g.nodes().enumerate() {
            if (x.abs() - 1.0).abs() <= 0.1 {
                continue;
            }
            let exact = Complex64::new(0.0, hilbert_indicator(x, -1.0, 1.0));
            if exact.norm() < 1e-12 {
                assert!(out.samples()[i].norm() < 1e-12);
                continue;
            }
            worst = worst.max((out.samples()[i] - exact).norm() / exact.norm());
        }
        worst
    }

    #[test]
    fn flat_curve_matches_hilbert_of_indicator() {
        let e = max_oracle_error(4096);
        assert!(e <= 2e-2, "relative error {e}");
    }

    #[test]
    fn refinement_improves_oracle_error() {
        let coarse = max_oracle_error(2048);
        let fine = max_oracle_error(4096);
        assert!(coarse / fine >= 1.5, "{coarse} -> {fine}");
    }

    #[test]
    fn zero_in_zero_out() {
        let g = grid(256);
        let z = GridFunction::zeros(g);
        let c = LipschitzCurve::tent();
        assert!(apply_related_cauchy(&c, &z).is_zero());
        assert!(apply_cauchy(&c, &z).is_zero());
        assert!(apply_cauchy_adjoint(&c, &z).is_zero());
    }

    #[test]
    fn flat_curve_cauchy_equals_related() {
        let g = grid(512);
        let f = GridFunction::from_real_fn(g, Interval::new(0.5, 2.0).unwrap(), |x| x.sin());
        let c = LipschitzCurve::flat();
        assert_eq!(apply_cauchy(&c, &f), apply_related_cauchy(&c, &f));
    }

    #[test]
    fn adjoint_on_flat_indicator_is_negated_oracle() {
        let g = grid(4096);
        let out = apply_cauchy_adjoint(&LipschitzCurve::flat(), &unit_indicator(g));
        for (i, x) in g.nodes().enumerate() {
            let exact = -hilbert_indicator(x, -1.0, 1.0);
            if (x.abs() - 1.0).abs() > 0.1 && exact.abs() > 1e-12 {
                let err = (out.samples()[i] - Complex64::new(0.0, exact)).norm() / exact.abs();
                assert!(err < 2e-2, "x = {x}: {err}");
            }
        }
    }

    #[test]
    fn tent_cauchy_matches_direct_kernel_quadrature() {
        // Independent evaluation of the full kernel (1/πi)(1 + iA'(y)) / (y − x + i(A(y) − A(x))).
        let curve = LipschitzCurve::tent();
        let g = grid(2048);
        let support = Interval::new(2.5, 0.5 + 0.5 * g.spacing()).unwrap();
        let f = GridFunction::indicator(g, support);
        let out = apply_cauchy(&curve, &f);
        let i_unit = Complex64::new(0.0, 1.0);
        for (i, x) in g.nodes().enumerate().step_by(7) {
            let mut direct = ZERO;
            for (j, y) in g.nodes().enumerate() {
                if j == i || f.samples()[j] == ZERO {
                    continue;
                }
                let num = Complex64::new(1.0, -1.0) * f.samples()[j];
                let den = i_unit * PI * Complex64::new(y - x, curve.eval(y) - curve.eval(x));
                direct += num / den * g.weight(j);
            }
            let scale = direct.norm().max(1e-3);
            assert!((out.samples()[i] - direct).norm() <= 1e-12 * scale.max(1.0), "x = {x}");
        }
    }

    #[test]
    fn discrete_operator_is_antisymmetric() {
        let curve = LipschitzCurve::tent();
        let g = grid(512);
        let f = GridFunction::from_fn(g, Interval::new(-1.0, 2.0).unwrap(), |x| Complex64::new(x.cos(), x));
        let k = GridFunction::from_fn(g, Interval::new(0.5, 3.0).unwrap(), |x| Complex64::new(1.0, x * x));
        let lhs = pair(&apply_related_cauchy(&curve, &f), &k).unwrap();
        let rhs = pair(&f, &apply_related_cauchy(&curve, &k)).unwrap();
        let scale = f.lp_norm(2.0).unwrap() * k.lp_norm(2.0).unwrap();
        assert!((lhs + rhs).norm() <= 1e-12 * scale);
        let lhs = pair(&apply_cauchy(&curve, &f), &k).unwrap();
        let rhs = pair(&f, &apply_cauchy_adjoint(&curve, &k)).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12 * scale);
    }

    #[test]
    fn linearity() {
        let curve = LipschitzCurve::tent();
        let g = grid(512);
        let f = GridFunction::from_fn(g, Interval::new(-1.0, 2.0).unwrap(), |x| Complex64::new(x.cos(), x));
        let k = GridFunction::from_fn(g, Interval::new(0.5, 3.0).unwrap(), |x| Complex64::new(1.0, x * x));
        let (a, b) = (Complex64::new(0.3, -2.0), Complex64::new(-1.5, 0.25));
        let lhs = apply_related_cauchy(&curve, &f.scaled(a).add(&k.scaled(b)).unwrap());
        let rhs = apply_related_cauchy(&curve, &f)
            .scaled(a)
            .add(&apply_related_cauchy(&curve, &k).scaled(b))
            .unwrap();
        let scale = lhs.sup_norm();
        for (u, v) in lhs.samples().iter().zip(rhs.samples()) {
            assert!((u - v).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn kernel_size_constants() {
        let flat = kernel_bounds_check(&LipschitzCurve::flat(), 100_000, 1);
        assert!((flat.size_constant - 1.0 / PI).abs() < 1e-14);
        let tent = kernel_bounds_check(&LipschitzCurve::tent(), 1_000_000, 2);
        assert!(tent.size_constant <= 0.46);
        assert!(tent.size_constant <= 2f64.sqrt() / PI);
    }

    #[test]
    fn kernel_smoothness_constants_are_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let half = LipschitzCurve::random(&mut rng, 8, 0.5, -4.0, 4.0).unwrap();
        for curve in [LipschitzCurve::flat(), half, LipschitzCurve::tent()] {
            let kb = kernel_bounds_check(&curve, 200_000, 9);
            assert!(kb.smoothness_constant.is_finite());
            assert!(kb.smoothness_constant < 10.0, "{kb:?}");
        }
    }
}
