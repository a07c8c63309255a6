//! Lipschitz graphs `x + iA(x)` with piecewise-linear `A`, and the accretive
//! weight `b = 1 + iA'` they induce.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

/// A piecewise-linear real function `A` on the line.
///
/// `slopes[0]` applies left of the first breakpoint, `slopes[k]` between
/// `breakpoints[k-1]` and `breakpoints[k]`, and the last slope to the right of
/// the final breakpoint. The anchor is the value of `A` at the first
/// breakpoint, or at the origin when there are none.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzCurve {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    anchor: f64,
    // A evaluated at each breakpoint.
    knots: Vec<f64>,
    lipschitz: f64,
}

impl LipschitzCurve {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>, anchor: f64) -> Result<Self> {
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidCurve("non-finite breakpoint".into()));
        }
        if let Some(w) = breakpoints.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidCurve(format!(
                "breakpoints must be strictly increasing ({} >= {})",
                w[0], w[1]
            )));
        }
        if slopes.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidCurve(format!(
                "{} breakpoints need {} slopes, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                slopes.len()
            )));
        }
        if slopes.iter().any(|s| !s.is_finite()) {
            return Err(Error::InvalidCurve("non-finite slope".into()));
        }
        if !anchor.is_finite() {
            return Err(Error::InvalidCurve("non-finite anchor".into()));
        }
        let mut knots = Vec::with_capacity(breakpoints.len());
        let mut value = anchor;
        for (k, &bp) in breakpoints.iter().enumerate() {
            if k > 0 {
                value += slopes[k] * (bp - breakpoints[k - 1]);
            }
            knots.push(value);
        }
        let lipschitz = slopes.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        Ok(Self {
            breakpoints,
            slopes,
            anchor,
            knots,
            lipschitz,
        })
    }

    /// The flat curve `A ≡ 0` (the real line).
    pub fn flat() -> Self {
        Self::new(Vec::new(), vec![0.0], 0.0).expect("flat curve is valid")
    }

    /// `A(x) = -|x|`.
    pub fn tent() -> Self {
        Self::new(vec![0.0], vec![1.0, -1.0], 0.0).expect("tent curve is valid")
    }

    /// Random curve with `n_breakpoints` uniform breakpoints in `[lo, hi]` and
    /// slopes uniform in `[-max_slope, max_slope]`.
    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        n_breakpoints: usize,
        max_slope: f64,
        lo: f64,
        hi: f64,
    ) -> Result<Self> {
        if !(max_slope >= 0.0) || !(lo < hi) {
            return Err(Error::param("random curve", "need max_slope >= 0 and lo < hi"));
        }
        let mut bps: Vec<f64> = (0..n_breakpoints).map(|_| rng.gen_range(lo..hi)).collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        let slopes = (0..=bps.len()).map(|_| rng.gen_range(-max_slope..=max_slope)).collect();
        Self::new(bps, slopes, 0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    /// `L = max |slope|`.
    pub fn lipschitz_constant(&self) -> f64 {
        self.lipschitz
    }

    // Number of breakpoints <= x; this is also the index of the slope in force at x.
    fn segment(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&b| b <= x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if self.breakpoints.is_empty() {
            return self.anchor + self.slopes[0] * x;
        }
        match self.segment(x) {
            0 => self.knots[0] + self.slopes[0] * (x - self.breakpoints[0]),
            k => self.knots[k - 1] + self.slopes[k] * (x - self.breakpoints[k - 1]),
        }
    }

    /// `A'(x)`, right-continuous at breakpoints.
    pub fn slope_at(&self, x: f64) -> f64 {
        self.slopes[self.segment(x)]
    }
}

/// The accretive weight `b(x) = 1 + iA'(x)`; `Re b ≡ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AccretiveWeight {
    curve: LipschitzCurve,
}

impl AccretiveWeight {
    pub fn new(curve: LipschitzCurve) -> Self {
        Self { curve }
    }

    pub fn curve(&self) -> &LipschitzCurve {
        &self.curve
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        Complex64::new(1.0, self.curve.slope_at(x))
    }

    /// `‖b‖_∞ = sqrt(1 + L²)`, exact because `A'` is piecewise constant.
    pub fn sup_norm(&self) -> f64 {
        let l = self.curve.lipschitz_constant();
        (1.0 + l * l).sqrt()
    }
}

/// Free-function forms of the curve operations.
pub fn make_curve(breakpoints: Vec<f64>, slopes: Vec<f64>, anchor: f64) -> Result<LipschitzCurve> {
    LipschitzCurve::new(breakpoints, slopes, anchor)
}

pub fn eval_a(curve: &LipschitzCurve, x: f64) -> f64 {
    curve.eval(x)
}

pub fn eval_b(weight: &AccretiveWeight, x: f64) -> Complex64 {
    weight.eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn flat_curve() {
        let c = make_curve(vec![], vec![0.0], 0.0).unwrap();
        assert_eq!(c.lipschitz_constant(), 0.0);
        assert_eq!(eval_a(&c, 3.7), 0.0);
        let w = AccretiveWeight::new(c);
        assert_eq!(eval_b(&w, -12.5), Complex64::new(1.0, 0.0));
        assert_eq!(w.sup_norm(), 1.0);
    }

    #[test]
    fn tent_values_and_breakpoint_convention() {
        let c = make_curve(vec![0.0], vec![1.0, -1.0], 0.0).unwrap();
        assert_eq!(c.lipschitz_constant(), 1.0);
        assert_eq!(eval_a(&c, -2.0), -2.0);
        assert_eq!(eval_a(&c, 2.0), -2.0);
        assert_eq!(eval_a(&c, 0.0), 0.0);
        let w = AccretiveWeight::new(c);
        assert_eq!(eval_b(&w, 0.0), Complex64::new(1.0, -1.0));
        let b = eval_b(&w, -0.5);
        assert_eq!(b, Complex64::new(1.0, 1.0));
        assert!((b.norm() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn anchored_at_first_breakpoint() {
        let c = make_curve(vec![1.0, 3.0], vec![0.0, 2.0, -1.0], 5.0).unwrap();
        assert_eq!(c.eval(1.0), 5.0);
        assert_eq!(c.eval(3.0), 9.0);
        assert_eq!(c.eval(4.0), 8.0);
        assert_eq!(c.eval(-10.0), 5.0);
        assert_eq!(c.lipschitz_constant(), 2.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(make_curve(vec![1.0, 1.0], vec![0.0; 3], 0.0).is_err());
        assert!(make_curve(vec![2.0, 1.0], vec![0.0; 3], 0.0).is_err());
        assert!(make_curve(vec![0.0], vec![0.0], 0.0).is_err());
        assert!(make_curve(vec![0.0], vec![0.0, f64::NAN], 0.0).is_err());
        assert!(make_curve(vec![0.0], vec![0.0, f64::INFINITY], 0.0).is_err());
    }

    #[test]
    fn continuity_at_breakpoints() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let c = LipschitzCurve::random(&mut rng, 8, 0.5, -4.0, 4.0).unwrap();
        for &bp in c.breakpoints() {
            let eps = 1e-9;
            assert!((c.eval(bp - eps) - c.eval(bp)).abs() < 1e-8);
            assert!((c.eval(bp + eps) - c.eval(bp)).abs() < 1e-8);
        }
    }

    #[test]
    fn random_curve_is_lipschitz_on_sampled_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = LipschitzCurve::random(&mut rng, 8, 0.5, -4.0, 4.0).unwrap();
        let l = c.lipschitz_constant();
        assert!(l <= 0.5);
        for _ in 0..10_000 {
            let x1: f64 = rng.gen_range(-10.0..10.0);
            let x2: f64 = rng.gen_range(-10.0..10.0);
            assert!((c.eval(x1) - c.eval(x2)).abs() <= l * (x1 - x2).abs() + 1e-12);
        }
    }

    #[test]
    fn sampled_slope_sup_matches_lipschitz_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = LipschitzCurve::random(&mut rng, 8, 0.5, -4.0, 4.0).unwrap();
        let w = AccretiveWeight::new(c.clone());
        let sup = (0..=2000)
            .map(|i| -10.0 + i as f64 * 0.01)
            .map(|x| w.eval(x).im.abs())
            .fold(0.0, f64::max);
        assert_eq!(sup, c.lipschitz_constant());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn real_part_of_weight_is_one(
                slopes in proptest::collection::vec(-3.0f64..3.0, 1..6),
                x in -50.0f64..50.0,
            ) {
                let bps: Vec<f64> = (0..slopes.len() - 1).map(|k| k as f64 - 1.0).collect();
                let w = AccretiveWeight::new(LipschitzCurve::new(bps, slopes, 0.3).unwrap());
                let b = w.eval(x);
                prop_assert_eq!(b.re, 1.0);
                prop_assert!(b.norm() <= w.sup_norm() + 1e-15);
            }
        }
    }
}
