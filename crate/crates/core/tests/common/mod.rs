#![allow(dead_code)]

use lipschitz_h1b::{GridFunction, Interval, LipschitzCurve, UniformGrid};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x5eed_0001;

/// Eight segments on `[-6, 6]` with slopes in `[-0.5, 0.5]`; the first slope
/// is pinned to `0.5` so that `L = 0.5` exactly.
pub fn random_curve(seed: u64) -> LipschitzCurve {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bps: Vec<f64> = (0..7).map(|_| rng.gen_range(-6.0..6.0)).collect();
    bps.sort_by(f64::total_cmp);
    let mut slopes: Vec<f64> = (0..8).map(|_| rng.gen_range(-0.5..=0.5)).collect();
    slopes[0] = 0.5;
    LipschitzCurve::new(bps, slopes, 0.0).unwrap()
}

/// Flat, tent and the seeded random curve.
pub fn curves() -> Vec<(&'static str, LipschitzCurve)> {
    vec![
        ("flat", LipschitzCurve::flat()),
        ("tent", LipschitzCurve::tent()),
        ("random", random_curve(CORPUS_SEED)),
    ]
}

/// Complex samples uniform in the unit square on a random subinterval of
/// `[-6, 6]`, zero elsewhere.
pub fn random_function<R: Rng>(rng: &mut R, grid: UniformGrid) -> GridFunction {
    let len = rng.gen_range(1.0..6.0);
    let lo = rng.gen_range(-6.0..6.0 - len);
    let support = Interval::from_endpoints(lo, lo + len).unwrap();
    let samples = grid
        .nodes()
        .map(|x| {
            if support.contains(x) {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    GridFunction::new(grid, samples, support).unwrap()
}

/// `count` seeded `(g, h)` pairs.
pub fn random_pairs(seed: u64, grid: UniformGrid, count: usize) -> Vec<(GridFunction, GridFunction)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (random_function(&mut rng, grid), random_function(&mut rng, grid)))
        .collect()
}

pub fn corpus_grid() -> UniformGrid {
    UniformGrid::new(-8.0, 1.0 / 64.0, 1025).unwrap()
}

/// Spearman rank correlation; ties share their mean rank.
pub fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            for &k in &idx[i..=j] {
                r[k] = 0.5 * (i + j) as f64 + 1.0;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
