//! Uniform grids, sampled complex functions with declared compact support,
//! trapezoid quadrature, discrete `L^p` norms and the bilinear pairing.
//!
//! Grids that share a spacing and whose left ends differ by a whole number of
//! cells live on the same *lattice*; functions on such grids can be embedded
//! into one another without resampling. All grids built by this crate use
//! dyadic spacings so that lattice nodes are exact binary fractions.

use num_complex::Complex64;

use crate::error::{Error, Result};

// Tolerance, in cells, for deciding that a coordinate sits on a lattice node.
const LATTICE_TOL: f64 = 1e-7;

/// The open interval `I(center, radius) = { z : |z - center| < radius }`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    center: f64,
    radius: f64,
}

impl Interval {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(Error::param(
                "interval",
                format!("need finite center and radius > 0, got I({center}, {radius})"),
            ));
        }
        Ok(Self { center, radius })
    }

    /// `[lo, hi]` as an open interval.
    pub fn from_endpoints(lo: f64, hi: f64) -> Result<Self> {
        Self::new(0.5 * (lo + hi), 0.5 * (hi - lo))
    }

    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn left(&self) -> f64 {
        self.center - self.radius
    }

    pub fn right(&self) -> f64 {
        self.center + self.radius
    }

    pub fn length(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn contains(&self, z: f64) -> bool {
        (z - self.center).abs() < self.radius
    }

    /// Closure containment: `other ⊂ self`.
    pub fn contains_interval(&self, other: &Interval) -> bool {
        (other.center - self.center).abs() + other.radius <= self.radius * (1.0 + 1e-14)
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        let lo = self.left().min(other.left());
        let hi = self.right().max(other.right());
        Interval {
            center: 0.5 * (lo + hi),
            radius: 0.5 * (hi - lo),
        }
    }

    pub fn scaled(&self, factor: f64) -> Interval {
        Interval {
            center: self.center,
            radius: self.radius * factor,
        }
    }
}

/// Nodes `left + i·spacing`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    left: f64,
    spacing: f64,
    count: usize,
}

impl UniformGrid {
    pub fn new(left: f64, spacing: f64, count: usize) -> Result<Self> {
        if !left.is_finite() {
            return Err(Error::param("grid-left", "must be finite"));
        }
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::param("grid-spacing", "must be finite and > 0"));
        }
        if count == 0 {
            return Err(Error::param("grid-count", "must be positive"));
        }
        Ok(Self { left, spacing, count })
    }

    /// `count` nodes evenly covering `[lo, hi)`.
    pub fn spanning(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::param("grid", "need hi > lo"));
        }
        Self::new(lo, (hi - lo) / count as f64, count)
    }

    pub fn left(&self) -> f64 {
        self.left
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn right(&self) -> f64 {
        self.node(self.count - 1)
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        self.left + i as f64 * self.spacing
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        (0..self.count).map(move |i| self.node(i))
    }

    /// Composite trapezoid weight of node `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if self.count > 1 && (i == 0 || i + 1 == self.count) {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.weight(i)).collect()
    }

    /// Interval strictly containing every node.
    pub fn full_support(&self) -> Interval {
        let lo = self.left - self.spacing;
        let hi = self.right() + self.spacing;
        Interval {
            center: 0.5 * (lo + hi),
            radius: 0.5 * (hi - lo),
        }
    }

    /// Lattice coordinate of `x`, if `x` is (within tolerance) a lattice node.
    pub fn lattice_index(&self, x: f64) -> Option<i64> {
        let t = (x - self.left) / self.spacing;
        let n = t.round();
        ((t - n).abs() < LATTICE_TOL).then_some(n as i64)
    }

    pub fn on_lattice(&self, x: f64) -> bool {
        self.lattice_index(x).is_some()
    }

    /// Nearest lattice point.
    pub fn snap(&self, x: f64) -> f64 {
        self.left + ((x - self.left) / self.spacing).round() * self.spacing
    }

    /// Offset, in cells, of `other.left` relative to `self.left` when both grids
    /// lie on one lattice.
    pub fn lattice_offset(&self, other: &UniformGrid) -> Option<i64> {
        let same_spacing = (self.spacing - other.spacing).abs() <= 1e-12 * self.spacing;
        if !same_spacing {
            return None;
        }
        self.lattice_index(other.left)
    }

    pub fn contains_grid(&self, other: &UniformGrid) -> bool {
        match self.lattice_offset(other) {
            Some(off) => off >= 0 && off as usize + other.count <= self.count,
            None => false,
        }
    }

    /// Index range of nodes lying strictly inside `interval`.
    pub fn index_range(&self, interval: &Interval) -> std::ops::Range<usize> {
        let lo = (interval.left() - self.left) / self.spacing;
        let hi = (interval.right() - self.left) / self.spacing;
        let first = if (lo - lo.round()).abs() < LATTICE_TOL {
            lo.round() + 1.0
        } else {
            lo.ceil()
        };
        let last = if (hi - hi.round()).abs() < LATTICE_TOL {
            hi.round() - 1.0
        } else {
            hi.floor()
        };
        let first = first.max(0.0);
        let last = last.min(self.count as f64 - 1.0);
        if last < first {
            return 0..0;
        }
        first as usize..last as usize + 1
    }

    /// Grid on the same lattice whose nodes cover `[lo, hi]`, rounding outwards.
    pub fn covering(&self, lo: f64, hi: f64) -> Result<UniformGrid> {
        let a = (lo - self.left) / self.spacing;
        let b = (hi - self.left) / self.spacing;
        let first = if (a - a.round()).abs() < LATTICE_TOL {
            a.round()
        } else {
            a.floor()
        };
        let last = if (b - b.round()).abs() < LATTICE_TOL {
            b.round()
        } else {
            b.ceil()
        };
        if !(last >= first) {
            return Err(Error::param("grid", format!("empty cover of [{lo}, {hi}]")));
        }
        UniformGrid::new(
            self.left + first * self.spacing,
            self.spacing,
            (last - first) as usize + 1,
        )
    }

    /// Grid with spacing `spacing` on the lattice through `anchor`, covering `[lo, hi]`.
    pub fn lattice_cover(anchor: f64, spacing: f64, lo: f64, hi: f64) -> Result<UniformGrid> {
        UniformGrid::new(anchor, spacing, 1)?.covering(lo, hi)
    }
}

/// A complex function sampled on a [`UniformGrid`], vanishing at every node
/// outside its declared support.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: UniformGrid,
    samples: Vec<Complex64>,
    support: Interval,
}

impl GridFunction {
    pub fn new(grid: UniformGrid, samples: Vec<Complex64>, support: Interval) -> Result<Self> {
        if samples.len() != grid.count() {
            return Err(Error::GridMismatch(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.count()
            )));
        }
        if let Some(i) =
            (0..grid.count()).find(|&i| samples[i] != Complex64::new(0.0, 0.0) && !support.contains(grid.node(i)))
        {
            return Err(Error::Precondition(format!(
                "sample at x = {} is nonzero outside the declared support I({}, {})",
                grid.node(i),
                support.center(),
                support.radius()
            )));
        }
        Ok(Self { grid, samples, support })
    }

    /// Function supported on the whole grid.
    pub fn full(grid: UniformGrid, samples: Vec<Complex64>) -> Result<Self> {
        Self::new(grid, samples, grid.full_support())
    }

    pub fn zeros(grid: UniformGrid) -> Self {
        Self {
            grid,
            samples: vec![Complex64::new(0.0, 0.0); grid.count()],
            support: grid.full_support(),
        }
    }

    /// Samples `f` at the nodes inside `support`; zero elsewhere.
    pub fn from_fn(grid: UniformGrid, support: Interval, f: impl Fn(f64) -> Complex64) -> Self {
        let mut samples = vec![Complex64::new(0.0, 0.0); grid.count()];
        for i in grid.index_range(&support) {
            samples[i] = f(grid.node(i));
        }
        Self { grid, samples, support }
    }

    pub fn from_real_fn(grid: UniformGrid, support: Interval, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, support, |x| Complex64::new(f(x), 0.0))
    }

    /// The indicator of `interval`, snapped to the nodes strictly inside it.
    pub fn indicator(grid: UniformGrid, interval: Interval) -> Self {
        Self::from_fn(grid, interval, |_| Complex64::new(1.0, 0.0))
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn support(&self) -> Interval {
        self.support
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn ensure_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!("{:?} vs {:?}", self.grid, other.grid)));
        }
        Ok(())
    }

    pub fn scaled(&self, c: Complex64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            samples: self.samples.iter().map(|z| z * c).collect(),
            support: self.support,
        }
    }

    pub fn add(&self, other: &GridFunction) -> Result<GridFunction> {
        self.ensure_same_grid(other)?;
        Ok(GridFunction {
            grid: self.grid,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a + b).collect(),
            support: self.support.hull(&other.support),
        })
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.ensure_same_grid(other)?;
        Ok(GridFunction {
            grid: self.grid,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect(),
            support: self.support.hull(&other.support),
        })
    }

    /// Pointwise product; support is the first factor's.
    pub fn mul(&self, other: &GridFunction) -> Result<GridFunction> {
        self.ensure_same_grid(other)?;
        Ok(GridFunction {
            grid: self.grid,
            samples: self.samples.iter().zip(&other.samples).map(|(a, b)| a * b).collect(),
            support: self.support,
        })
    }

    /// Multiplies node `i` by `m(x_i)`; support is unchanged.
    pub fn map_nodes(&self, m: impl Fn(f64, Complex64) -> Complex64) -> GridFunction {
        GridFunction {
            grid: self.grid,
            samples: self
                .samples
                .iter()
                .enumerate()
                .map(|(i, &z)| {
                    if z.re == 0.0 && z.im == 0.0 {
                        z
                    } else {
                        m(self.grid.node(i), z)
                    }
                })
                .collect(),
            support: self.support,
        }
    }

    /// Zeroes every node outside the union of `keep` and declares their hull
    /// as the new support.
    pub fn truncated_to(&self, keep: &[Interval]) -> GridFunction {
        assert!(!keep.is_empty(), "truncation needs at least one interval");
        let mut samples = vec![Complex64::new(0.0, 0.0); self.grid.count()];
        for iv in keep {
            for i in self.grid.index_range(iv) {
                samples[i] = self.samples[i];
            }
        }
        let support = keep[1..].iter().fold(keep[0], |h, iv| h.hull(iv));
        GridFunction {
            grid: self.grid,
            samples,
            support,
        }
    }

    /// Re-declares the support, checking that the samples vanish outside it.
    pub fn with_support(self, support: Interval) -> Result<GridFunction> {
        GridFunction::new(self.grid, self.samples, support)
    }

    /// Copies the samples onto `target`, which must share the lattice and host
    /// every nonzero node.
    pub fn embed(&self, target: &UniformGrid) -> Result<GridFunction> {
        let off = target.lattice_offset(&self.grid).ok_or_else(|| {
            Error::GridMismatch(format!("grids {:?} and {:?} do not share a lattice", self.grid, target))
        })?;
        let mut samples = vec![Complex64::new(0.0, 0.0); target.count()];
        for (i, &z) in self.samples.iter().enumerate() {
            if z.re == 0.0 && z.im == 0.0 {
                continue;
            }
            let j = off + i as i64;
            if j < 0 || j as usize >= target.count() {
                return Err(Error::GridExhausted(format!(
                    "node x = {} falls outside the target grid [{}, {}]",
                    self.grid.node(i),
                    target.left(),
                    target.right()
                )));
            }
            samples[j as usize] = z;
        }
        Ok(GridFunction {
            grid: *target,
            samples,
            support: self.support,
        })
    }

    /// Restricts the grid to the closure of the support. Boundary nodes of the
    /// result are zero, so trapezoid sums are unaffected.
    pub fn trimmed(&self) -> Result<GridFunction> {
        let g = self.grid.covering(self.support.left(), self.support.right())?;
        self.embed(&g)
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Index of the first node with the largest modulus.
    pub fn argmax_abs(&self) -> usize {
        let mut best = (0, -1.0);
        for (i, z) in self.samples.iter().enumerate() {
            let n = z.norm();
            if n > best.1 {
                best = (i, n);
            }
        }
        best.0
    }

    pub fn integrate(&self) -> Complex64 {
        integrate(self)
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm(self, p)
    }
}

/// Composite trapezoid rule, summed left to right.
pub fn integrate(f: &GridFunction) -> Complex64 {
    let g = f.grid();
    f.samples()
        .iter()
        .enumerate()
        .fold(Complex64::new(0.0, 0.0), |acc, (i, z)| acc + z * g.weight(i))
}

/// Discrete `L^p` norm with the trapezoid weights; `p = ∞` gives the max modulus.
pub fn lp_norm(f: &GridFunction, p: f64) -> Result<f64> {
    if p == f64::INFINITY {
        return Ok(f.sup_norm());
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::param("p", format!("need p >= 1 or p = inf, got {p}")));
    }
    let g = f.grid();
    let sum: f64 = f
        .samples()
        .iter()
        .enumerate()
        .map(|(i, z)| z.norm().powf(p) * g.weight(i))
        .sum();
    Ok(sum.powf(1.0 / p))
}

/// The bilinear pairing `∫ f g` (no conjugation).
pub fn pair(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    f.ensure_same_grid(g)?;
    let grid = f.grid();
    Ok(f.samples()
        .iter()
        .zip(g.samples())
        .enumerate()
        .fold(Complex64::new(0.0, 0.0), |acc, (i, (a, b))| {
            acc + a * b * grid.weight(i)
        }))
}
