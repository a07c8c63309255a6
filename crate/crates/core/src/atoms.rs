//! Constructive atomic decomposition of two-bump functions with
//! `b`-cancellation.
//!
//! A function `f` supported on `I(x0, r) ∪ I(y0, r)` with `|f| ≤ 1` and
//! `∫ f b = 0` is split into its two bumps `f_1`, `f_2`. Each bump's mass
//! `m_j = ∫ f_j b` is spread over the dyadic enlargements
//! `J_i = I(c_j, 2^i r)` through `g_j^i = m_j χ_{J_i} / ∫_{J_i} b`, and the
//! differences `g_j^{i−1} − g_j^i` (with `g_j^0 = f_j`) are atoms up to
//! normalization. Once `J_{i0}` contains both bumps, the last level is
//! balanced against the shared tail interval `Ī`; the two tail masses
//! cancel because `∫ f b = 0`.

use num_complex::Complex64;

use crate::curve::AccretiveWeight;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, Interval, UniformGrid};
use crate::spaces::{check_atom, AtomCertificate};

/// Certificate tolerance for atoms emitted by the construction.
pub const CERT_TOL: f64 = 1e-8;
/// Relative tolerance on the `∫ f b = 0` precondition.
pub const CANCELLATION_TOL: f64 = 1e-8;
/// Bumps must be separated by more than this many radii.
pub const MIN_SEPARATION: f64 = 100.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct AtomTerm {
    pub coef: Complex64,
    pub atom: GridFunction,
    pub support: Interval,
    pub certificate: AtomCertificate,
    /// `(j, i)`: bump index and enlargement level, for two-bump output.
    pub label: Option<(usize, usize)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionMeta {
    pub i0: u32,
    pub m: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AtomicDecomposition {
    pub terms: Vec<AtomTerm>,
    pub meta: Option<DecompositionMeta>,
}

impl AtomicDecomposition {
    /// A single certified atom with coefficient `coef`.
    pub fn single(weight: &AccretiveWeight, coef: Complex64, atom: GridFunction, support: Interval) -> Result<Self> {
        let certificate = check_atom(&atom, &support, weight, CERT_TOL)?;
        if !certificate.accepted() {
            return Err(Error::Precondition(format!("not an H1_b atom: {certificate:?}")));
        }
        Ok(Self {
            terms: vec![AtomTerm {
                coef,
                atom,
                support,
                certificate,
                label: None,
            }],
            meta: None,
        })
    }

    /// Concatenation; the result carries no two-bump metadata.
    pub fn concat(mut self, other: AtomicDecomposition) -> Self {
        self.terms.extend(other.terms);
        self.meta = None;
        self
    }

    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coef.norm()).sum()
    }

    /// `Σ coef · atom` on `target`, which must share the atoms' lattice.
    pub fn reconstruct(&self, target: &UniformGrid) -> Result<GridFunction> {
        let mut acc = vec![ZERO; target.count()];
        for t in &self.terms {
            let a = t.atom.embed(target)?;
            for (s, z) in acc.iter_mut().zip(a.samples()) {
                *s += t.coef * z;
            }
        }
        GridFunction::full(*target, acc)
    }

    /// Smallest grid on the atoms' lattice hosting every term.
    pub fn covering_grid(&self) -> Option<UniformGrid> {
        let first = self.terms.first()?;
        let (lo, hi) = self
            .terms
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                (lo.min(t.atom.grid().left()), hi.max(t.atom.grid().right()))
            });
        first.atom.grid().covering(lo, hi).ok()
    }
}

/// `Σ_{x ∈ I} h·b(x)` over the lattice nodes strictly inside `interval`, with
/// the number of nodes summed.
pub(crate) fn lattice_b_integral(
    weight: &AccretiveWeight,
    anchor: f64,
    spacing: f64,
    interval: &Interval,
) -> Result<(Complex64, usize)> {
    let grid = UniformGrid::lattice_cover(anchor, spacing, interval.left(), interval.right())?;
    let range = grid.index_range(interval);
    let n = range.len();
    let sum = range.fold(ZERO, |acc, i| acc + weight.eval(grid.node(i)) * spacing);
    Ok((sum, n))
}

/// `|∫_I b| ≥ |I|` on the discrete measure, since `Re b ≡ 1`.
fn checked_b_integral(weight: &AccretiveWeight, anchor: f64, spacing: f64, interval: &Interval) -> Result<Complex64> {
    let (beta, n) = lattice_b_integral(weight, anchor, spacing, interval)?;
    let measure = n as f64 * spacing;
    if n == 0 || beta.norm() < measure * (1.0 - 1e-12) {
        return Err(Error::numerical(
            "denominator safety",
            format!(
                "|∫b| = {} below the measure {measure} of I({}, {})",
                beta.norm(),
                interval.center(),
                interval.radius()
            ),
        ));
    }
    Ok(beta)
}

/// `mass · (χ_inner / ∫_inner b − χ_outer / ∫_outer b)` with `inner ⊂ outer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct StepPiece {
    pub inner: Interval,
    pub outer: Interval,
    pub mass: Complex64,
}

impl StepPiece {
    /// The two plateau values (on `inner`, on `outer \ inner`) on a lattice.
    fn levels(&self, weight: &AccretiveWeight, anchor: f64, spacing: f64) -> Result<(Complex64, Complex64)> {
        let b_in = checked_b_integral(weight, anchor, spacing, &self.inner)?;
        let b_out = checked_b_integral(weight, anchor, spacing, &self.outer)?;
        let outer_value = -self.mass / b_out;
        Ok((self.mass / b_in + outer_value, outer_value))
    }

    /// `‖piece‖_∞ · |outer|`.
    pub fn alpha(&self, weight: &AccretiveWeight, anchor: f64, spacing: f64) -> Result<f64> {
        let (a, b) = self.levels(weight, anchor, spacing)?;
        Ok(a.norm().max(b.norm()) * self.outer.length())
    }

    /// Samples `piece / alpha` on the lattice cover of `outer`, returning
    /// `(alpha, atom)`. A zero piece yields `alpha = 0` and the zero atom.
    pub fn materialize(&self, weight: &AccretiveWeight, anchor: f64, spacing: f64) -> Result<(f64, GridFunction)> {
        let (v_in, v_out) = self.levels(weight, anchor, spacing)?;
        let alpha = v_in.norm().max(v_out.norm()) * self.outer.length();
        let grid = UniformGrid::lattice_cover(anchor, spacing, self.outer.left(), self.outer.right())?;
        let mut samples = vec![ZERO; grid.count()];
        if alpha > 0.0 {
            for i in grid.index_range(&self.outer) {
                samples[i] = v_out / alpha;
            }
            for i in grid.index_range(&self.inner) {
                samples[i] = v_in / alpha;
            }
        }
        Ok((alpha, GridFunction::new(grid, samples, self.outer)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Piece {
    /// `f_j − g_j^1`, already divided by its `alpha`.
    Sampled(GridFunction),
    Step(StepPiece),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PlannedTerm {
    pub j: usize,
    pub i: usize,
    pub alpha: f64,
    pub support: Interval,
    pub piece: Piece,
}

/// Smallest `i ≥ 1` with `2^i ≥ M + 1`, i.e. `I(y0, r) ⊂ I(x0, 2^i r)`.
pub fn containment_level(m: f64) -> u32 {
    let mut i = 1;
    while 2f64.powi(i as i32) < m + 1.0 - 1e-9 {
        i += 1;
    }
    i
}

fn validate_two_bump(weight: &AccretiveWeight, f: &GridFunction, x0: f64, y0: f64, r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() || !x0.is_finite() || !y0.is_finite() {
        return Err(Error::param("two-bump geometry", "need finite centres and r > 0"));
    }
    let grid = f.grid();
    for (name, p) in [("x0", x0), ("y0", y0), ("x0 + r", x0 + r)] {
        if !grid.on_lattice(p) {
            return Err(Error::Precondition(format!("{name} = {p} is not a lattice node")));
        }
    }
    let m = (y0 - x0).abs() / r;
    if !(m > MIN_SEPARATION) {
        return Err(Error::Precondition(format!(
            "separation M = {m} must exceed {MIN_SEPARATION}"
        )));
    }
    let b1 = Interval::new(x0, r)?;
    let b2 = Interval::new(y0, r)?;
    for (i, z) in f.samples().iter().enumerate() {
        let x = grid.node(i);
        if *z != ZERO && !b1.contains(x) && !b2.contains(x) {
            return Err(Error::Precondition(format!(
                "f is nonzero at x = {x}, outside both bumps"
            )));
        }
        if z.norm() > 1.0 + 1e-9 {
            return Err(Error::Precondition(format!("|f({x})| = {} exceeds 1", z.norm())));
        }
    }
    let l1 = f.lp_norm(1.0)?;
    if l1 > 0.0 {
        let fb = f.map_nodes(|x, z| z * weight.eval(x)).integrate().norm();
        if fb > CANCELLATION_TOL * l1 * weight.sup_norm() {
            return Err(Error::Precondition(format!(
                "|∫ f b| = {fb:e} violates the cancellation condition"
            )));
        }
    }
    Ok(m)
}

/// The construction with step atoms left symbolic. Coefficients are computed
/// on `f`'s lattice.
pub(crate) fn plan_two_bump(
    weight: &AccretiveWeight,
    f: &GridFunction,
    x0: f64,
    y0: f64,
    r: f64,
) -> Result<(Vec<PlannedTerm>, DecompositionMeta)> {
    let m = validate_two_bump(weight, f, x0, y0, r)?;
    let i0 = containment_level(m);
    let anchor = f.grid().left();
    let h = f.grid().spacing();
    let tail = Interval::new(0.5 * (x0 + y0), 2f64.powi(i0 as i32 + 1) * r)?;
    let mut terms = Vec::with_capacity(2 * (i0 as usize + 1));
    for (j, c) in [(1, x0), (2, y0)] {
        let bump = Interval::new(c, r)?;
        let f_j = f.truncated_to(&[bump]);
        let mass = f_j.map_nodes(|x, z| z * weight.eval(x)).integrate();
        let level = |i: u32| Interval::new(c, 2f64.powi(i as i32) * r);

        let j1 = level(1)?;
        let b1 = checked_b_integral(weight, anchor, h, &j1)?;
        let cover = f.grid().covering(j1.left(), j1.right())?;
        let g1 = GridFunction::indicator(cover, j1).scaled(mass / b1);
        let f1 = f_j.embed(&cover)?.with_support(j1)?.sub(&g1)?;
        let alpha = f1.sup_norm() * j1.length();
        let atom = if alpha > 0.0 {
            f1.scaled(Complex64::new(1.0 / alpha, 0.0))
        } else {
            GridFunction::new(cover, vec![ZERO; cover.count()], j1)?
        };
        terms.push(PlannedTerm {
            j,
            i: 1,
            alpha,
            support: j1,
            piece: Piece::Sampled(atom),
        });

        for i in 2..=i0 + 1 {
            let inner = level(i - 1)?;
            let outer = if i == i0 + 1 { tail } else { level(i)? };
            let step = StepPiece { inner, outer, mass };
            terms.push(PlannedTerm {
                j,
                i: i as usize,
                alpha: step.alpha(weight, anchor, h)?,
                support: outer,
                piece: Piece::Step(step),
            });
        }
    }
    Ok((terms, DecompositionMeta { i0, m, r }))
}

/// Decomposes a two-bump function into `2(i0 + 1)` certified atoms.
pub fn decompose_two_bump(
    weight: &AccretiveWeight,
    f: &GridFunction,
    x0: f64,
    y0: f64,
    r: f64,
) -> Result<AtomicDecomposition> {
    let (plan, meta) = plan_two_bump(weight, f, x0, y0, r)?;
    let anchor = f.grid().left();
    let h = f.grid().spacing();
    let bound = 6.0 * weight.sup_norm() * r;
    let mut terms = Vec::with_capacity(plan.len());
    for p in plan {
        let (alpha, atom) = match p.piece {
            Piece::Sampled(a) => (p.alpha, a),
            Piece::Step(s) => s.materialize(weight, anchor, h)?,
        };
        if alpha > bound * (1.0 + 1e-12) {
            return Err(Error::numerical(
                "coefficient bound",
                format!("|alpha_{}^{}| = {alpha} exceeds 6 ||b|| r = {bound}", p.j, p.i),
            ));
        }
        let certificate = check_atom(&atom, &p.support, weight, CERT_TOL)?;
        if !certificate.accepted() {
            return Err(Error::numerical(
                "atom certificate",
                format!("term ({}, {}) rejected: {certificate:?}", p.j, p.i),
            ));
        }
        terms.push(AtomTerm {
            coef: Complex64::new(alpha, 0.0),
            atom,
            support: p.support,
            certificate,
            label: Some((p.j, p.i)),
        });
    }
    Ok(AtomicDecomposition {
        terms,
        meta: Some(meta),
    })
}

/// `Σ|α|`, checked against `12 ‖b‖_∞ r (i0 + 1)`.
pub fn two_bump_norm_bound(weight: &AccretiveWeight, dec: &AtomicDecomposition) -> Result<f64> {
    let meta = dec
        .meta
        .ok_or_else(|| Error::Precondition("decomposition carries no two-bump metadata".into()))?;
    let sum = dec.coefficient_sum();
    let bound = 12.0 * weight.sup_norm() * meta.r * (meta.i0 as f64 + 1.0);
    if sum > bound * (1.0 + 1e-12) {
        return Err(Error::numerical("two-bump norm bound", format!("{sum} > {bound}")));
    }
    Ok(sum)
}

/// `c (χ_{I(x0,r)} / β₁ − χ_{I(y0,r)} / β₂)` with `β_k = ∫ b` over each bump
/// and `c = min |β_k|`, so that `|f| ≤ 1` and `∫ f b = 0`.
pub fn two_bump_function(
    weight: &AccretiveWeight,
    grid: UniformGrid,
    x0: f64,
    y0: f64,
    r: f64,
) -> Result<GridFunction> {
    let i1 = Interval::new(x0, r)?;
    let i2 = Interval::new(y0, r)?;
    let bump = |iv: Interval| -> Result<(GridFunction, Complex64)> {
        let chi = GridFunction::indicator(grid, iv);
        let beta = chi.map_nodes(|x, z| z * weight.eval(x)).integrate();
        if beta == ZERO {
            return Err(Error::Precondition(format!(
                "no grid nodes inside I({}, {})",
                iv.center(),
                iv.radius()
            )));
        }
        Ok((chi, beta))
    };
    let (c1, beta1) = bump(i1)?;
    let (c2, beta2) = bump(i2)?;
    let c = beta1.norm().min(beta2.norm());
    let f = c1.scaled(c / beta1).sub(&c2.scaled(c / beta2))?;
    Ok(f)
}

/// Odd-type atom on `I(c, r)`: positive on the right half, negative on the
/// left, each half divided by its `∫ b`, scaled to `‖a‖_∞ = 1/(2r)`.
pub fn odd_atom(weight: &AccretiveWeight, grid: UniformGrid, c: f64, r: f64) -> Result<GridFunction> {
    let right = Interval::new(c + 0.5 * r, 0.5 * r)?;
    let left = Interval::new(c - 0.5 * r, 0.5 * r)?;
    balanced_pair(weight, grid, right, left, Interval::new(c, r)?)
}

/// Even-type atom on `I(c, r)`: the step `χ_{I(c,r/2)}/β_in − χ_{I(c,r)}/β_out`,
/// scaled to `‖a‖_∞ = 1/(2r)`.
pub fn even_atom(weight: &AccretiveWeight, grid: UniformGrid, c: f64, r: f64) -> Result<GridFunction> {
    let support = Interval::new(c, r)?;
    let step = StepPiece {
        inner: Interval::new(c, 0.5 * r)?,
        outer: support,
        mass: Complex64::new(1.0, 0.0),
    };
    let (_, atom) = step.materialize(weight, grid.left(), grid.spacing())?;
    atom.embed(&grid)?.with_support(support)
}

fn balanced_pair(
    weight: &AccretiveWeight,
    grid: UniformGrid,
    pos: Interval,
    neg: Interval,
    support: Interval,
) -> Result<GridFunction> {
    let f = two_bump_like(weight, grid, pos, neg)?;
    let s = f.sup_norm() * support.length();
    if s == 0.0 {
        return Err(Error::Precondition("atom support holds no grid nodes".into()));
    }
    f.scaled(Complex64::new(1.0 / s, 0.0)).with_support(support)
}

fn two_bump_like(weight: &AccretiveWeight, grid: UniformGrid, pos: Interval, neg: Interval) -> Result<GridFunction> {
    let chi_p = GridFunction::indicator(grid, pos);
    let chi_n = GridFunction::indicator(grid, neg);
    let bp = chi_p.map_nodes(|x, z| z * weight.eval(x)).integrate();
    let bn = chi_n.map_nodes(|x, z| z * weight.eval(x)).integrate();
    if bp == ZERO || bn == ZERO {
        return Err(Error::Precondition("atom support holds no grid nodes".into()));
    }
    chi_p.scaled(bp.inv()).sub(&chi_n.scaled(bn.inv()))
}
