//! The bilinear forms `Π_b` and `Π`, approximate factorization of a single
//! atom, and the iterative weak factorization of an `H¹_b` function.
//!
//! Approximate factorization of an atom `a` on `I(x0, r)` places the unit
//! bump `g = χ_{I(y0, r)}` at `y0 = x0 + M r` and sets
//! `h = −a / (C̃_Γ)^*(g)(x0)`. The residual `a − Π_b(g, h)` is again a
//! two-bump function with `b`-cancellation, so the two-bump decomposition
//! re-atomizes it and the procedure iterates.
//!
//! Atom supports grow by up to `2^{i0+1}` per stage while the spacing of a
//! fixed grid does not, so each re-atomized step atom is re-sampled on its
//! own lattice with a fixed number of nodes per radius.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::atoms::{plan_two_bump, AtomicDecomposition, Piece, CERT_TOL, MIN_SEPARATION};
use crate::cauchy::{apply_cauchy, apply_cauchy_adjoint, related_rows};
use crate::curve::AccretiveWeight;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, Interval, UniformGrid};
use crate::spaces::{check_atom, h1b_norm_upper};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Lattice nodes per radius used when re-sampling step atoms. A multiple of
/// 8 keeps every tail-interval endpoint on the new lattice.
pub const STEP_NODES: usize = 16;

/// `‖a − Π_b(g, h)‖_∞ · M r ≤ RESIDUAL_SUP_CONSTANT · (1 + L²)`.
pub const RESIDUAL_SUP_CONSTANT: f64 = 10.0;

fn nonzero_rows(f: &GridFunction) -> Vec<usize> {
    f.samples()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.re != 0.0 || z.im != 0.0)
        .map(|(i, _)| i)
        .collect()
}

fn sparse_output(
    grid: UniformGrid,
    support: Interval,
    entries: impl IntoIterator<Item = (usize, Complex64)>,
) -> Result<GridFunction> {
    let mut samples = vec![ZERO; grid.count()];
    for (i, z) in entries {
        samples[i] += z;
    }
    GridFunction::new(grid, samples, support)
}

/// `Π_b(g, h) = (1/b)(g · C_Γ(h) − h · C_Γ^*(g))`, evaluated only where `g`
/// or `h` is nonzero and zero elsewhere.
pub fn pi_b(weight: &AccretiveWeight, g: &GridFunction, h: &GridFunction) -> Result<GridFunction> {
    g.ensure_same_grid(h)?;
    let grid = *g.grid();
    let curve = weight.curve();
    let support = g.support().hull(&h.support());
    if g.is_zero() || h.is_zero() {
        return GridFunction::new(grid, vec![ZERO; grid.count()], support);
    }
    let b = |i: usize| weight.eval(grid.node(i));
    let rows_g = nonzero_rows(g);
    let rows_h = nonzero_rows(h);
    let bh = h.map_nodes(|x, z| z * weight.eval(x));
    // C_Γ(h) = C̃(b h) on supp g; C_Γ^*(g) = −b C̃(g) on supp h
    let ch = related_rows(curve, &bh, &rows_g);
    let cg = related_rows(curve, g, &rows_h);
    let first = rows_g.iter().zip(ch).map(|(&i, c)| (i, g.samples()[i] * c / b(i)));
    let second = rows_h.iter().zip(cg).map(|(&i, c)| {
        let adj = -b(i) * c;
        (i, -h.samples()[i] * adj / b(i))
    });
    sparse_output(grid, support, first.chain(second))
}

/// `Π(G, H) = G · C̃_Γ(H) − H · (C̃_Γ)^*(G)`, restricted like [`pi_b`].
pub fn pi_classic(weight: &AccretiveWeight, g: &GridFunction, h: &GridFunction) -> Result<GridFunction> {
    g.ensure_same_grid(h)?;
    let grid = *g.grid();
    let curve = weight.curve();
    let support = g.support().hull(&h.support());
    if g.is_zero() || h.is_zero() {
        return GridFunction::new(grid, vec![ZERO; grid.count()], support);
    }
    let rows_g = nonzero_rows(g);
    let rows_h = nonzero_rows(h);
    let ch = related_rows(curve, h, &rows_g);
    let cg = related_rows(curve, g, &rows_h);
    let first = rows_g.iter().zip(ch).map(|(&i, c)| (i, g.samples()[i] * c));
    // (C̃)^* = −C̃
    let second = rows_h.iter().zip(cg).map(|(&i, c)| (i, -h.samples()[i] * -c));
    sparse_output(grid, support, first.chain(second))
}

/// Dense reference for [`pi_b`] built from the whole-grid operators.
pub fn pi_b_dense(weight: &AccretiveWeight, g: &GridFunction, h: &GridFunction) -> Result<GridFunction> {
    g.ensure_same_grid(h)?;
    let curve = weight.curve();
    let ch = apply_cauchy(curve, h);
    let cg = apply_cauchy_adjoint(curve, g);
    let grid = *g.grid();
    let samples = (0..grid.count())
        .map(|i| {
            let z = g.samples()[i] * ch.samples()[i] - h.samples()[i] * cg.samples()[i];
            if z == ZERO {
                z
            } else {
                z / weight.eval(grid.node(i))
            }
        })
        .collect();
    GridFunction::full(grid, samples)
}

/// Smallest power of two `M ≥ 128` with `ln M / M < ε`.
pub fn select_m(eps: f64) -> Result<f64> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::param("eps", "must be positive and finite"));
    }
    let mut m: f64 = 128.0;
    while m.ln() / m >= eps {
        m *= 2.0;
        if m > 2f64.powi(40) {
            return Err(Error::param("eps", format!("{eps} needs M beyond 2^40")));
        }
    }
    Ok(m)
}

/// The factors of one approximate factorization `a ≈ Π_b(g, h)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorPair {
    pub g: GridFunction,
    pub h: GridFunction,
    pub m: f64,
    pub x0: f64,
    pub y0: f64,
    pub r: f64,
    /// `(C̃_Γ)^*(g)(x0)`
    pub denom: Complex64,
}

impl FactorPair {
    pub fn l2_product(&self) -> Result<f64> {
        Ok(self.g.lp_norm(2.0)? * self.h.lp_norm(2.0)?)
    }

    /// `g` and `h` trimmed to their supports, for storage.
    pub fn compact(&self) -> Result<FactorPair> {
        Ok(FactorPair {
            g: self.g.trimmed()?,
            h: self.h.trimmed()?,
            ..self.clone()
        })
    }

    /// `g` and `h` on the smallest common grid of their lattice.
    pub fn on_common_grid(&self) -> Result<(GridFunction, GridFunction)> {
        let lo = self.g.grid().left().min(self.h.grid().left());
        let hi = self.g.grid().right().max(self.h.grid().right());
        let grid = self.g.grid().covering(lo, hi)?;
        Ok((self.g.embed(&grid)?, self.h.embed(&grid)?))
    }
}

/// Rigorous floor for `|(C̃_Γ)^*(χ_{I(y0,r)})(x0)|`: every kernel term has
/// imaginary part of one sign and size at least `w/(π(1+L²)|y − x0|)`.
fn denominator_floor(weight: &AccretiveWeight, g: &GridFunction, x0: f64) -> f64 {
    let l = weight.curve().lipschitz_constant();
    let grid = g.grid();
    let s: f64 = nonzero_rows(g)
        .into_iter()
        .map(|j| grid.weight(j) * g.samples()[j].norm() / (grid.node(j) - x0).abs())
        .sum();
    s / (PI * (1.0 + l * l))
}

/// Approximate factorization with the separation chosen by [`select_m`].
pub fn approx_factor_atom(
    weight: &AccretiveWeight,
    a: &GridFunction,
    support: &Interval,
    eps: f64,
) -> Result<FactorPair> {
    approx_factor_atom_with_m(weight, a, support, select_m(eps)?)
}

/// Approximate factorization `a ≈ Π_b(g, h)` with `y0 = x0 + M r`.
pub fn approx_factor_atom_with_m(
    weight: &AccretiveWeight,
    a: &GridFunction,
    support: &Interval,
    m: f64,
) -> Result<FactorPair> {
    if !(m > MIN_SEPARATION) || !m.is_finite() {
        return Err(Error::param("M", format!("must exceed {MIN_SEPARATION}")));
    }
    let cert = check_atom(a, support, weight, CERT_TOL)?;
    if !cert.accepted() {
        return Err(Error::Precondition(format!("input is not an H1_b atom: {cert:?}")));
    }
    let grid = *a.grid();
    let (x0, r) = (support.center(), support.radius());
    let y0 = x0 + m * r;
    let ix = grid
        .lattice_index(x0)
        .filter(|&i| i >= 0 && (i as usize) < grid.count())
        .ok_or_else(|| Error::Precondition(format!("atom centre {x0} is not a grid node")))? as usize;
    if !grid.on_lattice(x0 + r) {
        return Err(Error::Precondition(format!(
            "radius {r} is not a multiple of the spacing"
        )));
    }
    if y0 + r > grid.right() + 0.5 * grid.spacing() {
        return Err(Error::GridExhausted(format!(
            "I({y0}, {r}) reaches {} beyond the grid end {}",
            y0 + r,
            grid.right()
        )));
    }
    let g = GridFunction::indicator(grid, Interval::new(y0, r)?);
    let denom = -related_rows(weight.curve(), &g, &[ix])[0];
    let floor = denominator_floor(weight, &g, x0);
    if !(denom.norm() >= floor * (1.0 - 1e-12)) {
        return Err(Error::numerical(
            "denominator floor",
            format!("|(C~)*(g)(x0)| = {:e} below {floor:e}", denom.norm()),
        ));
    }
    let h = a.scaled(-denom.inv());
    let pair = FactorPair {
        g,
        h,
        m,
        x0,
        y0,
        r,
        denom,
    };
    let l = weight.curve().lipschitz_constant();
    let prod = pair.l2_product()?;
    let cap = PI * (1.0 + l * l) * m;
    if prod > cap {
        return Err(Error::numerical(
            "factor norm",
            format!("||g|| ||h|| = {prod} exceeds {cap}"),
        ));
    }
    Ok(pair)
}

/// `a − Π_b(g, h)` with its support, sup and cancellation bounds checked.
pub fn residual(weight: &AccretiveWeight, a: &GridFunction, pair: &FactorPair) -> Result<GridFunction> {
    a.ensure_same_grid(&pair.g)?;
    let pb = pi_b(weight, &pair.g, &pair.h)?;
    let res = a.sub(&pb)?;
    let grid = res.grid();
    let b1 = Interval::new(pair.x0, pair.r)?;
    let b2 = Interval::new(pair.y0, pair.r)?;
    if let Some(i) = nonzero_rows(&res)
        .into_iter()
        .find(|&i| !b1.contains(grid.node(i)) && !b2.contains(grid.node(i)))
    {
        return Err(Error::numerical(
            "residual support",
            format!("nonzero at x = {}", grid.node(i)),
        ));
    }
    let l = weight.curve().lipschitz_constant();
    let sup_scaled = res.sup_norm() * pair.m * pair.r;
    let cap = RESIDUAL_SUP_CONSTANT * (1.0 + l * l);
    if sup_scaled > cap {
        return Err(Error::numerical(
            "residual sup bound",
            format!("||res|| M r = {sup_scaled} exceeds {cap}"),
        ));
    }
    let cancel = res.map_nodes(|x, z| z * weight.eval(x)).integrate().norm();
    let scale = a.lp_norm(1.0)? * weight.sup_norm();
    if cancel > CERT_TOL * scale {
        return Err(Error::numerical(
            "residual cancellation",
            format!("|∫ res b| = {cancel:e}"),
        ));
    }
    Ok(res)
}

/// Atomic `H¹_b` upper estimate of a two-bump residual: normalize by the sup
/// norm, decompose, and return `s · Σ|α|`.
pub fn estimate_residual_h1b(weight: &AccretiveWeight, res: &GridFunction, x0: f64, y0: f64, r: f64) -> Result<f64> {
    let s = res.sup_norm();
    if s == 0.0 {
        return Ok(0.0);
    }
    let (plan, _) = plan_two_bump(weight, &res.scaled(Complex64::new(1.0 / s, 0.0)), x0, y0, r)?;
    Ok(s * plan.iter().map(|t| t.alpha).sum::<f64>())
}

/// `(G, H) = (g, b h)`, which turns `Π_b(g, h)` into `Π(G, H) / b`.
pub fn h1_factor_from_h1b(weight: &AccretiveWeight, pair: &FactorPair) -> (GridFunction, GridFunction) {
    (pair.g.clone(), pair.h.map_nodes(|x, z| z * weight.eval(x)))
}

/// One `λ Π_b(g, h)` term of a stage.
#[derive(Debug, Clone, PartialEq)]
pub struct StageTerm {
    pub lambda: Complex64,
    pub pair: FactorPair,
    /// `|λ|` times the atomic estimate of this atom's residual.
    pub residual_estimate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakParams {
    pub eps: f64,
    pub m: f64,
    pub c0_measured: f64,
    /// Stages actually run.
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakFactorization {
    pub stages: Vec<Vec<StageTerm>>,
    /// Entry 0 is the initial estimate; entry `k` bounds `‖E_k‖`.
    pub residual_trace: Vec<f64>,
    pub params: WeakParams,
}

impl WeakFactorization {
    pub fn lambda_sum(&self) -> f64 {
        self.stages.iter().flatten().map(|t| t.lambda.norm()).sum()
    }

    /// `Σ |λ| ‖g‖₂ ‖h‖₂` over every stage.
    pub fn weighted_lambda_sum(&self) -> Result<f64> {
        let mut s = 0.0;
        for t in self.stages.iter().flatten() {
            s += t.lambda.norm() * t.pair.l2_product()?;
        }
        Ok(s)
    }

    pub fn is_contracting(&self) -> bool {
        self.params.eps * self.params.c0_measured < 1.0
    }

    /// `residual_trace[k] / residual_trace[k−1]`.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.residual_trace.windows(2).map(|w| w[1] / w[0]).collect()
    }
}

#[derive(Debug, Clone)]
struct WorkAtom {
    coef: Complex64,
    atom: GridFunction,
    support: Interval,
}

struct AtomOutcome {
    term: StageTerm,
    children: Vec<WorkAtom>,
    child_sum: f64,
}

fn check_child(weight: &AccretiveWeight, atom: &GridFunction, support: &Interval) -> Result<()> {
    let cert = check_atom(atom, support, weight, CERT_TOL)?;
    if !cert.accepted() {
        return Err(Error::numerical(
            "atom certificate",
            format!("re-atomized residual term rejected: {cert:?}"),
        ));
    }
    Ok(())
}

fn factor_work_atom(weight: &AccretiveWeight, item: &WorkAtom, m: f64, keep_children: bool) -> Result<AtomOutcome> {
    let (x0, r) = (item.support.center(), item.support.radius());
    let y0 = x0 + m * r;
    let src = item.atom.grid();
    let wide = UniformGrid::lattice_cover(src.left(), src.spacing(), item.support.left(), y0 + r)?;
    let a = item.atom.embed(&wide)?;
    let pair = approx_factor_atom_with_m(weight, &a, &item.support, m)?;
    let res = residual(weight, &a, &pair)?;
    let s = res.sup_norm();
    let mut children = Vec::new();
    let mut child_sum = 0.0;
    let mut estimate = 0.0;
    if s > 0.0 {
        let (plan, _) = plan_two_bump(weight, &res.scaled(Complex64::new(1.0 / s, 0.0)), x0, y0, r)?;
        for p in plan {
            estimate += s * p.alpha;
            if p.alpha == 0.0 {
                continue;
            }
            let (alpha, atom) = match p.piece {
                Piece::Sampled(atom) => (p.alpha, atom.trimmed()?),
                Piece::Step(step) => {
                    let spacing = step.outer.radius() / STEP_NODES as f64;
                    step.materialize(weight, step.outer.center(), spacing)?
                }
            };
            if alpha == 0.0 {
                continue;
            }
            check_child(weight, &atom, &p.support)?;
            let coef = item.coef * s * alpha;
            child_sum += coef.norm();
            if keep_children {
                children.push(WorkAtom {
                    coef,
                    atom,
                    support: p.support,
                });
            }
        }
    }
    Ok(AtomOutcome {
        term: StageTerm {
            lambda: item.coef,
            pair: pair.compact()?,
            residual_estimate: item.coef.norm() * estimate,
        },
        children,
        child_sum,
    })
}

/// Iterative weak factorization `f ≈ Σ_k Σ_j λ_j^k Π_b(g_j^k, h_j^k)` over at
/// most `stages` stages, stopping early once the residual estimate falls
/// below `10⁻¹²` of the initial one.
pub fn weak_factorize(
    weight: &AccretiveWeight,
    initial: &AtomicDecomposition,
    eps: f64,
    stages: usize,
) -> Result<WeakFactorization> {
    let m = select_m(eps)?;
    let initial_estimate = h1b_norm_upper(initial)?;
    let mut work: Vec<WorkAtom> = initial
        .terms
        .iter()
        .filter(|t| t.coef != ZERO)
        .map(|t| {
            Ok(WorkAtom {
                coef: t.coef,
                atom: t.atom.trimmed()?,
                support: t.support,
            })
        })
        .collect::<Result<_>>()?;
    let mut out = WeakFactorization {
        stages: Vec::new(),
        residual_trace: vec![initial_estimate],
        params: WeakParams {
            eps,
            m,
            c0_measured: 0.0,
            k: 0,
        },
    };
    for k in 1..=stages {
        if work.is_empty() {
            break;
        }
        let keep = k < stages;
        let outcomes: Vec<AtomOutcome> = work
            .par_iter()
            .map(|item| factor_work_atom(weight, item, m, keep))
            .collect::<Result<_>>()?;
        let prev = *out.residual_trace.last().expect("trace starts non-empty");
        let lambda_sum: f64 = outcomes.iter().map(|o| o.term.lambda.norm()).sum();
        let trace: f64 = outcomes.iter().map(|o| o.child_sum).sum();
        if prev > 0.0 {
            out.params.c0_measured = out.params.c0_measured.max(lambda_sum / prev);
        }
        let mut terms = Vec::with_capacity(outcomes.len());
        work = Vec::new();
        for o in outcomes {
            terms.push(o.term);
            work.extend(o.children);
        }
        out.stages.push(terms);
        out.residual_trace.push(trace);
        out.params.k = k;
        if trace < 1e-12 * initial_estimate {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::odd_atom;
    use crate::curve::LipschitzCurve;
    use crate::grid::pair;

    #[test]
    fn m_selection() {
        assert_eq!(select_m(0.1).unwrap(), 128.0);
        assert_eq!(select_m(0.05).unwrap(), 128.0);
        assert_eq!(select_m(0.03).unwrap(), 256.0);
        assert!(select_m(0.0).is_err());
        assert!(select_m(f64::NAN).is_err());
    }

    #[test]
    fn sparse_pi_b_matches_dense_formula() {
        let w = AccretiveWeight::new(LipschitzCurve::tent());
        let grid = UniformGrid::new(-4.0, 1.0 / 16.0, 161).unwrap();
        let g = GridFunction::from_fn(grid, Interval::new(1.0, 1.0).unwrap(), |x| Complex64::new(x, 1.0));
        let h = GridFunction::from_fn(grid, Interval::new(-0.5, 1.0).unwrap(), |x| Complex64::new(1.0, -x * x));
        let sparse = pi_b(&w, &g, &h).unwrap();
        let dense = pi_b_dense(&w, &g, &h).unwrap();
        for (u, v) in sparse.samples().iter().zip(dense.samples()) {
            assert!((u - v).norm() <= 1e-13 * (1.0 + v.norm()));
        }
    }

    #[test]
    fn pi_b_vanishes_with_a_zero_factor() {
        let w = AccretiveWeight::new(LipschitzCurve::tent());
        let grid = UniformGrid::new(-4.0, 1.0 / 16.0, 129).unwrap();
        let g = GridFunction::indicator(grid, Interval::new(0.0, 1.0).unwrap());
        let z = GridFunction::zeros(grid);
        assert!(pi_b(&w, &g, &z).unwrap().is_zero());
        assert!(pi_classic(&w, &z, &g).unwrap().is_zero());
    }

    #[test]
    fn flat_denominator_matches_hilbert_oracle() {
        let w = AccretiveWeight::new(LipschitzCurve::flat());
        let h = 1.0 / 32.0;
        let grid = UniformGrid::new(-2.0, h, ((132.0 / h) as usize) + 1).unwrap();
        let support = Interval::new(0.0, 1.0).unwrap();
        let a = odd_atom(&w, grid, 0.0, 1.0).unwrap();
        let p = approx_factor_atom(&w, &a, &support, 0.1).unwrap();
        assert_eq!(p.m, 128.0);
        let m = p.m;
        // −(i/π) ln((M−1)/(M+1)) up to the O(h) snapping of the indicator
        let exact = Complex64::new(0.0, -((m - 1.0) / (m + 1.0)).ln() / PI);
        assert!(
            (p.denom - exact).norm() <= 0.05 * exact.norm(),
            "{} vs {}",
            p.denom,
            exact
        );
        assert!((p.g.lp_norm(2.0).unwrap() - 2f64.sqrt()).abs() < h);
        // ‖g‖‖h‖ ≈ ‖a‖₂ √(2r) / |denom| ≈ πM/2
        let ratio = p.l2_product().unwrap() / m;
        assert!((ratio - PI / 2.0).abs() < 0.05 * PI / 2.0, "{ratio}");
    }

    #[test]
    fn grid_too_narrow_is_reported() {
        let w = AccretiveWeight::new(LipschitzCurve::flat());
        let grid = UniformGrid::new(-2.0, 1.0 / 16.0, 16 * 64 + 1).unwrap();
        let a = odd_atom(&w, grid, 0.0, 1.0).unwrap();
        let err = approx_factor_atom(&w, &a, &Interval::new(0.0, 1.0).unwrap(), 0.1).unwrap_err();
        assert!(matches!(err, Error::GridExhausted(_)));
    }

    #[test]
    fn residual_is_small_and_cancels() {
        for curve in [LipschitzCurve::flat(), LipschitzCurve::tent()] {
            let w = AccretiveWeight::new(curve);
            let grid = UniformGrid::new(-2.0, 1.0 / 16.0, 16 * 132 + 1).unwrap();
            let support = Interval::new(0.0, 1.0).unwrap();
            let a = odd_atom(&w, grid, 0.0, 1.0).unwrap();
            let p = approx_factor_atom(&w, &a, &support, 0.1).unwrap();
            let res = residual(&w, &a, &p).unwrap();
            let est = estimate_residual_h1b(&w, &res, p.x0, p.y0, p.r).unwrap();
            assert!(est > 0.0 && est < 1.0, "{est}");
            let pb = pi_b(&w, &p.g, &p.h).unwrap();
            let ones = GridFunction::from_fn(grid, grid.full_support(), |x| w.eval(x));
            let scale = p.l2_product().unwrap();
            assert!(pair(&pb, &ones).unwrap().norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn corollary_factors() {
        let w = AccretiveWeight::new(LipschitzCurve::tent());
        let grid = UniformGrid::new(-2.0, 1.0 / 16.0, 16 * 132 + 1).unwrap();
        let support = Interval::new(0.0, 1.0).unwrap();
        let a = odd_atom(&w, grid, 0.0, 1.0).unwrap();
        let p = approx_factor_atom(&w, &a, &support, 0.1).unwrap();
        let (gg, hh) = h1_factor_from_h1b(&w, &p);
        let ratio = hh.lp_norm(2.0).unwrap() / p.h.lp_norm(2.0).unwrap();
        assert!((1.0..=2f64.sqrt() + 1e-12).contains(&ratio));
        let lhs = pi_classic(&w, &gg, &hh).unwrap().map_nodes(|x, z| z / w.eval(x));
        let rhs = pi_b(&w, &p.g, &p.h).unwrap();
        let scale = rhs.sup_norm();
        for (u, v) in lhs.samples().iter().zip(rhs.samples()) {
            assert!((u - v).norm() <= 1e-10 * scale);
        }
    }

    #[test]
    fn empty_run_returns_initial() {
        let w = AccretiveWeight::new(LipschitzCurve::flat());
        let grid = UniformGrid::new(-2.0, 1.0 / 16.0, 65).unwrap();
        let support = Interval::new(0.0, 1.0).unwrap();
        let init = AtomicDecomposition::single(
            &w,
            Complex64::new(1.0, 0.0),
            odd_atom(&w, grid, 0.0, 1.0).unwrap(),
            support,
        )
        .unwrap();
        let wf = weak_factorize(&w, &init, 0.05, 0).unwrap();
        assert!(wf.stages.is_empty());
        assert_eq!(wf.residual_trace, vec![1.0]);
    }
}
