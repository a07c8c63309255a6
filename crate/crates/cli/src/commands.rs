//! One function per subcommand. Each returns its files in memory.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use lipschitz_h1b::commutator::{CommutatorSpec, Variant};
use lipschitz_h1b::io::{
    commutator_study_csv, decomposition_csv, oscillation_csv, parse_curve_spec, parse_manifest, profile_csv,
    stages_csv, trace_csv, AtomShape, CurveSource, InitialSpec, StudyRow,
};
use lipschitz_h1b::symbols::study_symbols;
use lipschitz_h1b::{
    apply_related_cauchy, AccretiveWeight, AtomicDecomposition, Error, GridFunction, Interval, LipschitzCurve,
    UniformGrid,
};
use lipschitz_h1b::{atoms, factorization, spaces};
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Failure, GridArgs, Outputs, Shape, VariantArg};

type Run<T> = Result<T, Failure>;

fn load_curve(arg: &str) -> Run<LipschitzCurve> {
    match arg {
        "flat" => Ok(LipschitzCurve::flat()),
        "tent" => Ok(LipschitzCurve::tent()),
        path => load_curve_file(Path::new(path)),
    }
}

fn load_curve_file(path: &Path) -> Run<LipschitzCurve> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_curve_spec(&text)?)
}

fn resolve_grid(args: GridArgs, left: f64, spacing: f64, count: usize) -> Run<UniformGrid> {
    Ok(UniformGrid::new(
        args.grid_left.unwrap_or(left),
        args.grid_spacing.unwrap_or(spacing),
        args.grid_count.unwrap_or(count),
    )?)
}

/// Extends `grid` along its own lattice until it covers `[lo, hi]`.
fn widen(grid: UniformGrid, lo: f64, hi: f64) -> Run<UniformGrid> {
    Ok(grid.covering(lo.min(grid.left()), hi.max(grid.right()))?)
}

fn variant(v: VariantArg) -> Variant {
    match v {
        VariantArg::Cauchy => Variant::Cauchy,
        VariantArg::Related => Variant::Related,
    }
}

fn bmo_levels(grid: &UniformGrid) -> usize {
    (usize::BITS - grid.count().leading_zeros()).max(1) as usize
}

/// Spearman rank correlation, ties sharing their mean rank.
pub(crate) fn spearman(xs: &[f64], ys: &[f64]) -> f64 {
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
            let mean = 0.5 * (i + j) as f64 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = mean;
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

const HILBERT_TOL: f64 = 2e-2;

pub(crate) fn hilbert_check(args: GridArgs) -> Run<Outputs> {
    let count = args.grid_count.unwrap_or(4096);
    let grid = resolve_grid(args, -8.0, 16.0 / count as f64, count)?;
    let h = grid.spacing();
    let f = GridFunction::indicator(grid, Interval::new(0.0, 1.0 + 0.5 * h)?);
    let out = apply_related_cauchy(&LipschitzCurve::flat(), &f);
    let mut csv = String::from("x,re,im,oracle_im,interior\n");
    let mut worst: f64 = 0.0;
    for (x, z) in grid.nodes().zip(out.samples()) {
        let exact = ((x + 1.0) / (x - 1.0)).abs().ln() / std::f64::consts::PI;
        let interior = (x.abs() - 1.0).abs() > 0.1 && exact.is_finite();
        if interior && exact.abs() > 1e-12 {
            worst = worst.max((z - Complex64::new(0.0, exact)).norm() / exact.abs());
        }
        let _ = writeln!(csv, "{x},{},{},{exact},{}", z.re, z.im, interior as u8);
    }
    if worst > HILBERT_TOL {
        return Err(Error::Numerical {
            invariant: "hilbert oracle",
            detail: format!("max interior relative error {worst} exceeds {HILBERT_TOL}"),
        }
        .into());
    }
    let mut o = Outputs::default();
    o.file("hilbert_check.csv", csv);
    o.file(
        "hilbert_summary.csv",
        format!("N,spacing,max_interior_rel_error\n{},{h},{worst}\n", grid.count()),
    );
    o.note(format!("max interior relative error {worst}"));
    Ok(o)
}

pub(crate) fn two_bump(curve: &str, args: GridArgs, m_list: &[f64]) -> Run<Outputs> {
    let weight = AccretiveWeight::new(load_curve(curve)?);
    let (x0, r) = (0.0, 1.0);
    let base = resolve_grid(args, x0 - 2.0 * r, r / 8.0, 33)?;
    let mut o = Outputs::default();
    let mut summary = String::from("M,i0,terms,alpha_sum,alpha_sum_over_log2_m,max_alpha,reconstruction_error\n");
    for &m in m_list {
        let y0 = x0 + m * r;
        let grid = widen(base, x0 - 2.0 * r, y0 + 2.0 * r)?;
        let f = atoms::two_bump_function(&weight, grid, x0, y0, r)?;
        let dec = atoms::decompose_two_bump(&weight, &f, x0, y0, r)?;
        let i0 = dec.meta.map(|meta| meta.i0).unwrap_or(0);
        let cover = dec
            .covering_grid()
            .ok_or_else(|| Error::Precondition("empty decomposition".into()))?;
        let cover = widen(cover, grid.left(), grid.right())?;
        let err = dec.reconstruct(&cover)?.sub(&f.embed(&cover)?)?.sup_norm() / f.sup_norm();
        if err > 1e-10 {
            return Err(Error::Numerical {
                invariant: "two-bump reconstruction",
                detail: format!("relative error {err} at M = {m}"),
            }
            .into());
        }
        let sum = dec.coefficient_sum();
        let max_alpha = dec.terms.iter().map(|t| t.coef.norm()).fold(0.0, f64::max);
        let _ = writeln!(
            summary,
            "{m},{i0},{},{sum},{},{max_alpha},{err}",
            dec.terms.len(),
            sum / m.log2()
        );
        o.file(format!("decomposition_M{m}.csv"), decomposition_csv(&dec));
    }
    o.files.insert(0, ("two_bump.csv".into(), summary));
    Ok(o)
}

fn make_atom(weight: &AccretiveWeight, grid: UniformGrid, shape: Shape, c: f64, r: f64) -> Run<GridFunction> {
    Ok(match shape {
        Shape::Odd => atoms::odd_atom(weight, grid, c, r)?,
        Shape::Even => atoms::even_atom(weight, grid, c, r)?,
    })
}

pub(crate) fn factor_atom(curve: &str, args: GridArgs, m_list: &[f64], shape: Shape) -> Run<Outputs> {
    let weight = AccretiveWeight::new(load_curve(curve)?);
    let (c, r) = (0.0, 1.0);
    let base = resolve_grid(args, c - 2.0 * r, r / 16.0, 65)?;
    let support = Interval::new(c, r)?;
    let mut csv = String::from("M,residual_sup_times_mr,residual_estimate,fitted_c,gh_over_m,re_denom,im_denom\n");
    for &m in m_list {
        let grid = widen(base, c - 2.0 * r, c + m * r + 2.0 * r)?;
        let a = make_atom(&weight, grid, shape, c, r)?;
        let pair = factorization::approx_factor_atom_with_m(&weight, &a, &support, m)?;
        let res = factorization::residual(&weight, &a, &pair)?;
        let est = factorization::estimate_residual_h1b(&weight, &res, pair.x0, pair.y0, r)?;
        let gh = pair.l2_product()?;
        let _ = writeln!(
            csv,
            "{m},{},{est},{},{},{},{}",
            res.sup_norm() * m * r,
            est * m / m.log2(),
            gh / m,
            pair.denom.re,
            pair.denom.im
        );
    }
    let mut o = Outputs::default();
    o.file("factor_atom.csv", csv);
    Ok(o)
}

/// Resolved weak-factorization inputs.
pub(crate) struct WeakConfig {
    curve: LipschitzCurve,
    eps: f64,
    stages: usize,
    initial: InitialSpec,
    grid: Option<lipschitz_h1b::io::GridSpec>,
}

impl WeakConfig {
    pub(crate) fn from_flags(curve: &str, eps: f64, stages: usize, atom: Shape, center: f64, radius: f64) -> Run<Self> {
        let shape = match atom {
            Shape::Odd => AtomShape::Odd,
            Shape::Even => AtomShape::Even,
        };
        Ok(Self {
            curve: load_curve(curve)?,
            eps,
            stages,
            initial: InitialSpec::Atom { shape, center, radius },
            grid: None,
        })
    }

    pub(crate) fn from_manifest(path: &Path) -> Run<Self> {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
        let m = parse_manifest(&text)?;
        let curve = match m.curve {
            CurveSource::Flat => LipschitzCurve::flat(),
            CurveSource::Tent => LipschitzCurve::tent(),
            CurveSource::File(rel) => load_curve_file(&path.parent().unwrap_or(Path::new(".")).join(rel))?,
        };
        Ok(Self {
            curve,
            eps: m.eps,
            stages: m.stages,
            initial: m.initial,
            grid: m.grid,
        })
    }
}

fn initial_decomposition(weight: &AccretiveWeight, config: &WeakConfig, args: GridArgs) -> Run<AtomicDecomposition> {
    let (lo, hi, r) = match config.initial {
        InitialSpec::Atom { center, radius, .. } => (center - radius, center + radius, radius),
        InitialSpec::TwoBump { x0, y0, r } => (x0.min(y0) - r, x0.max(y0) + r, r),
    };
    let base = match config.grid {
        Some(g) if args.grid_left.is_none() && args.grid_spacing.is_none() && args.grid_count.is_none() => {
            UniformGrid::new(g.left, g.spacing, g.count)?
        }
        _ => resolve_grid(args, lo, r / 16.0, 1)?,
    };
    let grid = widen(base, lo, hi)?;
    match config.initial {
        InitialSpec::Atom { shape, center, radius } => {
            let shape = match shape {
                AtomShape::Odd => Shape::Odd,
                AtomShape::Even => Shape::Even,
            };
            let a = make_atom(weight, grid, shape, center, radius)?;
            Ok(AtomicDecomposition::single(
                weight,
                Complex64::new(1.0, 0.0),
                a,
                Interval::new(center, radius)?,
            )?)
        }
        InitialSpec::TwoBump { x0, y0, r } => {
            let f = atoms::two_bump_function(weight, grid, x0, y0, r)?;
            Ok(atoms::decompose_two_bump(weight, &f, x0, y0, r)?)
        }
    }
}

/// Slack on the per-stage contraction ratio.
const DECAY_SLACK: f64 = 0.05;

pub(crate) fn weak_factorize(config: WeakConfig, args: GridArgs) -> Run<Outputs> {
    let weight = AccretiveWeight::new(config.curve.clone());
    let initial = initial_decomposition(&weight, &config, args)?;
    let wf = factorization::weak_factorize(&weight, &initial, config.eps, config.stages)?;
    let c0 = wf.params.c0_measured;
    let eps = config.eps;
    if eps * c0 >= 1.0 {
        return Err(Error::Numerical {
            invariant: "contraction",
            detail: format!("eps * C0 = {} is not below 1", eps * c0),
        }
        .into());
    }
    let ratios = wf.contraction_ratios();
    if let Some((k, q)) = ratios.iter().enumerate().find(|(_, q)| !(**q < 1.0)) {
        return Err(Error::Numerical {
            invariant: "residual trace decrease",
            detail: format!("stage {} ratio {q}", k + 1),
        }
        .into());
    }
    let max_ratio = ratios.iter().cloned().fold(0.0, f64::max);
    if max_ratio > eps * c0 + DECAY_SLACK {
        return Err(Error::Numerical {
            invariant: "geometric decay",
            detail: format!("ratio {max_ratio} exceeds eps * C0 + {DECAY_SLACK}"),
        }
        .into());
    }
    let initial_estimate = wf.residual_trace[0];
    let final_estimate = *wf.residual_trace.last().unwrap_or(&initial_estimate);
    let weighted = wf.weighted_lambda_sum()?;
    let bound = c0 / (1.0 - eps * c0) * initial_estimate;
    let mut summary = String::from(
        "eps,M,K,c0_measured,max_ratio,lambda_sum,weighted_lambda_sum,bound,initial_estimate,final_estimate\n",
    );
    let _ = writeln!(
        summary,
        "{eps},{},{},{c0},{max_ratio},{},{weighted},{bound},{initial_estimate},{final_estimate}",
        wf.params.m,
        wf.params.k,
        wf.lambda_sum()
    );
    let mut o = Outputs::default();
    o.file("stages.csv", stages_csv(&wf));
    o.file("trace.csv", trace_csv(&wf));
    o.file("weak_summary.csv", summary);
    o.note(format!(
        "trace {:?}; sum |lambda| = {}; C0 = {c0}",
        wf.residual_trace,
        wf.lambda_sum()
    ));
    Ok(o)
}

pub(crate) fn commutator_study(
    curve: &str,
    args: GridArgs,
    p: f64,
    trials: usize,
    seed: u64,
    v: VariantArg,
) -> Run<Outputs> {
    let weight = AccretiveWeight::new(load_curve(curve)?);
    let count = args.grid_count.unwrap_or(2048);
    let grid = resolve_grid(args, -8.0, 16.0 / count as f64, count)?;
    let mut rows = Vec::new();
    for (k, s) in study_symbols(grid).into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let spec = CommutatorSpec::from_divided(&s.phi, weight.clone(), variant(v))?;
        let est = lipschitz_h1b::commutator_norm_estimate(&spec, p, trials, rng.next_u64())?;
        rows.push(StudyRow {
            symbol_name: s.name,
            bmo_norm: spaces::bmo_norm(&spec.divided_symbol(), bmo_levels(&grid))?,
            commutator_norm_estimate: est.value,
            p,
            n: grid.count(),
        });
    }
    let bmo: Vec<f64> = rows.iter().map(|r| r.bmo_norm).collect();
    let est: Vec<f64> = rows.iter().map(|r| r.commutator_norm_estimate).collect();
    let rho = spearman(&bmo, &est);
    let kind = if p == 2.0 { "krylov" } else { "probe_lower_bound" };
    let mut o = Outputs::default();
    o.file("commutator_study.csv", commutator_study_csv(&rows));
    o.file(
        "commutator_summary.csv",
        format!("spearman,estimate_kind,p,N\n{rho},{kind},{p},{}\n", grid.count()),
    );
    o.note(format!("spearman rank correlation {rho} ({kind})"));
    Ok(o)
}

pub(crate) fn compactness_profile(
    curve: &str,
    args: GridArgs,
    rank_cap: usize,
    center: f64,
    radius: f64,
    v: VariantArg,
) -> Run<Outputs> {
    let weight = AccretiveWeight::new(load_curve(curve)?);
    let count = args.grid_count.unwrap_or(2048);
    let grid = resolve_grid(args, -8.0, 16.0 / count as f64, count)?;
    let window = Interval::new(center, radius)?;
    let mut o = Outputs::default();
    let mut summary = String::from("symbol_name,sigma_1,sigma_last,ratio,rank,N\n");
    for s in study_symbols(grid) {
        let spec = CommutatorSpec::from_divided(&s.phi, weight.clone(), variant(v))?;
        let sigma = lipschitz_h1b::compactness_profile(&spec, &window, rank_cap)?;
        let first = sigma.first().copied().unwrap_or(0.0);
        let last = sigma.last().copied().unwrap_or(0.0);
        let ratio = if first > 0.0 { last / first } else { 0.0 };
        let _ = writeln!(
            summary,
            "{},{first},{last},{ratio},{},{}",
            s.name,
            sigma.len(),
            grid.count()
        );
        o.file(format!("profile_{}.csv", s.name), profile_csv(&sigma));
    }
    o.files.insert(0, ("compactness_summary.csv".into(), summary));
    Ok(o)
}

pub(crate) fn vmo_profile(args: GridArgs, scales: &[f64]) -> Run<Outputs> {
    let grid = resolve_grid(args, -32.0, 1.0 / 32.0, 2048)?;
    let mut o = Outputs::default();
    for s in study_symbols(grid) {
        let report = spaces::vmo_profile(&s.phi, scales)?;
        o.file(format!("vmo_{}.csv", s.name), oscillation_csv(&report));
    }
    Ok(o)
}
