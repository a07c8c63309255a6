//! Text formats: the curve specification, the weak-factorization run
//! manifest, and CSV writers for every result type.
//!
//! Floats are written with Rust's shortest round-trip formatting, so equal
//! values always produce identical bytes.

use std::fmt::Write as _;
use std::path::PathBuf;

use crate::atoms::AtomicDecomposition;
use crate::curve::LipschitzCurve;
use crate::error::{Error, Result};
use crate::factorization::WeakFactorization;
use crate::grid::GridFunction;
use crate::spaces::OscillationReport;

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_real(line: usize, tok: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(line, format!("`{tok}` is not a real number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("`{tok}` is not finite")));
    }
    Ok(v)
}

fn parse_reals<'a>(line: usize, toks: impl Iterator<Item = &'a str>) -> Result<Vec<f64>> {
    toks.map(|t| parse_real(line, t)).collect()
}

// Non-blank, non-comment lines with their 1-based numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses
///
/// ```text
/// anchor <real>
/// breakpoints <real>*
/// slopes <real>+
/// ```
///
/// in this order. Blank lines and `#` comments are ignored.
pub fn parse_curve_spec(text: &str) -> Result<LipschitzCurve> {
    let mut lines = content_lines(text);
    let mut expect = |key: &str| -> Result<(usize, Vec<&str>)> {
        let (n, l) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("missing `{key}` line")))?;
        let mut toks = l.split_whitespace();
        match toks.next() {
            Some(k) if k == key => Ok((n, toks.collect())),
            Some(k) => Err(parse_err(n, format!("expected `{key}`, found `{k}`"))),
            None => Err(parse_err(n, format!("expected `{key}`"))),
        }
    };
    let (n_anchor, anchor) = expect("anchor")?;
    if anchor.len() != 1 {
        return Err(parse_err(n_anchor, "`anchor` takes exactly one value"));
    }
    let anchor = parse_real(n_anchor, anchor[0])?;
    let (n_bp, bps) = expect("breakpoints")?;
    let breakpoints = parse_reals(n_bp, bps.into_iter())?;
    let (n_sl, sl) = expect("slopes")?;
    let slopes = parse_reals(n_sl, sl.into_iter())?;
    if let Some((n, _)) = lines.next() {
        return Err(parse_err(n, "unexpected content after `slopes`"));
    }
    LipschitzCurve::new(breakpoints, slopes, anchor)
}

/// Where a manifest takes its curve from.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveSource {
    Flat,
    Tent,
    /// A curve-spec file, relative to the manifest's directory.
    File(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomShape {
    Odd,
    Even,
}

/// The initial function of a weak-factorization run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialSpec {
    Atom { shape: AtomShape, center: f64, radius: f64 },
    TwoBump { x0: f64, y0: f64, r: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub left: f64,
    pub spacing: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub eps: f64,
    pub stages: usize,
    pub curve: CurveSource,
    pub initial: InitialSpec,
    pub grid: Option<GridSpec>,
}

/// Parses a run manifest: one `key value…` entry per line, each key at most
/// once, in any order.
///
/// ```text
/// eps 0.05
/// stages 4
/// curve tent            # flat | tent | <path>
/// atom odd 0 1          # or: twobump <x0> <y0> <r>
/// grid -64 0.0625 4096  # optional
/// ```
pub fn parse_manifest(text: &str) -> Result<RunManifest> {
    let mut eps = None;
    let mut stages = None;
    let mut curve = None;
    let mut initial = None;
    let mut grid = None;
    for (n, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        let key = toks.next().expect("content lines are non-empty");
        let args: Vec<&str> = toks.collect();
        let arity = |k: usize| -> Result<()> {
            if args.len() == k {
                Ok(())
            } else {
                Err(parse_err(n, format!("`{key}` takes {k} value(s), got {}", args.len())))
            }
        };
        let dup = |present: bool| -> Result<()> {
            if present {
                Err(parse_err(n, format!("duplicate `{key}`")))
            } else {
                Ok(())
            }
        };
        match key {
            "eps" => {
                dup(eps.is_some())?;
                arity(1)?;
                let v = parse_real(n, args[0])?;
                if !(v > 0.0) {
                    return Err(parse_err(n, "`eps` must be positive"));
                }
                eps = Some(v);
            }
            "stages" => {
                dup(stages.is_some())?;
                arity(1)?;
                stages = Some(
                    args[0]
                        .parse::<usize>()
                        .map_err(|_| parse_err(n, format!("`{}` is not a stage count", args[0])))?,
                );
            }
            "curve" => {
                dup(curve.is_some())?;
                arity(1)?;
                curve = Some(match args[0] {
                    "flat" => CurveSource::Flat,
                    "tent" => CurveSource::Tent,
                    path => CurveSource::File(PathBuf::from(path)),
                });
            }
            "atom" => {
                dup(initial.is_some())?;
                arity(3)?;
                let shape = match args[0] {
                    "odd" => AtomShape::Odd,
                    "even" => AtomShape::Even,
                    other => return Err(parse_err(n, format!("unknown atom shape `{other}`"))),
                };
                let center = parse_real(n, args[1])?;
                let radius = parse_real(n, args[2])?;
                if !(radius > 0.0) {
                    return Err(parse_err(n, "atom radius must be positive"));
                }
                initial = Some(InitialSpec::Atom { shape, center, radius });
            }
            "twobump" => {
                dup(initial.is_some())?;
                arity(3)?;
                let v = parse_reals(n, args.into_iter())?;
                if !(v[2] > 0.0) {
                    return Err(parse_err(n, "bump radius must be positive"));
                }
                initial = Some(InitialSpec::TwoBump {
                    x0: v[0],
                    y0: v[1],
                    r: v[2],
                });
            }
            "grid" => {
                dup(grid.is_some())?;
                arity(3)?;
                let left = parse_real(n, args[0])?;
                let spacing = parse_real(n, args[1])?;
                let count = args[2]
                    .parse::<usize>()
                    .map_err(|_| parse_err(n, format!("`{}` is not a node count", args[2])))?;
                if !(spacing > 0.0) || count == 0 {
                    return Err(parse_err(n, "grid needs positive spacing and count"));
                }
                grid = Some(GridSpec { left, spacing, count });
            }
            other => return Err(parse_err(n, format!("unknown key `{other}`"))),
        }
    }
    Ok(RunManifest {
        eps: eps.ok_or_else(|| parse_err(0, "missing `eps`"))?,
        stages: stages.ok_or_else(|| parse_err(0, "missing `stages`"))?,
        curve: curve.ok_or_else(|| parse_err(0, "missing `curve`"))?,
        initial: initial.ok_or_else(|| parse_err(0, "missing `atom` or `twobump`"))?,
        grid,
    })
}

/// `x,re,im`, one row per node.
pub fn grid_function_csv(f: &GridFunction) -> String {
    let mut s = String::from("x,re,im\n");
    for (x, z) in f.grid().nodes().zip(f.samples()) {
        let _ = writeln!(s, "{x},{},{}", z.re, z.im);
    }
    s
}

/// `kind,scale,oscillation`.
pub fn oscillation_csv(report: &OscillationReport) -> String {
    let mut s = String::from("kind,scale,oscillation\n");
    for (kind, rows) in [
        ("small_scale", &report.small_scale),
        ("large_scale", &report.large_scale),
        ("far_field", &report.far_field),
    ] {
        for (scale, osc) in rows {
            let _ = writeln!(s, "{kind},{scale},{osc}");
        }
    }
    s
}

/// `j,i,re_alpha,im_alpha,support_center,support_radius,cert_cancel_residual`.
/// Unlabelled terms are numbered `0,k`.
pub fn decomposition_csv(dec: &AtomicDecomposition) -> String {
    let mut s = String::from("j,i,re_alpha,im_alpha,support_center,support_radius,cert_cancel_residual\n");
    for (k, t) in dec.terms.iter().enumerate() {
        let (j, i) = t.label.unwrap_or((0, k));
        let _ = writeln!(
            s,
            "{j},{i},{},{},{},{},{}",
            t.coef.re,
            t.coef.im,
            t.support.center(),
            t.support.radius(),
            t.certificate.cancellation_residual
        );
    }
    s
}

/// `k,j,re_lambda,im_lambda,M,y0,residual_estimate`.
pub fn stages_csv(wf: &WeakFactorization) -> String {
    let mut s = String::from("k,j,re_lambda,im_lambda,M,y0,residual_estimate\n");
    for (k, stage) in wf.stages.iter().enumerate() {
        for (j, t) in stage.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{j},{},{},{},{},{}",
                k + 1,
                t.lambda.re,
                t.lambda.im,
                t.pair.m,
                t.pair.y0,
                t.residual_estimate
            );
        }
    }
    s
}

/// `k,residual_trace`.
pub fn trace_csv(wf: &WeakFactorization) -> String {
    let mut s = String::from("k,residual_trace\n");
    for (k, v) in wf.residual_trace.iter().enumerate() {
        let _ = writeln!(s, "{k},{v}");
    }
    s
}

/// One row of a commutator correlation study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub symbol_name: String,
    pub bmo_norm: f64,
    pub commutator_norm_estimate: f64,
    pub p: f64,
    pub n: usize,
}

/// `symbol_name,bmo_norm,commutator_norm_estimate,p,N`.
pub fn commutator_study_csv(rows: &[StudyRow]) -> String {
    let mut s = String::from("symbol_name,bmo_norm,commutator_norm_estimate,p,N\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.symbol_name, r.bmo_norm, r.commutator_norm_estimate, r.p, r.n
        );
    }
    s
}

/// `k,sigma_k`, with `k` starting at 1.
pub fn profile_csv(sigma: &[f64]) -> String {
    let mut s = String::from("k,sigma_k\n");
    for (k, v) in sigma.iter().enumerate() {
        let _ = writeln!(s, "{},{v}", k + 1);
    }
    s
}
