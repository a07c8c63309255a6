//! Oscillation norms (BMO, VMO profile), `H¹_b` atom certification and the
//! atomic norm upper estimate.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::atoms::AtomicDecomposition;
use crate::curve::AccretiveWeight;
use crate::error::{Error, Result};
use crate::grid::{GridFunction, Interval};

/// Node-index window `[start, start + len)`.
#[derive(Debug, Clone, Copy)]
struct Window {
    start: usize,
    len: usize,
}

fn mean_oscillation(samples: &[Complex64], w: Window) -> f64 {
    let s = &samples[w.start..w.start + w.len];
    let n = w.len as f64;
    let mean = s.iter().sum::<Complex64>() / n;
    s.iter().map(|z| (z - mean).norm()).sum::<f64>() / n
}

// Dyadic windows of `len` nodes plus their half-length shifts.
fn dyadic_windows(count: usize, len: usize) -> impl Iterator<Item = Window> {
    let half = (len / 2).max(1);
    (0..)
        .map(move |k| k * half)
        .take_while(move |&s| s + len <= count)
        .map(move |start| Window { start, len })
}

// Window lengths `count >> level` for levels `0..=max_level`, stopping at two nodes.
fn dyadic_lengths(count: usize, max_level: usize) -> Vec<usize> {
    (0..=max_level)
        .map(|l| count >> l.min(63))
        .take_while(|&len| len >= 2)
        .collect()
}

fn sup_over(samples: &[Complex64], windows: &[Window]) -> f64 {
    windows
        .par_iter()
        .map(|&w| mean_oscillation(samples, w))
        .reduce(|| 0.0, f64::max)
}

/// Supremum of the node-averaged mean oscillation over dyadic subintervals of
/// the grid (levels `0..=max_level`) and their half-length shifts.
pub fn bmo_norm(f: &GridFunction, max_level: usize) -> Result<f64> {
    if max_level < 1 {
        return Err(Error::param("max_level", "must be at least 1"));
    }
    let n = f.grid().count();
    let windows: Vec<Window> = dyadic_lengths(n, max_level)
        .into_iter()
        .flat_map(|len| dyadic_windows(n, len))
        .collect();
    Ok(sup_over(f.samples(), &windows))
}

/// The three VMO limits sampled along a scale sequence.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OscillationReport {
    /// `(δ, sup over |I| < δ)`
    pub small_scale: Vec<(f64, f64)>,
    /// `(R, sup over |I| > R)`
    pub large_scale: Vec<(f64, f64)>,
    /// `(R, sup over unit intervals disjoint from I(0, R))`
    pub far_field: Vec<(f64, f64)>,
}

/// Oscillation profile over the dyadic family of every level. Small and
/// large scales select by window length; the far field uses unit-length
/// windows on half-unit offsets.
pub fn vmo_profile(f: &GridFunction, scales: &[f64]) -> Result<OscillationReport> {
    if scales.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
        return Err(Error::param("scales", "must be positive and finite"));
    }
    if scales.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::param("scales", "must be sorted ascending"));
    }
    let grid = f.grid();
    let n = grid.count();
    let h = grid.spacing();
    let samples = f.samples();

    let family: Vec<(f64, f64)> = dyadic_lengths(n, usize::MAX)
        .into_iter()
        .flat_map(|len| dyadic_windows(n, len))
        .map(|w| (w.len as f64 * h, mean_oscillation(samples, w)))
        .collect();
    let sup_where = |keep: &dyn Fn(f64) -> bool| {
        family
            .iter()
            .filter(|(len, _)| keep(*len))
            .fold(0.0_f64, |m, (_, o)| m.max(*o))
    };

    let unit = (1.0 / h).round() as usize;
    let unit_windows: Vec<(Window, f64, f64)> = if unit >= 2 {
        dyadic_windows(n, unit)
            .map(|w| (w, grid.node(w.start), grid.node(w.start + w.len - 1)))
            .collect()
    } else {
        Vec::new()
    };

    let mut report = OscillationReport::default();
    for &s in scales {
        report.small_scale.push((s, sup_where(&|len| len < s)));
        report.large_scale.push((s, sup_where(&|len| len > s)));
        let far: Vec<Window> = unit_windows
            .iter()
            .filter(|(_, lo, hi)| *lo >= s || *hi <= -s)
            .map(|(w, _, _)| *w)
            .collect();
        report.far_field.push((s, sup_over(samples, &far)));
    }
    Ok(report)
}

/// Outcome of the three `H¹_b` atom checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomCertificate {
    pub support_ok: bool,
    /// `‖a‖_∞ · |I|`
    pub size_value: f64,
    /// `|∫ a b| / (‖a‖₁ ‖b‖_∞)`, zero for the zero function.
    pub cancellation_residual: f64,
    pub tol: f64,
}

impl AtomCertificate {
    pub fn accepted(&self) -> bool {
        self.support_ok && self.size_value <= 1.0 + self.tol && self.cancellation_residual <= self.tol
    }
}

pub fn check_atom(a: &GridFunction, support: &Interval, weight: &AccretiveWeight, tol: f64) -> Result<AtomCertificate> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    let grid = a.grid();
    let support_ok = a
        .samples()
        .iter()
        .enumerate()
        .all(|(i, z)| *z == Complex64::new(0.0, 0.0) || support.contains(grid.node(i)));
    let size_value = a.sup_norm() * support.length();
    let l1 = a.lp_norm(1.0)?;
    let cancellation_residual = if l1 == 0.0 {
        0.0
    } else {
        let ab = a.map_nodes(|x, z| z * weight.eval(x));
        ab.integrate().norm() / (l1 * weight.sup_norm())
    };
    Ok(AtomCertificate {
        support_ok,
        size_value,
        cancellation_residual,
        tol,
    })
}

/// `Σ |λ_j|`, an upper estimate of the atomic `H¹_b` norm.
pub fn h1b_norm_upper(dec: &AtomicDecomposition) -> Result<f64> {
    if let Some((k, t)) = dec.terms.iter().enumerate().find(|(_, t)| !t.certificate.accepted()) {
        return Err(Error::Precondition(format!(
            "term {k} carries a rejected certificate {:?}",
            t.certificate
        )));
    }
    Ok(dec.terms.iter().map(|t| t.coef.norm()).sum())
}
