//! Real test symbols `φ = 𝔄/b` for commutator and oscillation studies.

use std::f64::consts::PI;

use crate::grid::{GridFunction, UniformGrid};

/// A named real symbol sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedSymbol {
    pub name: String,
    pub phi: GridFunction,
}

/// `amplitude · exp(1 − 1/(1 − (x/2)²))` on `|x| < 2`, zero elsewhere.
pub fn smooth_bump(grid: UniformGrid, amplitude: f64) -> GridFunction {
    GridFunction::from_real_fn(grid, grid.full_support(), move |x| {
        let t = x / 2.0;
        if t.abs() < 1.0 {
            amplitude * (1.0 - 1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    })
}

/// Unit-period sawtooth `amplitude · (frac(x) − 1/2)` on `|x| < 4`.
pub fn sawtooth(grid: UniformGrid, amplitude: f64) -> GridFunction {
    GridFunction::from_real_fn(grid, grid.full_support(), move |x| {
        if x.abs() < 4.0 {
            amplitude * (x - x.floor() - 0.5)
        } else {
            0.0
        }
    })
}

/// `amplitude · ln(min(|x|, 4))`; the node at the origin takes `ln(h/2) − 1`.
pub fn clamped_log(grid: UniformGrid, amplitude: f64) -> GridFunction {
    let h = grid.spacing();
    GridFunction::from_real_fn(grid, grid.full_support(), move |x| {
        let v = if x == 0.0 {
            (h / 2.0).ln() - 1.0
        } else {
            x.abs().min(4.0).ln()
        };
        amplitude * v
    })
}

/// Smooth oscillation `amplitude · sin(πx) · bump(x)`.
pub fn wave_packet(grid: UniformGrid, amplitude: f64) -> GridFunction {
    let b = smooth_bump(grid, amplitude);
    b.map_nodes(|x, z| z * (PI * x).sin())
}

pub fn constant(grid: UniformGrid, c: f64) -> GridFunction {
    GridFunction::from_real_fn(grid, grid.full_support(), move |_| c)
}

/// The five symbol families of the commutator study.
pub fn study_symbols(grid: UniformGrid) -> Vec<NamedSymbol> {
    let named = |name: &str, phi| NamedSymbol {
        name: name.to_string(),
        phi,
    };
    vec![
        named("bump", smooth_bump(grid, 1.0)),
        named("sawtooth", sawtooth(grid, 1.0)),
        named("clamped_log", clamped_log(grid, 1.0)),
        named("bump_x4", smooth_bump(grid, 4.0)),
        named("wave_x0.25", wave_packet(grid, 0.25)),
    ]
}
