//! Commutators `[𝔄/b, T]` with `T = C_Γ` or `C̃_Γ`, their `L²` operator norm
//! and a singular-value profile used as a compactness proxy.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cauchy::related_kernel_from_diff;
use crate::curve::AccretiveWeight;
use crate::error::{Error, Result};
use crate::grid::{lp_norm, GridFunction, Interval, UniformGrid};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Krylov dimension cap.
pub const MAX_ITERATIONS: usize = 400;
/// Iteration stops once the Ritz residual falls below this fraction of the
/// Ritz value.
pub const ITERATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// `[𝔄/b, C_Γ]`
    Cauchy,
    /// `[𝔄/b, C̃_Γ]`
    Related,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorSpec {
    symbol: GridFunction,
    divided: Vec<Complex64>,
    weight: AccretiveWeight,
    variant: Variant,
}

impl CommutatorSpec {
    /// From the symbol `𝔄`; the divided symbol `𝔄/b` is formed pointwise.
    pub fn new(symbol: GridFunction, weight: AccretiveWeight, variant: Variant) -> Result<Self> {
        if symbol.samples().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param("symbol", "must be finite at every node"));
        }
        let grid = *symbol.grid();
        let divided = symbol
            .samples()
            .iter()
            .enumerate()
            .map(|(i, z)| z / weight.eval(grid.node(i)))
            .collect();
        Ok(Self {
            symbol,
            divided,
            weight,
            variant,
        })
    }

    /// From the divided symbol `φ = 𝔄/b`, keeping `φ` exactly and setting `𝔄 = φ b`.
    pub fn from_divided(phi: &GridFunction, weight: AccretiveWeight, variant: Variant) -> Result<Self> {
        if phi.samples().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::param("symbol", "must be finite at every node"));
        }
        let grid = *phi.grid();
        let symbol = GridFunction::full(
            grid,
            phi.samples()
                .iter()
                .enumerate()
                .map(|(i, z)| z * weight.eval(grid.node(i)))
                .collect(),
        )?;
        Ok(Self {
            symbol,
            divided: phi.samples().to_vec(),
            weight,
            variant,
        })
    }

    pub fn symbol(&self) -> &GridFunction {
        &self.symbol
    }

    /// `𝔄/b` at the nodes.
    pub fn divided_symbol(&self) -> GridFunction {
        GridFunction::full(*self.symbol.grid(), self.divided.clone()).expect("full support")
    }

    pub fn weight(&self) -> &AccretiveWeight {
        &self.weight
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn grid(&self) -> &UniformGrid {
        self.symbol.grid()
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        Self {
            variant,
            ..self.clone()
        }
    }

    // Node data shared by every row: position, height and column factor.
    fn nodes(&self) -> Vec<(f64, f64, Complex64)> {
        let grid = self.grid();
        let curve = self.weight.curve();
        grid.nodes()
            .map(|x| {
                let c = match self.variant {
                    Variant::Cauchy => self.weight.eval(x),
                    Variant::Related => Complex64::new(1.0, 0.0),
                };
                (x, curve.eval(x), c)
            })
            .collect()
    }
}

/// `(𝔄/b) T(f) − T((𝔄/b) f)`, computed row by row as
/// `Σ_{j≠i} (φ_i − φ_j) K(x_i, x_j) w_j c_j f_j` so that constants give zero exactly.
pub fn apply_commutator(spec: &CommutatorSpec, f: &GridFunction) -> Result<GridFunction> {
    if f.grid() != spec.grid() {
        return Err(Error::GridMismatch(format!("{:?} vs {:?}", f.grid(), spec.grid())));
    }
    let grid = *f.grid();
    let nodes = spec.nodes();
    let phi = &spec.divided;
    let cols: Vec<(usize, Complex64)> = f
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, z)| z.re != 0.0 || z.im != 0.0)
        .map(|(j, &z)| (j, z * grid.weight(j) * nodes[j].2))
        .collect();
    let out: Vec<Complex64> = (0..grid.count())
        .into_par_iter()
        .map(|i| {
            let (x, ax, _) = nodes[i];
            let mut acc = ZERO;
            for &(j, c) in &cols {
                if j != i {
                    let (y, ay, _) = nodes[j];
                    acc += (phi[i] - phi[j]) * related_kernel_from_diff(y - x, ay - ax) * c;
                }
            }
            acc
        })
        .collect();
    GridFunction::full(grid, out)
}

/// Row-major matrix of `W^{1/2} T W^{−1/2}` restricted to `cols`, so that the
/// Euclidean norm matches the discrete `L²` norm.
struct Assembled {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

fn assemble(spec: &CommutatorSpec, cols: &[usize]) -> Assembled {
    let grid = spec.grid();
    let nodes = spec.nodes();
    let phi = &spec.divided;
    let sqrt_w: Vec<f64> = (0..grid.count()).map(|i| grid.weight(i).sqrt()).collect();
    let n = grid.count();
    let mut data = vec![ZERO; n * cols.len()];
    data.par_chunks_mut(cols.len()).enumerate().for_each(|(i, row)| {
        let (x, ax, _) = nodes[i];
        for (k, &j) in cols.iter().enumerate() {
            if j != i {
                let (y, ay, c) = nodes[j];
                row[k] = (phi[i] - phi[j]) * related_kernel_from_diff(y - x, ay - ax) * c * (sqrt_w[i] * sqrt_w[j]);
            }
        }
    });
    Assembled {
        rows: n,
        cols: cols.len(),
        data,
    }
}

impl Assembled {
    fn mul(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data
            .par_chunks(self.cols)
            .map(|row| row.iter().zip(v).fold(ZERO, |acc, (a, b)| acc + a * b))
            .collect()
    }

    fn adjoint(&self) -> Assembled {
        let mut data = vec![ZERO; self.rows * self.cols];
        data.par_chunks_mut(self.rows).enumerate().for_each(|(j, row)| {
            for (i, z) in row.iter_mut().enumerate() {
                *z = self.data[i * self.cols + j].conj();
            }
        });
        Assembled {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Hermitian Gram matrix `Bᴴ B`.
    fn gram(&self) -> DMatrix<Complex64> {
        let adj = self.adjoint();
        let n = self.cols;
        let entries: Vec<Complex64> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (k, l) = (idx / n, idx % n);
                let a = &adj.data[k * self.rows..(k + 1) * self.rows];
                let b = &adj.data[l * self.rows..(l + 1) * self.rows];
                a.iter().zip(b).fold(ZERO, |acc, (p, q)| acc + p * q.conj())
            })
            .collect();
        DMatrix::from_row_slice(n, n, &entries)
    }
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(ZERO, |acc, (x, y)| acc + x.conj() * y)
}

// Largest eigenvalue of a Hermitian positive semidefinite operator, with full
// reorthogonalization. Returns the Ritz value and the Krylov dimension used.
fn lanczos_top(apply: impl Fn(&[Complex64]) -> Vec<Complex64>, start: Vec<Complex64>) -> Result<(f64, usize)> {
    let n = start.len();
    let s0 = norm2(&start);
    let mut basis: Vec<Vec<Complex64>> = vec![start.into_iter().map(|z| z / s0).collect()];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;
    for k in 1..=MAX_ITERATIONS.min(n) {
        let q = &basis[k - 1];
        let mut w = apply(q);
        alphas.push(dot(q, &w).re);
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                w.iter_mut().zip(v).for_each(|(x, y)| *x -= c * y);
            }
        }
        let beta = norm2(&w);
        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j {
                betas[i]
            } else if j + 1 == i {
                betas[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let (top, &theta) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty tridiagonal");
        residual = beta * eig.eigenvectors[(k - 1, top)].abs();
        let scale = alphas.iter().fold(0.0_f64, |m, a| m.max(a.abs()));
        if theta <= 0.0 && scale == 0.0 {
            return Ok((0.0, k));
        }
        if residual <= ITERATION_TOL * theta || beta <= 1e-14 * scale {
            return Ok((theta.max(0.0), k));
        }
        betas.push(beta);
        basis.push(w.into_iter().map(|z| z / beta).collect());
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS.min(n),
        last_change: residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimateKind {
    /// Dominant singular value from Lanczos (Krylov-accelerated power)
    /// iteration on `Bᴴ B`.
    Krylov { iterations: usize },
    /// Largest `‖Tf‖_p / ‖f‖_p` over random probes; a lower bound only.
    ProbeLowerBound { probes: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub kind: EstimateKind,
}

impl NormEstimate {
    pub fn is_lower_bound(&self) -> bool {
        matches!(self.kind, EstimateKind::ProbeLowerBound { .. })
    }
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            Complex64::new(re, im)
        })
        .collect()
}

/// Operator norm of the discretized commutator on `L^p`. For `p = 2` this is
/// the top eigenvalue of `Bᴴ B` by Lanczos iteration from a seeded start
/// vector; otherwise a random-probe lower bound over `trials` probes.
pub fn commutator_norm_estimate(spec: &CommutatorSpec, p: f64, trials: usize, seed: u64) -> Result<NormEstimate> {
    if !(p >= 1.0) {
        return Err(Error::param("p", "must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.grid().count();
    if p == 2.0 {
        let cols: Vec<usize> = (0..n).collect();
        let b = assemble(spec, &cols);
        let bh = b.adjoint();
        let start = random_vector(&mut rng, n);
        let (sigma_sq, iterations) = lanczos_top(|v| bh.mul(&b.mul(v)), start)?;
        return Ok(NormEstimate {
            value: sigma_sq.sqrt(),
            kind: EstimateKind::Krylov { iterations },
        });
    }
    if trials == 0 {
        return Err(Error::param("trials", "need at least one probe"));
    }
    let grid = *spec.grid();
    let mut best: f64 = 0.0;
    for _ in 0..trials {
        let f = GridFunction::full(grid, random_vector(&mut rng, n))?;
        let nf = lp_norm(&f, p)?;
        if nf > 0.0 {
            best = best.max(lp_norm(&apply_commutator(spec, &f)?, p)? / nf);
        }
    }
    Ok(NormEstimate {
        value: best,
        kind: EstimateKind::ProbeLowerBound { probes: trials },
    })
}

/// Leading `rank_cap` singular values, in decreasing order, of the
/// discretized commutator acting on functions supported in `window`.
pub fn compactness_profile(spec: &CommutatorSpec, window: &Interval, rank_cap: usize) -> Result<Vec<f64>> {
    if rank_cap == 0 {
        return Err(Error::param("rank_cap", "must be at least 1"));
    }
    let cols: Vec<usize> = spec.grid().index_range(window).collect();
    if cols.is_empty() {
        return Err(Error::Precondition("window holds no grid nodes".into()));
    }
    let gram = assemble(spec, &cols).gram();
    let eig = SymmetricEigen::new(gram);
    let mut sigma: Vec<f64> = eig.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    sigma.truncate(rank_cap);
    Ok(sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::LipschitzCurve;
    use crate::symbols::{constant, smooth_bump};

    fn grid() -> UniformGrid {
        UniformGrid::new(-4.0, 1.0 / 32.0, 256).unwrap()
    }

    #[test]
    fn constant_symbol_commutes() {
        let w = AccretiveWeight::new(LipschitzCurve::tent());
        let spec = CommutatorSpec::from_divided(&constant(grid(), 2.5), w, Variant::Cauchy).unwrap();
        let f = GridFunction::from_real_fn(grid(), Interval::new(0.0, 1.0).unwrap(), |x| x.cos());
        assert!(apply_commutator(&spec, &f).unwrap().is_zero());
        let est = commutator_norm_estimate(&spec, 2.0, 0, 1).unwrap();
        assert_eq!(est.value, 0.0);
        assert!(compactness_profile(&spec, &Interval::new(0.0, 1.0).unwrap(), 5)
            .unwrap()
            .iter()
            .all(|s| *s == 0.0));
    }

    #[test]
    fn power_iteration_matches_gram_eigenvalue() {
        let w = AccretiveWeight::new(LipschitzCurve::tent());
        let spec = CommutatorSpec::from_divided(&smooth_bump(grid(), 1.0), w, Variant::Cauchy).unwrap();
        let est = commutator_norm_estimate(&spec, 2.0, 0, 3).unwrap();
        let full = Interval::new(0.0, 10.0).unwrap();
        let top = compactness_profile(&spec, &full, 1).unwrap()[0];
        assert!((est.value - top).abs() <= 1e-4 * top, "{} vs {top}", est.value);
    }

    #[test]
    fn probe_estimate_is_labelled_lower_bound() {
        let w = AccretiveWeight::new(LipschitzCurve::flat());
        let spec = CommutatorSpec::from_divided(&smooth_bump(grid(), 1.0), w, Variant::Related).unwrap();
        let lb = commutator_norm_estimate(&spec, 3.0, 4, 7).unwrap();
        assert!(lb.is_lower_bound() && lb.value > 0.0);
        assert!(commutator_norm_estimate(&spec, 0.5, 4, 7).is_err());
    }
}
