//! Cauchy integrals along Lipschitz graphs and the Hardy space `H¹_b` they
//! generate: sampled operators, two-bump atomic decompositions, approximate
//! and iterative weak factorization through the bilinear form `Π_b`, and
//! commutator diagnostics for `BMO_b` / `VMO_b` symbols.

// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atoms;
pub mod cauchy;
pub mod commutator;
pub mod curve;
pub mod error;
pub mod factorization;
pub mod grid;
pub mod io;
pub mod spaces;
pub mod symbols;

pub use atoms::{decompose_two_bump, two_bump_norm_bound, AtomTerm, AtomicDecomposition, DecompositionMeta};
pub use cauchy::{
    apply_cauchy, apply_cauchy_adjoint, apply_related_cauchy, kernel_bounds_check, related_kernel, CauchyKernelSample,
    KernelBounds,
};
pub use commutator::{
    apply_commutator, commutator_norm_estimate, compactness_profile, CommutatorSpec, EstimateKind, NormEstimate,
    Variant,
};
pub use curve::{eval_a, eval_b, make_curve, AccretiveWeight, LipschitzCurve};
pub use error::{Error, Result};
pub use factorization::{
    approx_factor_atom, approx_factor_atom_with_m, estimate_residual_h1b, h1_factor_from_h1b, pi_b, pi_classic,
    residual, select_m, weak_factorize, FactorPair, StageTerm, WeakFactorization, WeakParams,
};
pub use grid::{integrate, lp_norm, pair, GridFunction, Interval, UniformGrid};
pub use spaces::{bmo_norm, check_atom, h1b_norm_upper, vmo_profile, AtomCertificate, OscillationReport};
