//! Compressions `P_N T P_N` of composition and analytic Toeplitz operators
//! to polynomials of degree `< N`.
//!
//! Entry `(i, j)` is the degree-`i` Taylor coefficient of `T z^j`. Since
//! compression commutes with taking adjoints, the conjugate transpose of a
//! compression is the compression of the adjoint. Products of compressions
//! are *not* compressions of products; the error is confined to the
//! geometric tail and is only small on low-degree vectors such as kernels
//! `k_w` with `|w| ≤ 0.7`.

use std::fmt;
use std::ops::Mul;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::hardy::HardyVector;
use crate::moebius::{LinearFraction, SelfMap};
use crate::scalar::ComplexScalar;

pub const POWER_ITERATION_SEED: u64 = 0x5EED;
pub const POWER_ITERATION_MAX: usize = 500;
pub const POWER_ITERATION_RTOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpMatError {
    #[error("symbol is not a self-map of the disk")]
    NotSelfMap,
    #[error("symbol has a pole at the origin")]
    PoleAtOrigin,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    entries: DMatrix<ComplexScalar>,
    descriptor: String,
}

/// Result of [`operator_norm_estimate`]; `converged` is false when the
/// iteration budget ran out, in which case `value` is the last iterate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl OperatorMatrix {
    pub fn new(entries: DMatrix<ComplexScalar>, descriptor: impl Into<String>) -> Self {
        assert!(entries.is_square(), "operator matrices are square");
        Self { entries, descriptor: descriptor.into() }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DMatrix::identity(n, n), "I")
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(DMatrix::zeros(n, n), "0")
    }

    pub fn from_diagonal(diag: &[ComplexScalar]) -> Self {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(diag)), "diag")
    }

    pub fn n_trunc(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<ComplexScalar> {
        &self.entries
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn get(&self, i: usize, j: usize) -> ComplexScalar {
        self.entries[(i, j)]
    }

    /// Panics on a truncation mismatch.
    pub fn apply(&self, v: &HardyVector) -> HardyVector {
        assert_eq!(self.n_trunc(), v.n_trunc(), "truncation mismatch");
        let x = DVector::from_column_slice(v.coeffs());
        HardyVector::from_coeffs((&self.entries * x).as_slice().to_vec())
    }

    pub fn scale(&self, alpha: ComplexScalar) -> Self {
        Self::new(&self.entries * alpha, format!("{alpha}·{}", self.descriptor))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(&self.entries + &other.entries, format!("{} + {}", self.descriptor, other.descriptor))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(&self.entries - &other.entries, format!("{} - {}", self.descriptor, other.descriptor))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::new(&self.entries * &rhs.entries, format!("({})({})", self.descriptor, rhs.descriptor))
    }
}

impl fmt::Display for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}x{}]", self.descriptor, self.n_trunc(), self.n_trunc())
    }
}

/// Column `j` holds the first `n` Taylor coefficients of `φ^j`.
pub fn composition_matrix(phi: &SelfMap, n: usize) -> Result<OperatorMatrix, OpMatError> {
    if !phi.is_disk_self_map() {
        return Err(OpMatError::NotSelfMap);
    }
    let taylor = match phi {
        SelfMap::Moebius(m) => m.as_fraction().taylor(n).ok_or(OpMatError::PoleAtOrigin)?,
        SelfMap::Constant(k) => {
            let mut t = vec![ComplexScalar::new(0.0, 0.0); n];
            t[0] = k.value();
            t
        }
    };
    let mut entries = DMatrix::zeros(n, n);
    let mut power = vec![ComplexScalar::new(0.0, 0.0); n];
    power[0] = ComplexScalar::new(1.0, 0.0);
    for j in 0..n {
        entries.column_mut(j).copy_from_slice(&power);
        if j + 1 < n {
            power = truncated_product(&power, &taylor);
        }
    }
    Ok(OperatorMatrix::new(entries, format!("C[{phi}]")))
}

fn truncated_product(x: &[ComplexScalar], y: &[ComplexScalar]) -> Vec<ComplexScalar> {
    let n = x.len();
    let mut out = vec![ComplexScalar::new(0.0, 0.0); n];
    for (i, xi) in x.iter().enumerate() {
        if *xi == ComplexScalar::new(0.0, 0.0) {
            continue;
        }
        for (k, yk) in y.iter().take(n - i).enumerate() {
            out[i + k] += xi * yk;
        }
    }
    out
}

/// Lower-triangular Toeplitz matrix with `(i, j) = ĝ(i − j)` for `i ≥ j`.
///
/// For an analytic symbol the product `g f` has no negative frequencies, so
/// the Riesz projection is the identity and no explicit projection is taken.
pub fn toeplitz_analytic_matrix(symbol_coeffs: &HardyVector, n: usize) -> OperatorMatrix {
    let g = symbol_coeffs.coeffs();
    let entries = DMatrix::from_fn(n, n, |i, j| {
        if i >= j && i - j < g.len() {
            g[i - j]
        } else {
            ComplexScalar::new(0.0, 0.0)
        }
    });
    OperatorMatrix::new(entries, "T[g]")
}

/// Toeplitz matrix of a linear-fractional symbol analytic near the origin.
pub fn toeplitz_of_fraction(symbol: &LinearFraction<ComplexScalar>, n: usize) -> Result<OperatorMatrix, OpMatError> {
    let t = symbol.taylor(n).ok_or(OpMatError::PoleAtOrigin)?;
    Ok(toeplitz_analytic_matrix(&HardyVector::from_coeffs(t), n))
}

/// Conjugate transpose.
pub fn adjoint(m: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::new(m.entries.adjoint(), format!("({})*", m.descriptor))
}

/// `J M J`, which in the monomial basis is the entrywise conjugate.
pub fn j_conjugate(m: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix::new(m.entries.map(|z| z.conj()), format!("J({})J", m.descriptor))
}

/// Largest singular value by power iteration on `M* M`.
pub fn operator_norm_estimate(m: &OperatorMatrix) -> NormEstimate {
    let n = m.n_trunc();
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_ITERATION_SEED);
    let mut v = DVector::from_fn(n, |_, _| ComplexScalar::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let norm = v.norm();
    v /= ComplexScalar::new(norm, 0.0);
    let adj = m.entries.adjoint();
    let mut estimate = 0.0;
    for it in 1..=POWER_ITERATION_MAX {
        let w = &adj * (&m.entries * &v);
        let len = w.norm();
        if len == 0.0 {
            return NormEstimate { value: 0.0, iterations: it, converged: true };
        }
        // ‖M*M v‖ with ‖v‖ = 1 approaches σ_max².
        let next = len.sqrt();
        v = w / ComplexScalar::new(len, 0.0);
        if (next - estimate).abs() <= POWER_ITERATION_RTOL * next {
            return NormEstimate { value: next, iterations: it, converged: true };
        }
        estimate = next;
    }
    NormEstimate { value: estimate, iterations: POWER_ITERATION_MAX, converged: false }
}
