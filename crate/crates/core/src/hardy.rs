//! Truncated H² elements in the monomial basis.
//!
//! In this basis the conjugation `J f(z) = conj(f(conj z))` fixes every
//! monomial, so it acts exactly as entrywise coefficient conjugation.

use std::ops::{Add, Mul};

use thiserror::Error;

use crate::scalar::ComplexScalar;

/// Default truncation order.
pub const DEFAULT_TRUNCATION: usize = 128;
/// Kernel points are sampled in `|w| ≤ R_SAMPLE`; the tail `r^N/(1−r)` at
/// the default truncation is about 1e-20.
pub const R_SAMPLE: f64 = 0.7;
/// `|1 − w̄ z|` below this is treated as a pole of `K_w`.
pub const KERNEL_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HardyError {
    #[error("kernel point {0} is not inside the unit disk")]
    OutsideDisk(ComplexScalar),
    #[error("point is a pole of the kernel")]
    PoleAtPoint,
    #[error("truncation mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

/// Coefficients of `z^0 .. z^{N−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyVector {
    coeffs: Vec<ComplexScalar>,
}

/// A point `w` with `|w| < 1`, the index of the kernel `K_w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPoint(ComplexScalar);

impl KernelPoint {
    pub fn new(w: ComplexScalar) -> Result<Self, HardyError> {
        if !(w.norm() < 1.0) {
            return Err(HardyError::OutsideDisk(w));
        }
        Ok(Self(w))
    }

    pub fn w(&self) -> ComplexScalar {
        self.0
    }
}

impl HardyVector {
    /// Panics if `coeffs` is empty.
    pub fn from_coeffs(coeffs: Vec<ComplexScalar>) -> Self {
        assert!(!coeffs.is_empty(), "truncation order must be positive");
        Self { coeffs }
    }

    pub fn zeros(n: usize) -> Self {
        Self::from_coeffs(vec![ComplexScalar::new(0.0, 0.0); n])
    }

    /// `z^k` truncated to `n` terms.
    pub fn monomial(k: usize, n: usize) -> Self {
        let mut v = Self::zeros(n);
        if k < n {
            v.coeffs[k] = ComplexScalar::new(1.0, 0.0);
        }
        v
    }

    pub fn n_trunc(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[ComplexScalar] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<ComplexScalar> {
        self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, alpha: ComplexScalar) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| alpha * c).collect() }
    }
}

/// `K_w(z) = 1 / (1 − w̄ z)`.
pub fn kernel_eval(w: KernelPoint, z: ComplexScalar) -> Result<ComplexScalar, HardyError> {
    let den = ComplexScalar::new(1.0, 0.0) - w.0.conj() * z;
    if den.norm() < KERNEL_EPSILON {
        return Err(HardyError::PoleAtPoint);
    }
    Ok(den.inv())
}

/// Coefficients `(w̄)^k`, `k < n`.
pub fn kernel_vector(w: KernelPoint, n: usize) -> HardyVector {
    let wb = w.0.conj();
    let mut coeffs = Vec::with_capacity(n);
    let mut p = ComplexScalar::new(1.0, 0.0);
    for _ in 0..n {
        coeffs.push(p);
        p *= wb;
    }
    HardyVector::from_coeffs(coeffs)
}

/// `Σ f_k conj(g_k)`: linear in `f`, conjugate-linear in `g`.
pub fn inner_product(f: &HardyVector, g: &HardyVector) -> Result<ComplexScalar, HardyError> {
    if f.n_trunc() != g.n_trunc() {
        return Err(HardyError::LengthMismatch(f.n_trunc(), g.n_trunc()));
    }
    Ok(f.coeffs.iter().zip(&g.coeffs).map(|(a, b)| a * b.conj()).sum())
}

pub fn apply_j(f: &HardyVector) -> HardyVector {
    HardyVector { coeffs: f.coeffs.iter().map(|c| c.conj()).collect() }
}

/// Horner evaluation of the truncated series.
pub fn eval(f: &HardyVector, z: ComplexScalar) -> ComplexScalar {
    f.coeffs.iter().rev().fold(ComplexScalar::new(0.0, 0.0), |acc, c| acc * z + c)
}

impl Add for &HardyVector {
    type Output = HardyVector;

    /// Panics on a truncation mismatch.
    fn add(self, rhs: &HardyVector) -> HardyVector {
        assert_eq!(self.n_trunc(), rhs.n_trunc(), "truncation mismatch");
        HardyVector { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Mul<&HardyVector> for ComplexScalar {
    type Output = HardyVector;
    fn mul(self, rhs: &HardyVector) -> HardyVector {
        rhs.scale(self)
    }
}
