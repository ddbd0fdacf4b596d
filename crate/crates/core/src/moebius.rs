//! Linear-fractional self-maps of the unit disk.
//!
//! [`Moebius`] is generic over the coefficient field so the same algebra
//! (composition, coefficient conjugation, Cowen triple) serves both the
//! floating routes ([`MoebiusMap`]) and the exact route ([`ExactMoebius`]).
//! Coefficients are stored as given; [`MoebiusMap::normalized`] produces the
//! `d = 1` (or `c = 1` when `d = 0`) representative on demand.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::scalar::{parse_complex_literal, Coeff, ComplexScalar, GaussianRational, ScalarError};

/// Relative size of `|cz + d|` below which a point counts as a pole.
pub const POLE_EPSILON: f64 = 1e-12;
/// Slack allowed on `sup |φ| ≤ 1` over the unit circle.
pub const TOL_BOUNDARY: f64 = 1e-9;
/// Coefficient tolerance used when recognising automorphisms.
pub const TOL_AUTOMORPHISM: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoebiusError {
    #[error("degenerate linear-fractional map (ad - bc = 0)")]
    Degenerate,
    #[error("evaluation point is a pole of the map")]
    PoleAtPoint,
    #[error("map has c != 0")]
    NotUpperTriangular,
    #[error("constant value {0} is not inside the unit disk")]
    ConstantOutsideDisk(ComplexScalar),
    #[error("invalid map `{0}`: {1}")]
    Parse(String, String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// `(a z + b) / (c z + d)` with `ad - bc != 0`.
#[derive(Clone, PartialEq)]
pub struct Moebius<T> {
    a: T,
    b: T,
    c: T,
    d: T,
}

pub type MoebiusMap = Moebius<ComplexScalar>;
pub type ExactMoebius = Moebius<GaussianRational>;

/// `(p1 z + p0) / (q1 z + q0)` with no nondegeneracy requirement. Used for
/// the multiplier symbols of the Cowen and `c = 0` factorizations, which are
/// affine or reciprocal-affine and often constant.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFraction<T> {
    pub p1: T,
    pub p0: T,
    pub q1: T,
    pub q0: T,
}

/// `C_φ* = T_g C_σ T_h*` for `φ = (az+b)/(cz+d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CowenTriple<T> {
    /// `(ā z − c̄) / (−b̄ z + d̄)`
    pub sigma: Moebius<T>,
    /// `1 / (−b̄ z + d̄)`
    pub g: LinearFraction<T>,
    /// `c z + d`
    pub h: LinearFraction<T>,
}

/// `C_φ = C_ξ* T_τ*` for an affine `φ(z) = m z + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaFiveTriple<T> {
    /// `m̄ z / (−n̄ z + 1)`
    pub xi: Moebius<T>,
    /// `1 / (−n̄ z + 1)`
    pub tau: LinearFraction<T>,
}

/// `φ(z) = λ (a − z) / (1 − ā z)` with `|λ| = 1`, `|a| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AutoForm {
    pub lambda: ComplexScalar,
    pub a: ComplexScalar,
}

impl<T: Coeff> Moebius<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, MoebiusError> {
        let m = Self { a, b, c, d };
        if m.determinant().is_zero() {
            return Err(MoebiusError::Degenerate);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self { a: T::one(), b: T::zero(), c: T::zero(), d: T::one() }
    }

    pub fn a(&self) -> &T {
        &self.a
    }
    pub fn b(&self) -> &T {
        &self.b
    }
    pub fn c(&self) -> &T {
        &self.c
    }
    pub fn d(&self) -> &T {
        &self.d
    }

    pub fn coefficients(&self) -> [T; 4] {
        [self.a.clone(), self.b.clone(), self.c.clone(), self.d.clone()]
    }

    pub fn determinant(&self) -> T {
        self.a.clone() * self.d.clone() - self.b.clone() * self.c.clone()
    }

    /// `(a z + b) / (c z + d)`, or `None` at a pole.
    pub fn eval(&self, z: &T) -> Option<T> {
        self.as_fraction().eval(z)
    }

    pub fn as_fraction(&self) -> LinearFraction<T> {
        LinearFraction {
            p1: self.a.clone(),
            p0: self.b.clone(),
            q1: self.c.clone(),
            q0: self.d.clone(),
        }
    }

    /// `self ∘ inner`, via the product of coefficient matrices.
    pub fn compose(&self, inner: &Self) -> Result<Self, MoebiusError> {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&inner.a, &inner.b, &inner.c, &inner.d);
        Self::new(
            a.clone() * e.clone() + b.clone() * g.clone(),
            a.clone() * f.clone() + b.clone() * h.clone(),
            c.clone() * e.clone() + d.clone() * g.clone(),
            c.clone() * f.clone() + d.clone() * h.clone(),
        )
    }

    /// `k`-fold iterate; `iterate(0)` is the identity.
    pub fn iterate(&self, k: usize) -> Result<Self, MoebiusError> {
        let mut out = Self::identity();
        for _ in 0..k {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// The map `z ↦ conj(φ(conj z))`, i.e. every coefficient conjugated.
    pub fn conj_reflect(&self) -> Self {
        Self {
            a: self.a.conj(),
            b: self.b.conj(),
            c: self.c.conj(),
            d: self.d.conj(),
        }
    }

    pub fn cowen_triple(&self) -> CowenTriple<T> {
        let (ab, bb, cb, db) = (self.a.conj(), self.b.conj(), self.c.conj(), self.d.conj());
        CowenTriple {
            // σ is nondegenerate: its determinant is conj(ad − bc).
            sigma: Self { a: ab, b: -cb, c: -bb.clone(), d: db.clone() },
            g: LinearFraction { p1: T::zero(), p0: T::one(), q1: -bb, q0: db },
            h: LinearFraction {
                p1: self.c.clone(),
                p0: self.d.clone(),
                q1: T::zero(),
                q0: T::one(),
            },
        }
    }

    /// ξ and τ for a map with `c = 0`, after scaling to `φ(z) = m z + n`.
    pub fn lemma5_triple(&self) -> Result<LemmaFiveTriple<T>, MoebiusError> {
        if !self.c.is_zero() {
            return Err(MoebiusError::NotUpperTriangular);
        }
        let m = self.a.checked_div(&self.d).ok_or(MoebiusError::Degenerate)?;
        let n = self.b.checked_div(&self.d).ok_or(MoebiusError::Degenerate)?;
        let minus_nb = -n.conj();
        Ok(LemmaFiveTriple {
            xi: Self::new(m.conj(), T::zero(), minus_nb.clone(), T::one())?,
            tau: LinearFraction { p1: T::zero(), p0: T::one(), q1: minus_nb, q0: T::one() },
        })
    }
}

impl<T: Coeff> LinearFraction<T> {
    pub fn eval(&self, z: &T) -> Option<T> {
        let num = self.p1.clone() * z.clone() + self.p0.clone();
        let den = self.q1.clone() * z.clone() + self.q0.clone();
        num.checked_div(&den)
    }
}

impl LinearFraction<ComplexScalar> {
    /// First `n` Taylor coefficients at the origin, from the recurrence
    /// `q0 t_k = [k=1] p1 + [k=0] p0 − q1 t_{k−1}`.
    ///
    /// Returns `None` if `q0 = 0` (pole at the origin).
    pub fn taylor(&self, n: usize) -> Option<Vec<ComplexScalar>> {
        if Coeff::is_zero(&self.q0) {
            return None;
        }
        let mut out = Vec::with_capacity(n);
        let mut prev = ComplexScalar::new(0.0, 0.0);
        for k in 0..n {
            let mut rhs = -self.q1 * prev;
            match k {
                0 => rhs += self.p0,
                1 => rhs += self.p1,
                _ => {}
            }
            let t = rhs / self.q0;
            out.push(t);
            prev = t;
        }
        Some(out)
    }
}

impl MoebiusMap {
    pub fn from_reals(a: f64, b: f64, c: f64, d: f64) -> Result<Self, MoebiusError> {
        let z = |x| ComplexScalar::new(x, 0.0);
        Self::new(z(a), z(b), z(c), z(d))
    }

    /// Coefficients scaled so that `d = 1`, or `c = 1` when `d = 0`.
    pub fn normalized(&self) -> Self {
        let s = if self.d.norm() > 0.0 { self.d } else { self.c };
        Self { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s }
    }

    /// Largest coefficient modulus, the natural scale for tolerances.
    pub fn scale(&self) -> f64 {
        [self.a, self.b, self.c, self.d].iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn evaluate(&self, z: ComplexScalar) -> Result<ComplexScalar, MoebiusError> {
        let den = self.c * z + self.d;
        if den.norm() < POLE_EPSILON * (self.c.norm() + self.d.norm()) {
            return Err(MoebiusError::PoleAtPoint);
        }
        Ok((self.a * z + self.b) / den)
    }

    /// `true` iff `sup_{|z|=1} |φ(z)| ≤ 1 + TOL_BOUNDARY`.
    ///
    /// The unit circle maps to the circle with centre
    /// `(b d̄ − a c̄) / (|d|² − |c|²)` and radius `|ad − bc| / (|d|² − |c|²)`
    /// whenever the pole lies outside the closed disk.
    pub fn is_disk_self_map(&self) -> bool {
        let gap = self.d.norm_sqr() - self.c.norm_sqr();
        if gap <= 0.0 {
            return false;
        }
        let centre = (self.b * self.d.conj() - self.a * self.c.conj()).norm();
        let radius = self.determinant().norm();
        (centre + radius) / gap <= 1.0 + TOL_BOUNDARY
    }

    /// `max |φ(z)|` over `samples` equally spaced points of the unit circle.
    pub fn boundary_sup(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|k| {
                let z = ComplexScalar::from_polar(1.0, 2.0 * PI * k as f64 / samples as f64);
                self.evaluate(z).map_or(f64::INFINITY, |v| v.norm())
            })
            .fold(0.0, f64::max)
    }

    /// Recovers `(λ, a)` with `a = φ⁻¹(0)` and `λ = −φ'(a)(1 − |a|²)` when `φ`
    /// is a disk automorphism. A dilation `μ z` reports `(−μ, 0)`.
    pub fn as_automorphism(&self) -> Option<AutoForm> {
        if !self.is_disk_self_map() || self.a.norm() == 0.0 {
            return None;
        }
        let n = self.normalized();
        if n.d.norm() == 0.0 {
            return None;
        }
        let a = -n.b / n.a;
        if a.norm() >= 1.0 {
            return None;
        }
        // φ'(z) = det / (cz + d)²
        let den = n.c * a + n.d;
        let derivative = n.determinant() / (den * den);
        let lambda = -derivative * (1.0 - a.norm_sqr());
        if (lambda.norm() - 1.0).abs() > TOL_AUTOMORPHISM {
            return None;
        }
        let candidate = Self { a: -lambda, b: lambda * a, c: -a.conj(), d: ComplexScalar::new(1.0, 0.0) };
        candidate.approx_eq(self, TOL_AUTOMORPHISM).then_some(AutoForm { lambda, a })
    }

    /// Same map up to `tol` (relative) after normalisation.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let (x, y) = (self.normalized(), other.normalized());
        let scale = x.scale().max(y.scale()).max(1.0);
        x.coefficients()
            .iter()
            .zip(y.coefficients().iter())
            .all(|(p, q)| (p - q).norm() <= tol * scale)
    }

    pub fn to_exact(&self) -> Result<ExactMoebius, MoebiusError> {
        let [a, b, c, d] = self.coefficients().map(GaussianRational::from_complex);
        Ok(ExactMoebius::new(a?, b?, c?, d?)?)
    }
}

impl ExactMoebius {
    pub fn to_float(&self) -> Result<MoebiusMap, MoebiusError> {
        let [a, b, c, d] = self.coefficients().map(|x| x.to_complex());
        MoebiusMap::new(a?, b?, c?, d?)
    }

    pub fn normalized(&self) -> Self {
        let s = if !self.d.is_zero() { &self.d } else { &self.c };
        let inv = s.inv().expect("nondegenerate map has c or d nonzero");
        Self {
            a: &self.a * &inv,
            b: &self.b * &inv,
            c: &self.c * &inv,
            d: &self.d * &inv,
        }
    }
}

impl FromStr for ExactMoebius {
    type Err = MoebiusError;

    fn from_str(s: &str) -> Result<Self, MoebiusError> {
        let parts = split_coefficients(s)?;
        let [a, b, c, d] = parts;
        ExactMoebius::new(a, b, c, d)
    }
}

fn split_coefficients(s: &str) -> Result<[GaussianRational; 4], MoebiusError> {
    let parse_err = |msg: &str| MoebiusError::Parse(s.to_string(), msg.to_string());
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(parse_err("expected four comma-separated coefficients a,b,c,d"));
    }
    let mut out = Vec::with_capacity(4);
    for p in parts {
        out.push(parse_complex_literal(p).map_err(|e| parse_err(&e.to_string()))?);
    }
    Ok(out.try_into().expect("four parts"))
}

impl<T: fmt::Debug> fmt::Debug for Moebius<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} z + {:?}) / ({:?} z + {:?})", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for MoebiusMap {
    /// The map text form `a,b,c,d`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lit = |z: &ComplexScalar| {
            // Adding 0.0 turns −0 into 0.
            let z = ComplexScalar::new(z.re + 0.0, z.im + 0.0);
            if z.im == 0.0 {
                format!("{}", z.re)
            } else if z.im < 0.0 {
                format!("{}-{}i", z.re, -z.im)
            } else {
                format!("{}+{}i", z.re, z.im)
            }
        };
        write!(f, "{},{},{},{}", lit(&self.a), lit(&self.b), lit(&self.c), lit(&self.d))
    }
}

/// A constant self-map `φ ≡ value`, `|value| < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantMap {
    value: ComplexScalar,
}

impl ConstantMap {
    pub fn new(value: ComplexScalar) -> Result<Self, MoebiusError> {
        if !(value.norm() < 1.0) {
            return Err(MoebiusError::ConstantOutsideDisk(value));
        }
        Ok(Self { value })
    }

    pub fn value(&self) -> ComplexScalar {
        self.value
    }
}

/// Either a nondegenerate linear-fractional map or a constant.
#[derive(Debug, Clone, PartialEq)]
pub enum SelfMap {
    Moebius(MoebiusMap),
    Constant(ConstantMap),
}

impl SelfMap {
    /// Builds a map from raw coefficients; `ad − bc = 0` yields the constant.
    pub fn from_coefficients(
        a: ComplexScalar,
        b: ComplexScalar,
        c: ComplexScalar,
        d: ComplexScalar,
    ) -> Result<Self, MoebiusError> {
        match MoebiusMap::new(a, b, c, d) {
            Ok(m) => Ok(SelfMap::Moebius(m)),
            Err(MoebiusError::Degenerate) => {
                let value = if d.norm() > 0.0 {
                    b / d
                } else if c.norm() > 0.0 {
                    a / c
                } else {
                    return Err(MoebiusError::Degenerate);
                };
                Ok(SelfMap::Constant(ConstantMap::new(value)?))
            }
            Err(e) => Err(e),
        }
    }

    pub fn constant(value: ComplexScalar) -> Result<Self, MoebiusError> {
        Ok(SelfMap::Constant(ConstantMap::new(value)?))
    }

    pub fn is_disk_self_map(&self) -> bool {
        match self {
            SelfMap::Moebius(m) => m.is_disk_self_map(),
            SelfMap::Constant(_) => true,
        }
    }

    pub fn evaluate(&self, z: ComplexScalar) -> Result<ComplexScalar, MoebiusError> {
        match self {
            SelfMap::Moebius(m) => m.evaluate(z),
            SelfMap::Constant(k) => Ok(k.value),
        }
    }

    /// `φ(0)` and `φ₂(0)`.
    pub fn origin_orbit(&self) -> Result<(ComplexScalar, ComplexScalar), MoebiusError> {
        let p = self.evaluate(ComplexScalar::new(0.0, 0.0))?;
        Ok((p, self.evaluate(p)?))
    }

    /// Coefficients `a,b,c,d`; a constant `v` is reported as `0,v,0,1`.
    pub fn coefficients(&self) -> [ComplexScalar; 4] {
        match self {
            SelfMap::Moebius(m) => m.coefficients(),
            SelfMap::Constant(k) => {
                let (zero, one) = (ComplexScalar::new(0.0, 0.0), ComplexScalar::new(1.0, 0.0));
                [zero, k.value, zero, one]
            }
        }
    }
}

impl FromStr for SelfMap {
    type Err = MoebiusError;

    /// `a,b,c,d` or `const:v`, with complex literals as in [`parse_complex_literal`].
    fn from_str(s: &str) -> Result<Self, MoebiusError> {
        let parse_err = |msg: String| MoebiusError::Parse(s.to_string(), msg);
        if let Some(v) = s.strip_prefix("const:") {
            let v = parse_complex_literal(v).map_err(|e| parse_err(e.to_string()))?;
            return SelfMap::constant(v.to_complex()?);
        }
        let [a, b, c, d] = split_coefficients(s)?.map(|x| x.to_complex());
        SelfMap::from_coefficients(a?, b?, c?, d?)
    }
}

impl fmt::Display for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelfMap::Moebius(m) => write!(f, "{m}"),
            SelfMap::Constant(k) => {
                let v = k.value;
                if v.im < 0.0 {
                    write!(f, "const:{}-{}i", v.re, -v.im)
                } else {
                    write!(f, "const:{}+{}i", v.re, v.im)
                }
            }
        }
    }
}
