//! The m-complex-symmetry defect with respect to `J`.
//!
//! For `m = 2` the antilinear defect of `T` is `J T² − 2 T* J T + T*² J`,
//! and because `J M = conj(M) J` in the monomial basis this equals
//! `D J` with the linear matrix `D = conj(M)² − 2 M* conj(M) + M*²`.
//! Applied to a reproducing kernel and evaluated at `z` it gives
//!
//! ```text
//! F_w(z) = (J C² K_w)(z) − 2 (C* J C K_w)(z) + (C*² J K_w)(z)
//! ```
//!
//! whose three terms have closed forms for linear-fractional symbols. The
//! adjoint defect (`C*` in place of `C`, written as `C*² J − 2 J C J C* J + J C²`)
//! replaces the middle term by `J C J C* J K_w`.
//!
//! Every closed form below is arranged so that conjugation only touches map
//! coefficients: `φ̄ := conj_reflect(φ)` satisfies `φ̄(z) = conj(φ(z̄))`.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::hardy::{eval, HardyVector};
use crate::moebius::{CowenTriple, MoebiusError, MoebiusMap, SelfMap};
use crate::opmat::{adjoint, composition_matrix, j_conjugate, OpMatError, OperatorMatrix};
use crate::scalar::ComplexScalar;

/// Below this a closed-form denominator is treated as singular.
pub const DENOM_EPSILON: f64 = 1e-12;
/// Samples with `|σ(w)|` below this are dropped when `c ≠ 0` (removable
/// singularity of the middle term).
pub const SIGMA_EXCLUSION: f64 = 1e-6;
/// Zero tolerance for the closed-form route.
pub const TOL_CLOSED_FORM: f64 = 1e-9;
/// Zero tolerance for the truncated-matrix route at `N = 128`, `r = 0.7`.
pub const TOL_MATRIX_ROUTE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MsymError {
    #[error("symbol is not a self-map of the disk")]
    NotSelfMap,
    #[error("sample point is on the excluded set of the closed form")]
    ExcludedSample,
    #[error("{excluded} of {attempted} samples were excluded")]
    TooManyExclusions { excluded: usize, attempted: usize },
    #[error("invalid defect configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
}

impl From<OpMatError> for MsymError {
    fn from(e: OpMatError) -> Self {
        match e {
            OpMatError::NotSelfMap => MsymError::NotSelfMap,
            OpMatError::PoleAtOrigin => MsymError::NotSelfMap,
        }
    }
}

/// Which operator is tested: `C_φ` or `C_φ*`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Direct,
    Adjoint,
}

impl fmt::Display for Which {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Which::Direct => "direct",
            Which::Adjoint => "adjoint",
        })
    }
}

impl std::str::FromStr for Which {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "direct" => Ok(Which::Direct),
            "adjoint" => Ok(Which::Adjoint),
            _ => Err(format!("expected `direct` or `adjoint`, got `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Verdict {
    #[serde(rename = "two_cs_with_J")]
    TwoCsWithJ,
    #[serde(rename = "not_two_cs_with_J")]
    NotTwoCsWithJ,
}

impl Verdict {
    pub fn from_bool(two_cs: bool) -> Self {
        if two_cs {
            Verdict::TwoCsWithJ
        } else {
            Verdict::NotTwoCsWithJ
        }
    }

    pub fn is_two_cs(self) -> bool {
        self == Verdict::TwoCsWithJ
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::TwoCsWithJ => "two_cs_with_J",
            Verdict::NotTwoCsWithJ => "not_two_cs_with_J",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DefectConfig {
    pub n_trunc: usize,
    pub n_samples: usize,
    pub r_sample: f64,
    pub tol_zero: f64,
    pub seed: u64,
}

impl Default for DefectConfig {
    fn default() -> Self {
        Self {
            n_trunc: crate::hardy::DEFAULT_TRUNCATION,
            n_samples: 200,
            r_sample: crate::hardy::R_SAMPLE,
            tol_zero: TOL_CLOSED_FORM,
            seed: 0,
        }
    }
}

impl DefectConfig {
    pub fn validate(&self) -> Result<(), MsymError> {
        if !(self.r_sample > 0.0 && self.r_sample < 1.0) {
            return Err(MsymError::InvalidConfig("r_sample must lie in (0, 1)"));
        }
        if self.n_samples == 0 {
            return Err(MsymError::InvalidConfig("n_samples must be positive"));
        }
        if self.n_trunc == 0 {
            return Err(MsymError::InvalidConfig("n_trunc must be positive"));
        }
        if !(self.tol_zero > 0.0) {
            return Err(MsymError::InvalidConfig("tol_zero must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefectReport {
    #[serde(serialize_with = "as_display")]
    pub map: SelfMap,
    pub which: Which,
    pub n_trunc: usize,
    pub n_samples: usize,
    pub r_sample: f64,
    pub seed: u64,
    pub max_abs_closed_form: f64,
    pub max_abs_matrix_route: f64,
    #[serde(serialize_with = "as_pair")]
    pub lemma4_residual: ComplexScalar,
    #[serde(skip)]
    pub samples_used: Vec<(ComplexScalar, ComplexScalar)>,
    /// Largest `|closed form − matrix route|` over the samples.
    #[serde(skip)]
    pub max_route_gap: f64,
    pub excluded_samples: usize,
    pub verdict: Verdict,
}

fn as_display<S: Serializer, T: fmt::Display>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn as_pair<S: Serializer>(z: &ComplexScalar, s: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

fn one() -> ComplexScalar {
    ComplexScalar::new(1.0, 0.0)
}

fn checked_inv(den: ComplexScalar) -> Result<ComplexScalar, MsymError> {
    if den.norm() < DENOM_EPSILON || !den.norm().is_finite() {
        return Err(MsymError::ExcludedSample);
    }
    Ok(den.inv())
}

fn eval_or_exclude(m: &MoebiusMap, z: ComplexScalar) -> Result<ComplexScalar, MsymError> {
    m.evaluate(z).map_err(|_| MsymError::ExcludedSample)
}

/// `m`-defect `Σ_j (−1)^{m−j} binom(m,j) (M*)^j conj(M)^{m−j}`, the linear
/// part of the antilinear defect composed with `J` on the right.
pub fn defect_matrix_m(m_op: &OperatorMatrix, m: usize) -> OperatorMatrix {
    assert!(m >= 1, "m must be at least 1");
    let n = m_op.n_trunc();
    let adj = adjoint(m_op);
    let conj = j_conjugate(m_op);
    // conj(M)^k for k = 0..=m
    let mut conj_powers = vec![OperatorMatrix::identity(n)];
    for k in 1..=m {
        conj_powers.push(&conj_powers[k - 1] * &conj);
    }
    let mut total = OperatorMatrix::zeros(n);
    let mut adj_power = OperatorMatrix::identity(n);
    for j in 0..=m {
        if j > 0 {
            adj_power = &adj_power * &adj;
        }
        let sign = if (m - j) % 2 == 0 { 1.0 } else { -1.0 };
        let weight = sign * binomial(m, j) as f64;
        let term = &adj_power * &conj_powers[m - j];
        total = total.add(&term.scale(ComplexScalar::new(weight, 0.0)));
    }
    OperatorMatrix::new(total.entries().clone(), format!("defect_{m}[{}]", m_op.descriptor()))
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Linear matrix whose action on `k_{w̄}` evaluated at `z` is the adjoint
/// defect `F*_w(z)`: `M*² − 2 conj(M) M* + conj(M)²`.
pub fn adjoint_defect_matrix(m_op: &OperatorMatrix) -> OperatorMatrix {
    j_conjugate(&defect_matrix_m(&adjoint(m_op), 2))
}

/// The four kernel actions of a composition operator evaluated at `z`:
///
/// * `a = (J C² K_w)(z)`
/// * `b = (C* J C K_w)(z)`
/// * `c = (C*² J K_w)(z)`
/// * `d = (J C J C* J K_w)(z)`
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTerms {
    pub a: ComplexScalar,
    pub b: ComplexScalar,
    pub c: ComplexScalar,
    pub d: ComplexScalar,
}

impl KernelTerms {
    pub fn direct(&self) -> ComplexScalar {
        self.a - 2.0 * self.b + self.c
    }

    pub fn adjoint(&self) -> ComplexScalar {
        self.c - 2.0 * self.d + self.a
    }
}

/// Precomputed closed forms for one linear-fractional symbol.
#[derive(Debug, Clone)]
pub struct ClosedForms {
    phi: MoebiusMap,
    phi_bar: MoebiusMap,
    phi_bar2: MoebiusMap,
    cowen: CowenTriple<ComplexScalar>,
}

impl ClosedForms {
    pub fn new(phi: &MoebiusMap) -> Result<Self, MsymError> {
        let phi_bar = phi.conj_reflect();
        let phi_bar2 = phi_bar.compose(&phi_bar)?;
        Ok(Self { phi: phi.clone(), phi_bar, phi_bar2, cowen: phi.cowen_triple() })
    }

    /// `1 / (1 − w φ̄₂(z))`
    pub fn term_a(&self, w: ComplexScalar, z: ComplexScalar) -> Result<ComplexScalar, MsymError> {
        checked_inv(one() - w * eval_or_exclude(&self.phi_bar2, z)?)
    }

    /// `g(w) [ −c̄/σ(w) · K_{φ(0)}(z) + (c̄/σ(w) + d̄) · K_{φ(conj σ(w))}(z) ]`,
    /// with the `c̄/σ(w)` pieces identically zero when `c = 0`.
    pub fn term_b(&self, w: ComplexScalar, z: ComplexScalar) -> Result<ComplexScalar, MsymError> {
        let cb = self.phi.c().conj();
        let db = self.phi.d().conj();
        let ab = self.phi.a().conj();
        let g_w = self.cowen.g.eval(&w).ok_or(MsymError::ExcludedSample)?;
        let sigma_w = eval_or_exclude(&self.cowen.sigma, w)?;
        let q = eval_or_exclude(&self.phi_bar, sigma_w)?;
        let k_q = checked_inv(one() - q * z)?;
        if cb == ComplexScalar::new(0.0, 0.0) {
            return Ok(g_w * db * k_q);
        }
        if (ab * w - cb).norm() < DENOM_EPSILON || sigma_w.norm() < SIGMA_EXCLUSION {
            return Err(MsymError::ExcludedSample);
        }
        let p = eval_or_exclude(&self.phi_bar, ComplexScalar::new(0.0, 0.0))?;
        let k_p = checked_inv(one() - p * z)?;
        let ratio = cb / sigma_w;
        Ok(g_w * (-ratio * k_p + (ratio + db) * k_q))
    }

    /// `1 / (1 − φ̄₂(w) z)`
    pub fn term_c(&self, w: ComplexScalar, z: ComplexScalar) -> Result<ComplexScalar, MsymError> {
        checked_inv(one() - eval_or_exclude(&self.phi_bar2, w)? * z)
    }

    /// `1 / (1 − φ̄(w) φ̄(z))`
    pub fn term_d(&self, w: ComplexScalar, z: ComplexScalar) -> Result<ComplexScalar, MsymError> {
        checked_inv(one() - eval_or_exclude(&self.phi_bar, w)? * eval_or_exclude(&self.phi_bar, z)?)
    }

    pub fn direct(&self, w: ComplexScalar, z: ComplexScalar) -> Result<ComplexScalar, MsymError> {
        Ok(self.term_a(w, z)? - 2.0 * self.term_b(w, z)? + self.term_c(w, z)?)
    }

    pub fn adjoint(&self, w: ComplexScalar, z: ComplexScalar) -> Result<ComplexScalar, MsymError> {
        Ok(self.term_c(w, z)? - 2.0 * self.term_d(w, z)? + self.term_a(w, z)?)
    }

    pub fn terms(&self, w: ComplexScalar, z: ComplexScalar) -> Result<KernelTerms, MsymError> {
        Ok(KernelTerms {
            a: self.term_a(w, z)?,
            b: self.term_b(w, z)?,
            c: self.term_c(w, z)?,
            d: self.term_d(w, z)?,
        })
    }
}

/// Kernel actions for `φ ≡ c`:
/// `a = 1/(1 − w c̄)`, `b = a/(1 − c̄ z)`, `c = 1/(1 − c̄ z)`, `d = 1/(1 − c̄²)`.
pub fn constant_terms(value: ComplexScalar, w: ComplexScalar, z: ComplexScalar) -> Result<KernelTerms, MsymError> {
    let cb = value.conj();
    let a = checked_inv(one() - w * cb)?;
    let c = checked_inv(one() - cb * z)?;
    Ok(KernelTerms { a, b: a * c, c, d: checked_inv(one() - cb * cb)? })
}

/// `F_w(z)` for `C_φ`; zero for all `(w, z)` iff `C_φ` is 2-complex symmetric with `J`.
pub fn defect_kernel_direct(phi: &MoebiusMap, w: ComplexScalar, z: ComplexScalar) -> Result<ComplexScalar, MsymError> {
    ClosedForms::new(phi)?.direct(w, z)
}

/// `F*_w(z)` for `C_φ*`.
pub fn defect_kernel_adjoint(phi: &MoebiusMap, w: ComplexScalar, z: ComplexScalar) -> Result<ComplexScalar, MsymError> {
    ClosedForms::new(phi)?.adjoint(w, z)
}

/// Closed-form kernel actions for either kind of self-map.
pub fn kernel_terms(phi: &SelfMap, w: ComplexScalar, z: ComplexScalar) -> Result<KernelTerms, MsymError> {
    match phi {
        SelfMap::Moebius(m) => ClosedForms::new(m)?.terms(w, z),
        SelfMap::Constant(k) => constant_terms(k.value(), w, z),
    }
}

/// `2 φ₂(0) − 4 φ(0) + φ(0) φ₂(0)`; vanishing is necessary for `C_φ` to be
/// 2-complex symmetric with `J`.
pub fn lemma4_residual(phi: &SelfMap) -> Result<ComplexScalar, MsymError> {
    let (p, q) = phi.origin_orbit()?;
    Ok(2.0 * q - 4.0 * p + p * q)
}

/// The same four kernel actions computed from truncated matrices.
pub struct MatrixRoute {
    n: usize,
    conj: OperatorMatrix,
    adj: OperatorMatrix,
}

impl MatrixRoute {
    pub fn new(phi: &SelfMap, n: usize) -> Result<Self, MsymError> {
        let m = composition_matrix(phi, n)?;
        Ok(Self { n, conj: j_conjugate(&m), adj: adjoint(&m) })
    }

    /// Coefficients of `J K_w = K_{w̄}`, i.e. `w^k`.
    fn j_kernel(&self, w: ComplexScalar) -> HardyVector {
        let mut coeffs = Vec::with_capacity(self.n);
        let mut p = one();
        for _ in 0..self.n {
            coeffs.push(p);
            p *= w;
        }
        HardyVector::from_coeffs(coeffs)
    }

    pub fn terms(&self, w: ComplexScalar, z: ComplexScalar) -> KernelTerms {
        let v = self.j_kernel(w);
        let conj_v = self.conj.apply(&v);
        let adj_v = self.adj.apply(&v);
        KernelTerms {
            a: eval(&self.conj.apply(&conj_v), z),
            b: eval(&self.adj.apply(&conj_v), z),
            c: eval(&self.adj.apply(&adj_v), z),
            d: eval(&self.conj.apply(&adj_v), z),
        }
    }
}

fn sample_disk(rng: &mut ChaCha8Rng, r: f64) -> ComplexScalar {
    let rho = r * rng.gen::<f64>().sqrt();
    let theta = rng.gen_range(0.0..std::f64::consts::TAU);
    Complex64::from_polar(rho, theta)
}

/// Samples `(w, z)` pairs in the disk of radius `cfg.r_sample` and measures
/// the defect by the closed forms (authoritative) and the truncated-matrix
/// route (cross-check).
///
/// The first pair is `(0, 1/2)` whenever it lies in the sampling disk; it is
/// the probe point behind [`lemma4_residual`]. Excluded pairs are redrawn;
/// more than `n_samples / 2` exclusions is an error.
pub fn run_defect_suite(phi: &SelfMap, which: Which, cfg: &DefectConfig) -> Result<DefectReport, MsymError> {
    cfg.validate()?;
    if !phi.is_disk_self_map() {
        return Err(MsymError::NotSelfMap);
    }
    let closed = match phi {
        SelfMap::Moebius(m) => Some(ClosedForms::new(m)?),
        SelfMap::Constant(_) => None,
    };
    let closed_value = |w, z| -> Result<ComplexScalar, MsymError> {
        match (&closed, phi) {
            (Some(cf), _) => match which {
                Which::Direct => cf.direct(w, z),
                Which::Adjoint => cf.adjoint(w, z),
            },
            (None, SelfMap::Constant(k)) => {
                let t = constant_terms(k.value(), w, z)?;
                Ok(match which {
                    Which::Direct => t.direct(),
                    Which::Adjoint => t.adjoint(),
                })
            }
            (None, SelfMap::Moebius(_)) => unreachable!(),
        }
    };

    let m = composition_matrix(phi, cfg.n_trunc)?;
    let defect = match which {
        Which::Direct => defect_matrix_m(&m, 2),
        Which::Adjoint => adjoint_defect_matrix(&m),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let anchor = (ComplexScalar::new(0.0, 0.0), ComplexScalar::new(0.5, 0.0));
    let mut use_anchor = 0.5 <= cfg.r_sample;
    let mut samples = Vec::with_capacity(cfg.n_samples);
    let (mut excluded, mut max_closed, mut max_matrix, mut max_gap) = (0usize, 0.0f64, 0.0f64, 0.0f64);
    while samples.len() < cfg.n_samples {
        let (w, z) = if use_anchor {
            use_anchor = false;
            anchor
        } else {
            (sample_disk(&mut rng, cfg.r_sample), sample_disk(&mut rng, cfg.r_sample))
        };
        let value = match closed_value(w, z) {
            Ok(v) => v,
            Err(MsymError::ExcludedSample) => {
                excluded += 1;
                if 2 * excluded > cfg.n_samples {
                    return Err(MsymError::TooManyExclusions { excluded, attempted: excluded + samples.len() });
                }
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut jk = Vec::with_capacity(cfg.n_trunc);
        let mut p = one();
        for _ in 0..cfg.n_trunc {
            jk.push(p);
            p *= w;
        }
        let matrix_value = eval(&defect.apply(&HardyVector::from_coeffs(jk)), z);
        max_closed = max_closed.max(value.norm());
        max_matrix = max_matrix.max(matrix_value.norm());
        max_gap = max_gap.max((value - matrix_value).norm());
        samples.push((w, z));
    }

    let residual = lemma4_residual(phi)?;
    let verdict = Verdict::from_bool(max_closed < cfg.tol_zero && residual.norm() < cfg.tol_zero);
    Ok(DefectReport {
        map: phi.clone(),
        which,
        n_trunc: cfg.n_trunc,
        n_samples: cfg.n_samples,
        r_sample: cfg.r_sample,
        seed: cfg.seed,
        max_abs_closed_form: max_closed,
        max_abs_matrix_route: max_matrix,
        lemma4_residual: residual,
        samples_used: samples,
        max_route_gap: max_gap,
        excluded_samples: excluded,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opmat::operator_norm_estimate;

    fn c(re: f64, im: f64) -> ComplexScalar {
        ComplexScalar::new(re, im)
    }

    fn real(a: f64, b: f64, cc: f64, d: f64) -> MoebiusMap {
        MoebiusMap::from_reals(a, b, cc, d).unwrap()
    }

    fn matrix_inner(defect: &OperatorMatrix, w: ComplexScalar, z: ComplexScalar) -> ComplexScalar {
        let n = defect.n_trunc();
        let v: Vec<_> = (0..n).map(|k| w.powu(k as u32)).collect();
        eval(&defect.apply(&HardyVector::from_coeffs(v)), z)
    }

    #[test]
    fn binomials() {
        assert_eq!((0..=4).map(|k| binomial(4, k)).collect::<Vec<_>>(), vec![1, 4, 6, 4, 1]);
    }

    #[test]
    fn dilation_defect_matrix_vanishes() {
        let m = composition_matrix(&SelfMap::Moebius(real(0.5, 0.0, 0.0, 1.0)), 64).unwrap();
        assert!(defect_matrix_m(&m, 2).max_abs() < 1e-14);
        let d = OperatorMatrix::from_diagonal(&[c(1.0, 0.0), c(-0.3, 0.0), c(0.7, 0.0)]);
        assert_eq!(defect_matrix_m(&d, 1).max_abs(), 0.0);
    }

    #[test]
    fn affine_defect_matrix_is_visible() {
        let phi = SelfMap::Moebius(real(0.5, 0.25, 0.0, 1.0));
        let m = composition_matrix(&phi, 64).unwrap();
        let defect = defect_matrix_m(&m, 2);
        assert!(operator_norm_estimate(&defect).value > 1e-3);
        // oracle: the closed form at the same point
        let (w, z) = (c(0.0, 0.0), c(0.5, 0.0));
        let closed = defect_kernel_direct(&real(0.5, 0.25, 0.0, 1.0), w, z).unwrap();
        assert!((matrix_inner(&defect, w, z) - closed).norm() < 1e-12);
    }

    #[test]
    fn affine_probe_value() {
        let phi = real(0.5, 0.25, 0.0, 1.0);
        let v = defect_kernel_direct(&phi, c(0.0, 0.0), c(0.5, 0.0)).unwrap();
        assert!((v - c(-5.0 / 91.0, 0.0)).norm() < 1e-15);
        // origin probe expression
        let (p, q) = (0.25, 0.375);
        let probe = 1.0 - 4.0 / (2.0 - p) + 2.0 / (2.0 - q);
        assert!((v.re - probe).abs() < 1e-15);
    }

    #[test]
    fn dilation_kernel_defects_vanish() {
        for a in [c(0.3, 0.4), c(-0.9, 0.0), c(0.0, 0.99), c(1.0, 0.0)] {
            let phi = MoebiusMap::new(a, c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap();
            let cf = ClosedForms::new(&phi).unwrap();
            for (w, z) in [(c(0.1, 0.2), c(-0.5, 0.3)), (c(0.0, 0.0), c(0.6, 0.0))] {
                let expected = (one() - a.conj() * a.conj() * w * z).inv();
                let t = cf.terms(w, z).unwrap();
                for v in [t.a, t.b, t.c, t.d] {
                    assert!((v - expected).norm() < 1e-15);
                }
                assert!(cf.direct(w, z).unwrap().norm() < 1e-15);
                assert!(cf.adjoint(w, z).unwrap().norm() < 1e-15);
            }
        }
    }

    #[test]
    fn fixes_origin_w_zero_slice_is_flat() {
        // For φ(z) = z/(sz+t) the w = 0 slice is 1 − 2 K_{φ(0)}(z) + K_{φ₂(0)}(z) = 0,
        // so a refutation needs w ≠ 0.
        let (s, t) = (0.3, 1.5);
        let phi = real(1.0, 0.0, s, t);
        let cf = ClosedForms::new(&phi).unwrap();
        for z in [c(0.2, 0.0), c(-0.4, 0.3), c(0.0, 0.6)] {
            let f = cf.direct(c(0.0, 0.0), z).unwrap();
            assert!(f.norm() < 1e-15);
            let t = cf.terms(c(0.0, 0.0), z).unwrap();
            assert!((t.a - one()).norm() < 1e-15 && (t.b - one()).norm() < 1e-15 && (t.c - one()).norm() < 1e-15);
        }
        let off_slice = cf.direct(c(0.5, 0.0), c(0.5, 0.0)).unwrap();
        assert!(off_slice.norm() > 1e-3, "{off_slice}");
    }

    #[test]
    fn affine_adjoint_w_zero_reduction() {
        let (m, n) = (0.5, 0.25);
        let phi = real(m, n, 0.0, 1.0);
        for z in [c(0.3, 0.0), c(-0.2, 0.5)] {
            let f = defect_kernel_adjoint(&phi, c(0.0, 0.0), z).unwrap();
            let lhs = (2.0 - (m * n + n) * z) / (1.0 - (m * n + n) * z);
            let rhs = 2.0 / (1.0 - n * (m * z + n));
            assert!((f - (lhs - rhs)).norm() < 1e-14);
            assert!(f.norm() > 1e-3);
        }
    }

    #[test]
    fn constant_adjoint_matches_explicit_expression() {
        let cst = c(0.25, 0.1);
        let (w, z) = (c(0.3, -0.2), c(0.1, 0.4));
        let t = constant_terms(cst, w, z).unwrap();
        let cb = cst.conj();
        let expected = 1.0 / (1.0 - w * cb) - 2.0 / (1.0 - cb * cb) + 1.0 / (1.0 - cb * z);
        assert!((t.adjoint() - expected).norm() < 1e-15);
        let residual = lemma4_residual(&SelfMap::constant(cst).unwrap()).unwrap();
        assert!((residual - (cst * cst - 2.0 * cst)).norm() < 1e-15);
    }

    #[test]
    fn lemma4_examples() {
        let z = lemma4_residual(&SelfMap::Moebius(real(0.7, 0.0, 0.0, 1.0))).unwrap();
        assert_eq!(z, c(0.0, 0.0));
        let r = lemma4_residual(&SelfMap::Moebius(real(0.5, 0.25, 0.0, 1.0))).unwrap();
        assert!((r - c(-0.15625, 0.0)).norm() < 1e-15);
        // oracle: conj((2 − p̄)(2 − q̄) F_0(1/2)) via the matrix route
        let phi = SelfMap::Moebius(real(0.5, 0.25, 0.0, 1.0));
        let defect = defect_matrix_m(&composition_matrix(&phi, 128).unwrap(), 2);
        let f = matrix_inner(&defect, c(0.0, 0.0), c(0.5, 0.0));
        let (p, q) = phi.origin_orbit().unwrap();
        let via_matrix = ((2.0 - p.conj()) * (2.0 - q.conj()) * f).conj();
        assert!((via_matrix - r).norm() < 1e-12);
    }

    #[test]
    fn sigma_zero_is_excluded_when_c_nonzero() {
        // σ(w) = 0 at w = c̄/ā
        let phi = real(0.3, 0.2, 0.2, 1.0);
        let w = c(0.2 / 0.3, 0.0);
        assert_eq!(defect_kernel_direct(&phi, w, c(0.1, 0.0)), Err(MsymError::ExcludedSample));
        // the adjoint form does not involve σ
        assert!(defect_kernel_adjoint(&phi, w, c(0.1, 0.0)).is_ok());
    }

    #[test]
    fn suite_examples() {
        let cfg = DefectConfig::default();
        let dil = SelfMap::Moebius(MoebiusMap::new(c(0.3, 0.4), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap());
        let r = run_defect_suite(&dil, Which::Direct, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::TwoCsWithJ);
        assert!(r.max_abs_closed_form < 1e-12);
        assert_eq!(r.samples_used.len(), 200);

        let aff = SelfMap::Moebius(real(0.5, 0.25, 0.0, 1.0));
        let r = run_defect_suite(&aff, Which::Direct, &cfg).unwrap();
        assert_eq!(r.verdict, Verdict::NotTwoCsWithJ);
        assert!(r.max_abs_closed_form >= 5.0 / 91.0 - 1e-9);
        assert!(r.max_route_gap < TOL_MATRIX_ROUTE);

        let zero = SelfMap::constant(c(0.0, 0.0)).unwrap();
        for which in [Which::Direct, Which::Adjoint] {
            assert_eq!(run_defect_suite(&zero, which, &cfg).unwrap().verdict, Verdict::TwoCsWithJ);
        }
    }

    #[test]
    fn suite_is_deterministic_and_validates() {
        let phi = SelfMap::Moebius(real(0.3, 0.2, 0.2, 1.0));
        let cfg = DefectConfig { n_trunc: 32, n_samples: 20, seed: 9, ..DefectConfig::default() };
        let a = run_defect_suite(&phi, Which::Adjoint, &cfg).unwrap();
        let b = run_defect_suite(&phi, Which::Adjoint, &cfg).unwrap();
        assert_eq!(a, b);
        let bad = DefectConfig { r_sample: 1.0, ..cfg.clone() };
        assert!(matches!(run_defect_suite(&phi, Which::Direct, &bad), Err(MsymError::InvalidConfig(_))));
        let not_self = SelfMap::Moebius(real(2.0, 0.0, 0.0, 1.0));
        assert_eq!(run_defect_suite(&not_self, Which::Direct, &cfg).unwrap_err(), MsymError::NotSelfMap);
    }

    #[test]
    fn report_json_keys() {
        let phi = SelfMap::Moebius(real(0.5, 0.25, 0.0, 1.0));
        let cfg = DefectConfig { n_trunc: 16, n_samples: 4, ..DefectConfig::default() };
        let r = run_defect_suite(&phi, Which::Direct, &cfg).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        let mut expected = vec![
            "map", "which", "n_trunc", "n_samples", "r_sample", "seed", "max_abs_closed_form",
            "max_abs_matrix_route", "lemma4_residual", "excluded_samples", "verdict",
        ];
        expected.sort();
        let mut keys = keys;
        keys.sort();
        assert_eq!(keys, expected);
        assert_eq!(v["verdict"], "not_two_cs_with_J");
        assert_eq!(v["which"], "direct");
        assert_eq!(v["map"], "0.5,0.25,0,1");
        assert_eq!(v["lemma4_residual"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn complex_symmetric_implies_two_complex_symmetric_for_dilations() {
        for a in [c(0.5, 0.0), c(0.3, 0.4), c(0.0, -0.8)] {
            let m = composition_matrix(&SelfMap::Moebius(MoebiusMap::new(a, c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap()), 32)
                .unwrap();
            if defect_matrix_m(&m, 1).max_abs() < 1e-12 {
                assert!(defect_matrix_m(&m, 2).max_abs() < 1e-12);
            }
        }
    }
}
