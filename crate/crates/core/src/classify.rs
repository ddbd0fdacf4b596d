//! Case analysis for 2-complex symmetry of `C_φ` with `J`.
//!
//! Every linear-fractional self-map falls in exactly one of six cases, tried
//! in the order constant, automorphism, `φ(0) = 0`, `c = 0`, `a = 0`, generic.
//! In each case the direct operator is 2-complex symmetric exactly when it is
//! normal, i.e. `φ(z) = az` with `|a| ≤ 1`. For the adjoint, the same
//! conclusion is known in the constant, `φ(0) = 0` and `c = 0` cases; in the
//! other three the verdict is measured with [`run_defect_suite`] and tagged
//! `numeric-fallback`.

use serde::Serialize;
use thiserror::Error;

use crate::moebius::{MoebiusMap, SelfMap};
use crate::msym::{run_defect_suite, DefectConfig, MsymError, Verdict, Which};

/// Coefficient tolerance for case membership, after `d = 1` normalisation.
pub const CASE_TOLERANCE: f64 = 1e-12;

pub const TAG_NUMERIC_FALLBACK: &str = "numeric-fallback";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("symbol is not a self-map of the disk")]
    NotSelfMap,
    #[error(transparent)]
    Numeric(#[from] MsymError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    Automorphism,
    FixesOrigin,
    UpperTriangularC0,
    #[serde(rename = "a_zero_nonzero_at_0")]
    AZeroNonzeroAt0,
    GenericNonzero,
    Constant,
}

impl Case {
    pub const ALL: [Case; 6] = [
        Case::Automorphism,
        Case::FixesOrigin,
        Case::UpperTriangularC0,
        Case::AZeroNonzeroAt0,
        Case::GenericNonzero,
        Case::Constant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Case::Automorphism => "automorphism",
            Case::FixesOrigin => "fixes_origin",
            Case::UpperTriangularC0 => "upper_triangular_c0",
            Case::AZeroNonzeroAt0 => "a_zero_nonzero_at_0",
            Case::GenericNonzero => "generic_nonzero",
            Case::Constant => "constant",
        }
    }

    /// Tag of the result that settles `which` in this case, if there is one.
    fn settled_by(self, which: Which) -> Option<&'static str> {
        match (self, which) {
            (Case::Constant, _) => Some("constant-iff-zero"),
            (Case::Automorphism, Which::Direct) => Some("automorphism-iff-normal"),
            (Case::FixesOrigin, _) => Some("fixes-origin-iff-normal"),
            (Case::UpperTriangularC0, Which::Direct) => Some("affine-iff-normal"),
            (Case::UpperTriangularC0, Which::Adjoint) => Some("affine-adjoint-iff-normal"),
            (Case::AZeroNonzeroAt0, Which::Direct) => Some("a-zero-never"),
            (Case::GenericNonzero, Which::Direct) => Some("generic-never"),
            _ => None,
        }
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Case {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Case::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown case `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassificationResult {
    pub verdict: Verdict,
    pub case: Case,
    pub theorem: String,
    pub is_normal: bool,
    pub which: Which,
}

/// `φ(z) = az` with `|a| ≤ 1`, up to [`CASE_TOLERANCE`].
pub fn is_normal(phi: &SelfMap) -> bool {
    match phi {
        SelfMap::Constant(k) => k.value().norm() < CASE_TOLERANCE,
        SelfMap::Moebius(m) => {
            let n = m.normalized();
            n.b().norm() < CASE_TOLERANCE && n.c().norm() < CASE_TOLERANCE && n.a().norm() <= 1.0 + CASE_TOLERANCE
        }
    }
}

/// The case `phi` dispatches to.
pub fn case_of(phi: &SelfMap) -> Case {
    match phi {
        SelfMap::Constant(_) => Case::Constant,
        SelfMap::Moebius(m) => moebius_case(m),
    }
}

fn moebius_case(m: &MoebiusMap) -> Case {
    if m.as_automorphism().is_some() {
        return Case::Automorphism;
    }
    let n = m.normalized();
    if n.b().norm() < CASE_TOLERANCE {
        Case::FixesOrigin
    } else if n.c().norm() < CASE_TOLERANCE {
        Case::UpperTriangularC0
    } else if n.a().norm() < CASE_TOLERANCE {
        Case::AZeroNonzeroAt0
    } else {
        Case::GenericNonzero
    }
}

pub fn classify(phi: &SelfMap, which: Which) -> Result<ClassificationResult, ClassifyError> {
    classify_with(phi, which, &DefectConfig::default())
}

/// As [`classify`]; `cfg` is only used by the numeric fallback.
pub fn classify_with(phi: &SelfMap, which: Which, cfg: &DefectConfig) -> Result<ClassificationResult, ClassifyError> {
    if !phi.is_disk_self_map() {
        return Err(ClassifyError::NotSelfMap);
    }
    let case = case_of(phi);
    let normal = is_normal(phi);
    let (verdict, theorem) = match case.settled_by(which) {
        Some(tag) => (Verdict::from_bool(normal), tag.to_string()),
        None => (run_defect_suite(phi, which, cfg)?.verdict, TAG_NUMERIC_FALLBACK.to_string()),
    };
    Ok(ClassificationResult { verdict, case, theorem, is_normal: normal, which })
}
