//! Verification suites behind `opsym verify`.
//!
//! * `lemma2`: closed-form kernel actions against truncated matrices.
//! * `cowen`: `C_φ* = T_g C_σ T_h*` on kernel vectors.
//! * `lemma5`: `C_φ = C_ξ* T_τ*` on kernel vectors, for `c = 0`.
//! * `symbolic`: exact vanishing of the defect on the Gaussian-rational catalog.
//! * `lemma4`: the probe `F_0(1/2)` against `2φ₂(0) − 4φ(0) + φ(0)φ₂(0)`,
//!   and its vanishing on maps measured as 2-complex symmetric.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classify::Case;
use crate::hardy::{kernel_vector, HardyVector, KernelPoint};
use crate::moebius::{MoebiusError, MoebiusMap, SelfMap};
use crate::msym::{kernel_terms, lemma4_residual, run_defect_suite, DefectConfig, MatrixRoute, MsymError, Which};
use crate::opmat::{adjoint, composition_matrix, toeplitz_of_fraction, OpMatError};
use crate::scalar::ComplexScalar;
use crate::sweep::{random_interior_map, random_self_map, SweepError};
use crate::symbolic::{catalog, defect_rational, is_zero, SymbolicError};

pub const VERIFY_TRUNCATION: usize = 128;
pub const TOL_FACTORIZATION: f64 = 1e-6;
pub const TOL_LEMMA4: f64 = 1e-9;
pub const TOL_PROBE_IDENTITY: f64 = 1e-12;
/// Largest `|φ|` on the circle for randomly drawn verification maps.
pub const MAP_MARGIN: f64 = 0.95;
pub const VERIFY_SEED: u64 = 2024;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Defect(#[from] MsymError),
    #[error(transparent)]
    Matrix(#[from] OpMatError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    KernelActions,
    Cowen,
    TriangularFactor,
    Symbolic,
    OriginProbe,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::KernelActions, Suite::Cowen, Suite::TriangularFactor, Suite::Symbolic, Suite::OriginProbe];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::KernelActions => "lemma2",
            Suite::Cowen => "cowen",
            Suite::TriangularFactor => "lemma5",
            Suite::Symbolic => "symbolic",
            Suite::OriginProbe => "lemma4",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skip => "SKIP",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub suite: Suite,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub status: Status,
    pub note: Option<String>,
}

impl CheckOutcome {
    fn measured(suite: Suite, name: String, residual: f64, tolerance: f64) -> Self {
        let status = if residual < tolerance { Status::Pass } else { Status::Fail };
        Self { suite, name, residual, tolerance, status, note: None }
    }

    fn skipped(suite: Suite, name: String, note: &str) -> Self {
        Self { suite, name, residual: 0.0, tolerance: 0.0, status: Status::Skip, note: Some(note.to_string()) }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = Some(note);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.status, self.suite, self.name)?;
        if self.status != Status::Skip {
            write!(f, " residual={:.3e} tol={:.0e}", self.residual, self.tolerance)?;
        }
        if let Some(note) = &self.note {
            write!(f, " ({note})")?;
        }
        Ok(())
    }
}

/// `count` points with modulus at most `r`, fixed by `seed`.
pub fn sample_points(count: usize, r: f64, seed: u64) -> Vec<ComplexScalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| ComplexScalar::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect()
}

fn residual_norm(x: &HardyVector, y: &HardyVector) -> f64 {
    x.coeffs().iter().zip(y.coeffs()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Largest gap between the closed-form and matrix-route kernel actions over
/// 20 points `(w, z)` with `|w|, |z| ≤ 0.6`. Term (b) is skipped at excluded points.
pub fn kernel_actions_gap(phi: &SelfMap, n: usize) -> Result<f64, VerifyError> {
    let route = MatrixRoute::new(phi, n)?;
    let ws = sample_points(20, 0.6, VERIFY_SEED);
    let zs = sample_points(20, 0.6, VERIFY_SEED + 1);
    let mut gap = 0.0f64;
    for (&w, &z) in ws.iter().zip(&zs) {
        let m = route.terms(w, z);
        match kernel_terms(phi, w, z) {
            Ok(t) => {
                for (x, y) in [(t.a, m.a), (t.b, m.b), (t.c, m.c), (t.d, m.d)] {
                    gap = gap.max((x - y).norm());
                }
            }
            Err(MsymError::ExcludedSample) => {
                let SelfMap::Moebius(map) = phi else { continue };
                let cf = crate::msym::ClosedForms::new(map)?;
                for (x, y) in [(cf.term_a(w, z)?, m.a), (cf.term_c(w, z)?, m.c), (cf.term_d(w, z)?, m.d)] {
                    gap = gap.max((x - y).norm());
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(gap)
}

/// `max_w ‖(C_φ* − T_g C_σ T_h*) k_w‖` over 8 points with `|w| ≤ 0.7`.
pub fn cowen_residual(phi: &MoebiusMap, n: usize) -> Result<f64, VerifyError> {
    let triple = phi.cowen_triple();
    let c_star = adjoint(&composition_matrix(&SelfMap::Moebius(phi.clone()), n)?);
    let c_sigma = composition_matrix(&SelfMap::Moebius(triple.sigma), n)?;
    let t_g = toeplitz_of_fraction(&triple.g, n)?;
    let t_h_star = adjoint(&toeplitz_of_fraction(&triple.h, n)?);
    let mut worst = 0.0f64;
    for w in sample_points(8, 0.7, VERIFY_SEED + 2) {
        let k = kernel_vector(KernelPoint::new(w).expect("sample inside disk"), n);
        let lhs = c_star.apply(&k);
        let rhs = t_g.apply(&c_sigma.apply(&t_h_star.apply(&k)));
        worst = worst.max(residual_norm(&lhs, &rhs));
    }
    Ok(worst)
}

/// `max_w ‖(C_φ − C_ξ* T_τ*) k_w‖` over 8 points with `|w| ≤ 0.7`; needs `c = 0`.
pub fn triangular_residual(phi: &MoebiusMap, n: usize) -> Result<f64, VerifyError> {
    let triple = phi.lemma5_triple()?;
    let c_phi = composition_matrix(&SelfMap::Moebius(phi.clone()), n)?;
    let c_xi_star = adjoint(&composition_matrix(&SelfMap::Moebius(triple.xi), n)?);
    let t_tau_star = adjoint(&toeplitz_of_fraction(&triple.tau, n)?);
    let mut worst = 0.0f64;
    for w in sample_points(8, 0.7, VERIFY_SEED + 3) {
        let k = kernel_vector(KernelPoint::new(w).expect("sample inside disk"), n);
        let lhs = c_phi.apply(&k);
        let rhs = c_xi_star.apply(&t_tau_star.apply(&k));
        worst = worst.max(residual_norm(&lhs, &rhs));
    }
    Ok(worst)
}

const NON_CONSTANT: [Case; 5] =
    [Case::Automorphism, Case::FixesOrigin, Case::UpperTriangularC0, Case::AZeroNonzeroAt0, Case::GenericNonzero];

fn random_maps(count: usize, cases: &[Case], seed: u64) -> Result<Vec<MoebiusMap>, VerifyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        // Automorphisms touch the circle, so they cannot meet the margin.
        let case = cases[i % cases.len()];
        if case == Case::Automorphism {
            if let SelfMap::Moebius(m) = random_self_map(&mut rng, case)? {
                out.push(m);
            }
        } else {
            out.push(random_interior_map(&mut rng, &[case], MAP_MARGIN)?);
        }
    }
    Ok(out)
}

fn kernel_actions_suite(maps: &[SelfMap]) -> Result<Vec<CheckOutcome>, VerifyError> {
    maps.iter()
        .map(|phi| {
            let name = phi.to_string();
            if matches!(phi, SelfMap::Constant(_)) {
                return Ok(CheckOutcome::skipped(Suite::KernelActions, name, "requires a nondegenerate linear-fractional map"));
            }
            let gap = kernel_actions_gap(phi, VERIFY_TRUNCATION)?;
            Ok(CheckOutcome::measured(Suite::KernelActions, name, gap, TOL_FACTORIZATION))
        })
        .collect()
}

fn cowen_suite(maps: &[SelfMap]) -> Result<Vec<CheckOutcome>, VerifyError> {
    maps.iter()
        .map(|phi| {
            let name = phi.to_string();
            match phi {
                SelfMap::Constant(_) => Ok(CheckOutcome::skipped(Suite::Cowen, name, "requires a nondegenerate linear-fractional map")),
                SelfMap::Moebius(m) => {
                    Ok(CheckOutcome::measured(Suite::Cowen, name, cowen_residual(m, VERIFY_TRUNCATION)?, TOL_FACTORIZATION))
                }
            }
        })
        .collect()
}

fn triangular_suite(maps: &[SelfMap]) -> Result<Vec<CheckOutcome>, VerifyError> {
    maps.iter()
        .map(|phi| {
            let name = phi.to_string();
            match phi {
                SelfMap::Moebius(m) if m.normalized().c().norm() == 0.0 => Ok(CheckOutcome::measured(
                    Suite::TriangularFactor,
                    name,
                    triangular_residual(m, VERIFY_TRUNCATION)?,
                    TOL_FACTORIZATION,
                )),
                _ => Ok(CheckOutcome::skipped(Suite::TriangularFactor, name, "requires c = 0")),
            }
        })
        .collect()
}

fn symbolic_suite(map: Option<&SelfMap>) -> Result<Vec<CheckOutcome>, VerifyError> {
    let entries: Vec<(String, crate::moebius::ExactMoebius, bool)> = match map {
        None => catalog().into_iter().map(|e| (e.label.to_string(), e.map, e.is_dilation)).collect(),
        Some(SelfMap::Constant(_)) => {
            return Ok(vec![CheckOutcome::skipped(Suite::Symbolic, map.unwrap().to_string(), "constant maps have no exact form here")])
        }
        Some(phi @ SelfMap::Moebius(m)) => vec![(phi.to_string(), m.to_exact()?, crate::classify::is_normal(phi))],
    };
    let mut out = Vec::new();
    for (label, exact, expect_zero) in entries {
        let mut wrong = Vec::new();
        for which in [Which::Direct, Which::Adjoint] {
            let f = defect_rational(&exact, which)?;
            if is_zero(&f) != expect_zero {
                wrong.push(if expect_zero {
                    format!("{which} numerator {}", f.num())
                } else {
                    format!("{which} defect vanishes identically")
                });
            }
        }
        let check = CheckOutcome::measured(Suite::Symbolic, label, wrong.len() as f64, 0.5);
        let note = if expect_zero { "exact, expected F = 0" } else { "exact, expected F != 0" };
        out.push(if wrong.is_empty() { check.with_note(note.to_string()) } else { check.with_note(wrong.join("; ")) });
    }
    Ok(out)
}

fn origin_probe_suite(maps: &[SelfMap]) -> Result<Vec<CheckOutcome>, VerifyError> {
    let mut out = Vec::new();
    let (w0, z0) = (ComplexScalar::new(0.0, 0.0), ComplexScalar::new(0.5, 0.0));
    for phi in maps {
        let name = phi.to_string();
        let residual = lemma4_residual(phi)?;
        let (p, q) = phi.origin_orbit()?;
        let two = ComplexScalar::new(2.0, 0.0);
        // (2 − p̄)(2 − q̄) F_0(1/2) = conj(2q − 4p + pq)
        let probe = kernel_terms(phi, w0, z0)?.direct();
        let scaled = (two - p.conj()) * (two - q.conj()) * probe;
        let identity_gap = (scaled - residual.conj()).norm();
        out.push(CheckOutcome::measured(Suite::OriginProbe, format!("{name} probe identity"), identity_gap, TOL_PROBE_IDENTITY));

        let report = run_defect_suite(phi, Which::Direct, &DefectConfig::default())?;
        if report.verdict.is_two_cs() {
            out.push(CheckOutcome::measured(Suite::OriginProbe, format!("{name} necessity"), residual.norm(), TOL_LEMMA4));
        } else {
            out.push(
                CheckOutcome::skipped(Suite::OriginProbe, format!("{name} necessity"), "not 2-complex symmetric, condition not required")
                    .with_note(format!("not 2-complex symmetric, |residual| = {:.3e}", residual.norm())),
            );
        }
    }
    Ok(out)
}

fn default_probe_maps() -> Result<Vec<SelfMap>, VerifyError> {
    let mut maps: Vec<SelfMap> = [
        ComplexScalar::new(0.0, 0.0),
        ComplexScalar::new(0.5, 0.0),
        ComplexScalar::new(-0.9, 0.0),
        ComplexScalar::new(0.3, 0.4),
        ComplexScalar::new(0.0, 0.99),
    ]
    .into_iter()
    .map(|a| SelfMap::from_coefficients(a, ComplexScalar::new(0.0, 0.0), ComplexScalar::new(0.0, 0.0), ComplexScalar::new(1.0, 0.0)))
    .map(|m| m.map_err(VerifyError::from))
    .collect::<Result<_, _>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(VERIFY_SEED + 4);
    for case in Case::ALL {
        maps.push(random_self_map(&mut rng, case)?);
        maps.push(random_self_map(&mut rng, case)?);
    }
    Ok(maps)
}

/// Runs `suite` on `map`, or on the suite's default map set when `map` is `None`.
pub fn run_suite(suite: Suite, map: Option<&SelfMap>) -> Result<Vec<CheckOutcome>, VerifyError> {
    let given = |defaults: &dyn Fn() -> Result<Vec<SelfMap>, VerifyError>| match map {
        Some(m) => Ok(vec![m.clone()]),
        None => defaults(),
    };
    let random = |count, cases: &'static [Case], seed| {
        move || Ok(random_maps(count, cases, seed)?.into_iter().map(SelfMap::Moebius).collect())
    };
    match suite {
        Suite::KernelActions => kernel_actions_suite(&given(&random(20, &NON_CONSTANT, VERIFY_SEED))?),
        Suite::Cowen => cowen_suite(&given(&random(20, &NON_CONSTANT, VERIFY_SEED + 10))?),
        Suite::TriangularFactor => triangular_suite(&given(&random(10, &[Case::UpperTriangularC0], VERIFY_SEED + 20))?),
        Suite::Symbolic => symbolic_suite(map),
        Suite::OriginProbe => origin_probe_suite(&given(&default_probe_maps)?),
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, map)?);
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(s: &str) -> SelfMap {
        s.parse().unwrap()
    }

    fn all_pass(checks: &[CheckOutcome]) -> bool {
        checks.iter().all(CheckOutcome::passed)
    }

    #[test]
    fn cowen_example() {
        let checks = run_suite(Suite::Cowen, Some(&map("0.3,0.2,0.2,1"))).unwrap();
        assert_eq!(checks.len(), 1);
        assert_eq!(checks[0].status, Status::Pass, "{}", checks[0]);
        assert!(checks[0].residual < 1e-6);
    }

    #[test]
    fn constant_is_skipped_for_kernel_actions() {
        let checks = run_suite(Suite::KernelActions, Some(&map("const:0.25"))).unwrap();
        assert_eq!(checks[0].status, Status::Skip);
        assert!(checks[0].to_string().starts_with("SKIP lemma2"));
    }

    #[test]
    fn symbolic_catalog_is_classified_exactly() {
        let checks = run_suite(Suite::Symbolic, None).unwrap();
        assert_eq!(checks.len(), 12);
        assert!(all_pass(&checks));
    }

    #[test]
    fn triangular_factor_on_affine_map() {
        let checks = run_suite(Suite::TriangularFactor, Some(&map("0.5,0.25,0,1"))).unwrap();
        assert_eq!(checks[0].status, Status::Pass, "{}", checks[0]);
        let skipped = run_suite(Suite::TriangularFactor, Some(&map("0.3,0.2,0.2,1"))).unwrap();
        assert_eq!(skipped[0].status, Status::Skip);
    }

    #[test]
    fn kernel_actions_on_generic_map() {
        let checks = run_suite(Suite::KernelActions, Some(&map("0.3,0.2,0.2,1"))).unwrap();
        assert_eq!(checks[0].status, Status::Pass, "{}", checks[0]);
    }

    #[test]
    fn origin_probe_on_examples() {
        let checks = run_suite(Suite::OriginProbe, Some(&map("0.5,0.25,0,1"))).unwrap();
        assert!(all_pass(&checks), "{checks:?}");
        let checks = run_suite(Suite::OriginProbe, Some(&map("0.5,0,0,1"))).unwrap();
        assert!(checks.iter().all(|c| c.status == Status::Pass), "{checks:?}");
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::EACH.into_iter().chain([Suite::All]) {
            assert_eq!(s.as_str().parse::<Suite>().unwrap(), s);
        }
        assert!("lemma9".parse::<Suite>().is_err());
    }
}
