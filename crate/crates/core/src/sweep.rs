//! Seeded random sweeps over all six classification cases.
//!
//! Each map is drawn by first choosing a case uniformly (or the requested
//! one) and then drawing coefficients for that case, rejecting candidates
//! that are not self-maps of the disk.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::classify::{classify_with, Case, ClassifyError};
use crate::moebius::{MoebiusError, MoebiusMap, SelfMap};
use crate::msym::{lemma4_residual, run_defect_suite, DefectConfig, MsymError, Verdict, Which};
use crate::scalar::ComplexScalar;

pub const MAX_REJECTIONS: usize = 1000;

pub const SWEEP_CSV_HEADER: &str = "a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im,which,max_defect,lemma4_abs,verdict,case";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("no self-map found for case {0} after {MAX_REJECTIONS} draws")]
    RejectionCap(Case),
    #[error(transparent)]
    Moebius(#[from] MoebiusError),
    #[error(transparent)]
    Defect(#[from] MsymError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub count: usize,
    pub seed: u64,
    pub case: Option<Case>,
    pub which: Which,
    pub defect: DefectConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { count: 100, seed: 0, case: None, which: Which::Direct, defect: DefectConfig::default() }
    }
}

/// One measured map. `verdict` comes from the defect suite; the classifier's
/// answer is kept alongside for agreement checks.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub index: usize,
    pub map: SelfMap,
    pub which: Which,
    pub max_defect: f64,
    pub lemma4_abs: f64,
    pub verdict: Verdict,
    pub case: Case,
    pub classifier_verdict: Verdict,
    pub is_normal: bool,
}

impl SweepRow {
    pub fn csv_line(&self) -> String {
        let mut fields: Vec<String> = self
            .map
            .coefficients()
            .iter()
            .flat_map(|z| [(z.re + 0.0).to_string(), (z.im + 0.0).to_string()])
            .collect();
        fields.push(self.which.to_string());
        fields.push(self.max_defect.to_string());
        fields.push(self.lemma4_abs.to_string());
        fields.push(self.verdict.to_string());
        fields.push(self.case.to_string());
        fields.join(",")
    }
}

fn disk_point(rng: &mut ChaCha8Rng, r: f64) -> ComplexScalar {
    ComplexScalar::from_polar(r * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn nonzero_disk_point(rng: &mut ChaCha8Rng, r: f64) -> ComplexScalar {
    loop {
        let z = disk_point(rng, r);
        if z.norm() > 1e-3 {
            return z;
        }
    }
}

/// Raw `a, b, c, d` for one candidate of `case`, with `d = 1`.
fn candidate(rng: &mut ChaCha8Rng, case: Case) -> [ComplexScalar; 4] {
    let zero = ComplexScalar::new(0.0, 0.0);
    let one = ComplexScalar::new(1.0, 0.0);
    match case {
        Case::Automorphism => {
            let lambda = ComplexScalar::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
            // Rotations are the normal automorphisms; keep some of them.
            let a = if rng.gen_bool(0.2) { zero } else { nonzero_disk_point(rng, 0.9) };
            [-lambda, lambda * a, -a.conj(), one]
        }
        Case::FixesOrigin => {
            let c = if rng.gen_bool(0.3) { zero } else { nonzero_disk_point(rng, 1.0) };
            [nonzero_disk_point(rng, 1.0), zero, c, one]
        }
        Case::UpperTriangularC0 => [nonzero_disk_point(rng, 1.0), nonzero_disk_point(rng, 1.0), zero, one],
        Case::AZeroNonzeroAt0 => [zero, nonzero_disk_point(rng, 1.0), nonzero_disk_point(rng, 1.0), one],
        Case::GenericNonzero => [nonzero_disk_point(rng, 1.0), nonzero_disk_point(rng, 1.0), nonzero_disk_point(rng, 1.0), one],
        Case::Constant => {
            let v = if rng.gen_bool(0.2) { zero } else { nonzero_disk_point(rng, 0.95) };
            [zero, v, zero, one]
        }
    }
}

/// A random self-map of the requested case.
pub fn random_self_map(rng: &mut ChaCha8Rng, case: Case) -> Result<SelfMap, SweepError> {
    for _ in 0..MAX_REJECTIONS {
        let [a, b, c, d] = candidate(rng, case);
        if case == Case::Constant {
            return Ok(SelfMap::constant(b)?);
        }
        let Ok(m) = MoebiusMap::new(a, b, c, d) else { continue };
        if m.is_disk_self_map() {
            return Ok(SelfMap::Moebius(m));
        }
    }
    Err(SweepError::RejectionCap(case))
}

/// A random non-constant self-map whose image stays inside `|z| ≤ margin`,
/// for checks whose truncation error grows near the boundary.
pub fn random_interior_map(rng: &mut ChaCha8Rng, cases: &[Case], margin: f64) -> Result<MoebiusMap, SweepError> {
    for _ in 0..MAX_REJECTIONS {
        let case = cases[rng.gen_range(0..cases.len())];
        if let SelfMap::Moebius(m) = random_self_map(rng, case)? {
            if m.boundary_sup(256) <= margin {
                return Ok(m);
            }
        }
    }
    Err(SweepError::RejectionCap(cases[0]))
}

/// The `count` maps of a sweep, without measuring them.
pub fn sweep_maps(cfg: &SweepConfig) -> Result<Vec<SelfMap>, SweepError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.count)
        .map(|_| {
            let case = cfg.case.unwrap_or_else(|| Case::ALL[rng.gen_range(0..Case::ALL.len())]);
            random_self_map(&mut rng, case)
        })
        .collect()
}

pub fn measure(index: usize, phi: &SelfMap, which: Which, defect: &DefectConfig) -> Result<SweepRow, SweepError> {
    let report = run_defect_suite(phi, which, defect)?;
    let class = classify_with(phi, which, defect)?;
    Ok(SweepRow {
        index,
        map: phi.clone(),
        which,
        max_defect: report.max_abs_closed_form,
        lemma4_abs: lemma4_residual(phi)?.norm(),
        verdict: report.verdict,
        case: class.case,
        classifier_verdict: class.verdict,
        is_normal: class.is_normal,
    })
}

/// Rows in sweep order. Map `i` is measured with defect seed `seed + i`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>, SweepError> {
    sweep_maps(cfg)?
        .iter()
        .enumerate()
        .map(|(i, phi)| {
            let defect = DefectConfig { seed: cfg.seed.wrapping_add(i as u64), ..cfg.defect.clone() };
            measure(i, phi, cfg.which, &defect)
        })
        .collect()
}
