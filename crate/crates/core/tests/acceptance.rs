//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::process::ExitCode;

use opsym_core::hardy::{apply_j, inner_product, HardyVector};
use opsym_core::msym::{defect_matrix_m, kernel_terms, MatrixRoute};
use opsym_core::opmat::{composition_matrix, operator_norm_estimate};
use opsym_core::sweep::{run_sweep, SweepConfig, SweepRow};
use opsym_core::symbolic::{catalog, defect_rational, is_zero};
use opsym_core::verify::{run_suite, CheckOutcome, Suite};
use opsym_core::{run_defect_suite, ComplexScalar, DefectConfig, SelfMap, Verdict, Which};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> ComplexScalar {
    ComplexScalar::new(re, im)
}

fn dilation(a: ComplexScalar) -> SelfMap {
    SelfMap::from_coefficients(a, c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)).unwrap()
}

fn dilation_coefficients() -> [ComplexScalar; 5] {
    [c(0.0, 0.0), c(0.5, 0.0), c(-0.9, 0.0), c(0.3, 0.4), c(0.0, 0.99)]
}

fn dilation_soundness() -> Outcome {
    let cfg = DefectConfig::default();
    let mut worst = 0.0f64;
    for a in dilation_coefficients() {
        let phi = dilation(a);
        for which in [Which::Direct, Which::Adjoint] {
            let r = run_defect_suite(&phi, which, &cfg).map_err(|e| e.to_string())?;
            if r.n_samples != 200 || r.max_abs_closed_form >= 1e-12 || r.verdict != Verdict::TwoCsWithJ {
                return Err(format!("{phi} {which}: max |F| = {:.3e}, {}", r.max_abs_closed_form, r.verdict));
            }
            worst = worst.max(r.max_abs_closed_form);
        }
    }
    Ok(format!("5 dilations x 2 operators two_cs_with_J, max |F| = {worst:.1e}"))
}

fn non_dilation_completeness() -> Outcome {
    let maps = ["-1,0.5,-0.5,1", "1,0,0.3,1.5", "0.5,0.25,0,1", "0,1,0.4,2", "0.3,0.2,0.2,1", "const:0.25"];
    let cfg = DefectConfig::default();
    let mut least = f64::INFINITY;
    for s in maps {
        let phi: SelfMap = s.parse().unwrap();
        for which in [Which::Direct, Which::Adjoint] {
            let r = run_defect_suite(&phi, which, &cfg).map_err(|e| e.to_string())?;
            if r.max_abs_closed_form <= 1e-3 || r.verdict != Verdict::NotTwoCsWithJ {
                return Err(format!("{s} {which}: max |F| = {:.3e}, {}", r.max_abs_closed_form, r.verdict));
            }
            least = least.min(r.max_abs_closed_form);
        }
    }
    let phi: SelfMap = "0.5,0.25,0,1".parse().unwrap();
    let (w, z) = (c(0.0, 0.0), c(0.5, 0.0));
    let closed = kernel_terms(&phi, w, z).map_err(|e| e.to_string())?.direct();
    let matrix = MatrixRoute::new(&phi, 128).map_err(|e| e.to_string())?.terms(w, z).direct();
    let expected = c(-5.0 / 91.0, 0.0);
    let gap = (closed - expected).norm().max((matrix - expected).norm());
    if gap >= 1e-12 {
        return Err(format!("F_0(1/2) = {closed}, matrix route {matrix}, expected -5/91"));
    }
    Ok(format!("6 maps x 2 operators not_two_cs_with_J, min max |F| = {least:.3}; F_0(1/2) = -5/91 within {gap:.1e}"))
}

fn suite_outcome(suites: &[(Suite, &str, usize)]) -> Outcome {
    let mut parts = Vec::new();
    for &(suite, label, count) in suites {
        let checks = run_suite(suite, None).map_err(|e| e.to_string())?;
        if let Some(bad) = checks.iter().find(|c| !c.passed()) {
            return Err(bad.to_string());
        }
        let measured: Vec<&CheckOutcome> = checks.iter().filter(|c| c.status == opsym_core::verify::Status::Pass).collect();
        if measured.len() != count {
            return Err(format!("{label}: {} maps measured, expected {count}", measured.len()));
        }
        let worst = measured.iter().map(|c| c.residual).fold(0.0, f64::max);
        parts.push(format!("{label} {count} maps max residual {worst:.1e}"));
    }
    Ok(parts.join(", "))
}

fn exact_classification() -> Outcome {
    let entries = catalog();
    let mut zero = Vec::new();
    for e in &entries {
        let direct = is_zero(&defect_rational(&e.map, Which::Direct).map_err(|x| x.to_string())?);
        let adjoint = is_zero(&defect_rational(&e.map, Which::Adjoint).map_err(|x| x.to_string())?);
        if direct != e.is_dilation || adjoint != e.is_dilation {
            return Err(format!("{}: direct zero {direct}, adjoint zero {adjoint}", e.label));
        }
        if direct {
            zero.push(e.label);
        }
    }
    if entries.len() != 12 || zero.len() != 3 {
        return Err(format!("{} entries, {} vanishing", entries.len(), zero.len()));
    }
    Ok(format!("12 maps, F = 0 exactly for {}", zero.join(", ")))
}

fn necessity(rows: &[SweepRow]) -> Outcome {
    let two_cs: Vec<&SweepRow> = rows.iter().filter(|r| r.verdict.is_two_cs()).collect();
    if let Some(r) = two_cs.iter().find(|r| r.lemma4_abs >= 1e-9) {
        return Err(format!("counterexample {} with |residual| = {:.3e}", r.map, r.lemma4_abs));
    }
    let worst = two_cs.iter().map(|r| r.lemma4_abs).fold(0.0, f64::max);
    Ok(format!("{} of {} maps two_cs_with_J, max |2q - 4p + pq| = {worst:.1e}", two_cs.len(), rows.len()))
}

fn agreement(rows: &[SweepRow]) -> Outcome {
    for r in rows {
        if r.classifier_verdict != r.verdict {
            return Err(format!("{}: measured {}, classified {}", r.map, r.verdict, r.classifier_verdict));
        }
        if r.verdict.is_two_cs() != r.is_normal {
            return Err(format!("{}: {} but is_normal = {}", r.map, r.verdict, r.is_normal));
        }
    }
    Ok(format!("{} maps, classifier = measurement and verdict <=> is_normal", rows.len()))
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize) -> HardyVector {
    HardyVector::from_coeffs((0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
}

fn conjugation_axioms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let diff = |x: &HardyVector, y: &HardyVector| x.coeffs().iter().zip(y.coeffs()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    let mut worst = [0.0f64; 3];
    for _ in 0..1000 {
        let n = rng.gen_range(1..=64);
        let (f, g) = (random_vector(&mut rng, n), random_vector(&mut rng, n));
        let (alpha, beta) = (c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)), c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)));

        worst[0] = worst[0].max(diff(&apply_j(&apply_j(&f)), &f));

        let lhs = inner_product(&apply_j(&f), &apply_j(&g)).unwrap();
        let rhs = inner_product(&g, &f).unwrap();
        worst[1] = worst[1].max((lhs - rhs).norm()).max((apply_j(&f).norm() - f.norm()).abs());

        let combo = HardyVector::from_coeffs(f.coeffs().iter().zip(g.coeffs()).map(|(x, y)| alpha * x + beta * y).collect());
        let expected =
            HardyVector::from_coeffs(apply_j(&f).coeffs().iter().zip(apply_j(&g).coeffs()).map(|(x, y)| alpha.conj() * x + beta.conj() * y).collect());
        worst[2] = worst[2].max(diff(&apply_j(&combo), &expected));
    }
    if worst.iter().any(|&w| w >= 1e-13) {
        return Err(format!("involution {:.1e}, isometry {:.1e}, antilinearity {:.1e}", worst[0], worst[1], worst[2]));
    }
    Ok(format!("1000 vectors, involution {:.1e}, isometry {:.1e}, antilinearity {:.1e}", worst[0], worst[1], worst[2]))
}

fn m_chain() -> Outcome {
    let mut worst = 0.0f64;
    for a in dilation_coefficients() {
        let m = composition_matrix(&dilation(a), 64).map_err(|e| e.to_string())?;
        for order in [1, 2] {
            let d = defect_matrix_m(&m, order);
            let norm = operator_norm_estimate(&d).value.max(d.max_abs());
            if norm >= 1e-12 {
                return Err(format!("a = {a}: defect_{order} norm {norm:.3e}"));
            }
            worst = worst.max(norm);
        }
    }
    Ok(format!("5 dilations at N = 64, max defect norm for m = 1, 2: {worst:.1e}"))
}

fn main() -> ExitCode {
    let rows = run_sweep(&SweepConfig { count: 500, seed: 7, ..SweepConfig::default() });
    let sweep = |f: fn(&[SweepRow]) -> Outcome| match &rows {
        Ok(rows) => f(rows),
        Err(e) => Err(format!("sweep failed: {e}")),
    };

    let results: Vec<(&str, Outcome)> = vec![
        ("dilation soundness", dilation_soundness()),
        ("non-dilation completeness", non_dilation_completeness()),
        ("kernel action cross-validation", suite_outcome(&[(Suite::KernelActions, "kernel actions", 20)])),
        ("Cowen and triangular factorizations", suite_outcome(&[(Suite::Cowen, "Cowen", 20), (Suite::TriangularFactor, "c = 0 factorization", 10)])),
        ("exact classification", exact_classification()),
        ("origin probe necessity", sweep(necessity)),
        ("classifier agreement", sweep(agreement)),
        ("conjugation axioms", conjugation_axioms()),
        ("m-chain on dilations", m_chain()),
    ];

    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
