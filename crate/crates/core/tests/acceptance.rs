//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::process::ExitCode;
use std::time::Instant;

use freeprod::compress::build_isometry;
use freeprod::example_gns::{build_default, verify_noncyclic, verify_v_onto};
use freeprod::freerep::{freeness_report, moment, state_restriction_residual};
use freeprod::oracle::DenseSpace;
use freeprod::rng::{instance_rng, random_centered_unit};
use freeprod::verify::{
    default_polys, depth_stability, faithfulness_suite, lemma_suite, random_alternating, vav_suite, LemmaSuiteOptions,
};
use freeprod::{BlockAlgebra, CMat, FreeFockSpace, GnsSpace, Result, StateSpec, Tolerances, C64};

fn tol() -> Tolerances {
    Tolerances::default()
}

fn diagonal(label: &str, blocks: Vec<usize>, weights: &[Vec<f64>]) -> GnsSpace {
    let alg = BlockAlgebra::new(label, blocks).unwrap();
    GnsSpace::construct(&StateSpec::diagonal(&alg, weights, &tol()).unwrap(), &tol()).unwrap()
}

fn c2(label: &str, p: f64) -> GnsSpace {
    diagonal(label, vec![1, 1], &[vec![p], vec![1.0 - p]])
}

/// `M₂` with a non-tracial faithful density having off-diagonal terms.
fn m2(label: &str) -> GnsSpace {
    let alg = BlockAlgebra::new(label, vec![2]).unwrap();
    let rho = CMat::from_row_slice(
        2,
        2,
        &[C64::new(0.65, 0.0), C64::new(0.1, 0.05), C64::new(0.1, -0.05), C64::new(0.35, 0.0)],
    );
    GnsSpace::construct(&StateSpec::new(&alg, vec![rho], &tol()).unwrap(), &tol()).unwrap()
}

fn c3(label: &str) -> GnsSpace {
    diagonal(label, vec![1, 1, 1], &[vec![0.2], vec![0.5], vec![0.3]])
}

type Outcome = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Outcome);

fn freeness() -> Outcome {
    let two = FreeFockSpace::build(vec![c2("p", 0.3), m2("m")], 6)?;
    let three = FreeFockSpace::build(vec![c2("p", 0.3), m2("m"), c2("q", 0.6)], 6)?;
    let a = freeness_report(&two, 6, tol().free)?;
    let b = freeness_report(&three, 6, tol().free)?;
    Ok((
        a.passed && b.passed && a.tested_words == a.expected_words && b.tested_words == b.expected_words,
        format!(
            "two factors: {} words, max {:.1e}; three factors: {} words, max {:.1e}",
            a.tested_words, a.max_residual, b.tested_words, b.max_residual
        ),
    ))
}

fn restriction() -> Outcome {
    let s = FreeFockSpace::build(vec![c2("p", 0.3), m2("m"), c3("c")], 3)?;
    let r = state_restriction_residual(&s)?;
    Ok((r < 1e-12, format!("max |φ(λ(u)) − φ_ι(u)| = {r:.1e}")))
}

fn lemma_space() -> Result<FreeFockSpace> {
    FreeFockSpace::build(vec![c2("p", 0.3), m2("m"), c3("c")], 5)
}

fn lemma() -> Outcome {
    let s = lemma_space()?;
    let r = lemma_suite(&s, &LemmaSuiteOptions { instances: 200, seed: 7, max_n: 3, with_oracle: true }, &tol())?;
    let c = &r.branch_counts;
    Ok((
        r.passed && c.scalar_identity > 0 && c.scalar_target > 0 && c.zero > 0,
        format!(
            "{} instances (identity {}, target {}, zero {}), closed vs oracle {:.1e} over {} checked, closed vs direct {:.1e}, zero-branch norm {:.1e}",
            r.instances,
            c.scalar_identity,
            c.scalar_target,
            c.zero,
            r.max_closed_vs_oracle.unwrap_or(f64::NAN),
            r.oracle_checked,
            r.max_closed_vs_direct,
            r.max_zero_norm
        ),
    ))
}

fn isometry() -> Outcome {
    let s = lemma_space()?;
    let mut worst = 0.0f64;
    let mut worst_oracle = 0.0f64;
    let mut built = 0;
    for i in 0..60u64 {
        let mut rng = instance_rng(11, i);
        let n = 1 + (i as usize % s.depth());
        let iotas = random_alternating(n, s.factors().len(), &mut rng).unwrap();
        let zetas: Vec<_> = iotas[..n - 1]
            .iter()
            .map(|&f| random_centered_unit(s.factors()[f].dim(), &mut rng))
            .collect();
        let v = build_isometry(&s, iotas.clone(), zetas.clone())?;
        worst = worst.max(v.isometry_defect());
        if n <= 3 {
            let o = DenseSpace::new(&s, &[0, 1, 2], n)?;
            let dv = o.dense_isometry(&iotas, &zetas)?;
            let d = dv.ncols();
            worst_oracle = worst_oracle.max((dv.adjoint() * &dv - CMat::identity(d, d)).norm());
        }
        built += 1;
    }
    let lemma = lemma_suite(&s, &LemmaSuiteOptions { instances: 200, seed: 7, max_n: 3, with_oracle: false }, &tol())?;
    let vav = vav_suite(&FreeFockSpace::build(vec![c2("p", 0.3), m2("m")], 4)?, 2, 20, 0, 5, &tol())?;
    worst = worst.max(lemma.max_isometry_defect).max(vav.max_isometry_defect);
    Ok((
        worst < 1e-12 && worst_oracle < 1e-12,
        format!("{built} direct + 220 suite isometries, max ‖V*V − I‖ = {worst:.1e} (oracle {worst_oracle:.1e})"),
    ))
}

fn vav() -> Outcome {
    let two = FreeFockSpace::build(vec![c2("p", 0.3), m2("m")], 4)?;
    let three = FreeFockSpace::build(vec![c2("p", 0.3), m2("m"), c3("c")], 4)?;
    let a = vav_suite(&two, 2, 20, 20, 5, &tol())?;
    let b = vav_suite(&three, 2, 20, 20, 6, &tol())?;
    Ok((
        a.passed && b.passed,
        format!(
            "n = 2, N = 4: recovery {:.1e} / {:.1e}, containment {:.1e} / {:.1e}",
            a.max_recovery_residual, b.max_recovery_residual, a.max_containment_residual, b.max_containment_residual
        ),
    ))
}

fn faithfulness() -> Outcome {
    let s = FreeFockSpace::build(vec![c2("p", 0.3), m2("m")], 4)?;
    let r = faithfulness_suite(&s, 100, 2, 13, true, &tol())?;
    Ok((
        r.passed,
        format!(
            "{} polynomials, min φ(x*x)/bound² = {:.2e}, Gram mismatch {:.1e}, {} witnesses, oracle residual {:.1e}",
            r.polynomials,
            r.min_ratio,
            r.max_gram_mismatch,
            r.witnesses_found,
            r.max_witness_oracle_residual.unwrap_or(f64::NAN)
        ),
    ))
}

fn pq_moments() -> Outcome {
    let s = FreeFockSpace::build(vec![c2("p", 0.5), c2("q", 0.5)], 3)?;
    let o = DenseSpace::full(&s)?;
    let polys = default_polys(&s)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, p) in polys.iter().filter(|(n, _)| n == "pq" || n == "pqp") {
        let v = moment(&s, p)?;
        let d = o.dense_moment(p)?;
        ok &= (v - C64::new(0.25, 0.0)).norm() < 1e-10 && (d - v).norm() < 1e-10;
        parts.push(format!("{name} = {:.12} (oracle {:.12})", v.re, d.re));
    }
    Ok((ok && parts.len() == 2, parts.join(", ")))
}

fn depth_exactness() -> Outcome {
    let r = depth_stability(&[c2("p", 0.3), m2("m")], 4, 12, 17)?;
    let r3 = depth_stability(&[c2("p", 0.3), m2("m"), c3("c")], 4, 6, 18)?;
    Ok((
        r.passed && r3.passed,
        format!("d ≤ N ≤ 4: max |φ_N − φ_(N+1)| = {:.1e} / {:.1e}", r.max_difference, r3.max_difference),
    ))
}

fn example() -> Outcome {
    let m = build_default(4, 0.0, &tol())?;
    let onto = verify_v_onto(&m, &tol())?;
    let nc = verify_noncyclic(&m)?;
    let images = onto
        .unit_family_residual
        .max(onto.unit_family_second_component)
        .max(onto.column_family_residual)
        .max(onto.column_family_basis_residual);
    Ok((
        images < 1e-12 && nc.orthogonality_max < 1e-12 && onto.passed && nc.passed,
        format!(
            "K = 4: image residual {images:.1e}, ⟨0⊕(1̂⊗f̂₂₁), Dξ⟩ max {:.1e} over {} commutant elements, V onto (σ_min {:.3}), orbit rank {} < {}",
            nc.orthogonality_max, nc.spanning_set_size, onto.ontoness_sigma_min, nc.orbit_rank, nc.dim_h_prime
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("freeness of alternating centered moments", freeness),
        ("state restriction", restriction),
        ("compression closed form vs oracle", lemma),
        ("isometry", isometry),
        ("compressed algebra equals the target factor", vav),
        ("faithfulness probe", faithfulness),
        ("pq and pqp moments", pq_moments),
        ("truncation exactness", depth_exactness),
        ("Toeplitz example at K = 4", example),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !ok {
            failures += 1;
        }
        println!(
            "{} criterion {} ({name}): {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
