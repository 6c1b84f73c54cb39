//! Seeded verification suites shared by the command line and the tests.
//!
//! Instance `i` of a suite run with seed `s` draws only from
//! [`instance_rng`]`(s, i)`, so reports do not depend on evaluation order.

use rand::Rng;
use serde::Serialize;

use crate::blockalg::{AlgebraElement, Tolerances};
use crate::compress::{
    build_isometry, compress_word, faithfulness_witness, lemma_value, required_depth, vav_surjectivity, GramProbe,
    LemmaBranch, WitnessVerdict,
};
use crate::error::{Error, Result};
use crate::freefock::FreeFockSpace;
use crate::freerep::{apply_to_xi, moment, Letter, NCPoly, Term};
use crate::gns::GnsSpace;
use crate::oracle::{count_dim, DenseSpace, MAX_ORACLE_DIM};
use crate::rng::{instance_rng, random_centered_unit, random_complex, random_element};
use crate::{CVec, C64};

/// Random factor sequence of length `len` with no two neighbours equal.
pub fn random_alternating(len: usize, num_factors: usize, rng: &mut impl Rng) -> Option<Vec<usize>> {
    if num_factors == 0 || (num_factors == 1 && len > 1) {
        return None;
    }
    let mut out: Vec<usize> = Vec::with_capacity(len);
    for _ in 0..len {
        let f = match out.last() {
            None => rng.random_range(0..num_factors),
            Some(&prev) => {
                let f = rng.random_range(0..num_factors - 1);
                if f >= prev {
                    f + 1
                } else {
                    f
                }
            }
        };
        out.push(f);
    }
    Some(out)
}

fn random_centered(space: &FreeFockSpace, factor: usize, rng: &mut impl Rng) -> Result<AlgebraElement> {
    let g = space.factor(factor)?;
    g.state().center(&random_element(g.algebra(), rng))
}

fn c2(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BranchCounts {
    pub scalar_identity: usize,
    pub scalar_target: usize,
    pub zero: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaSuiteReport {
    pub instances: usize,
    pub seed: u64,
    pub depth: usize,
    pub branch_counts: BranchCounts,
    pub max_isometry_defect: f64,
    /// Closed form against the exact split compression on the truncated space.
    pub max_closed_vs_direct: f64,
    /// Closed form against the dense oracle, when requested.
    pub max_closed_vs_oracle: Option<f64>,
    pub oracle_checked: usize,
    pub max_zero_norm: f64,
    pub worst_instance: usize,
    pub tolerance: f64,
    pub coverage_complete: bool,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct LemmaSuiteOptions {
    pub instances: usize,
    pub seed: u64,
    pub max_n: usize,
    pub with_oracle: bool,
}

impl Default for LemmaSuiteOptions {
    fn default() -> Self {
        Self {
            instances: 200,
            seed: 7,
            max_n: 3,
            with_oracle: true,
        }
    }
}

struct LemmaInstance {
    iotas: Vec<usize>,
    zetas: Vec<CVec>,
    letters: Vec<Letter>,
}

fn lemma_instance(space: &FreeFockSpace, max_n: usize, rng: &mut impl Rng) -> Result<LemmaInstance> {
    let nf = space.factors().len();
    let depth = space.depth();
    let n_max = if nf == 1 { 1 } else { max_n.min(depth).max(1) };
    let n = rng.random_range(1..=n_max);
    let iotas = random_alternating(n, nf, rng).expect("n = 1 when there is one factor");
    let zetas = iotas[..n - 1]
        .iter()
        .map(|&f| random_centered_unit(space.factors()[f].dim(), rng))
        .collect();
    // keep m within the exact range of the split compression
    let m_cap = (2 * n).min(2 * (depth - n) + 1);
    let ks = if rng.random_bool(0.5) {
        let p = rng.random_range(1..=n.min(m_cap.div_ceil(2)));
        let mut ks = iotas[..p].to_vec();
        ks.extend(iotas[..p - 1].iter().rev());
        ks
    } else {
        let m = if nf == 1 { 1 } else { rng.random_range(1..=m_cap) };
        random_alternating(m, nf, rng).expect("m = 1 when there is one factor")
    };
    let letters = ks
        .iter()
        .map(|&f| Ok(Letter::new(f, random_centered(space, f, rng)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaInstance { iotas, zetas, letters })
}

/// Closed form of `V* a_1 ⋯ a_m V` against direct compression (and the dense
/// oracle) on random centered instances, half of them forced into the
/// mirrored pattern so every branch is exercised.
pub fn lemma_suite(space: &FreeFockSpace, opts: &LemmaSuiteOptions, tol: &Tolerances) -> Result<LemmaSuiteReport> {
    const TOL: f64 = 1e-10;
    let dims: Vec<usize> = space.factors().iter().map(|g| g.dim()).collect();
    let mut counts = BranchCounts::default();
    let mut max_defect = 0.0f64;
    let mut max_direct = 0.0f64;
    let mut max_oracle = 0.0f64;
    let mut oracle_checked = 0;
    let mut max_zero = 0.0f64;
    let mut worst = (0.0f64, 0usize);
    for i in 0..opts.instances {
        let mut rng = instance_rng(opts.seed, i as u64);
        let inst = lemma_instance(space, opts.max_n, &mut rng)?;
        let v = build_isometry(space, inst.iotas.clone(), inst.zetas.clone())?;
        let d = v.matrix().ncols();
        max_defect = max_defect.max(v.isometry_defect());
        let case = lemma_value(&v, &inst.letters, tol)?;
        let closed = case.to_matrix(d);
        let direct = compress_word(&v, &inst.letters)?;
        let r_direct = (&closed - &direct).norm();
        max_direct = max_direct.max(r_direct);
        match case.branch() {
            LemmaBranch::ScalarIdentity { .. } => counts.scalar_identity += 1,
            LemmaBranch::ScalarTarget => counts.scalar_target += 1,
            LemmaBranch::Zero => {
                counts.zero += 1;
                max_zero = max_zero.max(direct.norm());
            }
        }
        let mut r = r_direct;
        if opts.with_oracle {
            let mut active: Vec<usize> = inst.iotas.iter().chain(inst.letters.iter().map(|l| &l.factor)).copied().collect();
            active.sort_unstable();
            active.dedup();
            let odepth = inst.iotas.len() + inst.letters.len() / 2;
            if count_dim(&dims, &active, odepth) <= MAX_ORACLE_DIM {
                let o = DenseSpace::new(space, &active, odepth)?;
                let dv = o.dense_isometry(&inst.iotas, &inst.zetas)?;
                let dense = o.dense_compress(&dv, &inst.letters)?;
                let r_oracle = (&closed - &dense).norm();
                max_oracle = max_oracle.max(r_oracle);
                r = r.max(r_oracle);
                oracle_checked += 1;
            } else {
                log::warn!("instance {i}: oracle would exceed {MAX_ORACLE_DIM} dimensions, skipped");
            }
        }
        if r > worst.0 {
            worst = (r, i);
        }
    }
    let multi = space.factors().len() > 1 && space.depth() >= 2 && opts.max_n >= 2;
    let coverage_complete = counts.scalar_target > 0 && counts.zero > 0 && (!multi || counts.scalar_identity > 0);
    let oracle_ok = !opts.with_oracle || (oracle_checked == opts.instances && max_oracle < TOL);
    Ok(LemmaSuiteReport {
        instances: opts.instances,
        seed: opts.seed,
        depth: space.depth(),
        branch_counts: counts,
        max_isometry_defect: max_defect,
        max_closed_vs_direct: max_direct,
        max_closed_vs_oracle: opts.with_oracle.then_some(max_oracle),
        oracle_checked,
        max_zero_norm: max_zero,
        worst_instance: worst.1,
        tolerance: TOL,
        coverage_complete,
        passed: max_defect < 1e-12 && max_direct < TOL && max_zero < TOL && oracle_ok && coverage_complete,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct VavSuiteReport {
    pub n: usize,
    pub depth: usize,
    pub instances: usize,
    pub samples_per_instance: usize,
    pub max_isometry_defect: f64,
    pub max_recovery_residual: f64,
    pub max_containment_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// `V* A V = A_{ι_n}` for random `ι_1, …, ι_n` and random unit `ζ_j ∈ H°_{ι_j}`.
pub fn vav_suite(
    space: &FreeFockSpace,
    n: usize,
    instances: usize,
    samples: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<VavSuiteReport> {
    const TOL: f64 = 1e-8;
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    let required = required_depth(n, 2 * n - 1);
    if required > space.depth() {
        return Err(Error::Exactness {
            degree: 2 * n - 1,
            depth: space.depth(),
            required,
        });
    }
    let nf = space.factors().len();
    let mut defect = 0.0f64;
    let mut recovery = 0.0f64;
    let mut containment = 0.0f64;
    for i in 0..instances {
        let mut rng = instance_rng(seed, i as u64);
        let iotas = random_alternating(n, nf, &mut rng)
            .ok_or_else(|| Error::Validation(format!("one factor admits no alternating word of length {n}")))?;
        let zetas = iotas[..n - 1]
            .iter()
            .map(|&f| random_centered_unit(space.factors()[f].dim(), &mut rng))
            .collect();
        let v = build_isometry(space, iotas, zetas)?;
        defect = defect.max(v.isometry_defect());
        let r = vav_surjectivity(&v, tol, samples, &mut rng, TOL)?;
        recovery = recovery.max(r.recovery_residual);
        containment = containment.max(r.containment_residual);
    }
    Ok(VavSuiteReport {
        n,
        depth: space.depth(),
        instances,
        samples_per_instance: samples,
        max_isometry_defect: defect,
        max_recovery_residual: recovery,
        max_containment_residual: containment,
        tolerance: TOL,
        passed: defect < 1e-12 && recovery < TOL && containment < TOL,
    })
}

/// Random polynomial with 1–3 terms of degree `≤ max_degree` in
/// uncentered random elements.
pub fn random_poly(space: &FreeFockSpace, max_degree: usize, rng: &mut impl Rng) -> NCPoly {
    let nf = space.factors().len();
    let terms = rng.random_range(1..=3);
    NCPoly::from_terms(
        (0..terms)
            .map(|_| {
                let len = rng.random_range(0..=max_degree);
                let factors = random_alternating(len, nf, rng).unwrap_or_else(|| vec![0; len.min(1)]);
                let letters = factors
                    .iter()
                    .map(|&f| Letter::new(f, random_element(space.factors()[f].algebra(), rng)))
                    .collect();
                Term {
                    coef: random_complex(rng),
                    letters,
                }
            })
            .collect(),
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct FaithfulnessSuiteReport {
    pub polynomials: usize,
    pub max_degree: usize,
    pub depth: usize,
    /// `min φ(x*x) / ‖x‖²_bound`.
    pub min_ratio: f64,
    /// `max |φ(x*x) − ‖xξ‖²|`.
    pub max_gram_mismatch: f64,
    pub witnesses_found: usize,
    pub max_witness_oracle_residual: Option<f64>,
    /// Number of witnesses per word length.
    pub witness_lengths: Vec<usize>,
    pub passed: bool,
}

pub fn faithfulness_suite(
    space: &FreeFockSpace,
    count: usize,
    max_degree: usize,
    seed: u64,
    with_oracle: bool,
    tol: &Tolerances,
) -> Result<FaithfulnessSuiteReport> {
    if 2 * max_degree > space.depth() {
        return Err(Error::Exactness {
            degree: 2 * max_degree,
            depth: space.depth(),
            required: 2 * max_degree,
        });
    }
    let all: Vec<usize> = (0..space.factors().len()).collect();
    let mut min_ratio = f64::INFINITY;
    let mut gram = 0.0f64;
    let mut found = 0;
    let mut oracle_res = 0.0f64;
    let mut lengths = vec![0; space.depth() + 1];
    let mut positive = true;
    for i in 0..count {
        let mut rng = instance_rng(seed, i as u64);
        let x = random_poly(space, max_degree, &mut rng);
        let bound = x.norm_bound().powi(2);
        let value = moment(space, &x.adjoint().mul(&x))?;
        let xi_norm = apply_to_xi(space, &x)?.norm_squared();
        gram = gram.max((value - C64::new(xi_norm, 0.0)).norm());
        let ratio = if bound > 0.0 { value.re / bound } else { 0.0 };
        positive &= value.re > tol.pos * bound;
        min_ratio = min_ratio.min(ratio);

        let rec = faithfulness_witness(space, &GramProbe::new(space, &x)?, tol)?;
        if rec.verdict == WitnessVerdict::Witness {
            found += 1;
            lengths[rec.word.len()] += 1;
            if with_oracle {
                let o = DenseSpace::new(space, &all, rec.word.len() + x.degree())?;
                let perm = o.permutation_to(space)?;
                let pos = perm
                    .iter()
                    .position(|&c| c == rec.coordinate)
                    .ok_or_else(|| Error::Structural("witness coordinate outside the oracle".into()))?;
                let mut eta = CVec::zeros(o.dim());
                eta[pos] = C64::new(1.0, 0.0);
                let xe = o.dense_poly(&x)? * eta;
                oracle_res = oracle_res.max((xe.norm_squared() - rec.value).abs());
            }
        }
    }
    Ok(FaithfulnessSuiteReport {
        polynomials: count,
        max_degree,
        depth: space.depth(),
        min_ratio,
        max_gram_mismatch: gram,
        witnesses_found: found,
        max_witness_oracle_residual: with_oracle.then_some(oracle_res),
        witness_lengths: lengths,
        passed: positive && gram < 1e-10 && found == count && (!with_oracle || oracle_res < 1e-10),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DepthStabilityReport {
    pub max_depth: usize,
    pub words_per_degree: usize,
    pub max_difference: f64,
    pub passed: bool,
}

/// Degree-`d` moments at depths `N` and `N + 1` for all `d ≤ N ≤ max_depth`.
pub fn depth_stability(
    factors: &[GnsSpace],
    max_depth: usize,
    words_per_degree: usize,
    seed: u64,
) -> Result<DepthStabilityReport> {
    let mut worst = 0.0f64;
    let nf = factors.len();
    for depth in 1..=max_depth {
        let lo = FreeFockSpace::build(factors.to_vec(), depth)?;
        let hi = FreeFockSpace::build(factors.to_vec(), depth + 1)?;
        for d in 0..=depth {
            for w in 0..words_per_degree {
                let mut rng = instance_rng(seed, ((depth * 64 + d) * 4096 + w) as u64);
                let letters = (0..d)
                    .map(|_| {
                        let f = rng.random_range(0..nf);
                        Letter::new(f, random_element(factors[f].algebra(), &mut rng))
                    })
                    .collect();
                let p = NCPoly::word(letters);
                worst = worst.max((moment(&lo, &p)? - moment(&hi, &p)?).norm());
            }
        }
    }
    Ok(DepthStabilityReport {
        max_depth,
        words_per_degree,
        max_difference: worst,
        passed: worst <= 1e-12,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentEntry {
    pub name: String,
    pub degree: usize,
    pub value: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_residual: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentsReport {
    pub depth: usize,
    pub entries: Vec<MomentEntry>,
    pub passed: bool,
}

pub fn moments_suite(space: &FreeFockSpace, polys: &[(String, NCPoly)], with_oracle: bool) -> Result<MomentsReport> {
    let oracle = if with_oracle { Some(DenseSpace::full(space)?) } else { None };
    let mut entries = Vec::with_capacity(polys.len());
    let mut passed = true;
    for (name, p) in polys {
        let value = moment(space, p)?;
        let (o, r) = match &oracle {
            Some(o) => {
                let ov = o.dense_moment(p)?;
                let r = (ov - value).norm();
                passed &= r < 1e-10;
                (Some(c2(ov)), Some(r))
            }
            None => (None, None),
        };
        entries.push(MomentEntry {
            name: name.clone(),
            degree: p.degree(),
            value: c2(value),
            oracle: o,
            oracle_residual: r,
        });
    }
    Ok(MomentsReport {
        depth: space.depth(),
        entries,
        passed,
    })
}

/// `1`, and the products `pq`, `pqp` of the first diagonal matrix units of
/// the first two factors (just `p` for a single factor).
pub fn default_polys(space: &FreeFockSpace) -> Result<Vec<(String, NCPoly)>> {
    let unit = |f: usize| -> Result<Letter> { Ok(Letter::new(f, space.factor(f)?.algebra().matrix_unit(0, 0, 0)?)) };
    let mut out = vec![("1".to_string(), NCPoly::one())];
    if space.factors().len() == 1 {
        out.push(("p".into(), NCPoly::word(vec![unit(0)?])));
    } else {
        out.push(("pq".into(), NCPoly::word(vec![unit(0)?, unit(1)?])));
        if space.depth() >= 3 {
            out.push(("pqp".into(), NCPoly::word(vec![unit(0)?, unit(1)?, unit(0)?])));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;

    #[test]
    fn alternating_sequences() {
        let mut rng = instance_rng(1, 0);
        for _ in 0..50 {
            let w = random_alternating(6, 3, &mut rng).unwrap();
            assert!(w.windows(2).all(|p| p[0] != p[1]));
            assert!(w.iter().all(|&f| f < 3));
        }
        assert!(random_alternating(2, 1, &mut rng).is_none());
        assert_eq!(random_alternating(1, 1, &mut rng), Some(vec![0]));
    }

    #[test]
    fn small_lemma_suite() {
        let space = RunConfig::default().build_space(4).unwrap();
        let opts = LemmaSuiteOptions {
            instances: 40,
            seed: 3,
            max_n: 2,
            with_oracle: true,
        };
        let r = lemma_suite(&space, &opts, &Tolerances::default()).unwrap();
        assert!(r.passed, "{r:#?}");
    }

    #[test]
    fn reports_are_deterministic() {
        let space = RunConfig::default().build_space(4).unwrap();
        let tol = Tolerances::default();
        let a = serde_json::to_string(&vav_suite(&space, 2, 3, 4, 9, &tol).unwrap()).unwrap();
        let b = serde_json::to_string(&vav_suite(&space, 2, 3, 4, 9, &tol).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn default_moments() {
        let space = RunConfig::default().build_space(3).unwrap();
        let r = moments_suite(&space, &default_polys(&space).unwrap(), true).unwrap();
        assert!(r.passed);
        let vals: Vec<f64> = r.entries.iter().map(|e| e.value[0]).collect();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 0.25).abs() < 1e-12);
        assert!((vals[2] - 0.25).abs() < 1e-12);
    }

    #[test]
    fn faithfulness_suite_guard() {
        let space = RunConfig::default().build_space(3).unwrap();
        assert!(matches!(
            faithfulness_suite(&space, 3, 2, 1, false, &Tolerances::default()),
            Err(Error::Exactness { required: 4, .. })
        ));
    }
}
