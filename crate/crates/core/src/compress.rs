//! Compression isometries `V = V_{(ζ_1, …, ζ_{n−1}, ι_n)} : H_{ι_n} → H` with
//!
//! ```text
//! V ξ_{ι_n} = ζ_1 ⊗ … ⊗ ζ_{n−1},      V ζ = ζ_1 ⊗ … ⊗ ζ_{n−1} ⊗ ζ   (ζ ∈ H°_{ι_n}),
//! ```
//!
//! the closed form of `V* a_1 ⋯ a_m V` for centered alternating letters, the
//! identity `V* A V = A_{ι_n}`, and the positivity witness search behind the
//! faithfulness of the free product state.
//!
//! Compressions are evaluated as `⟨a_{r+1} ⋯ a_m V x, a_r* ⋯ a_1* V y⟩` with
//! the split `r` chosen so that neither side is cut by the truncation. With
//! `V` ranging over words of length `≤ n` this is exact for
//! `m ≤ 2(N − n) + 1`.

use serde::Serialize;

use crate::blockalg::Tolerances;
use crate::error::{Error, Result};
use crate::freefock::{FreeFockSpace, Word};
use crate::freerep::{centered_basis, represent, represent_poly, Letter, NCPoly, Operator, PolyOperator};
use crate::linalg;
use crate::rng::random_element;
use crate::{CMat, CVec, C64};

#[derive(Clone, Debug)]
pub struct CompressionIsometry<'a> {
    space: &'a FreeFockSpace,
    iotas: Vec<usize>,
    zetas: Vec<CVec>,
    matrix: CMat,
}

/// Builds `V_{(ζ_1, …, ζ_{n−1}, ι_n)}`; `iotas = (ι_1, …, ι_n)` and each `ζ_j`
/// is a unit vector of `H°_{ι_j}` in GNS frame coordinates.
pub fn build_isometry<'a>(
    space: &'a FreeFockSpace,
    iotas: Vec<usize>,
    zetas: Vec<CVec>,
) -> Result<CompressionIsometry<'a>> {
    let n = iotas.len();
    if n == 0 {
        return Err(Error::Structural("isometry needs a target factor".into()));
    }
    if zetas.len() + 1 != n {
        return Err(Error::Structural(format!(
            "{} factor indices need {} vectors, got {}",
            n,
            n - 1,
            zetas.len()
        )));
    }
    let full = Word::new(iotas.clone())?;
    if n > space.depth() {
        return Err(Error::Exactness {
            degree: n,
            depth: space.depth(),
            required: n,
        });
    }
    for &l in &iotas {
        space.factor(l)?;
    }
    for (j, z) in zetas.iter().enumerate() {
        let norm = z.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Validation(format!(
                "ζ_{} has norm {norm}; V is an isometry only for unit vectors, rescale by 1/{norm}",
                j + 1
            )));
        }
    }
    let target = iotas[n - 1];
    let g = space.factor(target)?;
    let prefix = Word::new(iotas[..n - 1].to_vec())?;
    let mut matrix = CMat::zeros(space.total_dim(), g.dim());
    matrix.set_column(0, &space.product_vector(&prefix, &zetas)?);
    for m in 1..g.dim() {
        let mut e = CVec::zeros(g.dim());
        e[m] = C64::new(1.0, 0.0);
        let mut comps = zetas.clone();
        comps.push(e);
        matrix.set_column(m, &space.product_vector(&full, &comps)?);
    }
    Ok(CompressionIsometry {
        space,
        iotas,
        zetas,
        matrix,
    })
}

impl<'a> CompressionIsometry<'a> {
    pub fn space(&self) -> &'a FreeFockSpace {
        self.space
    }

    pub fn n(&self) -> usize {
        self.iotas.len()
    }

    pub fn iotas(&self) -> &[usize] {
        &self.iotas
    }

    pub fn zetas(&self) -> &[CVec] {
        &self.zetas
    }

    pub fn target(&self) -> usize {
        self.iotas[self.iotas.len() - 1]
    }

    /// `total_dim × dim(H_{ι_n})`.
    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    /// Frobenius norm of `V*V − I`.
    pub fn isometry_defect(&self) -> f64 {
        let d = self.matrix.ncols();
        (self.matrix.adjoint() * &self.matrix - CMat::identity(d, d)).norm()
    }
}

/// Which of the three closed forms applies to `V* a_1 ⋯ a_m V`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum LemmaBranch {
    /// `m = 2p − 1` with `p < n`: a scalar multiple of the identity.
    ScalarIdentity { p: usize },
    /// `m = 2n − 1`: a scalar multiple of `a_n`.
    ScalarTarget,
    Zero,
}

/// Decides the branch for letters from factors `ks` against `iotas = (ι_1, …, ι_n)`.
///
/// The nonzero branches need `m = 2p − 1` and the mirror pattern
/// `k_j = ι_j = k_{m+1−j}` for `j < p`, `k_p = ι_p`.
pub fn classify(iotas: &[usize], ks: &[usize]) -> Result<LemmaBranch> {
    if ks.is_empty() {
        return Err(Error::Structural("empty letter pattern".into()));
    }
    Word::new(ks.to_vec())?;
    let (m, n) = (ks.len(), iotas.len());
    if m % 2 == 0 {
        return Ok(LemmaBranch::Zero);
    }
    let p = m.div_ceil(2);
    if p > n {
        return Ok(LemmaBranch::Zero);
    }
    let mirrored = (1..p).all(|j| ks[j - 1] == iotas[j - 1] && ks[m - j] == iotas[j - 1]);
    if !mirrored || ks[p - 1] != iotas[p - 1] {
        return Ok(LemmaBranch::Zero);
    }
    Ok(if p < n {
        LemmaBranch::ScalarIdentity { p }
    } else {
        LemmaBranch::ScalarTarget
    })
}

/// Closed-form value of `V* a_1 ⋯ a_m V`.
#[derive(Clone, Debug)]
pub enum LemmaCase {
    ScalarIdentity { p: usize, c: C64 },
    /// `c · a_n`, with `a_n` as its GNS matrix on `H_{ι_n}`.
    ScalarTarget { c: C64, target: CMat },
    Zero,
}

impl LemmaCase {
    pub fn branch(&self) -> LemmaBranch {
        match self {
            LemmaCase::ScalarIdentity { p, .. } => LemmaBranch::ScalarIdentity { p: *p },
            LemmaCase::ScalarTarget { .. } => LemmaBranch::ScalarTarget,
            LemmaCase::Zero => LemmaBranch::Zero,
        }
    }

    pub fn scalar(&self) -> Option<C64> {
        match self {
            LemmaCase::ScalarIdentity { c, .. } | LemmaCase::ScalarTarget { c, .. } => Some(*c),
            LemmaCase::Zero => None,
        }
    }

    /// The operator on `H_{ι_n}` this case stands for.
    pub fn to_matrix(&self, dim: usize) -> CMat {
        match self {
            LemmaCase::ScalarIdentity { c, .. } => CMat::identity(dim, dim) * *c,
            LemmaCase::ScalarTarget { c, target } => target * *c,
            LemmaCase::Zero => CMat::zeros(dim, dim),
        }
    }
}

/// Evaluates the closed form for centered letters `a_j ∈ A°_{k_j}`.
pub fn lemma_value(v: &CompressionIsometry<'_>, letters: &[Letter], tol: &Tolerances) -> Result<LemmaCase> {
    let space = v.space;
    let ks: Vec<usize> = letters.iter().map(|l| l.factor).collect();
    let mut reps = Vec::with_capacity(letters.len());
    for (j, l) in letters.iter().enumerate() {
        let g = space.factor(l.factor)?;
        let phi = g.state().eval(&l.element)?;
        if phi.norm() > tol.norm * l.element.norm().max(1.0) {
            return Err(Error::Validation(format!(
                "letter {} has φ = {phi}; closed forms need centered letters",
                j + 1
            )));
        }
        reps.push(g.rep(&l.element)?);
    }
    let branch = classify(&v.iotas, &ks)?;
    let m = letters.len();
    // ⟨a_{m+1−j} ζ_j, ξ⟩ and ⟨a_j ξ, ζ_j⟩, j counted from 1
    let outer = |j: usize| (&reps[m - j] * &v.zetas[j - 1])[0];
    let inner_ = |j: usize| v.zetas[j - 1].dotc(&reps[j - 1].column(0));
    Ok(match branch {
        LemmaBranch::Zero => LemmaCase::Zero,
        LemmaBranch::ScalarIdentity { p } => {
            let zp = &v.zetas[p - 1];
            let middle = zp.dotc(&(&reps[p - 1] * zp));
            let mut c = middle;
            for j in 1..p {
                c *= outer(j) * inner_(j);
            }
            LemmaCase::ScalarIdentity { p, c }
        }
        LemmaBranch::ScalarTarget => {
            let n = v.n();
            let mut c = C64::new(1.0, 0.0);
            for j in 1..n {
                c *= outer(j) * inner_(j);
            }
            LemmaCase::ScalarTarget {
                c,
                target: reps[n - 1].clone(),
            }
        }
    })
}

/// Smallest depth at which `m` letters compress exactly through a rank-`n` isometry.
pub fn required_depth(n: usize, m: usize) -> usize {
    n + m.saturating_sub(1).div_ceil(2)
}

/// `V* a_1 ⋯ a_m V`, exact for `m ≤ 2(N − n) + 1`.
pub fn compress_word(v: &CompressionIsometry<'_>, letters: &[Letter]) -> Result<CMat> {
    let space = v.space;
    let (n, m, depth) = (v.n(), letters.len(), space.depth());
    let required = required_depth(n, m);
    if required > depth {
        return Err(Error::Exactness {
            degree: m,
            depth,
            required,
        });
    }
    let ops = letters
        .iter()
        .map(|l| represent(space, l.factor, &l.element))
        .collect::<Result<Vec<_>>>()?;
    let right = m.min(depth - n);
    let left = m - right;
    let d = v.matrix.ncols();
    let us: Vec<CVec> = (0..d)
        .map(|x| {
            let mut u = v.matrix.column(x).into_owned();
            for op in ops[left..].iter().rev() {
                u = op.apply(&u);
            }
            u
        })
        .collect();
    let ws: Vec<CVec> = (0..d)
        .map(|y| {
            let mut w = v.matrix.column(y).into_owned();
            for op in ops[..left].iter() {
                w = op.adjoint().apply(&w);
            }
            w
        })
        .collect();
    Ok(CMat::from_fn(d, d, |y, x| ws[y].dotc(&us[x])))
}

/// `V* p V` for a polynomial, term by term.
pub fn compress(v: &CompressionIsometry<'_>, p: &NCPoly) -> Result<CMat> {
    let d = v.matrix.ncols();
    let mut out = CMat::zeros(d, d);
    for t in p.terms() {
        out += compress_word(v, &t.letters)? * t.coef;
    }
    Ok(out)
}

/// `V* T V` for an operator given as a matrix on the truncated space.
pub fn compress_matrix(v: &CompressionIsometry<'_>, t: &CMat) -> CMat {
    v.matrix.adjoint() * t * &v.matrix
}

fn target_span(space: &FreeFockSpace, factor: usize) -> Result<CMat> {
    let g = space.factor(factor)?;
    let cols = g
        .algebra()
        .basis()
        .iter()
        .map(|u| Ok(linalg::vectorize(&g.rep(u)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(linalg::column_space(&CMat::from_columns(&cols), 1e-10))
}

#[derive(Clone, Debug, Serialize)]
pub struct VavReport {
    pub n: usize,
    pub target: String,
    /// `|c|` of the closed form used to divide out the scalar.
    pub scalar_modulus: f64,
    pub recovery_residual: f64,
    pub containment_residual: f64,
    pub containment_samples: usize,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `V* A V = A_{ι_n}` in both directions.
///
/// Recovery: for every matrix unit `b` of `A_{ι_n}`, picks centered
/// `a_j, a_{2n−j} ∈ A°_{ι_j}` with `⟨a_j ξ, ζ_j⟩ ≠ 0 ≠ ⟨a_{2n−j} ζ_j, ξ⟩` and
/// compresses `φ(b)·1 + c⁻¹ a_1 ⋯ a_{n−1} b° a_{n+1} ⋯ a_{2n−1}`, which must
/// give `b`. Containment: compressions of random words lie in `π(A_{ι_n})`.
pub fn vav_surjectivity(
    v: &CompressionIsometry<'_>,
    tol: &Tolerances,
    samples: usize,
    rng: &mut impl rand::Rng,
    report_tol: f64,
) -> Result<VavReport> {
    let space = v.space;
    let n = v.n();
    let m = 2 * n - 1;
    let required = required_depth(n, m);
    if required > space.depth() {
        return Err(Error::Exactness {
            degree: m,
            depth: space.depth(),
            required,
        });
    }
    let xi_pairing = |factor: usize, zeta: &CVec, towards_zeta: bool| -> Result<AlgebraChoice> {
        let g = space.factor(factor)?;
        let mut best: Option<AlgebraChoice> = None;
        for a in centered_basis(space, factor)? {
            let r = g.rep(&a)?;
            let val = if towards_zeta {
                zeta.dotc(&r.column(0))
            } else {
                (&r * zeta)[0]
            };
            if best.as_ref().is_none_or(|b| val.norm() > b.value.norm()) {
                best = Some(AlgebraChoice { element: a, value: val });
            }
        }
        match best {
            Some(b) if b.value.norm() > 1e-12 => Ok(b),
            _ => Err(Error::Witness(format!(
                "no centered element of `{}` pairs ξ with ζ nontrivially",
                g.label()
            ))),
        }
    };

    let mut left = Vec::with_capacity(n - 1);
    let mut right = Vec::with_capacity(n - 1);
    for j in 1..n {
        let f = v.iotas[j - 1];
        let zeta = &v.zetas[j - 1];
        left.push(Letter::new(f, xi_pairing(f, zeta, true)?.element));
        right.push(Letter::new(f, xi_pairing(f, zeta, false)?.element));
    }

    let target = v.target();
    let g = space.factor(target)?;
    let d = g.dim();
    let mut recovery = 0.0f64;
    let mut scalar_modulus = 0.0;
    for b in g.algebra().basis() {
        let phi_b = g.state().eval(&b)?;
        let centered = g.state().center(&b)?;
        let mut letters = left.clone();
        letters.push(Letter::new(target, centered));
        letters.extend(right.iter().rev().cloned());
        let case = lemma_value(v, &letters, tol)?;
        let c = match case {
            LemmaCase::ScalarTarget { c, .. } => c,
            other => {
                return Err(Error::Witness(format!(
                    "recovery word classified as {:?}",
                    other.branch()
                )))
            }
        };
        scalar_modulus = c.norm();
        let recovered = CMat::identity(d, d) * phi_b + compress_word(v, &letters)? / c;
        recovery = recovery.max(linalg::max_abs(&(recovered - g.rep(&b)?)));
    }

    let span = target_span(space, target)?;
    let max_len = 2 * (space.depth() - n) + 1;
    let nf = space.factors().len();
    let mut containment = 0.0f64;
    for _ in 0..samples {
        let len = rng.random_range(1..=max_len);
        let mut letters: Vec<Letter> = Vec::with_capacity(len);
        for _ in 0..len {
            let f = loop {
                let f = rng.random_range(0..nf);
                if nf == 1 || letters.last().is_none_or(|l| l.factor != f) {
                    break f;
                }
            };
            letters.push(Letter::new(f, random_element(space.factor(f)?.algebra(), rng)));
        }
        let mat = compress_word(v, &letters)?;
        containment = containment.max(linalg::distance_to_span(&linalg::vectorize(&mat), &span));
    }

    Ok(VavReport {
        n,
        target: g.label().to_string(),
        scalar_modulus,
        recovery_residual: recovery,
        containment_residual: containment,
        containment_samples: samples,
        tolerance: report_tol,
        passed: recovery < report_tol && containment < report_tol,
    })
}

struct AlgebraChoice {
    element: crate::blockalg::AlgebraElement,
    value: C64,
}

/// A positive operator `a` that can be probed on basis vectors of the
/// truncated space.
pub trait PositiveProbe {
    /// Longest word whose basis vectors are probed exactly.
    fn max_word_len(&self) -> usize;
    /// `⟨aη, η⟩`.
    fn expectation(&self, eta: &CVec) -> f64;
    /// An upper bound for `‖a‖`.
    fn norm_bound(&self) -> f64;
    /// `V* a V`.
    fn compress(&self, v: &CompressionIsometry<'_>) -> Result<CMat>;
}

/// `a = x* x` for a polynomial `x`, probed as `‖xη‖²`.
pub struct GramProbe<'a> {
    space: &'a FreeFockSpace,
    op: PolyOperator<'a>,
    degree: usize,
    bound: f64,
}

impl<'a> GramProbe<'a> {
    pub fn new(space: &'a FreeFockSpace, x: &NCPoly) -> Result<Self> {
        let degree = x.degree();
        if degree > space.depth() {
            return Err(Error::Exactness {
                degree,
                depth: space.depth(),
                required: degree,
            });
        }
        Ok(Self {
            space,
            op: represent_poly(space, x)?,
            degree,
            bound: x.norm_bound().powi(2),
        })
    }
}

impl PositiveProbe for GramProbe<'_> {
    fn max_word_len(&self) -> usize {
        self.space.depth() - self.degree
    }

    fn expectation(&self, eta: &CVec) -> f64 {
        self.op.apply(eta).norm_squared()
    }

    fn norm_bound(&self) -> f64 {
        self.bound
    }

    fn compress(&self, v: &CompressionIsometry<'_>) -> Result<CMat> {
        if v.n() > self.max_word_len() {
            return Err(Error::Exactness {
                degree: self.degree,
                depth: self.space.depth(),
                required: v.n() + self.degree,
            });
        }
        let cols: Vec<CVec> = (0..v.matrix.ncols())
            .map(|x| self.op.apply(&v.matrix.column(x).into_owned()))
            .collect();
        let xv = CMat::from_columns(&cols);
        Ok(xv.adjoint() * xv)
    }
}

/// A positive semidefinite matrix on the truncated space.
pub struct DenseProbe {
    matrix: CMat,
    depth: usize,
    bound: f64,
}

impl DenseProbe {
    pub fn new(space: &FreeFockSpace, matrix: CMat, tol: &Tolerances) -> Result<Self> {
        let n = space.total_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::Structural(format!(
                "probe matrix has shape {:?}, space has dimension {n}",
                matrix.shape()
            )));
        }
        let bound = linalg::spectral_norm(&matrix);
        if !linalg::is_hermitian(&matrix, tol.norm * bound.max(1.0)) {
            return Err(Error::Validation("probe matrix is not Hermitian".into()));
        }
        let min = linalg::min_hermitian_eigenvalue(&matrix);
        if min < -tol.psd * bound.max(1.0) {
            return Err(Error::Validation(format!("probe matrix has eigenvalue {min:e} < 0")));
        }
        Ok(Self {
            matrix,
            depth: space.depth(),
            bound,
        })
    }
}

impl PositiveProbe for DenseProbe {
    fn max_word_len(&self) -> usize {
        self.depth
    }

    fn expectation(&self, eta: &CVec) -> f64 {
        eta.dotc(&(&self.matrix * eta)).re
    }

    fn norm_bound(&self) -> f64 {
        self.bound
    }

    fn compress(&self, v: &CompressionIsometry<'_>) -> Result<CMat> {
        Ok(compress_matrix(v, &self.matrix))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WitnessVerdict {
    Witness,
    NumericallyZero,
}

/// The compression step applied to a witness found at word length `n ≥ 1`:
/// `V* a V` with `V` built from the witness letters, its state value at
/// `ξ_{ι_n}`, and `⟨a(ζ_1⊗…⊗ζ_{n−1}), ζ_1⊗…⊗ζ_{n−1}⟩` computed directly.
#[derive(Clone, Debug, Serialize)]
pub struct ChainCheck {
    pub n: usize,
    pub compressed_norm: f64,
    pub compressed_min_eigenvalue: f64,
    pub compressed_state_value: f64,
    pub prefix_value: f64,
    pub agree: bool,
    /// Distance of `V* a V` to `π(A_{ι_n})`; zero whenever `a ∈ A`.
    pub target_algebra_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessRecord {
    pub verdict: WitnessVerdict,
    pub word: Vec<usize>,
    pub multi_index: Vec<usize>,
    pub coordinate: usize,
    pub value: f64,
    pub threshold: f64,
    pub scanned: usize,
    pub max_scanned: f64,
    pub chain: Option<ChainCheck>,
}

/// Scans `ξ` and then product basis vectors in canonical word order for the
/// first `η` with `⟨aη, η⟩ > tol.pos · ‖a‖`.
pub fn faithfulness_witness(
    space: &FreeFockSpace,
    probe: &dyn PositiveProbe,
    tol: &Tolerances,
) -> Result<WitnessRecord> {
    let threshold = tol.pos * probe.norm_bound();
    let max_len = probe.max_word_len();
    let mut scanned = 0;
    let mut max_scanned = f64::NEG_INFINITY;
    for coord in 0..space.total_dim() {
        let (wi, multi) = space.locate(coord);
        let word = &space.words()[wi];
        if word.len() > max_len {
            break;
        }
        let eta = space.basis_vector(coord);
        let value = probe.expectation(&eta);
        scanned += 1;
        max_scanned = max_scanned.max(value);
        if value > threshold {
            let chain = if word.is_empty() {
                None
            } else {
                Some(chain_check(space, probe, word, &multi, tol)?)
            };
            return Ok(WitnessRecord {
                verdict: WitnessVerdict::Witness,
                word: word.letters().to_vec(),
                multi_index: multi,
                coordinate: coord,
                value,
                threshold,
                scanned,
                max_scanned,
                chain,
            });
        }
    }
    Ok(WitnessRecord {
        verdict: WitnessVerdict::NumericallyZero,
        word: Vec::new(),
        multi_index: Vec::new(),
        coordinate: 0,
        value: 0.0,
        threshold,
        scanned,
        max_scanned,
        chain: None,
    })
}

fn chain_check(
    space: &FreeFockSpace,
    probe: &dyn PositiveProbe,
    word: &Word,
    multi: &[usize],
    tol: &Tolerances,
) -> Result<ChainCheck> {
    let n = word.len();
    let zetas = word.letters()[..n - 1]
        .iter()
        .zip(multi)
        .map(|(&l, &m)| {
            let mut z = CVec::zeros(space.factors()[l].dim());
            z[m + 1] = C64::new(1.0, 0.0);
            z
        })
        .collect();
    let v = build_isometry(space, word.letters().to_vec(), zetas)?;
    let vav = probe.compress(&v)?;
    let prefix_value = probe.expectation(&v.matrix.column(0).into_owned());
    let compressed_state_value = vav[(0, 0)].re;
    let span = target_span(space, v.target())?;
    let scale = probe.norm_bound().max(1.0);
    Ok(ChainCheck {
        n,
        compressed_norm: linalg::spectral_norm(&vav),
        compressed_min_eigenvalue: linalg::min_hermitian_eigenvalue(&vav),
        compressed_state_value,
        prefix_value,
        agree: (compressed_state_value - prefix_value).abs() <= tol.norm * scale,
        target_algebra_distance: linalg::distance_to_span(&linalg::vectorize(&vav), &span),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blockalg::{BlockAlgebra, StateSpec};
    use crate::gns::GnsSpace;
    use crate::rng::{instance_rng, random_centered_unit};

    fn factor(label: &str, dims: Vec<usize>, weights: &[Vec<f64>]) -> GnsSpace {
        let tol = Tolerances::default();
        let alg = BlockAlgebra::new(label, dims).unwrap();
        let phi = StateSpec::diagonal(&alg, weights, &tol).unwrap();
        GnsSpace::construct(&phi, &tol).unwrap()
    }

    fn space(depth: usize) -> FreeFockSpace {
        FreeFockSpace::build(
            vec![
                factor("a", vec![1, 1], &[vec![0.4], vec![0.6]]),
                factor("b", vec![2], &[vec![0.7, 0.3]]),
            ],
            depth,
        )
        .unwrap()
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&[0], &[0]).unwrap(), LemmaBranch::ScalarTarget);
        assert_eq!(classify(&[0, 1], &[0]).unwrap(), LemmaBranch::ScalarIdentity { p: 1 });
        assert_eq!(classify(&[0, 1, 0], &[0]).unwrap(), LemmaBranch::ScalarIdentity { p: 1 });
        assert_eq!(classify(&[0, 1], &[1]).unwrap(), LemmaBranch::Zero);
        assert_eq!(classify(&[0, 1], &[0, 1, 0]).unwrap(), LemmaBranch::ScalarTarget);
        assert_eq!(classify(&[0, 1, 0], &[0, 1, 0]).unwrap(), LemmaBranch::ScalarIdentity { p: 2 });
        assert_eq!(classify(&[0, 1], &[0, 1]).unwrap(), LemmaBranch::Zero);
        assert_eq!(classify(&[0, 1], &[1, 0, 1]).unwrap(), LemmaBranch::Zero);
        assert_eq!(classify(&[0], &[0, 1, 0]).unwrap(), LemmaBranch::Zero);
        assert!(classify(&[0, 1], &[0, 0, 1]).is_err());
    }

    #[test]
    fn isometry_properties() {
        let s = space(3);
        let v = build_isometry(&s, vec![0], vec![]).unwrap();
        assert!(v.isometry_defect() < 1e-12);
        // n = 1 is the canonical copy Cξ ⊕ H°_ι
        assert_eq!(v.matrix().column(0).into_owned(), s.xi());
        let mut rng = instance_rng(1, 0);
        let z1 = random_centered_unit(2, &mut rng);
        let z2 = random_centered_unit(4, &mut rng);
        let v = build_isometry(&s, vec![0, 1, 0], vec![z1.clone(), z2.clone()]).unwrap();
        assert!(v.isometry_defect() < 1e-12);
        let w = Word::new(vec![0, 1]).unwrap();
        let expect = s.product_vector(&w, &[z1.clone(), z2.clone()]).unwrap();
        assert!((v.matrix().column(0) - expect).norm() < 1e-14);
        assert!(matches!(
            build_isometry(&s, vec![0, 1], vec![z1.scale(2.0)]),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            build_isometry(&s, vec![0, 0], vec![z1]),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn isometry_from_basis_vectors_hits_product_basis() {
        let s = space(2);
        let mut z = CVec::zeros(4);
        z[2] = C64::new(1.0, 0.0);
        let v = build_isometry(&s, vec![1, 0], vec![z]).unwrap();
        let wi = s.word_index(&Word::new(vec![1]).unwrap()).unwrap();
        assert_eq!(v.matrix()[(s.coordinate(wi, &[1]).unwrap(), 0)], C64::new(1.0, 0.0));
        let wi2 = s.word_index(&Word::new(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(v.matrix()[(s.coordinate(wi2, &[1, 0]).unwrap(), 1)], C64::new(1.0, 0.0));
    }

    #[test]
    fn single_letter_cases() {
        let tol = Tolerances::default();
        let s = space(3);
        let mut rng = instance_rng(2, 0);
        let g = s.factor(1).unwrap();
        let a = g.state().center(&random_element(g.algebra(), &mut rng)).unwrap();
        // n = 1: V* a V = a
        let v = build_isometry(&s, vec![1], vec![]).unwrap();
        let direct = compress_word(&v, &[Letter::new(1, a.clone())]).unwrap();
        assert!((direct - g.rep(&a).unwrap()).norm() < 1e-12);
        // n = 2: V* a V = ⟨aζ, ζ⟩ 1
        let z = random_centered_unit(4, &mut rng);
        let v = build_isometry(&s, vec![1, 0], vec![z.clone()]).unwrap();
        let case = lemma_value(&v, &[Letter::new(1, a.clone())], &tol).unwrap();
        let expect = z.dotc(&(g.rep(&a).unwrap() * &z));
        assert!((case.scalar().unwrap() - expect).norm() < 1e-14);
        let direct = compress_word(&v, &[Letter::new(1, a.clone())]).unwrap();
        assert!((direct - case.to_matrix(2)).norm() < 1e-12);
        // even m vanishes
        let h = s.factor(0).unwrap();
        let b = h.state().center(&random_element(h.algebra(), &mut rng)).unwrap();
        let letters = [Letter::new(1, a), Letter::new(0, b)];
        assert!(matches!(lemma_value(&v, &letters, &tol).unwrap(), LemmaCase::Zero));
        assert!(compress_word(&v, &letters).unwrap().norm() < 1e-12);
    }

    #[test]
    fn uncentered_letters_rejected() {
        let tol = Tolerances::default();
        let s = space(3);
        let v = build_isometry(&s, vec![1], vec![]).unwrap();
        let one = s.factor(1).unwrap().algebra().one();
        assert!(matches!(
            lemma_value(&v, &[Letter::new(1, one)], &tol),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn compression_identity_and_adjoint_symmetry() {
        let s = space(4);
        let mut rng = instance_rng(6, 0);
        let z = random_centered_unit(2, &mut rng);
        let v = build_isometry(&s, vec![0, 1], vec![z]).unwrap();
        let id = compress(&v, &NCPoly::one()).unwrap();
        assert!((id - CMat::identity(4, 4)).norm() < 1e-12);
        let letters: Vec<Letter> = [0usize, 1, 0]
            .iter()
            .map(|&f| Letter::new(f, random_element(s.factor(f).unwrap().algebra(), &mut rng)))
            .collect();
        let p = NCPoly::word(letters);
        let lhs = compress(&v, &p).unwrap().adjoint();
        let rhs = compress(&v, &p.adjoint()).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn exactness_guard() {
        let s = space(3);
        let mut rng = instance_rng(7, 0);
        let z = random_centered_unit(2, &mut rng);
        let v = build_isometry(&s, vec![0, 1], vec![z]).unwrap();
        let letters: Vec<Letter> = [0usize, 1, 0, 1]
            .iter()
            .map(|&f| Letter::new(f, random_element(s.factor(f).unwrap().algebra(), &mut rng)))
            .collect();
        assert!(compress_word(&v, &letters[..3]).is_ok());
        assert!(matches!(
            compress_word(&v, &letters),
            Err(Error::Exactness { required: 4, .. })
        ));
    }

    #[test]
    fn vav_for_small_n() {
        let tol = Tolerances::default();
        let s = space(3);
        let mut rng = instance_rng(8, 0);
        let v = build_isometry(&s, vec![1], vec![]).unwrap();
        let r = vav_surjectivity(&v, &tol, 10, &mut rng, 1e-12).unwrap();
        assert!(r.passed, "{r:?}");
        let z = random_centered_unit(2, &mut rng);
        let v = build_isometry(&s, vec![0, 1], vec![z]).unwrap();
        let r = vav_surjectivity(&v, &tol, 20, &mut rng, 1e-8).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn witness_for_unit_and_centered_projection() {
        let tol = Tolerances::default();
        let s = FreeFockSpace::build(
            vec![
                factor("p", vec![1, 1], &[vec![0.5], vec![0.5]]),
                factor("q", vec![1, 1], &[vec![0.5], vec![0.5]]),
            ],
            4,
        )
        .unwrap();
        let w = faithfulness_witness(&s, &GramProbe::new(&s, &NCPoly::one()).unwrap(), &tol).unwrap();
        assert_eq!(w.verdict, WitnessVerdict::Witness);
        assert!(w.word.is_empty());
        assert!((w.value - 1.0).abs() < 1e-14);

        let g = s.factor(0).unwrap();
        let pc = g.state().center(&g.algebra().matrix_unit(0, 0, 0).unwrap()).unwrap();
        let w = faithfulness_witness(&s, &GramProbe::new(&s, &NCPoly::letter(0, pc)).unwrap(), &tol).unwrap();
        assert!(w.word.is_empty());
        assert!((w.value - 0.25).abs() < 1e-14);

        let zero = NCPoly::letter(0, g.algebra().zero());
        let w = faithfulness_witness(&s, &GramProbe::new(&s, &zero).unwrap(), &tol).unwrap();
        assert_eq!(w.verdict, WitnessVerdict::NumericallyZero);
    }

    #[test]
    fn witness_respects_minimal_support() {
        // a = P_w M P_w with M > 0 lives on a length-2 summand only
        let tol = Tolerances::default();
        let s = space(3);
        let w = Word::new(vec![1, 0]).unwrap();
        let p = s.projection(&w).unwrap().to_dense(s.total_dim());
        let mut rng = instance_rng(4, 0);
        let b = CMat::from_fn(s.total_dim(), s.total_dim(), |_, _| crate::rng::random_complex(&mut rng));
        let a = &p * (b.adjoint() * &b) * &p;
        let probe = DenseProbe::new(&s, a.clone(), &tol).unwrap();
        let rec = faithfulness_witness(&s, &probe, &tol).unwrap();
        assert_eq!(rec.word, vec![1, 0]);
        let eta = s.basis_vector(rec.coordinate);
        assert!((rec.value - eta.dotc(&(&a * &eta)).re).abs() < 1e-10);
        let chain = rec.chain.unwrap();
        assert_eq!(chain.n, 2);
        // V* a V ≥ 0 and nonzero, yet its state value vanishes: not an element of A_{ι_n}
        assert!(chain.compressed_norm > 0.0 && chain.compressed_min_eigenvalue > -1e-10);
        assert!(chain.agree);
        assert!(chain.compressed_state_value.abs() < 1e-10);
        assert!(chain.target_algebra_distance > 1e-6);
    }
}
