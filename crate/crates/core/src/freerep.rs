//! Left action of each factor on the truncated free-product space, the free
//! product state (vector state at `ξ`) and mixed moments.
//!
//! For `a ∈ A_ι` with GNS matrix `R` (frame index 0 is `ξ_ι`) the action on
//! a summand vector is:
//!
//! - first letter `ι`: `a(ζ ⊗ η) = (aζ)° ⊗ η + ⟨aζ, ξ_ι⟩ η`;
//! - otherwise `η` is read as `ξ_ι ⊗ η`: `aη = φ_ι(a) η + (aξ_ι)° ⊗ η`.
//!
//! The lengthening term is dropped on words already at the truncation depth,
//! so each represented generator is the compression `P_N a P_N`. A product of
//! `m ≤ N` generators applied to `ξ` never reaches length `> m`, hence
//! moments of degree `≤ N` are exact.

use serde::Serialize;

use crate::blockalg::AlgebraElement;
use crate::error::{Error, Result};
use crate::freefock::FreeFockSpace;
use crate::{CMat, CVec, C64};

/// A generator `a ∈ A_factor`.
#[derive(Clone, Debug)]
pub struct Letter {
    pub factor: usize,
    pub element: AlgebraElement,
}

impl Letter {
    pub fn new(factor: usize, element: AlgebraElement) -> Self {
        Self { factor, element }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            factor: self.factor,
            element: self.element.adjoint(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Term {
    pub coef: C64,
    pub letters: Vec<Letter>,
}

/// A noncommutative polynomial: a finite sum of scaled words in generators.
/// The empty word is the unit.
#[derive(Clone, Debug, Default)]
pub struct NCPoly {
    terms: Vec<Term>,
}

impl NCPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scalar(c: C64) -> Self {
        Self {
            terms: vec![Term { coef: c, letters: Vec::new() }],
        }
    }

    pub fn one() -> Self {
        Self::scalar(C64::new(1.0, 0.0))
    }

    pub fn letter(factor: usize, element: AlgebraElement) -> Self {
        Self::word(vec![Letter::new(factor, element)])
    }

    pub fn word(letters: Vec<Letter>) -> Self {
        Self {
            terms: vec![Term {
                coef: C64::new(1.0, 0.0),
                letters,
            }],
        }
    }

    pub fn from_terms(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|t| t.letters.len()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &NCPoly) -> NCPoly {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        NCPoly { terms }
    }

    pub fn scale(&self, c: C64) -> NCPoly {
        NCPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coef: t.coef * c,
                    letters: t.letters.clone(),
                })
                .collect(),
        }
    }

    pub fn mul(&self, other: &NCPoly) -> NCPoly {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for s in &self.terms {
            for t in &other.terms {
                let mut letters = s.letters.clone();
                letters.extend(t.letters.iter().cloned());
                terms.push(Term {
                    coef: s.coef * t.coef,
                    letters,
                });
            }
        }
        NCPoly { terms }
    }

    pub fn adjoint(&self) -> NCPoly {
        NCPoly {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coef: t.coef.conj(),
                    letters: t.letters.iter().rev().map(Letter::adjoint).collect(),
                })
                .collect(),
        }
    }

    /// `coefficient magnitude × Π ‖letter‖` summed over terms; an upper bound
    /// for the C*-norm of the represented element.
    pub fn norm_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef.norm() * t.letters.iter().map(|l| l.element.norm()).product::<f64>())
            .sum()
    }
}

/// Anything that acts linearly on the truncated space.
pub trait Operator {
    fn apply(&self, v: &CVec) -> CVec;

    /// Matrix entries between words of length `≤ N − d` are exact, where `d`
    /// is this value.
    fn exact_in_degree(&self) -> usize;
}

/// The compressed action of one factor element on the truncated space.
#[derive(Clone, Debug)]
pub struct RepOperator<'a> {
    space: &'a FreeFockSpace,
    factor: usize,
    local: CMat,
}

pub fn represent<'a>(space: &'a FreeFockSpace, factor: usize, a: &AlgebraElement) -> Result<RepOperator<'a>> {
    let local = space.factor(factor)?.rep(a)?;
    Ok(RepOperator { space, factor, local })
}

impl<'a> RepOperator<'a> {
    pub fn factor(&self) -> usize {
        self.factor
    }

    /// The GNS matrix of the element on its own factor.
    pub fn local_matrix(&self) -> &CMat {
        &self.local
    }

    pub fn adjoint(&self) -> RepOperator<'a> {
        RepOperator {
            space: self.space,
            factor: self.factor,
            local: self.local.adjoint(),
        }
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn to_sparse(&self) -> Vec<(usize, usize, C64)> {
        let n = self.space.total_dim();
        let mut out = Vec::new();
        for col in 0..n {
            let v = self.apply(&self.space.basis_vector(col));
            for (row, z) in v.iter().enumerate() {
                if *z != C64::new(0.0, 0.0) {
                    out.push((row, col, *z));
                }
            }
        }
        out
    }

    pub fn matrix(&self) -> CMat {
        let n = self.space.total_dim();
        let mut m = CMat::zeros(n, n);
        for (r, c, z) in self.to_sparse() {
            m[(r, c)] = z;
        }
        m
    }
}

impl Operator for RepOperator<'_> {
    fn apply(&self, v: &CVec) -> CVec {
        let s = self.space;
        let l = self.factor;
        let r = &self.local;
        let c = r.nrows() - 1;
        let zero = C64::new(0.0, 0.0);
        let mut out = CVec::zeros(s.total_dim());
        for (wi, w) in s.words().iter().enumerate() {
            let off = s.offset(wi);
            let size = s.block_size(wi);
            if w.letters().first() == Some(&l) {
                let rest = size / c;
                let toff = s.offset(s.tail(wi).expect("nonempty word has a tail"));
                for m1 in 0..c {
                    for t in 0..rest {
                        let x = v[off + m1 * rest + t];
                        if x == zero {
                            continue;
                        }
                        for m2 in 0..c {
                            out[off + m2 * rest + t] += r[(m2 + 1, m1 + 1)] * x;
                        }
                        out[toff + t] += r[(0, m1 + 1)] * x;
                    }
                }
            } else {
                let grown = s.prepend(wi, l).map(|pi| s.offset(pi));
                for t in 0..size {
                    let x = v[off + t];
                    if x == zero {
                        continue;
                    }
                    out[off + t] += r[(0, 0)] * x;
                    if let Some(poff) = grown {
                        for m in 0..c {
                            out[poff + m * size + t] += r[(m + 1, 0)] * x;
                        }
                    }
                }
            }
        }
        out
    }

    fn exact_in_degree(&self) -> usize {
        1
    }
}

/// A represented polynomial: sums of products of [`RepOperator`]s.
pub struct PolyOperator<'a> {
    terms: Vec<(C64, Vec<RepOperator<'a>>)>,
    degree: usize,
}

pub fn represent_poly<'a>(space: &'a FreeFockSpace, p: &NCPoly) -> Result<PolyOperator<'a>> {
    let terms = p
        .terms()
        .iter()
        .map(|t| {
            let ops = t
                .letters
                .iter()
                .map(|l| represent(space, l.factor, &l.element))
                .collect::<Result<Vec<_>>>()?;
            Ok((t.coef, ops))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PolyOperator {
        terms,
        degree: p.degree(),
    })
}

impl Operator for PolyOperator<'_> {
    fn apply(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(v.len());
        for (c, ops) in &self.terms {
            let mut w = v.clone();
            for op in ops.iter().rev() {
                w = op.apply(&w);
            }
            out += w * *c;
        }
        out
    }

    fn exact_in_degree(&self) -> usize {
        self.degree
    }
}

/// `⟨Tξ, ξ⟩`.
pub fn free_state(space: &FreeFockSpace, t: &dyn Operator) -> C64 {
    t.apply(&space.xi())[0]
}

fn check_degree(space: &FreeFockSpace, degree: usize) -> Result<()> {
    if degree > space.depth() {
        Err(Error::Exactness {
            degree,
            depth: space.depth(),
            required: degree,
        })
    } else {
        Ok(())
    }
}

/// The vector `x ξ`, exact for `degree(x) ≤ N`.
pub fn apply_to_xi(space: &FreeFockSpace, x: &NCPoly) -> Result<CVec> {
    check_degree(space, x.degree())?;
    Ok(represent_poly(space, x)?.apply(&space.xi()))
}

/// `φ(p)`, exact whenever `degree(p) ≤ N`.
pub fn moment(space: &FreeFockSpace, p: &NCPoly) -> Result<C64> {
    Ok(apply_to_xi(space, p)?[0])
}

/// A basis of `A°_ι`: centered matrix units, omitting the last diagonal unit
/// of the last block (it is a combination of the others modulo `1`).
pub fn centered_basis(space: &FreeFockSpace, factor: usize) -> Result<Vec<AlgebraElement>> {
    let g = space.factor(factor)?;
    let alg = g.algebra();
    let mut units = alg.basis();
    units.pop();
    units.iter().map(|u| g.state().center(u)).collect()
}

/// Largest `|φ(represent(ι, u)) − φ_ι(u)|` over all factors and matrix units.
pub fn state_restriction_residual(space: &FreeFockSpace) -> Result<f64> {
    let mut worst = 0.0f64;
    for (i, g) in space.factors().iter().enumerate() {
        for u in g.algebra().basis() {
            let lhs = free_state(space, &represent(space, i, &u)?);
            let rhs = g.state().eval(&u)?;
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}

#[derive(Clone, Debug, Serialize)]
pub struct FreenessReport {
    pub max_degree: usize,
    pub depth: usize,
    pub tested_words: usize,
    pub expected_words: usize,
    pub max_residual: f64,
    /// `(factor, basis index)` letters of the worst word, leftmost first.
    pub worst_word: Vec<(usize, usize)>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `φ(a_1 ⋯ a_m) = 0` for all alternating words of centered basis
/// elements up to `max_degree`.
pub fn freeness_report(space: &FreeFockSpace, max_degree: usize, tol: f64) -> Result<FreenessReport> {
    check_degree(space, max_degree)?;
    let s = space.factors().len();
    let bases = (0..s)
        .map(|f| {
            centered_basis(space, f)?
                .iter()
                .map(|a| represent(space, f, a))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    struct Walk<'b, 'a> {
        bases: &'b [Vec<RepOperator<'a>>],
        max_degree: usize,
        tested: usize,
        worst: f64,
        worst_word: Vec<(usize, usize)>,
        stack: Vec<(usize, usize)>,
    }

    impl Walk<'_, '_> {
        // `v = a_k ⋯ a_m ξ`, the stack holds those letters innermost-first
        fn visit(&mut self, v: &CVec, first: Option<usize>) {
            if self.stack.len() == self.max_degree {
                return;
            }
            for (f, ops) in self.bases.iter().enumerate() {
                if Some(f) == first {
                    continue;
                }
                for (bi, op) in ops.iter().enumerate() {
                    let nv = op.apply(v);
                    self.stack.push((f, bi));
                    self.tested += 1;
                    let r = nv[0].norm();
                    if r > self.worst || self.worst_word.is_empty() {
                        self.worst = self.worst.max(r);
                        self.worst_word = self.stack.iter().rev().copied().collect();
                    }
                    self.visit(&nv, Some(f));
                    self.stack.pop();
                }
            }
        }
    }

    let mut walk = Walk {
        bases: &bases,
        max_degree,
        tested: 0,
        worst: 0.0,
        worst_word: Vec::new(),
        stack: Vec::new(),
    };
    walk.visit(&space.xi(), None);

    // words ending (leftmost) in factor f, counted layer by layer
    let sizes: Vec<usize> = bases.iter().map(Vec::len).collect();
    let mut layer = sizes.clone();
    let mut expected = 0;
    for n in 1..=max_degree {
        if n > 1 {
            let total: usize = layer.iter().sum();
            layer = (0..s).map(|f| sizes[f] * (total - layer[f])).collect();
        }
        expected += layer.iter().sum::<usize>();
    }

    Ok(FreenessReport {
        max_degree,
        depth: space.depth(),
        tested_words: walk.tested,
        expected_words: expected,
        max_residual: walk.worst,
        worst_word: walk.worst_word,
        tolerance: tol,
        passed: walk.worst < tol && walk.tested == expected,
    })
}
