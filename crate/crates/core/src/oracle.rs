//! Dense reference model of the truncated free Fock space.
//!
//! Basis vectors are tuples `((ι_1, k_1), …, (ι_ℓ, k_ℓ))` with `k_j ≥ 1`
//! indexing the GNS frame of `H°_{ι_j}`, enumerated depth first (so the
//! ordering differs from [`FreeFockSpace`]). A letter acts by splitting off
//! the first tensor factor and applying the full local matrix to it:
//!
//! ```text
//! a · (ι, m) ⊗ rest = Σ_k R[k][m] (ι, k) ⊗ rest,   (ι, 0) ⊗ rest := rest,
//! ```
//!
//! with `m = 0` when the first letter is not `ι`. Everything is built from
//! dense matrices; only the GNS matrices of the factors are shared with the
//! main implementation.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::freefock::{FreeFockSpace, Word};
use crate::freerep::{Letter, NCPoly};
use crate::gns::GnsSpace;
use crate::{CMat, CVec, C64};

pub const MAX_ORACLE_DIM: usize = 5000;

type Tuple = Vec<(usize, usize)>;

pub struct DenseSpace<'a> {
    factors: Vec<Option<&'a GnsSpace>>,
    depth: usize,
    basis: Vec<Tuple>,
    index: HashMap<Tuple, usize>,
}

/// Dimension of the truncated space over `active` factors of the given GNS
/// dimensions, without building it.
pub fn count_dim(dims: &[usize], active: &[usize], depth: usize) -> usize {
    // ends[f] = number of basis tuples of the current length starting with f
    let mut total = 1usize;
    let mut ends: Vec<usize> = active.iter().map(|&f| dims[f] - 1).collect();
    for len in 1..=depth {
        let level: usize = ends.iter().sum();
        total = total.saturating_add(level);
        if len == depth || total > MAX_ORACLE_DIM {
            break;
        }
        ends = active
            .iter()
            .enumerate()
            .map(|(i, &f)| (dims[f] - 1).saturating_mul(level - ends[i]))
            .collect();
    }
    total
}

/// Largest depth in `lo..=hi` keeping the oracle below [`MAX_ORACLE_DIM`],
/// or `None` if even `lo` is too large.
pub fn fitting_depth(space: &FreeFockSpace, active: &[usize], lo: usize, hi: usize) -> Option<usize> {
    let dims: Vec<usize> = space.factors().iter().map(|g| g.dim()).collect();
    (lo..=hi.max(lo))
        .rev()
        .find(|&d| count_dim(&dims, active, d) <= MAX_ORACLE_DIM)
}

impl<'a> DenseSpace<'a> {
    /// Builds the model over the factors `active` of `space` (by index) to
    /// length `depth`.
    pub fn new(space: &'a FreeFockSpace, active: &[usize], depth: usize) -> Result<Self> {
        let mut factors = vec![None; space.factors().len()];
        for &f in active {
            factors[f] = Some(space.factor(f)?);
        }
        let mut active: Vec<usize> = active.to_vec();
        active.sort_unstable();
        active.dedup();
        let dims: Vec<usize> = space.factors().iter().map(|g| g.dim()).collect();
        let dim = count_dim(&dims, &active, depth);
        if dim > MAX_ORACLE_DIM {
            return Err(Error::Structural(format!(
                "oracle space has dimension {dim} > {MAX_ORACLE_DIM}; lower the depth or drop factors"
            )));
        }
        let mut basis = Vec::new();
        dfs(&mut basis, Vec::new(), &active, &dims, depth);
        let index = basis.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(Self {
            factors,
            depth,
            basis,
            index,
        })
    }

    /// All factors of `space` to its own depth.
    pub fn full(space: &'a FreeFockSpace) -> Result<Self> {
        let all: Vec<usize> = (0..space.factors().len()).collect();
        Self::new(space, &all, space.depth())
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    fn gns(&self, factor: usize) -> Result<&'a GnsSpace> {
        self.factors
            .get(factor)
            .copied()
            .flatten()
            .ok_or_else(|| Error::Structural(format!("factor {factor} is not active in the oracle")))
    }

    /// Matrix of `λ_ι(a)`.
    pub fn dense_represent(&self, letter: &Letter) -> Result<CMat> {
        let r = self.gns(letter.factor)?.rep(&letter.element)?;
        let iota = letter.factor;
        let mut out = CMat::zeros(self.dim(), self.dim());
        for (col, t) in self.basis.iter().enumerate() {
            let (m, rest) = match t.first() {
                Some(&(f, m)) if f == iota => (m, &t[1..]),
                _ => (0, &t[..]),
            };
            for k in 0..r.nrows() {
                let c = r[(k, m)];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let mut target: Tuple = Vec::with_capacity(rest.len() + 1);
                if k > 0 {
                    target.push((iota, k));
                }
                target.extend_from_slice(rest);
                if let Some(&row) = self.index.get(&target) {
                    out[(row, col)] += c;
                }
            }
        }
        Ok(out)
    }

    /// Matrix of a word, multiplied out densely.
    pub fn dense_word(&self, letters: &[Letter]) -> Result<CMat> {
        let mut out = CMat::identity(self.dim(), self.dim());
        for l in letters {
            out *= self.dense_represent(l)?;
        }
        Ok(out)
    }

    pub fn dense_poly(&self, p: &NCPoly) -> Result<CMat> {
        let mut out = CMat::zeros(self.dim(), self.dim());
        for t in p.terms() {
            out += self.dense_word(&t.letters)? * t.coef;
        }
        Ok(out)
    }

    pub fn vacuum(&self) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[0] = C64::new(1.0, 0.0);
        v
    }

    /// `⟨p Ω, Ω⟩`, exact when `deg p ≤ 2·depth`.
    pub fn dense_moment(&self, p: &NCPoly) -> Result<C64> {
        let mut total = C64::new(0.0, 0.0);
        for t in p.terms() {
            let v = self.apply_word(&t.letters, CMat::from_column_slice(self.dim(), 1, self.vacuum().as_slice()))?;
            total += t.coef * v[(0, 0)];
        }
        Ok(total)
    }

    /// `a_1 ⋯ a_m X`, applying the letters right to left.
    pub fn apply_word(&self, letters: &[Letter], mut x: CMat) -> Result<CMat> {
        for l in letters.iter().rev() {
            x = self.dense_represent(l)? * x;
        }
        Ok(x)
    }

    /// The tensor `ζ_1 ⊗ … ⊗ ζ_ℓ` over `word`, each `ζ_j` in GNS frame
    /// coordinates with vanishing `ξ`-component.
    pub fn dense_tensor(&self, word: &[usize], zetas: &[CVec]) -> Result<CVec> {
        if word.len() != zetas.len() {
            return Err(Error::Structural("one vector per letter".into()));
        }
        let mut v = CVec::zeros(self.dim());
        for (i, t) in self.basis.iter().enumerate() {
            if t.len() != word.len() || t.iter().zip(word).any(|(&(f, _), &w)| f != w) {
                continue;
            }
            v[i] = t.iter().zip(zetas).map(|(&(_, k), z)| z[k]).product();
        }
        for z in zetas {
            if z[0].norm() > 1e-12 {
                return Err(Error::Validation("tensor factor has a ξ-component".into()));
            }
        }
        Ok(v)
    }

    /// Dense `V_{(ζ_1, …, ζ_{n−1}, ι_n)}`.
    pub fn dense_isometry(&self, iotas: &[usize], zetas: &[CVec]) -> Result<CMat> {
        let n = iotas.len();
        if n == 0 || zetas.len() + 1 != n {
            return Err(Error::Structural("isometry needs n factors and n − 1 vectors".into()));
        }
        let d = self.gns(iotas[n - 1])?.dim();
        let mut out = CMat::zeros(self.dim(), d);
        out.set_column(0, &self.dense_tensor(&iotas[..n - 1], zetas)?);
        for m in 1..d {
            let mut e = CVec::zeros(d);
            e[m] = C64::new(1.0, 0.0);
            let mut all = zetas.to_vec();
            all.push(e);
            out.set_column(m, &self.dense_tensor(iotas, &all)?);
        }
        Ok(out)
    }

    /// `V* a_1 ⋯ a_m V`, exact when `depth ≥ n + ⌊m/2⌋`.
    pub fn dense_compress(&self, v: &CMat, letters: &[Letter]) -> Result<CMat> {
        Ok(v.adjoint() * self.apply_word(letters, v.clone())?)
    }

    /// For each oracle basis index, the matching coordinate of `space`.
    pub fn permutation_to(&self, space: &FreeFockSpace) -> Result<Vec<usize>> {
        self.basis
            .iter()
            .map(|t| {
                let word = Word::new(t.iter().map(|&(f, _)| f).collect())?;
                let wi = space.word_index(&word).ok_or_else(|| {
                    Error::Structural(format!("word {word} is not in the truncated space"))
                })?;
                let multi: Vec<usize> = t.iter().map(|&(_, k)| k - 1).collect();
                space.coordinate(wi, &multi)
            })
            .collect()
    }

    /// Carries a vector of `space` over to the oracle basis, dropping
    /// coordinates outside it.
    pub fn pull(&self, perm: &[usize], v: &CVec) -> CVec {
        CVec::from_fn(self.dim(), |i, _| v[perm[i]])
    }
}

fn dfs(out: &mut Vec<Tuple>, t: Tuple, active: &[usize], dims: &[usize], depth: usize) {
    if t.len() == depth {
        out.push(t);
        return;
    }
    let last = t.last().map(|&(f, _)| f);
    out.push(t.clone());
    for &f in active {
        if Some(f) == last {
            continue;
        }
        for k in 1..dims[f] {
            let mut c = t.clone();
            c.push((f, k));
            dfs(out, c, active, dims, depth);
        }
    }
}
