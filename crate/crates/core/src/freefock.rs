//! The truncated free-product Hilbert space
//!
//! ```text
//! H = Cξ ⊕ ⨁_{n ≤ N, ι_1 ≠ ι_2 ≠ … ≠ ι_n} H°_{ι_1} ⊗ … ⊗ H°_{ι_n}
//! ```
//!
//! Words are ordered by length, then lexicographically. Each word owns a
//! contiguous block of coordinates laid out row-major over its letters
//! (first letter slowest), so acting on the leftmost tensor slot is a
//! blocked operation.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::gns::GnsSpace;
use crate::linalg;
use crate::{CVec, C64};

/// An alternating tuple of factor indices; the empty word indexes `Cξ`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if let Some(j) = indices.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::Structural(format!(
                "word {indices:?} is not alternating at position {j}"
            )));
        }
        Ok(Self(indices))
    }

    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// All alternating words over `num_factors` letters of length `0..=depth`,
/// ordered by (length, lexicographic).
pub fn enumerate_words(num_factors: usize, depth: usize) -> Vec<Word> {
    let mut out = vec![Word::vacuum()];
    let mut layer = vec![Vec::<usize>::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &layer {
            for l in 0..num_factors {
                if w.last() != Some(&l) {
                    let mut nw = w.clone();
                    nw.push(l);
                    next.push(nw);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        out.extend(next.iter().cloned().map(Word));
        layer = next;
    }
    out
}

#[derive(Clone, Debug)]
pub struct FreeFockSpace {
    factors: Vec<GnsSpace>,
    depth: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    offsets: Vec<usize>,
    sizes: Vec<usize>,
    /// Index of `w[1..]` for nonempty `w`.
    tails: Vec<Option<usize>>,
    /// `prepend[w][ι]`: index of `ι·w` when alternating and within depth.
    prepend: Vec<Vec<Option<usize>>>,
    total_dim: usize,
}

impl FreeFockSpace {
    pub fn build(factors: Vec<GnsSpace>, depth: usize) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::Structural("free product needs at least one factor".into()));
        }
        if depth == 0 {
            return Err(Error::Structural("truncation depth must be at least 1".into()));
        }
        for (i, f) in factors.iter().enumerate() {
            if f.complement_dim() == 0 {
                return Err(Error::TrivialFactor { label: f.label().to_string() });
            }
            if factors[..i].iter().any(|g| g.label() == f.label()) {
                return Err(Error::Structural(format!("duplicate factor label `{}`", f.label())));
            }
        }
        let words = enumerate_words(factors.len(), depth);
        let index: HashMap<Word, usize> = words.iter().cloned().enumerate().map(|(i, w)| (w, i)).collect();
        let mut offsets = Vec::with_capacity(words.len());
        let mut sizes = Vec::with_capacity(words.len());
        let mut total = 0;
        for w in &words {
            let size: usize = w.0.iter().map(|&l| factors[l].complement_dim()).product();
            offsets.push(total);
            sizes.push(size);
            total += size;
        }
        let tails = words
            .iter()
            .map(|w| (!w.is_empty()).then(|| index[&Word(w.0[1..].to_vec())]))
            .collect();
        let prepend = words
            .iter()
            .map(|w| {
                (0..factors.len())
                    .map(|l| {
                        if w.len() >= depth || w.0.first() == Some(&l) {
                            None
                        } else {
                            let mut nw = Vec::with_capacity(w.len() + 1);
                            nw.push(l);
                            nw.extend_from_slice(&w.0);
                            index.get(&Word(nw)).copied()
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            factors,
            depth,
            words,
            index,
            offsets,
            sizes,
            tails,
            prepend,
            total_dim: total,
        })
    }

    pub fn factors(&self) -> &[GnsSpace] {
        &self.factors
    }

    pub fn factor(&self, i: usize) -> Result<&GnsSpace> {
        self.factors
            .get(i)
            .ok_or_else(|| Error::Structural(format!("no factor with index {i}")))
    }

    pub fn factor_index(&self, label: &str) -> Option<usize> {
        self.factors.iter().position(|f| f.label() == label)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn word_index(&self, w: &Word) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn offset(&self, wi: usize) -> usize {
        self.offsets[wi]
    }

    pub fn block_size(&self, wi: usize) -> usize {
        self.sizes[wi]
    }

    pub(crate) fn tail(&self, wi: usize) -> Option<usize> {
        self.tails[wi]
    }

    pub(crate) fn prepend(&self, wi: usize, factor: usize) -> Option<usize> {
        self.prepend[wi][factor]
    }

    /// Coordinate of the product basis vector `e_{m_1} ⊗ … ⊗ e_{m_n}`, with
    /// `m_j` indexing `H°` (frame index minus one).
    pub fn coordinate(&self, wi: usize, multi: &[usize]) -> Result<usize> {
        let w = &self.words[wi];
        if multi.len() != w.len() {
            return Err(Error::Structural(format!("multi-index {multi:?} does not fit word {w}")));
        }
        let mut pos = 0;
        for (&l, &m) in w.0.iter().zip(multi) {
            let c = self.factors[l].complement_dim();
            if m >= c {
                return Err(Error::Structural(format!("index {m} outside H° of factor {l}")));
            }
            pos = pos * c + m;
        }
        Ok(self.offsets[wi] + pos)
    }

    /// Inverse of [`FreeFockSpace::coordinate`].
    pub fn locate(&self, coord: usize) -> (usize, Vec<usize>) {
        // blocks are nonempty, so offsets are strictly increasing
        let wi = match self.offsets.binary_search(&coord) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let w = &self.words[wi];
        let mut rem = coord - self.offsets[wi];
        let mut multi = vec![0; w.len()];
        for (j, &l) in w.0.iter().enumerate().rev() {
            let c = self.factors[l].complement_dim();
            multi[j] = rem % c;
            rem /= c;
        }
        (wi, multi)
    }

    pub fn xi(&self) -> CVec {
        let mut v = CVec::zeros(self.total_dim);
        v[0] = C64::new(1.0, 0.0);
        v
    }

    pub fn basis_vector(&self, coord: usize) -> CVec {
        let mut v = CVec::zeros(self.total_dim);
        v[coord] = C64::new(1.0, 0.0);
        v
    }

    pub fn projection(&self, word: &Word) -> Result<SummandProjection> {
        let wi = self
            .word_index(word)
            .ok_or_else(|| Error::Structural(format!("word {word} is not in the truncated space")))?;
        Ok(SummandProjection {
            word: word.clone(),
            offset: self.offsets[wi],
            size: self.sizes[wi],
        })
    }

    /// `ζ_1 ⊗ … ⊗ ζ_n` placed in the block of `word`. Components are given in
    /// the GNS frame of their factor and must lie in `H°`.
    pub fn product_vector(&self, word: &Word, components: &[CVec]) -> Result<CVec> {
        let wi = self
            .word_index(word)
            .ok_or_else(|| Error::Structural(format!("word {word} is not in the truncated space")))?;
        if components.len() != word.len() {
            return Err(Error::Structural(format!(
                "word {word} needs {} components, got {}",
                word.len(),
                components.len()
            )));
        }
        let mut parts = Vec::with_capacity(word.len());
        for (j, (&l, z)) in word.0.iter().zip(components).enumerate() {
            let g = &self.factors[l];
            if z.len() != g.dim() {
                return Err(Error::Validation(format!(
                    "component {j} has length {}, factor `{}` has GNS dimension {}",
                    z.len(),
                    g.label(),
                    g.dim()
                )));
            }
            if z[0].norm() > 1e-10 * z.norm().max(1.0) {
                return Err(Error::Validation(format!(
                    "component {j} has ξ-coefficient {} and is not in H° of `{}`",
                    z[0],
                    g.label()
                )));
            }
            parts.push(z.rows(1, g.complement_dim()).into_owned());
        }
        let block = linalg::kron_vectors(&parts);
        let mut v = CVec::zeros(self.total_dim);
        v.rows_mut(self.offsets[wi], self.sizes[wi]).copy_from(&block);
        Ok(v)
    }
}

/// Orthogonal projection onto one word's summand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummandProjection {
    word: Word,
    offset: usize,
    size: usize,
}

impl SummandProjection {
    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn rank(&self) -> usize {
        self.size
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.size
    }

    pub fn apply(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(v.len());
        out.rows_mut(self.offset, self.size).copy_from(&v.rows(self.offset, self.size));
        out
    }

    pub fn to_dense(&self, total_dim: usize) -> crate::CMat {
        let mut m = crate::CMat::zeros(total_dim, total_dim);
        for i in self.range() {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }
}
