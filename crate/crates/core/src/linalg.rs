//! Small dense helpers on top of `nalgebra` for complex matrices.

use nalgebra::SymmetricEigen;

use crate::{CMat, CVec, C64};

/// Inner product linear in the first argument: `⟨x, y⟩ = y† x`.
pub fn inner(x: &CVec, y: &CVec) -> C64 {
    y.dotc(x)
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    m.is_square() && (m - m.adjoint()).iter().all(|z| z.norm() <= tol)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues sorted descending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    // symmetrize so the solver sees an exactly Hermitian input
    let h = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn min_hermitian_eigenvalue(m: &CMat) -> f64 {
    let (values, _) = hermitian_eigen(m);
    values.last().copied().unwrap_or(0.0)
}

/// Unitary `Q` with `Q e_0 = x` for a unit vector `x` (Householder reflection
/// followed by a phase on the first column).
pub fn frame_with_first(x: &CVec) -> CMat {
    let n = x.len();
    let x0 = x[0];
    let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { C64::new(1.0, 0.0) };
    let alpha = -phase;
    let mut w = x.clone();
    w[0] -= alpha;
    let ww = w.norm_squared();
    let mut h = CMat::identity(n, n);
    if ww > 0.0 {
        h -= (&w * w.adjoint()).scale(2.0 / ww);
    }
    // h x = alpha e_0, so h e_0 = x / alpha
    let mut q = h;
    for r in 0..n {
        q[(r, 0)] *= alpha;
    }
    q
}

/// Singular values in descending order.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn rank(m: &CMat, tol: f64) -> usize {
    singular_values(m).iter().filter(|&&s| s > tol).count()
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn column_space(m: &CMat, tol: f64) -> CMat {
    if m.ncols() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > tol)
        .collect();
    CMat::from_fn(m.nrows(), keep.len(), |r, c| u[(r, keep[c])])
}

/// Distance from `v` to the span of the orthonormal columns of `basis`.
pub fn distance_to_span(v: &CVec, basis: &CMat) -> f64 {
    let coeffs = basis.adjoint() * v;
    (v - basis * coeffs).norm()
}

/// Column-major flattening of a matrix into a vector.
pub fn vectorize(m: &CMat) -> CVec {
    CVec::from_iterator(m.len(), m.iter().copied())
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Kronecker product of a list of vectors, first factor slowest.
pub fn kron_vectors(parts: &[CVec]) -> CVec {
    let mut out = CVec::from_element(1, C64::new(1.0, 0.0));
    for p in parts {
        out = out.kronecker(p);
    }
    out
}
