//! GNS triple `(π, H, ξ)` of a finite-dimensional algebra with a state.
//!
//! The Gram matrix `G_{pq} = φ(u_p* u_q)` over the matrix-unit basis is
//! diagonalized; eigenvalues at or below `tol.faithful` span the null space
//! `{a : φ(a*a) = 0}` and are dropped. A Householder rotation then moves the
//! image of `1` onto the first frame vector, so `ξ` is always coordinate 0
//! and the centered space `H° = H ⊖ Cξ` is coordinates `1..dim`.

use std::sync::Arc;

use crate::blockalg::{AlgebraElement, BlockAlgebra, StateSpec, Tolerances};
use crate::error::{Error, Result};
use crate::linalg;
use crate::{CMat, CVec, C64};

#[derive(Clone, Debug)]
pub struct GnsSpace {
    state: StateSpec,
    /// `dim × linear_dim`: coefficients of `a` to the frame coordinates of `â`.
    embed: CMat,
    /// `linear_dim × dim`: right inverse of `embed`.
    lift: CMat,
    gram_eigenvalues: Vec<f64>,
    non_faithful: bool,
}

impl GnsSpace {
    pub fn construct(state: &StateSpec, tol: &Tolerances) -> Result<Self> {
        let alg = state.parent();
        let n = alg.linear_dim();
        let gram = gram_matrix(state);
        let (values, vectors) = linalg::hermitian_eigen(&gram);
        let kept: Vec<usize> = (0..n).filter(|&i| values[i] > tol.faithful).collect();
        if kept.is_empty() {
            return Err(Error::Validation(format!("state on `{}` has zero Gram matrix", alg.label())));
        }
        let r = kept.len();
        // E0 = Λ^{1/2} U†, L0 = U Λ^{-1/2}
        let e0 = CMat::from_fn(r, n, |row, col| vectors[(col, kept[row])].conj() * values[kept[row]].sqrt());
        let l0 = CMat::from_fn(n, r, |row, col| vectors[(row, kept[col])] / values[kept[col]].sqrt());

        let one = CVec::from_vec(alg.one().coefficients());
        let xi = &e0 * one;
        let xi_norm = xi.norm();
        if (xi_norm - 1.0).abs() > 1e-8 {
            return Err(Error::Validation(format!(
                "state on `{}`: ‖1̂‖ = {xi_norm} != 1",
                alg.label()
            )));
        }
        let q = linalg::frame_with_first(&(xi / C64::new(xi_norm, 0.0)));
        let embed = q.adjoint() * e0;
        let lift = l0 * q;
        let non_faithful = r < n;
        if non_faithful {
            log::debug!("GNS of `{}` is a quotient: rank {r} of {n}", alg.label());
        }
        Ok(Self {
            state: state.clone(),
            embed,
            lift,
            gram_eigenvalues: values,
            non_faithful,
        })
    }

    pub fn algebra(&self) -> &Arc<BlockAlgebra> {
        self.state.parent()
    }

    pub fn state(&self) -> &StateSpec {
        &self.state
    }

    pub fn label(&self) -> &str {
        self.algebra().label()
    }

    pub fn dim(&self) -> usize {
        self.embed.nrows()
    }

    pub fn complement_dim(&self) -> usize {
        self.dim() - 1
    }

    /// True when the Gram matrix had a null space (quotient GNS).
    pub fn is_non_faithful(&self) -> bool {
        self.non_faithful
    }

    pub fn gram_eigenvalues(&self) -> &[f64] {
        &self.gram_eigenvalues
    }

    pub fn xi(&self) -> CVec {
        let mut v = CVec::zeros(self.dim());
        v[0] = C64::new(1.0, 0.0);
        v
    }

    /// Frame coordinates of `â`.
    pub fn vector_of(&self, a: &AlgebraElement) -> Result<CVec> {
        self.check_parent(a)?;
        Ok(&self.embed * CVec::from_vec(a.coefficients()))
    }

    /// `π(a)` in the orthonormal frame.
    pub fn rep(&self, a: &AlgebraElement) -> Result<CMat> {
        self.check_parent(a)?;
        Ok(&self.embed * left_multiplication(a) * &self.lift)
    }

    /// `v − ⟨v, ξ⟩ ξ`.
    pub fn complement_project(&self, v: &CVec) -> CVec {
        let mut out = v.clone();
        out[0] = C64::new(0.0, 0.0);
        out
    }

    fn check_parent(&self, a: &AlgebraElement) -> Result<()> {
        let p = a.parent();
        if Arc::ptr_eq(p, self.algebra()) || **p == **self.algebra() {
            Ok(())
        } else {
            Err(Error::Structural(format!(
                "element of `{}` used with GNS space of `{}`",
                p.label(),
                self.label()
            )))
        }
    }
}

/// `G_{pq} = φ(u_p* u_q)` over matrix units; for `u_p = e_{ij}`, `u_q = e_{il}`
/// in the same block this is `ρ_{lj}`, and zero otherwise.
pub fn gram_matrix(state: &StateSpec) -> CMat {
    let alg = state.parent();
    let n = alg.linear_dim();
    let mut g = CMat::zeros(n, n);
    for (b, &d) in alg.block_dims().iter().enumerate() {
        let rho = &state.densities()[b];
        for i in 0..d {
            for j in 0..d {
                for l in 0..d {
                    g[(alg.unit_index(b, i, j), alg.unit_index(b, i, l))] = rho[(l, j)];
                }
            }
        }
    }
    g
}

/// Matrix of `x ↦ a·x` on matrix-unit coefficients.
pub fn left_multiplication(a: &AlgebraElement) -> CMat {
    let alg = a.parent();
    let n = alg.linear_dim();
    let mut m = CMat::zeros(n, n);
    for (b, &d) in alg.block_dims().iter().enumerate() {
        let blk = a.block(b);
        for i in 0..d {
            for k in 0..d {
                let v = blk[(i, k)];
                if v == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..d {
                    m[(alg.unit_index(b, i, j), alg.unit_index(b, k, j))] = v;
                }
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{instance_rng, random_element};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn two_point() -> (Arc<BlockAlgebra>, StateSpec) {
        let alg = BlockAlgebra::new("C2", vec![1, 1]).unwrap();
        let phi = StateSpec::diagonal(&alg, &[vec![0.5], vec![0.5]], &Tolerances::default()).unwrap();
        (alg, phi)
    }

    fn skewed_m2() -> (Arc<BlockAlgebra>, StateSpec) {
        let alg = BlockAlgebra::new("M2", vec![2]).unwrap();
        let rho = CMat::from_row_slice(
            2,
            2,
            &[c(0.7), C64::new(0.1, 0.05), C64::new(0.1, -0.05), c(0.3)],
        );
        let phi = StateSpec::new(&alg, vec![rho], &Tolerances::default()).unwrap();
        (alg, phi)
    }

    #[test]
    fn two_point_space() {
        let tol = Tolerances::default();
        let (alg, phi) = two_point();
        let g = GnsSpace::construct(&phi, &tol).unwrap();
        assert_eq!(g.dim(), 2);
        assert!(!g.is_non_faithful());
        let p = alg.matrix_unit(0, 0, 0).unwrap();
        let pc = phi.center(&p).unwrap();
        // φ(p°* p°) = 1/4 computed directly
        let direct = phi.eval(&pc.adjoint().multiply(&pc).unwrap()).unwrap();
        assert!((direct - c(0.25)).norm() < 1e-15);
        assert!((g.vector_of(&pc).unwrap().norm() - 0.5).abs() < 1e-14);
        let vp = g.vector_of(&p).unwrap();
        assert!((linalg::inner(&vp, &g.xi()) - c(0.5)).norm() < 1e-14);
    }

    #[test]
    fn tracial_m2_is_four_dimensional() {
        let tol = Tolerances::default();
        let alg = BlockAlgebra::new("M2", vec![2]).unwrap();
        let tr = StateSpec::normalized_trace(&alg, &tol).unwrap();
        assert_eq!(GnsSpace::construct(&tr, &tol).unwrap().dim(), 4);
    }

    #[test]
    fn pure_state_quotient_has_dimension_two() {
        let tol = Tolerances::default();
        let alg = BlockAlgebra::new("M2", vec![2]).unwrap();
        let pure = StateSpec::diagonal(&alg, &[vec![1.0, 0.0]], &tol).unwrap();
        // brute force: rank of the Gram matrix over e_ij
        let basis = alg.basis();
        let gram = CMat::from_fn(4, 4, |p, q| {
            pure.eval(&basis[p].adjoint().multiply(&basis[q]).unwrap()).unwrap()
        });
        assert_eq!(linalg::rank(&gram, 1e-12), 2);
        let g = GnsSpace::construct(&pure, &tol).unwrap();
        assert_eq!(g.dim(), 2);
        assert!(g.is_non_faithful());
    }

    #[test]
    fn vector_of_one_is_xi() {
        let tol = Tolerances::default();
        let (alg, phi) = skewed_m2();
        let g = GnsSpace::construct(&phi, &tol).unwrap();
        assert!((g.vector_of(&alg.one()).unwrap() - g.xi()).norm() < 1e-13);
    }

    #[test]
    fn complement_projection() {
        let tol = Tolerances::default();
        let (alg, phi) = skewed_m2();
        let g = GnsSpace::construct(&phi, &tol).unwrap();
        assert!(g.complement_project(&g.xi()).norm() == 0.0);
        let mut rng = instance_rng(3, 0);
        for _ in 0..20 {
            let a = random_element(&alg, &mut rng);
            let lhs = g.complement_project(&g.vector_of(&a).unwrap());
            let rhs = g.vector_of(&phi.center(&a).unwrap()).unwrap();
            assert!((lhs.clone() - rhs).norm() < 1e-12);
            assert!((g.complement_project(&lhs) - &lhs).norm() == 0.0);
        }
    }

    #[test]
    fn gram_condition_and_representation_properties() {
        let tol = Tolerances::default();
        let mut rng = instance_rng(11, 0);
        for (alg, phi) in [skewed_m2(), two_point()] {
            let g = GnsSpace::construct(&phi, &tol).unwrap();
            assert_eq!(g.dim(), alg.linear_dim());
            for _ in 0..100 {
                let a = random_element(&alg, &mut rng);
                let b = random_element(&alg, &mut rng);
                let (va, vb) = (g.vector_of(&a).unwrap(), g.vector_of(&b).unwrap());
                let expect = phi.eval(&b.adjoint().multiply(&a).unwrap()).unwrap();
                assert!((linalg::inner(&va, &vb) - expect).norm() < 1e-12);
                let ra = g.rep(&a).unwrap();
                let rb = g.rep(&b).unwrap();
                let rab = g.rep(&a.multiply(&b).unwrap()).unwrap();
                assert!((rab - &ra * &rb).norm() < 1e-12);
                assert!((g.rep(&a.adjoint()).unwrap() - ra.adjoint()).norm() < 1e-12);
            }
            assert!((g.rep(&alg.one()).unwrap() - CMat::identity(g.dim(), g.dim())).norm() < 1e-12);
            let basis = alg.basis();
            for u in &basis {
                let r = g.rep(u).unwrap();
                assert!((r[(0, 0)] - phi.eval(u).unwrap()).norm() < 1e-12);
            }
            let cols: Vec<CVec> = basis.iter().map(|u| g.rep(u).unwrap() * g.xi()).collect();
            let orbit = CMat::from_columns(&cols);
            assert_eq!(linalg::rank(&orbit, 1e-10), g.dim());
        }
    }

    #[test]
    fn quotient_representation_is_still_multiplicative() {
        let tol = Tolerances::default();
        let alg = BlockAlgebra::new("M3", vec![3]).unwrap();
        let pure = StateSpec::diagonal(&alg, &[vec![0.0, 1.0, 0.0]], &tol).unwrap();
        let g = GnsSpace::construct(&pure, &tol).unwrap();
        assert_eq!(g.dim(), 3);
        let mut rng = instance_rng(5, 0);
        for _ in 0..20 {
            let a = random_element(&alg, &mut rng);
            let b = random_element(&alg, &mut rng);
            let lhs = g.rep(&a.multiply(&b).unwrap()).unwrap();
            let rhs = g.rep(&a).unwrap() * g.rep(&b).unwrap();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }
}
