//! A faithful-looking state whose GNS vector is not cyclic for the commutant,
//! rebuilt at finite shift truncation.
//!
//! The Toeplitz algebra is replaced by `T_K = M_K ⊕ C`: the shift is
//! `S = S_K ⊕ 1` with `S_K e_i = e_{i+1}`, and the `C` summand plays the
//! character `ev∘π`, which kills the truncated compacts `M_K ⊕ 0`. On
//! `A = T_K ⊗ M₂ = M_{2K} ⊕ M₂`
//!
//! ```text
//! φ = ½ ψ₁⊗tr₂ + ½ ψ₀⊗ρ,   ψ₁ = diag(σ) ⊕ w,   ψ₀ = 0 ⊕ 1,   ρ(f₁₁) = 1,
//! ```
//!
//! and `V: L²(A,φ) → H' = L²(A,ψ₁⊗tr₂) ⊕ L²(A,ψ₀⊗ρ)`, `â ↦ â ⊕ â`, with the
//! half-weighted norm on `H'`.
//!
//! The symbol weight `w` is the knob between the two halves of the picture:
//! with `w = 0` the map `V` is onto and `ξ` is not cyclic for `π(A)'`, but
//! `φ` vanishes on `0 ⊕ f₂₂`; with `w > 0` the state is faithful and `V`
//! misses the block `0 ⊕ M₂` of the first summand. In finite dimensions a
//! faithful state always has a vector cyclic for the commutant, so both
//! cannot hold at once.

use std::sync::Arc;

use serde::Serialize;

use crate::blockalg::{AlgebraElement, BlockAlgebra, StateSpec, Tolerances};
use crate::error::{Error, Result};
use crate::gns::{left_multiplication, GnsSpace};
use crate::linalg;
use crate::{CMat, CVec, C64};

const EXACT: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct TruncatedToeplitz {
    k: usize,
    shift: CMat,
    algebra: Arc<BlockAlgebra>,
}

impl TruncatedToeplitz {
    pub fn new(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::Validation(format!("shift truncation K = {k}; need K ≥ 3")));
        }
        let mut shift = CMat::zeros(k, k);
        for i in 0..k - 1 {
            shift[(i + 1, i)] = C64::new(1.0, 0.0);
        }
        Ok(Self {
            k,
            shift,
            algebra: BlockAlgebra::new("toeplitz", vec![k, 1])?,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `S_K`.
    pub fn shift(&self) -> &CMat {
        &self.shift
    }

    pub fn algebra(&self) -> &Arc<BlockAlgebra> {
        &self.algebra
    }

    /// `S = S_K ⊕ 1`.
    pub fn shift_element(&self) -> AlgebraElement {
        self.algebra
            .element(vec![self.shift.clone(), CMat::identity(1, 1)])
            .expect("blocks follow the algebra")
    }

    /// `I − S_K*S_K`, the rank-one projection onto the last basis vector.
    pub fn truncation_defect(&self) -> CMat {
        CMat::identity(self.k, self.k) - self.shift.adjoint() * &self.shift
    }
}

#[derive(Clone, Debug)]
pub struct SplitGnsModel {
    toeplitz: TruncatedToeplitz,
    algebra: Arc<BlockAlgebra>,
    sigma: Vec<f64>,
    symbol_weight: f64,
    phi: StateSpec,
    gns_phi: GnsSpace,
    gns1: GnsSpace,
    gns0: GnsSpace,
    /// Coefficients of `a` to coordinates of `â` in `L²(A,ψ₁⊗tr₂)`.
    ident1: CMat,
    /// Coefficients of `a` to coordinates of `â` in `L²(A,ψ₀⊗ρ)`.
    ident0: CMat,
    /// `V` from the GNS frame of `φ` to orthonormal coordinates of `H'`.
    v: CMat,
}

/// Default diagonal weights `σ_j ∝ 2^{−(j+1)}` summing to `1 − w`.
pub fn default_sigma(k: usize, symbol_weight: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|j| 0.5f64.powi(j as i32 + 1)).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s * (1.0 - symbol_weight)).collect()
}

/// Builds the model with `ψ₁ = diag(σ) ⊕ w` and `ρ` a state on `M₂`.
pub fn build_example(
    k: usize,
    sigma: &[f64],
    symbol_weight: f64,
    rho: &CMat,
    tol: &Tolerances,
) -> Result<SplitGnsModel> {
    let toeplitz = TruncatedToeplitz::new(k)?;
    if sigma.len() != k {
        return Err(Error::Validation(format!("{} weights for K = {k}", sigma.len())));
    }
    if let Some(s) = sigma.iter().find(|&&s| s <= 0.0 || !s.is_finite()) {
        return Err(Error::Validation(format!("diagonal weight {s} is not strictly positive")));
    }
    if !(0.0..1.0).contains(&symbol_weight) {
        return Err(Error::Validation(format!("symbol weight {symbol_weight} outside [0, 1)")));
    }
    let total: f64 = sigma.iter().sum::<f64>() + symbol_weight;
    if (total - 1.0).abs() > tol.norm {
        return Err(Error::Validation(format!("ψ₁ has total mass {total}")));
    }
    let m2 = BlockAlgebra::new("m2", vec![2])?;
    let rho_state = StateSpec::new(&m2, vec![rho.clone()], tol)?;
    let purity = (rho * rho).trace().re;
    if (purity - 1.0).abs() > tol.norm {
        return Err(Error::Validation(format!("ρ is not pure: tr ρ² = {purity}")));
    }
    let f11 = rho_state.eval(&m2.matrix_unit(0, 0, 0)?)?;
    if (f11.re - 1.0).abs() > tol.norm || f11.im.abs() > tol.norm {
        return Err(Error::Validation(format!("ρ(f₁₁) = {f11}, expected 1")));
    }

    let algebra = BlockAlgebra::new("toeplitz⊗m2", vec![2 * k, 2])?;
    let half = CMat::identity(2, 2) * C64::new(0.5, 0.0);
    let diag = CMat::from_fn(k, k, |i, j| if i == j { C64::new(sigma[i], 0.0) } else { C64::new(0.0, 0.0) });
    let psi1_tr = StateSpec::new(
        &algebra,
        vec![diag.kronecker(&half), &half * C64::new(symbol_weight, 0.0)],
        tol,
    )?;
    let psi0_rho = StateSpec::new(&algebra, vec![CMat::zeros(2 * k, 2 * k), rho.clone()], tol)?;
    let phi = psi1_tr.mix(0.5, &psi0_rho, tol)?;

    let lin = algebra.linear_dim();
    let extra = if symbol_weight > 0.0 { 4 } else { 0 };
    let d1 = 4 * k * k + extra;
    let mut ident1 = CMat::zeros(d1, lin);
    for i in 0..k {
        for kk in 0..2 {
            for l in 0..2 {
                for (j, s) in sigma.iter().enumerate().take(k) {
                    let row = ((i * 2 + kk) * 2 + l) * k + j;
                    let col = algebra.unit_index(0, 2 * i + kk, 2 * j + l);
                    ident1[(row, col)] = C64::new((s / 2.0).sqrt(), 0.0);
                }
            }
        }
    }
    if extra > 0 {
        for r in 0..2 {
            for c in 0..2 {
                ident1[(4 * k * k + 2 * r + c, algebra.unit_index(1, r, c))] =
                    C64::new((symbol_weight / 2.0).sqrt(), 0.0);
            }
        }
    }
    let mut ident0 = CMat::zeros(2, lin);
    for r in 0..2 {
        ident0[(r, algebra.unit_index(1, r, 0))] = C64::new(1.0, 0.0);
    }

    let gns_phi = GnsSpace::construct(&phi, tol)?;
    let gns1 = GnsSpace::construct(&psi1_tr, tol)?;
    let gns0 = GnsSpace::construct(&psi0_rho, tol)?;

    let j = stack_half(&ident1, &ident0);
    let v = &j * pinv(&frame_matrix(&gns_phi)?)?;
    Ok(SplitGnsModel {
        toeplitz,
        algebra,
        sigma: sigma.to_vec(),
        symbol_weight,
        phi,
        gns_phi,
        gns1,
        gns0,
        ident1,
        ident0,
        v,
    })
}

/// `K`, default weights, `ρ = f₁₁`.
pub fn build_default(k: usize, symbol_weight: f64, tol: &Tolerances) -> Result<SplitGnsModel> {
    let mut rho = CMat::zeros(2, 2);
    rho[(0, 0)] = C64::new(1.0, 0.0);
    build_example(k, &default_sigma(k, symbol_weight), symbol_weight, &rho, tol)
}

fn stack_half(top: &CMat, bottom: &CMat) -> CMat {
    let s = C64::new(0.5f64.sqrt(), 0.0);
    let mut out = CMat::zeros(top.nrows() + bottom.nrows(), top.ncols());
    out.rows_mut(0, top.nrows()).copy_from(&(top * s));
    out.rows_mut(top.nrows(), bottom.nrows()).copy_from(&(bottom * s));
    out
}

/// Columns: GNS frame coordinates of each matrix unit.
fn frame_matrix(g: &GnsSpace) -> Result<CMat> {
    let cols = g
        .algebra()
        .basis()
        .iter()
        .map(|u| g.vector_of(u))
        .collect::<Result<Vec<_>>>()?;
    Ok(CMat::from_columns(&cols))
}

/// `M†(MM†)⁻¹` for `M` of full row rank.
fn pinv(m: &CMat) -> Result<CMat> {
    let gram = m * m.adjoint();
    let chol = gram
        .cholesky()
        .ok_or_else(|| Error::Validation("identification map is not of full row rank".into()))?;
    Ok(m.adjoint() * chol.inverse())
}

fn coeffs(a: &AlgebraElement) -> CVec {
    CVec::from_vec(a.coefficients())
}

impl SplitGnsModel {
    pub fn toeplitz(&self) -> &TruncatedToeplitz {
        &self.toeplitz
    }

    pub fn algebra(&self) -> &Arc<BlockAlgebra> {
        &self.algebra
    }

    pub fn phi(&self) -> &StateSpec {
        &self.phi
    }

    pub fn symbol_weight(&self) -> f64 {
        self.symbol_weight
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn dim_h1(&self) -> usize {
        self.ident1.nrows()
    }

    pub fn dim_h0(&self) -> usize {
        self.ident0.nrows()
    }

    pub fn dim_h_prime(&self) -> usize {
        self.dim_h1() + self.dim_h0()
    }

    /// `V` as a matrix into orthonormal coordinates of `H'`.
    pub fn v(&self) -> &CMat {
        &self.v
    }

    /// `x ⊗ y` for `x = x0 ⊕ x1 ∈ T_K` and `y ∈ M₂`.
    pub fn tensor(&self, x0: &CMat, x1: C64, y: &CMat) -> Result<AlgebraElement> {
        self.algebra.element(vec![x0.kronecker(y), y * x1])
    }

    /// `e_ij ⊗ f_kl`, all indices from 0.
    pub fn unit_tensor(&self, i: usize, j: usize, k: usize, l: usize) -> Result<AlgebraElement> {
        self.algebra.matrix_unit(0, 2 * i + k, 2 * j + l)
    }

    pub fn f(k: usize, l: usize) -> CMat {
        let mut m = CMat::zeros(2, 2);
        m[(k, l)] = C64::new(1.0, 0.0);
        m
    }

    /// `1 ⊗ f_kl`.
    pub fn one_tensor(&self, k: usize, l: usize) -> Result<AlgebraElement> {
        let n = self.toeplitz.k;
        self.tensor(&CMat::identity(n, n), C64::new(1.0, 0.0), &Self::f(k, l))
    }

    /// `S ⊗ 1`, `S* ⊗ 1` and `1 ⊗ f_kl`.
    pub fn generators(&self) -> Result<Vec<(String, AlgebraElement)>> {
        let s = self.toeplitz.shift.clone();
        let one = CMat::identity(2, 2);
        let mut out = vec![
            ("S⊗1".to_string(), self.tensor(&s, C64::new(1.0, 0.0), &one)?),
            ("S*⊗1".to_string(), self.tensor(&s.adjoint(), C64::new(1.0, 0.0), &one)?),
        ];
        for k in 0..2 {
            for l in 0..2 {
                out.push((format!("1⊗f{}{}", k + 1, l + 1), self.one_tensor(k, l)?));
            }
        }
        Ok(out)
    }

    /// `â ⊕ â` in orthonormal coordinates of `H'`, built from the explicit
    /// identification.
    pub fn split_vector(&self, a: &AlgebraElement) -> CVec {
        let c = coeffs(a);
        let s = C64::new(0.5f64.sqrt(), 0.0);
        let mut out = CVec::zeros(self.dim_h_prime());
        out.rows_mut(0, self.dim_h1()).copy_from(&(&self.ident1 * &c * s));
        out.rows_mut(self.dim_h1(), self.dim_h0()).copy_from(&(&self.ident0 * &c * s));
        out
    }

    /// `ξ = V 1̂`.
    pub fn xi(&self) -> CVec {
        self.split_vector(&self.algebra.one())
    }

    /// `π₁(a) ⊕ π₀(a)` on `H'`, by left multiplication through the identification.
    pub fn pi(&self, a: &AlgebraElement) -> Result<CMat> {
        let lm = left_multiplication(a);
        let p1 = &self.ident1 * &lm * pinv(&self.ident1)?;
        let p0 = &self.ident0 * &lm * pinv(&self.ident0)?;
        let n = self.dim_h_prime();
        let mut out = CMat::zeros(n, n);
        out.view_mut((0, 0), (self.dim_h1(), self.dim_h1())).copy_from(&p1);
        out.view_mut((self.dim_h1(), self.dim_h1()), (self.dim_h0(), self.dim_h0()))
            .copy_from(&p0);
        Ok(out)
    }

    /// Spanning set of `(1⊗1⊗B(ℓ²₂)⊗B(ℓ²_K)) ⊕ C` as sparse triplets on `H'`:
    /// the matrix units of the right tensor legs, then the unit of the second summand.
    pub fn stated_commutant(&self) -> Vec<Sparse> {
        let k = self.toeplitz.k;
        let q = 2 * k;
        let mut out = Vec::with_capacity(q * q + 1);
        for p in 0..q {
            for r in 0..q {
                out.push(Sparse(
                    (0..q)
                        .map(|left| (left * q + p, left * q + r, C64::new(1.0, 0.0)))
                        .collect(),
                ));
            }
        }
        let off = self.dim_h1();
        out.push(Sparse(
            (0..self.dim_h0())
                .map(|i| (off + i, off + i, C64::new(1.0, 0.0)))
                .collect(),
        ));
        out
    }
}

/// Sparse matrix as `(row, col, value)` triplets.
#[derive(Clone, Debug)]
pub struct Sparse(pub Vec<(usize, usize, C64)>);

impl Sparse {
    pub fn apply(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(v.len());
        for &(r, c, x) in &self.0 {
            out[r] += x * v[c];
        }
        out
    }

    /// `‖DP − PD‖_F`.
    pub fn commutator_norm(&self, p: &CMat) -> f64 {
        let mut c = CMat::zeros(p.nrows(), p.ncols());
        for &(r, k, x) in &self.0 {
            for j in 0..p.ncols() {
                c[(r, j)] += x * p[(k, j)];
            }
            for i in 0..p.nrows() {
                c[(i, k)] -= p[(i, r)] * x;
            }
        }
        c.norm()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OntoReport {
    pub k: usize,
    pub symbol_weight: f64,
    pub phi_faithful: bool,
    pub phi_min_eigenvalue: f64,
    pub dim_l2_phi: usize,
    pub dim_h1: usize,
    pub dim_h0: usize,
    pub dim_h_prime: usize,
    /// `‖U*U − I‖` for the maps from the GNS frames of both summands to
    /// the identified coordinates.
    pub identification_unitarity: f64,
    pub isometry_defect: f64,
    /// `max |‖â ⊕ â‖²_{H'} − φ(a*a)|` over matrix units.
    pub norm_identity_residual: f64,
    /// `V(e_ij⊗f_kl)̂` against `(ê_ij⊗f̂_kl) ⊕ 0`.
    pub unit_family_residual: f64,
    pub unit_family_second_component: f64,
    /// `V(1⊗f_i1)̂` against `(1̂⊗f̂_i1) ⊕ (1̂⊗f̂_i1)`.
    pub column_family_residual: f64,
    /// Distance of the second components from the basis `{1̂⊗f̂₁₁, 1̂⊗f̂₂₁}`.
    pub column_family_basis_residual: f64,
    /// Smallest singular value of the family images against `H'` (0 when
    /// they are fewer than `dim H'`).
    pub ontoness_sigma_min: f64,
    pub onto: bool,
    pub passed: bool,
}

pub fn verify_v_onto(model: &SplitGnsModel, tol: &Tolerances) -> Result<OntoReport> {
    let k = model.toeplitz.k;
    let faith = model.phi.is_faithful();

    let mut identification_unitarity = 0.0f64;
    for (g, ident) in [(&model.gns1, &model.ident1), (&model.gns0, &model.ident0)] {
        if g.dim() != ident.nrows() {
            return Err(Error::Validation(format!(
                "identified summand has dimension {} but the GNS space has {}",
                ident.nrows(),
                g.dim()
            )));
        }
        let u = ident * pinv(&frame_matrix(g)?)?;
        let d = u.ncols();
        identification_unitarity = identification_unitarity
            .max((u.adjoint() * &u - CMat::identity(d, d)).norm())
            .max((&u * u.adjoint() - CMat::identity(d, d)).norm());
    }

    let dphi = model.gns_phi.dim();
    let isometry_defect = (model.v.adjoint() * &model.v - CMat::identity(dphi, dphi)).norm();

    let mut norm_identity_residual = 0.0f64;
    for u in model.algebra.basis() {
        let lhs = model.split_vector(&u).norm_squared();
        let rhs = model.phi.eval(&u.adjoint().multiply(&u)?)?.re;
        norm_identity_residual = norm_identity_residual.max((lhs - rhs).abs());
    }

    let h1 = model.dim_h1();
    let s = C64::new(0.5f64.sqrt(), 0.0);
    let mut images = Vec::new();
    let mut unit_family_residual = 0.0f64;
    let mut unit_family_second_component = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            for kk in 0..2 {
                for l in 0..2 {
                    let a = model.unit_tensor(i, j, kk, l)?;
                    let img = &model.v * model.gns_phi.vector_of(&a)?;
                    // ê_ij⊗f̂_kl is √(σ_j/2) at the coordinate of (i,k,l,j)
                    let mut expect = CVec::zeros(model.dim_h_prime());
                    expect[((i * 2 + kk) * 2 + l) * k + j] = C64::new((model.sigma[j] / 2.0).sqrt(), 0.0) * s;
                    unit_family_residual = unit_family_residual.max((&img - expect).norm());
                    unit_family_second_component =
                        unit_family_second_component.max(img.rows(h1, model.dim_h0()).norm());
                    images.push(img);
                }
            }
        }
    }
    let mut column_family_residual = 0.0f64;
    let mut column_family_basis_residual = 0.0f64;
    for i in 0..2 {
        let a = model.one_tensor(i, 0)?;
        let img = &model.v * model.gns_phi.vector_of(&a)?;
        column_family_residual = column_family_residual.max((&img - model.split_vector(&a)).norm());
        let mut basis = CVec::zeros(model.dim_h0());
        basis[i] = C64::new(1.0, 0.0);
        column_family_basis_residual =
            column_family_basis_residual.max((img.rows(h1, model.dim_h0()) / s - basis).norm());
        images.push(img);
    }
    let fam = CMat::from_columns(&images);
    let ontoness_sigma_min = if fam.ncols() < fam.nrows() {
        0.0
    } else {
        linalg::singular_values(&fam).into_iter().fold(f64::INFINITY, f64::min)
    };
    let onto = ontoness_sigma_min > 1e-8;
    let passed = onto
        && isometry_defect < tol.norm
        && identification_unitarity < tol.norm
        && norm_identity_residual < EXACT
        && unit_family_residual < EXACT
        && unit_family_second_component < EXACT
        && column_family_residual < EXACT
        && column_family_basis_residual < EXACT;
    Ok(OntoReport {
        k,
        symbol_weight: model.symbol_weight,
        phi_faithful: faith.faithful,
        phi_min_eigenvalue: faith.margin,
        dim_l2_phi: dphi,
        dim_h1: h1,
        dim_h0: model.dim_h0(),
        dim_h_prime: model.dim_h_prime(),
        identification_unitarity,
        isometry_defect,
        norm_identity_residual,
        unit_family_residual,
        unit_family_second_component,
        column_family_residual,
        column_family_basis_residual,
        ontoness_sigma_min,
        onto,
        passed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorCommutator {
    pub generator: String,
    pub max_commutator: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FullCommutant {
    pub dimension: usize,
    pub stated_dimension: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct NoncyclicReport {
    pub k: usize,
    pub symbol_weight: f64,
    pub dim_h_prime: usize,
    pub spanning_set_size: usize,
    /// `max |⟨0 ⊕ (1̂⊗f̂₂₁), Dξ⟩|` over the spanning set.
    pub orthogonality_max: f64,
    pub commutators: Vec<GeneratorCommutator>,
    /// `‖I − S_K*S_K‖`: the shift fails to be an isometry only at the last coordinate.
    pub shift_truncation_defect: f64,
    pub shift_defect_rank: usize,
    /// `max ‖π(g)V − Vλ(g)‖` over generators.
    pub intertwining_residual: f64,
    pub orbit_rank: usize,
    pub noncyclic: bool,
    /// `dim π(A)'` from the matrix units of `A` against the size of the stated family.
    pub full_commutant: FullCommutant,
    pub passed: bool,
}

pub fn verify_noncyclic(model: &SplitGnsModel) -> Result<NoncyclicReport> {
    let k = model.toeplitz.k;
    let n = model.dim_h_prime();
    let xi = model.xi();
    let target = model.dim_h1() + 1;

    let stated = model.stated_commutant();
    let orbit: Vec<CVec> = stated.iter().map(|d| d.apply(&xi)).collect();
    let orthogonality_max = orbit.iter().map(|v| v[target].norm()).fold(0.0, f64::max);
    let orbit_rank = linalg::rank(&CMat::from_columns(&orbit), 1e-10);

    let gens = model.generators()?;
    let mut commutators = Vec::new();
    let mut intertwining_residual = 0.0f64;
    let mut pis = Vec::new();
    for (name, g) in &gens {
        let p = model.pi(g)?;
        let max_commutator = stated.iter().map(|d| d.commutator_norm(&p)).fold(0.0, f64::max);
        commutators.push(GeneratorCommutator {
            generator: name.clone(),
            max_commutator,
        });
        let lhs = &p * &model.v;
        let rhs = &model.v * model.gns_phi.rep(g)?;
        intertwining_residual = intertwining_residual.max((lhs - rhs).norm());
        pis.push(p);
    }

    let defect = model.toeplitz.truncation_defect();
    let dim_by_units = commutant_dimension_by_units(model)?;
    let full_commutant = FullCommutant {
        dimension: dim_by_units.round() as usize,
        stated_dimension: stated.len(),
    };
    // the stated family spans the whole commutant whenever the dimensions agree
    let complete = (dim_by_units - stated.len() as f64).abs() < 1e-6;
    let noncyclic = orbit_rank < n && complete;
    let passed = orthogonality_max < EXACT
        && commutators.iter().all(|c| c.max_commutator < EXACT)
        && intertwining_residual < 1e-10
        && noncyclic;
    Ok(NoncyclicReport {
        k,
        symbol_weight: model.symbol_weight,
        dim_h_prime: n,
        spanning_set_size: stated.len(),
        orthogonality_max,
        commutators,
        shift_truncation_defect: linalg::spectral_norm(&defect),
        shift_defect_rank: linalg::rank(&defect, 1e-12),
        intertwining_residual,
        orbit_rank,
        noncyclic,
        full_commutant,
        passed,
    })
}

/// `dim π(A)'` as the trace of the projection
/// `D ↦ Σ_b d_b⁻¹ Σ_ij π(e^b_ij) D π(e^b_ji)` onto the commutant, using
/// `tr(X ↦ PXQ) = tr P · tr Q`.
fn commutant_dimension_by_units(model: &SplitGnsModel) -> Result<f64> {
    let alg = &model.algebra;
    let p1 = pinv(&model.ident1)? * &model.ident1;
    let p0 = pinv(&model.ident0)? * &model.ident0;
    let trace = |e: &AlgebraElement| {
        let lm = left_multiplication(e);
        let t1: C64 = lm.component_mul(&p1.transpose()).sum();
        let t0: C64 = lm.component_mul(&p0.transpose()).sum();
        t1 + t0
    };
    let mut total = C64::new(0.0, 0.0);
    for (b, &d) in alg.block_dims().iter().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += trace(&alg.matrix_unit(b, i, j)?) * trace(&alg.matrix_unit(b, j, i)?);
            }
        }
        total += acc / d as f64;
    }
    Ok(total.re)
}

/// Dimension of `{D : DP = PD for all P in ps}`: the nullity of
/// `Σ_P ad_P* ad_P` on `n × n` matrices (column-major vectorization),
/// read off the pivots of a fully pivoted LU factorization.
#[cfg(test)]
fn commutant_dimension(ps: &[CMat], n: usize) -> usize {
    let nn = n * n;
    let mut gram = CMat::zeros(nn, nn);
    for col in 0..nn {
        let mut d = CMat::zeros(n, n);
        d[(col % n, col / n)] = C64::new(1.0, 0.0);
        let mut acc = CMat::zeros(n, n);
        for p in ps {
            let c = &d * p - p * &d;
            let pa = p.adjoint();
            acc += &c * &pa - &pa * &c;
        }
        gram.set_column(col, &CVec::from_column_slice(acc.as_slice()));
    }
    let lu = gram.full_piv_lu();
    let u = lu.u();
    let lead = u[(0, 0)].norm().max(1.0);
    let rank = (0..nn).take_while(|&i| u[(i, i)].norm() > 1e-9 * lead).count();
    nn - rank
}
