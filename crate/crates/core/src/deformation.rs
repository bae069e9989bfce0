//! Beltrami differentials, contraction, the exponential operator, deformed
//! operators and bigradings, and Kodaira-Spencer classes.
//!
//! A Beltrami differential `φ = φ^α_β̄ ω̄^β ⊗ e_α` is stored as the `n × n`
//! matrix `Φ` with `Φ[(α-1, β-1)] = φ^α_β̄`; a family is a power series of
//! such matrices.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::error::Error;
use crate::exterior::{split_by_bidegree, Bidegree, ExteriorBasis, Form, LieModel};
use crate::field::C64;
use crate::linalg;
use crate::series::{Exponent, FormSeries, PowerSeries};

/// Smallest singular value of the deformed coframe below which it counts as
/// degenerate.
pub const FRAME_TOL: f64 = 1e-6;

/// One summand `coefficient · t^exponent · ω̄^β ⊗ e_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct BeltramiTerm {
    pub exponent: Vec<u32>,
    pub alpha: usize,
    pub beta: usize,
    pub coefficient: C64,
}

#[derive(Clone, Debug)]
pub struct Beltrami {
    n: usize,
    series: PowerSeries<DMatrix<C64>>,
}

impl Beltrami {
    /// Wraps a matrix series; the constant term must vanish.
    pub fn new(n: usize, series: PowerSeries<DMatrix<C64>>) -> Result<Self, Error> {
        let z = series.zero_coefficient();
        if z.nrows() != n || z.ncols() != n {
            return Err(Error::MalformedFamily(alloc::format!(
                "coefficients must be {n}x{n} matrices"
            )));
        }
        let c0 = series.coefficient(&Exponent::zero(series.vars()));
        if linalg::max_abs(&c0) > 0.0 {
            return Err(Error::MalformedFamily(String::from("φ(0) must vanish")));
        }
        Ok(Self { n, series })
    }

    pub fn from_terms(n: usize, m: usize, order: usize, terms: &[BeltramiTerm]) -> Result<Self, Error> {
        if m == 0 {
            return Err(Error::MalformedFamily(String::from("m must be at least 1")));
        }
        if order == 0 {
            return Err(Error::MalformedFamily(String::from("N must be at least 1")));
        }
        let mut series = PowerSeries::new(m, order, DMatrix::zeros(n, n));
        for t in terms {
            if t.exponent.len() != m {
                return Err(Error::MalformedFamily(alloc::format!(
                    "exponent {:?} has length {}, expected {m}",
                    t.exponent,
                    t.exponent.len()
                )));
            }
            if t.alpha == 0 || t.beta == 0 || t.alpha > n || t.beta > n {
                return Err(Error::MalformedFamily(alloc::format!(
                    "indices ({}, {}) outside 1..={n}",
                    t.alpha,
                    t.beta
                )));
            }
            if !(t.coefficient.re.is_finite() && t.coefficient.im.is_finite()) {
                return Err(Error::MalformedFamily(String::from("non-finite coefficient")));
            }
            let e = Exponent(t.exponent.clone());
            if e.degree() == 0 && t.coefficient != C64::zero() {
                return Err(Error::MalformedFamily(String::from("φ(0) must vanish")));
            }
            let mut m = DMatrix::zeros(n, n);
            m[(t.alpha - 1, t.beta - 1)] = t.coefficient;
            series.accumulate(e, &m);
        }
        Self::new(n, series)
    }

    pub fn zero(n: usize, m: usize, order: usize) -> Self {
        Self {
            n,
            series: PowerSeries::new(m, order, DMatrix::zeros(n, n)),
        }
    }

    /// `φ(t) = ∑_i t_i A_i`.
    pub fn linear(n: usize, order: usize, directions: &[DMatrix<C64>]) -> Result<Self, Error> {
        let m = directions.len();
        let mut series = PowerSeries::new(m, order, DMatrix::zeros(n, n));
        for (i, a) in directions.iter().enumerate() {
            series.set(Exponent::unit(m, i), a.clone());
        }
        Self::new(n, series)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn vars(&self) -> usize {
        self.series.vars()
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn series(&self) -> &PowerSeries<DMatrix<C64>> {
        &self.series
    }

    /// Same family truncated at a different order.
    pub fn with_order(&self, order: usize) -> Self {
        let mut series = PowerSeries::new(self.vars(), order, DMatrix::zeros(self.n, self.n));
        for (e, c) in self.series.terms() {
            series.set(e.clone(), c.clone());
        }
        Self { n: self.n, series }
    }

    /// `Φ(t)`.
    pub fn at(&self, t: &[C64]) -> DMatrix<C64> {
        self.series.eval(t)
    }

    /// Coefficient of `t_i`, the first-order term in direction `i`.
    pub fn first_order(&self, i: usize) -> DMatrix<C64> {
        self.series.coefficient(&Exponent::unit(self.vars(), i))
    }

    /// Series of contraction operators `i_{φ_e}`, one per stored exponent.
    pub fn contraction_series(&self, basis: &ExteriorBasis) -> PowerSeries<DMatrix<C64>> {
        self.series.map(|phi| contraction_matrix(basis, phi))
    }
}

// ----- contraction and exponential ------------------------------------------

/// `i_φ ω^α = ∑_β Φ[α][β] ω̄^β` as a form.
pub fn contract_generator(basis: &ExteriorBasis, phi: &DMatrix<C64>, alpha: usize) -> Form {
    let mut v = Form::zeros(basis.dim());
    for beta in 1..=basis.n() {
        v[basis.antiholomorphic_generator(beta)] += phi[(alpha - 1, beta - 1)];
    }
    v
}

/// Matrix of the even derivation `i_φ`.
pub fn contraction_matrix(basis: &ExteriorBasis, phi: &DMatrix<C64>) -> DMatrix<C64> {
    let n = basis.n();
    let mut images: Vec<Vec<C64>> = Vec::with_capacity(2 * n);
    for alpha in 1..=n {
        images.push(contract_generator(basis, phi, alpha).as_slice().to_vec());
    }
    for _ in 0..n {
        images.push(vec![C64::zero(); basis.dim()]);
    }
    basis.columns_to_matrix(&basis.extend_derivation(&images, false))
}

/// `e^{i_φ} = ∑_k i_φ^k / k!`, a finite sum since `i_φ` lowers the
/// holomorphic degree.
pub fn exp_contraction_matrix(basis: &ExteriorBasis, phi: &DMatrix<C64>) -> DMatrix<C64> {
    let i_phi = contraction_matrix(basis, phi);
    let dim = basis.dim();
    let mut acc = DMatrix::identity(dim, dim);
    let mut term = DMatrix::identity(dim, dim);
    for k in 1..=basis.n() {
        term = &i_phi * term * C64::new(1.0 / k as f64, 0.0);
        acc += &term;
    }
    acc
}

pub fn contract(basis: &ExteriorBasis, phi: &DMatrix<C64>, a: &Form) -> Form {
    contraction_matrix(basis, phi) * a
}

pub fn exp_contract(basis: &ExteriorBasis, phi: &DMatrix<C64>, a: &Form) -> Form {
    exp_contraction_matrix(basis, phi) * a
}

/// `i_{φ(t)} a(t)` as a series.
pub fn contract_series(basis: &ExteriorBasis, phi: &Beltrami, a: &FormSeries) -> Result<FormSeries, Error> {
    phi.contraction_series(basis).bilinear(a, |m, v| m * v)
}

/// `e^{i_{φ(t)}} a(t)` as a series.
pub fn exp_contract_series(basis: &ExteriorBasis, phi: &Beltrami, a: &FormSeries) -> Result<FormSeries, Error> {
    let ops = phi.contraction_series(basis);
    let mut acc = a.clone();
    let mut term = a.clone();
    for k in 1..=basis.n() {
        term = ops.bilinear(&term, |m, v| m * v)?.scale(C64::new(1.0 / k as f64, 0.0));
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

// ----- deformed coframe -----------------------------------------------------

/// `η^α = ω^α + i_φ ω^α`.
pub fn deformed_coframe(basis: &ExteriorBasis, phi: &DMatrix<C64>) -> Vec<Form> {
    (1..=basis.n())
        .map(|alpha| {
            let mut eta = contract_generator(basis, phi, alpha);
            eta[basis.holomorphic_generator(alpha)] += C64::new(1.0, 0.0);
            eta
        })
        .collect()
}

/// Smallest singular value of the coframe matrix `[[I, Φ], [Φ̄, I]]`.
pub fn frame_singular_value(phi: &DMatrix<C64>) -> f64 {
    let n = phi.nrows();
    let mut m = DMatrix::<C64>::identity(2 * n, 2 * n);
    m.view_mut((0, n), (n, n)).copy_from(phi);
    m.view_mut((n, 0), (n, n)).copy_from(&phi.map(|z| z.conj()));
    linalg::smallest_singular_value(&m)
}

pub fn check_frame(phi: &DMatrix<C64>) -> Result<(), Error> {
    let s = frame_singular_value(phi);
    if s < FRAME_TOL {
        return Err(Error::FrameDegenerate {
            smallest_singular_value: s,
        });
    }
    Ok(())
}

/// Matrix of the algebra map `ω^α ↦ η^α`, `ω̄^α ↦ η̄^α`: column `j` is the
/// deformed monomial corresponding to basis monomial `j`.
pub fn coframe_change(basis: &ExteriorBasis, phi: &DMatrix<C64>) -> DMatrix<C64> {
    let eta = deformed_coframe(basis, phi);
    let mut images: Vec<Vec<C64>> = eta.iter().map(|e| e.as_slice().to_vec()).collect();
    for e in &eta {
        images.push(basis.conjugate(e).as_slice().to_vec());
    }
    basis.columns_to_matrix(&basis.extend_homomorphism(&images))
}

/// `max_α ‖dη^α ∧ η¹ ∧ ⋯ ∧ ηⁿ‖`.
pub fn integrability_residual(model: &LieModel, phi: &DMatrix<C64>) -> Result<f64, Error> {
    check_frame(phi)?;
    let basis = model.basis();
    let eta = deformed_coframe(basis, phi);
    let mut top = basis.form_unit(basis.degree(0).start);
    for e in &eta {
        top = basis.wedge(&top, e);
    }
    Ok(eta
        .iter()
        .map(|e| basis.wedge(&(model.d() * e), &top).norm())
        .fold(0.0, f64::max))
}

// ----- deformed operators ---------------------------------------------------

/// `d_φ = ∂ + ∂̄_φ` with `∂̄_φ = ∂̄ - 𝓛^{1,0}_φ`, `𝓛^{1,0}_φ = i_φ∂ - ∂i_φ`,
/// together with the conjugated differential `e^{-i_φ} d e^{i_φ}`.
#[derive(Clone, Debug)]
pub struct DeformedOperators {
    pub phi: DMatrix<C64>,
    pub contraction: DMatrix<C64>,
    pub exp: DMatrix<C64>,
    pub exp_inv: DMatrix<C64>,
    pub lie: DMatrix<C64>,
    pub delbar_phi: DMatrix<C64>,
    pub d_phi: DMatrix<C64>,
    pub conjugated_d: DMatrix<C64>,
}

impl DeformedOperators {
    pub fn new(model: &LieModel, phi: &DMatrix<C64>) -> Self {
        let basis = model.basis();
        let contraction = contraction_matrix(basis, phi);
        let exp = exp_contraction_matrix(basis, phi);
        let exp_inv = exp_contraction_matrix(basis, &(-phi));
        let lie = &contraction * model.del() - model.del() * &contraction;
        let delbar_phi = model.delbar() - &lie;
        let d_phi = model.del() + &delbar_phi;
        let conjugated_d = &exp_inv * model.d() * &exp;
        Self {
            phi: phi.clone(),
            contraction,
            exp,
            exp_inv,
            lie,
            delbar_phi,
            d_phi,
            conjugated_d,
        }
    }

    /// `max |e^{-i_φ} d e^{i_φ} - d_φ|` over all basis monomials.
    pub fn identity_residual(&self) -> f64 {
        linalg::max_column_norm(&(&self.conjugated_d - &self.d_phi))
    }

    pub fn d_phi_squared(&self) -> f64 {
        linalg::max_abs(&(&self.d_phi * &self.d_phi))
    }

    /// `∂∂̄_φ`.
    pub fn ddbar_phi(&self, model: &LieModel) -> DMatrix<C64> {
        model.del() * &self.delbar_phi
    }
}

/// The bigrading of `X_t` carried on the fixed algebra. In η-coordinates the
/// differential is `P⁻¹ d P` with `P` = [`coframe_change`].
#[derive(Clone, Debug)]
pub struct DeformedBigrading {
    pub change: DMatrix<C64>,
    pub change_inv: DMatrix<C64>,
    pub d_eta: DMatrix<C64>,
    pub del_eta: DMatrix<C64>,
    pub delbar_eta: DMatrix<C64>,
    pub integrability: f64,
}

impl DeformedBigrading {
    pub fn new(model: &LieModel, phi: &DMatrix<C64>, tol: f64) -> Result<Self, Error> {
        let residual = integrability_residual(model, phi)?;
        if residual > tol {
            return Err(Error::NotIntegrableAt { residual });
        }
        let basis = model.basis();
        let change = coframe_change(basis, phi);
        let change_inv = change
            .clone()
            .try_inverse()
            .ok_or(Error::FrameDegenerate {
                smallest_singular_value: 0.0,
            })?;
        let d_eta = &change_inv * model.d() * &change;
        let (del_eta, delbar_eta, _) = split_by_bidegree(basis, &d_eta);
        Ok(Self {
            change,
            change_inv,
            d_eta,
            del_eta,
            delbar_eta,
            integrability: residual,
        })
    }

    /// Columns spanning `A^{p,q}_t`.
    pub fn block_span(&self, basis: &ExteriorBasis, b: Bidegree) -> DMatrix<C64> {
        let r = basis.block(b);
        self.change.columns(r.start, r.len()).into_owned()
    }

    /// Columns spanning `F^pA^k_t`.
    pub fn filtration_span(&self, basis: &ExteriorBasis, p: usize, k: usize) -> DMatrix<C64> {
        let r = basis.filtration(p, k);
        self.change.columns(r.start, r.len()).into_owned()
    }

    /// `∂_t` in ω-coordinates.
    pub fn del_t(&self) -> DMatrix<C64> {
        &self.change * &self.del_eta * &self.change_inv
    }

    /// `∂̄_t` in ω-coordinates.
    pub fn delbar_t(&self) -> DMatrix<C64> {
        &self.change * &self.delbar_eta * &self.change_inv
    }
}

/// Rank defect of `e^{i_φ}(F^pA^k) ⊆ F^pA^k_t`: `rank [E F, F_t] - rank F_t`.
pub fn filtration_defect(
    basis: &ExteriorBasis,
    exp: &DMatrix<C64>,
    bigrading: &DeformedBigrading,
    p: usize,
    k: usize,
    tol: f64,
) -> usize {
    let r = basis.filtration(p, k);
    let image = exp.columns(r.start, r.len()).into_owned();
    let target = bigrading.filtration_span(basis, p, k);
    let joint = linalg::rank(&linalg::hstack(&image, &target), tol);
    joint - linalg::rank(&target, tol)
}

// ----- vector-valued forms --------------------------------------------------

/// A `T^{1,0}`-valued form `∑_α a_α ⊗ e_α`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorValuedForm {
    pub components: Vec<Form>,
}

impl VectorValuedForm {
    pub fn zeros(basis: &ExteriorBasis) -> Self {
        Self {
            components: vec![Form::zeros(basis.dim()); basis.n()],
        }
    }

    /// `∑_{α,β} Φ[α][β] ω̄^β ⊗ e_α`.
    pub fn from_beltrami(basis: &ExteriorBasis, phi: &DMatrix<C64>) -> Self {
        Self {
            components: (1..=basis.n()).map(|a| contract_generator(basis, phi, a)).collect(),
        }
    }

    /// Inverse of [`Self::from_beltrami`] on `(0,1)`-valued forms.
    pub fn to_beltrami(&self, basis: &ExteriorBasis) -> DMatrix<C64> {
        let n = basis.n();
        DMatrix::from_fn(n, n, |a, b| self.components[a][basis.antiholomorphic_generator(b + 1)])
    }

    pub fn norm(&self) -> f64 {
        let s: f64 = self.components.iter().map(|c| c.norm_squared()).sum();
        libm::sqrt(s)
    }
}

/// `∂̄` on `A^{p,•} ⊗ T^{1,0}` for a fixed `p`, with
/// `∂̄(a ⊗ e_k) = ∂̄a ⊗ e_k + (-1)^{|a|} a ∧ ∂̄e_k` and
/// `∂̄e_k = ∑_α θ^α_k ⊗ e_α`, `θ^α_k = ∑_j c^α(k, j̄) ω̄^j` from the mixed
/// structure constants.
#[derive(Clone, Debug)]
pub struct VectorDolbeault {
    p: usize,
    /// Global indices of `A^{p,•}`, ordered by `q`.
    rows: Vec<usize>,
    matrix: DMatrix<C64>,
}

impl VectorDolbeault {
    pub fn new(model: &LieModel, p: usize) -> Self {
        let basis = model.basis();
        let n = basis.n();
        let rows: Vec<usize> = (0..=n).flat_map(|q| basis.block(Bidegree::new(p, q))).collect();
        let s = rows.len();
        let restrict = |m: &DMatrix<C64>| DMatrix::from_fn(s, s, |i, j| m[(rows[i], rows[j])]);
        let delbar = restrict(model.delbar());
        let parity = restrict(&basis.parity_matrix());
        let mut matrix = DMatrix::zeros(n * s, n * s);
        for alpha in 1..=n {
            matrix
                .view_mut(((alpha - 1) * s, (alpha - 1) * s), (s, s))
                .copy_from(&delbar);
            for k in 1..=n {
                let mut theta = Form::zeros(basis.dim());
                for j in 1..=n {
                    theta[basis.antiholomorphic_generator(j)] += model.mixed_coefficient(alpha, k, j);
                }
                if theta.iter().all(|z| z.is_zero()) {
                    continue;
                }
                let wedge = restrict(&basis.right_wedge_matrix(&theta)) * &parity;
                let mut block = matrix.view_mut(((alpha - 1) * s, (k - 1) * s), (s, s));
                block += wedge;
            }
        }
        Self { p, rows, matrix }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn squared_norm(&self) -> f64 {
        linalg::max_abs(&(&self.matrix * &self.matrix))
    }

    fn n(&self) -> usize {
        self.matrix.nrows() / self.rows.len()
    }

    pub fn stack(&self, v: &VectorValuedForm) -> DVector<C64> {
        let s = self.rows.len();
        DVector::from_fn(self.n() * s, |i, _| v.components[i / s][self.rows[i % s]])
    }

    pub fn unstack(&self, basis: &ExteriorBasis, x: &DVector<C64>) -> VectorValuedForm {
        let s = self.rows.len();
        let mut out = VectorValuedForm::zeros(basis);
        for i in 0..x.len() {
            out.components[i / s][self.rows[i % s]] = x[i];
        }
        out
    }

    pub fn apply(&self, basis: &ExteriorBasis, v: &VectorValuedForm) -> VectorValuedForm {
        self.unstack(basis, &(&self.matrix * self.stack(v)))
    }

    /// Stacked positions of `A^{p,q} ⊗ T^{1,0}`.
    fn positions(&self, basis: &ExteriorBasis, q: usize) -> Vec<usize> {
        let s = self.rows.len();
        let block = basis.block(Bidegree::new(self.p, q));
        (0..self.n())
            .flat_map(|a| {
                self.rows
                    .iter()
                    .enumerate()
                    .filter(|(_, g)| block.contains(g))
                    .map(move |(i, _)| a * s + i)
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// Orthogonal projection onto the `∂̄`-harmonic part of
    /// `A^{p,q} ⊗ T^{1,0}`, frames `e_α` declared orthonormal.
    pub fn harmonic_projection(&self, basis: &ExteriorBasis, q: usize, v: &VectorValuedForm, tol: f64) -> VectorValuedForm {
        let lap = &self.matrix * self.matrix.adjoint() + self.matrix.adjoint() * &self.matrix;
        let pos = self.positions(basis, q);
        let local = DMatrix::from_fn(pos.len(), pos.len(), |i, j| lap[(pos[i], pos[j])]);
        let proj = linalg::spectral_split(&local, tol).projector;
        let stacked = self.stack(v);
        let x = DVector::from_fn(pos.len(), |i, _| stacked[pos[i]]);
        let y = proj * x;
        let mut full = DVector::zeros(stacked.len());
        for (i, &p) in pos.iter().enumerate() {
            full[p] = y[i];
        }
        self.unstack(basis, &full)
    }

    /// Dimension of the `∂̄`-harmonic space on `A^{p,q} ⊗ T^{1,0}`.
    pub fn harmonic_dim(&self, basis: &ExteriorBasis, q: usize, tol: f64) -> usize {
        let lap = &self.matrix * self.matrix.adjoint() + self.matrix.adjoint() * &self.matrix;
        let pos = self.positions(basis, q);
        let local = DMatrix::from_fn(pos.len(), pos.len(), |i, j| lap[(pos[i], pos[j])]);
        linalg::spectral_split(&local, tol).kernel_dim
    }
}

/// `𝓗_∂̄ κ(∂/∂t_i)`: the harmonic part of the first-order term of `φ` in
/// direction `i`, after checking that it is `∂̄`-closed.
pub fn ks_class(model: &LieModel, phi: &Beltrami, direction: usize, tol: f64) -> Result<VectorValuedForm, Error> {
    let basis = model.basis();
    let phi1 = VectorValuedForm::from_beltrami(basis, &phi.first_order(direction));
    let vd = VectorDolbeault::new(model, 0);
    let residual = vd.apply(basis, &phi1).norm();
    if residual > tol * (1.0 + phi1.norm()) {
        return Err(Error::NotClosed { residual });
    }
    Ok(vd.harmonic_projection(basis, 1, &phi1, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn torus_contraction_generators() {
        let model = corpus::torus(1);
        let basis = model.basis();
        let t = c(0.3, 0.1);
        let phi = DMatrix::from_element(1, 1, t);
        let dz = basis.form_unit(basis.holomorphic_generator(1));
        let dzb = basis.form_unit(basis.antiholomorphic_generator(1));
        assert_eq!(contract(basis, &phi, &dz), &dzb * t);
        assert!(contract(basis, &phi, &dzb).norm() == 0.0);
        let e = exp_contract(basis, &phi, &dz);
        assert_eq!(e, &dz + &dzb * t);
        let one = basis.form_unit(0);
        assert_eq!(exp_contract(basis, &phi, &one), one);
    }

    #[test]
    fn contraction_on_two_form() {
        let basis = ExteriorBasis::new(2);
        let t = c(0.2, 0.0);
        let phi = corpus::matrix(2, &[t, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let w1 = basis.form_unit(basis.holomorphic_generator(1));
        let w2 = basis.form_unit(basis.holomorphic_generator(2));
        let wb1 = basis.form_unit(basis.antiholomorphic_generator(1));
        let got = contract(&basis, &phi, &basis.wedge(&w1, &w2));
        let want = basis.wedge(&wb1, &w2) * t;
        assert!((got - want).norm() < 1e-15);
    }

    #[test]
    fn exponential_is_coframe_homomorphism() {
        let basis = ExteriorBasis::new(3);
        let phi = DMatrix::from_fn(3, 3, |i, j| c(0.1 * (i as f64 + 1.0), -0.05 * j as f64));
        let eta = deformed_coframe(&basis, &phi);
        let n = basis.n();
        let mut images: Vec<Vec<C64>> = eta.iter().map(|e| e.as_slice().to_vec()).collect();
        for b in 1..=n {
            images.push(basis.form_unit(basis.antiholomorphic_generator(b)).as_slice().to_vec());
        }
        let hom = basis.columns_to_matrix(&basis.extend_homomorphism(&images));
        let exp = exp_contraction_matrix(&basis, &phi);
        assert!(linalg::max_abs(&(hom - &exp)) < 1e-14);
        let inv = exp_contraction_matrix(&basis, &(-&phi));
        let id = DMatrix::<C64>::identity(basis.dim(), basis.dim());
        assert!(linalg::max_abs(&(inv * exp - id)) < 1e-13);
    }

    #[test]
    fn integrability_examples() {
        let iw = corpus::iwasawa();
        let t = [c(0.1, 0.0)];
        let good = corpus::iwasawa_family(6).at(&t);
        assert!(integrability_residual(&iw, &good).unwrap() < 1e-12);
        let bad = corpus::iwasawa_nonintegrable(6).at(&t);
        assert!(integrability_residual(&iw, &bad).unwrap() > 1e-3);
        let kt = corpus::kodaira_thurston();
        let bad = corpus::kodaira_thurston_nonintegrable(6).at(&t);
        assert!(integrability_residual(&kt, &bad).unwrap() > 1e-3);
        let torus = corpus::torus(2);
        let phi = corpus::torus2_family(6).at(&[c(0.1, 0.0), c(-0.05, 0.0)]);
        assert_eq!(integrability_residual(&torus, &phi).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_frame() {
        let torus = corpus::torus(1);
        let phi = DMatrix::from_element(1, 1, c(1.0, 0.0));
        assert!(matches!(
            integrability_residual(&torus, &phi),
            Err(Error::FrameDegenerate { .. })
        ));
    }

    #[test]
    fn deformed_d_on_iwasawa() {
        let iw = corpus::iwasawa();
        let basis = iw.basis();
        let phi = corpus::iwasawa_family(6).at(&[c(0.1, 0.0)]);
        let ops = DeformedOperators::new(&iw, &phi);
        let w3 = basis.form_unit(basis.holomorphic_generator(3));
        let direct = &ops.d_phi * &w3;
        let conj = &ops.conjugated_d * &w3;
        assert!((direct - conj).norm() < 1e-12);
        assert!(ops.identity_residual() < 1e-12);
        assert!(ops.d_phi_squared() < 1e-12);
        let zero = DeformedOperators::new(&iw, &DMatrix::zeros(3, 3));
        assert!(linalg::max_abs(&(&zero.d_phi - iw.d())) == 0.0);
    }

    #[test]
    fn deformed_bigrading_torus() {
        let torus = corpus::torus(1);
        let basis = torus.basis();
        let t = c(0.05, 0.0);
        let phi = DMatrix::from_element(1, 1, t);
        let bg = DeformedBigrading::new(&torus, &phi, 1e-9).unwrap();
        let span = bg.block_span(basis, Bidegree::new(1, 0));
        let mut want = Form::zeros(basis.dim());
        want[basis.holomorphic_generator(1)] = c(1.0, 0.0);
        want[basis.antiholomorphic_generator(1)] = t;
        assert!((span.column(0) - want).norm() < 1e-15);
    }

    #[test]
    fn vector_dolbeault_squares_to_zero() {
        for model in corpus::models() {
            for p in 0..=model.n() {
                assert!(VectorDolbeault::new(&model, p).squared_norm() < 1e-12, "{}", model.name());
            }
        }
    }

    #[test]
    fn kodaira_spencer_classes() {
        let torus = corpus::torus(1);
        let ks = ks_class(&torus, &corpus::torus1_family(6), 0, 1e-9).unwrap();
        assert_eq!(ks.to_beltrami(torus.basis())[(0, 0)], c(1.0, 0.0));

        let iw = corpus::iwasawa();
        let ks = ks_class(&iw, &corpus::iwasawa_family(6), 0, 1e-9).unwrap();
        let m = ks.to_beltrami(iw.basis());
        assert!((m[(1, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(ks.norm() - 1.0 < 1e-12);

        let kt = corpus::kodaira_thurston();
        let ks = ks_class(&kt, &corpus::kodaira_thurston_trivial(6), 0, 1e-9).unwrap();
        assert!(ks.norm() < 1e-12);
    }

    #[test]
    fn family_validation() {
        let bad = [BeltramiTerm {
            exponent: vec![0],
            alpha: 1,
            beta: 1,
            coefficient: c(1.0, 0.0),
        }];
        assert!(matches!(Beltrami::from_terms(1, 1, 6, &bad), Err(Error::MalformedFamily(_))));
        let arity = [BeltramiTerm {
            exponent: vec![1, 0],
            alpha: 1,
            beta: 1,
            coefficient: c(1.0, 0.0),
        }];
        assert!(Beltrami::from_terms(1, 1, 6, &arity).is_err());
    }
}
