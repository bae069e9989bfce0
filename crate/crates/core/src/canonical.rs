//! Canonical Bott-Chern deformations: the power series
//! `σ(t) = σ0 - T i_{φ(t)} σ(t)` with `T = G_BC (∂̄*∂∂* + ∂̄*) ∂`, solved
//! degree by degree.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::deformation::{contract_series, Beltrami, DeformedOperators};
use crate::error::Error;
use crate::exterior::{Bidegree, Form, LieModel};
use crate::field::C64;
use crate::linalg;
use crate::metric::MetricContext;
use crate::series::{Exponent, FormSeries};

/// Harmonicity tolerance for the initial form, relative to `max(1, ‖σ0‖)`.
pub const HARMONIC_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct CanonicalDeformation {
    pub sigma0: Form,
    pub series: FormSeries,
}

impl CanonicalDeformation {
    pub fn order(&self) -> usize {
        self.series.order()
    }

    pub fn at(&self, t: &[C64]) -> Form {
        self.series.eval(t)
    }

    /// `max ‖σ_e‖` over exponents of each total degree `0..=N`.
    pub fn convergence(&self) -> Vec<f64> {
        (0..=self.order()).map(|k| self.series.degree_norm(k)).collect()
    }

    /// Coefficient of `t_i`.
    pub fn first_order(&self, i: usize) -> Form {
        self.series.coefficient(&Exponent::unit(self.series.vars(), i))
    }
}

/// `‖σ - 𝓗_BC σ‖`.
pub fn harmonic_residual(ctx: &MetricContext, sigma: &Form) -> f64 {
    (sigma - ctx.harmonic_bc_global() * sigma).norm()
}

pub fn canonical_deformation(ctx: &MetricContext, sigma0: &Form, phi: &Beltrami) -> Result<CanonicalDeformation, Error> {
    let residual = harmonic_residual(ctx, sigma0);
    if residual > HARMONIC_TOL * sigma0.norm().max(1.0) {
        return Err(Error::NotHarmonic { residual });
    }
    let basis = ctx.basis();
    let t_op = ctx.canonical_operator();
    let m = phi.vars();
    let order = phi.order();
    let ops: Vec<(Exponent, DMatrix<C64>)> = phi
        .contraction_series(basis)
        .terms()
        .filter(|(e, _)| e.degree() >= 1)
        .map(|(e, c)| (e.clone(), c.clone()))
        .collect();

    let mut series = FormSeries::constant(m, order, sigma0.clone());
    for k in 1..=order {
        for e in Exponent::all_of_degree(m, k) {
            let mut acc = DVector::<C64>::zeros(basis.dim());
            for (ej, op) in &ops {
                if let Some(ei) = e.checked_sub(ej) {
                    acc += op * series.coefficient(&ei);
                }
            }
            if acc.iter().all(|z| z.norm() == 0.0) {
                continue;
            }
            series.set(e, -(t_op * acc));
        }
    }
    Ok(CanonicalDeformation {
        sigma0: sigma0.clone(),
        series,
    })
}

/// Largest coefficient of `σ - σ0 + T i_φ σ` through order `N`.
pub fn fixed_point_residual(ctx: &MetricContext, cd: &CanonicalDeformation, phi: &Beltrami) -> Result<f64, Error> {
    let contracted = contract_series(ctx.basis(), phi, &cd.series)?;
    let corrected = contracted.map(|v| ctx.canonical_operator() * v);
    let shifted = FormSeries::constant(cd.series.vars(), cd.order(), -cd.sigma0.clone());
    Ok(cd.series.add(&shifted)?.add(&corrected)?.max_norm())
}

/// `‖d_{φ(t)} σ(t)‖` at a sample point.
pub fn closedness_residual(model: &LieModel, cd: &CanonicalDeformation, phi: &Beltrami, t: &[C64], tol: f64) -> Result<f64, Error> {
    let phi_t = phi.at(t);
    let residual = crate::deformation::integrability_residual(model, &phi_t)?;
    if residual > tol {
        return Err(Error::NotIntegrableAt { residual });
    }
    let ops = DeformedOperators::new(model, &phi_t);
    Ok((&ops.d_phi * cd.at(t)).norm())
}

/// Closedness threshold `1e-8 · max(1, ‖σ0‖)` declaring `σ0 ∈ V_t`.
pub fn in_deformation_space(closedness: f64, sigma0: &Form) -> bool {
    closedness < 1e-8 * sigma0.norm().max(1.0)
}

/// Evaluated canonical deformations of a list of harmonic forms.
#[derive(Clone, Debug)]
pub struct FTildeReport {
    pub columns: DMatrix<C64>,
    pub rank: usize,
    /// `‖(∂∂̄)* σ(t)‖` per column.
    pub adjoint_residuals: Vec<f64>,
    /// `‖d_φ σ(t)‖` per column.
    pub closedness: Vec<f64>,
}

pub fn ftilde_eval(
    model: &LieModel,
    ctx: &MetricContext,
    sigma0s: &[Form],
    phi: &Beltrami,
    t: &[C64],
) -> Result<FTildeReport, Error> {
    let mut columns = DMatrix::zeros(ctx.basis().dim(), sigma0s.len());
    let mut adjoint_residuals = Vec::with_capacity(sigma0s.len());
    let mut closedness = Vec::with_capacity(sigma0s.len());
    for (j, s0) in sigma0s.iter().enumerate() {
        let cd = canonical_deformation(ctx, s0, phi)?;
        let v = cd.at(t);
        adjoint_residuals.push((ctx.ddbar_adjoint() * &v).norm());
        closedness.push(closedness_residual(model, &cd, phi, t, ctx.tol())?);
        columns.set_column(j, &v);
    }
    Ok(FTildeReport {
        rank: linalg::rank(&columns, ctx.tol()),
        columns,
        adjoint_residuals,
        closedness,
    })
}

/// Norm of the part of `σ` orthogonal to `Im ∂∂̄_φ ∩ A^{p,q}`.
pub fn non_exact_norm(model: &LieModel, ctx: &MetricContext, sigma: &Form, phi_t: &DMatrix<C64>, b: Bidegree) -> f64 {
    let basis = ctx.basis();
    let ops = DeformedOperators::new(model, phi_t);
    let ddbar_phi = ops.ddbar_phi(model);
    let dst = basis.block(b);
    let src = basis.block_signed(b.p as isize - 1, b.q as isize - 1);
    let image = crate::cohomology::sub(&ddbar_phi, dst.clone(), src);
    let q = linalg::column_space(&image, ctx.tol());
    let local = sigma.rows(dst.start, dst.len()).into_owned();
    let outside = sigma.norm_squared() - local.norm_squared();
    let perp = &local - &q * (q.adjoint() * &local);
    libm::sqrt(perp.norm_squared() + outside.max(0.0))
}
