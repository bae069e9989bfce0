//! The period map `t ↦ F^pH^k(X_t)` in the fixed de Rham cohomology, its
//! holomorphy and transversality, the map `ι` and the Kodaira-Spencer
//! diagram, and the `σ = dx + ∑β` decomposition on `∂∂̄`-models.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::canonical::{canonical_deformation, harmonic_residual, CanonicalDeformation, HARMONIC_TOL};
use crate::chart::SubspaceChart;
use crate::cohomology::{filtration_generators, hodge_filtration, sub, DdbarReport};
use crate::deformation::{
    contraction_matrix, exp_contract_series, exp_contraction_matrix, integrability_residual, ks_class, Beltrami,
    DeformedBigrading,
};
use crate::error::Error;
use crate::exterior::{Bidegree, Form, LieModel};
use crate::field::C64;
use crate::linalg;
use crate::metric::{MetricConfig, MetricContext};
use crate::series::FormSeries;

/// Step of the central finite difference cross-checking the tangent map.
pub const TANGENT_STEP: f64 = 1e-5;
/// Step of the Cauchy-Riemann defect.
pub const HOLOMORPHY_STEP: f64 = 1e-4;

/// Canonical deformations of a filtration basis, built once per family and
/// evaluated at sample points.
#[derive(Clone, Debug)]
pub struct PeriodMap {
    pub p: usize,
    pub k: usize,
    /// Bidegree of each generator.
    pub bidegrees: Vec<Bidegree>,
    pub deformations: Vec<CanonicalDeformation>,
    /// `e^{i_{φ(t)}} σ^l(t)` as series.
    pub pushed: Vec<FormSeries>,
}

/// One evaluated point of the period map.
#[derive(Clone, Debug)]
pub struct PeriodPoint {
    pub p: usize,
    pub k: usize,
    pub t: Vec<C64>,
    pub chart: SubspaceChart,
    /// Largest `‖d e^{i_φ} σ^l(t)‖`.
    pub closure_residual: f64,
}

impl PeriodMap {
    pub fn new(ctx: &MetricContext, phi: &Beltrami, p: usize, k: usize) -> Result<Self, Error> {
        let basis = ctx.basis();
        let gens = filtration_generators(ctx, p, k);
        let mut bidegrees = Vec::new();
        for r in p..=k.min(basis.n()) {
            if k - r <= basis.n() {
                bidegrees.extend(core::iter::repeat_n(Bidegree::new(r, k - r), ctx.bc_block(Bidegree::new(r, k - r)).dim()));
            }
        }
        let mut deformations = Vec::with_capacity(gens.ncols());
        let mut pushed = Vec::with_capacity(gens.ncols());
        for j in 0..gens.ncols() {
            let cd = canonical_deformation(ctx, &gens.column(j).into_owned(), phi)?;
            pushed.push(exp_contract_series(basis, phi, &cd.series)?);
            deformations.push(cd);
        }
        Ok(Self {
            p,
            k,
            bidegrees,
            deformations,
            pushed,
        })
    }

    pub fn len(&self) -> usize {
        self.deformations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deformations.is_empty()
    }

    /// Frame `e^{i_{φ(t)}} σ^l(t)` as global columns.
    pub fn frame(&self, ctx: &MetricContext, phi: &Beltrami, t: &[C64]) -> DMatrix<C64> {
        let exp = exp_contraction_matrix(ctx.basis(), &phi.at(t));
        let mut out = DMatrix::zeros(ctx.basis().dim(), self.len());
        for (j, cd) in self.deformations.iter().enumerate() {
            out.set_column(j, &(&exp * cd.at(t)));
        }
        out
    }

    /// De Rham coordinates of the frame.
    pub fn coordinates(&self, ctx: &MetricContext, phi: &Beltrami, t: &[C64]) -> DMatrix<C64> {
        ctx.derham_block(self.k).basis.adjoint() * self.frame(ctx, phi, t)
    }

    pub fn point(&self, model: &LieModel, ctx: &MetricContext, phi: &Beltrami, t: &[C64]) -> Result<PeriodPoint, Error> {
        let phi_t = phi.at(t);
        let residual = integrability_residual(model, &phi_t)?;
        if residual > ctx.tol() {
            return Err(Error::NotIntegrableAt { residual });
        }
        let frame = self.frame(ctx, phi, t);
        let closure_residual = linalg::max_column_norm(&(ctx.d() * &frame));
        let coords = ctx.derham_block(self.k).basis.adjoint() * frame;
        Ok(PeriodPoint {
            p: self.p,
            k: self.k,
            t: t.to_vec(),
            chart: SubspaceChart::new(coords, ctx.tol())?,
            closure_residual,
        })
    }

    /// De Rham coordinates of `∂/∂t_i [e^{i_φ} σ^l(t)]` at `t = 0`, from the
    /// exact series derivative.
    pub fn tangent(&self, ctx: &MetricContext, direction: usize) -> DMatrix<C64> {
        let basis = ctx.basis();
        let mut out = DMatrix::zeros(basis.dim(), self.len());
        for (j, s) in self.pushed.iter().enumerate() {
            let d = s.partial(direction);
            out.set_column(j, &d.eval(&alloc::vec![C64::new(0.0, 0.0); d.vars()]));
        }
        ctx.derham_block(self.k).basis.adjoint() * out
    }

    /// Relative disagreement between [`Self::tangent`] and a central finite
    /// difference of [`Self::coordinates`].
    pub fn tangent_cross_check(&self, ctx: &MetricContext, phi: &Beltrami, direction: usize) -> f64 {
        let m = phi.vars();
        let mut plus = alloc::vec![C64::new(0.0, 0.0); m];
        let mut minus = plus.clone();
        plus[direction] = C64::new(TANGENT_STEP, 0.0);
        minus[direction] = C64::new(-TANGENT_STEP, 0.0);
        let fd = (self.coordinates(ctx, phi, &plus) - self.coordinates(ctx, phi, &minus))
            * C64::new(0.5 / TANGENT_STEP, 0.0);
        let exact = self.tangent(ctx, direction);
        linalg::max_abs(&(fd - &exact)) / linalg::max_abs(&exact).max(1.0)
    }
}

pub fn period_point(
    model: &LieModel,
    ctx: &MetricContext,
    phi: &Beltrami,
    p: usize,
    k: usize,
    t: &[C64],
) -> Result<PeriodPoint, Error> {
    PeriodMap::new(ctx, phi, p, k)?.point(model, ctx, phi, t)
}

/// `F^pH^k(X_t)` from the deformed bigrading alone: Bott-Chern harmonic
/// forms of the deformed operators, with the deformed coframe declared
/// orthonormal, mapped to de Rham coordinates.
pub fn fph_direct(
    model: &LieModel,
    ctx: &MetricContext,
    phi_t: &DMatrix<C64>,
    p: usize,
    k: usize,
) -> Result<SubspaceChart, Error> {
    let bg = DeformedBigrading::new(model, phi_t, ctx.tol())?;
    let deformed = MetricContext::from_operators(
        ctx.basis().clone(),
        bg.d_eta.clone(),
        bg.del_eta.clone(),
        bg.delbar_eta.clone(),
        MetricConfig {
            rank_tol: ctx.tol(),
            ..ctx.config()
        },
    );
    let gens = &bg.change * filtration_generators(&deformed, p, k);
    SubspaceChart::new(ctx.derham_block(k).basis.adjoint() * gens, ctx.tol())
}

/// Largest norm of a tangent class component orthogonal to `F^{p-1}H^k`.
pub fn transversality_residual(ctx: &MetricContext, map: &PeriodMap, direction: usize) -> Result<f64, Error> {
    if map.p == 0 || map.is_empty() {
        return Ok(0.0);
    }
    let lower = hodge_filtration(ctx, map.p - 1, map.k)?;
    let tangent = map.tangent(ctx, direction);
    Ok((0..tangent.ncols())
        .map(|j| lower.orthogonal_residual(&tangent.column(j).into_owned()))
        .fold(0.0, f64::max))
}

/// Cauchy-Riemann defect of the affine Plücker vector at `t0` in direction
/// `i`, using the coordinate that dominates at `t0`.
pub fn holomorphy_residual(
    model: &LieModel,
    ctx: &MetricContext,
    map: &PeriodMap,
    phi: &Beltrami,
    t0: &[C64],
    direction: usize,
) -> Result<f64, Error> {
    let h = HOLOMORPHY_STEP;
    let center = map.point(model, ctx, phi, t0)?;
    let Some(reference) = center.chart.dominant_index() else {
        return Ok(0.0);
    };
    let shifted = |delta: C64| -> Result<DVector<C64>, Error> {
        let mut t = t0.to_vec();
        t[direction] += delta;
        let pt = map.point(model, ctx, phi, &t)?;
        pt.chart.affine_pluecker(reference).ok_or(Error::RankDrop { rank: 0, expected: 1 })
    };
    let re = (shifted(C64::new(h, 0.0))? - shifted(C64::new(-h, 0.0))?) / C64::new(2.0 * h, 0.0);
    let im = (shifted(C64::new(0.0, h))? - shifted(C64::new(0.0, -h))?) / C64::new(0.0, 2.0 * h);
    Ok((re - im).norm())
}

/// The two components of `ι(φ)x`, as forms and as Bott-Chern coordinates.
#[derive(Clone, Debug)]
pub struct IotaImage {
    /// `i_φ x - ∂̄(∂∂̄)* G_BC ∂ i_φ x`, bidegree `(r-1, k-r+1)`.
    pub lower_form: Form,
    /// `-𝓗_BC ∂(∂∂̄)* G_BC ∂ i_φ x`, bidegree `(r, k-r)`.
    pub upper_form: Form,
    pub lower: DVector<C64>,
    pub upper: DVector<C64>,
}

pub fn iota_map(ctx: &MetricContext, phi1: &DMatrix<C64>, x: &Form, b: Bidegree) -> Result<IotaImage, Error> {
    let residual = harmonic_residual(ctx, x);
    if residual > HARMONIC_TOL * x.norm().max(1.0) {
        return Err(Error::NotHarmonic { residual });
    }
    let basis = ctx.basis();
    let y = contraction_matrix(basis, phi1) * x;
    let u = ctx.ddbar_adjoint() * (ctx.green_bc_global() * (ctx.del() * &y));
    let lower_form = &y - ctx.delbar() * &u;
    let upper_form = -(ctx.harmonic_bc_global() * (ctx.del() * &u));
    let lower = if b.p == 0 || b.q >= basis.n() {
        DVector::zeros(0)
    } else {
        ctx.bc_coordinates(Bidegree::new(b.p - 1, b.q + 1), &lower_form)
    };
    let upper = ctx.bc_coordinates(b, &upper_form);
    Ok(IotaImage {
        lower_form,
        upper_form,
        lower,
        upper,
    })
}

/// Expansion of de Rham coordinates in the Bott-Chern harmonic bases of all
/// bidegrees of total degree `k`. Returns one coefficient vector per
/// bidegree `(r, k-r)` in increasing `r`, and the solve residual.
pub fn hodge_expansion(ctx: &MetricContext, k: usize, coords: &DVector<C64>) -> (Vec<(Bidegree, DVector<C64>)>, f64) {
    let all = filtration_generators(ctx, 0, k);
    let m = ctx.derham_block(k).basis.adjoint() * &all;
    let a = linalg::pseudo_inverse(&m, ctx.tol()) * coords;
    let residual = (&m * &a - coords).norm();
    let n = ctx.basis().n();
    let mut out = Vec::new();
    let mut offset = 0;
    for r in 0..=k.min(n) {
        if k - r > n {
            continue;
        }
        let b = Bidegree::new(r, k - r);
        let dim = ctx.bc_block(b).dim();
        out.push((b, a.rows(offset, dim).into_owned()));
        offset += dim;
    }
    (out, residual)
}

/// Largest disagreement between the Hodge components of the tangent classes
/// and `ι(𝓗_∂̄ κ(∂/∂t_i)) x` over the filtration basis.
pub fn diagram_residual(
    model: &LieModel,
    ctx: &MetricContext,
    map: &PeriodMap,
    phi: &Beltrami,
    direction: usize,
) -> Result<f64, Error> {
    let ks = ks_class(model, phi, direction, ctx.tol())?;
    let phi1 = ks.to_beltrami(ctx.basis());
    let tangent = map.tangent(ctx, direction);
    let mut worst: f64 = 0.0;
    for (j, cd) in map.deformations.iter().enumerate() {
        let b = map.bidegrees[j];
        let iota = iota_map(ctx, &phi1, &cd.sigma0, b)?;
        let (pieces, solve) = hodge_expansion(ctx, map.k, &tangent.column(j).into_owned());
        worst = worst.max(solve);
        for (bb, coeffs) in pieces {
            let expected = if bb == b {
                iota.upper.clone()
            } else if b.p > 0 && bb == Bidegree::new(b.p - 1, b.q + 1) {
                iota.lower.clone()
            } else {
                DVector::zeros(coeffs.len())
            };
            worst = worst.max((coeffs - expected).norm());
        }
    }
    Ok(worst)
}

/// `σ = dx + ∑_{r≥p} β^{r,k-r}` with `β` closed and pure type.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub x: Form,
    pub betas: Vec<(Bidegree, Form)>,
}

impl Decomposition {
    pub fn reconstruction_residual(&self, ctx: &MetricContext, sigma: &Form) -> f64 {
        let mut r = sigma - ctx.d() * &self.x;
        for (_, b) in &self.betas {
            r -= b;
        }
        r.norm()
    }
}

pub fn ppbar_decompose(
    ctx: &MetricContext,
    ddbar: &DdbarReport,
    sigma: &Form,
    p: usize,
    k: usize,
) -> Result<Decomposition, Error> {
    if !ddbar.holds() {
        return Err(Error::DdbarRequired);
    }
    let basis = ctx.basis();
    let scale = sigma.norm().max(1.0);
    let residual = (ctx.d() * sigma).norm();
    if residual > 1e-10 * scale {
        return Err(Error::NotClosed { residual });
    }
    let degree = basis.degree(k);
    let filt = basis.filtration(p, k);
    let outside: f64 = (0..basis.dim())
        .filter(|i| !filt.contains(i))
        .map(|i| sigma[i].norm_sqr())
        .sum();
    if libm::sqrt(outside) > 1e-10 * scale {
        return Err(Error::NotInFiltration { p, k });
    }

    // Harmonic parts from the class expansion over r ≥ p.
    let gens = filtration_generators(ctx, p, k);
    let m = ctx.derham_block(k).basis.adjoint() * &gens;
    let coeffs = linalg::pseudo_inverse(&m, ctx.tol()) * ctx.derham_coordinates(k, sigma);
    let mut betas = Vec::new();
    let mut offset = 0;
    let mut harmonic_sum = Form::zeros(basis.dim());
    for r in p..=k.min(basis.n()) {
        if k - r > basis.n() {
            continue;
        }
        let b = Bidegree::new(r, k - r);
        let h = &ctx.bc_block(b).basis;
        let beta = h * coeffs.rows(offset, h.ncols());
        offset += h.ncols();
        harmonic_sum += &beta;
        betas.push((b, beta));
    }

    // Exact remainder: x = d⁺(σ - ∑β) on A^{k-1}.
    let exact = sigma - &harmonic_sum;
    let mut x = Form::zeros(basis.dim());
    if k > 0 {
        let src = basis.degree(k - 1);
        let d_block = sub(ctx.d(), degree.clone(), src.clone());
        let local = linalg::pseudo_inverse(&d_block, ctx.tol()) * exact.rows(degree.start, degree.len());
        x.rows_mut(src.start, src.len()).copy_from(&local);
    }

    // Keep x^{s, k-1-s} with s ≥ p, absorb ∂x^{p-1,k-p} as d∂̄y.
    let mut kept = Form::zeros(basis.dim());
    if k > 0 {
        for s in p..k {
            if s <= basis.n() && k - 1 - s <= basis.n() {
                let b = Bidegree::new(s, k - 1 - s);
                kept += basis.project_block(&x, b);
            }
        }
        if p >= 1 && k >= p && k - p <= basis.n() {
            let low = basis.project_block(&x, Bidegree::new(p - 1, k - p));
            let target = ctx.del() * &low;
            if k >= p + 1 {
                let b = Bidegree::new(p, k - p);
                let dst = basis.block(b);
                let src = basis.block_signed(p as isize - 1, (k - p) as isize - 1);
                let op = sub(ctx.ddbar(), dst.clone(), src.clone());
                let y_local = linalg::pseudo_inverse(&op, ctx.tol()) * target.rows(dst.start, dst.len());
                let mut y = Form::zeros(basis.dim());
                y.rows_mut(src.start, src.len()).copy_from(&y_local);
                kept += ctx.delbar() * y;
            }
        }
    }
    Ok(Decomposition { x: kept, betas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::ddbar_check;
    use crate::corpus;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn torus_line_is_one_t() {
        let m = corpus::torus(1);
        let ctx = MetricContext::new(&m, MetricConfig::default());
        let phi = corpus::torus1_family(6);
        let t = c(0.05, 0.0);
        let pt = period_point(&m, &ctx, &phi, 1, 1, &[t]).unwrap();
        let aff = pt.chart.affine_pluecker(0).unwrap();
        assert!((aff[1] - t).norm() < 1e-14);
        let direct = fph_direct(&m, &ctx, &phi.at(&[t]), 1, 1).unwrap();
        assert!(pt.chart.distance(&direct) < 1e-12);
    }

    #[test]
    fn torus_iota() {
        let m = corpus::torus(1);
        let ctx = MetricContext::new(&m, MetricConfig::default());
        let basis = m.basis();
        let dz = basis.form_unit(basis.holomorphic_generator(1));
        let phi1 = DMatrix::from_element(1, 1, c(1.0, 0.0));
        let iota = iota_map(&ctx, &phi1, &dz, Bidegree::new(1, 0)).unwrap();
        assert_eq!(iota.lower_form, basis.form_unit(basis.antiholomorphic_generator(1)));
        assert_eq!(iota.upper_form.norm(), 0.0);
        assert!((iota.lower[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_input_decomposes_trivially() {
        let m = corpus::torus(2);
        let ctx = MetricContext::new(&m, MetricConfig::default());
        let report = ddbar_check(&ctx);
        let basis = m.basis();
        let sigma = basis.wedge(
            &basis.form_unit(basis.holomorphic_generator(1)),
            &basis.form_unit(basis.holomorphic_generator(2)),
        );
        let dec = ppbar_decompose(&ctx, &report, &sigma, 2, 2).unwrap();
        assert!(dec.x.norm() < 1e-14);
        assert!(dec.reconstruction_residual(&ctx, &sigma) < 1e-14);
        let iw = corpus::iwasawa();
        let ictx = MetricContext::new(&iw, MetricConfig::default());
        assert!(matches!(
            ppbar_decompose(&ictx, &ddbar_check(&ictx), &sigma, 2, 2),
            Err(Error::DdbarRequired)
        ));
    }
}
