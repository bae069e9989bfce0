//! de Rham, Dolbeault, Bott-Chern and deformed Bott-Chern cohomology, the
//! Hodge filtration, the `∂∂̄`-lemma test and the `v`/`u` diagnostics.

use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::{DMatrix, DVector};

use crate::chart::SubspaceChart;
use crate::deformation::{integrability_residual, DeformedOperators};
use crate::error::Error;
use crate::exact::RationalMatrix;
use crate::exterior::{differential_columns, Bidegree, ExteriorBasis, Form, LieModel};
use crate::field::{GaussRational, C64};
use crate::linalg;
use crate::metric::{MetricContext, Theory};

/// The sub-block `dst × src` of a global operator.
pub fn sub(m: &DMatrix<C64>, dst: Range<usize>, src: Range<usize>) -> DMatrix<C64> {
    m.view((dst.start, src.start), (dst.len(), src.len())).into_owned()
}

fn signed(basis: &ExteriorBasis, b: Bidegree, dp: isize, dq: isize) -> Range<usize> {
    basis.block_signed(b.p as isize + dp, b.q as isize + dq)
}

fn degree_signed(basis: &ExteriorBasis, k: isize) -> Range<usize> {
    if k < 0 || k as usize > 2 * basis.n() {
        0..0
    } else {
        basis.degree(k as usize)
    }
}

/// A cohomology group with harmonic representatives.
#[derive(Clone, Debug)]
pub struct CohomologySpace {
    pub theory: Theory,
    /// `None` for de Rham.
    pub bidegree: Option<Bidegree>,
    pub degree: usize,
    /// `dim ker - dim im` computed from ranks.
    pub quotient_dim: usize,
    /// Orthonormal harmonic representatives, global-length columns.
    pub representatives: DMatrix<C64>,
}

impl CohomologySpace {
    pub fn dim(&self) -> usize {
        self.representatives.ncols()
    }

    /// Class coordinates of a closed form in the harmonic basis.
    pub fn coordinates(&self, a: &Form) -> DVector<C64> {
        self.representatives.adjoint() * a
    }

    /// Largest closure residual of the representatives under the defining
    /// operators of the theory.
    pub fn closure_residual(&self, ctx: &MetricContext) -> f64 {
        let r = &self.representatives;
        match self.theory {
            Theory::DeRham => linalg::max_column_norm(&(ctx.d() * r)),
            Theory::Dolbeault => linalg::max_column_norm(&(ctx.delbar() * r)),
            Theory::BottChern => linalg::max_column_norm(&(ctx.d() * r)),
        }
    }
}

/// Quotient dimension of `H^{p,q}_BC = ker ∂ ∩ ker ∂̄ / im ∂∂̄`.
pub fn bc_quotient_dim(ctx: &MetricContext, b: Bidegree) -> usize {
    let basis = ctx.basis();
    let tol = ctx.tol();
    let src = basis.block(b);
    let closed = linalg::vstack(
        &sub(ctx.del(), signed(basis, b, 1, 0), src.clone()),
        &sub(ctx.delbar(), signed(basis, b, 0, 1), src.clone()),
    );
    let kernel = src.len() - linalg::rank(&closed, tol);
    let image = linalg::rank(&sub(ctx.ddbar(), src, signed(basis, b, -1, -1)), tol);
    kernel - image
}

pub fn dolbeault_quotient_dim(ctx: &MetricContext, b: Bidegree) -> usize {
    let basis = ctx.basis();
    let tol = ctx.tol();
    let src = basis.block(b);
    let kernel = src.len() - linalg::rank(&sub(ctx.delbar(), signed(basis, b, 0, 1), src.clone()), tol);
    let image = linalg::rank(&sub(ctx.delbar(), src, signed(basis, b, 0, -1)), tol);
    kernel - image
}

pub fn derham_quotient_dim(ctx: &MetricContext, k: usize) -> usize {
    let basis = ctx.basis();
    let tol = ctx.tol();
    let src = basis.degree(k);
    let kernel = src.len() - linalg::rank(&sub(ctx.d(), degree_signed(basis, k as isize + 1), src.clone()), tol);
    let image = linalg::rank(&sub(ctx.d(), src, degree_signed(basis, k as isize - 1)), tol);
    kernel - image
}

/// All groups of one theory, in canonical block order.
pub fn cohomology(ctx: &MetricContext, theory: Theory) -> Vec<CohomologySpace> {
    let basis = ctx.basis();
    match theory {
        Theory::DeRham => (0..=2 * basis.n())
            .map(|k| CohomologySpace {
                theory,
                bidegree: None,
                degree: k,
                quotient_dim: derham_quotient_dim(ctx, k),
                representatives: ctx.derham_block(k).basis.clone(),
            })
            .collect(),
        Theory::Dolbeault | Theory::BottChern => basis
            .blocks()
            .map(|b| {
                let (quotient_dim, representatives) = if theory == Theory::Dolbeault {
                    (dolbeault_quotient_dim(ctx, b), ctx.dolbeault_block(b).basis.clone())
                } else {
                    (bc_quotient_dim(ctx, b), ctx.bc_block(b).basis.clone())
                };
                CohomologySpace {
                    theory,
                    bidegree: Some(b),
                    degree: b.total(),
                    quotient_dim,
                    representatives,
                }
            })
            .collect(),
    }
}

/// One row of the `∂∂̄`-lemma report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdbarEntry {
    pub bidegree: Bidegree,
    /// `dim ker ∂ ∩ ker ∂̄ ∩ (im ∂ + im ∂̄)` in `A^{p,q}`.
    pub closed_exact: usize,
    /// `rank ∂∂̄` into `A^{p,q}`.
    pub ddbar_exact: usize,
}

impl DdbarEntry {
    pub fn holds(&self) -> bool {
        self.closed_exact == self.ddbar_exact
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DdbarReport {
    pub entries: Vec<DdbarEntry>,
}

impl DdbarReport {
    pub fn holds(&self) -> bool {
        self.entries.iter().all(DdbarEntry::holds)
    }

    pub fn failing(&self) -> Vec<Bidegree> {
        self.entries.iter().filter(|e| !e.holds()).map(|e| e.bidegree).collect()
    }
}

pub fn ddbar_check(ctx: &MetricContext) -> DdbarReport {
    let basis = ctx.basis();
    let tol = ctx.tol();
    let entries = basis
        .blocks()
        .map(|b| {
            let dst = basis.block(b);
            let w = linalg::hstack(
                &sub(ctx.del(), dst.clone(), signed(basis, b, -1, 0)),
                &sub(ctx.delbar(), dst.clone(), signed(basis, b, 0, -1)),
            );
            let closed = linalg::vstack(
                &sub(ctx.del(), signed(basis, b, 1, 0), dst.clone()),
                &sub(ctx.delbar(), signed(basis, b, 0, 1), dst.clone()),
            );
            DdbarEntry {
                bidegree: b,
                closed_exact: linalg::kernel_intersection_dim(&closed, &w, tol),
                ddbar_exact: linalg::rank(&sub(ctx.ddbar(), dst, signed(basis, b, -1, -1)), tol),
            }
        })
        .collect();
    DdbarReport { entries }
}

/// `F^pH^k` as the span of de Rham coordinates of Bott-Chern harmonic forms
/// of bidegree `(r, k-r)`, `r ≥ p`.
pub fn hodge_filtration(ctx: &MetricContext, p: usize, k: usize) -> Result<SubspaceChart, Error> {
    let cols = filtration_generators(ctx, p, k);
    let coords = ctx.derham_block(k).basis.adjoint() * &cols;
    SubspaceChart::new(coords, ctx.tol()).map_err(|e| match e {
        Error::RankDrop { rank, expected } => Error::FiltrationDegenerate { rank, expected },
        other => other,
    })
}

/// Bott-Chern harmonic basis of `⊕_{r≥p} 𝓗^{r,k-r}_BC`, global columns, in
/// increasing `r`.
pub fn filtration_generators(ctx: &MetricContext, p: usize, k: usize) -> DMatrix<C64> {
    let basis = ctx.basis();
    let n = basis.n();
    let mut cols = DMatrix::zeros(basis.dim(), 0);
    for r in p..=k.min(n) {
        if k - r > n {
            continue;
        }
        cols = linalg::hstack(&cols, &ctx.bc_block(Bidegree::new(r, k - r)).basis);
    }
    cols
}

/// `∑_{p+q=k} h^{p,q}_∂̄ - b_k` for every `k`.
pub fn froelicher_excess(ctx: &MetricContext) -> Vec<isize> {
    let basis = ctx.basis();
    (0..=2 * basis.n())
        .map(|k| {
            let hodge: usize = basis
                .blocks()
                .filter(|b| b.total() == k)
                .map(|b| ctx.dolbeault_block(b).dim())
                .sum();
            hodge as isize - ctx.derham_block(k).dim() as isize
        })
        .collect()
}

// ----- deformed Bott-Chern ---------------------------------------------------

/// Deformed Bott-Chern dimensions together with the `v`, `u` diagnostics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformedEntry {
    pub bidegree: Bidegree,
    pub h_bc: usize,
    pub h_bc_phi: usize,
    pub v: usize,
    pub u: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeformedTable {
    pub entries: Vec<DeformedEntry>,
}

impl DeformedTable {
    pub fn get(&self, b: Bidegree) -> Option<&DeformedEntry> {
        self.entries.iter().find(|e| e.bidegree == b)
    }

    /// `u^{p-1,q-1}`, zero outside the range.
    pub fn u_shifted(&self, b: Bidegree) -> usize {
        if b.p == 0 || b.q == 0 {
            return 0;
        }
        self.get(Bidegree::new(b.p - 1, b.q - 1)).map_or(0, |e| e.u)
    }

    /// Bidegrees where `h_BC ≠ h_BCφ + v + u^{p-1,q-1}`.
    pub fn identity_failures(&self) -> Vec<Bidegree> {
        self.entries
            .iter()
            .filter(|e| e.h_bc != e.h_bc_phi + e.v + self.u_shifted(e.bidegree))
            .map(|e| e.bidegree)
            .collect()
    }
}

fn require_integrable(model: &LieModel, phi: &DMatrix<C64>, tol: f64) -> Result<(), Error> {
    let residual = integrability_residual(model, phi)?;
    if residual > tol {
        return Err(Error::NotIntegrableAt { residual });
    }
    Ok(())
}

/// `h_BCφ`, `v`, `u` for every bidegree at `Φ = φ(t)`.
pub fn deformed_bc_table(model: &LieModel, ctx: &MetricContext, phi: &DMatrix<C64>) -> Result<DeformedTable, Error> {
    let tol = ctx.tol();
    require_integrable(model, phi, tol)?;
    let ops = DeformedOperators::new(model, phi);
    let ddbar_phi = ops.ddbar_phi(model);
    let basis = ctx.basis();
    let entries = basis
        .blocks()
        .map(|b| {
            let src = basis.block(b);
            let h_bc = ctx.bc_block(b).dim();
            let d_phi_out = linalg::vstack(
                &sub(ctx.del(), signed(basis, b, 1, 0), src.clone()),
                &sub(&ops.delbar_phi, signed(basis, b, 0, 1), src.clone()),
            );
            let closed = src.len() - linalg::rank(&d_phi_out, tol);
            let exact = linalg::rank(&sub(&ddbar_phi, src.clone(), signed(basis, b, -1, -1)), tol);
            let h_bc_phi = closed - exact;

            let adj = sub(ctx.ddbar_adjoint(), signed(basis, b, -1, -1), src.clone());
            let v_kernel = src.len() - linalg::rank(&linalg::vstack(&d_phi_out, &adj), tol);
            let v = h_bc - v_kernel;

            let harmonic = ctx.bc_block(b).basis.rows(src.start, src.len()).into_owned();
            let coexact = sub(ctx.ddbar_adjoint(), src.clone(), signed(basis, b, 1, 1));
            let w = linalg::hstack(&harmonic, &coexact);
            let out = sub(&ddbar_phi, signed(basis, b, 1, 1), src.clone());
            let u = h_bc - linalg::kernel_intersection_dim(&out, &w, tol);
            DeformedEntry {
                bidegree: b,
                h_bc,
                h_bc_phi,
                v,
                u,
            }
        })
        .collect();
    Ok(DeformedTable { entries })
}

// ----- exact backend ---------------------------------------------------------

/// Gaussian-rational operator matrices of a model, for exact ranks.
#[derive(Clone, Debug)]
pub struct ExactModel {
    basis: ExteriorBasis,
    d: RationalMatrix,
    del: RationalMatrix,
    delbar: RationalMatrix,
}

/// Bidegree split of an exact degree-one operator.
fn exact_split(basis: &ExteriorBasis, d: &RationalMatrix) -> (RationalMatrix, RationalMatrix) {
    let n = basis.dim();
    let mut del = RationalMatrix::zeros(n, n);
    let mut delbar = RationalMatrix::zeros(n, n);
    for j in 0..n {
        let bj = basis.monomial(j).bidegree();
        for i in 0..n {
            let z = d.get(i, j);
            if num_traits::Zero::is_zero(z) {
                continue;
            }
            let bi = basis.monomial(i).bidegree();
            if bi.p == bj.p + 1 && bi.q == bj.q {
                del.set(i, j, z.clone());
            } else if bi.p == bj.p && bi.q == bj.q + 1 {
                delbar.set(i, j, z.clone());
            }
        }
    }
    (del, delbar)
}

fn exact_sub(m: &RationalMatrix, dst: Range<usize>, src: Range<usize>) -> RationalMatrix {
    m.submatrix(dst, src)
}

fn exact_kernel_intersection(a: &RationalMatrix, w: &RationalMatrix) -> usize {
    w.rank() - a.mul(w).rank()
}

impl ExactModel {
    pub fn new(model: &LieModel) -> Self {
        let basis = model.basis().clone();
        let cols = differential_columns::<GaussRational>(&basis, model.spec());
        let d = RationalMatrix::from_columns(basis.dim(), &cols);
        let (del, delbar) = exact_split(&basis, &d);
        Self { basis, d, del, delbar }
    }

    pub fn d(&self) -> &RationalMatrix {
        &self.d
    }
    pub fn del(&self) -> &RationalMatrix {
        &self.del
    }
    pub fn delbar(&self) -> &RationalMatrix {
        &self.delbar
    }

    /// Whether `d²`, `∂²`, `∂̄²` and `∂∂̄ + ∂̄∂` vanish exactly.
    pub fn operator_axioms_hold(&self) -> bool {
        self.d.mul(&self.d).is_zero()
            && self.del.mul(&self.del).is_zero()
            && self.delbar.mul(&self.delbar).is_zero()
            && self.del.mul(&self.delbar).add(&self.delbar.mul(&self.del)).is_zero()
    }

    fn closed_block(&self, delbar: &RationalMatrix, b: Bidegree) -> RationalMatrix {
        let src = self.basis.block(b);
        exact_sub(&self.del, signed(&self.basis, b, 1, 0), src.clone())
            .vstack(&exact_sub(delbar, signed(&self.basis, b, 0, 1), src))
    }

    pub fn bc_dim(&self, b: Bidegree) -> usize {
        let src = self.basis.block(b);
        let kernel = src.len() - self.closed_block(&self.delbar, b).rank();
        let ddbar = self.del.mul(&self.delbar);
        kernel - exact_sub(&ddbar, src, signed(&self.basis, b, -1, -1)).rank()
    }

    /// `dim ker □_BC` computed as `dim ker ∂ ∩ ker ∂̄ ∩ ker (∂∂̄)*`.
    pub fn bc_harmonic_dim(&self, b: Bidegree) -> usize {
        let src = self.basis.block(b);
        let adj = self.del.mul(&self.delbar).adjoint();
        let stacked = self
            .closed_block(&self.delbar, b)
            .vstack(&exact_sub(&adj, signed(&self.basis, b, -1, -1), src.clone()));
        src.len() - stacked.rank()
    }

    pub fn dolbeault_dim(&self, b: Bidegree) -> usize {
        let src = self.basis.block(b);
        let kernel = src.len() - exact_sub(&self.delbar, signed(&self.basis, b, 0, 1), src.clone()).rank();
        kernel - exact_sub(&self.delbar, src, signed(&self.basis, b, 0, -1)).rank()
    }

    pub fn derham_dim(&self, k: usize) -> usize {
        let src = self.basis.degree(k);
        let kernel = src.len() - exact_sub(&self.d, degree_signed(&self.basis, k as isize + 1), src.clone()).rank();
        kernel - exact_sub(&self.d, src, degree_signed(&self.basis, k as isize - 1)).rank()
    }

    pub fn ddbar_check(&self) -> DdbarReport {
        let basis = &self.basis;
        let ddbar = self.del.mul(&self.delbar);
        let entries = basis
            .blocks()
            .map(|b| {
                let dst = basis.block(b);
                let w = exact_sub(&self.del, dst.clone(), signed(basis, b, -1, 0))
                    .hstack(&exact_sub(&self.delbar, dst.clone(), signed(basis, b, 0, -1)));
                DdbarEntry {
                    bidegree: b,
                    closed_exact: exact_kernel_intersection(&self.closed_block(&self.delbar, b), &w),
                    ddbar_exact: exact_sub(&ddbar, dst, signed(basis, b, -1, -1)).rank(),
                }
            })
            .collect();
        DdbarReport { entries }
    }

    /// Exact `h_BCφ`, `v`, `u` with `Φ` converted exactly from its binary
    /// floating-point entries.
    pub fn deformed_bc_table(&self, phi: &DMatrix<C64>) -> DeformedTable {
        let basis = &self.basis;
        let n = basis.n();
        let mut images: Vec<Vec<GaussRational>> = Vec::with_capacity(2 * n);
        for alpha in 1..=n {
            let mut v = basis.unit::<GaussRational>(0);
            v[0] = num_traits::Zero::zero();
            for beta in 1..=n {
                v[basis.antiholomorphic_generator(beta)] =
                    <GaussRational as crate::field::Field>::from_c64(phi[(alpha - 1, beta - 1)]);
            }
            images.push(v);
        }
        for _ in 0..n {
            images.push(alloc::vec![num_traits::Zero::zero(); basis.dim()]);
        }
        let contraction = RationalMatrix::from_columns(basis.dim(), &basis.extend_derivation(&images, false));
        let lie = contraction.mul(&self.del).sub(&self.del.mul(&contraction));
        let delbar_phi = self.delbar.sub(&lie);
        let ddbar_phi = self.del.mul(&delbar_phi);
        let ddbar_adj = self.del.mul(&self.delbar).adjoint();

        let entries = basis
            .blocks()
            .map(|b| {
                let src = basis.block(b);
                let h_bc = self.bc_dim(b);
                let d_phi_out = self.closed_block(&delbar_phi, b);
                let closed = src.len() - d_phi_out.rank();
                let exact = exact_sub(&ddbar_phi, src.clone(), signed(basis, b, -1, -1)).rank();
                let h_bc_phi = closed - exact;

                let adj = exact_sub(&ddbar_adj, signed(basis, b, -1, -1), src.clone());
                let v = h_bc - (src.len() - d_phi_out.vstack(&adj).rank());

                let harmonic_eqs = self.closed_block(&self.delbar, b).vstack(&adj);
                let harmonic = harmonic_eqs.nullspace();
                let coexact = exact_sub(&ddbar_adj, src.clone(), signed(basis, b, 1, 1));
                let w = harmonic.hstack(&coexact);
                let out = exact_sub(&ddbar_phi, signed(basis, b, 1, 1), src);
                let u = h_bc - exact_kernel_intersection(&out, &w);
                DeformedEntry {
                    bidegree: b,
                    h_bc,
                    h_bc_phi,
                    v,
                    u,
                }
            })
            .collect();
        DeformedTable { entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::metric::MetricConfig;

    fn ctx(model: &LieModel) -> MetricContext {
        MetricContext::new(model, MetricConfig::default())
    }

    #[test]
    fn torus_one_tables() {
        let m = corpus::torus(1);
        let c = ctx(&m);
        for s in cohomology(&c, Theory::BottChern) {
            assert_eq!(s.dim(), 1);
            assert_eq!(s.quotient_dim, 1);
        }
        assert_eq!(cohomology(&c, Theory::DeRham)[1].dim(), 2);
    }

    #[test]
    fn iwasawa_bc_values() {
        let m = corpus::iwasawa();
        let c = ctx(&m);
        let e = ExactModel::new(&m);
        for (b, want) in [(Bidegree::new(1, 0), 2), (Bidegree::new(1, 1), 4)] {
            assert_eq!(c.bc_block(b).dim(), want);
            assert_eq!(bc_quotient_dim(&c, b), want);
            assert_eq!(e.bc_dim(b), want);
        }
    }

    #[test]
    fn ddbar_detection() {
        assert!(ddbar_check(&ctx(&corpus::torus(2))).holds());
        let iw = ddbar_check(&ctx(&corpus::iwasawa()));
        assert!(!iw.holds());
        assert!(iw.failing().contains(&Bidegree::new(2, 0)));
        assert!(!ddbar_check(&ctx(&corpus::kodaira_thurston())).holds());
    }

    #[test]
    fn torus_filtrations() {
        let m = corpus::torus(1);
        let c = ctx(&m);
        assert_eq!(hodge_filtration(&c, 1, 1).unwrap().dim(), 1);
        assert_eq!(hodge_filtration(&c, 0, 1).unwrap().dim(), 2);
        let m = corpus::torus(2);
        assert_eq!(hodge_filtration(&ctx(&m), 1, 2).unwrap().dim(), 5);
    }

    #[test]
    fn iwasawa_filtration_degenerates() {
        let m = corpus::iwasawa();
        assert!(matches!(
            hodge_filtration(&ctx(&m), 1, 2),
            Err(Error::FiltrationDegenerate { .. })
        ));
    }

    #[test]
    fn undeformed_table_is_trivial() {
        let m = corpus::iwasawa();
        let c = ctx(&m);
        let t = deformed_bc_table(&m, &c, &DMatrix::zeros(3, 3)).unwrap();
        for e in &t.entries {
            assert_eq!(e.h_bc, e.h_bc_phi);
            assert_eq!((e.v, e.u), (0, 0));
        }
    }
}
