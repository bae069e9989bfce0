//! Hermitian structure, adjoints, Laplacians, Green operators and harmonic
//! projections.
//!
//! The invariant coframe is declared orthonormal, so basis monomials are
//! orthonormal and every adjoint is a conjugate transpose. All caches are
//! built eagerly by [`MetricContext::new`] and never change afterwards.

use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::DMatrix;

use crate::error::Error;
use crate::exterior::{Bidegree, ExteriorBasis, Form, LieModel};
use crate::field::C64;
use crate::linalg::{self, SpectralSplit};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricConfig {
    /// Relative singular value / eigenvalue threshold for numerical rank.
    pub rank_tol: f64,
    /// Smallest nonzero Laplacian eigenvalue accepted without an
    /// ill-conditioning report.
    pub spectral_floor: f64,
}

impl Default for MetricConfig {
    fn default() -> Self {
        Self {
            rank_tol: linalg::DEFAULT_RANK_TOL,
            spectral_floor: 1e-8,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theory {
    DeRham,
    Dolbeault,
    BottChern,
}

/// Harmonic data of one block (a bidegree or a total degree).
#[derive(Clone, Debug)]
pub struct HarmonicBlock {
    pub range: Range<usize>,
    /// Orthogonal projector onto the Laplacian kernel, block-local.
    pub projector: DMatrix<C64>,
    /// Pseudo-inverse of the Laplacian block, block-local.
    pub green: DMatrix<C64>,
    /// Canonical orthonormal basis of the kernel as global-length columns.
    pub basis: DMatrix<C64>,
    pub smallest_nonzero: Option<f64>,
}

impl HarmonicBlock {
    fn build(laplacian: &DMatrix<C64>, range: Range<usize>, total: usize, tol: f64) -> Self {
        let block = laplacian
            .view((range.start, range.start), (range.len(), range.len()))
            .into_owned();
        let SpectralSplit {
            projector,
            pseudo_inverse,
            kernel_dim,
            smallest_nonzero,
        } = linalg::spectral_split(&block, tol);
        let local = linalg::canonical_basis(&projector, kernel_dim);
        let mut basis = DMatrix::zeros(total, local.ncols());
        basis
            .view_mut((range.start, 0), (range.len(), local.ncols()))
            .copy_from(&local);
        Self {
            range,
            projector,
            green: pseudo_inverse,
            basis,
            smallest_nonzero,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    fn embed(&self, local: &DMatrix<C64>, global: &mut DMatrix<C64>) {
        let r = &self.range;
        global.view_mut((r.start, r.start), (r.len(), r.len())).copy_from(local);
    }
}

/// Result of [`MetricContext::green_bc`].
#[derive(Clone, Debug)]
pub struct GreenOperator {
    pub green: DMatrix<C64>,
    pub harmonic: DMatrix<C64>,
    pub smallest_nonzero: Option<f64>,
    /// Smallest nonzero eigenvalue fell below the spectral floor.
    pub ill_conditioned: bool,
}

/// Block dimensions and orthogonality of
/// `A^{p,q} = ker □_BC ⊕ Im ∂∂̄ ⊕ (Im ∂* + Im ∂̄*)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionReport {
    pub bidegree: Bidegree,
    pub block_dim: usize,
    pub harmonic: usize,
    pub ddbar_image: usize,
    pub adjoint_image: usize,
    pub orthogonality: f64,
}

impl DecompositionReport {
    pub fn dimensions_match(&self) -> bool {
        self.block_dim == self.harmonic + self.ddbar_image + self.adjoint_image
    }
}

#[derive(Clone, Debug)]
pub struct MetricContext {
    basis: ExteriorBasis,
    config: MetricConfig,
    d: DMatrix<C64>,
    del: DMatrix<C64>,
    delbar: DMatrix<C64>,
    d_adj: DMatrix<C64>,
    del_adj: DMatrix<C64>,
    delbar_adj: DMatrix<C64>,
    ddbar: DMatrix<C64>,
    ddbar_adj: DMatrix<C64>,
    lap_bc: DMatrix<C64>,
    lap_delbar: DMatrix<C64>,
    lap_d: DMatrix<C64>,
    bc: Vec<(Bidegree, HarmonicBlock)>,
    dolbeault: Vec<(Bidegree, HarmonicBlock)>,
    derham: Vec<HarmonicBlock>,
    harmonic_bc: DMatrix<C64>,
    green_bc: DMatrix<C64>,
    canonical: DMatrix<C64>,
}

impl MetricContext {
    pub fn new(model: &LieModel, config: MetricConfig) -> Self {
        Self::from_operators(
            model.basis().clone(),
            model.d().clone(),
            model.del().clone(),
            model.delbar().clone(),
            config,
        )
    }

    /// Builds the metric caches for arbitrary `d = ∂ + ∂̄` given in an
    /// orthonormal monomial basis. Used for deformed structures as well.
    pub fn from_operators(
        basis: ExteriorBasis,
        d: DMatrix<C64>,
        del: DMatrix<C64>,
        delbar: DMatrix<C64>,
        config: MetricConfig,
    ) -> Self {
        let total = basis.dim();
        let tol = config.rank_tol;
        let d_adj = d.adjoint();
        let del_adj = del.adjoint();
        let delbar_adj = delbar.adjoint();
        let ddbar = &del * &delbar;
        let ddbar_adj = ddbar.adjoint();
        let dbs_d = &delbar_adj * &del;
        let dbs_d_adj = dbs_d.adjoint();

        let lap_bc = &ddbar * &ddbar_adj
            + &ddbar_adj * &ddbar
            + &dbs_d * &dbs_d_adj
            + &dbs_d_adj * &dbs_d
            + &delbar_adj * &delbar
            + &del_adj * &del;
        let lap_delbar = &delbar * &delbar_adj + &delbar_adj * &delbar;
        let lap_d = &d * &d_adj + &d_adj * &d;

        let blocks: Vec<Bidegree> = basis.blocks().collect();
        let bc: Vec<(Bidegree, HarmonicBlock)> = blocks
            .iter()
            .map(|&b| (b, HarmonicBlock::build(&lap_bc, basis.block(b), total, tol)))
            .collect();
        let dolbeault: Vec<(Bidegree, HarmonicBlock)> = blocks
            .iter()
            .map(|&b| (b, HarmonicBlock::build(&lap_delbar, basis.block(b), total, tol)))
            .collect();
        let derham: Vec<HarmonicBlock> = (0..=2 * basis.n())
            .map(|k| HarmonicBlock::build(&lap_d, basis.degree(k), total, tol))
            .collect();

        let mut harmonic_bc = DMatrix::zeros(total, total);
        let mut green_bc = DMatrix::zeros(total, total);
        for (_, h) in &bc {
            h.embed(&h.projector, &mut harmonic_bc);
            h.embed(&h.green, &mut green_bc);
        }
        // G_BC (∂̄*∂∂* + ∂̄*) ∂
        let canonical = &green_bc * (&delbar_adj * &del * &del_adj + &delbar_adj) * &del;

        Self {
            basis,
            config,
            d,
            del,
            delbar,
            d_adj,
            del_adj,
            delbar_adj,
            ddbar,
            ddbar_adj,
            lap_bc,
            lap_delbar,
            lap_d,
            bc,
            dolbeault,
            derham,
            harmonic_bc,
            green_bc,
            canonical,
        }
    }

    pub fn basis(&self) -> &ExteriorBasis {
        &self.basis
    }

    pub fn config(&self) -> MetricConfig {
        self.config
    }

    pub fn tol(&self) -> f64 {
        self.config.rank_tol
    }

    /// `⟨a, b⟩`, linear in `a`, conjugate-linear in `b`.
    pub fn inner(&self, a: &Form, b: &Form) -> Result<C64, Error> {
        let zero_tol = 0.0;
        let da = self.basis.degree_of(a, zero_tol);
        let db = self.basis.degree_of(b, zero_tol);
        let nonzero = |f: &Form| f.iter().any(|z| z.norm() > 0.0);
        match (da, db) {
            (Some(x), Some(y)) if x == y || !nonzero(a) || !nonzero(b) => Ok(b.dotc(a)),
            (Some(x), Some(y)) => Err(Error::DegreeMismatch { left: x, right: y }),
            _ => Err(Error::DegreeMismatch {
                left: da.unwrap_or(usize::MAX),
                right: db.unwrap_or(usize::MAX),
            }),
        }
    }

    pub fn norm(&self, a: &Form) -> f64 {
        a.norm()
    }

    // ----- operators -------------------------------------------------------

    pub fn d(&self) -> &DMatrix<C64> {
        &self.d
    }
    pub fn del(&self) -> &DMatrix<C64> {
        &self.del
    }
    pub fn delbar(&self) -> &DMatrix<C64> {
        &self.delbar
    }
    pub fn d_adjoint(&self) -> &DMatrix<C64> {
        &self.d_adj
    }
    pub fn del_adjoint(&self) -> &DMatrix<C64> {
        &self.del_adj
    }
    pub fn delbar_adjoint(&self) -> &DMatrix<C64> {
        &self.delbar_adj
    }
    /// `∂∂̄`.
    pub fn ddbar(&self) -> &DMatrix<C64> {
        &self.ddbar
    }
    /// `(∂∂̄)*`.
    pub fn ddbar_adjoint(&self) -> &DMatrix<C64> {
        &self.ddbar_adj
    }
    pub fn laplacian_bc_global(&self) -> &DMatrix<C64> {
        &self.lap_bc
    }
    pub fn laplacian_delbar_global(&self) -> &DMatrix<C64> {
        &self.lap_delbar
    }
    pub fn laplacian_d_global(&self) -> &DMatrix<C64> {
        &self.lap_d
    }
    /// Block-diagonal `𝓗_BC` on the whole algebra.
    pub fn harmonic_bc_global(&self) -> &DMatrix<C64> {
        &self.harmonic_bc
    }
    /// Block-diagonal `G_BC` on the whole algebra.
    pub fn green_bc_global(&self) -> &DMatrix<C64> {
        &self.green_bc
    }
    /// `G_BC (∂̄*∂∂* + ∂̄*) ∂`, the operator driving canonical deformations.
    pub fn canonical_operator(&self) -> &DMatrix<C64> {
        &self.canonical
    }

    fn local(&self, m: &DMatrix<C64>, b: Bidegree) -> DMatrix<C64> {
        let r = self.basis.block(b);
        m.view((r.start, r.start), (r.len(), r.len())).into_owned()
    }

    /// `□_BC` restricted to `A^{p,q}`.
    pub fn laplacian_bc(&self, b: Bidegree) -> DMatrix<C64> {
        self.local(&self.lap_bc, b)
    }

    pub fn laplacian_delbar(&self, b: Bidegree) -> DMatrix<C64> {
        self.local(&self.lap_delbar, b)
    }

    pub fn laplacian_d(&self, k: usize) -> DMatrix<C64> {
        let r = self.basis.degree(k);
        self.lap_d.view((r.start, r.start), (r.len(), r.len())).into_owned()
    }

    pub fn bc_block(&self, b: Bidegree) -> &HarmonicBlock {
        &self.bc.iter().find(|(bb, _)| *bb == b).expect("valid bidegree").1
    }

    pub fn dolbeault_block(&self, b: Bidegree) -> &HarmonicBlock {
        &self.dolbeault.iter().find(|(bb, _)| *bb == b).expect("valid bidegree").1
    }

    pub fn derham_block(&self, k: usize) -> &HarmonicBlock {
        &self.derham[k]
    }

    pub fn green_bc(&self, b: Bidegree) -> GreenOperator {
        let h = self.bc_block(b);
        GreenOperator {
            green: h.green.clone(),
            harmonic: h.projector.clone(),
            smallest_nonzero: h.smallest_nonzero,
            ill_conditioned: h
                .smallest_nonzero
                .is_some_and(|s| s < self.config.spectral_floor),
        }
    }

    /// Bidegrees whose Bott-Chern Laplacian has a nonzero eigenvalue below
    /// the spectral floor.
    pub fn ill_conditioned_blocks(&self) -> Vec<(Bidegree, f64)> {
        self.bc
            .iter()
            .filter_map(|(b, h)| {
                h.smallest_nonzero
                    .filter(|&s| s < self.config.spectral_floor)
                    .map(|s| (*b, s))
            })
            .collect()
    }

    /// Block-local orthogonal projector onto the harmonic space of the given
    /// theory. For de Rham the block is the total degree `b.total()`.
    pub fn harmonic_projection(&self, theory: Theory, b: Bidegree) -> DMatrix<C64> {
        match theory {
            Theory::BottChern => self.bc_block(b).projector.clone(),
            Theory::Dolbeault => self.dolbeault_block(b).projector.clone(),
            Theory::DeRham => self.derham_block(b.total()).projector.clone(),
        }
    }

    // ----- coordinates -----------------------------------------------------

    /// Coordinates of the class of a closed `k`-form in the canonical
    /// orthonormal d-harmonic basis of `H^k`.
    pub fn derham_coordinates(&self, k: usize, a: &Form) -> nalgebra::DVector<C64> {
        self.derham[k].basis.adjoint() * a
    }

    /// Coordinates of the Bott-Chern class of a `d`-closed `(p,q)`-form in the
    /// canonical basis of `𝓗^{p,q}_BC`.
    pub fn bc_coordinates(&self, b: Bidegree, a: &Form) -> nalgebra::DVector<C64> {
        let h = self.bc_block(b);
        let projected = &self.harmonic_bc * a;
        h.basis.adjoint() * projected
    }

    // ----- structural checks -----------------------------------------------

    /// Dimensions and mutual orthogonality of the three summands of the
    /// Bott-Chern decomposition on `A^{p,q}`.
    pub fn bc_decomposition(&self, b: Bidegree) -> DecompositionReport {
        let tol = self.tol();
        let basis = &self.basis;
        let r = basis.block(b);
        let harmonic = self.bc_block(b).basis.rows(r.start, r.len()).into_owned();

        let ddbar_src = basis.block_signed(b.p as isize - 1, b.q as isize - 1);
        let ddbar_into = self.ddbar.view((r.start, ddbar_src.start), (r.len(), ddbar_src.len())).into_owned();
        let img_ddbar = linalg::column_space(&ddbar_into, tol);

        let del_src = basis.block_signed(b.p as isize + 1, b.q as isize);
        let delbar_src = basis.block_signed(b.p as isize, b.q as isize + 1);
        let del_adj_into = self.del_adj.view((r.start, del_src.start), (r.len(), del_src.len())).into_owned();
        let delbar_adj_into = self
            .delbar_adj
            .view((r.start, delbar_src.start), (r.len(), delbar_src.len()))
            .into_owned();
        let img_adj = linalg::column_space(&linalg::hstack(&del_adj_into, &delbar_adj_into), tol);

        let orthogonality = linalg::cross_gram_norm(&harmonic, &img_ddbar)
            .max(linalg::cross_gram_norm(&harmonic, &img_adj))
            .max(linalg::cross_gram_norm(&img_ddbar, &img_adj));
        DecompositionReport {
            bidegree: b,
            block_dim: r.len(),
            harmonic: harmonic.ncols(),
            ddbar_image: img_ddbar.ncols(),
            adjoint_image: img_adj.ncols(),
            orthogonality,
        }
    }

    /// Principal-angle distance between `ker □_BC` and
    /// `ker ∂ ∩ ker ∂̄ ∩ ker (∂∂̄)*` on `A^{p,q}`.
    pub fn bc_kernel_equality(&self, b: Bidegree) -> f64 {
        let r = self.basis.block(b);
        let rows = |m: &DMatrix<C64>| m.columns(r.start, r.len()).into_owned();
        let stacked = linalg::vstack(
            &linalg::vstack(&rows(&self.del), &rows(&self.delbar)),
            &rows(&self.ddbar_adj),
        );
        let direct = linalg::kernel(&stacked, self.tol());
        let harmonic = self.bc_block(b).basis.rows(r.start, r.len()).into_owned();
        linalg::subspace_distance(&direct, &harmonic)
    }

    /// `‖I - 𝓗_BC - □_BC G_BC‖` and `max(‖G 𝓗‖, ‖𝓗 G‖)` on one block.
    pub fn green_identity_residual(&self, b: Bidegree) -> (f64, f64) {
        let h = self.bc_block(b);
        let lap = self.laplacian_bc(b);
        let n = h.range.len();
        let id = DMatrix::<C64>::identity(n, n);
        let resid = linalg::max_abs(&(id - &h.projector - &lap * &h.green));
        let cross = linalg::max_abs(&(&h.green * &h.projector)).max(linalg::max_abs(&(&h.projector * &h.green)));
        (resid, cross)
    }
}
