//! Numerical rank, kernels, orthonormal bases and subspace comparisons for
//! complex matrices.
//!
//! A singular value counts as zero when it is at most
//! `tol · max(σ_max, 1)`. Eigenvalues of positive semidefinite Laplacians use
//! the same rule against `max(λ_max, 1)`.

use alloc::vec::Vec;

use nalgebra::linalg::SymmetricEigen;
use nalgebra::DMatrix;
use num_traits::Zero;

use crate::field::C64;

/// Default relative rank tolerance.
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

fn threshold(largest: f64, tol: f64) -> f64 {
    tol * largest.max(1.0)
}

fn padded_square(a: &DMatrix<C64>) -> DMatrix<C64> {
    if a.nrows() >= a.ncols() {
        a.clone()
    } else {
        let mut p = DMatrix::zeros(a.ncols(), a.ncols());
        p.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
        p
    }
}

pub fn singular_values(a: &DMatrix<C64>) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn rank(a: &DMatrix<C64>, tol: f64) -> usize {
    let s = singular_values(a);
    let Some(&largest) = s.first() else {
        return 0;
    };
    let thr = threshold(largest, tol);
    s.iter().filter(|&&x| x > thr).count()
}

/// Smallest singular value of a matrix with at least as many rows as columns.
pub fn smallest_singular_value(a: &DMatrix<C64>) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// Orthonormal basis of the column space.
pub fn column_space(a: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let thr = threshold(largest, tol);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > thr)
        .collect();
    u.select_columns(keep.iter())
}

/// Orthonormal basis of the right null space.
pub fn kernel(a: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let n = a.ncols();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return DMatrix::identity(n, n);
    }
    let svd = padded_square(a).svd(false, true);
    let v = svd.v_t.expect("requested V^H").adjoint();
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let thr = threshold(largest, tol);
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= thr)
        .collect();
    v.select_columns(keep.iter())
}

pub fn nullity(a: &DMatrix<C64>, tol: f64) -> usize {
    a.ncols() - rank(a, tol)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(h: &DMatrix<C64>) -> (Vec<f64>, DMatrix<C64>) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = eig.eigenvectors.select_columns(order.iter());
    (values, vectors)
}

/// Kernel projector and pseudo-inverse of a Hermitian positive semidefinite
/// matrix, plus its smallest nonzero eigenvalue.
pub struct SpectralSplit {
    pub projector: DMatrix<C64>,
    pub pseudo_inverse: DMatrix<C64>,
    pub kernel_dim: usize,
    pub smallest_nonzero: Option<f64>,
}

pub fn spectral_split(h: &DMatrix<C64>, tol: f64) -> SpectralSplit {
    let n = h.nrows();
    let (values, vectors) = hermitian_eigen(h);
    let largest = values.iter().copied().fold(0.0f64, |a, b| a.max(b.abs()));
    let thr = threshold(largest, tol);
    let mut projector = DMatrix::zeros(n, n);
    let mut pinv = DMatrix::zeros(n, n);
    let mut kernel_dim = 0;
    let mut smallest_nonzero: Option<f64> = None;
    for (i, &lambda) in values.iter().enumerate() {
        let v = vectors.column(i);
        let outer = &v * v.adjoint();
        if lambda <= thr {
            projector += outer;
            kernel_dim += 1;
        } else {
            pinv += outer.scale(1.0 / lambda);
            smallest_nonzero = Some(smallest_nonzero.map_or(lambda, |s: f64| s.min(lambda)));
        }
    }
    SpectralSplit {
        projector,
        pseudo_inverse: pinv,
        kernel_dim,
        smallest_nonzero,
    }
}

/// Moore-Penrose pseudo-inverse of a general matrix.
pub fn pseudo_inverse(a: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DMatrix::zeros(a.ncols(), a.nrows());
    }
    let svd = a.clone().svd(true, true);
    let largest = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let thr = threshold(largest, tol);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^H").adjoint();
    let mut out = DMatrix::zeros(a.ncols(), a.nrows());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > thr {
            out += (v.column(i) * u.column(i).adjoint()).scale(1.0 / s);
        }
    }
    out
}

/// Orthogonal projector `Q Q^H` onto the span of orthonormal columns.
pub fn projector(q: &DMatrix<C64>) -> DMatrix<C64> {
    q * q.adjoint()
}

/// Deterministic orthonormal basis of the range of an orthogonal projector.
///
/// Columns of the projector are visited in canonical order; at each step the
/// first column whose residual (after removing the basis found so far) is at
/// least half of the largest residual is normalised and accepted. For a
/// projector onto a coordinate subspace this returns the coordinate vectors
/// themselves, and the component of each basis vector on its pivot
/// coordinate is real positive.
pub fn canonical_basis(projector: &DMatrix<C64>, dim: usize) -> DMatrix<C64> {
    let n = projector.nrows();
    let mut basis: Vec<nalgebra::DVector<C64>> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let residuals: Vec<nalgebra::DVector<C64>> = (0..n)
            .map(|j| {
                let mut r = projector.column(j).into_owned();
                for b in &basis {
                    let c = b.dotc(&r);
                    r -= b * c;
                }
                r
            })
            .collect();
        let norms: Vec<f64> = residuals.iter().map(|r| r.norm()).collect();
        let largest = norms.iter().copied().fold(0.0, f64::max);
        if largest <= 1e-12 {
            break;
        }
        let j = norms.iter().position(|&x| x >= 0.5 * largest).expect("max exists");
        let mut r = residuals[j].clone();
        // Reorthogonalise once for stability.
        for b in &basis {
            let c = b.dotc(&r);
            r -= b * c;
        }
        let norm = r.norm();
        basis.push(r / C64::new(norm, 0.0));
    }
    if basis.is_empty() {
        return DMatrix::zeros(n, 0);
    }
    DMatrix::from_columns(&basis)
}

/// Spectral norm.
pub fn norm2(a: &DMatrix<C64>) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

pub fn max_abs(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest column 2-norm.
pub fn max_column_norm(a: &DMatrix<C64>) -> f64 {
    (0..a.ncols()).map(|j| a.column(j).norm()).fold(0.0, f64::max)
}

/// Sine of the largest principal angle by which the span of orthonormal `qa`
/// leaves the span of orthonormal `qb`; zero iff `span qa ⊆ span qb`.
pub fn containment_residual(qa: &DMatrix<C64>, qb: &DMatrix<C64>) -> f64 {
    if qa.ncols() == 0 {
        return 0.0;
    }
    if qb.ncols() == 0 {
        return 1.0;
    }
    let residual = qa - qb * (qb.adjoint() * qa);
    norm2(&residual)
}

/// Sine of the largest principal angle between two subspaces given by
/// orthonormal bases; `1` when dimensions differ.
pub fn subspace_distance(qa: &DMatrix<C64>, qb: &DMatrix<C64>) -> f64 {
    if qa.ncols() != qb.ncols() {
        return 1.0;
    }
    containment_residual(qa, qb).max(containment_residual(qb, qa))
}

/// `‖Q_a^H Q_b‖`, the cosine of the smallest principal angle.
pub fn cross_gram_norm(qa: &DMatrix<C64>, qb: &DMatrix<C64>) -> f64 {
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return 0.0;
    }
    norm2(&(qa.adjoint() * qb))
}

pub fn hstack(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    assert_eq!(a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((0, a.ncols()), (b.nrows(), b.ncols())).copy_from(b);
    out
}

pub fn vstack(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    assert_eq!(a.ncols(), b.ncols());
    let mut out = DMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.view_mut((0, 0), (a.nrows(), a.ncols())).copy_from(a);
    out.view_mut((a.nrows(), 0), (b.nrows(), b.ncols())).copy_from(b);
    out
}

/// Dimension of `ker A ∩ span(W)` for arbitrary spanning columns `W`.
pub fn kernel_intersection_dim(a: &DMatrix<C64>, w: &DMatrix<C64>, tol: f64) -> usize {
    let q = column_space(w, tol);
    if q.ncols() == 0 {
        return 0;
    }
    q.ncols() - rank(&(a * &q), tol)
}

pub fn is_zero(a: &DMatrix<C64>) -> bool {
    a.iter().all(|z| z.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, data: &[f64]) -> DMatrix<C64> {
        DMatrix::from_row_slice(rows, cols, &data.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
    }

    #[test]
    fn rank_kernel_of_wide_matrix() {
        let a = m(1, 3, &[1.0, 1.0, 0.0]);
        assert_eq!(rank(&a, DEFAULT_RANK_TOL), 1);
        let k = kernel(&a, DEFAULT_RANK_TOL);
        assert_eq!(k.ncols(), 2);
        assert!(max_abs(&(&a * &k)) < 1e-14);
        assert!(max_abs(&(k.adjoint() * &k - DMatrix::identity(2, 2))) < 1e-14);
    }

    #[test]
    fn canonical_basis_of_coordinate_projector_is_coordinates() {
        let mut p = DMatrix::<C64>::zeros(4, 4);
        p[(1, 1)] = C64::new(1.0, 0.0);
        p[(3, 3)] = C64::new(1.0, 0.0);
        let b = canonical_basis(&p, 2);
        assert_eq!(b.column(0)[1], C64::new(1.0, 0.0));
        assert_eq!(b.column(1)[3], C64::new(1.0, 0.0));
    }

    #[test]
    fn spectral_split_identity() {
        let h = m(3, 3, &[2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 5.0]);
        let s = spectral_split(&h, DEFAULT_RANK_TOL);
        assert_eq!(s.kernel_dim, 1);
        let id = &s.projector + &h * &s.pseudo_inverse;
        assert!(max_abs(&(id - DMatrix::identity(3, 3))) < 1e-14);
        assert_eq!(s.smallest_nonzero, Some(2.0));
    }

    #[test]
    fn principal_angle_detects_rotation() {
        let a = m(2, 1, &[1.0, 0.0]);
        let theta: f64 = 1e-3;
        let b = m(2, 1, &[theta.cos(), theta.sin()]);
        assert!((subspace_distance(&a, &b) - theta.sin()).abs() < 1e-12);
        assert_eq!(subspace_distance(&a, &m(2, 2, &[1.0, 0.0, 0.0, 1.0])), 1.0);
    }
}
