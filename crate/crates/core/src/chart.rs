//! Points of Grassmannians: a column-spanning matrix with its canonical
//! reduced form and Plücker vector.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::error::Error;
use crate::field::C64;
use crate::linalg;

/// Largest number of Plücker coordinates computed eagerly.
pub const PLUECKER_LIMIT: usize = 1 << 16;

#[derive(Clone, Debug)]
pub struct SubspaceChart {
    spanning: DMatrix<C64>,
    orthonormal: DMatrix<C64>,
    reduced: DMatrix<C64>,
    minors: Option<DVector<C64>>,
    tol: f64,
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: usize = 1;
    for i in 0..k {
        r = r.saturating_mul(n - i) / (i + 1);
    }
    r
}

/// `k`-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Reduced column echelon form: the transpose of the reduced row echelon
/// form of `a^T`, with pivots chosen in ambient coordinate order and scaled
/// to one.
fn reduced_column_echelon(a: &DMatrix<C64>, tol: f64) -> DMatrix<C64> {
    let mut m = a.transpose();
    let (rows, cols) = m.shape();
    let scale = linalg::max_abs(a).max(1.0);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (best, val) = (r..rows)
            .map(|i| (i, m[(i, c)].norm()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= tol * scale {
            continue;
        }
        m.swap_rows(r, best);
        let p = m[(r, c)];
        for j in 0..cols {
            m[(r, j)] /= p;
        }
        for i in 0..rows {
            if i != r {
                let f = m[(i, c)];
                if !f.is_zero() {
                    for j in 0..cols {
                        let v = m[(r, j)];
                        m[(i, j)] -= f * v;
                    }
                }
            }
        }
        r += 1;
    }
    m.transpose()
}

fn minors(a: &DMatrix<C64>) -> Option<DVector<C64>> {
    let (n, k) = a.shape();
    if binomial(n, k) > PLUECKER_LIMIT {
        return None;
    }
    let sets = subsets(n, k);
    Some(DVector::from_iterator(
        sets.len(),
        sets.iter().map(|rows| {
            if k == 0 {
                return C64::new(1.0, 0.0);
            }
            DMatrix::from_fn(k, k, |i, j| a[(rows[i], j)]).determinant()
        }),
    ))
}

impl SubspaceChart {
    /// Chart of the column span; the columns must be independent.
    pub fn new(spanning: DMatrix<C64>, tol: f64) -> Result<Self, Error> {
        let rank = linalg::rank(&spanning, tol);
        if rank < spanning.ncols() {
            return Err(Error::RankDrop {
                rank,
                expected: spanning.ncols(),
            });
        }
        let orthonormal = linalg::column_space(&spanning, tol);
        let reduced = reduced_column_echelon(&spanning, tol);
        let minors = minors(&spanning);
        Ok(Self {
            spanning,
            orthonormal,
            reduced,
            minors,
            tol,
        })
    }

    pub fn ambient(&self) -> usize {
        self.spanning.nrows()
    }

    pub fn dim(&self) -> usize {
        self.spanning.ncols()
    }

    pub fn spanning(&self) -> &DMatrix<C64> {
        &self.spanning
    }

    pub fn orthonormal(&self) -> &DMatrix<C64> {
        &self.orthonormal
    }

    pub fn reduced(&self) -> &DMatrix<C64> {
        &self.reduced
    }

    /// Raw Plücker coordinates of the spanning matrix, `None` above
    /// [`PLUECKER_LIMIT`].
    pub fn minors(&self) -> Option<&DVector<C64>> {
        self.minors.as_ref()
    }

    /// Unit-norm Plücker vector whose first nonzero entry is positive real.
    pub fn pluecker(&self) -> Option<DVector<C64>> {
        let m = self.minors.as_ref()?;
        let norm = m.norm();
        let lead = m.iter().find(|z| z.norm() > self.tol * norm).copied()?;
        let phase = lead.conj() / lead.norm();
        Some(m * (phase / norm))
    }

    /// Index of the largest Plücker coordinate.
    pub fn dominant_index(&self) -> Option<usize> {
        let m = self.minors.as_ref()?;
        m.iter()
            .enumerate()
            .fold(None, |acc: Option<(usize, f64)>, (i, z)| match acc {
                Some((_, best)) if best >= z.norm() => acc,
                _ => Some((i, z.norm())),
            })
            .map(|(i, _)| i)
    }

    /// Plücker vector divided by its coordinate `reference`: a holomorphic
    /// affine chart near points where that coordinate is nonzero.
    pub fn affine_pluecker(&self, reference: usize) -> Option<DVector<C64>> {
        let m = self.minors.as_ref()?;
        let r = m[reference];
        if r.norm() == 0.0 {
            return None;
        }
        Some(m / r)
    }

    /// Sine of the largest principal angle; `1` when dimensions differ.
    pub fn distance(&self, other: &SubspaceChart) -> f64 {
        if self.dim() != other.dim() || self.ambient() != other.ambient() {
            return 1.0;
        }
        linalg::subspace_distance(&self.orthonormal, &other.orthonormal)
    }

    /// How far `self` sticks out of `other` (zero iff contained).
    pub fn containment_in(&self, other: &SubspaceChart) -> f64 {
        linalg::containment_residual(&self.orthonormal, &other.orthonormal)
    }

    /// Norm of the component of `v` orthogonal to the span.
    pub fn orthogonal_residual(&self, v: &DVector<C64>) -> f64 {
        let q = &self.orthonormal;
        (v - q * (q.adjoint() * v)).norm()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(4, 2)[1], alloc::vec![0, 2]);
        assert_eq!(subsets(3, 0), alloc::vec![Vec::<usize>::new()]);
        assert_eq!(binomial(6, 3), 20);
    }

    #[test]
    fn reduced_form_is_basis_independent() {
        let a = DMatrix::from_row_slice(3, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(3.0, -1.0)]);
        let g = DMatrix::from_row_slice(2, 2, &[c(2.0, 1.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.5, 0.5)]);
        let x = SubspaceChart::new(a.clone(), 1e-9).unwrap();
        let y = SubspaceChart::new(&a * g, 1e-9).unwrap();
        assert!(linalg::max_abs(&(x.reduced() - y.reduced())) < 1e-12);
        assert!((x.pluecker().unwrap() - y.pluecker().unwrap()).norm() < 1e-12);
        assert!(x.distance(&y) < 1e-7);
    }

    #[test]
    fn line_through_one_t() {
        let t = c(0.05, 0.02);
        let a = DMatrix::from_column_slice(2, 1, &[c(1.0, 0.0), t]);
        let x = SubspaceChart::new(a, 1e-9).unwrap();
        let aff = x.affine_pluecker(0).unwrap();
        assert!((aff[1] - t).norm() < 1e-15);
        let p = x.pluecker().unwrap();
        assert!((p.norm() - 1.0).abs() < 1e-15);
        assert!(p[0].im == 0.0 && p[0].re > 0.0);
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let a = DMatrix::from_column_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0)]);
        assert!(matches!(SubspaceChart::new(a, 1e-9), Err(Error::RankDrop { rank: 1, expected: 2 })));
    }
}
