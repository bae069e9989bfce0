//! Bigraded exterior algebra of an invariant coframe.
//!
//! Generators are ordered `ω^1 .. ω^n, ω̄^1 .. ω̄^n`; a monomial is stored as a
//! bitmask over these `2n` generators (bit `α-1` for `ω^α`, bit `n+α-1` for
//! `ω̄^α`) and always denotes the wedge product in increasing bit order, i.e.
//! `ω^I ∧ ω̄^J` with `I`, `J` strictly increasing.
//!
//! The canonical basis order used by every vector and matrix in the crate is:
//! total degree ascending, then holomorphic degree `p` descending, then `I`
//! lexicographic, then `J` lexicographic. Each bidegree block `(p, q)` and each
//! total degree `k` therefore occupies a contiguous index range, and the
//! filtration piece `F^p A^k` is a prefix of the degree-`k` range.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use crate::error::{Error, IntegrabilityFailure};
use crate::field::{Field, C64};

/// A form in the floating backend: coefficients in canonical basis order.
pub type Form = DVector<C64>;

/// Largest supported complex dimension (`4^n` basis monomials).
pub const MAX_DIMENSION: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bidegree {
    pub p: usize,
    pub q: usize,
}

impl Bidegree {
    pub const fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    pub const fn total(self) -> usize {
        self.p + self.q
    }

    pub fn conjugate(self) -> Self {
        Self::new(self.q, self.p)
    }
}

/// Basis monomial `ω^I ∧ ω̄^J`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    mask: u32,
    n: usize,
}

impl Monomial {
    pub fn new(n: usize, holomorphic: &[usize], antiholomorphic: &[usize]) -> Option<Self> {
        let mut mask = 0u32;
        for &i in holomorphic {
            if i == 0 || i > n || mask & (1 << (i - 1)) != 0 {
                return None;
            }
            mask |= 1 << (i - 1);
        }
        for &j in antiholomorphic {
            if j == 0 || j > n || mask & (1 << (n + j - 1)) != 0 {
                return None;
            }
            mask |= 1 << (n + j - 1);
        }
        Some(Self { mask, n })
    }

    pub fn mask(self) -> u32 {
        self.mask
    }

    /// Holomorphic indices, 1-based and increasing.
    pub fn holomorphic(self) -> Vec<usize> {
        (0..self.n).filter(|i| self.mask & (1 << i) != 0).map(|i| i + 1).collect()
    }

    pub fn antiholomorphic(self) -> Vec<usize> {
        (0..self.n)
            .filter(|j| self.mask & (1 << (self.n + j)) != 0)
            .map(|j| j + 1)
            .collect()
    }

    pub fn bidegree(self) -> Bidegree {
        let low = (1u32 << self.n) - 1;
        Bidegree::new(
            (self.mask & low).count_ones() as usize,
            (self.mask >> self.n).count_ones() as usize,
        )
    }

    /// Human-readable label such as `w1^w2^wb3` (`wb` marks a conjugate).
    pub fn label(self) -> String {
        let mut parts: Vec<String> = Vec::new();
        for i in self.holomorphic() {
            parts.push(alloc::format!("w{i}"));
        }
        for j in self.antiholomorphic() {
            parts.push(alloc::format!("wb{j}"));
        }
        if parts.is_empty() {
            String::from("1")
        } else {
            parts.join("^")
        }
    }
}

/// Sign of `ω^a ∧ ω^b` relative to the sorted monomial `a | b`; zero if they
/// share a generator.
pub fn wedge_sign(a: u32, b: u32) -> i32 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let y = rest.trailing_zeros();
        inversions += (a >> (y + 1)).count_ones();
        rest &= rest - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Monomial basis of the exterior algebra on `n` holomorphic generators.
#[derive(Clone, Debug)]
pub struct ExteriorBasis {
    n: usize,
    masks: Vec<u32>,
    position: Vec<usize>,
    blocks: Vec<(Bidegree, Range<usize>)>,
    degrees: Vec<Range<usize>>,
}

impl ExteriorBasis {
    pub fn new(n: usize) -> Self {
        assert!((1..=MAX_DIMENSION).contains(&n), "unsupported dimension {n}");
        let total = 1usize << (2 * n);
        let mut masks: Vec<u32> = (0..total as u32).collect();
        let key = |m: u32| {
            let mono = Monomial { mask: m, n };
            let b = mono.bidegree();
            (b.total(), usize::MAX - b.p, mono.holomorphic(), mono.antiholomorphic())
        };
        masks.sort_by_key(|&m| key(m));

        let mut position = vec![0usize; total];
        for (i, &m) in masks.iter().enumerate() {
            position[m as usize] = i;
        }

        let mut blocks: Vec<(Bidegree, Range<usize>)> = Vec::new();
        for (i, &m) in masks.iter().enumerate() {
            let b = Monomial { mask: m, n }.bidegree();
            match blocks.last_mut() {
                Some((last, range)) if *last == b => range.end = i + 1,
                _ => blocks.push((b, i..i + 1)),
            }
        }
        let mut degrees = vec![0..0; 2 * n + 1];
        for (b, r) in &blocks {
            let d = &mut degrees[b.total()];
            if d.start == d.end {
                *d = r.clone();
            } else {
                d.end = r.end;
            }
        }
        Self {
            n,
            masks,
            position,
            blocks,
            degrees,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Total number of basis monomials, `4^n`.
    pub fn dim(&self) -> usize {
        self.masks.len()
    }

    pub fn monomial(&self, index: usize) -> Monomial {
        Monomial {
            mask: self.masks[index],
            n: self.n,
        }
    }

    pub fn index_of(&self, m: Monomial) -> usize {
        self.position[m.mask as usize]
    }

    pub fn index_of_mask(&self, mask: u32) -> usize {
        self.position[mask as usize]
    }

    /// Bidegree blocks in canonical order.
    pub fn blocks(&self) -> impl Iterator<Item = Bidegree> + '_ {
        self.blocks.iter().map(|(b, _)| *b)
    }

    pub fn block(&self, b: Bidegree) -> Range<usize> {
        if b.p > self.n || b.q > self.n {
            return 0..0;
        }
        self.blocks
            .iter()
            .find(|(bb, _)| *bb == b)
            .map(|(_, r)| r.clone())
            .unwrap_or(0..0)
    }

    /// Block of a possibly negative bidegree; empty when out of range.
    pub fn block_signed(&self, p: isize, q: isize) -> Range<usize> {
        if p < 0 || q < 0 {
            0..0
        } else {
            self.block(Bidegree::new(p as usize, q as usize))
        }
    }

    pub fn degree(&self, k: usize) -> Range<usize> {
        self.degrees.get(k).cloned().unwrap_or(0..0)
    }

    /// Index range of `F^p A^k = ⊕_{λ ≥ p} A^{λ, k-λ}`.
    pub fn filtration(&self, p: usize, k: usize) -> Range<usize> {
        let deg = self.degree(k);
        let end = self
            .blocks
            .iter()
            .filter(|(b, _)| b.total() == k && b.p >= p)
            .map(|(_, r)| r.end)
            .max()
            .unwrap_or(deg.start);
        deg.start..end
    }

    /// Index of the generator `ω^α` (1-based α).
    pub fn holomorphic_generator(&self, alpha: usize) -> usize {
        self.position[1 << (alpha - 1)]
    }

    pub fn antiholomorphic_generator(&self, alpha: usize) -> usize {
        self.position[1 << (self.n + alpha - 1)]
    }

    pub fn unit<F: Field>(&self, index: usize) -> Vec<F> {
        let mut v = vec![F::zero(); self.dim()];
        v[index] = F::one();
        v
    }

    pub fn form_unit(&self, index: usize) -> Form {
        let mut v = Form::zeros(self.dim());
        v[index] = C64::new(1.0, 0.0);
        v
    }

    /// Bidegrees on which `a` has a coefficient above `tol` in modulus.
    pub fn bidegrees_present(&self, a: &Form, tol: f64) -> Vec<Bidegree> {
        self.blocks
            .iter()
            .filter(|(_, r)| r.clone().any(|i| a[i].norm() > tol))
            .map(|(b, _)| *b)
            .collect()
    }

    /// Restriction of a form to one bidegree (other coefficients zeroed).
    pub fn project_block(&self, a: &Form, b: Bidegree) -> Form {
        let r = self.block(b);
        let mut out = Form::zeros(self.dim());
        for i in r {
            out[i] = a[i];
        }
        out
    }

    // ----- generic algebra -------------------------------------------------

    pub fn wedge_generic<F: Field>(&self, a: &[F], b: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let ma = self.masks[i];
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let mb = self.masks[j];
                let s = wedge_sign(ma, mb);
                if s == 0 {
                    continue;
                }
                let k = self.position[(ma | mb) as usize];
                let prod = x.clone() * y.clone();
                out[k] = if s > 0 {
                    out[k].clone() + prod
                } else {
                    out[k].clone() - prod
                };
            }
        }
        out
    }

    /// `v ∧ (monomial mask)`.
    fn wedge_right_monomial<F: Field>(&self, v: &[F], mask: u32) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim()];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let ma = self.masks[i];
            let s = wedge_sign(ma, mask);
            if s == 0 {
                continue;
            }
            let k = self.position[(ma | mask) as usize];
            out[k] = if s > 0 {
                out[k].clone() + x.clone()
            } else {
                out[k].clone() - x.clone()
            };
        }
        out
    }

    /// `(monomial mask) ∧ v`.
    fn wedge_left_monomial<F: Field>(&self, mask: u32, v: &[F]) -> Vec<F> {
        let mut out = vec![F::zero(); self.dim()];
        for (i, x) in v.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let mb = self.masks[i];
            let s = wedge_sign(mask, mb);
            if s == 0 {
                continue;
            }
            let k = self.position[(mask | mb) as usize];
            out[k] = if s > 0 {
                out[k].clone() + x.clone()
            } else {
                out[k].clone() - x.clone()
            };
        }
        out
    }

    /// Complex conjugation: `ω^I ∧ ω̄^J ↦ (-1)^{|I||J|} ω^J ∧ ω̄^I` with
    /// conjugated coefficients.
    pub fn conjugate_generic<F: Field>(&self, a: &[F]) -> Vec<F> {
        let n = self.n;
        let low = (1u32 << n) - 1;
        let mut out = vec![F::zero(); self.dim()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let m = self.masks[i];
            let hol = m & low;
            let anti = m >> n;
            let swapped = anti | (hol << n);
            let sign_odd = (hol.count_ones() * anti.count_ones()) % 2 == 1;
            let k = self.position[swapped as usize];
            out[k] = if sign_odd { -x.conj() } else { x.conj() };
        }
        out
    }

    /// Extends generator images to a derivation of the algebra. `odd` selects
    /// an antiderivation of degree one (`D(g ∧ r) = Dg ∧ r - g ∧ Dr`); otherwise
    /// an even derivation (`D(g ∧ r) = Dg ∧ r + g ∧ Dr`). `images[g]` is the
    /// image of generator bit `g` in canonical coordinates. Returns one dense
    /// column per basis monomial, in canonical order.
    pub fn extend_derivation<F: Field>(&self, images: &[Vec<F>], odd: bool) -> Vec<Vec<F>> {
        assert_eq!(images.len(), 2 * self.n);
        let total = self.dim();
        let mut by_mask: Vec<Vec<F>> = Vec::with_capacity(total);
        by_mask.push(vec![F::zero(); total]);
        for mask in 1..total as u32 {
            let g = mask.trailing_zeros();
            let gbit = 1u32 << g;
            let rest = mask & !gbit;
            let first = self.wedge_right_monomial(&images[g as usize], rest);
            let second = self.wedge_left_monomial(gbit, &by_mask[rest as usize]);
            let col = first
                .into_iter()
                .zip(second)
                .map(|(a, b)| if odd { a - b } else { a + b })
                .collect();
            by_mask.push(col);
        }
        self.reorder_columns(by_mask)
    }

    /// Extends generator images multiplicatively: `H(g ∧ r) = Hg ∧ Hr`, `H(1) = 1`.
    pub fn extend_homomorphism<F: Field>(&self, images: &[Vec<F>]) -> Vec<Vec<F>> {
        assert_eq!(images.len(), 2 * self.n);
        let total = self.dim();
        let mut by_mask: Vec<Vec<F>> = Vec::with_capacity(total);
        by_mask.push(self.unit(self.position[0]));
        for mask in 1..total as u32 {
            let g = mask.trailing_zeros();
            let rest = mask & !(1u32 << g);
            let col = self.wedge_generic(&images[g as usize], &by_mask[rest as usize]);
            by_mask.push(col);
        }
        self.reorder_columns(by_mask)
    }

    fn reorder_columns<F: Field>(&self, by_mask: Vec<Vec<F>>) -> Vec<Vec<F>> {
        let mut slots: Vec<Option<Vec<F>>> = by_mask.into_iter().map(Some).collect();
        self.masks
            .iter()
            .map(|&m| slots[m as usize].take().expect("each mask used once"))
            .collect()
    }

    // ----- floating conveniences ------------------------------------------

    pub fn wedge(&self, a: &Form, b: &Form) -> Form {
        Form::from_vec(self.wedge_generic(a.as_slice(), b.as_slice()))
    }

    pub fn conjugate(&self, a: &Form) -> Form {
        Form::from_vec(self.conjugate_generic(a.as_slice()))
    }

    /// Matrix of a linear map given by its dense columns.
    pub fn columns_to_matrix(&self, columns: &[Vec<C64>]) -> DMatrix<C64> {
        let n = self.dim();
        DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i])
    }

    /// Right multiplication `a ↦ a ∧ θ` as a matrix.
    pub fn right_wedge_matrix(&self, theta: &Form) -> DMatrix<C64> {
        let cols: Vec<Vec<C64>> = (0..self.dim())
            .map(|j| self.wedge_generic(&self.unit::<C64>(j), theta.as_slice()))
            .collect();
        self.columns_to_matrix(&cols)
    }

    /// Left multiplication `a ↦ θ ∧ a` as a matrix.
    pub fn left_wedge_matrix(&self, theta: &Form) -> DMatrix<C64> {
        let cols: Vec<Vec<C64>> = (0..self.dim())
            .map(|j| self.wedge_generic(theta.as_slice(), &self.unit::<C64>(j)))
            .collect();
        self.columns_to_matrix(&cols)
    }

    /// Diagonal matrix of `(-1)^{deg}` on basis monomials.
    pub fn parity_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            if i != j {
                C64::zero()
            } else if self.masks[i].count_ones() % 2 == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(-1.0, 0.0)
            }
        })
    }

    /// Degree of the pure-degree form `a`, `None` if it mixes degrees.
    pub fn degree_of(&self, a: &Form, tol: f64) -> Option<usize> {
        let mut found = None;
        for k in 0..=2 * self.n {
            if self.degree(k).any(|i| a[i].norm() > tol) {
                if found.is_some() {
                    return None;
                }
                found = Some(k);
            }
        }
        Some(found.unwrap_or(0))
    }
}

// ----- model ---------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TermKind {
    /// `ω^i ∧ ω^j`, requires `i < j`.
    Hol,
    /// `ω^i ∧ ω̄^j`.
    Mix,
    /// `ω̄^i ∧ ω̄^j`, requires `i < j`.
    Anti,
}

/// One summand `c · (kind)(i, j)` of a structure equation `dω^α = …`.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureTerm {
    pub coefficient: C64,
    pub kind: TermKind,
    pub i: usize,
    pub j: usize,
}

impl StructureTerm {
    pub fn new(coefficient: C64, kind: TermKind, i: usize, j: usize) -> Self {
        Self {
            coefficient,
            kind,
            i,
            j,
        }
    }
}

/// Structure equations of an invariant coframe: `d_omega[α-1]` lists the
/// terms of `dω^α`. Conjugate equations are derived, never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub name: String,
    pub n: usize,
    pub d_omega: Vec<Vec<StructureTerm>>,
}

/// Which of the three differentials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Differential {
    D,
    Del,
    DelBar,
}

/// Bidegree or degree shift carried by an operator matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shift {
    Bidegree(isize, isize),
    Degree(isize),
}

impl Shift {
    pub fn then(self, next: Shift) -> Shift {
        match (self, next) {
            (Shift::Bidegree(a, b), Shift::Bidegree(c, d)) => Shift::Bidegree(a + c, b + d),
            (a, b) => Shift::Degree(a.total() + b.total()),
        }
    }

    pub fn total(self) -> isize {
        match self {
            Shift::Bidegree(a, b) => a + b,
            Shift::Degree(k) => k,
        }
    }

    pub fn reversed(self) -> Shift {
        match self {
            Shift::Bidegree(a, b) => Shift::Bidegree(-a, -b),
            Shift::Degree(k) => Shift::Degree(-k),
        }
    }
}

/// A linear operator on the whole algebra in the canonical monomial basis,
/// tagged with the (bi)degree shift it performs.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub shift: Shift,
    pub matrix: DMatrix<C64>,
}

impl OperatorMatrix {
    pub fn new(shift: Shift, matrix: DMatrix<C64>) -> Self {
        Self { shift, matrix }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            shift: self.shift.reversed(),
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &OperatorMatrix) -> Self {
        Self {
            shift: first.shift.then(self.shift),
            matrix: &self.matrix * &first.matrix,
        }
    }

    pub fn apply(&self, a: &Form) -> Form {
        &self.matrix * a
    }

    /// Range of target indices for sources in bidegree `b`.
    pub fn target_range(&self, basis: &ExteriorBasis, b: Bidegree) -> Range<usize> {
        match self.shift {
            Shift::Bidegree(dp, dq) => basis.block_signed(b.p as isize + dp, b.q as isize + dq),
            Shift::Degree(dk) => {
                let k = b.total() as isize + dk;
                if k < 0 {
                    0..0
                } else {
                    basis.degree(k as usize)
                }
            }
        }
    }

    /// The block of the matrix mapping `A^{b}` into its target.
    pub fn block(&self, basis: &ExteriorBasis, b: Bidegree) -> DMatrix<C64> {
        let src = basis.block(b);
        let dst = self.target_range(basis, b);
        self.matrix
            .view((dst.start, src.start), (dst.len(), src.len()))
            .into_owned()
    }

    /// The block mapping into `A^{b}` (sources determined by the shift).
    pub fn block_into(&self, basis: &ExteriorBasis, b: Bidegree) -> DMatrix<C64> {
        let dst = basis.block(b);
        let src = match self.shift {
            Shift::Bidegree(dp, dq) => basis.block_signed(b.p as isize - dp, b.q as isize - dq),
            Shift::Degree(dk) => {
                let k = b.total() as isize - dk;
                if k < 0 {
                    0..0
                } else {
                    basis.degree(k as usize)
                }
            }
        };
        self.matrix
            .view((dst.start, src.start), (dst.len(), src.len()))
            .into_owned()
    }
}

/// Splits a degree-one operator by bidegree shift into its `(1,0)`, `(0,1)`
/// and remaining parts, all as full-size matrices.
pub fn split_by_bidegree(
    basis: &ExteriorBasis,
    d: &DMatrix<C64>,
) -> (DMatrix<C64>, DMatrix<C64>, DMatrix<C64>) {
    let n = basis.dim();
    let mut del = DMatrix::zeros(n, n);
    let mut delbar = DMatrix::zeros(n, n);
    let mut rest = DMatrix::zeros(n, n);
    for j in 0..n {
        let bj = basis.monomial(j).bidegree();
        for i in 0..n {
            let z = d[(i, j)];
            if z == C64::zero() {
                continue;
            }
            let bi = basis.monomial(i).bidegree();
            if bi.p == bj.p + 1 && bi.q == bj.q {
                del[(i, j)] = z;
            } else if bi.p == bj.p && bi.q == bj.q + 1 {
                delbar[(i, j)] = z;
            } else {
                rest[(i, j)] = z;
            }
        }
    }
    (del, delbar, rest)
}

/// Structure equations validated and turned into operator matrices.
#[derive(Clone, Debug)]
pub struct LieModel {
    spec: ModelSpec,
    basis: ExteriorBasis,
    d: OperatorMatrix,
    del: OperatorMatrix,
    delbar: OperatorMatrix,
}

/// Absolute tolerance for the `d² = 0` and type checks at load time.
const LOAD_TOL: f64 = 1e-10;

impl LieModel {
    pub fn load(spec: ModelSpec) -> Result<Self, Error> {
        validate_spec(&spec)?;
        let basis = ExteriorBasis::new(spec.n);
        let columns = differential_columns::<C64>(&basis, &spec);
        let d = basis.columns_to_matrix(&columns);

        let scale = d.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let scale = 1.0 + scale * scale;
        let d2 = &d * &d;
        for j in 0..basis.dim() {
            if d2.column(j).iter().any(|z| z.norm() > LOAD_TOL * scale) {
                return Err(Error::NotIntegrable {
                    monomial: basis.monomial(j).label(),
                    failure: IntegrabilityFailure::DSquared,
                });
            }
        }

        let (del, delbar, rest) = split_by_bidegree(&basis, &d);
        for j in 0..basis.dim() {
            if rest.column(j).iter().any(|z| z.norm() > LOAD_TOL) {
                return Err(Error::NotIntegrable {
                    monomial: basis.monomial(j).label(),
                    failure: IntegrabilityFailure::ComplexStructure,
                });
            }
        }
        Ok(Self {
            spec,
            basis,
            d: OperatorMatrix::new(Shift::Degree(1), d),
            del: OperatorMatrix::new(Shift::Bidegree(1, 0), del),
            delbar: OperatorMatrix::new(Shift::Bidegree(0, 1), delbar),
        })
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn n(&self) -> usize {
        self.spec.n
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn basis(&self) -> &ExteriorBasis {
        &self.basis
    }

    pub fn operator(&self, which: Differential) -> &OperatorMatrix {
        match which {
            Differential::D => &self.d,
            Differential::Del => &self.del,
            Differential::DelBar => &self.delbar,
        }
    }

    pub fn differential(&self, which: Differential, a: &Form) -> Form {
        self.operator(which).apply(a)
    }

    pub fn d(&self) -> &DMatrix<C64> {
        &self.d.matrix
    }

    pub fn del(&self) -> &DMatrix<C64> {
        &self.del.matrix
    }

    pub fn delbar(&self) -> &DMatrix<C64> {
        &self.delbar.matrix
    }

    /// The 2-form `dω^α` (1-based α).
    pub fn d_generator(&self, alpha: usize) -> Form {
        self.d.matrix.column(self.basis.holomorphic_generator(alpha)).into_owned()
    }

    /// Coefficient `c` of the mixed term `c · ω^i ∧ ω̄^j` in `dω^α`, summed
    /// over repeated terms.
    pub fn mixed_coefficient(&self, alpha: usize, i: usize, j: usize) -> C64 {
        self.spec.d_omega[alpha - 1]
            .iter()
            .filter(|t| t.kind == TermKind::Mix && t.i == i && t.j == j)
            .map(|t| t.coefficient)
            .sum()
    }
}

fn validate_spec(spec: &ModelSpec) -> Result<(), Error> {
    let n = spec.n;
    if n == 0 {
        return Err(Error::MalformedSpec(String::from("n must be at least 1")));
    }
    if n > MAX_DIMENSION {
        return Err(Error::MalformedSpec(alloc::format!(
            "n = {n} exceeds the supported maximum {MAX_DIMENSION}"
        )));
    }
    if spec.d_omega.len() != n {
        return Err(Error::MalformedSpec(alloc::format!(
            "expected {n} structure equations, found {}",
            spec.d_omega.len()
        )));
    }
    for (a, terms) in spec.d_omega.iter().enumerate() {
        for t in terms {
            let ctx = || alloc::format!("term ({:?}, {}, {}) of dω^{}", t.kind, t.i, t.j, a + 1);
            if !(t.coefficient.re.is_finite() && t.coefficient.im.is_finite()) {
                return Err(Error::MalformedSpec(alloc::format!("{}: non-finite coefficient", ctx())));
            }
            if t.i == 0 || t.j == 0 || t.i > n || t.j > n {
                return Err(Error::MalformedSpec(alloc::format!(
                    "{}: indices must lie in 1..={n}",
                    ctx()
                )));
            }
            if matches!(t.kind, TermKind::Hol | TermKind::Anti) && t.i >= t.j {
                return Err(Error::MalformedSpec(alloc::format!("{}: requires i < j", ctx())));
            }
        }
    }
    Ok(())
}

/// The 2-form `dω^α` as a dense vector over `F`.
fn structure_form<F: Field>(basis: &ExteriorBasis, terms: &[StructureTerm]) -> Vec<F> {
    let n = basis.n();
    let mut v = vec![F::zero(); basis.dim()];
    for t in terms {
        let (a, b) = match t.kind {
            TermKind::Hol => (1u32 << (t.i - 1), 1u32 << (t.j - 1)),
            TermKind::Mix => (1u32 << (t.i - 1), 1u32 << (n + t.j - 1)),
            TermKind::Anti => (1u32 << (n + t.i - 1), 1u32 << (n + t.j - 1)),
        };
        let s = wedge_sign(a, b);
        if s == 0 {
            continue;
        }
        let k = basis.index_of_mask(a | b);
        let c = F::from_c64(t.coefficient);
        v[k] = if s > 0 { v[k].clone() + c } else { v[k].clone() - c };
    }
    v
}

/// Columns of `d` over `F`, built from the structure equations by the
/// Leibniz rule.
pub fn differential_columns<F: Field>(basis: &ExteriorBasis, spec: &ModelSpec) -> Vec<Vec<F>> {
    let n = basis.n();
    let mut images: Vec<Vec<F>> = Vec::with_capacity(2 * n);
    for terms in &spec.d_omega {
        images.push(structure_form::<F>(basis, terms));
    }
    for a in 0..n {
        let conj = basis.conjugate_generic(&images[a]);
        images.push(conj);
    }
    basis.extend_derivation(&images, true)
}
