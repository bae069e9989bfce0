//! Exact exterior algebra over `Q(i)`, built from scratch so the core
//! operators can be compared against it.
#![allow(dead_code)]

use std::collections::BTreeMap;

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use hodgevar_core::exterior::Monomial;
use hodgevar_core::{ExteriorBasis, ModelSpec, TermKind, C64};

pub type Q = Complex<BigRational>;

/// Generators `0..n` are `ω^1..ω^n`, `n..2n` are `ω̄^1..ω̄^n`; a key is a
/// strictly increasing generator list.
pub type Mono = Vec<usize>;
pub type Poly = BTreeMap<Mono, Q>;

pub fn q(re: i64, im: i64) -> Q {
    Complex::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
}

pub fn q_from(z: C64) -> Q {
    Complex::new(
        BigRational::from_float(z.re).expect("finite"),
        BigRational::from_float(z.im).expect("finite"),
    )
}

pub fn to_c64(z: &Q) -> C64 {
    C64::new(z.re.to_f64().unwrap(), z.im.to_f64().unwrap())
}

fn conj(z: &Q) -> Q {
    Complex::new(z.re.clone(), -z.im.clone())
}

fn add_term(p: &mut Poly, m: Mono, c: Q) {
    if c.is_zero() {
        return;
    }
    let entry = p.entry(m.clone()).or_insert_with(Q::zero);
    *entry = &*entry + c;
    if entry.is_zero() {
        p.remove(&m);
    }
}

/// Sorts a generator word by bubble sort, tracking the sign; `None` if a
/// generator repeats.
fn normalize(mut word: Vec<usize>) -> Option<(bool, Mono)> {
    let mut negative = false;
    for i in 0..word.len() {
        for j in 0..word.len() - 1 - i {
            if word[j] == word[j + 1] {
                return None;
            }
            if word[j] > word[j + 1] {
                word.swap(j, j + 1);
                negative = !negative;
            }
        }
    }
    if word.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((negative, word))
}

pub fn wedge(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let word: Vec<usize> = ma.iter().chain(mb).copied().collect();
            if let Some((negative, m)) = normalize(word) {
                let c = ca * cb;
                add_term(&mut out, m, if negative { -c } else { c });
            }
        }
    }
    out
}

pub fn scale(a: &Poly, c: &Q) -> Poly {
    let mut out = Poly::new();
    for (m, x) in a {
        add_term(&mut out, m.clone(), x * c);
    }
    out
}

pub fn sum(a: &Poly, b: &Poly) -> Poly {
    let mut out = a.clone();
    for (m, x) in b {
        add_term(&mut out, m.clone(), x.clone());
    }
    out
}

pub fn monomial(m: &[usize]) -> Poly {
    let mut p = Poly::new();
    p.insert(m.to_vec(), q(1, 0));
    p
}

pub fn bidegree(n: usize, m: &Mono) -> (usize, usize) {
    let p = m.iter().filter(|&&g| g < n).count();
    (p, m.len() - p)
}

/// All monomials, grouped by degree then by increasing generator list.
pub fn all_monomials(n: usize) -> Vec<Mono> {
    let mut out: Vec<Mono> = (0u32..1 << (2 * n))
        .map(|bits| (0..2 * n).filter(|g| bits & (1 << g) != 0).collect())
        .collect();
    out.sort_by(|a: &Mono, b: &Mono| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

pub fn conjugate(n: usize, a: &Poly) -> Poly {
    let mut out = Poly::new();
    for (m, c) in a {
        let word = m.iter().map(|&g| if g < n { g + n } else { g - n }).collect();
        let (negative, mono) = normalize(word).expect("distinct generators");
        let c = conj(c);
        add_term(&mut out, mono, if negative { -c } else { c });
    }
    out
}

pub struct Oracle {
    pub n: usize,
    /// `d` of each generator.
    images: Vec<Poly>,
}

impl Oracle {
    pub fn new(spec: &ModelSpec) -> Self {
        let n = spec.n;
        let mut images = Vec::new();
        for eq in &spec.d_omega {
            let mut p = Poly::new();
            for t in eq {
                let (a, b) = match t.kind {
                    TermKind::Hol => (t.i - 1, t.j - 1),
                    TermKind::Mix => (t.i - 1, n + t.j - 1),
                    TermKind::Anti => (n + t.i - 1, n + t.j - 1),
                };
                p = sum(&p, &scale(&wedge(&monomial(&[a]), &monomial(&[b])), &q_from(t.coefficient)));
            }
            images.push(p);
        }
        for a in 0..n {
            let c = conjugate(n, &images[a]);
            images.push(c);
        }
        Self { n, images }
    }

    /// `d(g ∧ rest) = dg ∧ rest - g ∧ d(rest)`.
    pub fn d_mono(&self, m: &[usize]) -> Poly {
        let Some((&g, rest)) = m.split_first() else {
            return Poly::new();
        };
        let first = wedge(&self.images[g], &monomial(rest));
        let second = wedge(&monomial(&[g]), &self.d_mono(rest));
        sum(&first, &scale(&second, &q(-1, 0)))
    }

    pub fn d(&self, a: &Poly) -> Poly {
        let mut out = Poly::new();
        for (m, c) in a {
            out = sum(&out, &scale(&self.d_mono(m), c));
        }
        out
    }

    /// Component of `d` raising the holomorphic degree.
    pub fn del(&self, a: &Poly) -> Poly {
        self.filtered(a, 1, 0)
    }

    pub fn delbar(&self, a: &Poly) -> Poly {
        self.filtered(a, 0, 1)
    }

    fn filtered(&self, a: &Poly, dp: usize, dq: usize) -> Poly {
        let mut out = Poly::new();
        for (m, c) in a {
            let (p, qd) = bidegree(self.n, m);
            for (mm, x) in self.d_mono(m) {
                if bidegree(self.n, &mm) == (p + dp, qd + dq) {
                    add_term(&mut out, mm, x * c);
                }
            }
        }
        out
    }

    /// Hermitian adjoint of a linear map for the orthonormal monomial basis.
    pub fn adjoint(&self, op: impl Fn(&Poly) -> Poly, a: &Poly) -> Poly {
        let mut out = Poly::new();
        for m in all_monomials(self.n) {
            let image = op(&monomial(&m));
            let mut c = Q::zero();
            for (k, x) in &image {
                if let Some(y) = a.get(k) {
                    c = c + conj(x) * y;
                }
            }
            add_term(&mut out, m, c);
        }
        out
    }

    pub fn block(&self, p: usize, qd: usize) -> Vec<Mono> {
        all_monomials(self.n)
            .into_iter()
            .filter(|m| bidegree(self.n, m) == (p, qd))
            .collect()
    }

    /// Matrix of `op` from the monomials `src` to the monomials `dst`.
    pub fn matrix(&self, op: impl Fn(&Poly) -> Poly, src: &[Mono], dst: &[Mono]) -> Mat {
        let mut out = vec![vec![Q::zero(); src.len()]; dst.len()];
        for (j, m) in src.iter().enumerate() {
            let image = op(&monomial(m));
            for (i, k) in dst.iter().enumerate() {
                if let Some(x) = image.get(k) {
                    out[i][j] = x.clone();
                }
            }
        }
        out
    }

    pub fn bc_dim(&self, p: usize, qd: usize) -> usize {
        let here = self.block(p, qd);
        let up = self.block(p + 1, qd);
        let right = self.block(p, qd + 1);
        let mut stacked = self.matrix(|a| self.del(a), &here, &up);
        stacked.extend(self.matrix(|a| self.delbar(a), &here, &right));
        let closed = here.len() - rank(&stacked);
        let exact = if p > 0 && qd > 0 {
            let below = self.block(p - 1, qd - 1);
            rank(&self.matrix(|a| self.del(&self.delbar(a)), &below, &here))
        } else {
            0
        };
        closed - exact
    }

    pub fn dolbeault_dim(&self, p: usize, qd: usize) -> usize {
        let here = self.block(p, qd);
        let closed = here.len() - rank(&self.matrix(|a| self.delbar(a), &here, &self.block(p, qd + 1)));
        let exact = if qd > 0 {
            rank(&self.matrix(|a| self.delbar(a), &self.block(p, qd - 1), &here))
        } else {
            0
        };
        closed - exact
    }

    /// `□_BC` with every adjoint taken in the oracle.
    pub fn laplacian_bc(&self, a: &Poly) -> Poly {
        let del = |x: &Poly| self.del(x);
        let delbar = |x: &Poly| self.delbar(x);
        let del_s = |x: &Poly| self.adjoint(del, x);
        let delbar_s = |x: &Poly| self.adjoint(delbar, x);
        let terms = [
            del(&delbar(&delbar_s(&del_s(a)))),
            delbar_s(&del_s(&del(&delbar(a)))),
            delbar_s(&del(&del_s(&delbar(a)))),
            del_s(&delbar(&delbar_s(&del(a)))),
            delbar_s(&delbar(a)),
            del_s(&del(a)),
        ];
        terms.iter().fold(Poly::new(), |acc, t| sum(&acc, t))
    }

    /// `G_BC a` for `a` supported on the block `(p, q)`, as
    /// `(L + H)⁻¹ - H` with `H = N (N*N)⁻¹ N*` over a kernel basis `N`.
    pub fn green_bc(&self, p: usize, qd: usize, a: &Poly) -> Poly {
        let here = self.block(p, qd);
        let l = self.matrix(|x| self.laplacian_bc(x), &here, &here);
        let kernel = nullspace(&l);
        let h = if kernel.is_empty() {
            zeros(here.len(), here.len())
        } else {
            let nmat = transpose(&kernel);
            let gram = matmul(&adjoint(&nmat), &nmat);
            matmul(&matmul(&nmat, &inverse(&gram).expect("gram")), &adjoint(&nmat))
        };
        let lh = add(&l, &h);
        let g = sub(&inverse(&lh).expect("L + H invertible"), &h);
        let x: Vec<Q> = here.iter().map(|m| a.get(m).cloned().unwrap_or_else(Q::zero)).collect();
        let mut out = Poly::new();
        for (i, m) in here.iter().enumerate() {
            let c = (0..here.len()).fold(Q::zero(), |acc, j| acc + &g[i][j] * &x[j]);
            add_term(&mut out, m.clone(), c);
        }
        out
    }

    /// `i_φ` with `i_φ ω^α = ∑_β φ[α][β] ω̄^β`, an even derivation.
    pub fn contract(&self, phi: &[Vec<Q>], a: &Poly) -> Poly {
        let n = self.n;
        let mut out = Poly::new();
        for (m, c) in a {
            for (pos, &g) in m.iter().enumerate() {
                if g >= n {
                    continue;
                }
                for (beta, x) in phi[g].iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    let mut word = m.clone();
                    word[pos] = n + beta;
                    if let Some((negative, mono)) = normalize(word) {
                        let v = c * x;
                        add_term(&mut out, mono, if negative { -v } else { v });
                    }
                }
            }
        }
        out
    }
}

/// Dense form in the core's basis order.
pub fn to_form(basis: &ExteriorBasis, a: &Poly) -> hodgevar_core::Form {
    let mut v = hodgevar_core::Form::zeros(basis.dim());
    for (m, c) in a {
        v[core_index(basis, m)] = to_c64(c);
    }
    v
}

pub fn core_index(basis: &ExteriorBasis, m: &Mono) -> usize {
    let n = basis.n();
    let hol: Vec<usize> = m.iter().filter(|&&g| g < n).map(|g| g + 1).collect();
    let anti: Vec<usize> = m.iter().filter(|&&g| g >= n).map(|g| g - n + 1).collect();
    basis.index_of(Monomial::new(n, &hol, &anti).expect("valid monomial"))
}

// ----- fraction matrices -----------------------------------------------------

pub type Mat = Vec<Vec<Q>>;

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![Q::zero(); c]; r]
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect()).collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u - v).collect()).collect()
}

pub fn transpose(a: &Mat) -> Mat {
    if a.is_empty() {
        return Vec::new();
    }
    (0..a[0].len()).map(|j| a.iter().map(|row| row[j].clone()).collect()).collect()
}

pub fn adjoint(a: &Mat) -> Mat {
    transpose(a).into_iter().map(|row| row.iter().map(conj).collect()).collect()
}

/// Reduced row echelon form and pivot columns.
pub fn echelon(a: &Mat) -> (Mat, Vec<usize>) {
    let mut m = a.clone();
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(pr) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = q(1, 0) / &m[r][c];
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = &m[r][j] * &f;
                    m[i][j] = &m[i][j] - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    (m, pivots)
}

pub fn rank(a: &Mat) -> usize {
    echelon(a).1.len()
}

/// Basis vectors of the kernel.
pub fn nullspace(a: &Mat) -> Vec<Vec<Q>> {
    let cols = if a.is_empty() { 0 } else { a[0].len() };
    let (m, pivots) = echelon(a);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); cols];
        v[free] = q(1, 0);
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[row][free].clone();
        }
        out.push(v);
    }
    out
}

pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let aug: Mat = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { q(1, 0) } else { Q::zero() }));
            r
        })
        .collect();
    let (m, pivots) = echelon(&aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(m.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn is_integer(z: &Q, value: i64) -> bool {
    z.im.is_zero() && z.re == BigRational::from_integer(value.into())
}
