mod common;

use common::*;
use hodgevar_core::canonical::canonical_deformation;
use hodgevar_core::cohomology::{bc_quotient_dim, dolbeault_quotient_dim, ExactModel};
use hodgevar_core::corpus;
use hodgevar_core::deformation::Beltrami;
use hodgevar_core::metric::{MetricConfig, MetricContext};
use hodgevar_core::{Bidegree, Error, IntegrabilityFailure, LieModel, C64};
use nalgebra::DMatrix;

fn specs() -> Vec<hodgevar_core::ModelSpec> {
    vec![
        corpus::torus_spec(1),
        corpus::torus_spec(2),
        corpus::torus_spec(3),
        corpus::iwasawa_spec(),
        corpus::kodaira_thurston_spec(),
    ]
}

fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sup(v: &hodgevar_core::Form) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn oracle_matrix(model: &LieModel, op: impl Fn(&Poly) -> Poly) -> DMatrix<C64> {
    let basis = model.basis();
    let mut out = DMatrix::zeros(basis.dim(), basis.dim());
    for m in all_monomials(model.n()) {
        let j = core_index(basis, &m);
        out.set_column(j, &to_form(basis, &op(&monomial(&m))));
    }
    out
}

#[test]
fn differentials_match_oracle() {
    for spec in specs() {
        let model = LieModel::load(spec.clone()).unwrap();
        let o = Oracle::new(&spec);
        assert_eq!(max_diff(model.d(), &oracle_matrix(&model, |a| o.d(a))), 0.0, "{}", spec.name);
        assert_eq!(max_diff(model.del(), &oracle_matrix(&model, |a| o.del(a))), 0.0, "{}", spec.name);
        assert_eq!(max_diff(model.delbar(), &oracle_matrix(&model, |a| o.delbar(a))), 0.0, "{}", spec.name);
        for m in all_monomials(spec.n) {
            assert!(o.d(&o.d(&monomial(&m))).is_empty());
        }
    }
}

#[test]
fn broken_model_fails_d_squared() {
    let spec = corpus::broken_spec();
    let o = Oracle::new(&spec);
    let nonzero = all_monomials(3).iter().any(|m| !o.d(&o.d(&monomial(m))).is_empty());
    assert!(nonzero);
    match LieModel::load(spec) {
        Err(Error::NotIntegrable { failure, .. }) => assert_eq!(failure, IntegrabilityFailure::DSquared),
        other => panic!("expected a d² failure, got {other:?}"),
    }
}

#[test]
fn bott_chern_dimensions_match_oracle() {
    for spec in specs() {
        let model = LieModel::load(spec.clone()).unwrap();
        let ctx = MetricContext::new(&model, MetricConfig::default());
        let exact = ExactModel::new(&model);
        let o = Oracle::new(&spec);
        for p in 0..=spec.n {
            for q in 0..=spec.n {
                let b = Bidegree::new(p, q);
                let want = o.bc_dim(p, q);
                assert_eq!(bc_quotient_dim(&ctx, b), want, "{} bc {p},{q}", spec.name);
                assert_eq!(ctx.bc_block(b).dim(), want, "{} harmonic {p},{q}", spec.name);
                assert_eq!(exact.bc_dim(b), want, "{} exact {p},{q}", spec.name);
                let dol = o.dolbeault_dim(p, q);
                assert_eq!(dolbeault_quotient_dim(&ctx, b), dol, "{} dolbeault {p},{q}", spec.name);
                assert_eq!(exact.dolbeault_dim(b), dol);
            }
        }
    }
}

#[test]
fn iwasawa_reference_values() {
    let o = Oracle::new(&corpus::iwasawa_spec());
    assert_eq!(o.bc_dim(1, 0), 2);
    assert_eq!(o.bc_dim(1, 1), 4);
    assert_eq!(o.bc_dim(2, 0), 3);
    assert_eq!(o.dolbeault_dim(0, 1), 2);
}

#[test]
fn torus_bott_chern_is_binomial() {
    let o = Oracle::new(&corpus::torus_spec(3));
    let binom = [1, 3, 3, 1];
    for p in 0..=3 {
        for q in 0..=3 {
            assert_eq!(o.bc_dim(p, q), binom[p] * binom[q]);
        }
    }
}

#[test]
fn first_canonical_coefficient_matches_oracle() {
    let spec = corpus::iwasawa_spec();
    let model = LieModel::load(spec.clone()).unwrap();
    let ctx = MetricContext::new(&model, MetricConfig::default());
    let basis = model.basis();
    let o = Oracle::new(&spec);

    // σ0 = ω² ∧ ω³ ∧ ω̄², φ = t ω̄¹ ⊗ e₂.
    let sigma0 = monomial(&[1, 2, 4]);
    let mut phi = vec![vec![q(0, 0); 3]; 3];
    phi[1][0] = q(1, 0);

    let x = o.del(&o.contract(&phi, &sigma0));
    let del = |a: &Poly| o.del(a);
    let delbar = |a: &Poly| o.delbar(a);
    let del_s = |a: &Poly| o.adjoint(del, a);
    let delbar_s = |a: &Poly| o.adjoint(delbar, a);
    let y = sum(&delbar_s(&del(&del_s(&x))), &delbar_s(&x));
    let sigma1 = scale(&o.green_bc(2, 1, &y), &q(-1, 0));

    let mut expected = Poly::new();
    expected.insert(vec![0, 1, 5], q(1, 0));
    assert_eq!(sigma1.len(), 1);
    assert!(is_integer(&sigma1[&vec![0, 1, 5]], 1));
    assert_eq!(sigma1, expected);

    let family = corpus::iwasawa_family(6);
    let mut direction = DMatrix::zeros(3, 3);
    direction[(1, 0)] = C64::new(1.0, 0.0);
    assert_eq!(family.first_order(0), direction);
    let cd = canonical_deformation(&ctx, &to_form(basis, &sigma0), &family).unwrap();
    let diff = sup(&(cd.first_order(0) - to_form(basis, &sigma1)));
    assert!(diff < 1e-12, "σ_1 differs by {diff}");

    let linear = Beltrami::linear(3, 1, &[direction]).unwrap();
    let cd1 = canonical_deformation(&ctx, &to_form(basis, &sigma0), &linear).unwrap();
    assert!(sup(&(cd1.first_order(0) - to_form(basis, &sigma1))) < 1e-12);
}

#[test]
fn green_operator_matches_oracle_on_a_block() {
    let spec = corpus::kodaira_thurston_spec();
    let model = LieModel::load(spec.clone()).unwrap();
    let ctx = MetricContext::new(&model, MetricConfig::default());
    let basis = model.basis();
    let o = Oracle::new(&spec);
    for m in o.block(1, 1) {
        let a = monomial(&m);
        let want = to_form(basis, &o.green_bc(1, 1, &a));
        let got = ctx.green_bc_global() * to_form(basis, &a);
        assert!(sup(&(got - want)) < 1e-10);
    }
}
