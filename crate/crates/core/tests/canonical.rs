use hodgevar_core::canonical::{canonical_deformation, fixed_point_residual, ftilde_eval};
use hodgevar_core::corpus;
use hodgevar_core::deformation::{integrability_residual, DeformedOperators};
use hodgevar_core::linalg;
use hodgevar_core::metric::{MetricConfig, MetricContext};
use hodgevar_core::{Form, LieModel, C64};

fn harmonic_forms(ctx: &MetricContext) -> Vec<Form> {
    let basis = ctx.basis();
    let mut out = Vec::new();
    for b in basis.blocks() {
        let block = ctx.bc_block(b);
        let q = linalg::column_space(&block.projector, ctx.tol());
        for col in q.column_iter() {
            let mut f = Form::zeros(basis.dim());
            f.rows_mut(block.range.start, block.range.len()).copy_from(&col);
            out.push(f);
        }
    }
    out
}

fn ctx(model: &LieModel) -> MetricContext {
    MetricContext::new(model, MetricConfig::default())
}

#[test]
fn ftilde_lands_in_adjoint_kernel_on_tori() {
    for case in corpus::families(6).into_iter().filter(|c| c.integrable) {
        let model = corpus::model_named(&case.model).unwrap();
        let c = ctx(&model);
        let forms = harmonic_forms(&c);
        let t: Vec<C64> = vec![C64::new(0.05, 0.02); case.beltrami.vars()];
        let report = ftilde_eval(&model, &c, &forms, &case.beltrami, &t).unwrap();
        let worst = report.adjoint_residuals.iter().cloned().fold(0.0, f64::max);
        if case.model.starts_with("torus") {
            assert!(worst < 1e-12, "{}: {worst}", case.name);
            assert_eq!(report.rank, forms.len());
        } else {
            eprintln!("{}: largest (ddbar)* residual {worst:.3e}", case.name);
            assert!(worst.is_finite());
        }
    }
}

#[test]
fn fixed_point_holds_for_every_harmonic_form() {
    for case in corpus::families(6).into_iter().filter(|c| c.integrable) {
        let model = corpus::model_named(&case.model).unwrap();
        let c = ctx(&model);
        for s0 in harmonic_forms(&c) {
            let cd = canonical_deformation(&c, &s0, &case.beltrami).unwrap();
            assert!(fixed_point_residual(&c, &cd, &case.beltrami).unwrap() < 1e-10, "{}", case.name);
        }
    }
}

#[test]
fn conjugation_identity_off_integrability() {
    let t = [C64::new(0.1, 0.0)];
    for (model, phi) in [
        (corpus::iwasawa(), corpus::iwasawa_nonintegrable(6)),
        (corpus::kodaira_thurston(), corpus::kodaira_thurston_nonintegrable(6)),
    ] {
        let phi_t = phi.at(&t);
        assert!(integrability_residual(&model, &phi_t).unwrap() > 1e-3);
        let r = DeformedOperators::new(&model, &phi_t).identity_residual();
        eprintln!("{}: identity residual off integrability {r:.3e}", model.name());
        assert!(r.is_finite());
    }
}
