//! Shipped models and deformation families.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::deformation::{Beltrami, BeltramiTerm};
use crate::exterior::{LieModel, ModelSpec, StructureTerm, TermKind};
use crate::field::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn torus_spec(n: usize) -> ModelSpec {
    ModelSpec {
        name: alloc::format!("torus{n}"),
        n,
        d_omega: vec![Vec::new(); n],
    }
}

/// `dω¹ = dω² = 0`, `dω³ = -ω¹∧ω²`.
pub fn iwasawa_spec() -> ModelSpec {
    ModelSpec {
        name: String::from("iwasawa"),
        n: 3,
        d_omega: vec![
            Vec::new(),
            Vec::new(),
            vec![StructureTerm::new(c(-1.0, 0.0), TermKind::Hol, 1, 2)],
        ],
    }
}

/// `dω¹ = 0`, `dω² = ω¹∧ω̄¹`.
pub fn kodaira_thurston_spec() -> ModelSpec {
    ModelSpec {
        name: String::from("kodaira-thurston"),
        n: 2,
        d_omega: vec![
            Vec::new(),
            vec![StructureTerm::new(c(1.0, 0.0), TermKind::Mix, 1, 1)],
        ],
    }
}

/// Iwasawa-like equations with `dω¹ = ω³∧ω̄³`, violating `d² = 0`.
pub fn broken_spec() -> ModelSpec {
    ModelSpec {
        name: String::from("broken"),
        n: 3,
        d_omega: vec![
            vec![StructureTerm::new(c(1.0, 0.0), TermKind::Mix, 3, 3)],
            Vec::new(),
            vec![StructureTerm::new(c(-1.0, 0.0), TermKind::Hol, 1, 2)],
        ],
    }
}

pub fn torus(n: usize) -> LieModel {
    LieModel::load(torus_spec(n)).expect("torus model")
}

pub fn iwasawa() -> LieModel {
    LieModel::load(iwasawa_spec()).expect("iwasawa model")
}

pub fn kodaira_thurston() -> LieModel {
    LieModel::load(kodaira_thurston_spec()).expect("kodaira-thurston model")
}

/// All shipped models.
pub fn models() -> Vec<LieModel> {
    vec![torus(1), torus(2), torus(3), iwasawa(), kodaira_thurston()]
}

/// A named family together with the model it deforms.
#[derive(Clone, Debug)]
pub struct FamilyCase {
    pub name: String,
    pub model: String,
    pub beltrami: Beltrami,
    pub integrable: bool,
}

fn term(exponent: &[u32], alpha: usize, beta: usize, z: C64) -> BeltramiTerm {
    BeltramiTerm {
        exponent: exponent.to_vec(),
        alpha,
        beta,
        coefficient: z,
    }
}

fn family(n: usize, m: usize, order: usize, terms: &[BeltramiTerm]) -> Beltrami {
    Beltrami::from_terms(n, m, order, terms).expect("shipped family")
}

/// `φ = t · dz̄ ⊗ ∂_z` on the one-dimensional torus.
pub fn torus1_family(order: usize) -> Beltrami {
    family(1, 1, order, &[term(&[1], 1, 1, c(1.0, 0.0))])
}

/// Two-parameter constant-coefficient family on the two-dimensional torus.
pub fn torus2_family(order: usize) -> Beltrami {
    family(
        2,
        2,
        order,
        &[
            term(&[1, 0], 1, 1, c(0.7, 0.2)),
            term(&[1, 0], 1, 2, c(-0.3, 0.5)),
            term(&[1, 0], 2, 1, c(0.1, -0.4)),
            term(&[1, 0], 2, 2, c(0.6, 0.3)),
            term(&[0, 1], 1, 1, c(-0.2, 0.6)),
            term(&[0, 1], 1, 2, c(0.4, 0.1)),
            term(&[0, 1], 2, 1, c(0.5, -0.2)),
            term(&[0, 1], 2, 2, c(-0.3, -0.7)),
            term(&[2, 0], 1, 2, c(0.25, 0.0)),
            term(&[1, 1], 2, 1, c(0.0, -0.35)),
        ],
    )
}

/// `φ = t · ω̄¹ ⊗ e₂` on the Iwasawa model.
pub fn iwasawa_family(order: usize) -> Beltrami {
    family(3, 1, order, &[term(&[1], 2, 1, c(1.0, 0.0))])
}

/// `φ = t · ω̄¹ ⊗ e₁` on Kodaira-Thurston.
pub fn kodaira_thurston_family(order: usize) -> Beltrami {
    family(2, 1, order, &[term(&[1], 1, 1, c(1.0, 0.0))])
}

/// `φ = t · ω̄³ ⊗ e₃` on the Iwasawa model, not integrable.
pub fn iwasawa_nonintegrable(order: usize) -> Beltrami {
    family(3, 1, order, &[term(&[1], 3, 3, c(1.0, 0.0))])
}

/// `φ = t · ω̄² ⊗ e₁` on Kodaira-Thurston, not integrable.
pub fn kodaira_thurston_nonintegrable(order: usize) -> Beltrami {
    family(2, 1, order, &[term(&[1], 1, 2, c(1.0, 0.0))])
}

/// `φ = t · ω̄¹ ⊗ e₂` on Kodaira-Thurston: `∂̄`-exact first order term.
pub fn kodaira_thurston_trivial(order: usize) -> Beltrami {
    family(2, 1, order, &[term(&[1], 2, 1, c(1.0, 0.0))])
}

/// Integrable shipped families.
pub fn families(order: usize) -> Vec<FamilyCase> {
    let case = |name: &str, model: &str, beltrami: Beltrami| FamilyCase {
        name: String::from(name),
        model: String::from(model),
        beltrami,
        integrable: true,
    };
    vec![
        case("torus1-shear", "torus1", torus1_family(order)),
        case("torus2-linear", "torus2", torus2_family(order)),
        case("iwasawa-shear", "iwasawa", iwasawa_family(order)),
        case("kodaira-thurston-shear", "kodaira-thurston", kodaira_thurston_family(order)),
    ]
}

/// Model by shipped name.
pub fn model_named(name: &str) -> Option<LieModel> {
    match name {
        "torus1" => Some(torus(1)),
        "torus2" => Some(torus(2)),
        "torus3" => Some(torus(3)),
        "iwasawa" => Some(iwasawa()),
        "kodaira-thurston" => Some(kodaira_thurston()),
        _ => None,
    }
}

/// Default sample grid `{0, ±0.01, ±0.05, ±0.1}` for one parameter.
pub fn default_grid_values() -> Vec<f64> {
    vec![-0.1, -0.05, -0.01, 0.0, 0.01, 0.05, 0.1]
}

/// Product grid over `m` parameters.
pub fn product_grid(values: &[f64], m: usize) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = vec![Vec::new()];
    for _ in 0..m {
        let mut next = Vec::with_capacity(out.len() * values.len());
        for prefix in &out {
            for &v in values {
                let mut p = prefix.clone();
                p.push(C64::new(v, 0.0));
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Beltrami matrix `Φ` with `Φ[(α-1, β-1)] = φ^α_β̄`, built from a dense
/// row-major list.
pub fn matrix(n: usize, entries: &[C64]) -> DMatrix<C64> {
    DMatrix::from_row_slice(n, n, entries)
}
