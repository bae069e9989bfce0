//! Model and family files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use hodgevar_core::deformation::{Beltrami, BeltramiTerm};
use hodgevar_core::{LieModel, ModelSpec, StructureTerm, TermKind, C64};

/// Anything wrong with the inputs; maps to exit code 2.
#[derive(Debug, thiserror::Error)]
pub enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Model {
        path: PathBuf,
        source: hodgevar_core::Error,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindField {
    Hol,
    Mix,
    Anti,
}

impl From<KindField> for TermKind {
    fn from(k: KindField) -> Self {
        match k {
            KindField::Hol => TermKind::Hol,
            KindField::Mix => TermKind::Mix,
            KindField::Anti => TermKind::Anti,
        }
    }
}

impl From<TermKind> for KindField {
    fn from(k: TermKind) -> Self {
        match k {
            TermKind::Hol => KindField::Hol,
            TermKind::Mix => KindField::Mix,
            TermKind::Anti => KindField::Anti,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub re: f64,
    pub im: f64,
    pub kind: KindField,
    pub i: usize,
    pub j: usize,
}

/// `{ "name", "n", "d_omega": [[term, ...] per α] }`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub name: String,
    pub n: usize,
    pub d_omega: Vec<Vec<TermFile>>,
}

impl ModelFile {
    pub fn to_spec(&self) -> ModelSpec {
        ModelSpec {
            name: self.name.clone(),
            n: self.n,
            d_omega: self
                .d_omega
                .iter()
                .map(|eq| {
                    eq.iter()
                        .map(|t| StructureTerm::new(C64::new(t.re, t.im), t.kind.into(), t.i, t.j))
                        .collect()
                })
                .collect(),
        }
    }

    pub fn from_spec(spec: &ModelSpec) -> Self {
        Self {
            name: spec.name.clone(),
            n: spec.n,
            d_omega: spec
                .d_omega
                .iter()
                .map(|eq| {
                    eq.iter()
                        .map(|t| TermFile {
                            re: t.coefficient.re,
                            im: t.coefficient.im,
                            kind: t.kind.into(),
                            i: t.i,
                            j: t.j,
                        })
                        .collect()
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyTermFile {
    pub exponent: Vec<u32>,
    pub alpha: usize,
    pub beta: usize,
    pub re: f64,
    pub im: f64,
}

/// `{ "name", "m", "N", "terms": [...] }`, meaning `∑ t^e c ω̄^β ⊗ e_α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyFile {
    pub name: String,
    pub m: usize,
    #[serde(rename = "N")]
    pub order: usize,
    pub terms: Vec<FamilyTermFile>,
}

impl FamilyFile {
    pub fn terms(&self) -> Vec<BeltramiTerm> {
        self.terms
            .iter()
            .map(|t| BeltramiTerm {
                exponent: t.exponent.clone(),
                alpha: t.alpha,
                beta: t.beta,
                coefficient: C64::new(t.re, t.im),
            })
            .collect()
    }

    /// Beltrami series on an `n`-dimensional model, truncated at `order` or
    /// at the file's `N`.
    pub fn beltrami(&self, n: usize, order: Option<usize>) -> Result<Beltrami, hodgevar_core::Error> {
        Beltrami::from_terms(n, self.m, order.unwrap_or(self.order), &self.terms())
    }
}

/// A family file resolved against its model.
#[derive(Clone, Debug)]
pub struct Family {
    pub name: String,
    pub beltrami: Beltrami,
}

fn read(path: &Path) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, InputError> {
    serde_json::from_str(text).map_err(|e| InputError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_model(path: &Path, text: &str) -> Result<LieModel, InputError> {
    let file: ModelFile = parse(path, text)?;
    LieModel::load(file.to_spec()).map_err(|source| InputError::Model {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_model(path: &Path) -> Result<LieModel, InputError> {
    parse_model(path, &read(path)?)
}

pub fn parse_family(path: &Path, text: &str, model: &LieModel, order: Option<usize>) -> Result<Family, InputError> {
    let file: FamilyFile = parse(path, text)?;
    let beltrami = file.beltrami(model.n(), order).map_err(|source| InputError::Model {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Family {
        name: file.name,
        beltrami,
    })
}

pub fn load_family(path: &Path, model: &LieModel, order: Option<usize>) -> Result<Family, InputError> {
    parse_family(path, &read(path)?, model, order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_errors_carry_position() {
        let text = "{\n  \"name\": \"x\",\n  \"n\": 1,\n  \"d_omega\": [[]],\n  \"extra\": 1\n}";
        match parse_model(Path::new("m.json"), text) {
            Err(InputError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let text = r#"{"name":"x","n":2,"d_omega":[[],[{"re":1,"im":0,"kind":"sym","i":1,"j":1}]]}"#;
        assert!(matches!(parse_model(Path::new("m.json"), text), Err(InputError::Parse { .. })));
    }

    #[test]
    fn model_roundtrip() {
        let spec = hodgevar_core::corpus::iwasawa_spec();
        let text = serde_json::to_string(&ModelFile::from_spec(&spec)).unwrap();
        let m = parse_model(Path::new("m.json"), &text).unwrap();
        assert_eq!(m.spec(), &spec);
    }

    #[test]
    fn nonzero_constant_term_is_rejected() {
        let model = hodgevar_core::corpus::torus(1);
        let text = r#"{"name":"f","m":1,"N":3,"terms":[{"exponent":[0],"alpha":1,"beta":1,"re":1,"im":0}]}"#;
        assert!(matches!(
            parse_family(Path::new("f.json"), text, &model, None),
            Err(InputError::Model { .. })
        ));
    }
}
