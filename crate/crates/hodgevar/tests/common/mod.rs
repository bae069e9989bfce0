#![allow(dead_code)]

use std::path::PathBuf;

use hodgevar::verify::Session;
use hodgevar::{load_family, load_model, Family, RunConfig};
use hodgevar_core::deformation::Beltrami;

pub const MODELS: [&str; 5] = ["torus1", "torus2", "torus3", "iwasawa", "kodaira-thurston"];

/// `(model, family)` file stems of the shipped integrable families.
pub const FAMILIES: [(&str, &str); 4] = [
    ("torus1", "torus1-shear"),
    ("torus2", "torus2-linear"),
    ("iwasawa", "iwasawa-shear"),
    ("kodaira-thurston", "kodaira-thurston-shear"),
];

pub fn data(stem: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(format!("{stem}.json"))
}

pub fn session(model: &str, family: &str) -> Session {
    let m = load_model(&data(model)).expect("shipped model");
    let f = load_family(&data(family), &m, None).expect("shipped family");
    Session::new(m, f, RunConfig::default())
}

/// Session with the zero family, for checks that ignore deformations.
pub fn undeformed(model: &str) -> Session {
    let m = load_model(&data(model)).expect("shipped model");
    let f = Family {
        name: "zero".into(),
        beltrami: Beltrami::zero(m.n(), 1, 6),
    };
    Session::new(m, f, RunConfig::default())
}
