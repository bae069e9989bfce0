//! Run configuration shared by all commands.

use std::fmt;
use std::str::FromStr;

use hodgevar_core::metric::MetricConfig;
use hodgevar_core::C64;

use crate::io::InputError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Backend {
    Float,
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_RADIUS: f64 = 0.1;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub tol: f64,
    /// Overrides the family file's `N` when set.
    pub order: Option<usize>,
    /// Sample values for each parameter; the grid is their product.
    pub grid: Vec<C64>,
    pub radius: f64,
    pub backend: Backend,
    pub format: Format,
    pub seed: u64,
    pub allow_non_ddbar: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            order: None,
            grid: default_grid(),
            radius: DEFAULT_RADIUS,
            backend: Backend::Float,
            format: Format::Table,
            seed: DEFAULT_SEED,
            allow_non_ddbar: false,
        }
    }
}

pub fn default_grid() -> Vec<C64> {
    hodgevar_core::corpus::default_grid_values()
        .into_iter()
        .map(|v| C64::new(v, 0.0))
        .collect()
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), InputError> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(InputError::Config(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.order == Some(0) {
            return Err(InputError::Config("truncation order must be at least 1".into()));
        }
        if !(self.radius > 0.0) {
            return Err(InputError::Config(format!("radius must be positive, got {}", self.radius)));
        }
        if self.grid.is_empty() {
            return Err(InputError::Config("grid is empty".into()));
        }
        if let Some(t) = self.grid.iter().find(|t| t.norm() > self.radius) {
            return Err(InputError::Config(format!(
                "grid point {} lies outside radius {}",
                Complex(*t),
                self.radius
            )));
        }
        Ok(())
    }

    pub fn metric(&self) -> MetricConfig {
        MetricConfig {
            rank_tol: self.tol,
            ..MetricConfig::default()
        }
    }

    /// Product grid over `m` parameters, in lexicographic order.
    pub fn points(&self, m: usize) -> Vec<Vec<C64>> {
        let mut out: Vec<Vec<C64>> = vec![Vec::new()];
        for _ in 0..m {
            out = out
                .iter()
                .flat_map(|prefix| {
                    self.grid.iter().map(move |v| {
                        let mut p = prefix.clone();
                        p.push(*v);
                        p
                    })
                })
                .collect();
        }
        out
    }
}

/// A complex number such as `0.05`, `-0.1i`, `1+2i` or `i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Complex(pub C64);

impl FromStr for Complex {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || format!("invalid complex number '{s}'");
        if s.is_empty() {
            return Err(bad());
        }
        let Some(body) = s.strip_suffix('i') else {
            return s.parse::<f64>().map(|re| Complex(C64::new(re, 0.0))).map_err(|_| bad());
        };
        let bytes = body.as_bytes();
        let split = (1..bytes.len())
            .rev()
            .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(i) => (&body[..i], &body[i..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            x => x.parse::<f64>().map_err(|_| bad())?,
        };
        let re = re.parse::<f64>().map_err(|_| bad())?;
        Ok(Complex(C64::new(re, im)))
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let z = self.0;
        if z.im == 0.0 {
            write!(f, "{}", z.re)
        } else if z.re == 0.0 {
            write!(f, "{}i", z.im)
        } else if z.im < 0.0 {
            write!(f, "{}-{}i", z.re, -z.im)
        } else {
            write!(f, "{}+{}i", z.re, z.im)
        }
    }
}

/// Sample values of one parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid(pub Vec<C64>);

/// Comma-separated list of complex values.
pub fn parse_grid(s: &str) -> Result<Grid, String> {
    s.split(',').map(|x| x.parse::<Complex>().map(|c| c.0)).collect::<Result<_, _>>().map(Grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(s: &str) -> C64 {
        s.parse::<Complex>().unwrap().0
    }

    #[test]
    fn complex_literals() {
        assert_eq!(z("0.05"), C64::new(0.05, 0.0));
        assert_eq!(z("0.05i"), C64::new(0.0, 0.05));
        assert_eq!(z("-i"), C64::new(0.0, -1.0));
        assert_eq!(z("1-2i"), C64::new(1.0, -2.0));
        assert_eq!(z("1e-2+3e-2i"), C64::new(0.01, 0.03));
        assert!("x".parse::<Complex>().is_err());
        assert!("1+2".parse::<Complex>().is_err());
    }

    #[test]
    fn display_roundtrip() {
        for s in ["0.05", "-0.1i", "1-2i", "0.25+0.5i"] {
            assert_eq!(Complex(z(s)).to_string().parse::<Complex>().unwrap().0, z(s));
        }
    }

    #[test]
    fn grid_is_product() {
        let cfg = RunConfig {
            grid: parse_grid("0,0.01").unwrap().0,
            ..RunConfig::default()
        };
        let pts = cfg.points(2);
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1], vec![C64::new(0.0, 0.0), C64::new(0.01, 0.0)]);
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        let far = RunConfig {
            grid: vec![C64::new(0.5, 0.0)],
            ..RunConfig::default()
        };
        assert!(far.validate().is_err());
        let bad_tol = RunConfig {
            tol: 0.0,
            ..RunConfig::default()
        };
        assert!(bad_tol.validate().is_err());
    }
}
