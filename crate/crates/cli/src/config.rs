//! Run configuration: JSON file plus command-line overrides.

use std::fmt;

use ltlab::formal_group::{lt_polynomial, LtPreset};
use ltlab::padic::{make_context, Context, Elem};
use ltlab::{LtError, Result};
use serde::{Deserialize, Serialize};

/// A Lubin-Tate polynomial: a named preset or integer coefficients, low degree first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolySpec {
    Name(String),
    Coeffs(Vec<i64>),
}

impl Default for PolySpec {
    fn default() -> Self {
        PolySpec::Name("canonical".into())
    }
}

impl fmt::Display for PolySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolySpec::Name(s) => write!(f, "{s}"),
            PolySpec::Coeffs(c) => write!(f, "{c:?}"),
        }
    }
}

impl PolySpec {
    pub fn random(seed: u64) -> PolySpec {
        PolySpec::Name(format!("random({seed})"))
    }

    fn preset(&self) -> Result<Option<LtPreset>> {
        let PolySpec::Name(s) = self else { return Ok(None) };
        let s = s.trim();
        Ok(Some(match s {
            "canonical" => LtPreset::Canonical,
            "multiplicative" => LtPreset::Multiplicative,
            _ => {
                let seed = s
                    .strip_prefix("random(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|r| r.trim().parse::<u64>().ok())
                    .ok_or_else(|| LtError::Config(format!("unknown polynomial preset {s:?}")))?;
                LtPreset::Random(seed)
            }
        }))
    }

    /// Coefficients over `K` for the uniformiser `pi`.
    pub fn coefficients(&self, ctx: &Context, pi: &Elem) -> Result<Vec<Elem>> {
        match (self.preset()?, self) {
            (Some(p), _) => lt_polynomial(ctx, pi, &p),
            (None, PolySpec::Coeffs(c)) => {
                if c.len() != ctx.q() as usize + 1 {
                    return Err(LtError::Config(format!("P must have degree q = {}", ctx.q())));
                }
                Ok(c.iter().map(|&x| ctx.elem(x)).collect())
            }
            (None, PolySpec::Name(_)) => unreachable!(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.preset().map(|_| ())
    }
}

/// `pi' = pi` or `pi' = pi (1 + pi^k)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiPrime {
    #[default]
    Pi,
    Shift(u32),
}

impl PiPrime {
    pub fn element(&self, ctx: &Context) -> Elem {
        match self {
            PiPrime::Pi => ctx.pi().clone(),
            PiPrime::Shift(k) => ctx.pi().mul_ref(&ctx.one().add_ref(&ctx.pi().pow(*k as u64))),
        }
    }
}

impl fmt::Display for PiPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PiPrime::Pi => write!(f, "pi"),
            PiPrime::Shift(k) => write!(f, "pi(1+pi^{k})"),
        }
    }
}

/// Which cells `check thm1` runs.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Matrix {
    /// The configured field, levels and polynomials only.
    Single,
    /// Q_2, Q_3, Q_5, the unramified quadratic over Q_3 and Q_3(sqrt 3),
    /// levels 1 and 2, seeded random pairs, both choices of `pi'`.
    #[default]
    Default,
}

pub const CHECKS: &[&str] = &["thm1", "prop2", "prop3", "thm4", "witt_axioms"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub p: u64,
    pub f: u32,
    /// Eisenstein layer over the unramified part, as coordinate lists.
    pub eis: Option<Vec<Vec<i64>>>,
    /// Working precision in p-digits; chosen from the degrees when absent.
    #[serde(rename = "N")]
    pub n_prec: Option<u32>,
    #[serde(rename = "D_series")]
    pub d_series: usize,
    #[serde(rename = "D_bivariate")]
    pub d_bivariate: usize,
    /// Degree of `curly E` for boundary values; 300, or 480 for the trace suite.
    #[serde(rename = "D_boundary")]
    pub d_boundary: Option<usize>,
    #[serde(rename = "D_bracket")]
    pub d_bracket: usize,
    pub levels: Vec<usize>,
    #[serde(rename = "P")]
    pub p_poly: PolySpec,
    /// Defaults to `P`.
    #[serde(rename = "Q")]
    pub q_poly: Option<PolySpec>,
    pub pi_prime: PiPrime,
    pub matrix: Matrix,
    /// Random pairs per cell of the default matrix.
    pub pairs: usize,
    pub seed: u64,
    /// Threshold for zero certificates, in pi-digits.
    #[serde(rename = "T")]
    pub t: u32,
    pub checks: Vec<String>,
    pub out: Option<String>,
    /// Added to every working precision; used to rerun at higher precision.
    #[serde(skip)]
    pub extra_precision: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            p: 3,
            f: 1,
            eis: None,
            n_prec: None,
            d_series: 200,
            d_bivariate: 90,
            d_boundary: None,
            d_bracket: 90,
            levels: vec![1, 2],
            p_poly: PolySpec::default(),
            q_poly: None,
            pi_prime: PiPrime::Pi,
            matrix: Matrix::Default,
            pairs: 3,
            seed: 0,
            t: 10,
            checks: CHECKS.iter().map(|s| s.to_string()).collect(),
            out: None,
            extra_precision: 0,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| LtError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        for c in &self.checks {
            if !CHECKS.contains(&c.as_str()) {
                return Err(LtError::Config(format!("unknown check {c:?}")));
            }
        }
        if self.levels.is_empty() || self.levels.contains(&0) {
            return Err(LtError::Config("levels must be positive".into()));
        }
        if self.f == 0 {
            return Err(LtError::Config("f must be positive".into()));
        }
        self.p_poly.validate()?;
        if let Some(q) = &self.q_poly {
            q.validate()?;
        }
        Ok(())
    }

    pub fn q_spec(&self) -> &PolySpec {
        self.q_poly.as_ref().unwrap_or(&self.p_poly)
    }

    pub fn e(&self) -> u32 {
        self.eis.as_ref().map_or(1, |m| m.len() as u32 - 1)
    }

    /// Precision for series of degree `d`: enough to absorb the denominators
    /// of `exp_{F_P}` up to degree `d` with a margin.
    pub fn precision_for(&self, p: u64, f: u32, d: usize) -> u32 {
        self.n_prec.unwrap_or_else(|| auto_precision(p, f, d)) + self.extra_precision
    }

    /// Precision for boundary sums of degree `d`.
    pub fn boundary_precision_for(&self, p: u64, f: u32, d: usize) -> u32 {
        self.n_prec.unwrap_or_else(|| boundary_precision(p, f, d)) + self.extra_precision
    }

    pub fn context(&self, n: u32) -> Result<Context> {
        make_context(self.p, self.f, self.eis.clone(), n)
    }
}

/// `1.2 (d-1)/(q-1) + 40` digits, rounded up.
pub fn auto_precision(p: u64, f: u32, d: usize) -> u32 {
    let q = p.pow(f) as f64;
    (1.2 * (d as f64 - 1.0).max(0.0) / (q - 1.0)).ceil() as u32 + 40
}

/// `d/(q-1) + 30` digits, rounded up.
pub fn boundary_precision(p: u64, f: u32, d: usize) -> u32 {
    let q = p.pow(f) as usize;
    d.div_ceil(q - 1) as u32 + 30
}
