//! JSON representations of polynomials, probability forms, catalogs and
//! reports.
//!
//! Coefficients and bounds are exact rationals written as strings
//! (`"-3/2"`, `"8"`); decimal strings such as `"1.25"` are accepted on
//! input. A term names the observable chosen at each site with a code:
//! 0 for none, 1 or 2 for the first or second observable.

use std::collections::BTreeMap;

use bellkit_core::detection::ThresholdReport;
use bellkit_core::lhv::LhvBoundResult;
use bellkit_core::linalg::CMatrix;
use bellkit_core::optimize::ViolationResult;
use bellkit_core::polynomial::{Arity, BellPolynomial, ProbabilityForm, Selector, SitedMonomial};
use bellkit_core::quantum::MeasurementSettings;
use bellkit_core::Rational;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Parses `"a"`, `"a/b"` or a finite decimal like `"-1.25"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, CliError> {
    let s = s.trim();
    let bad = || CliError::Parse(format!("not a rational number: {s:?}"));
    if let Ok(r) = s.parse::<BigRational>() {
        return Ok(r);
    }
    let (neg, digits) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = digits.split_once('.').ok_or_else(bad)?;
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .chars()
            .chain(frac_part.chars())
            .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let numer: BigRational = format!("{}{int_part}{frac_part}", if neg { "-" } else { "" })
        .parse()
        .map_err(|_| bad())?;
    let denom: BigRational = format!("1{}", "0".repeat(frac_part.len()))
        .parse()
        .map_err(|_| bad())?;
    Ok(numer / denom)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    #[serde(rename = "A", default)]
    pub a: u8,
    #[serde(rename = "B", default)]
    pub b: u8,
    #[serde(rename = "C", default)]
    pub c: u8,
    pub coeff: String,
}

impl TermJson {
    fn from_term(m: &SitedMonomial, c: &Rational) -> TermJson {
        let [a, b, cc] = m.selectors().map(Selector::code);
        TermJson {
            a,
            b,
            c: cc,
            coeff: c.to_string(),
        }
    }

    fn to_term(&self) -> Result<(SitedMonomial, Rational), CliError> {
        let sel = |site: &str, code: u8| {
            Selector::from_code(code).ok_or_else(|| {
                CliError::Parse(format!(
                    "site {site}: selector must be 0, 1 or 2, got {code}"
                ))
            })
        };
        let m = SitedMonomial::new([sel("A", self.a)?, sel("B", self.b)?, sel("C", self.c)?]);
        Ok((m, parse_rational(&self.coeff)?))
    }
}

fn parse_arity(n: usize) -> Result<Arity, CliError> {
    Arity::from_sites(n).map_err(|_| CliError::Parse(format!("arity must be 2 or 3, got {n}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolynomialJson {
    pub arity: usize,
    pub terms: Vec<TermJson>,
    #[serde(default)]
    pub bound: Option<String>,
}

impl PolynomialJson {
    pub fn from_polynomial(p: &BellPolynomial) -> PolynomialJson {
        PolynomialJson {
            arity: p.arity().sites(),
            terms: p.terms().map(|(m, c)| TermJson::from_term(m, c)).collect(),
            bound: p.bound().map(|b| b.to_string()),
        }
    }

    pub fn to_polynomial(&self) -> Result<BellPolynomial, CliError> {
        let arity = parse_arity(self.arity)?;
        let terms = self
            .terms
            .iter()
            .map(TermJson::to_term)
            .collect::<Result<Vec<_>, _>>()?;
        let p =
            BellPolynomial::from_terms(arity, terms).map_err(|e| CliError::Parse(e.to_string()))?;
        Ok(match &self.bound {
            Some(b) => p.with_bound(parse_rational(b)?),
            None => p,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbabilityFormJson {
    pub arity: usize,
    pub terms: Vec<TermJson>,
    #[serde(rename = "K")]
    pub k: String,
}

impl ProbabilityFormJson {
    pub fn from_form(q: &ProbabilityForm) -> ProbabilityFormJson {
        ProbabilityFormJson {
            arity: q.arity().sites(),
            terms: q.terms().map(|(m, c)| TermJson::from_term(m, c)).collect(),
            k: q.bound().to_string(),
        }
    }

    pub fn to_form(&self) -> Result<ProbabilityForm, CliError> {
        let arity = parse_arity(self.arity)?;
        let terms = self
            .terms
            .iter()
            .map(TermJson::to_term)
            .collect::<Result<Vec<_>, _>>()?;
        ProbabilityForm::new(arity, terms, parse_rational(&self.k)?)
            .map_err(|e| CliError::Parse(e.to_string()))
    }
}

/// A named probability-form inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(flatten)]
    pub form: ProbabilityFormJson,
}

/// A catalog file holds one entry or an array of entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CatalogFile {
    One(CatalogEntry),
    Many(Vec<CatalogEntry>),
}

impl CatalogFile {
    pub fn entries(&self) -> &[CatalogEntry] {
        match self {
            CatalogFile::One(e) => std::slice::from_ref(e),
            CatalogFile::Many(v) => v,
        }
    }

    /// The entry called `name`, or the first one when `name` is `None`.
    pub fn select(&self, name: Option<&str>) -> Result<&CatalogEntry, CliError> {
        let entries = self.entries();
        match name {
            None => entries
                .first()
                .ok_or_else(|| CliError::Parse("catalog is empty".into())),
            Some(n) => entries
                .iter()
                .find(|e| e.name == n)
                .ok_or_else(|| CliError::Parse(format!("catalog has no entry named {n:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhvJson {
    pub max: String,
    /// `{"a1": 1, "a2": -1, …}` in variable order.
    pub witness: BTreeMap<String, i64>,
    pub vertices: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound_holds: Option<bool>,
}

impl LhvJson {
    pub fn new(res: &LhvBoundResult, bound: Option<&Rational>) -> LhvJson {
        LhvJson {
            max: res.maximum.to_string(),
            witness: res
                .witness
                .values()
                .iter()
                .map(|(v, s)| (v.to_string(), s.value()))
                .collect(),
            vertices: res.vertices,
            bound: bound.map(|b| b.to_string()),
            bound_holds: bound.map(|b| res.maximum <= *b),
        }
    }
}

/// Bloch vectors per site, `[[obs1], [obs2]]` with `[x, y, z]` each.
pub fn settings_json(m: &MeasurementSettings) -> Vec<[[f64; 3]; 2]> {
    m.sites()
        .iter()
        .map(|[a, b]| [a.components(), b.components()])
        .collect()
}

/// Row-major `[re, im]` pairs.
pub fn matrix_json(m: &CMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViolationJson {
    pub value: f64,
    pub factor: f64,
    pub bound: f64,
    pub search_space: String,
    pub seed: u64,
    pub restarts: usize,
    pub best_restart: usize,
    pub settings: Vec<[[f64; 3]; 2]>,
    pub parameters: Vec<f64>,
}

impl ViolationJson {
    pub fn new(res: &ViolationResult, search_space: &str, seed: u64) -> ViolationJson {
        ViolationJson {
            value: res.value,
            factor: res.factor,
            bound: res.bound,
            search_space: search_space.to_string(),
            seed,
            restarts: res.restarts.len(),
            best_restart: res.best_restart,
            settings: settings_json(&res.settings),
            parameters: res.parameters.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPointJson {
    pub eta2: f64,
    pub eta3: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdJson {
    pub inequality: String,
    pub scenario: String,
    pub threshold: f64,
    pub fails_at: f64,
    pub holds_at: f64,
    pub tolerance: f64,
    pub iterations: usize,
    /// `λ_max(J)` at `holds_at`.
    pub margin: f64,
    pub angles: Vec<f64>,
    pub settings: Vec<[[f64; 3]; 2]>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub frontier: Vec<FrontierPointJson>,
}

impl ThresholdJson {
    pub fn new(inequality: &str, rep: &ThresholdReport) -> ThresholdJson {
        ThresholdJson {
            inequality: inequality.to_string(),
            scenario: rep.scenario.name().to_string(),
            threshold: rep.threshold,
            fails_at: rep.fails_at,
            holds_at: rep.holds_at,
            tolerance: rep.tolerance,
            iterations: rep.iterations,
            margin: rep.margin,
            angles: rep.angles.clone(),
            settings: settings_json(&rep.settings),
            frontier: rep
                .frontier
                .iter()
                .map(|p| FrontierPointJson {
                    eta2: p.eta2,
                    eta3: p.eta3,
                })
                .collect(),
        }
    }
}
