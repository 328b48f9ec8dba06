//! Built-in dilemmas. Each suite carries one model per agent (the agents'
//! graphs differ for the same dilemma) and a golden table of expected results
//! computed in closed form from the suite's parameters.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::model::{Model, ValidationErrors};
use crate::rational::{format_rational, int, rat, Rational};
use crate::theories::{evaluate, Prescription, Theory};

mod cosmic_ray;
mod death_in_damascus;
mod mechanical_blackmail;
mod newcomb;
mod parfit_hitchhiker;
mod smoking_lesion;
mod transparent_newcomb;
mod twin_pd;
mod xor_blackmail;

pub use smoking_lesion::lesion_renaming;

/// Names accepted by [`load`], in catalog order.
pub const DILEMMAS: [&str; 9] = [
    "newcomb",
    "twin_pd",
    "smoking_lesion",
    "transparent_newcomb",
    "parfit_hitchhiker",
    "xor_blackmail",
    "mechanical_blackmail",
    "death_in_damascus",
    "cosmic_ray",
];

const MILLION: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bound {
    pub value: Rational,
    pub inclusive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: Rational,
    pub lower: Option<Bound>,
    pub upper: Option<Bound>,
    /// Only 0 and 1 are accepted.
    pub flag: bool,
    pub doc: &'static str,
}

impl ParamSpec {
    fn new(name: &'static str, default: Rational, doc: &'static str) -> Self {
        ParamSpec {
            name,
            default,
            lower: None,
            upper: None,
            flag: false,
            doc,
        }
    }

    fn lower(mut self, value: Rational, inclusive: bool) -> Self {
        self.lower = Some(Bound { value, inclusive });
        self
    }

    fn upper(mut self, value: Rational, inclusive: bool) -> Self {
        self.upper = Some(Bound { value, inclusive });
        self
    }

    /// A probability in the closed unit interval.
    fn closed_unit(name: &'static str, default: Rational, doc: &'static str) -> Self {
        Self::new(name, default, doc)
            .lower(Rational::zero(), true)
            .upper(Rational::one(), true)
    }

    /// A probability in the open unit interval.
    fn open_unit(name: &'static str, default: Rational, doc: &'static str) -> Self {
        Self::new(name, default, doc)
            .lower(Rational::zero(), false)
            .upper(Rational::one(), false)
    }

    fn non_negative(name: &'static str, default: Rational, doc: &'static str) -> Self {
        Self::new(name, default, doc).lower(Rational::zero(), true)
    }

    fn flag(name: &'static str, doc: &'static str) -> Self {
        ParamSpec {
            flag: true,
            ..Self::new(name, Rational::zero(), doc)
        }
    }

    pub fn admits(&self, v: &Rational) -> bool {
        if self.flag {
            return v.is_zero() || v.is_one();
        }
        let above = self.lower.as_ref().is_none_or(|b| {
            if b.inclusive {
                *v >= b.value
            } else {
                *v > b.value
            }
        });
        let below = self.upper.as_ref().is_none_or(|b| {
            if b.inclusive {
                *v <= b.value
            } else {
                *v < b.value
            }
        });
        above && below
    }

    /// Interval notation such as `(0, 1]` or `{0, 1}`.
    pub fn range(&self) -> String {
        if self.flag {
            return "{0, 1}".into();
        }
        let lo = match &self.lower {
            Some(b) => format!(
                "{}{}",
                if b.inclusive { "[" } else { "(" },
                format_rational(&b.value)
            ),
            None => "(-inf".into(),
        };
        let hi = match &self.upper {
            Some(b) => format!(
                "{}{}",
                format_rational(&b.value),
                if b.inclusive { "]" } else { ")" }
            ),
            None => "inf)".into(),
        };
        format!("{lo}, {hi}")
    }
}

/// Resolved parameter values.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Params(pub BTreeMap<String, Rational>);

impl Params {
    pub fn get(&self, name: &str) -> Rational {
        self.0
            .get(name)
            .cloned()
            .unwrap_or_else(|| panic!("parameter `{name}` is declared"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteModel {
    pub label: String,
    pub theory: Theory,
    pub model: Model,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenEntry {
    /// Label of the suite model this entry is evaluated on.
    pub model: String,
    pub theory: Theory,
    pub observation: Option<String>,
    pub per_action: Option<Vec<(String, Rational)>>,
    pub chosen: Vec<String>,
    pub note: String,
}

impl fmt::Display for GoldenEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} on `{}`", self.theory, self.model)?;
        if let Some(o) = &self.observation {
            write!(f, " obs={o}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DilemmaSuite {
    pub name: String,
    pub params: Params,
    pub models: Vec<SuiteModel>,
    pub golden: Vec<GoldenEntry>,
}

impl DilemmaSuite {
    pub fn model(&self, label: &str) -> Option<&Model> {
        self.models
            .iter()
            .find(|m| m.label == label)
            .map(|m| &m.model)
    }

    /// The model the given theory's agent uses.
    pub fn model_for(&self, theory: Theory) -> Option<&Model> {
        self.model(theory.as_str())
    }

    pub fn actions(&self) -> &[String] {
        self.models[0].model.actions()
    }

    /// Replaces the model with the given label, keeping the goldens.
    pub fn with_model(mut self, label: &str, model: Model) -> Option<Self> {
        let slot = self.models.iter_mut().find(|m| m.label == label)?;
        slot.model = model;
        Some(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("unknown dilemma `{0}`; known: {known}", known = DILEMMAS.join(", "))]
    UnknownDilemma(String),
    #[error("dilemma `{dilemma}` has no parameter `{param}`")]
    UnknownParam { dilemma: String, param: String },
    #[error("parameter `{param}` = {} is outside {range}", format_rational(.value))]
    ParamOutOfRange {
        param: String,
        value: Rational,
        range: String,
    },
    #[error("built-in dilemma failed validation: {0}")]
    Invalid(#[from] ValidationErrors),
}

type Builder = fn(&Params) -> Result<(Vec<SuiteModel>, Vec<GoldenEntry>), ValidationErrors>;

type Specs = fn() -> Vec<ParamSpec>;

fn catalog(name: &str) -> Option<(Specs, Builder)> {
    Some(match name {
        "newcomb" => (newcomb::params, newcomb::build),
        "twin_pd" => (twin_pd::params, twin_pd::build),
        "smoking_lesion" => (smoking_lesion::params, smoking_lesion::build),
        "transparent_newcomb" => (transparent_newcomb::params, transparent_newcomb::build),
        "parfit_hitchhiker" => (parfit_hitchhiker::params, parfit_hitchhiker::build),
        "xor_blackmail" => (xor_blackmail::params, xor_blackmail::build),
        "mechanical_blackmail" => (mechanical_blackmail::params, mechanical_blackmail::build),
        "death_in_damascus" => (death_in_damascus::params, death_in_damascus::build),
        "cosmic_ray" => (cosmic_ray::params, cosmic_ray::build),
        _ => return None,
    })
}

/// Declared parameters of a dilemma.
pub fn params(name: &str) -> Result<Vec<ParamSpec>, CorpusError> {
    catalog(name)
        .map(|(p, _)| p())
        .ok_or_else(|| CorpusError::UnknownDilemma(name.to_string()))
}

/// Builds a suite, applying parameter overrides on top of the defaults.
pub fn load(
    name: &str,
    overrides: &BTreeMap<String, Rational>,
) -> Result<DilemmaSuite, CorpusError> {
    let (specs, build) =
        catalog(name).ok_or_else(|| CorpusError::UnknownDilemma(name.to_string()))?;
    let specs = specs();
    let mut values: BTreeMap<String, Rational> = specs
        .iter()
        .map(|s| (s.name.to_string(), s.default.clone()))
        .collect();
    for (k, v) in overrides {
        let spec = specs
            .iter()
            .find(|s| s.name == k)
            .ok_or_else(|| CorpusError::UnknownParam {
                dilemma: name.to_string(),
                param: k.clone(),
            })?;
        if !spec.admits(v) {
            return Err(CorpusError::ParamOutOfRange {
                param: k.clone(),
                value: v.clone(),
                range: spec.range(),
            });
        }
        values.insert(k.clone(), v.clone());
    }
    let params = Params(values);
    let (models, golden) = build(&params)?;
    Ok(DilemmaSuite {
        name: name.to_string(),
        params,
        models,
        golden,
    })
}

pub fn load_default(name: &str) -> Result<DilemmaSuite, CorpusError> {
    load(name, &BTreeMap::new())
}

fn overrides(pairs: &[(&str, Rational)]) -> BTreeMap<String, Rational> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

pub fn newcomb(accuracy: Rational, act_prior: Rational) -> Result<DilemmaSuite, CorpusError> {
    load(
        "newcomb",
        &overrides(&[("accuracy", accuracy), ("act_prior", act_prior)]),
    )
}

pub fn twin_pd() -> Result<DilemmaSuite, CorpusError> {
    load_default("twin_pd")
}

pub fn smoking_lesion(p: Rational, q: Rational) -> Result<DilemmaSuite, CorpusError> {
    load("smoking_lesion", &overrides(&[("p", p), ("q", q)]))
}

pub fn transparent_newcomb(accuracy: Rational, q: Rational) -> Result<DilemmaSuite, CorpusError> {
    load(
        "transparent_newcomb",
        &overrides(&[("accuracy", accuracy), ("q", q)]),
    )
}

pub fn parfit_hitchhiker(accuracy: Rational) -> Result<DilemmaSuite, CorpusError> {
    load("parfit_hitchhiker", &overrides(&[("accuracy", accuracy)]))
}

pub fn xor_blackmail(termite_prior: Rational) -> Result<DilemmaSuite, CorpusError> {
    load(
        "xor_blackmail",
        &overrides(&[("termite_prior", termite_prior)]),
    )
}

pub fn mechanical_blackmail(error: Rational) -> Result<DilemmaSuite, CorpusError> {
    load("mechanical_blackmail", &overrides(&[("error", error)]))
}

pub fn death_in_damascus(
    flee_cost: Rational,
    coin_price: Rational,
    include_coin: bool,
) -> Result<DilemmaSuite, CorpusError> {
    let coin = if include_coin { int(1) } else { int(0) };
    load(
        "death_in_damascus",
        &overrides(&[
            ("flee_cost", flee_cost),
            ("coin_price", coin_price),
            ("include_coin", coin),
        ]),
    )
}

pub fn cosmic_ray(
    ray_prob: Rational,
    disposition_prior: Rational,
) -> Result<DilemmaSuite, CorpusError> {
    load(
        "cosmic_ray",
        &overrides(&[
            ("ray_prob", ray_prob),
            ("disposition_prior", disposition_prior),
        ]),
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenOutcome {
    pub entry: GoldenEntry,
    pub computed: Result<Prescription, String>,
    /// Human-readable differences; empty when the entry passes.
    pub mismatches: Vec<String>,
}

impl GoldenOutcome {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldenReport {
    pub suite: String,
    pub outcomes: Vec<GoldenOutcome>,
}

impl GoldenReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(GoldenOutcome::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &GoldenOutcome> {
        self.outcomes.iter().filter(|o| !o.passed())
    }
}

/// Runs every golden entry and compares exactly.
pub fn verify_golden(suite: &DilemmaSuite) -> GoldenReport {
    let outcomes = suite
        .golden
        .iter()
        .map(|entry| {
            let computed = match suite.model(&entry.model) {
                None => Err(format!("no model labelled `{}`", entry.model)),
                Some(m) => evaluate(m, entry.theory, entry.observation.as_deref())
                    .map_err(|e| e.to_string()),
            };
            let mismatches = compare(entry, &computed);
            GoldenOutcome {
                entry: entry.clone(),
                computed,
                mismatches,
            }
        })
        .collect();
    GoldenReport {
        suite: suite.name.clone(),
        outcomes,
    }
}

fn compare(entry: &GoldenEntry, computed: &Result<Prescription, String>) -> Vec<String> {
    let p = match computed {
        Err(e) => return vec![format!("evaluation failed: {e}")],
        Ok(p) => p,
    };
    let mut out = Vec::new();
    if let Some(expected) = &entry.per_action {
        for (action, want) in expected {
            match p.eu(action) {
                Some(got) if got == want => {}
                Some(got) => out.push(format!(
                    "EU({action}): expected {}, computed {}",
                    format_rational(want),
                    format_rational(got)
                )),
                None => out.push(format!(
                    "EU({action}): expected {}, computed excluded",
                    format_rational(want)
                )),
            }
        }
    }
    if p.chosen != entry.chosen {
        out.push(format!(
            "chosen: expected {{{}}}, computed {{{}}}",
            entry.chosen.join(", "),
            p.chosen.join(", ")
        ));
    }
    out
}

/// Golden entry whose chosen set is the argmax of the given values, ties in
/// the listed order.
fn golden_eu(
    model: &str,
    theory: Theory,
    obs: Option<&str>,
    values: &[(&str, Rational)],
    note: &str,
) -> GoldenEntry {
    let best = values
        .iter()
        .map(|(_, v)| v)
        .max()
        .expect("non-empty")
        .clone();
    GoldenEntry {
        model: model.to_string(),
        theory,
        observation: obs.map(str::to_string),
        per_action: Some(
            values
                .iter()
                .map(|(a, v)| (a.to_string(), v.clone()))
                .collect(),
        ),
        chosen: values
            .iter()
            .filter(|(_, v)| *v == best)
            .map(|(a, _)| a.to_string())
            .collect(),
        note: note.to_string(),
    }
}

fn suite_model(theory: Theory, model: Model) -> SuiteModel {
    SuiteModel {
        label: theory.as_str().to_string(),
        theory,
        model,
    }
}

fn one() -> Rational {
    Rational::one()
}

fn million() -> Rational {
    int(MILLION)
}

/// `[p, 1 - p]`.
fn split(p: &Rational) -> [Rational; 2] {
    [p.clone(), one() - p]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_default_suite_matches_its_golden_values() {
        for name in DILEMMAS {
            let suite = load_default(name).unwrap();
            let report = verify_golden(&suite);
            for o in report.failures() {
                eprintln!("{name}: {} {:?}", o.entry, o.mismatches);
            }
            assert!(report.all_passed(), "{name}");
        }
    }

    #[test]
    fn coin_variant_matches_its_golden_values() {
        let suite = death_in_damascus(int(1000), int(1), true).unwrap();
        assert!(verify_golden(&suite).all_passed());
        assert_eq!(suite.actions(), ["damascus", "aleppo", "coin"]);
    }

    #[test]
    fn overrides_are_range_checked() {
        assert!(matches!(
            newcomb(int(2), rat(1, 2)),
            Err(CorpusError::ParamOutOfRange { .. })
        ));
        assert!(matches!(
            load("nope", &BTreeMap::new()),
            Err(CorpusError::UnknownDilemma(_))
        ));
        let bad = overrides(&[("nope", int(0))]);
        assert!(matches!(
            load("newcomb", &bad),
            Err(CorpusError::UnknownParam { .. })
        ));
    }
}
