//! Serializable reports and their table renderings. JSON and table output are
//! built from the same structs, so they always carry the same numbers.

use std::fmt::Write;

use dilemma_core::corpus::{DilemmaSuite, GoldenReport};
use dilemma_core::rational::{format_dollars, format_rational};
use dilemma_core::theories::{BestResponseTrace, Ratification, TraceStatus};
use dilemma_core::{Prescription, Rational};
use serde::Serialize;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct ActionValue {
    pub action: String,
    /// Exact value as `a/b` or an integer.
    pub value: String,
    /// Dollar rendering; prefixed with `~` when rounded.
    pub dollars: String,
    pub exact: bool,
}

impl ActionValue {
    pub fn new(action: &str, v: &Rational) -> Self {
        let d = format_dollars(v);
        ActionValue {
            action: action.to_string(),
            value: format_rational(v),
            dollars: d.to_string(),
            exact: d.exact,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Excluded {
    pub action: String,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RunReport {
    pub dilemma: String,
    /// Suite model label, or the file path.
    pub model: String,
    pub theory: String,
    pub observation: Option<String>,
    pub per_action: Vec<ActionValue>,
    pub chosen: Vec<String>,
    pub excluded: Vec<Excluded>,
    pub elapsed_us: u64,
}

impl RunReport {
    pub fn new(dilemma: &str, model: &str, p: &Prescription, elapsed_us: u64) -> Self {
        RunReport {
            dilemma: dilemma.to_string(),
            model: model.to_string(),
            theory: p.theory.to_string(),
            observation: p.observation.clone(),
            per_action: p
                .per_action
                .iter()
                .map(|(a, v)| ActionValue::new(a, v))
                .collect(),
            chosen: p.chosen.clone(),
            excluded: p
                .excluded
                .iter()
                .map(|e| Excluded {
                    action: e.action.clone(),
                    reason: e.reason.clone(),
                })
                .collect(),
            elapsed_us,
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let obs = self.observation.as_deref().unwrap_or("∅");
        writeln!(
            out,
            "{}: {} (model {}, observation {obs})",
            self.dilemma,
            self.theory.to_uppercase(),
            self.model
        )
        .unwrap();
        let rows: Vec<[String; 3]> = self
            .per_action
            .iter()
            .map(|v| [v.action.clone(), v.value.clone(), v.dollars.clone()])
            .collect();
        out.push_str(&columns(&["action", "EU", "dollars"], &rows, "  "));
        writeln!(out, "  chosen: {}", self.chosen.join(", ")).unwrap();
        for e in &self.excluded {
            writeln!(out, "  excluded: {} ({})", e.action, e.reason).unwrap();
        }
        writeln!(out, "  time: {} us", self.elapsed_us).unwrap();
        out
    }
}

/// Left-aligned columns with a header row.
fn columns<const N: usize>(header: &[&str; N], rows: &[[String; N]], indent: &str) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        format!("{indent}{}\n", padded.join("  ").trim_end())
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GoldenEntryReport {
    pub model: String,
    pub theory: String,
    pub observation: Option<String>,
    pub note: String,
    pub passed: bool,
    pub mismatches: Vec<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GoldenSuiteReport {
    pub suite: String,
    pub params: Vec<(String, String)>,
    pub entries: Vec<GoldenEntryReport>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct GoldenSummary {
    pub suites: Vec<GoldenSuiteReport>,
    pub passed: usize,
    pub failed: usize,
}

impl GoldenSummary {
    pub fn new(reports: &[(&DilemmaSuite, GoldenReport)]) -> Self {
        let suites: Vec<GoldenSuiteReport> = reports
            .iter()
            .map(|(suite, report)| GoldenSuiteReport {
                suite: suite.name.clone(),
                params: suite
                    .params
                    .0
                    .iter()
                    .map(|(k, v)| (k.clone(), format_rational(v)))
                    .collect(),
                entries: report
                    .outcomes
                    .iter()
                    .map(|o| GoldenEntryReport {
                        model: o.entry.model.clone(),
                        theory: o.entry.theory.to_string(),
                        observation: o.entry.observation.clone(),
                        note: o.entry.note.clone(),
                        passed: o.passed(),
                        mismatches: o.mismatches.clone(),
                    })
                    .collect(),
            })
            .collect();
        let all = suites.iter().flat_map(|s| &s.entries);
        let passed = all.clone().filter(|e| e.passed).count();
        let failed = all.count() - passed;
        GoldenSummary {
            suites,
            passed,
            failed,
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let params: Vec<String> = s.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            if params.is_empty() {
                writeln!(out, "{}", s.suite).unwrap();
            } else {
                writeln!(out, "{} ({})", s.suite, params.join(", ")).unwrap();
            }
            for e in &s.entries {
                let status = if e.passed { "ok  " } else { "FAIL" };
                let obs = e
                    .observation
                    .as_ref()
                    .map(|o| format!(" obs={o}"))
                    .unwrap_or_default();
                writeln!(
                    out,
                    "  {status}  {} on `{}`{obs}  # {}",
                    e.theory, e.model, e.note
                )
                .unwrap();
                for m in &e.mismatches {
                    writeln!(out, "          {m}").unwrap();
                }
            }
        }
        writeln!(
            out,
            "golden: {} passed, {} failed",
            self.passed, self.failed
        )
        .unwrap();
        out
    }
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Probability {
    pub action: String,
    pub probability: String,
}

fn distribution(d: &[(String, Rational)]) -> Vec<Probability> {
    d.iter()
        .map(|(a, p)| Probability {
            action: a.clone(),
            probability: format_rational(p),
        })
        .collect()
}

fn show(d: &[Probability]) -> String {
    let parts: Vec<String> = d
        .iter()
        .map(|p| format!("{}: {}", p.action, p.probability))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TraceStepReport {
    pub prior: Vec<Probability>,
    pub per_action: Vec<ActionValue>,
    pub chosen: Vec<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StatusReport {
    Converged { action: String },
    Cycle { period: usize },
    BudgetExhausted,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct RatificationReport {
    pub prior: Vec<Probability>,
    pub per_action: Vec<ActionValue>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct TraceReport {
    pub dilemma: String,
    pub model: String,
    pub initial: Vec<Probability>,
    pub steps: Vec<TraceStepReport>,
    pub status: StatusReport,
    pub ratification: Option<RatificationReport>,
}

impl TraceReport {
    pub fn new(
        dilemma: &str,
        model: &str,
        trace: &BestResponseTrace,
        ratification: Option<&Ratification>,
    ) -> Self {
        TraceReport {
            dilemma: dilemma.to_string(),
            model: model.to_string(),
            initial: distribution(&trace.initial),
            steps: trace
                .steps
                .iter()
                .map(|s| TraceStepReport {
                    prior: distribution(&s.prior),
                    per_action: s
                        .prescription
                        .per_action
                        .iter()
                        .map(|(a, v)| ActionValue::new(a, v))
                        .collect(),
                    chosen: s.prescription.chosen.clone(),
                })
                .collect(),
            status: match &trace.status {
                TraceStatus::Converged { action } => StatusReport::Converged {
                    action: action.clone(),
                },
                TraceStatus::CycleDetected { period } => StatusReport::Cycle { period: *period },
                TraceStatus::BudgetExhausted => StatusReport::BudgetExhausted,
            },
            ratification: ratification.map(|r| RatificationReport {
                prior: distribution(&r.prior),
                per_action: r
                    .per_action
                    .iter()
                    .map(|(a, v)| ActionValue::new(a, v))
                    .collect(),
            }),
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        writeln!(
            out,
            "{}: CDT best response (model {})",
            self.dilemma, self.model
        )
        .unwrap();
        writeln!(out, "  initial: {}", show(&self.initial)).unwrap();
        for (i, s) in self.steps.iter().enumerate() {
            let eus: Vec<String> = s
                .per_action
                .iter()
                .map(|v| format!("{}: {}", v.action, v.value))
                .collect();
            writeln!(
                out,
                "  {:>3}  prior {}  EU {{{}}}  -> {}",
                i + 1,
                show(&s.prior),
                eus.join(", "),
                s.chosen.join(", ")
            )
            .unwrap();
        }
        let status = match &self.status {
            StatusReport::Converged { action } => format!("converged to {action}"),
            StatusReport::Cycle { period } => format!("cycle detected (period {period})"),
            StatusReport::BudgetExhausted => "budget exhausted".into(),
        };
        writeln!(out, "  status: {status}").unwrap();
        if let Some(r) = &self.ratification {
            let eus: Vec<String> = r
                .per_action
                .iter()
                .map(|v| format!("{}: {}", v.action, v.dollars))
                .collect();
            writeln!(
                out,
                "  ratified: {}  EU {{{}}}",
                show(&r.prior),
                eus.join(", ")
            )
            .unwrap();
        }
        out
    }
}
