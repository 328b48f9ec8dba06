use std::fmt::Write;

use super::lexer::is_atom_char;
use crate::model::{parent_tuples, Body, Model, ObsKey};
use crate::rational::format_rational;

/// Canonical text: variables in topological order (ties by name), rows in
/// parent-domain order, every CPT entry written out, reduced fractions.
pub fn serialize(model: &Model) -> String {
    let mut out = String::new();
    writeln!(out, "dilemma {}", quoted(model.name())).unwrap();
    out.push('\n');
    for var in model.variables() {
        let name = word(var.name());
        let parents = list(var.parents());
        let rows = parent_tuples(&model.parent_domains(var));
        match var.body() {
            Body::Stochastic(table) if var.parents().is_empty() => {
                let probs = &table[&Vec::new()];
                writeln!(
                    out,
                    "var {name} in {{{}}} prior {}",
                    list(var.domain()),
                    dist(var.domain(), probs)
                )
                .unwrap();
            }
            Body::Stochastic(table) => {
                writeln!(
                    out,
                    "var {name} in {{{}}} cpt ({parents}) {{",
                    list(var.domain())
                )
                .unwrap();
                for row in rows {
                    writeln!(
                        out,
                        "  ({}): {};",
                        list(&row),
                        dist(var.domain(), &table[&row])
                    )
                    .unwrap();
                }
                out.push_str("}\n");
            }
            Body::Deterministic(table) => {
                writeln!(
                    out,
                    "det {name}({parents}) in {{{}}} {{",
                    list(var.domain())
                )
                .unwrap();
                for row in rows {
                    writeln!(out, "  ({}) -> {};", list(&row), word(&table[&row])).unwrap();
                }
                out.push_str("}\n");
            }
            Body::Utility(table) => {
                writeln!(out, "utility {name}({parents}) {{").unwrap();
                for row in rows {
                    writeln!(
                        out,
                        "  ({}) -> {};",
                        list(&row),
                        format_rational(&table[&row])
                    )
                    .unwrap();
                }
                out.push_str("}\n");
            }
        }
    }
    let d = model.designations();
    out.push('\n');
    write!(out, "designate act={}", word(&d.act)).unwrap();
    if let Some(obs) = &d.obs {
        write!(out, " obs={}", word(obs)).unwrap();
    }
    write!(out, " value={}", word(&d.value)).unwrap();
    let fdt: Vec<String> = d
        .fdt
        .iter()
        .map(|(k, v)| {
            let key = match k {
                ObsKey::Empty => "∅".to_string(),
                ObsKey::Value(v) => word(v),
            };
            format!("{key}: {}", word(v))
        })
        .collect();
    write!(out, " fdt {{{}}}", fdt.join(", ")).unwrap();
    if let Some(s) = &d.self_fdt {
        write!(out, " self={}", word(s)).unwrap();
    }
    out.push('\n');
    out
}

fn dist(domain: &[String], probs: &[crate::Rational]) -> String {
    let entries: Vec<String> = domain
        .iter()
        .zip(probs)
        .map(|(v, p)| format!("{}: {}", word(v), format_rational(p)))
        .collect();
    format!("{{{}}}", entries.join(", "))
}

fn list(items: &[String]) -> String {
    items.iter().map(|s| word(s)).collect::<Vec<_>>().join(", ")
}

/// Bare when it lexes back as a single atom, quoted otherwise.
fn word(s: &str) -> String {
    let bare = !s.is_empty() && s.chars().all(is_atom_char);
    if bare {
        s.to_string()
    } else {
        quoted(s)
    }
}

fn quoted(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if c.is_control() => write!(out, "\\u{{{:x}}}", c as u32).unwrap(),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}
