//! Single mutations of valid corpus models must each be rejected with the
//! matching error.

use dilemma_core::corpus;
use dilemma_core::model::{
    build_model, Designations, ModelError, Node, NodeTable, ObsKey, VariableDecl,
};
use dilemma_core::rational::{int, rat};

type Parts = (Vec<VariableDecl>, Vec<Node>, Designations);

fn newcomb() -> Parts {
    corpus::load_default("newcomb")
        .unwrap()
        .model("fdt")
        .unwrap()
        .to_parts()
}

fn node<'a>(parts: &'a mut Parts, name: &str) -> &'a mut Node {
    parts.1.iter_mut().find(|n| n.variable == name).unwrap()
}

fn rejects(parts: Parts, want: impl Fn(&ModelError) -> bool) {
    let errors = build_model(parts.0, parts.1, parts.2).unwrap_err().0;
    assert!(errors.iter().any(&want), "{errors:?}");
}

#[test]
fn unmutated_parts_rebuild() {
    let (d, n, g) = newcomb();
    assert!(build_model(d, n, g).is_ok());
}

#[test]
fn skewed_prior_is_not_normalized() {
    let mut p = newcomb();
    if let NodeTable::Cpt(t) = &mut node(&mut p, "Accurate").table {
        t.get_mut(&Vec::new())
            .unwrap()
            .insert("accurate".into(), rat(100, 100));
    }
    rejects(
        p,
        |e| matches!(e, ModelError::NonNormalizedRow { variable, sum, .. } if variable == "Accurate" && *sum == rat(101, 100)),
    );
}

#[test]
fn negative_probability_is_out_of_range() {
    let mut p = newcomb();
    if let NodeTable::Cpt(t) = &mut node(&mut p, "Fdt").table {
        let row = t.get_mut(&Vec::new()).unwrap();
        row.insert("onebox".into(), rat(-1, 2));
        row.insert("twobox".into(), rat(3, 2));
    }
    rejects(
        p,
        |e| matches!(e, ModelError::ProbabilityOutOfRange { variable, .. } if variable == "Fdt"),
    );
}

#[test]
fn dropped_row_is_incomplete() {
    let mut p = newcomb();
    if let NodeTable::Function(t) = &mut node(&mut p, "Prediction").table {
        t.remove(&vec!["twobox".to_string(), "accurate".to_string()]);
    }
    rejects(
        p,
        |e| matches!(e, ModelError::IncompleteTable { variable, .. } if variable == "Prediction"),
    );
}

#[test]
fn output_outside_domain() {
    let mut p = newcomb();
    if let NodeTable::Function(t) = &mut node(&mut p, "BoxB").table {
        t.insert(vec!["1".into()], "overflowing".into());
    }
    rejects(
        p,
        |e| matches!(e, ModelError::ValueOutOfDomain { value, .. } if value == "overflowing"),
    );
}

#[test]
fn back_edge_makes_a_cycle() {
    let mut p = newcomb();
    let fdt = node(&mut p, "Fdt");
    fdt.parents = vec!["BoxB".into()];
    if let NodeTable::Cpt(t) = &mut fdt.table {
        let row = t.remove(&Vec::new()).unwrap();
        t.insert(vec!["full".into()], row.clone());
        t.insert(vec!["empty".into()], row);
    }
    let parents: std::collections::BTreeMap<String, Vec<String>> =
        p.1.iter()
            .map(|n| (n.variable.clone(), n.parents.clone()))
            .collect();
    rejects(p, |e| match e {
        ModelError::CycleDetected { cycle } => {
            cycle.first() == cycle.last()
                && cycle.len() == 4
                && cycle.windows(2).all(|w| parents[&w[1]].contains(&w[0]))
        }
        _ => false,
    });
}

#[test]
fn unknown_parent() {
    let mut p = newcomb();
    node(&mut p, "BoxB").parents = vec!["Oracle".into()];
    rejects(
        p,
        |e| matches!(e, ModelError::UnknownParent { parent, .. } if parent == "Oracle"),
    );
}

#[test]
fn second_utility() {
    let mut p = newcomb();
    p.0.push(VariableDecl::utility("W"));
    p.1.push(Node {
        variable: "W".into(),
        parents: Vec::new(),
        table: NodeTable::Utility([(Vec::new(), int(0))].into()),
    });
    rejects(p, |e| matches!(e, ModelError::UtilityCount(2)));
}

#[test]
fn utility_as_parent() {
    let mut p = newcomb();
    p.0.push(VariableDecl::new(
        "After",
        &["x"],
        dilemma_core::model::VarKind::Deterministic,
    ));
    p.1.push(Node {
        variable: "After".into(),
        parents: vec!["V".into()],
        table: NodeTable::Function(Default::default()),
    });
    rejects(p, |e| matches!(e, ModelError::UtilityParent { .. }));
}

#[test]
fn fdt_node_with_wrong_domain() {
    let mut p = newcomb();
    p.2.fdt.insert(ObsKey::Empty, "Accurate".into());
    rejects(
        p,
        |e| matches!(e, ModelError::BadDesignation { role, .. } if role == "fdt[∅]"),
    );
}

#[test]
fn act_designated_as_missing_variable() {
    let mut p = newcomb();
    p.2.act = "Choice".into();
    rejects(
        p,
        |e| matches!(e, ModelError::BadDesignation { role, .. } if role == "act"),
    );
}

#[test]
fn duplicate_domain_value() {
    let mut p = newcomb();
    p.0.iter_mut()
        .find(|d| d.name == "Accurate")
        .unwrap()
        .domain
        .push("accurate".into());
    rejects(
        p,
        |e| matches!(e, ModelError::DuplicateValue { value, .. } if value == "accurate"),
    );
}
