//! Interventions by graph surgery.
//!
//! `do(X = x)` removes every incoming edge of `X` and replaces its node by a
//! constant. The result is a fresh validated model; other nodes are untouched.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Model, Node, NodeTable, ValidationErrors, VarKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Intervention {
    pub target: String,
    pub value: String,
}

impl Intervention {
    pub fn new(target: &str, value: &str) -> Self {
        Intervention {
            target: target.to_string(),
            value: value.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SurgeryError {
    #[error("no intervention target named `{0}`")]
    UnknownTarget(String),
    #[error("`{value}` is not a value of `{target}`")]
    ValueOutOfDomain { target: String, value: String },
    #[error(transparent)]
    Invalid(#[from] ValidationErrors),
}

pub fn do_intervene(model: &Model, iv: &Intervention) -> Result<Model, SurgeryError> {
    let var = model
        .variable(&iv.target)
        .ok_or_else(|| SurgeryError::UnknownTarget(iv.target.clone()))?;
    if var.is_utility() || var.index_of(&iv.value).is_none() {
        return Err(SurgeryError::ValueOutOfDomain {
            target: iv.target.clone(),
            value: iv.value.clone(),
        });
    }
    let node = Node {
        variable: iv.target.clone(),
        parents: Vec::new(),
        table: NodeTable::Function(BTreeMap::from([(Vec::new(), iv.value.clone())])),
    };
    Ok(model.replace_node(node, VarKind::Deterministic)?)
}

/// Variables reachable from `target` along directed edges, excluding it.
pub fn descendants(model: &Model, target: &str) -> Result<BTreeSet<String>, SurgeryError> {
    if model.variable(target).is_none() {
        return Err(SurgeryError::UnknownTarget(target.to_string()));
    }
    let mut found = BTreeSet::new();
    let mut stack = vec![target.to_string()];
    while let Some(next) = stack.pop() {
        for child in model.children(&next) {
            if found.insert(child.to_string()) {
                stack.push(child.to_string());
            }
        }
    }
    Ok(found)
}

/// Variables with no directed path from `target`, excluding it.
pub fn non_descendant_set(model: &Model, target: &str) -> Result<BTreeSet<String>, SurgeryError> {
    let down = descendants(model, target)?;
    Ok(model
        .variables()
        .map(|v| v.name().to_string())
        .filter(|n| n != target && !down.contains(n))
        .collect())
}
