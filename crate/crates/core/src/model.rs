//! Discrete decision models: variables, nodes, designations and validation.
//!
//! A [`Model`] is a DAG of named variables. Every non-utility variable has a
//! finite ordered domain of symbolic values and is either stochastic (a CPT
//! over its parents) or deterministic (a total function of its parents).
//! Exactly one variable is the utility node: a total function from its
//! parents to exact rationals. Domain order is the tie-break key everywhere
//! downstream.
//!
//! Models are only ever produced by [`build_model`], which enforces every
//! structural invariant. Transformations (surgery, renaming, utility maps)
//! decompose the model with [`Model::to_parts`] and rebuild it, so a
//! transformed model is validated exactly like a fresh one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{format_rational, Rational};

/// Rows beyond this count are rejected before any table is expanded.
pub const MAX_TABLE_ROWS: u128 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Stochastic,
    Deterministic,
    Utility,
}

impl fmt::Display for VarKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VarKind::Stochastic => "stochastic",
            VarKind::Deterministic => "deterministic",
            VarKind::Utility => "utility",
        })
    }
}

/// Declaration of a variable. The utility variable's domain is the rational
/// line and its `domain` field must be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub domain: Vec<String>,
    pub kind: VarKind,
}

impl VariableDecl {
    pub fn new(name: impl Into<String>, domain: &[&str], kind: VarKind) -> Self {
        VariableDecl {
            name: name.into(),
            domain: domain.iter().map(|v| v.to_string()).collect(),
            kind,
        }
    }

    pub fn utility(name: impl Into<String>) -> Self {
        VariableDecl {
            name: name.into(),
            domain: Vec::new(),
            kind: VarKind::Utility,
        }
    }
}

/// Unvalidated node table, keyed by the tuple of parent values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeTable {
    /// Values missing from a row have probability zero.
    Cpt(BTreeMap<Vec<String>, BTreeMap<String, Rational>>),
    Function(BTreeMap<Vec<String>, String>),
    Utility(BTreeMap<Vec<String>, Rational>),
}

impl NodeTable {
    fn kind(&self) -> VarKind {
        match self {
            NodeTable::Cpt(_) => VarKind::Stochastic,
            NodeTable::Function(_) => VarKind::Deterministic,
            NodeTable::Utility(_) => VarKind::Utility,
        }
    }

    fn row_keys(&self) -> Vec<&Vec<String>> {
        match self {
            NodeTable::Cpt(t) => t.keys().collect(),
            NodeTable::Function(t) => t.keys().collect(),
            NodeTable::Utility(t) => t.keys().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub variable: String,
    pub parents: Vec<String>,
    pub table: NodeTable,
}

/// Key of the intervention-node map: an observation value, or `∅` when the
/// agent has observed nothing.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObsKey {
    Empty,
    Value(String),
}

impl ObsKey {
    pub fn from_observation(obs: Option<&str>) -> Self {
        match obs {
            Some(v) => ObsKey::Value(v.to_string()),
            None => ObsKey::Empty,
        }
    }
}

impl fmt::Display for ObsKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObsKey::Empty => f.write_str("∅"),
            ObsKey::Value(v) => f.write_str(v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Designations {
    pub act: String,
    pub obs: Option<String>,
    pub value: String,
    /// Intervention node per observation.
    pub fdt: BTreeMap<ObsKey, String>,
    /// The intervention node standing for the agent's own decision function
    /// when several exist.
    pub self_fdt: Option<String>,
}

impl Designations {
    pub fn new(act: impl Into<String>, value: impl Into<String>) -> Self {
        Designations {
            act: act.into(),
            obs: None,
            value: value.into(),
            fdt: BTreeMap::new(),
            self_fdt: None,
        }
    }
}

/// Validated node body. CPT rows are dense over the variable's domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Body {
    Stochastic(BTreeMap<Vec<String>, Vec<Rational>>),
    Deterministic(BTreeMap<Vec<String>, String>),
    Utility(BTreeMap<Vec<String>, Rational>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    name: String,
    domain: Vec<String>,
    parents: Vec<String>,
    body: Body,
}

impl Variable {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[String] {
        &self.domain
    }

    pub fn parents(&self) -> &[String] {
        &self.parents
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn kind(&self) -> VarKind {
        match self.body {
            Body::Stochastic(_) => VarKind::Stochastic,
            Body::Deterministic(_) => VarKind::Deterministic,
            Body::Utility(_) => VarKind::Utility,
        }
    }

    pub fn is_utility(&self) -> bool {
        self.kind() == VarKind::Utility
    }

    pub fn is_root(&self) -> bool {
        self.parents.is_empty()
    }

    pub fn index_of(&self, value: &str) -> Option<usize> {
        self.domain.iter().position(|v| v == value)
    }

    /// Probability row for a parent tuple (stochastic nodes only).
    pub fn cpt_row(&self, parent_values: &[String]) -> Option<&[Rational]> {
        match &self.body {
            Body::Stochastic(rows) => rows.get(parent_values).map(Vec::as_slice),
            _ => None,
        }
    }

    pub fn function_value(&self, parent_values: &[String]) -> Option<&str> {
        match &self.body {
            Body::Deterministic(rows) => rows.get(parent_values).map(String::as_str),
            _ => None,
        }
    }

    pub fn utility_value(&self, parent_values: &[String]) -> Option<&Rational> {
        match &self.body {
            Body::Utility(rows) => rows.get(parent_values),
            _ => None,
        }
    }

    fn to_decl_and_node(&self) -> (VariableDecl, Node) {
        let decl = VariableDecl {
            name: self.name.clone(),
            domain: self.domain.clone(),
            kind: self.kind(),
        };
        let table = match &self.body {
            Body::Stochastic(rows) => NodeTable::Cpt(
                rows.iter()
                    .map(|(k, row)| {
                        let dist = self
                            .domain
                            .iter()
                            .cloned()
                            .zip(row.iter().cloned())
                            .collect();
                        (k.clone(), dist)
                    })
                    .collect(),
            ),
            Body::Deterministic(rows) => NodeTable::Function(rows.clone()),
            Body::Utility(rows) => NodeTable::Utility(rows.clone()),
        };
        let node = Node {
            variable: self.name.clone(),
            parents: self.parents.clone(),
            table,
        };
        (decl, node)
    }
}

/// A validated decision model. Immutable; transformations return new models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    name: String,
    variables: BTreeMap<String, Variable>,
    designations: Designations,
    order: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("variable `{0}` is declared more than once")]
    DuplicateVariable(String),
    #[error("variable `{0}` has an empty domain")]
    EmptyDomain(String),
    #[error("variable `{variable}` lists value `{value}` more than once")]
    DuplicateValue { variable: String, value: String },
    #[error("utility variable `{0}` must not declare a symbolic domain")]
    UtilityDomain(String),
    #[error("expected exactly one utility variable, found {0}")]
    UtilityCount(usize),
    #[error("variable `{0}` has no node")]
    MissingNode(String),
    #[error("variable `{0}` has more than one node")]
    DuplicateNode(String),
    #[error("node `{0}` has no variable declaration")]
    UndeclaredNode(String),
    #[error("variable `{variable}` is declared {declared} but its node is {node}")]
    KindMismatch {
        variable: String,
        declared: VarKind,
        node: VarKind,
    },
    #[error("variable `{variable}` has unknown parent `{parent}`")]
    UnknownParent { variable: String, parent: String },
    #[error("variable `{variable}` lists parent `{parent}` more than once")]
    DuplicateParent { variable: String, parent: String },
    #[error("variable `{variable}` cannot take the utility variable `{parent}` as a parent")]
    UtilityParent { variable: String, parent: String },
    #[error("variable `{variable}` would need {rows} table rows")]
    TableTooLarge { variable: String, rows: u128 },
    #[error("CPT of `{variable}` has no row for {}", fmt_row(.row))]
    IncompleteCpt { variable: String, row: Vec<String> },
    #[error("table of `{variable}` has no entry for {}", fmt_row(.row))]
    IncompleteTable { variable: String, row: Vec<String> },
    #[error("table of `{variable}` has a row {} outside its parents' domains", fmt_row(.row))]
    UnexpectedRow { variable: String, row: Vec<String> },
    #[error("`{variable}` row {} uses value `{value}` outside its domain", fmt_row(.row))]
    ValueOutOfDomain {
        variable: String,
        row: Vec<String>,
        value: String,
    },
    #[error("`{variable}` row {} gives `{value}` probability {} outside [0, 1]", fmt_row(.row), format_rational(.probability))]
    ProbabilityOutOfRange {
        variable: String,
        row: Vec<String>,
        value: String,
        probability: Rational,
    },
    #[error("`{variable}` row {} sums to {}, not 1", fmt_row(.row), format_rational(.sum))]
    NonNormalizedRow {
        variable: String,
        row: Vec<String>,
        sum: Rational,
    },
    #[error("cycle detected: {}", .cycle.join(" -> "))]
    CycleDetected { cycle: Vec<String> },
    #[error("bad designation {role}=`{name}`: {reason}")]
    BadDesignation {
        role: String,
        name: String,
        reason: String,
    },
}

fn fmt_row(row: &[String]) -> String {
    format!("({})", row.join(", "))
}

impl ModelError {
    /// The variable the violation is about, if any.
    pub fn variable(&self) -> Option<&str> {
        use ModelError::*;
        match self {
            DuplicateVariable(v) | EmptyDomain(v) | UtilityDomain(v) | MissingNode(v)
            | DuplicateNode(v) | UndeclaredNode(v) => Some(v),
            DuplicateValue { variable, .. }
            | KindMismatch { variable, .. }
            | UnknownParent { variable, .. }
            | DuplicateParent { variable, .. }
            | UtilityParent { variable, .. }
            | TableTooLarge { variable, .. }
            | IncompleteCpt { variable, .. }
            | IncompleteTable { variable, .. }
            | UnexpectedRow { variable, .. }
            | ValueOutOfDomain { variable, .. }
            | ProbabilityOutOfRange { variable, .. }
            | NonNormalizedRow { variable, .. } => Some(variable),
            CycleDetected { cycle } => cycle.first().map(String::as_str),
            UtilityCount(_) | BadDesignation { .. } => None,
        }
    }
}

/// Every violation found while validating a model.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}", self.0.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; "))]
pub struct ValidationErrors(pub Vec<ModelError>);

impl ValidationErrors {
    pub fn errors(&self) -> &[ModelError] {
        &self.0
    }
}

/// Validates declarations, nodes and designations into a [`Model`].
///
/// All violations are collected; a model is returned only if there are none.
pub fn build_model(
    decls: Vec<VariableDecl>,
    nodes: Vec<Node>,
    designations: Designations,
) -> Result<Model, ValidationErrors> {
    let mut errors = Vec::new();

    let mut declared: BTreeMap<String, VariableDecl> = BTreeMap::new();
    for decl in decls {
        if declared.contains_key(&decl.name) {
            errors.push(ModelError::DuplicateVariable(decl.name.clone()));
            continue;
        }
        if decl.kind == VarKind::Utility {
            if !decl.domain.is_empty() {
                errors.push(ModelError::UtilityDomain(decl.name.clone()));
            }
        } else if decl.domain.is_empty() {
            errors.push(ModelError::EmptyDomain(decl.name.clone()));
        } else {
            let mut seen = BTreeSet::new();
            for v in &decl.domain {
                if !seen.insert(v) {
                    errors.push(ModelError::DuplicateValue {
                        variable: decl.name.clone(),
                        value: v.clone(),
                    });
                }
            }
        }
        declared.insert(decl.name.clone(), decl);
    }
    let utility_count = declared
        .values()
        .filter(|d| d.kind == VarKind::Utility)
        .count();
    if utility_count != 1 {
        errors.push(ModelError::UtilityCount(utility_count));
    }

    let mut by_var: BTreeMap<String, Node> = BTreeMap::new();
    for node in nodes {
        if !declared.contains_key(&node.variable) {
            errors.push(ModelError::UndeclaredNode(node.variable.clone()));
        } else if by_var.contains_key(&node.variable) {
            errors.push(ModelError::DuplicateNode(node.variable.clone()));
        } else {
            by_var.insert(node.variable.clone(), node);
        }
    }
    for name in declared.keys() {
        if !by_var.contains_key(name) {
            errors.push(ModelError::MissingNode(name.clone()));
        }
    }

    let mut variables = BTreeMap::new();
    for (name, node) in &by_var {
        let decl = &declared[name];
        if let Some(var) = validate_node(decl, node, &declared, &mut errors) {
            variables.insert(name.clone(), var);
        }
    }

    // Acyclicity over the edges whose endpoints both exist.
    let edges: BTreeMap<&str, Vec<&str>> = by_var
        .iter()
        .map(|(name, node)| {
            let ps = node
                .parents
                .iter()
                .filter(|p| by_var.contains_key(p.as_str()))
                .map(String::as_str)
                .collect();
            (name.as_str(), ps)
        })
        .collect();
    let order = match topological_order(&edges) {
        Ok(order) => order,
        Err(cycle) => {
            errors.push(ModelError::CycleDetected { cycle });
            Vec::new()
        }
    };

    validate_designations(&designations, &declared, &mut errors);

    if errors.is_empty() {
        Ok(Model {
            name: "untitled".to_string(),
            variables,
            designations,
            order,
        })
    } else {
        Err(ValidationErrors(errors))
    }
}

fn validate_node(
    decl: &VariableDecl,
    node: &Node,
    declared: &BTreeMap<String, VariableDecl>,
    errors: &mut Vec<ModelError>,
) -> Option<Variable> {
    let name = &decl.name;
    let before = errors.len();
    if node.table.kind() != decl.kind {
        errors.push(ModelError::KindMismatch {
            variable: name.clone(),
            declared: decl.kind,
            node: node.table.kind(),
        });
        return None;
    }
    let mut seen = BTreeSet::new();
    let mut parent_domains = Vec::new();
    for p in &node.parents {
        if !seen.insert(p) {
            errors.push(ModelError::DuplicateParent {
                variable: name.clone(),
                parent: p.clone(),
            });
            continue;
        }
        match declared.get(p) {
            None => errors.push(ModelError::UnknownParent {
                variable: name.clone(),
                parent: p.clone(),
            }),
            Some(pd) if pd.kind == VarKind::Utility => errors.push(ModelError::UtilityParent {
                variable: name.clone(),
                parent: p.clone(),
            }),
            Some(pd) => parent_domains.push(pd.domain.clone()),
        }
    }
    if errors.len() > before {
        return None;
    }
    let rows: u128 = parent_domains
        .iter()
        .try_fold(1u128, |acc, d| acc.checked_mul(d.len() as u128))
        .unwrap_or(u128::MAX);
    if rows > MAX_TABLE_ROWS {
        errors.push(ModelError::TableTooLarge {
            variable: name.clone(),
            rows,
        });
        return None;
    }

    let expected: BTreeSet<Vec<String>> = parent_tuples(&parent_domains).into_iter().collect();
    for key in node.table.row_keys() {
        if !expected.contains(key) {
            errors.push(ModelError::UnexpectedRow {
                variable: name.clone(),
                row: key.clone(),
            });
        }
    }

    let body = match &node.table {
        NodeTable::Cpt(table) => {
            let mut dense = BTreeMap::new();
            for row in &expected {
                let Some(dist) = table.get(row) else {
                    errors.push(ModelError::IncompleteCpt {
                        variable: name.clone(),
                        row: row.clone(),
                    });
                    continue;
                };
                let mut probs = vec![Rational::zero(); decl.domain.len()];
                let mut ok = true;
                for (value, p) in dist {
                    let Some(i) = decl.domain.iter().position(|v| v == value) else {
                        errors.push(ModelError::ValueOutOfDomain {
                            variable: name.clone(),
                            row: row.clone(),
                            value: value.clone(),
                        });
                        ok = false;
                        continue;
                    };
                    if *p < Rational::zero() || *p > Rational::one() {
                        errors.push(ModelError::ProbabilityOutOfRange {
                            variable: name.clone(),
                            row: row.clone(),
                            value: value.clone(),
                            probability: p.clone(),
                        });
                        ok = false;
                    }
                    probs[i] = p.clone();
                }
                let sum: Rational = dist.values().cloned().sum();
                if ok && !sum.is_one() {
                    errors.push(ModelError::NonNormalizedRow {
                        variable: name.clone(),
                        row: row.clone(),
                        sum,
                    });
                }
                dense.insert(row.clone(), probs);
            }
            Body::Stochastic(dense)
        }
        NodeTable::Function(table) => {
            for row in &expected {
                match table.get(row) {
                    None => errors.push(ModelError::IncompleteTable {
                        variable: name.clone(),
                        row: row.clone(),
                    }),
                    Some(v) if !decl.domain.contains(v) => {
                        errors.push(ModelError::ValueOutOfDomain {
                            variable: name.clone(),
                            row: row.clone(),
                            value: v.clone(),
                        })
                    }
                    Some(_) => {}
                }
            }
            Body::Deterministic(table.clone())
        }
        NodeTable::Utility(table) => {
            for row in &expected {
                if !table.contains_key(row) {
                    errors.push(ModelError::IncompleteTable {
                        variable: name.clone(),
                        row: row.clone(),
                    });
                }
            }
            Body::Utility(table.clone())
        }
    };
    (errors.len() == before).then(|| Variable {
        name: name.clone(),
        domain: decl.domain.clone(),
        parents: node.parents.clone(),
        body,
    })
}

fn validate_designations(
    d: &Designations,
    declared: &BTreeMap<String, VariableDecl>,
    errors: &mut Vec<ModelError>,
) {
    let bad = |role: &str, name: &str, reason: &str| ModelError::BadDesignation {
        role: role.to_string(),
        name: name.to_string(),
        reason: reason.to_string(),
    };
    let act = declared.get(&d.act);
    match act {
        None => errors.push(bad("act", &d.act, "no such variable")),
        Some(a) if a.kind == VarKind::Utility => errors.push(bad(
            "act",
            &d.act,
            "the act node cannot be the utility node",
        )),
        Some(_) => {}
    }
    match declared.get(&d.value) {
        None => errors.push(bad("value", &d.value, "no such variable")),
        Some(v) if v.kind != VarKind::Utility => {
            errors.push(bad("value", &d.value, "not the utility variable"))
        }
        Some(_) => {}
    }
    let obs = d.obs.as_ref().map(|o| (o, declared.get(o)));
    match obs {
        Some((o, None)) => errors.push(bad("obs", o, "no such variable")),
        Some((o, Some(v))) if v.kind == VarKind::Utility => errors.push(bad(
            "obs",
            o,
            "the observation node cannot be the utility node",
        )),
        _ => {}
    }
    let act_domain = act
        .filter(|a| a.kind != VarKind::Utility)
        .map(|a| &a.domain);
    let mut check_fdt = |role: &str, target: &str| match declared.get(target) {
        None => errors.push(bad(role, target, "no such variable")),
        Some(t) => {
            if let Some(dom) = act_domain {
                if &t.domain != dom || t.kind == VarKind::Utility {
                    errors.push(bad(role, target, "domain differs from the act domain"));
                }
            }
        }
    };
    for (key, target) in &d.fdt {
        check_fdt(&format!("fdt[{key}]"), target);
    }
    if let Some(s) = &d.self_fdt {
        check_fdt("self", s);
    }
    for key in d.fdt.keys() {
        if let ObsKey::Value(v) = key {
            match obs {
                None => errors.push(bad(
                    &format!("fdt[{v}]"),
                    v,
                    "observation key given but no observation node designated",
                )),
                Some((_, Some(o))) if !o.domain.contains(v) => errors.push(bad(
                    &format!("fdt[{v}]"),
                    v,
                    "not a value of the observation node",
                )),
                _ => {}
            }
        }
    }
}

/// Kahn's algorithm with name order as the tie-break. On failure returns one
/// cycle, listed in edge direction and closed (first == last).
fn topological_order(parents: &BTreeMap<&str, Vec<&str>>) -> Result<Vec<String>, Vec<String>> {
    let mut indegree: BTreeMap<&str, usize> =
        parents.iter().map(|(k, ps)| (*k, ps.len())).collect();
    let mut children: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (child, ps) in parents {
        for p in ps {
            children.entry(p).or_default().push(child);
        }
    }
    let mut ready: BTreeSet<&str> = indegree
        .iter()
        .filter(|(_, d)| **d == 0)
        .map(|(k, _)| *k)
        .collect();
    let mut order = Vec::with_capacity(parents.len());
    while let Some(next) = ready.pop_first() {
        order.push(next.to_string());
        for c in children.get(next).into_iter().flatten() {
            let d = indegree.get_mut(c).expect("child indexed");
            *d -= 1;
            if *d == 0 {
                ready.insert(c);
            }
        }
    }
    if order.len() == parents.len() {
        return Ok(order);
    }
    // Every remaining node has a remaining parent; walk parents until a repeat.
    let placed: BTreeSet<&str> = order.iter().map(String::as_str).collect();
    let start = *parents
        .keys()
        .find(|k| !placed.contains(**k))
        .expect("some node is unplaced");
    let mut path = vec![start];
    let mut current = start;
    loop {
        let parent = *parents[current]
            .iter()
            .find(|p| !placed.contains(**p))
            .expect("unplaced node has an unplaced parent");
        if let Some(pos) = path.iter().position(|n| *n == parent) {
            // Each path entry is the parent of the one before it.
            let mut cycle: Vec<String> = path[pos..].iter().rev().map(|s| s.to_string()).collect();
            cycle.push(current.to_string());
            return Err(cycle);
        }
        path.push(parent);
        current = parent;
    }
}

/// Cartesian product of the given domains, first domain varying slowest.
pub fn parent_tuples(domains: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for dom in domains {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                dom.iter().map(move |v| {
                    let mut row = prefix.clone();
                    row.push(v.clone());
                    row
                })
            })
            .collect();
    }
    out
}

impl Model {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn designations(&self) -> &Designations {
        &self.designations
    }

    pub fn variable(&self, name: &str) -> Option<&Variable> {
        self.variables.get(name)
    }

    /// Variables in topological order (ties by name).
    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.order.iter().map(move |n| &self.variables[n])
    }

    pub fn topological_order(&self) -> &[String] {
        &self.order
    }

    pub fn act(&self) -> &Variable {
        &self.variables[&self.designations.act]
    }

    pub fn actions(&self) -> &[String] {
        self.act().domain()
    }

    pub fn utility(&self) -> &Variable {
        &self.variables[&self.designations.value]
    }

    pub fn observation(&self) -> Option<&Variable> {
        self.designations.obs.as_ref().map(|o| &self.variables[o])
    }

    pub fn children(&self, name: &str) -> Vec<&str> {
        self.variables()
            .filter(|v| v.parents.iter().any(|p| p == name))
            .map(|v| v.name())
            .collect()
    }

    /// Domains of a variable's parents, in parent order.
    pub fn parent_domains(&self, var: &Variable) -> Vec<Vec<String>> {
        var.parents
            .iter()
            .map(|p| self.variables[p].domain.clone())
            .collect()
    }

    /// The intervention node for an observation (`None` is `∅`). Falls back to
    /// the self node when no observation is given and `∅` is not mapped.
    pub fn fdt_node(&self, obs: Option<&str>) -> Option<&str> {
        let d = &self.designations;
        d.fdt
            .get(&ObsKey::from_observation(obs))
            .or_else(|| {
                if obs.is_none() {
                    d.self_fdt.as_ref()
                } else {
                    None
                }
            })
            .map(String::as_str)
    }

    /// Observation values with no intervention node. A model with any is
    /// unable to run FDT on those observations.
    pub fn fdt_missing_observations(&self) -> Vec<String> {
        match self.observation() {
            None => Vec::new(),
            Some(obs) => obs
                .domain
                .iter()
                .filter(|v| {
                    !self
                        .designations
                        .fdt
                        .contains_key(&ObsKey::Value((*v).clone()))
                })
                .cloned()
                .collect(),
        }
    }

    /// Declarations, nodes and designations that rebuild this model.
    pub fn to_parts(&self) -> (Vec<VariableDecl>, Vec<Node>, Designations) {
        let (decls, nodes) = self.variables().map(Variable::to_decl_and_node).unzip();
        (decls, nodes, self.designations.clone())
    }

    fn rebuild(
        &self,
        decls: Vec<VariableDecl>,
        nodes: Vec<Node>,
        designations: Designations,
    ) -> Result<Model, ValidationErrors> {
        build_model(decls, nodes, designations).map(|m| m.with_name(self.name.clone()))
    }

    /// Replaces a deterministic node by the equivalent CPT with 0/1 rows.
    pub fn with_degenerate_cpt(&self, name: &str) -> Result<Model, ValidationErrors> {
        let (mut decls, mut nodes, desig) = self.to_parts();
        if let Some(var) = self.variable(name) {
            if let Body::Deterministic(rows) = &var.body {
                let cpt = rows
                    .iter()
                    .map(|(k, out)| {
                        let dist = var
                            .domain
                            .iter()
                            .map(|v| {
                                let p = if v == out {
                                    Rational::one()
                                } else {
                                    Rational::zero()
                                };
                                (v.clone(), p)
                            })
                            .collect();
                        (k.clone(), dist)
                    })
                    .collect();
                for d in decls.iter_mut().filter(|d| d.name == name) {
                    d.kind = VarKind::Stochastic;
                }
                if let Some(n) = nodes.iter_mut().find(|n| n.variable == name) {
                    n.table = NodeTable::Cpt(cpt);
                }
            }
        }
        self.rebuild(decls, nodes, desig)
    }

    /// Applies `f` to every entry of the utility table.
    pub fn map_utility(&self, f: impl Fn(&Rational) -> Rational) -> Model {
        let (decls, mut nodes, desig) = self.to_parts();
        for n in &mut nodes {
            if let NodeTable::Utility(rows) = &mut n.table {
                for v in rows.values_mut() {
                    *v = f(v);
                }
            }
        }
        self.rebuild(decls, nodes, desig)
            .expect("mapping utility values preserves validity")
    }

    /// Replaces the prior of a stochastic root.
    pub fn with_root_prior(
        &self,
        name: &str,
        prior: &BTreeMap<String, Rational>,
    ) -> Result<Model, ValidationErrors> {
        let (decls, mut nodes, desig) = self.to_parts();
        for n in nodes
            .iter_mut()
            .filter(|n| n.variable == name && n.parents.is_empty())
        {
            if let NodeTable::Cpt(rows) = &mut n.table {
                rows.insert(Vec::new(), prior.clone());
            }
        }
        self.rebuild(decls, nodes, desig)
    }

    pub(crate) fn replace_node(
        &self,
        node: Node,
        kind: VarKind,
    ) -> Result<Model, ValidationErrors> {
        let (mut decls, mut nodes, desig) = self.to_parts();
        for d in decls.iter_mut().filter(|d| d.name == node.variable) {
            d.kind = kind;
        }
        for n in nodes.iter_mut().filter(|n| n.variable == node.variable) {
            *n = node.clone();
        }
        self.rebuild(decls, nodes, desig)
    }
}

/// Incremental model construction with closure-defined tables. Parents must
/// be added before their children.
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    name: String,
    decls: Vec<VariableDecl>,
    nodes: Vec<Node>,
    designations: Designations,
}

impl ModelBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        ModelBuilder {
            name: name.into(),
            decls: Vec::new(),
            nodes: Vec::new(),
            designations: Designations::new("Act", "V"),
        }
    }

    fn domains_of(&self, parents: &[&str]) -> Vec<Vec<String>> {
        parents
            .iter()
            .map(|p| {
                self.decls
                    .iter()
                    .find(|d| d.name == *p)
                    .map(|d| d.domain.clone())
                    .unwrap_or_else(|| panic!("parent `{p}` must be added first"))
            })
            .collect()
    }

    fn rows<T>(&self, parents: &[&str], f: impl Fn(&[&str]) -> T) -> BTreeMap<Vec<String>, T> {
        parent_tuples(&self.domains_of(parents))
            .into_iter()
            .map(|row| {
                let refs: Vec<&str> = row.iter().map(String::as_str).collect();
                let out = f(&refs);
                (row, out)
            })
            .collect()
    }

    fn push(mut self, decl: VariableDecl, parents: &[&str], table: NodeTable) -> Self {
        self.nodes.push(Node {
            variable: decl.name.clone(),
            parents: parents.iter().map(|p| p.to_string()).collect(),
            table,
        });
        self.decls.push(decl);
        self
    }

    /// Stochastic root; `probs` is aligned with `domain`.
    pub fn root(self, name: &str, domain: &[&str], probs: &[Rational]) -> Self {
        self.cpt(name, domain, &[], |_| probs.to_vec())
    }

    pub fn cpt(
        self,
        name: &str,
        domain: &[&str],
        parents: &[&str],
        f: impl Fn(&[&str]) -> Vec<Rational>,
    ) -> Self {
        let rows = self.rows(parents, |row| {
            domain.iter().map(|v| v.to_string()).zip(f(row)).collect()
        });
        self.push(
            VariableDecl::new(name, domain, VarKind::Stochastic),
            parents,
            NodeTable::Cpt(rows),
        )
    }

    pub fn det(
        self,
        name: &str,
        domain: &[&str],
        parents: &[&str],
        f: impl Fn(&[&str]) -> String,
    ) -> Self {
        let rows = self.rows(parents, f);
        self.push(
            VariableDecl::new(name, domain, VarKind::Deterministic),
            parents,
            NodeTable::Function(rows),
        )
    }

    /// Deterministic node of one parent given as `(input, output)` pairs.
    pub fn map(self, name: &str, domain: &[&str], parent: &str, pairs: &[(&str, &str)]) -> Self {
        let pairs: Vec<(String, String)> = pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        self.det(name, domain, &[parent], move |row| {
            pairs
                .iter()
                .find(|(a, _)| a == row[0])
                .map(|(_, b)| b.clone())
                .unwrap_or_else(|| panic!("no mapping for `{}`", row[0]))
        })
    }

    pub fn utility(self, name: &str, parents: &[&str], f: impl Fn(&[&str]) -> Rational) -> Self {
        let rows = self.rows(parents, f);
        self.push(
            VariableDecl::utility(name),
            parents,
            NodeTable::Utility(rows),
        )
    }

    pub fn act(mut self, name: &str) -> Self {
        self.designations.act = name.to_string();
        self
    }

    pub fn value(mut self, name: &str) -> Self {
        self.designations.value = name.to_string();
        self
    }

    pub fn obs(mut self, name: &str) -> Self {
        self.designations.obs = Some(name.to_string());
        self
    }

    /// Maps an observation (`None` for `∅`) to its intervention node.
    pub fn fdt(mut self, obs: Option<&str>, node: &str) -> Self {
        self.designations
            .fdt
            .insert(ObsKey::from_observation(obs), node.to_string());
        self
    }

    pub fn self_fdt(mut self, node: &str) -> Self {
        self.designations.self_fdt = Some(node.to_string());
        self
    }

    pub fn build(self) -> Result<Model, ValidationErrors> {
        let name = self.name;
        build_model(self.decls, self.nodes, self.designations).map(|m| m.with_name(name))
    }
}

/// A renaming of variables and of symbolic values. Value renames apply in
/// every domain where the value occurs. Names not mentioned are unchanged.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Renaming {
    pub variables: BTreeMap<String, String>,
    pub values: BTreeMap<String, String>,
}

impl Renaming {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn variable(mut self, from: &str, to: &str) -> Self {
        self.variables.insert(from.to_string(), to.to_string());
        self
    }

    pub fn value(mut self, from: &str, to: &str) -> Self {
        self.values.insert(from.to_string(), to.to_string());
        self
    }

    pub fn apply_variable(&self, name: &str) -> String {
        self.variables
            .get(name)
            .cloned()
            .unwrap_or_else(|| name.to_string())
    }

    pub fn apply_value(&self, value: &str) -> String {
        self.values
            .get(value)
            .cloned()
            .unwrap_or_else(|| value.to_string())
    }

    fn apply_row(&self, row: &[String]) -> Vec<String> {
        row.iter().map(|v| self.apply_value(v)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RenameError {
    #[error("renaming is not a bijection: {0}")]
    NonBijectiveMapping(String),
    #[error("renaming mentions unknown name `{0}`")]
    UnknownName(String),
}

/// Substitutes variable names and values throughout a model.
pub fn rename(model: &Model, mapping: &Renaming) -> Result<Model, RenameError> {
    for from in mapping.variables.keys() {
        if model.variable(from).is_none() {
            return Err(RenameError::UnknownName(from.clone()));
        }
    }
    for from in mapping.values.keys() {
        if !model.variables().any(|v| v.domain.contains(from)) {
            return Err(RenameError::UnknownName(from.clone()));
        }
    }
    injective(&mapping.variables)?;
    injective(&mapping.values)?;

    let renamed_vars: BTreeSet<String> = model
        .variables()
        .map(|v| mapping.apply_variable(v.name()))
        .collect();
    if renamed_vars.len() != model.variables.len() {
        return Err(RenameError::NonBijectiveMapping(
            "two variables would share a name".into(),
        ));
    }
    for var in model.variables() {
        let renamed: BTreeSet<String> = var.domain.iter().map(|v| mapping.apply_value(v)).collect();
        if renamed.len() != var.domain.len() {
            return Err(RenameError::NonBijectiveMapping(format!(
                "two values of `{}` would coincide",
                var.name
            )));
        }
    }

    let (decls, nodes, desig) = model.to_parts();
    let decls = decls
        .into_iter()
        .map(|d| VariableDecl {
            name: mapping.apply_variable(&d.name),
            domain: mapping.apply_row(&d.domain),
            kind: d.kind,
        })
        .collect();
    let nodes = nodes
        .into_iter()
        .map(|n| {
            let table = match n.table {
                NodeTable::Cpt(rows) => NodeTable::Cpt(
                    rows.into_iter()
                        .map(|(k, dist)| {
                            let dist = dist
                                .into_iter()
                                .map(|(v, p)| (mapping.apply_value(&v), p))
                                .collect();
                            (mapping.apply_row(&k), dist)
                        })
                        .collect(),
                ),
                NodeTable::Function(rows) => NodeTable::Function(
                    rows.into_iter()
                        .map(|(k, v)| (mapping.apply_row(&k), mapping.apply_value(&v)))
                        .collect(),
                ),
                NodeTable::Utility(rows) => NodeTable::Utility(
                    rows.into_iter()
                        .map(|(k, u)| (mapping.apply_row(&k), u))
                        .collect(),
                ),
            };
            Node {
                variable: mapping.apply_variable(&n.variable),
                parents: n
                    .parents
                    .iter()
                    .map(|p| mapping.apply_variable(p))
                    .collect(),
                table,
            }
        })
        .collect();
    let designations = Designations {
        act: mapping.apply_variable(&desig.act),
        obs: desig.obs.as_deref().map(|o| mapping.apply_variable(o)),
        value: mapping.apply_variable(&desig.value),
        fdt: desig
            .fdt
            .iter()
            .map(|(k, t)| {
                let k = match k {
                    ObsKey::Empty => ObsKey::Empty,
                    ObsKey::Value(v) => ObsKey::Value(mapping.apply_value(v)),
                };
                (k, mapping.apply_variable(t))
            })
            .collect(),
        self_fdt: desig.self_fdt.as_deref().map(|s| mapping.apply_variable(s)),
    };
    model
        .rebuild(decls, nodes, designations)
        .map_err(|e| RenameError::NonBijectiveMapping(e.to_string()))
}

fn injective(map: &BTreeMap<String, String>) -> Result<(), RenameError> {
    let mut targets = BTreeMap::new();
    for (from, to) in map {
        if let Some(prev) = targets.insert(to, from) {
            return Err(RenameError::NonBijectiveMapping(format!(
                "`{prev}` and `{from}` both map to `{to}`"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn half() -> Vec<Rational> {
        vec![rat(1, 2), rat(1, 2)]
    }

    fn small() -> ModelBuilder {
        ModelBuilder::new("small")
            .root("Act", &["a", "b"], &half())
            .map("Out", &["x", "y"], "Act", &[("a", "x"), ("b", "y")])
            .utility("V", &["Out"], |r| if r[0] == "x" { int(1) } else { int(0) })
    }

    fn errors_of(r: Result<Model, ValidationErrors>) -> Vec<ModelError> {
        r.expect_err("model should be rejected").0
    }

    #[test]
    fn valid_small_model() {
        let m = small().build().unwrap();
        assert_eq!(m.topological_order(), ["Act", "Out", "V"]);
        assert_eq!(m.actions(), ["a", "b"]);
        assert_eq!(m.children("Act"), ["Out"]);
    }

    #[test]
    fn trivial_single_utility_model() {
        let m = ModelBuilder::new("trivial")
            .root("Act", &["only"], &[int(1)])
            .utility("V", &[], |_| int(0))
            .build()
            .unwrap();
        assert_eq!(m.utility().utility_value(&[]), Some(&int(0)));
    }

    #[test]
    fn two_cycle_is_named() {
        let (decls, mut nodes, desig) = small().build().unwrap().to_parts();
        let act = nodes.iter_mut().find(|n| n.variable == "Act").unwrap();
        act.parents = vec!["Out".into()];
        act.table = NodeTable::Cpt(
            [("x", half()), ("y", half())]
                .into_iter()
                .map(|(k, p)| {
                    (
                        vec![k.to_string()],
                        vec![
                            ("a".to_string(), p[0].clone()),
                            ("b".to_string(), p[1].clone()),
                        ]
                        .into_iter()
                        .collect(),
                    )
                })
                .collect(),
        );
        let errs = errors_of(build_model(decls, nodes, desig));
        let ModelError::CycleDetected { cycle } = &errs[0] else {
            panic!("{errs:?}")
        };
        assert_eq!(cycle.first(), cycle.last());
        assert!(cycle.contains(&"Act".to_string()) && cycle.contains(&"Out".to_string()));
    }

    #[test]
    fn missing_cpt_row() {
        let (decls, mut nodes, desig) = ModelBuilder::new("m")
            .root("Act", &["a", "b"], &half())
            .cpt("C", &["u", "v"], &["Act"], |_| half())
            .utility("V", &["C"], |_| int(0))
            .build()
            .unwrap()
            .to_parts();
        for n in &mut nodes {
            if let NodeTable::Cpt(rows) = &mut n.table {
                rows.remove(&vec!["b".to_string()]);
            }
        }
        assert_eq!(
            errors_of(build_model(decls, nodes, desig)),
            vec![ModelError::IncompleteCpt {
                variable: "C".into(),
                row: vec!["b".into()]
            }]
        );
    }

    #[test]
    fn non_normalized_row_reports_sum() {
        let r = ModelBuilder::new("m")
            .root("Act", &["a", "b"], &[rat(1, 2), rat(51, 100)])
            .utility("V", &[], |_| int(0))
            .build();
        assert_eq!(
            errors_of(r),
            vec![ModelError::NonNormalizedRow {
                variable: "Act".into(),
                row: vec![],
                sum: rat(101, 100)
            }]
        );
    }

    #[test]
    fn probability_out_of_range() {
        let r = ModelBuilder::new("m")
            .root("Act", &["a", "b"], &[rat(3, 2), rat(-1, 2)])
            .utility("V", &[], |_| int(0))
            .build();
        let errs = errors_of(r);
        assert_eq!(errs.len(), 2);
        assert!(errs
            .iter()
            .all(|e| matches!(e, ModelError::ProbabilityOutOfRange { .. })));
    }

    #[test]
    fn det_output_outside_domain() {
        let r = ModelBuilder::new("m")
            .root("Act", &["a", "b"], &half())
            .det("Out", &["x"], &["Act"], |_| "z".into())
            .utility("V", &["Out"], |_| int(0))
            .build();
        assert!(matches!(
            errors_of(r)[0],
            ModelError::ValueOutOfDomain { .. }
        ));
    }

    #[test]
    fn bad_designations() {
        let r = small().act("Nope").build();
        assert!(
            matches!(&errors_of(r)[0], ModelError::BadDesignation { role, .. } if role == "act")
        );
        let r = small().value("Out").build();
        assert!(
            matches!(&errors_of(r)[0], ModelError::BadDesignation { role, .. } if role == "value")
        );
        // fdt target with a domain different from the act domain
        let r = small().fdt(None, "Out").build();
        assert!(
            matches!(&errors_of(r)[0], ModelError::BadDesignation { reason, .. } if reason.contains("domain"))
        );
        // observation key without an observation node
        let r = small().fdt(Some("x"), "Act").build();
        assert!(matches!(
            &errors_of(r)[0],
            ModelError::BadDesignation { .. }
        ));
    }

    #[test]
    fn structural_violations() {
        let (decls, nodes, desig) = small().build().unwrap().to_parts();

        let mut d = decls.clone();
        d.push(d[0].clone());
        assert!(errors_of(build_model(d, nodes.clone(), desig.clone()))
            .contains(&ModelError::DuplicateVariable("Act".into())));

        let mut d = decls.clone();
        d[1].domain.push("x".into());
        assert!(errors_of(build_model(d, nodes.clone(), desig.clone()))
            .iter()
            .any(|e| matches!(e, ModelError::DuplicateValue { .. })));

        let mut d = decls.clone();
        d[0].domain.clear();
        assert!(errors_of(build_model(d, nodes.clone(), desig.clone()))
            .contains(&ModelError::EmptyDomain("Act".into())));

        let mut n = nodes.clone();
        n.remove(1);
        assert!(errors_of(build_model(decls.clone(), n, desig.clone()))
            .contains(&ModelError::MissingNode("Out".into())));

        let mut n = nodes.clone();
        n[1].parents = vec!["Ghost".into()];
        assert!(errors_of(build_model(decls.clone(), n, desig.clone()))
            .iter()
            .any(|e| matches!(e, ModelError::UnknownParent { .. })));

        let mut d = decls.clone();
        d.push(VariableDecl::utility("W"));
        let mut n = nodes.clone();
        n.push(Node {
            variable: "W".into(),
            parents: vec![],
            table: NodeTable::Utility([(vec![], int(0))].into_iter().collect()),
        });
        assert!(errors_of(build_model(d, n, desig.clone())).contains(&ModelError::UtilityCount(2)));

        let mut n = nodes.clone();
        n[1].parents = vec!["V".into()];
        assert!(errors_of(build_model(decls.clone(), n, desig.clone()))
            .iter()
            .any(|e| matches!(e, ModelError::UtilityParent { .. })));

        let mut d = decls.clone();
        d[1].kind = VarKind::Stochastic;
        assert!(errors_of(build_model(d, nodes.clone(), desig.clone()))
            .iter()
            .any(|e| matches!(e, ModelError::KindMismatch { .. })));

        let mut n = nodes.clone();
        if let NodeTable::Function(rows) = &mut n[1].table {
            rows.insert(vec!["c".into()], "x".into());
        }
        assert!(errors_of(build_model(decls.clone(), n, desig.clone()))
            .iter()
            .any(|e| matches!(e, ModelError::UnexpectedRow { .. })));
    }

    #[test]
    fn rename_identity_and_swap() {
        let m = small().build().unwrap();
        assert_eq!(rename(&m, &Renaming::new()).unwrap(), m);
        let swapped = rename(&m, &Renaming::new().value("a", "b").value("b", "a")).unwrap();
        assert_eq!(swapped.actions(), ["b", "a"]);
        assert_eq!(
            swapped
                .variable("Out")
                .unwrap()
                .function_value(&["b".into()]),
            Some("x")
        );
    }

    #[test]
    fn rename_errors() {
        let m = small().build().unwrap();
        assert_eq!(
            rename(&m, &Renaming::new().variable("Ghost", "G")),
            Err(RenameError::UnknownName("Ghost".into()))
        );
        assert!(matches!(
            rename(&m, &Renaming::new().value("a", "z").value("b", "z")),
            Err(RenameError::NonBijectiveMapping(_))
        ));
        assert!(matches!(
            rename(&m, &Renaming::new().value("a", "b")),
            Err(RenameError::NonBijectiveMapping(_))
        ));
        assert!(matches!(
            rename(&m, &Renaming::new().variable("Act", "Out")),
            Err(RenameError::NonBijectiveMapping(_))
        ));
    }

    #[test]
    fn degenerate_cpt_conversion() {
        let m = small().build().unwrap();
        let s = m.with_degenerate_cpt("Out").unwrap();
        let out = s.variable("Out").unwrap();
        assert_eq!(out.kind(), VarKind::Stochastic);
        assert_eq!(out.cpt_row(&["b".into()]).unwrap(), &[int(0), int(1)]);
    }
}
