//! Random models for property tests.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::model::{
    build_model, parent_tuples, Designations, Model, Node, NodeTable, ObsKey, VarKind, VariableDecl,
};
use crate::rational::{int, rat, Rational};

#[derive(Debug, Clone, Copy)]
pub struct GenConfig {
    /// Non-utility variables, at least one.
    pub max_vars: usize,
    pub max_domain: usize,
    pub max_parents: usize,
    /// Allow zero entries in CPT rows.
    pub zeros: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            max_vars: 5,
            max_domain: 3,
            max_parents: 2,
            zeros: true,
        }
    }
}

/// A distribution over `n` values with small denominators. Strictly positive
/// unless `zeros` is set.
pub fn random_distribution(rng: &mut impl Rng, n: usize, zeros: bool) -> Vec<Rational> {
    let low = if zeros { 0 } else { 1 };
    loop {
        let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(low..=4)).collect();
        let total: i64 = weights.iter().sum();
        if total > 0 {
            return weights.iter().map(|w| rat(*w, total)).collect();
        }
    }
}

fn random_utility(rng: &mut impl Rng) -> Rational {
    rat(rng.gen_range(-20..=20), rng.gen_range(1..=3))
}

struct Draft {
    decls: Vec<VariableDecl>,
    nodes: Vec<Node>,
}

impl Draft {
    fn domain(&self, name: &str) -> Vec<String> {
        self.decls
            .iter()
            .find(|d| d.name == name)
            .unwrap()
            .domain
            .clone()
    }

    fn rows(&self, parents: &[String]) -> Vec<Vec<String>> {
        let domains: Vec<Vec<String>> = parents.iter().map(|p| self.domain(p)).collect();
        parent_tuples(&domains)
    }

    fn stochastic(
        &mut self,
        rng: &mut impl Rng,
        name: &str,
        domain: Vec<String>,
        parents: Vec<String>,
        zeros: bool,
    ) {
        let table = self
            .rows(&parents)
            .into_iter()
            .map(|row| {
                let probs = random_distribution(rng, domain.len(), zeros);
                (row, domain.iter().cloned().zip(probs).collect())
            })
            .collect();
        self.push(
            name,
            domain,
            VarKind::Stochastic,
            parents,
            NodeTable::Cpt(table),
        );
    }

    fn deterministic(
        &mut self,
        rng: &mut impl Rng,
        name: &str,
        domain: Vec<String>,
        parents: Vec<String>,
    ) {
        let table = self
            .rows(&parents)
            .into_iter()
            .map(|row| (row, domain.choose(rng).unwrap().clone()))
            .collect();
        self.push(
            name,
            domain,
            VarKind::Deterministic,
            parents,
            NodeTable::Function(table),
        );
    }

    fn utility(&mut self, rng: &mut impl Rng, parents: Vec<String>) {
        let table = self
            .rows(&parents)
            .into_iter()
            .map(|row| (row, random_utility(rng)))
            .collect();
        self.push(
            "V",
            Vec::new(),
            VarKind::Utility,
            parents,
            NodeTable::Utility(table),
        );
    }

    fn push(
        &mut self,
        name: &str,
        domain: Vec<String>,
        kind: VarKind,
        parents: Vec<String>,
        table: NodeTable,
    ) {
        self.decls.push(VariableDecl {
            name: name.to_string(),
            domain,
            kind,
        });
        self.nodes.push(Node {
            variable: name.to_string(),
            parents,
            table,
        });
    }

    /// Random non-utility variable over `existing` parents.
    fn random_var(&mut self, rng: &mut impl Rng, cfg: &GenConfig, name: &str, existing: &[String]) {
        let size = rng.gen_range(1..=cfg.max_domain);
        let domain: Vec<String> = (0..size).map(|i| format!("v{i}")).collect();
        let parents = pick(rng, existing, cfg.max_parents);
        if !parents.is_empty() && rng.gen_bool(0.4) {
            self.deterministic(rng, name, domain, parents);
        } else {
            self.stochastic(rng, name, domain, parents, cfg.zeros);
        }
    }
}

fn pick(rng: &mut impl Rng, from: &[String], max: usize) -> Vec<String> {
    let k = rng.gen_range(0..=max.min(from.len()));
    let mut chosen: Vec<String> = from.choose_multiple(rng, k).cloned().collect();
    chosen.sort_by_key(|p| from.iter().position(|q| q == p));
    chosen
}

/// A random valid model. Variables are `X0, X1, ..` plus the utility `V`;
/// one of them is the act, possibly another the observation, and the act
/// (or an equally-shaped variable) is the `∅` intervention node.
pub fn random_model(rng: &mut impl Rng, cfg: &GenConfig) -> Model {
    let n = rng.gen_range(1..=cfg.max_vars.max(1));
    let mut draft = Draft {
        decls: Vec::new(),
        nodes: Vec::new(),
    };
    let mut names: Vec<String> = Vec::new();
    for i in 0..n {
        let name = format!("X{i}");
        draft.random_var(rng, cfg, &name, &names);
        names.push(name);
    }
    let uparents = pick(rng, &names, 3);
    draft.utility(rng, uparents);

    let act = names.choose(rng).unwrap().clone();
    let mut d = Designations::new(act.clone(), "V");
    let others: Vec<&String> = names.iter().filter(|n| **n != act).collect();
    if !others.is_empty() && rng.gen_bool(0.3) {
        d.obs = Some((*others.choose(rng).unwrap()).clone());
    }
    let act_domain = draft.domain(&act);
    let same_shape: Vec<&String> = names
        .iter()
        .filter(|n| draft.domain(n) == act_domain)
        .collect();
    d.fdt
        .insert(ObsKey::Empty, (*same_shape.choose(rng).unwrap()).clone());
    build_model(draft.decls, draft.nodes, d)
        .expect("generated models are valid")
        .with_name(format!("random{n}"))
}

/// A random model meeting [`crate::theories::agreement_condition`], with a
/// strictly positive act prior and no observation.
pub fn random_agreement_model(rng: &mut impl Rng, cfg: &GenConfig) -> Model {
    let mut draft = Draft {
        decls: Vec::new(),
        nodes: Vec::new(),
    };
    let size = rng.gen_range(1..=cfg.max_domain.max(1));
    let actions: Vec<String> = (0..size).map(|i| format!("a{i}")).collect();
    let through_fdt = rng.gen_bool(0.5);
    let fdt = if through_fdt {
        draft.stochastic(rng, "F", actions.clone(), Vec::new(), false);
        let copy = actions
            .iter()
            .map(|a| (vec![a.clone()], a.clone()))
            .collect();
        draft.push(
            "Act",
            actions,
            VarKind::Deterministic,
            vec!["F".into()],
            NodeTable::Function(copy),
        );
        "F"
    } else {
        draft.stochastic(rng, "Act", actions, Vec::new(), false);
        "Act"
    };
    // Other roots are independent of the act; descendants may depend on it.
    let mut names = vec!["Act".to_string()];
    let n = rng.gen_range(0..cfg.max_vars);
    for i in 0..n {
        let name = format!("X{i}");
        draft.random_var(rng, cfg, &name, &names);
        names.push(name);
    }
    let uparents = pick(rng, &names, 3);
    draft.utility(rng, uparents);
    let mut d = Designations::new("Act", "V");
    d.fdt.insert(ObsKey::Empty, fdt.to_string());
    build_model(draft.decls, draft.nodes, d)
        .expect("generated models are valid")
        .with_name("agreement")
}

/// Random names, including ones that need quoting in the text format.
pub fn random_label(rng: &mut impl Rng) -> String {
    const POOL: [&str; 10] = [
        "a",
        "b_1",
        "x.y",
        "-z",
        "two words",
        "q\"uote",
        "∅",
        "ünï",
        "1/2",
        "tab\t",
    ];
    let mut s = POOL.choose(rng).unwrap().to_string();
    if rng.gen_bool(0.5) {
        s.push_str(&rng.gen_range(0..100).to_string());
    }
    s
}

/// Applies random labels to every variable and value of a model.
pub fn relabel(rng: &mut impl Rng, model: &Model) -> Model {
    let mut renaming = crate::model::Renaming::new();
    let mut used = BTreeMap::new();
    for var in model.variables() {
        let fresh = unique(rng, &mut used);
        renaming = renaming.variable(var.name(), &fresh);
    }
    let mut values: Vec<&String> = model.variables().flat_map(|v| v.domain()).collect();
    values.sort();
    values.dedup();
    for v in values {
        let fresh = unique(rng, &mut used);
        renaming = renaming.value(v, &fresh);
    }
    crate::model::rename(model, &renaming).expect("fresh labels are distinct")
}

fn unique(rng: &mut impl Rng, used: &mut BTreeMap<String, ()>) -> String {
    loop {
        let s = random_label(rng);
        if used.insert(s.clone(), ()).is_none() {
            return s;
        }
    }
}

/// `a * u + b` for a random positive `a` and any `b`.
pub fn random_affine(rng: &mut impl Rng) -> (Rational, Rational) {
    (
        rat(rng.gen_range(1..=9), rng.gen_range(1..=4)),
        int(rng.gen_range(-50..=50)),
    )
}
