//! Exact inference by enumerating joint assignments.
//!
//! Worlds are enumerated depth-first in topological order. Stochastic nodes
//! branch on their nonzero CPT entries, deterministic nodes are computed, and
//! evidence prunes as soon as the constrained variable is reached. The output
//! order is fully determined by the model, so results are reproducible.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::model::{Body, Model, Variable};
use crate::rational::{format_rational, Rational};

/// Default bound on the number of stochastic branch combinations.
pub const DEFAULT_MAX_WORLDS: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Symbol(String),
    Number(Rational),
}

impl Value {
    pub fn symbol(s: &str) -> Self {
        Value::Symbol(s.to_string())
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Value::Symbol(s) => Some(s),
            Value::Number(_) => None,
        }
    }

    pub fn as_number(&self) -> Option<&Rational> {
        match self {
            Value::Number(n) => Some(n),
            Value::Symbol(_) => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Symbol(s) => f.write_str(s),
            Value::Number(n) => f.write_str(&format_rational(n)),
        }
    }
}

pub type Assignment = BTreeMap<String, Value>;

/// Builds symbolic evidence from `(variable, value)` pairs.
pub fn evidence(pairs: &[(&str, &str)]) -> Assignment {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), Value::symbol(v)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InferError {
    #[error("world does not assign `{0}`")]
    PartialWorld(String),
    #[error("`{value}` is not a value of `{variable}`")]
    ValueOutOfDomain { variable: String, value: String },
    #[error("no variable named `{0}`")]
    UnknownVariable(String),
    #[error("evidence has probability zero")]
    ZeroProbabilityEvidence,
    #[error("`{0}` is not numeric")]
    NonNumericVariable(String),
    #[error("model has {worlds} stochastic branch combinations, above the limit of {limit}")]
    TooManyWorlds { worlds: u128, limit: u128 },
}

/// Worlds with their weights. Unnormalized weights sum to the probability
/// of the evidence they were enumerated under.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct WeightedWorlds {
    pub worlds: Vec<(Assignment, Rational)>,
}

impl WeightedWorlds {
    pub fn total(&self) -> Rational {
        self.worlds.iter().map(|(_, w)| w.clone()).sum()
    }

    pub fn len(&self) -> usize {
        self.worlds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.worlds.is_empty()
    }

    /// Rescales weights to sum to one.
    pub fn normalized(&self) -> Result<WeightedWorlds, InferError> {
        let total = self.total();
        if total.is_zero() {
            return Err(InferError::ZeroProbabilityEvidence);
        }
        Ok(WeightedWorlds {
            worlds: self
                .worlds
                .iter()
                .map(|(a, w)| (a.clone(), w / &total))
                .collect(),
        })
    }

    /// Total weight of worlds where `variable` takes `value`.
    pub fn probability(&self, variable: &str, value: &str) -> Rational {
        self.worlds
            .iter()
            .filter(|(a, _)| a.get(variable).and_then(Value::as_symbol) == Some(value))
            .map(|(_, w)| w.clone())
            .sum()
    }
}

/// Product of the CPT entries along a total world. Deterministic nodes and
/// the utility node contribute an indicator; the utility value may be omitted.
pub fn joint_probability(model: &Model, world: &Assignment) -> Result<Rational, InferError> {
    for name in world.keys() {
        if model.variable(name).is_none() {
            return Err(InferError::UnknownVariable(name.clone()));
        }
    }
    let mut p = Rational::one();
    for var in model.variables() {
        let Some(value) = world.get(var.name()) else {
            if var.is_utility() {
                continue;
            }
            return Err(InferError::PartialWorld(var.name().to_string()));
        };
        check_type(var, value)?;
        let mut row = Vec::with_capacity(var.parents().len());
        for parent in var.parents() {
            match world.get(parent) {
                Some(Value::Symbol(s)) => row.push(s.clone()),
                _ => return Err(InferError::PartialWorld(parent.clone())),
            }
        }
        let factor = match (var.body(), value) {
            (Body::Stochastic(_), Value::Symbol(s)) => {
                let i = var.index_of(s).expect("checked above");
                var.cpt_row(&row).expect("total CPT")[i].clone()
            }
            (Body::Deterministic(_), Value::Symbol(s)) => {
                indicator(var.function_value(&row) == Some(s.as_str()))
            }
            (Body::Utility(_), Value::Number(n)) => indicator(var.utility_value(&row) == Some(n)),
            _ => unreachable!("type checked"),
        };
        if factor.is_zero() {
            return Ok(factor);
        }
        p *= factor;
    }
    Ok(p)
}

fn indicator(b: bool) -> Rational {
    if b {
        Rational::one()
    } else {
        Rational::zero()
    }
}

fn check_type(var: &Variable, value: &Value) -> Result<(), InferError> {
    let ok = match value {
        Value::Symbol(s) => !var.is_utility() && var.index_of(s).is_some(),
        Value::Number(_) => var.is_utility(),
    };
    if ok {
        Ok(())
    } else {
        Err(InferError::ValueOutOfDomain {
            variable: var.name().to_string(),
            value: value.to_string(),
        })
    }
}

/// All worlds consistent with `evidence` that have nonzero probability,
/// with unnormalized weights. Worlds include the utility value.
pub fn enumerate_worlds(
    model: &Model,
    evidence: &Assignment,
) -> Result<WeightedWorlds, InferError> {
    enumerate_worlds_with_limit(model, evidence, DEFAULT_MAX_WORLDS)
}

pub fn enumerate_worlds_with_limit(
    model: &Model,
    evidence: &Assignment,
    limit: u128,
) -> Result<WeightedWorlds, InferError> {
    for (name, value) in evidence {
        let var = model
            .variable(name)
            .ok_or_else(|| InferError::UnknownVariable(name.clone()))?;
        check_type(var, value)?;
    }
    let branching: u128 = model
        .variables()
        .filter(|v| matches!(v.body(), Body::Stochastic(_)))
        .try_fold(1u128, |acc, v| acc.checked_mul(v.domain().len() as u128))
        .unwrap_or(u128::MAX);
    if branching > limit {
        return Err(InferError::TooManyWorlds {
            worlds: branching,
            limit,
        });
    }

    let vars: Vec<&Variable> = model.variables().collect();
    let mut out = Vec::new();
    let mut current: Vec<Value> = Vec::with_capacity(vars.len());
    let index: BTreeMap<&str, usize> = vars
        .iter()
        .enumerate()
        .map(|(i, v)| (v.name(), i))
        .collect();
    let parent_idx: Vec<Vec<usize>> = vars
        .iter()
        .map(|v| v.parents().iter().map(|p| index[p.as_str()]).collect())
        .collect();
    let ctx = Ctx {
        vars: &vars,
        parent_idx: &parent_idx,
        evidence,
    };
    ctx.descend(0, Rational::one(), &mut current, &mut out);
    Ok(WeightedWorlds { worlds: out })
}

struct Ctx<'a> {
    vars: &'a [&'a Variable],
    parent_idx: &'a [Vec<usize>],
    evidence: &'a Assignment,
}

impl Ctx<'_> {
    fn descend(
        &self,
        depth: usize,
        weight: Rational,
        current: &mut Vec<Value>,
        out: &mut Vec<(Assignment, Rational)>,
    ) {
        if depth == self.vars.len() {
            let world = self
                .vars
                .iter()
                .zip(current.iter())
                .map(|(v, x)| (v.name().to_string(), x.clone()))
                .collect();
            out.push((world, weight));
            return;
        }
        let var = self.vars[depth];
        let row: Vec<String> = self.parent_idx[depth]
            .iter()
            .map(|&i| match &current[i] {
                Value::Symbol(s) => s.clone(),
                Value::Number(_) => unreachable!("utility is never a parent"),
            })
            .collect();
        let observed = self.evidence.get(var.name());
        let mut visit = |value: Value, w: Rational, current: &mut Vec<Value>| {
            if observed.is_some_and(|o| *o != value) {
                return;
            }
            current.push(value);
            self.descend(depth + 1, w, current, out);
            current.pop();
        };
        match var.body() {
            Body::Stochastic(_) => {
                let probs = var.cpt_row(&row).expect("total CPT");
                for (value, p) in var.domain().iter().zip(probs) {
                    if !p.is_zero() {
                        visit(Value::Symbol(value.clone()), &weight * p, current);
                    }
                }
            }
            Body::Deterministic(_) => {
                let value = var.function_value(&row).expect("total table");
                visit(Value::Symbol(value.to_string()), weight, current);
            }
            Body::Utility(_) => {
                let value = var.utility_value(&row).expect("total table");
                visit(Value::Number(value.clone()), weight, current);
            }
        }
    }
}

/// Worlds consistent with `evidence`, renormalized to sum to one.
pub fn condition(model: &Model, evidence: &Assignment) -> Result<WeightedWorlds, InferError> {
    enumerate_worlds(model, evidence)?.normalized()
}

/// Weighted sum of a numeric variable over the worlds.
pub fn expectation(worlds: &WeightedWorlds, variable: &str) -> Result<Rational, InferError> {
    let mut sum = Rational::zero();
    for (world, w) in &worlds.worlds {
        match world.get(variable) {
            Some(Value::Number(n)) => sum += w * n,
            Some(Value::Symbol(_)) => {
                return Err(InferError::NonNumericVariable(variable.to_string()))
            }
            None => return Err(InferError::UnknownVariable(variable.to_string())),
        }
    }
    Ok(sum)
}

/// Prior marginal of a symbolic variable, aligned with its domain.
pub fn marginal(model: &Model, variable: &str) -> Result<Vec<(String, Rational)>, InferError> {
    let var = model
        .variable(variable)
        .ok_or_else(|| InferError::UnknownVariable(variable.to_string()))?;
    if var.is_utility() {
        return Err(InferError::NonNumericVariable(variable.to_string()));
    }
    let worlds = enumerate_worlds(model, &Assignment::new())?;
    Ok(var
        .domain()
        .iter()
        .map(|v| (v.clone(), worlds.probability(variable, v)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelBuilder;
    use crate::rational::{int, rat};

    fn coin_model(p: Rational) -> Model {
        let q = Rational::one() - &p;
        ModelBuilder::new("coin")
            .root("Act", &["a", "b"], &[p, q])
            .root("Coin", &["h", "t"], &[rat(1, 4), rat(3, 4)])
            .det("Out", &["win", "lose"], &["Act", "Coin"], |r| {
                if (r[0] == "a") == (r[1] == "h") {
                    "win"
                } else {
                    "lose"
                }
                .into()
            })
            .utility(
                "V",
                &["Out"],
                |r| if r[0] == "win" { int(100) } else { int(0) },
            )
            .build()
            .unwrap()
    }

    #[test]
    fn enumeration_weights_sum_to_one() {
        let m = coin_model(rat(1, 3));
        let w = enumerate_worlds(&m, &Assignment::new()).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.total(), int(1));
    }

    #[test]
    fn conditioning_and_expectation() {
        let m = coin_model(rat(1, 3));
        let w = condition(&m, &evidence(&[("Act", "a")])).unwrap();
        assert_eq!(expectation(&w, "V").unwrap(), int(25));
        assert_eq!(
            expectation(&w, "Out"),
            Err(InferError::NonNumericVariable("Out".into()))
        );
    }

    #[test]
    fn zero_probability_evidence() {
        let m = coin_model(int(0));
        let e = evidence(&[("Act", "a")]);
        assert!(enumerate_worlds(&m, &e).unwrap().is_empty());
        assert_eq!(condition(&m, &e), Err(InferError::ZeroProbabilityEvidence));
    }

    #[test]
    fn joint_probability_of_worlds() {
        let m = coin_model(rat(1, 3));
        let mut world = evidence(&[("Act", "a"), ("Coin", "h"), ("Out", "win")]);
        assert_eq!(joint_probability(&m, &world).unwrap(), rat(1, 12));
        world.insert("V".into(), Value::Number(int(100)));
        assert_eq!(joint_probability(&m, &world).unwrap(), rat(1, 12));
        world.insert("Out".into(), Value::symbol("lose"));
        assert_eq!(joint_probability(&m, &world).unwrap(), int(0));
        world.remove("Coin");
        assert_eq!(
            joint_probability(&m, &world),
            Err(InferError::PartialWorld("Coin".into()))
        );
        world.insert("Coin".into(), Value::symbol("edge"));
        assert!(matches!(
            joint_probability(&m, &world),
            Err(InferError::ValueOutOfDomain { .. })
        ));
    }

    #[test]
    fn evidence_type_errors() {
        let m = coin_model(rat(1, 3));
        assert!(matches!(
            enumerate_worlds(&m, &evidence(&[("Act", "zz")])),
            Err(InferError::ValueOutOfDomain { .. })
        ));
        assert_eq!(
            enumerate_worlds(&m, &evidence(&[("Nope", "a")])),
            Err(InferError::UnknownVariable("Nope".into()))
        );
    }

    #[test]
    fn world_guard() {
        let m = coin_model(rat(1, 3));
        assert_eq!(
            enumerate_worlds_with_limit(&m, &Assignment::new(), 3),
            Err(InferError::TooManyWorlds {
                worlds: 4,
                limit: 3
            })
        );
    }

    #[test]
    fn root_marginal_is_prior() {
        let m = coin_model(rat(1, 3));
        assert_eq!(
            marginal(&m, "Coin").unwrap(),
            vec![("h".to_string(), rat(1, 4)), ("t".to_string(), rat(3, 4))]
        );
    }

    #[test]
    fn uniform_two_worlds() {
        let w = WeightedWorlds {
            worlds: vec![
                ([("V".to_string(), Value::Number(int(0)))].into(), rat(1, 2)),
                (
                    [("V".to_string(), Value::Number(int(1_000_000)))].into(),
                    rat(1, 2),
                ),
            ],
        };
        assert_eq!(expectation(&w, "V").unwrap(), int(500_000));
    }
}
