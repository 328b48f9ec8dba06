//! EDT, CDT and FDT as ways of building the hypothetical for each action,
//! sharing one expected-utility maximizer.

use std::fmt;
use std::str::FromStr;

use crate::infer::{enumerate_worlds, expectation, Assignment, InferError, Value};
use crate::model::Model;
use crate::rational::Rational;
use crate::surgery::{do_intervene, Intervention, SurgeryError};

mod dominance;
mod dynamics;

pub use dominance::{dominance, Dominance};
pub use dynamics::{
    cdt_best_response, cdt_ratify, cdt_ratify_support, point_mass, with_act_prior,
    BestResponseStep, BestResponseTrace, Distribution, Ratification, TraceStatus,
};

/// How the hypothetical for an action is constructed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Theory {
    /// Condition on the action.
    Edt,
    /// Intervene on the act node.
    Cdt,
    /// Intervene on the decision-function node.
    Fdt,
}

pub type HypotheticalConstructor = Theory;

impl Theory {
    pub const ALL: [Theory; 3] = [Theory::Edt, Theory::Cdt, Theory::Fdt];

    pub fn as_str(self) -> &'static str {
        match self {
            Theory::Edt => "edt",
            Theory::Cdt => "cdt",
            Theory::Fdt => "fdt",
        }
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Theory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "edt" => Ok(Theory::Edt),
            "cdt" => Ok(Theory::Cdt),
            "fdt" => Ok(Theory::Fdt),
            other => Err(format!("unknown theory `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    pub action: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Prescription {
    pub theory: Theory,
    pub observation: Option<String>,
    /// Expected utility per non-excluded action, in domain order.
    pub per_action: Vec<(String, Rational)>,
    /// Every maximizing action, in domain order.
    pub chosen: Vec<String>,
    pub excluded: Vec<Exclusion>,
}

impl Prescription {
    /// The single prescribed action (first maximizer in domain order).
    pub fn action(&self) -> Option<&str> {
        self.chosen.first().map(String::as_str)
    }

    pub fn eu(&self, action: &str) -> Option<&Rational> {
        self.per_action
            .iter()
            .find(|(a, _)| a == action)
            .map(|(_, v)| v)
    }

    pub fn is_tie(&self) -> bool {
        self.chosen.len() > 1
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("every action has probability zero")]
    AllActionsExcluded,
    #[error("no intervention node for observation `{0}`")]
    MissingFdtNode(String),
    #[error("the observation has probability zero")]
    ZeroProbabilityEvidence,
    #[error("an observation was given but the model designates no observation node")]
    NoObservationNode,
    #[error("`{value}` is not a value of the observation node `{node}`")]
    UnknownObservation { node: String, value: String },
    #[error("`{0}` is not an action")]
    UnknownAction(String),
    #[error("the act prior cannot be set: {0}")]
    UnsupportedActPrior(String),
    #[error("{0}")]
    BadDistribution(String),
    #[error("ratification needs {0}")]
    RatifyPrecondition(String),
    #[error("expected utility is not affine in the act prior")]
    NonAffine,
    #[error("no ratifiable state exists")]
    NoRatifiableState,
    #[error("hypotheticals for `{0}` and `{1}` have different exogenous supports")]
    IncomparableHypotheticals(String, String),
    #[error("action `{0}` is excluded")]
    ExcludedAction(String),
    #[error(transparent)]
    Infer(#[from] InferError),
    #[error(transparent)]
    Surgery(#[from] SurgeryError),
}

/// The unnormalized hypothetical worlds for one action. Under EDT and CDT the
/// observation is part of the evidence; FDT ignores it apart from the choice
/// of intervention node.
pub(crate) fn hypothetical(
    model: &Model,
    theory: Theory,
    obs: Option<&str>,
    action: &str,
) -> Result<crate::infer::WeightedWorlds, TheoryError> {
    let d = model.designations();
    let mut ev = Assignment::new();
    if let (Some(node), Some(value)) = (&d.obs, obs) {
        ev.insert(node.clone(), Value::symbol(value));
    }
    Ok(match theory {
        Theory::Edt => {
            ev.insert(d.act.clone(), Value::symbol(action));
            enumerate_worlds(model, &ev)?
        }
        Theory::Cdt => {
            let cut = do_intervene(model, &Intervention::new(&d.act, action))?;
            enumerate_worlds(&cut, &ev)?
        }
        Theory::Fdt => {
            let target = fdt_target(model, obs)?;
            let cut = do_intervene(model, &Intervention::new(target, action))?;
            enumerate_worlds(&cut, &Assignment::new())?
        }
    })
}

fn fdt_target<'m>(model: &'m Model, obs: Option<&str>) -> Result<&'m str, TheoryError> {
    model
        .fdt_node(obs)
        .ok_or_else(|| TheoryError::MissingFdtNode(obs.unwrap_or("∅").to_string()))
}

fn check_observation(model: &Model, obs: Option<&str>) -> Result<(), TheoryError> {
    let Some(value) = obs else { return Ok(()) };
    let node = model.observation().ok_or(TheoryError::NoObservationNode)?;
    if node.index_of(value).is_none() {
        return Err(TheoryError::UnknownObservation {
            node: node.name().to_string(),
            value: value.to_string(),
        });
    }
    Ok(())
}

pub fn evaluate(
    model: &Model,
    theory: Theory,
    obs: Option<&str>,
) -> Result<Prescription, TheoryError> {
    check_observation(model, obs)?;
    let d = model.designations();
    if theory == Theory::Edt {
        if let (Some(node), Some(value)) = (&d.obs, obs) {
            let prior = enumerate_worlds(model, &crate::infer::evidence(&[(node, value)]))?;
            if prior.is_empty() {
                return Err(TheoryError::ZeroProbabilityEvidence);
            }
        }
    }
    if theory == Theory::Fdt {
        fdt_target(model, obs)?;
    }
    let mut per_action = Vec::new();
    let mut excluded = Vec::new();
    for action in model.actions() {
        let worlds = hypothetical(model, theory, obs, action)?;
        if worlds.is_empty() {
            match theory {
                Theory::Edt => {
                    excluded.push(Exclusion {
                        action: action.clone(),
                        reason: match obs {
                            Some(o) => format!("P({action} | {o}) = 0"),
                            None => format!("P({action}) = 0"),
                        },
                    });
                    continue;
                }
                _ => return Err(TheoryError::ZeroProbabilityEvidence),
            }
        }
        let eu = expectation(&worlds.normalized()?, &d.value)?;
        per_action.push((action.clone(), eu));
    }
    if per_action.is_empty() {
        return Err(TheoryError::AllActionsExcluded);
    }
    let best = per_action
        .iter()
        .map(|(_, v)| v)
        .max()
        .expect("non-empty")
        .clone();
    let chosen = per_action
        .iter()
        .filter(|(_, v)| *v == best)
        .map(|(a, _)| a.clone())
        .collect();
    Ok(Prescription {
        theory,
        observation: obs.map(str::to_string),
        per_action,
        chosen,
        excluded,
    })
}

pub fn edt(model: &Model, obs: Option<&str>) -> Result<Prescription, TheoryError> {
    evaluate(model, Theory::Edt, obs)
}

pub fn cdt(model: &Model, obs: Option<&str>) -> Result<Prescription, TheoryError> {
    evaluate(model, Theory::Cdt, obs)
}

pub fn fdt(model: &Model, obs: Option<&str>) -> Result<Prescription, TheoryError> {
    evaluate(model, Theory::Fdt, obs)
}

/// Structural condition under which every correlation between the act and
/// the rest of the graph flows through the act itself, so that EDT, CDT and
/// FDT coincide (given a strictly positive act prior for EDT).
///
/// Holds when the decision-function node is the act and the act is a root,
/// or when the decision-function node is a root whose only child is the act
/// and the act copies it verbatim.
pub fn agreement_condition(model: &Model) -> bool {
    let d = model.designations();
    let Some(f) = d.self_fdt.as_deref().or_else(|| model.fdt_node(None)) else {
        return false;
    };
    let act = model.act();
    if f == act.name() {
        return act.is_root();
    }
    let Some(fnode) = model.variable(f) else {
        return false;
    };
    let copies = fnode
        .domain()
        .iter()
        .all(|v| act.function_value(std::slice::from_ref(v)) == Some(v.as_str()));
    act.parents() == [f.to_string()]
        && copies
        && fnode.is_root()
        && model.children(f) == [act.name()]
}
