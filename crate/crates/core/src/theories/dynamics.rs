//! CDT under a changing self-prediction: best-response iteration and
//! ratification.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{cdt, Prescription, TheoryError};
use crate::model::{Body, Model};
use crate::rational::Rational;

/// A distribution over actions in domain order.
pub type Distribution = Vec<(String, Rational)>;

pub fn point_mass(model: &Model, action: &str) -> Distribution {
    model
        .actions()
        .iter()
        .map(|a| {
            let p = if a == action {
                Rational::one()
            } else {
                Rational::zero()
            };
            (a.clone(), p)
        })
        .collect()
}

/// Normalizes `dist` to the full action domain, checking it is a distribution.
fn complete(model: &Model, dist: &[(String, Rational)]) -> Result<Distribution, TheoryError> {
    let mut given = BTreeMap::new();
    for (a, p) in dist {
        if !model.actions().contains(a) {
            return Err(TheoryError::UnknownAction(a.clone()));
        }
        if *p < Rational::zero() || *p > Rational::one() {
            return Err(TheoryError::BadDistribution(format!(
                "probability of `{a}` is outside [0, 1]"
            )));
        }
        if given.insert(a.clone(), p.clone()).is_some() {
            return Err(TheoryError::BadDistribution(format!("`{a}` listed twice")));
        }
    }
    if !given.values().cloned().sum::<Rational>().is_one() {
        return Err(TheoryError::BadDistribution(
            "probabilities do not sum to 1".into(),
        ));
    }
    Ok(model
        .actions()
        .iter()
        .map(|a| {
            (
                a.clone(),
                given.get(a).cloned().unwrap_or_else(Rational::zero),
            )
        })
        .collect())
}

/// Sets the agent's prior over its own action. Supported when the act node is
/// a stochastic root, or a one-to-one copy of a stochastic root.
pub fn with_act_prior(model: &Model, dist: &[(String, Rational)]) -> Result<Model, TheoryError> {
    let dist = complete(model, dist)?;
    let act = model.act();
    let prior_of = |a: &str| dist.iter().find(|(x, _)| x == a).map(|(_, p)| p.clone());
    let unsupported = |why: &str| TheoryError::UnsupportedActPrior(why.to_string());
    let (root, prior): (String, BTreeMap<String, Rational>) = match act.body() {
        Body::Stochastic(_) if act.is_root() => {
            (act.name().to_string(), dist.iter().cloned().collect())
        }
        Body::Deterministic(_) if act.parents().len() == 1 => {
            let parent = model.variable(&act.parents()[0]).expect("validated parent");
            if !parent.is_root() || !matches!(parent.body(), Body::Stochastic(_)) {
                return Err(unsupported("the act's parent is not a stochastic root"));
            }
            let mut prior = BTreeMap::new();
            let mut images = Vec::new();
            for v in parent.domain() {
                let image = act
                    .function_value(std::slice::from_ref(v))
                    .expect("total table");
                images.push(image);
                prior.insert(v.clone(), prior_of(image).expect("image is an action"));
            }
            images.sort_unstable();
            images.dedup();
            if images.len() != act.domain().len() || parent.domain().len() != act.domain().len() {
                return Err(unsupported("the act does not copy its parent one-to-one"));
            }
            (parent.name().to_string(), prior)
        }
        _ => {
            return Err(unsupported(
                "the act node is neither a root nor a copy of one",
            ))
        }
    };
    Ok(model
        .with_root_prior(&root, &prior)
        .expect("a valid distribution keeps the model valid"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponseStep {
    pub prior: Distribution,
    pub prescription: Prescription,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceStatus {
    Converged { action: String },
    CycleDetected { period: usize },
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BestResponseTrace {
    pub initial: Distribution,
    pub steps: Vec<BestResponseStep>,
    pub status: TraceStatus,
}

/// Repeatedly lets CDT choose under the current self-prediction, then adopts
/// the point mass on the chosen action as the next self-prediction. `budget`
/// bounds the number of CDT evaluations.
pub fn cdt_best_response(
    model: &Model,
    initial: &[(String, Rational)],
    budget: usize,
) -> Result<BestResponseTrace, TheoryError> {
    let initial = complete(model, initial)?;
    let mut seen = vec![initial.clone()];
    let mut steps = Vec::new();
    let mut prior = initial.clone();
    let status = loop {
        if steps.len() == budget {
            break TraceStatus::BudgetExhausted;
        }
        let prescription = cdt(&with_act_prior(model, &prior)?, None)?;
        let action = prescription
            .action()
            .expect("CDT excludes nothing")
            .to_string();
        steps.push(BestResponseStep {
            prior: prior.clone(),
            prescription,
        });
        let next = point_mass(model, &action);
        if next == prior {
            break TraceStatus::Converged { action };
        }
        if let Some(i) = seen.iter().position(|p| *p == next) {
            break TraceStatus::CycleDetected {
                period: seen.len() - i,
            };
        }
        seen.push(next.clone());
        prior = next;
    };
    Ok(BestResponseTrace {
        initial,
        steps,
        status,
    })
}

/// A self-prediction under which every action it supports is a CDT best
/// response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ratification {
    pub prior: Distribution,
    /// CDT's expected utilities under `prior`.
    pub per_action: Vec<(String, Rational)>,
}

/// Ratification for a model with exactly two actions.
pub fn cdt_ratify(model: &Model) -> Result<Ratification, TheoryError> {
    match model.actions() {
        [a, b] => cdt_ratify_support(model, a, b),
        other => Err(TheoryError::RatifyPrecondition(format!(
            "exactly two actions, found {}",
            other.len()
        ))),
    }
}

/// Ratification restricted to self-predictions supported on `{a, b}`. Other
/// actions may exist; a state is accepted only if none of them does better.
/// Pure states are preferred, `a` first.
pub fn cdt_ratify_support(model: &Model, a: &str, b: &str) -> Result<Ratification, TheoryError> {
    for x in [a, b] {
        if !model.actions().iter().any(|y| y == x) {
            return Err(TheoryError::UnknownAction(x.to_string()));
        }
    }
    if a == b {
        return Err(TheoryError::RatifyPrecondition(
            "two distinct actions".into(),
        ));
    }
    let prior_at = |x: &Rational| -> Distribution {
        model
            .actions()
            .iter()
            .map(|y| {
                let p = if y == a {
                    x.clone()
                } else if y == b {
                    Rational::one() - x
                } else {
                    Rational::zero()
                };
                (y.clone(), p)
            })
            .collect()
    };
    let eval = |x: &Rational| -> Result<Prescription, TheoryError> {
        cdt(&with_act_prior(model, &prior_at(x))?, None)
    };
    let (zero, half, one) = (
        Rational::zero(),
        Rational::new(1.into(), 2.into()),
        Rational::one(),
    );
    let (p0, ph, p1) = (eval(&zero)?, eval(&half)?, eval(&one)?);
    for ((_, e0), ((_, eh), (_, e1))) in p0
        .per_action
        .iter()
        .zip(ph.per_action.iter().zip(p1.per_action.iter()))
    {
        if (e0 + e1) != eh * Rational::from_integer(2.into()) {
            return Err(TheoryError::NonAffine);
        }
    }
    let accepted = |x: &Rational, p: Prescription| Ratification {
        prior: prior_at(x),
        per_action: p.per_action,
    };
    if p1.chosen.iter().any(|c| c == a) {
        return Ok(accepted(&one, p1));
    }
    if p0.chosen.iter().any(|c| c == b) {
        return Ok(accepted(&zero, p0));
    }
    let diff = |p: &Prescription| p.eu(a).expect("action") - p.eu(b).expect("action");
    let (d0, d1) = (diff(&p0), diff(&p1));
    if d0 == d1 {
        return Err(TheoryError::NoRatifiableState);
    }
    let x = &d0 / (&d0 - &d1);
    if x <= zero || x >= one {
        return Err(TheoryError::NoRatifiableState);
    }
    let px = eval(&x)?;
    if px.chosen.iter().any(|c| c == a) && px.chosen.iter().any(|c| c == b) {
        Ok(accepted(&x, px))
    } else {
        Err(TheoryError::NoRatifiableState)
    }
}
