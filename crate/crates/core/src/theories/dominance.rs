//! Dominance relative to a way of building hypotheticals.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::{hypothetical, Theory, TheoryError};
use crate::model::Model;
use crate::rational::Rational;
use crate::surgery::descendants;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dominance {
    Dominates,
    Dominated,
    Neither,
}

/// Compares the value of `a` and `b` world by world, where a world is an
/// assignment to every variable the hypothetical does not touch: everything
/// outside the descendant closure of the act (EDT, CDT) or of the
/// decision-function node (FDT). Within a world the conditional expected
/// value is compared.
pub fn dominance(
    model: &Model,
    theory: Theory,
    a: &str,
    b: &str,
) -> Result<Dominance, TheoryError> {
    for x in [a, b] {
        if !model.actions().iter().any(|y| y == x) {
            return Err(TheoryError::UnknownAction(x.to_string()));
        }
    }
    let target = match theory {
        Theory::Edt | Theory::Cdt => model.designations().act.clone(),
        Theory::Fdt => model
            .fdt_node(None)
            .ok_or_else(|| TheoryError::MissingFdtNode("∅".into()))?
            .to_string(),
    };
    let mut touched = descendants(model, &target)?;
    touched.insert(target);
    let exogenous: Vec<String> = model
        .variables()
        .filter(|v| !v.is_utility() && !touched.contains(v.name()))
        .map(|v| v.name().to_string())
        .collect();
    let value = &model.designations().value;

    let table = |action: &str| -> Result<BTreeMap<Vec<String>, Rational>, TheoryError> {
        let worlds = hypothetical(model, theory, None, action)?;
        if worlds.is_empty() {
            return Err(TheoryError::ExcludedAction(action.to_string()));
        }
        let mut acc: BTreeMap<Vec<String>, (Rational, Rational)> = BTreeMap::new();
        for (world, w) in &worlds.worlds {
            let key = exogenous.iter().map(|n| world[n].to_string()).collect();
            let v = world[value]
                .as_number()
                .cloned()
                .unwrap_or_else(Rational::zero);
            let e = acc
                .entry(key)
                .or_insert((Rational::zero(), Rational::zero()));
            e.0 += w * v;
            e.1 += w;
        }
        Ok(acc.into_iter().map(|(k, (s, w))| (k, s / w)).collect())
    };
    let (ta, tb) = (table(a)?, table(b)?);
    if ta.keys().ne(tb.keys()) {
        return Err(TheoryError::IncomparableHypotheticals(a.into(), b.into()));
    }
    let (mut better, mut worse) = (false, false);
    for (k, va) in &ta {
        let vb = &tb[k];
        better |= va > vb;
        worse |= va < vb;
    }
    Ok(match (better, worse) {
        (true, false) => Dominance::Dominates,
        (false, true) => Dominance::Dominated,
        _ => Dominance::Neither,
    })
}
