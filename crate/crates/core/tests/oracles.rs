//! Expected utilities recomputed by brute force over the full Cartesian
//! product of every domain, with surgery done by swapping factors.

use dilemma_core::corpus;
use dilemma_core::model::{parent_tuples, Body};
use dilemma_core::rational::int;
use dilemma_core::testing::{random_model, GenConfig};
use dilemma_core::theories::{evaluate, Theory, TheoryError};
use dilemma_core::{Model, Rational};
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::SeedableRng;

type WorldFilter<'a> = &'a dyn Fn(&[(String, String)]) -> bool;

/// `Σ w·u` and `Σ w` over all worlds, where the factor of `clamp.0` is
/// replaced by the indicator of `clamp.1` and `keep` filters worlds.
fn brute(model: &Model, clamp: Option<(&str, &str)>, keep: WorldFilter) -> (Rational, Rational) {
    let vars: Vec<_> = model.variables().filter(|v| !v.is_utility()).collect();
    let domains: Vec<Vec<String>> = vars.iter().map(|v| v.domain().to_vec()).collect();
    let mut num = Rational::zero();
    let mut den = Rational::zero();
    for world in parent_tuples(&domains) {
        let named: Vec<(String, String)> = vars
            .iter()
            .map(|v| v.name().to_string())
            .zip(world.iter().cloned())
            .collect();
        let lookup = |n: &str| {
            named
                .iter()
                .find(|(k, _)| k == n)
                .map(|(_, v)| v.clone())
                .unwrap()
        };
        let mut w = Rational::from_integer(1.into());
        for (var, value) in vars.iter().zip(&world) {
            if let Some((target, forced)) = clamp {
                if var.name() == target {
                    if value != forced {
                        w = Rational::zero();
                    }
                    continue;
                }
            }
            let row: Vec<String> = var.parents().iter().map(|p| lookup(p)).collect();
            match var.body() {
                Body::Stochastic(_) => {
                    w *= var.cpt_row(&row).unwrap()[var.index_of(value).unwrap()].clone()
                }
                Body::Deterministic(_) => {
                    if var.function_value(&row) != Some(value.as_str()) {
                        w = Rational::zero();
                    }
                }
                Body::Utility(_) => unreachable!(),
            }
        }
        if w.is_zero() || !keep(&named) {
            continue;
        }
        let u = model.utility();
        let row: Vec<String> = u.parents().iter().map(|p| lookup(p)).collect();
        num += &w * u.utility_value(&row).unwrap();
        den += w;
    }
    (num, den)
}

/// Per-action EU by brute force; `None` marks an excluded action.
fn oracle(model: &Model, theory: Theory, obs: Option<&str>) -> Vec<(String, Option<Rational>)> {
    let d = model.designations();
    let act = d.act.clone();
    let sees = |w: &[(String, String)]| match (&d.obs, obs) {
        (Some(node), Some(o)) => w.iter().any(|(k, v)| k == node && v == o),
        _ => true,
    };
    model
        .actions()
        .iter()
        .map(|a| {
            let (num, den) = match theory {
                Theory::Edt => brute(model, None, &|w| {
                    sees(w) && w.iter().any(|(k, v)| *k == act && v == a)
                }),
                Theory::Cdt => brute(model, Some((&act, a)), &|w| sees(w)),
                Theory::Fdt => brute(model, Some((model.fdt_node(obs).unwrap(), a)), &|_| true),
            };
            (
                a.clone(),
                if den.is_zero() { None } else { Some(num / den) },
            )
        })
        .collect()
}

fn check(model: &Model, theory: Theory, obs: Option<&str>) {
    let want = oracle(model, theory, obs);
    match evaluate(model, theory, obs) {
        Ok(p) => {
            let got: Vec<(String, Option<Rational>)> = model
                .actions()
                .iter()
                .map(|a| (a.clone(), p.eu(a).cloned()))
                .collect();
            assert_eq!(got, want, "{} {theory} {obs:?}", model.name());
            let best = want.iter().filter_map(|(_, v)| v.clone()).max().unwrap();
            let chosen: Vec<String> = want
                .iter()
                .filter(|(_, v)| v.as_ref() == Some(&best))
                .map(|(a, _)| a.clone())
                .collect();
            assert_eq!(p.chosen, chosen);
        }
        Err(TheoryError::AllActionsExcluded) => assert!(want.iter().all(|(_, v)| v.is_none())),
        Err(TheoryError::ZeroProbabilityEvidence) => {
            assert!(theory == Theory::Edt || want.iter().any(|(_, v)| v.is_none()))
        }
        Err(e) => panic!("{} {theory} {obs:?}: {e}", model.name()),
    }
}

#[test]
fn random_models_match_brute_force() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..300 {
        let m = random_model(&mut rng, &GenConfig::default());
        let observations: Vec<Option<String>> = match m.observation() {
            None => vec![None],
            Some(o) => o.domain().iter().map(|v| Some(v.clone())).collect(),
        };
        for theory in [Theory::Edt, Theory::Cdt] {
            for obs in &observations {
                check(&m, theory, obs.as_deref());
            }
        }
        if m.observation().is_none() {
            check(&m, Theory::Fdt, None);
        }
    }
}

#[test]
fn corpus_models_match_brute_force() {
    for name in corpus::DILEMMAS {
        let suite = corpus::load_default(name).unwrap();
        for g in &suite.golden {
            check(
                suite.model(&g.model).unwrap(),
                g.theory,
                g.observation.as_deref(),
            );
        }
    }
    let coin = corpus::death_in_damascus(int(1000), int(1), true).unwrap();
    for g in &coin.golden {
        check(
            coin.model(&g.model).unwrap(),
            g.theory,
            g.observation.as_deref(),
        );
    }
}
