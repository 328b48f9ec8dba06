use std::collections::BTreeMap;

use dilemma_core::corpus::{self, lesion_renaming, load, verify_golden, CorpusError, DILEMMAS};
use dilemma_core::dsl::{parse, serialize};
use dilemma_core::rational::{int, rat};
use dilemma_core::theories::{
    cdt_best_response, cdt_ratify, cdt_ratify_support, dominance, point_mass, Dominance,
    TraceStatus,
};
use dilemma_core::{cdt, edt, fdt, rename, Rational, Theory};

fn shipped(file: &str) -> String {
    std::fs::read_to_string(format!(
        "{}/../../dilemmas/{file}",
        env!("CARGO_MANIFEST_DIR")
    ))
    .unwrap()
}

#[test]
fn shipped_newcomb_file_is_the_fdt_model() {
    let suite = corpus::load_default("newcomb").unwrap();
    assert_eq!(
        &parse(&shipped("newcomb.dlm")).unwrap(),
        suite.model("fdt").unwrap()
    );
}

#[test]
fn shipped_lesion_file_is_the_edt_model() {
    let suite = corpus::load_default("smoking_lesion").unwrap();
    assert_eq!(
        &parse(&shipped("smoking_lesion_edt.dlm")).unwrap(),
        suite.model("edt").unwrap()
    );
}

#[test]
fn lesion_models_are_renamed_newcomb_models() {
    for p in [rat(1, 4), rat(1, 2), rat(3, 4)] {
        let lesion = corpus::smoking_lesion(p.clone(), int(0)).unwrap();
        let newcomb = corpus::newcomb(rat(99, 100), Rational::from_integer(1.into()) - &p).unwrap();
        for label in ["edt", "cdt"] {
            let renamed = rename(newcomb.model(label).unwrap(), &lesion_renaming())
                .unwrap()
                .with_name("smoking_lesion");
            assert_eq!(serialize(&renamed), serialize(lesion.model(label).unwrap()));
        }
    }
}

#[test]
fn newcomb_and_twin_pd_agree_for_fdt() {
    let newcomb = fdt(
        corpus::load_default("newcomb")
            .unwrap()
            .model("fdt")
            .unwrap(),
        None,
    )
    .unwrap();
    let twin = fdt(corpus::twin_pd().unwrap().model("fdt").unwrap(), None).unwrap();
    let map = |a: &str| if a == "onebox" { "cooperate" } else { "defect" };
    let mapped: Vec<&str> = newcomb.chosen.iter().map(|a| map(a)).collect();
    assert_eq!(mapped, twin.chosen);
}

#[test]
fn mechanical_blackmail_flips_at_one_in_a_thousand() {
    let chosen = |e: Rational| {
        let suite = corpus::mechanical_blackmail(e).unwrap();
        fdt(suite.model("fdt").unwrap(), Some("blackmail")).unwrap()
    };
    assert_eq!(chosen(rat(9, 10_000)).chosen, ["refuse"]);
    assert_eq!(chosen(rat(9, 10_000)).eu("refuse"), Some(&int(-900)));
    assert_eq!(chosen(rat(2, 1000)).chosen, ["pay"]);
    let tie = chosen(rat(1, 1000));
    assert!(tie.is_tie());
    assert_eq!(tie.chosen, ["pay", "refuse"]);
}

#[test]
fn every_suite_validates_across_its_ranges() {
    for name in DILEMMAS {
        let specs = corpus::params(name).unwrap();
        for spec in &specs {
            let samples: Vec<Rational> = if spec.flag {
                vec![int(0), int(1)]
            } else {
                [
                    int(0),
                    rat(1, 1000),
                    rat(1, 3),
                    rat(1, 2),
                    rat(999, 1000),
                    int(1),
                    int(5000),
                ]
                .into_iter()
                .filter(|v| spec.admits(v))
                .collect()
            };
            for v in samples {
                let overrides = BTreeMap::from([(spec.name.to_string(), v.clone())]);
                let suite = load(name, &overrides)
                    .unwrap_or_else(|e| panic!("{name} {}={v}: {e}", spec.name));
                let report = verify_golden(&suite);
                assert!(
                    report.all_passed(),
                    "{name} {}={v}: {:?}",
                    spec.name,
                    report.failures().collect::<Vec<_>>()
                );
            }
        }
    }
}

#[test]
fn out_of_range_parameters_are_rejected() {
    let bad = BTreeMap::from([("act_prior".to_string(), int(0))]);
    assert!(matches!(
        load("newcomb", &bad),
        Err(CorpusError::ParamOutOfRange { .. })
    ));
    assert!(matches!(
        corpus::params("nosuch"),
        Err(CorpusError::UnknownDilemma(_))
    ));
    assert!(load(
        "newcomb",
        &BTreeMap::from([("accuracy".to_string(), int(1))])
    )
    .is_ok());
}

#[test]
fn damascus_best_response_cycles_from_both_starts() {
    let suite = corpus::load_default("death_in_damascus").unwrap();
    let m = suite.model("cdt").unwrap();
    for start in ["damascus", "aleppo"] {
        let trace = cdt_best_response(m, &point_mass(m, start), 3).unwrap();
        assert_eq!(trace.status, TraceStatus::CycleDetected { period: 2 });
        assert!(trace.steps.len() <= 3);
    }
}

#[test]
fn damascus_ratifies_at_fifty_point_zero_five() {
    let suite = corpus::load_default("death_in_damascus").unwrap();
    let r = cdt_ratify(suite.model("cdt").unwrap()).unwrap();
    assert_eq!(
        r.prior,
        [
            ("damascus".into(), rat(5005, 10_000)),
            ("aleppo".into(), rat(4995, 10_000))
        ]
    );
    assert_eq!(r.per_action[0].1, r.per_action[1].1);
}

#[test]
fn ratified_cdt_declines_the_coin() {
    let suite = corpus::death_in_damascus(int(1000), int(1), true).unwrap();
    let r = cdt_ratify_support(suite.model("cdt").unwrap(), "damascus", "aleppo").unwrap();
    let eu = |a: &str| r.per_action.iter().find(|(x, _)| x == a).unwrap().1.clone();
    assert_eq!(eu("damascus"), int(499_500));
    assert_eq!(eu("coin"), int(499_499));
    let f = fdt(suite.model("fdt").unwrap(), None).unwrap();
    assert_eq!(f.chosen, ["coin"]);
    assert_eq!(f.eu("coin"), Some(&int(499_499)));
}

#[test]
fn newcomb_best_response_converges_to_two_boxing() {
    let suite = corpus::load_default("newcomb").unwrap();
    let m = suite.model("cdt").unwrap();
    let trace = cdt_best_response(m, &point_mass(m, "onebox"), 10).unwrap();
    assert_eq!(
        trace.status,
        TraceStatus::Converged {
            action: "twobox".into()
        }
    );
}

#[test]
fn cdt_two_boxing_dominates_but_fdt_does_not_at_99() {
    let suite = corpus::load_default("newcomb").unwrap();
    let d = dominance(suite.model("cdt").unwrap(), Theory::Cdt, "twobox", "onebox").unwrap();
    assert_eq!(d, Dominance::Dominates);
    let f = dominance(suite.model("fdt").unwrap(), Theory::Fdt, "twobox", "onebox").unwrap();
    assert_eq!(f, Dominance::Neither);
}

#[test]
fn xor_cdt_margin_is_independent_of_the_termite_prior() {
    for t in [rat(1, 100), rat(1, 2)] {
        let suite = corpus::xor_blackmail(t).unwrap();
        let p = cdt(suite.model("cdt").unwrap(), Some("letter")).unwrap();
        assert_eq!(p.eu("refuse").unwrap() - p.eu("pay").unwrap(), int(1000));
        let e = edt(suite.model("edt").unwrap(), Some("letter")).unwrap();
        assert_eq!(e.chosen, ["pay"]);
    }
}

#[test]
fn parfit_desert_has_no_fdt_node() {
    let suite = corpus::load_default("parfit_hitchhiker").unwrap();
    let m = suite.model("fdt").unwrap();
    assert_eq!(m.fdt_missing_observations(), ["desert"]);
    assert!(fdt(m, Some("desert")).is_err());
}
