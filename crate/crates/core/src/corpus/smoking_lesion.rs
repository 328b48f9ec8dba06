use super::*;
use crate::model::{rename, ModelBuilder, Renaming};

pub(super) fn params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::open_unit("p", rat(1, 2), "prior probability of the lesion"),
        ParamSpec::closed_unit(
            "q",
            int(0),
            "prior that the decision function of the lesion-free agent smokes",
        ),
    ]
}

/// Newcomb's names mapped onto the smoking lesion's.
pub fn lesion_renaming() -> Renaming {
    Renaming::new()
        .variable("Predisposition", "Lesion")
        .variable("Accurate", "Luck")
        .variable("Prediction", "Cancer")
        .variable("BoxB", "Death")
        .value("oneboxer", "nolesion")
        .value("twoboxer", "lesion")
        .value("accurate", "unlucky")
        .value("inaccurate", "lucky")
        .value("1", "nocancer")
        .value("2", "cancer")
        .value("empty", "dead")
        .value("full", "alive")
        .value("twobox", "smoke")
        .value("onebox", "refrain")
}

const SURVIVAL: (i64, i64) = (99, 100);

fn renamed(model: Model) -> Model {
    rename(&model, &lesion_renaming())
        .expect("the lesion renaming is a bijection on newcomb's names")
        .with_name("smoking_lesion")
}

/// Utility when smoking is valued at `smoke_bonus` instead of +1,000.
fn utility(act: &str, death: &str, smoke_bonus: i64) -> Rational {
    let alive = if death == "alive" { MILLION } else { 0 };
    int(alive + if act == "smoke" { smoke_bonus } else { 0 })
}

/// The functional agent's graph. Two decision functions exist; which one
/// controls the act depends on the lesion. `own` names the one the agent's
/// utility belongs to.
fn fdt_model(
    p: &Rational,
    fdt_s_prior: &[Rational; 2],
    fdt_r_prior: &[Rational; 2],
    smoke_bonus: i64,
    own: &str,
) -> Result<Model, ValidationErrors> {
    let acts = ["refrain", "smoke"];
    ModelBuilder::new("smoking_lesion")
        .root("Lesion", &["nolesion", "lesion"], &[one() - p, p.clone()])
        .root("FdtS", &acts, fdt_s_prior)
        .root("FdtR", &acts, fdt_r_prior)
        .root(
            "Luck",
            &["unlucky", "lucky"],
            &split(&rat(SURVIVAL.0, SURVIVAL.1)),
        )
        .det("Act", &acts, &["Lesion", "FdtS", "FdtR"], |r| {
            if r[0] == "lesion" { r[1] } else { r[2] }.to_string()
        })
        .det(
            "Cancer",
            &["nocancer", "cancer"],
            &["Lesion", "Luck"],
            |r| {
                if (r[0] == "nolesion") == (r[1] == "unlucky") {
                    "nocancer"
                } else {
                    "cancer"
                }
                .into()
            },
        )
        .map(
            "Death",
            &["alive", "dead"],
            "Cancer",
            &[("nocancer", "alive"), ("cancer", "dead")],
        )
        .utility("V", &["Act", "Death"], move |r| {
            utility(r[0], r[1], smoke_bonus)
        })
        .self_fdt(own)
        .build()
}

pub(super) fn build(p: &Params) -> Result<(Vec<SuiteModel>, Vec<GoldenEntry>), ValidationErrors> {
    let (lesion, q) = (p.get("p"), p.get("q"));
    let survival = rat(SURVIVAL.0, SURVIVAL.1);
    let no_lesion = one() - &lesion;
    let edt = renamed(newcomb::edt_model(&survival, &no_lesion)?);
    let cdt = renamed(newcomb::cdt_model(&survival, &no_lesion)?);
    let fdt_r_prior = [one() - &q, q.clone()];
    let fdt = fdt_model(&lesion, &split(&rat(1, 2)), &fdt_r_prior, 1000, "FdtS")?;
    let fdt_r = fdt_model(&lesion, &[int(0), int(1)], &fdt_r_prior, -1, "FdtR")?;
    let models = vec![
        suite_model(Theory::Edt, edt),
        suite_model(Theory::Cdt, cdt),
        suite_model(Theory::Fdt, fdt),
        SuiteModel {
            label: "fdt_r".into(),
            theory: Theory::Fdt,
            model: fdt_r,
        },
    ];

    let [c_refrain, c_smoke] = newcomb::correlated_values(&survival);
    let [s_refrain, s_smoke] = newcomb::severed_values(&survival, &no_lesion);
    // Lesion-free agents act through the other function.
    let rest = &no_lesion * (int(990_000) + int(1000) * &q);
    let fdt_smoke = &lesion * int(11_000) + &rest;
    let fdt_refrain = &lesion * int(10_000) + &rest;
    // Utility R: the lesioned agent smokes for sure, worth 1/100 * 999,999 - 99/100.
    let r_lesion = &lesion * int(9_999);
    let golden = vec![
        golden_eu(
            "edt",
            Theory::Edt,
            None,
            &[("refrain", c_refrain), ("smoke", c_smoke)],
            "refraining is good news about the lesion",
        ),
        golden_eu(
            "cdt",
            Theory::Cdt,
            None,
            &[("refrain", s_refrain), ("smoke", s_smoke)],
            "cancer does not depend on the act",
        ),
        golden_eu(
            "fdt",
            Theory::Fdt,
            None,
            &[("refrain", fdt_refrain), ("smoke", fdt_smoke)],
            "smoking wins by p * 1,000",
        ),
        golden_eu(
            "fdt_r",
            Theory::Fdt,
            None,
            &[
                ("refrain", &r_lesion + &no_lesion * int(990_000)),
                ("smoke", &r_lesion + &no_lesion * int(989_999)),
            ],
            "an agent that values smoking at -1 refrains",
        ),
    ];
    Ok((models, golden))
}
