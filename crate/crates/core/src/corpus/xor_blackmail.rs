use super::*;
use crate::model::ModelBuilder;

pub(super) fn params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::open_unit(
            "termite_prior",
            rat(1, 2),
            "prior probability of a termite infestation",
        ),
        ParamSpec::open_unit(
            "payer_prior",
            rat(1, 2),
            "prior that the agent pays on receiving the letter",
        ),
    ]
}

const ACTS: [&str; 2] = ["pay", "refuse"];

fn utility(infestation: &str, act: &str) -> Rational {
    let damage = if infestation == "termites" {
        MILLION
    } else {
        0
    };
    int(-damage - if act == "pay" { 1000 } else { 0 })
}

/// The letter is sent exactly when the house is clean and the agent would
/// pay, or infested and the agent would refuse.
fn letter(termites: bool, pays: bool) -> String {
    if termites != pays {
        "letter"
    } else {
        "noletter"
    }
    .into()
}

fn observation(b: ModelBuilder) -> ModelBuilder {
    b.map(
        "Obs",
        &["letter", "noletter"],
        "Predictor",
        &[("letter", "letter"), ("noletter", "noletter")],
    )
}

fn cdt_model(t: &Rational, prior: &Rational) -> Result<Model, ValidationErrors> {
    let b = ModelBuilder::new("xor_blackmail")
        .root("Disposition", &["payer", "refuser"], &split(prior))
        .root("Infestation", &["termites", "notermites"], &split(t))
        .det(
            "Predictor",
            &["letter", "noletter"],
            &["Infestation", "Disposition"],
            |r| letter(r[0] == "termites", r[1] == "payer"),
        );
    observation(b)
        .det("Act", &ACTS, &["Disposition", "Obs"], |r| {
            if r[1] == "letter" && r[0] == "payer" {
                "pay"
            } else {
                "refuse"
            }
            .into()
        })
        .utility("V", &["Infestation", "Act"], |r| utility(r[0], r[1]))
        .obs("Obs")
        .build()
}

fn fdt_model(t: &Rational, prior: &Rational) -> Result<Model, ValidationErrors> {
    let b = ModelBuilder::new("xor_blackmail")
        .root("FdtLetter", &ACTS, &split(prior))
        .root("FdtNone", &ACTS, &[int(0), int(1)])
        .root("Infestation", &["termites", "notermites"], &split(t))
        .det(
            "Predictor",
            &["letter", "noletter"],
            &["Infestation", "FdtLetter"],
            |r| letter(r[0] == "termites", r[1] == "pay"),
        );
    observation(b)
        .det("Act", &ACTS, &["FdtLetter", "FdtNone", "Predictor"], |r| {
            if r[2] == "letter" { r[0] } else { r[1] }.to_string()
        })
        .utility("V", &["Infestation", "Act"], |r| utility(r[0], r[1]))
        .obs("Obs")
        .fdt(Some("letter"), "FdtLetter")
        .fdt(Some("noletter"), "FdtNone")
        .build()
}

pub(super) fn build(p: &Params) -> Result<(Vec<SuiteModel>, Vec<GoldenEntry>), ValidationErrors> {
    let (t, prior) = (p.get("termite_prior"), p.get("payer_prior"));
    let cdt = cdt_model(&t, &prior)?;
    let models = vec![
        suite_model(Theory::Edt, cdt.clone()),
        suite_model(Theory::Cdt, cdt),
        suite_model(Theory::Fdt, fdt_model(&t, &prior)?),
    ];
    let clean = one() - &t;
    let infested_given_letter = &t * (one() - &prior) / (&t * (one() - &prior) + &clean * &prior);
    let cdt_refuse = -(&infested_given_letter * million());
    let fdt_refuse = -(&t * million());
    let golden = vec![
        golden_eu(
            "edt",
            Theory::Edt,
            Some("letter"),
            &[("pay", int(-1000)), ("refuse", int(-MILLION))],
            "paying is evidence of a clean house",
        ),
        golden_eu(
            "cdt",
            Theory::Cdt,
            Some("letter"),
            &[
                ("pay", &cdt_refuse - int(1000)),
                ("refuse", cdt_refuse.clone()),
            ],
            "paying does not touch the termites",
        ),
        golden_eu(
            "fdt",
            Theory::Fdt,
            Some("letter"),
            &[
                ("pay", &fdt_refuse - int(1000) * &clean),
                ("refuse", fdt_refuse.clone()),
            ],
            "the policy only decides whether the letter arrives",
        ),
    ];
    Ok((models, golden))
}
