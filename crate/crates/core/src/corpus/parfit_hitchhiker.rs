use super::*;
use crate::model::ModelBuilder;

pub(super) fn params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::closed_unit(
            "accuracy",
            rat(99, 100),
            "probability the driver reads the agent correctly",
        ),
        ParamSpec::open_unit(
            "pay_prior",
            rat(1, 2),
            "prior that the agent pays once in the city",
        ),
    ]
}

const ACTS: [&str; 2] = ["pay", "refuse"];

/// Survival is worth 1,000,000; paying costs 1,000.
fn utility(rescue: &str, act: &str) -> Rational {
    let alive = if rescue == "rescued" { MILLION } else { 0 };
    int(alive - if act == "pay" { 1000 } else { 0 })
}

fn prediction(pays: bool, accurate: &str) -> String {
    if pays == (accurate == "accurate") {
        "willpay"
    } else {
        "wontpay"
    }
    .into()
}

fn tail(b: ModelBuilder) -> ModelBuilder {
    b.map(
        "Rescue",
        &["rescued", "stranded"],
        "Prediction",
        &[("willpay", "rescued"), ("wontpay", "stranded")],
    )
    .map(
        "Obs",
        &["city", "desert"],
        "Rescue",
        &[("rescued", "city"), ("stranded", "desert")],
    )
}

fn cdt_model(accuracy: &Rational, prior: &Rational) -> Result<Model, ValidationErrors> {
    let b = ModelBuilder::new("parfit_hitchhiker")
        .root("Predisposition", &["payer", "refuser"], &split(prior))
        .root("Accurate", &["accurate", "inaccurate"], &split(accuracy))
        .det(
            "Prediction",
            &["willpay", "wontpay"],
            &["Predisposition", "Accurate"],
            |r| prediction(r[0] == "payer", r[1]),
        );
    tail(b)
        .det("Act", &ACTS, &["Predisposition", "Obs"], |r| {
            if r[1] == "city" && r[0] == "payer" {
                "pay"
            } else {
                "refuse"
            }
            .into()
        })
        .utility("V", &["Rescue", "Act"], |r| utility(r[0], r[1]))
        .obs("Obs")
        .build()
}

/// Only the city observation has a decision-function node; in the desert
/// nobody is asked for money.
fn fdt_model(accuracy: &Rational, prior: &Rational) -> Result<Model, ValidationErrors> {
    let b = ModelBuilder::new("parfit_hitchhiker")
        .root("FdtCity", &ACTS, &split(prior))
        .root("Accurate", &["accurate", "inaccurate"], &split(accuracy))
        .det(
            "Prediction",
            &["willpay", "wontpay"],
            &["FdtCity", "Accurate"],
            |r| prediction(r[0] == "pay", r[1]),
        );
    tail(b)
        .det("Act", &ACTS, &["FdtCity", "Obs"], |r| {
            if r[1] == "city" { r[0] } else { "refuse" }.to_string()
        })
        .utility("V", &["Rescue", "Act"], |r| utility(r[0], r[1]))
        .obs("Obs")
        .fdt(Some("city"), "FdtCity")
        .build()
}

pub(super) fn build(p: &Params) -> Result<(Vec<SuiteModel>, Vec<GoldenEntry>), ValidationErrors> {
    let (a, prior) = (p.get("accuracy"), p.get("pay_prior"));
    let cdt = cdt_model(&a, &prior)?;
    let models = vec![
        suite_model(Theory::Edt, cdt.clone()),
        suite_model(Theory::Cdt, cdt),
        suite_model(Theory::Fdt, fdt_model(&a, &prior)?),
    ];
    let city = [("pay", int(MILLION - 1000)), ("refuse", million())];
    // A payer reaches the city only through an accurate reading, a refuser
    // only through an inaccurate one.
    let edt_city: Vec<(&str, Rational)> = city
        .iter()
        .filter(|(act, _)| {
            if *act == "pay" {
                !a.is_zero()
            } else {
                !a.is_one()
            }
        })
        .cloned()
        .collect();
    let golden = vec![
        golden_eu(
            "cdt",
            Theory::Cdt,
            Some("city"),
            &city,
            "in the city paying only costs money",
        ),
        golden_eu(
            "edt",
            Theory::Edt,
            Some("city"),
            &edt_city,
            "in the city paying is bad news",
        ),
        golden_eu(
            "fdt",
            Theory::Fdt,
            Some("city"),
            &[
                ("pay", &a * int(MILLION - 1000)),
                ("refuse", (one() - &a) * million()),
            ],
            "the driver's reading tracks the city policy",
        ),
    ];
    Ok((models, golden))
}
