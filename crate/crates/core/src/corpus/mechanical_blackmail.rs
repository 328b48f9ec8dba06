use super::*;
use crate::model::ModelBuilder;

pub(super) fn params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::closed_unit(
            "error",
            int(0),
            "probability the blackmailer misreads a refuser",
        ),
        ParamSpec::open_unit(
            "payer_prior",
            rat(1, 2),
            "prior that the agent pays when blackmailed",
        ),
    ]
}

const ACTS: [&str; 2] = ["pay", "refuse"];

fn utility(blackmailer: &str, act: &str) -> Rational {
    int(match (blackmailer, act) {
        (_, "pay") => -1000,
        ("blackmail", _) => -MILLION,
        _ => 0,
    })
}

/// The blackmailer targets payers, and refusers only by mistake.
fn blackmails(pays: bool, error: &str) -> String {
    if pays || error == "wrong" {
        "blackmail"
    } else {
        "noblackmail"
    }
    .into()
}

fn cdt_model(e: &Rational, prior: &Rational) -> Result<Model, ValidationErrors> {
    ModelBuilder::new("mechanical_blackmail")
        .root("Disposition", &["payer", "refuser"], &split(prior))
        .root("Error", &["correct", "wrong"], &[one() - e, e.clone()])
        .det(
            "Blackmailer",
            &["blackmail", "noblackmail"],
            &["Disposition", "Error"],
            |r| blackmails(r[0] == "payer", r[1]),
        )
        .det("Act", &ACTS, &["Disposition", "Blackmailer"], |r| {
            if r[1] == "blackmail" && r[0] == "payer" {
                "pay"
            } else {
                "refuse"
            }
            .into()
        })
        .utility("V", &["Blackmailer", "Act"], |r| utility(r[0], r[1]))
        .obs("Blackmailer")
        .build()
}

fn fdt_model(e: &Rational, prior: &Rational) -> Result<Model, ValidationErrors> {
    ModelBuilder::new("mechanical_blackmail")
        .root("FdtBlackmail", &ACTS, &split(prior))
        .root("FdtNone", &ACTS, &[int(0), int(1)])
        .root("Error", &["correct", "wrong"], &[one() - e, e.clone()])
        .det(
            "Blackmailer",
            &["blackmail", "noblackmail"],
            &["FdtBlackmail", "Error"],
            |r| blackmails(r[0] == "pay", r[1]),
        )
        .det(
            "Act",
            &ACTS,
            &["FdtBlackmail", "FdtNone", "Blackmailer"],
            |r| if r[2] == "blackmail" { r[0] } else { r[1] }.to_string(),
        )
        .utility("V", &["Blackmailer", "Act"], |r| utility(r[0], r[1]))
        .obs("Blackmailer")
        .fdt(Some("blackmail"), "FdtBlackmail")
        .fdt(Some("noblackmail"), "FdtNone")
        .build()
}

pub(super) fn build(p: &Params) -> Result<(Vec<SuiteModel>, Vec<GoldenEntry>), ValidationErrors> {
    let (e, prior) = (p.get("error"), p.get("payer_prior"));
    let cdt = cdt_model(&e, &prior)?;
    let models = vec![
        suite_model(Theory::Edt, cdt.clone()),
        suite_model(Theory::Cdt, cdt),
        suite_model(Theory::Fdt, fdt_model(&e, &prior)?),
    ];
    let blackmailed = [("pay", int(-1000)), ("refuse", int(-MILLION))];
    // Without errors no refuser is ever blackmailed.
    let edt: Vec<(&str, Rational)> = blackmailed
        .iter()
        .filter(|(act, _)| *act == "pay" || !e.is_zero())
        .cloned()
        .collect();
    let golden = vec![
        golden_eu(
            "edt",
            Theory::Edt,
            Some("blackmail"),
            &edt,
            "once blackmailed, paying is cheaper",
        ),
        golden_eu(
            "cdt",
            Theory::Cdt,
            Some("blackmail"),
            &blackmailed,
            "once blackmailed, paying is cheaper",
        ),
        golden_eu(
            "fdt",
            Theory::Fdt,
            Some("blackmail"),
            &[("pay", int(-1000)), ("refuse", -(&e * million()))],
            "refusers are blackmailed only by mistake",
        ),
    ];
    Ok((models, golden))
}
