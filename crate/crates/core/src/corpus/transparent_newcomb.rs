use super::*;
use crate::model::ModelBuilder;

pub(super) fn params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::closed_unit(
            "accuracy",
            rat(99, 100),
            "probability the predictor is accurate",
        ),
        ParamSpec::closed_unit(
            "q",
            int(1),
            "prior that the agent two-boxes on seeing an empty box",
        ),
        ParamSpec::open_unit(
            "act_prior",
            rat(1, 2),
            "prior that the agent one-boxes on seeing a full box",
        ),
    ]
}

const ACTS: [&str; 2] = ["onebox", "twobox"];

fn prediction(one_box: bool, accurate: &str) -> String {
    if one_box == (accurate == "accurate") {
        "1"
    } else {
        "2"
    }
    .into()
}

fn tail(b: ModelBuilder) -> ModelBuilder {
    b.map(
        "BoxB",
        &["full", "empty"],
        "Prediction",
        &[("1", "full"), ("2", "empty")],
    )
    .map(
        "Obs",
        &["full", "empty"],
        "BoxB",
        &[("full", "full"), ("empty", "empty")],
    )
}

/// Shared by the evidential and causal agents: the observation feeds the act,
/// and a two-boxing disposition two-boxes whatever it sees.
fn cdt_model(accuracy: &Rational, act_prior: &Rational) -> Result<Model, ValidationErrors> {
    let b = ModelBuilder::new("transparent_newcomb")
        .root(
            "Predisposition",
            &["oneboxer", "twoboxer"],
            &split(act_prior),
        )
        .root("Accurate", &["accurate", "inaccurate"], &split(accuracy))
        .det(
            "Prediction",
            &["1", "2"],
            &["Predisposition", "Accurate"],
            |r| prediction(r[0] == "oneboxer", r[1]),
        );
    tail(b)
        .det("Act", &ACTS, &["Predisposition", "Obs"], |r| {
            if r[1] == "full" && r[0] == "oneboxer" {
                "onebox"
            } else {
                "twobox"
            }
            .into()
        })
        .utility("V", &["Act", "BoxB"], |r| newcomb::payoff(r[0], r[1]))
        .obs("Obs")
        .build()
}

/// One decision-function node per observation; the prediction decides which
/// of them the act follows.
fn fdt_model(
    accuracy: &Rational,
    act_prior: &Rational,
    q: &Rational,
) -> Result<Model, ValidationErrors> {
    let b = ModelBuilder::new("transparent_newcomb")
        .root("FdtFull", &ACTS, &split(act_prior))
        .root("FdtEmpty", &ACTS, &[one() - q, q.clone()])
        .root("Accurate", &["accurate", "inaccurate"], &split(accuracy))
        .det("Prediction", &["1", "2"], &["FdtFull", "Accurate"], |r| {
            prediction(r[0] == "onebox", r[1])
        });
    tail(b)
        .det("Act", &ACTS, &["FdtFull", "FdtEmpty", "Prediction"], |r| {
            if r[2] == "1" { r[0] } else { r[1] }.to_string()
        })
        .utility("V", &["Act", "BoxB"], |r| newcomb::payoff(r[0], r[1]))
        .obs("Obs")
        .fdt(Some("full"), "FdtFull")
        .fdt(Some("empty"), "FdtEmpty")
        .build()
}

pub(super) fn build(p: &Params) -> Result<(Vec<SuiteModel>, Vec<GoldenEntry>), ValidationErrors> {
    let (a, q, f) = (p.get("accuracy"), p.get("q"), p.get("act_prior"));
    let cdt = cdt_model(&a, &f)?;
    let models = vec![
        suite_model(Theory::Edt, cdt.clone()),
        suite_model(Theory::Cdt, cdt),
        suite_model(Theory::Fdt, fdt_model(&a, &f, &q)?),
    ];
    let inaccurate = one() - &a;
    let thousand = int(1000);
    let full_values = [("onebox", million()), ("twobox", int(MILLION + 1000))];
    // A full box rules out whichever disposition the predictor never misjudges.
    let edt_full: Vec<(&str, Rational)> = full_values
        .iter()
        .filter(|(act, _)| match *act {
            "onebox" => !a.is_zero(),
            _ => !a.is_one(),
        })
        .cloned()
        .collect();
    let fdt_full = [
        ("onebox", &a * million() + &inaccurate * &q * &thousand),
        (
            "twobox",
            &inaccurate * int(MILLION + 1000) + &a * &q * &thousand,
        ),
    ];
    // Intervening on the empty-box function: the full-box function still
    // answers when the box is full.
    let seen_full = &f * &a * million() + (one() - &f) * &inaccurate * int(MILLION + 1000);
    let p_empty = &f * &inaccurate + (one() - &f) * &a;
    let fdt_empty = [
        ("onebox", seen_full.clone()),
        ("twobox", seen_full + p_empty * &thousand),
    ];
    let golden = vec![
        golden_eu(
            "edt",
            Theory::Edt,
            Some("full"),
            &edt_full,
            "seeing a full box, two-boxing adds 1,000",
        ),
        golden_eu(
            "cdt",
            Theory::Cdt,
            Some("full"),
            &full_values,
            "seeing a full box, two-boxing adds 1,000",
        ),
        golden_eu(
            "fdt",
            Theory::Fdt,
            Some("full"),
            &fdt_full,
            "two-boxing makes a full box unlikely to be seen",
        ),
        golden_eu(
            "fdt",
            Theory::Fdt,
            Some("empty"),
            &fdt_empty,
            "on an empty box nothing is lost by two-boxing",
        ),
        golden_eu(
            "cdt",
            Theory::Cdt,
            Some("empty"),
            &[("onebox", int(0)), ("twobox", int(1000))],
            "on an empty box only box A pays",
        ),
        golden_eu(
            "edt",
            Theory::Edt,
            Some("empty"),
            &[("twobox", int(1000))],
            "one-boxing on an empty box has probability zero",
        ),
    ];
    Ok((models, golden))
}
