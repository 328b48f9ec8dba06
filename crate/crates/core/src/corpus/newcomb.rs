use super::*;
use crate::model::ModelBuilder;

pub(super) fn params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::closed_unit(
            "accuracy",
            rat(99, 100),
            "probability the predictor is accurate",
        ),
        ParamSpec::open_unit("act_prior", rat(1, 2), "prior probability of one-boxing"),
    ]
}

/// Box B payout by action and contents.
pub(super) fn payoff(action: &str, box_b: &str) -> Rational {
    let b = if box_b == "full" { MILLION } else { 0 };
    let a = if action == "twobox" { 1000 } else { 0 };
    int(a + b)
}

fn prediction(disposition_one_box: bool, accurate: &str) -> String {
    if disposition_one_box == (accurate == "accurate") {
        "1"
    } else {
        "2"
    }
    .into()
}

fn base(name: &str) -> ModelBuilder {
    ModelBuilder::new(name)
}

fn accurate(b: ModelBuilder, accuracy: &Rational) -> ModelBuilder {
    b.root("Accurate", &["accurate", "inaccurate"], &split(accuracy))
}

fn box_b(b: ModelBuilder) -> ModelBuilder {
    b.map(
        "BoxB",
        &["full", "empty"],
        "Prediction",
        &[("1", "full"), ("2", "empty")],
    )
}

/// The evidential agent's network: the act is a root and the predisposition
/// is read off it.
pub fn edt_model(accuracy: &Rational, act_prior: &Rational) -> Result<Model, ValidationErrors> {
    let b = base("newcomb").root("Act", &["onebox", "twobox"], &split(act_prior));
    let b = accurate(b, accuracy)
        .map(
            "Predisposition",
            &["oneboxer", "twoboxer"],
            "Act",
            &[("onebox", "oneboxer"), ("twobox", "twoboxer")],
        )
        .det(
            "Prediction",
            &["1", "2"],
            &["Predisposition", "Accurate"],
            |r| prediction(r[0] == "oneboxer", r[1]),
        );
    box_b(b)
        .det(
            "Outcome",
            &["1f", "1e", "2f", "2e"],
            &["Act", "BoxB"],
            |r| {
                let n = if r[0] == "onebox" { "1" } else { "2" };
                let c = if r[1] == "full" { "f" } else { "e" };
                format!("{n}{c}")
            },
        )
        .utility("V", &["Outcome"], |r| {
            let action = if r[0].starts_with('1') {
                "onebox"
            } else {
                "twobox"
            };
            let contents = if r[0].ends_with('f') { "full" } else { "empty" };
            payoff(action, contents)
        })
        .build()
}

/// The causal agent's graph: the predisposition causes both the act and the
/// prediction.
pub fn cdt_model(accuracy: &Rational, act_prior: &Rational) -> Result<Model, ValidationErrors> {
    let b = base("newcomb").root(
        "Predisposition",
        &["oneboxer", "twoboxer"],
        &split(act_prior),
    );
    let b = accurate(b, accuracy)
        .map(
            "Act",
            &["onebox", "twobox"],
            "Predisposition",
            &[("oneboxer", "onebox"), ("twoboxer", "twobox")],
        )
        .det(
            "Prediction",
            &["1", "2"],
            &["Predisposition", "Accurate"],
            |r| prediction(r[0] == "oneboxer", r[1]),
        );
    box_b(b)
        .utility("V", &["Act", "BoxB"], |r| payoff(r[0], r[1]))
        .build()
}

/// The functional agent's graph: the decision function's output drives both
/// the act and the prediction.
pub fn fdt_model(accuracy: &Rational, act_prior: &Rational) -> Result<Model, ValidationErrors> {
    let b = base("newcomb").root("Fdt", &["onebox", "twobox"], &split(act_prior));
    let b = accurate(b, accuracy)
        .map(
            "Act",
            &["onebox", "twobox"],
            "Fdt",
            &[("onebox", "onebox"), ("twobox", "twobox")],
        )
        .det("Prediction", &["1", "2"], &["Fdt", "Accurate"], |r| {
            prediction(r[0] == "onebox", r[1])
        });
    box_b(b)
        .utility("V", &["Act", "BoxB"], |r| payoff(r[0], r[1]))
        .fdt(None, "Fdt")
        .build()
}

/// `[onebox, twobox]` expected utilities when the act tracks the prediction
/// with the given accuracy.
pub(super) fn correlated_values(accuracy: &Rational) -> [Rational; 2] {
    let a = accuracy;
    [
        a * million(),
        a * int(1000) + (one() - a) * int(MILLION + 1000),
    ]
}

/// `[onebox, twobox]` when the act is severed from a predisposition with
/// prior `act_prior`.
pub(super) fn severed_values(accuracy: &Rational, act_prior: &Rational) -> [Rational; 2] {
    let full = act_prior * accuracy + (one() - act_prior) * (one() - accuracy);
    [&full * million(), &full * million() + int(1000)]
}

pub(super) fn build(p: &Params) -> Result<(Vec<SuiteModel>, Vec<GoldenEntry>), ValidationErrors> {
    let (acc, prior) = (p.get("accuracy"), p.get("act_prior"));
    let models = vec![
        suite_model(Theory::Edt, edt_model(&acc, &prior)?),
        suite_model(Theory::Cdt, cdt_model(&acc, &prior)?),
        suite_model(Theory::Fdt, fdt_model(&acc, &prior)?),
    ];
    let [c1, c2] = correlated_values(&acc);
    let [s1, s2] = severed_values(&acc, &prior);
    let golden = vec![
        golden_eu(
            "edt",
            Theory::Edt,
            None,
            &[("onebox", c1.clone()), ("twobox", c2.clone())],
            "conditioning on the act; the one-box value follows from the network tables",
        ),
        golden_eu(
            "cdt",
            Theory::Cdt,
            None,
            &[("onebox", s1), ("twobox", s2)],
            "two-boxing is worth exactly 1,000 more under intervention",
        ),
        golden_eu(
            "fdt",
            Theory::Fdt,
            None,
            &[("onebox", c1), ("twobox", c2)],
            "intervening on the decision function moves the prediction",
        ),
    ];
    Ok((models, golden))
}
