use super::*;
use crate::model::ModelBuilder;

pub(super) fn params() -> Vec<ParamSpec> {
    Vec::new()
}

const MOVES: [&str; 2] = ["cooperate", "defect"];

fn payoff(mine: &str, theirs: &str) -> Rational {
    int(match (mine, theirs) {
        ("cooperate", "cooperate") => MILLION,
        ("defect", "defect") => 1000,
        ("defect", _) => MILLION + 1000,
        _ => 0,
    })
}

fn copy(b: ModelBuilder, name: &str, parent: &str) -> ModelBuilder {
    b.map(
        name,
        &MOVES,
        parent,
        &[("cooperate", "cooperate"), ("defect", "defect")],
    )
}

fn half() -> [Rational; 2] {
    split(&rat(1, 2))
}

pub(super) fn build(_: &Params) -> Result<(Vec<SuiteModel>, Vec<GoldenEntry>), ValidationErrors> {
    let edt = copy(
        ModelBuilder::new("twin_pd").root("Act", &MOVES, &half()),
        "TwinAct",
        "Act",
    )
    .utility("V", &["Act", "TwinAct"], |r| payoff(r[0], r[1]))
    .build()?;
    let cdt = ModelBuilder::new("twin_pd").root("Disposition", &MOVES, &half());
    let cdt = copy(copy(cdt, "Act", "Disposition"), "TwinAct", "Disposition")
        .utility("V", &["Act", "TwinAct"], |r| payoff(r[0], r[1]))
        .build()?;
    let fdt = ModelBuilder::new("twin_pd").root("Fdt", &MOVES, &half());
    let fdt = copy(copy(fdt, "Act", "Fdt"), "TwinAct", "Fdt")
        .utility("V", &["Act", "TwinAct"], |r| payoff(r[0], r[1]))
        .fdt(None, "Fdt")
        .build()?;
    let models = vec![
        suite_model(Theory::Edt, edt),
        suite_model(Theory::Cdt, cdt),
        suite_model(Theory::Fdt, fdt),
    ];
    let golden = vec![
        golden_eu(
            "edt",
            Theory::Edt,
            None,
            &[("cooperate", million()), ("defect", int(1000))],
            "the twin's move is perfectly correlated with the agent's",
        ),
        golden_eu(
            "cdt",
            Theory::Cdt,
            None,
            &[("cooperate", int(500_000)), ("defect", int(501_000))],
            "defection dominates once the twin is severed",
        ),
        golden_eu(
            "fdt",
            Theory::Fdt,
            None,
            &[("cooperate", million()), ("defect", int(1000))],
            "one decision function drives both players",
        ),
    ];
    Ok((models, golden))
}
