use super::*;
use crate::model::ModelBuilder;

pub(super) fn params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::new(
            "ray_prob",
            rat(1, 1_000_000),
            "probability a cosmic ray flips the act",
        )
        .lower(Rational::zero(), true)
        .upper(Rational::one(), false),
        ParamSpec::open_unit(
            "disposition_prior",
            rat(1, 1_000_000_000),
            "prior that the agent is disposed to take 100",
        ),
    ]
}

const ACTS: [&str; 2] = ["take1", "take100"];

fn money(act: &str) -> i64 {
    if act == "take1" {
        1
    } else {
        100
    }
}

fn utility(act: &str, ray: &str) -> Rational {
    int(money(act) - if ray == "hit" { 1000 } else { 0 })
}

fn model(r: &Rational, d: &Rational) -> Result<Model, ValidationErrors> {
    ModelBuilder::new("cosmic_ray")
        .root("Disposition", &ACTS, &[one() - d, d.clone()])
        .root("Ray", &["hit", "clear"], &split(r))
        .det("Act", &ACTS, &["Disposition", "Ray"], |r| {
            let flipped = if r[0] == "take1" { "take100" } else { "take1" };
            if r[1] == "hit" { flipped } else { r[0] }.to_string()
        })
        .utility("V", &["Act", "Ray"], |r| utility(r[0], r[1]))
        .fdt(None, "Disposition")
        .build()
}

pub(super) fn build(p: &Params) -> Result<(Vec<SuiteModel>, Vec<GoldenEntry>), ValidationErrors> {
    let (r, d) = (p.get("ray_prob"), p.get("disposition_prior"));
    let m = model(&r, &d)?;
    let models = Theory::ALL
        .iter()
        .map(|t| suite_model(*t, m.clone()))
        .collect();
    let clear = one() - &r;
    let unlikely = one() - &d;
    // Conditioning on the act: it was either intended or flipped by a ray.
    let edt_value = |intended: &Rational, flipped: &Rational, act: &str| {
        let cash = int(money(act));
        (intended * &clear * &cash + flipped * &r * (&cash - int(1000)))
            / (intended * &clear + flipped * &r)
    };
    let thousand = int(1000);
    let golden = vec![
        golden_eu(
            "edt",
            Theory::Edt,
            None,
            &[
                ("take1", edt_value(&unlikely, &d, "take1")),
                ("take100", edt_value(&d, &unlikely, "take100")),
            ],
            "taking 100 is strong evidence of a ray",
        ),
        golden_eu(
            "cdt",
            Theory::Cdt,
            None,
            &[
                ("take1", one() - &thousand * &r),
                ("take100", int(100) - &thousand * &r),
            ],
            "the ray is independent of the intervention",
        ),
        golden_eu(
            "fdt",
            Theory::Fdt,
            None,
            &[
                ("take1", one() - int(901) * &r),
                ("take100", int(100) - int(1099) * &r),
            ],
            "the ray flips the output of either policy",
        ),
    ];
    Ok((models, golden))
}
