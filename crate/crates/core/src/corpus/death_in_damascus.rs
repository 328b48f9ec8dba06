use super::*;
use crate::model::ModelBuilder;

pub(super) fn params() -> Vec<ParamSpec> {
    vec![
        ParamSpec::non_negative("flee_cost", int(1000), "cost of travelling to Aleppo"),
        ParamSpec::non_negative("coin_price", int(1), "price of the coin"),
        ParamSpec::flag("include_coin", "offer a fair coin as a third action"),
        ParamSpec::open_unit(
            "stay_prior",
            rat(1, 2),
            "prior probability of staying in Damascus",
        ),
    ]
}

struct Costs {
    flee: Rational,
    coin: Rational,
}

fn actions(coin: bool) -> Vec<&'static str> {
    let mut acts = vec!["damascus", "aleppo"];
    if coin {
        acts.push("coin");
    }
    acts
}

/// Prior over the actions; with the coin each city keeps its relative weight
/// and the coin takes a third.
fn prior(stay: &Rational, coin: bool) -> Vec<Rational> {
    if !coin {
        return split(stay).to_vec();
    }
    let third = rat(1, 3);
    vec![
        &third * int(2) * stay,
        &third * int(2) * (one() - stay),
        third,
    ]
}

/// Death goes wherever the book says; a coin-flipper is booked for Damascus.
fn book(b: ModelBuilder, parent: &str, coin: bool) -> ModelBuilder {
    let mut pairs = vec![("damascus", "damascus"), ("aleppo", "aleppo")];
    if coin {
        pairs.push(("coin", "damascus"));
    }
    b.map("Book", &["damascus", "aleppo"], parent, &pairs)
}

fn finish(b: ModelBuilder, coin: bool, costs: &Costs) -> ModelBuilder {
    let b = if coin {
        b.root("Coin", &["heads", "tails"], &split(&rat(1, 2))).det(
            "Location",
            &["damascus", "aleppo"],
            &["Act", "Coin"],
            |r| {
                match (r[0], r[1]) {
                    ("coin", "heads") => "damascus",
                    ("coin", _) => "aleppo",
                    (city, _) => city,
                }
                .to_string()
            },
        )
    } else {
        b.map(
            "Location",
            &["damascus", "aleppo"],
            "Act",
            &[("damascus", "damascus"), ("aleppo", "aleppo")],
        )
    };
    let (flee, price) = (costs.flee.clone(), costs.coin.clone());
    let parents: &[&str] = if coin {
        &["Location", "Book", "Act"]
    } else {
        &["Location", "Book"]
    };
    b.utility("V", parents, move |r| {
        let mut v = if r[0] != r[1] { million() } else { int(0) };
        if r[0] == "aleppo" {
            v -= &flee;
        }
        if r.get(2) == Some(&"coin") {
            v -= &price;
        }
        v
    })
}

fn copy(b: ModelBuilder, name: &str, parent: &str, coin: bool) -> ModelBuilder {
    let acts = actions(coin);
    let pairs: Vec<(&str, &str)> = acts.iter().map(|a| (*a, *a)).collect();
    b.map(name, &acts, parent, &pairs)
}

fn model(
    theory: Theory,
    stay: &Rational,
    coin: bool,
    costs: &Costs,
) -> Result<Model, ValidationErrors> {
    let acts = actions(coin);
    let prior = prior(stay, coin);
    let b = ModelBuilder::new("death_in_damascus");
    let b = match theory {
        Theory::Edt => book(b.root("Act", &acts, &prior), "Act", coin),
        Theory::Cdt => {
            let b = copy(
                b.root("Disposition", &acts, &prior),
                "Act",
                "Disposition",
                coin,
            );
            book(b, "Disposition", coin)
        }
        Theory::Fdt => {
            let b = copy(b.root("Fdt", &acts, &prior), "Act", "Fdt", coin);
            book(b, "Fdt", coin).fdt(None, "Fdt")
        }
    };
    finish(b, coin, costs).build()
}

pub(super) fn build(p: &Params) -> Result<(Vec<SuiteModel>, Vec<GoldenEntry>), ValidationErrors> {
    let costs = Costs {
        flee: p.get("flee_cost"),
        coin: p.get("coin_price"),
    };
    let coin = p.get("include_coin").is_one();
    let stay = p.get("stay_prior");
    let models = Theory::ALL
        .iter()
        .map(|t| Ok(suite_model(*t, model(*t, &stay, coin, &costs)?)))
        .collect::<Result<Vec<_>, ValidationErrors>>()?;

    let coin_value = (million() - &costs.flee) / int(2) - &costs.coin;
    let prior = prior(&stay, coin);
    let booked_damascus = if coin {
        &prior[0] + &prior[2]
    } else {
        prior[0].clone()
    };
    let booked_aleppo = prior[1].clone();
    let mut foreseen = vec![("damascus", int(0)), ("aleppo", -costs.flee.clone())];
    let mut severed = vec![
        ("damascus", (one() - booked_damascus) * million()),
        ("aleppo", (one() - booked_aleppo) * million() - &costs.flee),
    ];
    if coin {
        foreseen.push(("coin", coin_value.clone()));
        severed.push(("coin", coin_value));
    }
    let golden = vec![
        golden_eu(
            "edt",
            Theory::Edt,
            None,
            &foreseen,
            "death is wherever the agent goes",
        ),
        golden_eu(
            "cdt",
            Theory::Cdt,
            None,
            &severed,
            "the book is fixed by the prior",
        ),
        golden_eu(
            "fdt",
            Theory::Fdt,
            None,
            &foreseen,
            "death reads the decision function",
        ),
    ];
    Ok((models, golden))
}
