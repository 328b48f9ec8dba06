use super::*;
use crate::corpus;
use crate::model::ModelBuilder;
use crate::rational::{int, rat};

const TINY: &str = r#"
dilemma "tiny"
# one act, one utility
var Act in {a, b} prior {a: 1/2, b: 0.5}
utility V(Act) { (a) -> 1; (b) -> -3/4 }
designate act=Act value=V fdt {∅: Act}
"#;

fn errors(text: &str) -> Vec<ParseError> {
    parse(text).unwrap_err().0
}

#[test]
fn parses_a_tiny_model() {
    let m = parse(TINY).unwrap();
    assert_eq!(m.name(), "tiny");
    assert_eq!(m.actions(), ["a", "b"]);
    assert_eq!(
        m.variable("Act").unwrap().cpt_row(&[]).unwrap(),
        [rat(1, 2), rat(1, 2)]
    );
    assert_eq!(m.utility().utility_value(&["b".into()]), Some(&rat(-3, 4)));
}

#[test]
fn trivial_model_serializes_to_one_var_and_one_utility() {
    let m = ModelBuilder::new("t")
        .root("Act", &["a"], &[int(1)])
        .utility("V", &["Act"], |_| int(0))
        .build()
        .unwrap();
    let text = serialize(&m);
    assert_eq!(
        text,
        "dilemma \"t\"\n\nvar Act in {a} prior {a: 1}\nutility V(Act) {\n  (a) -> 0;\n}\n\ndesignate act=Act value=V fdt {}\n"
    );
    assert_eq!(parse(&text).unwrap(), m);
}

#[test]
fn corpus_models_round_trip() {
    for name in corpus::DILEMMAS {
        for sm in corpus::load_default(name).unwrap().models {
            let text = serialize(&sm.model);
            assert_eq!(parse(&text).unwrap(), sm.model, "{name}/{}", sm.label);
            assert_eq!(serialize(&parse(&text).unwrap()), text);
        }
    }
}

#[test]
fn empty_input_is_a_syntax_error_at_the_start() {
    let e = errors("");
    assert_eq!(e.len(), 1);
    assert_eq!(e[0].kind, ErrorKind::Syntax);
    assert_eq!(
        e[0].span,
        SourceSpan {
            line: 1,
            column: 1,
            length: 1
        }
    );
}

#[test]
fn non_normalized_row_names_the_row() {
    let text = TINY.replace("b: 0.5", "b: 0.51");
    let e = errors(&text);
    assert_eq!(e.len(), 1);
    assert_eq!(e[0].kind, ErrorKind::Semantic);
    assert!(e[0].message.contains("sums to 101/100"), "{}", e[0].message);
    assert_eq!((e[0].span.line, e[0].span.column), (4, 25));
}

#[test]
fn unknown_parent_points_at_the_parent() {
    let text = TINY.replace("utility V(Act)", "utility V(Actt)");
    let e = errors(&text);
    assert!(e.iter().any(|e| e.message.contains("unknown parent `Actt`")
        && e.span
            == SourceSpan {
                line: 5,
                column: 11,
                length: 4
            }));
}

#[test]
fn exponent_literals_are_rejected() {
    let e = errors(&TINY.replace("0.5", "0.5e0"));
    assert_eq!(e[0].kind, ErrorKind::Lex);
    assert!(e[0].message.contains("0.5e0"));
}

#[test]
fn lex_errors_carry_positions() {
    let e = errors("var @");
    assert_eq!(e[0].kind, ErrorKind::Lex);
    assert_eq!(
        e[0].span,
        SourceSpan {
            line: 1,
            column: 5,
            length: 1
        }
    );
    assert!(e[0].message.contains('@'));
    let e = errors("dilemma \"open");
    assert!(e[0].message.contains("unterminated"));
}

#[test]
fn syntax_errors_recover_at_the_next_stanza() {
    let text = "var A in {a} prior {a 1}\nvar B in {b} prior {b: 1}\nutility V( {\n";
    let e = errors(text);
    assert_eq!(e.len(), 2);
    assert_eq!(e[0].span.line, 1);
    assert!(e[0].message.contains("found `1`"));
    assert_eq!(e[1].span.line, 3);
}

#[test]
fn missing_designate_is_semantic() {
    let e = errors("var A in {a} prior {a: 1}");
    assert_eq!(e[0].kind, ErrorKind::Semantic);
    assert!(e[0].message.contains("designate"));
}

#[test]
fn det_domain_defaults_to_outputs_in_order() {
    let text = TINY.replace(
        "utility V(Act)",
        "det W(Act) { (a) -> y; (b) -> x }\nutility V(Act)",
    );
    let m = parse(&text).unwrap();
    assert_eq!(m.variable("W").unwrap().domain(), ["y", "x"]);
}

#[test]
fn odd_names_are_quoted() {
    let m = ModelBuilder::new("we\"ird\nname")
        .root(
            "Act",
            &["a b", "∅", "x/y"],
            &[rat(1, 3), rat(1, 3), rat(1, 3)],
        )
        .utility("V", &["Act"], |_| int(0))
        .fdt(None, "Act")
        .build()
        .unwrap();
    let text = serialize(&m);
    assert!(text.contains("\"a b\""));
    assert_eq!(parse(&text).unwrap(), m);
}

#[test]
fn invalid_utf8_is_a_lex_error() {
    let e = parse_bytes(b"var A\n in \xff").unwrap_err().0;
    assert_eq!(e[0].kind, ErrorKind::Lex);
    assert_eq!((e[0].span.line, e[0].span.column), (2, 5));
}

#[test]
fn serialization_is_deterministic() {
    let m = corpus::load_default("transparent_newcomb").unwrap().models[2]
        .model
        .clone();
    assert_eq!(serialize(&m), serialize(&m));
}
