use proptest::prelude::*;

use vbd_core::store::{Graph, Term, Triple};
use vbd_core::turtle::{parse_turtle, parse_turtle_into, serialize_turtle, PrefixTable};

const NS: &str = "http://example.org/t#";

fn iri() -> impl Strategy<Value = Term> {
    prop_oneof![
        "[A-Za-z_][A-Za-z0-9_.-]{0,8}".prop_map(|l| Term::iri(format!("{NS}{l}"))),
        "[0-9a-z/#.~%:-]{0,10}".prop_map(|l| Term::iri(format!("{NS}{l}"))),
        ".{0,8}".prop_map(|l| Term::iri(format!("http://example.org/raw/{l}"))),
        Just(Term::iri("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")),
    ]
}

fn subject() -> impl Strategy<Value = Term> {
    prop_oneof![4 => iri(), 1 => "[a-z][a-z0-9]{0,4}".prop_map(|l| Term::iri(format!("_:{l}")))]
}

fn object() -> impl Strategy<Value = Term> {
    prop_oneof![
        3 => subject(),
        2 => ".{0,12}".prop_map(Term::string),
        1 => any::<i64>().prop_map(Term::integer),
        1 => any::<bool>().prop_map(Term::boolean),
        1 => (any::<i32>(), 0u32..100_000).prop_map(|(i, f)| Term::decimal(&format!("{i}.{f}")).unwrap()),
    ]
}

fn graph() -> impl Strategy<Value = Graph> {
    prop::collection::vec((subject(), iri(), object()), 0..30).prop_map(|ts| {
        let mut g = Graph::new();
        for (s, p, o) in ts {
            g.insert(Triple::new(s, p, o)).unwrap();
        }
        g
    })
}

fn prefixes() -> impl Strategy<Value = PrefixTable> {
    any::<bool>().prop_map(|with_default| {
        let mut p = PrefixTable::standard();
        if with_default {
            p.insert("", NS);
            p.insert("raw", "http://example.org/raw/");
        }
        p
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(600))]

    #[test]
    fn parse_inverts_serialize(g in graph(), p in prefixes()) {
        let text = serialize_turtle(&g, &p);
        let (back, _) = parse_turtle(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
        prop_assert_eq!(back.triple_set(), g.triple_set());
        prop_assert_eq!(serialize_turtle(&back, &p), text);
    }
}

#[test]
fn syntax_errors_carry_positions() {
    let err = parse_turtle("@prefix : <http://x/> .\n:a :b \"open .\n").unwrap_err();
    assert_eq!(err.line, 2);
    let err = parse_turtle("@prefix : <http://x/> .\n:a :b :c ;;; \n:d .").unwrap_err();
    assert!(err.line >= 2);
    assert!(parse_turtle_into("nope:a nope:b nope:c .", &mut PrefixTable::standard()).is_err());
}
