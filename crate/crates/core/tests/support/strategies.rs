//! Random grammars for property tests.

#![allow(dead_code)]

use gramcov_core::grammar::{Annotation, Element, Grammar, LexEntry, Metavar, Path, Repetition, Rule, RhsItem};
use proptest::prelude::*;

pub const CATS: [&str; 5] = ["S", "A", "B", "N", "V"];
pub const ATTRS: [&str; 4] = ["SUBJ", "OBJ", "CASE", "ADJ-UNCT"];

pub fn path(up_only: bool) -> impl Strategy<Value = Path> {
    let root = if up_only {
        Just(Metavar::Up).boxed()
    } else {
        prop_oneof![Just(Metavar::Up), Just(Metavar::Down)].boxed()
    };
    (root, proptest::collection::vec(proptest::sample::select(&ATTRS[..]), 0..3)).prop_map(|(root, attrs)| Path {
        root,
        attrs: attrs.into_iter().map(String::from).collect(),
    })
}

pub fn annotation(up_only: bool) -> impl Strategy<Value = Annotation> {
    let leaf = prop_oneof![
        (path(up_only), path(up_only)).prop_map(|(a, b)| Annotation::PathEq(a, b)),
        (path(up_only), proptest::sample::select(vec!["nom", "dat", "pl", "x_1"]))
            .prop_map(|(p, a)| Annotation::AtomEq(p, a.to_string())),
        (path(up_only), path(up_only)).prop_map(|(a, b)| Annotation::Membership(a, b)),
        path(up_only).prop_map(Annotation::NonExistence),
    ];
    leaf.prop_recursive(2, 12, 3, |inner| {
        proptest::collection::vec(proptest::collection::vec(inner, 1..3), 2..4).prop_map(Annotation::Disjunction)
    })
}

/// `sparse` allows at most one annotation per list, which keeps brute-force
/// expansion of disjunctions cheap.
pub fn annotations(up_only: bool, sparse: bool) -> impl Strategy<Value = Vec<Annotation>> {
    proptest::collection::vec(annotation(up_only), 0..if sparse { 2 } else { 3 })
}

pub fn rhs_item(sparse: bool) -> impl Strategy<Value = RhsItem> {
    rhs_item_over(CATS.to_vec(), sparse)
}

pub fn rhs_item_over(cats: Vec<&'static str>, sparse: bool) -> impl Strategy<Value = RhsItem> {
    rhs_item_nested(cats, sparse, 2)
}

pub fn rhs_item_nested(cats: Vec<&'static str>, sparse: bool, depth: u32) -> impl Strategy<Value = RhsItem> {
    let rep = prop_oneof![
        Just(Repetition::One),
        Just(Repetition::Optional),
        Just(Repetition::Star),
        Just(Repetition::Plus)
    ];
    let leaf = prop_oneof![
        4 => (proptest::sample::select(cats), rep, annotations(false, sparse)).prop_map(|(c, repetition, annotations)| {
            RhsItem::Element(Element {
                category: c.to_string(),
                repetition,
                annotations,
            })
        }),
        1 => annotations(false, sparse).prop_map(RhsItem::Empty),
    ];
    leaf.prop_recursive(depth, 10, 3, |inner| {
        proptest::collection::vec(proptest::collection::vec(inner, 1..3), 2..4).prop_map(RhsItem::Disjunction)
    })
}

pub fn grammar_with(surfaces: Vec<&'static str>, sparse: bool) -> impl Strategy<Value = Grammar> {
    let rules = proptest::sample::subsequence(CATS.to_vec(), 1..=CATS.len()).prop_flat_map(move |lhss| {
        let n = lhss.len();
        (Just(lhss), proptest::collection::vec(proptest::collection::vec(rhs_item(sparse), 1..4), n))
    });
    let lexicon = proptest::collection::vec(
        (proptest::sample::select(surfaces), proptest::sample::select(&CATS[..]), annotations(true, sparse)),
        0..4,
    );
    let features = proptest::sample::subsequence(ATTRS.to_vec(), 0..=ATTRS.len());
    (rules, lexicon, features).prop_map(|((lhss, rhss), lex, features)| Grammar {
        start_symbol: lhss[0].to_string(),
        declared_functions: features.into_iter().map(String::from).collect(),
        rules: lhss
            .iter()
            .zip(rhss)
            .map(|(l, rhs)| Rule {
                lhs: l.to_string(),
                rhs,
            })
            .collect(),
        lexicon: lex
            .into_iter()
            .map(|(s, c, annotations)| LexEntry {
                surface: s.to_string(),
                category: c.to_string(),
                annotations,
            })
            .collect(),
    })
}

pub fn grammar() -> impl Strategy<Value = Grammar> {
    grammar_with(vec!["John", "e", "in", "it's", "x->y", "über", "a-b"], false)
}

/// Rules for `S`, `A` and `B`, where each only mentions later categories
/// and the preterminals `X` and `Y`, so no category can derive itself.
pub fn acyclic_grammar(surfaces: Vec<&'static str>, sparse: bool) -> impl Strategy<Value = Grammar> {
    const LEVELS: [&str; 3] = ["S", "A", "B"];
    let rhss: Vec<_> = (0..LEVELS.len())
        .map(|i| {
            let mut cats = LEVELS[i + 1..].to_vec();
            cats.extend(["X", "Y"]);
            proptest::collection::vec(rhs_item_nested(cats, sparse, 1), 1..4)
        })
        .collect();
    let lexicon = proptest::collection::vec(
        (
            proptest::sample::select(surfaces),
            proptest::sample::select(vec!["A", "B", "X", "Y", "X", "Y"]),
            annotations(true, sparse),
        ),
        2..6,
    );
    (rhss, lexicon).prop_map(|(rhss, lex)| Grammar {
        start_symbol: LEVELS[0].to_string(),
        declared_functions: ATTRS.iter().map(|a| a.to_string()).collect(),
        rules: LEVELS
            .iter()
            .zip(rhss)
            .map(|(l, rhs)| Rule {
                lhs: l.to_string(),
                rhs,
            })
            .collect(),
        lexicon: lex
            .into_iter()
            .map(|(s, c, annotations)| LexEntry {
                surface: s.to_string(),
                category: c.to_string(),
                annotations,
            })
            .collect(),
    })
}
