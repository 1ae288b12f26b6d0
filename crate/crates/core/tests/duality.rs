//! Scheme files under `tests/data`: parsing, canonical text, and counting
//! through interpretations.

mod common;

use std::path::PathBuf;

use polyseq::gallery::{oracle, GalleryParams};
use polyseq::interp::{apply_interpretation, parse_scheme, translate_formula, InterpError, Scheme};
use polyseq::logic::{count_satisfying, parse_formula};
use polyseq::structures::{build_basic, graphs, weakly_isomorphic, BasicStructureSpec, Signature};

use common::*;

fn data(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

const PLAIN: [&str; 4] = ["crown.int", "complement.int", "marked_core.int", "pairs.int"];

#[test]
fn canonical_text_round_trips() {
    for file in PLAIN.iter().chain(&["line.int"]) {
        let s = parse_scheme(&data(file)).unwrap();
        let text = s.to_text();
        let again = parse_scheme(&text).unwrap();
        assert_eq!(again, s, "{file}");
        assert_eq!(again.to_text(), text, "{file}");
    }
}

#[test]
fn translated_formulas_count_the_image() {
    let mut r = rng(41);
    for file in PLAIN {
        let scheme = parse_scheme(&data(file)).unwrap();
        let plain = scheme.to_plain().unwrap();
        let target = scheme.target();
        for round in 0..40 {
            let vars = rand::Rng::gen_range(&mut r, 1..=2);
            let f = random_formula(&mut r, &target, vars, 4);
            let names = var_names("z", vars);
            let declared: Vec<&str> = names.iter().map(String::as_str).collect();
            let phi = parse_formula(&f.text(&names), &target, Some(&declared)).unwrap();
            let n = rand::Rng::gen_range(&mut r, 0..=4);
            let a = if *scheme.source() == Signature::graph() {
                random_graph(&mut r, n, 0.5)
            } else {
                random_structure(&mut r, scheme.source(), n, 0.4)
            };
            let image = scheme.apply(&a, None, 0).unwrap();
            assert_eq!(image, apply_interpretation(&plain, &a).unwrap().structure, "{file}");
            let direct = brute_count(&f, &image, vars);
            let pulled = count_satisfying(&translate_formula(&plain, &phi).unwrap(), &a).unwrap();
            assert_eq!(direct, pulled, "{file} round {round}: {}", f.text(&names));
        }
    }
}

#[test]
fn crown_file_builds_crowns() {
    let scheme = parse_scheme(&data("crown.int")).unwrap();
    for n in 0..=5 {
        let b = build_basic(&BasicStructureSpec::new(1, 2, vec![n]));
        let crown = scheme.apply(&b, None, 0).unwrap();
        let direct = oracle("crown", &GalleryParams::default(), n as u64).unwrap();
        assert!(weakly_isomorphic(&crown, &direct).unwrap(), "n = {n}");
    }
}

#[test]
fn line_file_certifies_classes() {
    let scheme = parse_scheme(&data("line.int")).unwrap();
    assert!(matches!(scheme, Scheme::Quotient(_)));
    assert_eq!(scheme.certificate_degree(), 0);
    for m in 2..=5usize {
        let line = scheme.apply(&graphs::complete(m), Some(m as u64), 7).unwrap();
        assert_eq!(line.domain_size(), m * (m - 1) / 2);
        assert_eq!(graphs::edge_count(&line), m * (m - 1) * (m - 2) / 2);
    }
    // A star's line graph is complete.
    let line = scheme.apply(&graphs::star(5), None, 7).unwrap();
    assert!(weakly_isomorphic(&line, &graphs::complete(4)).unwrap());
}

#[test]
fn arity_errors_name_the_symbol() {
    let err = parse_scheme(&data("bad_arity.int")).unwrap_err();
    let InterpError::Parse { line, message, .. } = &err else {
        panic!("{err:?}");
    };
    assert_eq!(*line, 4);
    assert!(message.contains("`E`"), "{message}");
}
