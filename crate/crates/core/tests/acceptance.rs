//! The nine acceptance criteria. Each test writes one `PASS`/`FAIL` line to
//! stderr, outside the harness's capture, and fails when the criterion does.

mod common;

use std::collections::BTreeSet;
use std::io::Write;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use polyseq::counting::{hom_count, ind_count, inj_count, mobius, partitions, quotient};
use polyseq::gallery::{
    bounded_decompose, canonical_form_with_cap, detector_patterns, entries, gallery_build, gallery_check, oracle,
    paley_experiment, scheme_spec, GalleryError, GalleryParams, ENTRY_NAMES, GALLERY_CANON_CAP,
};
use polyseq::interp::{apply_interpretation, apply_quotient, translate_formula, InterpretationScheme, Scheme};
use polyseq::logic::{count_satisfying, parse_formula, qf_to_hom_basis};
use polyseq::sequences::{
    detect_polynomial, is_nice, ordered_sum, ordered_sum_inj, IntPolynomial, OrderedSumNames, Query, SequenceSpec,
    Verdict, DEFAULT_VERIFY_COUNT,
};
use polyseq::structures::{graphs, weakly_isomorphic, Signature, Structure};

use common::*;

const SEED: u64 = 0x5eed;

fn criterion(n: u32, title: &str, limit_secs: u64, body: impl FnOnce() -> Result<String, String>) {
    let start = Instant::now();
    let result = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= Duration::from_secs(limit_secs);
    let (ok, detail) = match result {
        Ok(d) if in_time => (true, d),
        Ok(d) => (false, format!("{d}; over the time limit")),
        Err(e) => (false, e),
    };
    let line = format!(
        "criterion {n} {}: {title}: {detail} [{:.1}s of {limit_secs}s]",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    let _ = writeln!(std::io::stderr().lock(), "{line}");
    assert!(ok, "{line}");
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn big(v: BigUint) -> BigInt {
    v.into()
}

/// Simple graphs on the same vertices whose edge set contains `f`'s.
fn supergraphs(f: &Structure) -> Vec<(usize, Structure)> {
    let k = f.domain_size();
    let missing: Vec<(usize, usize)> = (0..k).tuple_combinations().filter(|&(u, v)| !f.holds(0, &[u, v])).collect();
    let present: Vec<(usize, usize)> = (0..k).tuple_combinations().filter(|&(u, v)| f.holds(0, &[u, v])).collect();
    missing
        .iter()
        .powerset()
        .map(|extra| {
            let edges: Vec<(usize, usize)> = present.iter().chain(extra.iter().copied()).copied().collect();
            (extra.len(), Structure::graph(k, &edges).unwrap())
        })
        .collect()
}

#[test]
fn criterion_1_inversion_identities() {
    criterion(1, "hom/inj/ind inversion identities", 60, || {
        let mut rng = rng(SEED);
        let targets: Vec<Structure> = (0..20)
            .map(|_| {
                let n = rand::Rng::gen_range(&mut rng, 0..=6);
                random_graph(&mut rng, n, 0.5)
            })
            .collect();
        let patterns: Vec<Structure> = (0..=5).flat_map(graphs_up_to_iso).collect();
        let mut checks = 0;
        for f in &patterns {
            let quotients: Vec<(BigInt, Structure)> = partitions(f.domain_size())
                .map(|theta| (mobius(&theta), quotient(f, &theta).unwrap()))
                .collect();
            let supers = supergraphs(f);
            for a in &targets {
                let hom = big(hom_count(f, a).unwrap().value);
                let inj = big(inj_count(f, a).unwrap().value);
                let ind = big(ind_count(f, a).unwrap().value);
                check(
                    hom == brute_hom(f, a).into() && inj == brute_inj(f, a).into() && ind == brute_ind(f, a).into(),
                    || format!("counts disagree with enumeration on {} into {}", f.to_json(), a.to_json()),
                )?;
                let mut hom_sum = BigInt::from(0);
                let mut inj_sum = BigInt::from(0);
                for (mu, q) in &quotients {
                    hom_sum += big(inj_count(q, a).unwrap().value);
                    inj_sum += mu * big(hom_count(q, a).unwrap().value);
                }
                let mut inj_from_ind = BigInt::from(0);
                let mut ind_from_inj = BigInt::from(0);
                for (extra, g) in &supers {
                    inj_from_ind += big(ind_count(g, a).unwrap().value);
                    let term = big(inj_count(g, a).unwrap().value);
                    ind_from_inj += if extra % 2 == 0 { term } else { -term };
                }
                check(hom_sum == hom, || format!("hom = sum inj(F/theta) fails for {}", f.to_json()))?;
                check(inj_sum == inj, || format!("inj = sum mu hom(F/theta) fails for {}", f.to_json()))?;
                check(inj_from_ind == inj, || format!("inj = sum ind(F') fails for {}", f.to_json()))?;
                check(ind_from_inj == ind, || format!("ind inclusion-exclusion fails for {}", f.to_json()))?;
                checks += 1;
            }
        }
        Ok(format!("{} patterns x {} targets, {checks} exact checks", patterns.len(), targets.len()))
    });
}

#[test]
fn criterion_2_hom_basis() {
    criterion(2, "quantifier-free formulas as hom-count combinations", 120, || {
        let mut rng = rng(SEED + 2);
        let sig = Signature::new([("E", 2), ("U", 1)]).unwrap();
        let structures: Vec<Structure> = (0..20)
            .map(|_| {
                let n = rand::Rng::gen_range(&mut rng, 0..=5);
                random_structure(&mut rng, &sig, n, 0.4)
            })
            .collect();
        let mut terms = 0;
        for i in 0..100 {
            let vars = rand::Rng::gen_range(&mut rng, 1..=3);
            let f = random_formula(&mut rng, &sig, vars, 4);
            let names = var_names("x", vars);
            let declared: Vec<&str> = names.iter().map(String::as_str).collect();
            let text = f.text(&names);
            let phi = parse_formula(&text, &sig, Some(&declared)).map_err(|e| format!("`{text}`: {e}"))?;
            let basis = qf_to_hom_basis(&phi).map_err(|e| format!("`{text}`: {e}"))?;
            terms += basis.len();
            for a in &structures {
                let expected = brute_count(&f, a, vars);
                let got = basis.evaluate(a).map_err(|e| e.to_string())?;
                check(got == BigInt::from(expected), || {
                    format!("formula {i} `{text}` on {}: basis gives {got}, enumeration {expected}", a.to_json())
                })?;
            }
        }
        Ok(format!("100 formulas x 20 structures, {terms} basis terms in total"))
    });
}

fn random_scheme(rng: &mut rand_chacha::ChaCha8Rng, source: &Signature, target: &Signature) -> InterpretationScheme {
    let p = rand::Rng::gen_range(rng, 1..=2);
    let build = |rng: &mut rand_chacha::ChaCha8Rng, arity: usize| {
        let names = var_names("v", arity * p);
        let declared: Vec<&str> = names.iter().map(String::as_str).collect();
        let f = random_formula(rng, source, arity * p, 3);
        parse_formula(&f.text(&names), source, Some(&declared)).unwrap()
    };
    let domain = build(rng, 1);
    let relations = target.symbols().iter().map(|s| build(rng, s.arity)).collect();
    InterpretationScheme::new("random", p, source.clone(), target.clone(), domain, relations).unwrap()
}

#[test]
fn criterion_3_interpretation_duality() {
    criterion(3, "counting in I(A) equals counting the translated formula in A", 120, || {
        let mut rng = rng(SEED + 3);
        let sig = Signature::new([("E", 2), ("U", 1)]).unwrap();
        let mut nonzero = 0;
        for i in 0..200 {
            let scheme = random_scheme(&mut rng, &sig, &sig);
            let vars = rand::Rng::gen_range(&mut rng, 1..=2);
            let f = random_formula(&mut rng, &sig, vars, 4);
            let names = var_names("x", vars);
            let declared: Vec<&str> = names.iter().map(String::as_str).collect();
            let phi = parse_formula(&f.text(&names), &sig, Some(&declared)).unwrap();
            let n = rand::Rng::gen_range(&mut rng, 0..=4);
            let a = random_structure(&mut rng, &sig, n, 0.4);
            let image = apply_interpretation(&scheme, &a).map_err(|e| e.to_string())?.structure;
            let direct = brute_count(&f, &image, vars);
            let translated = translate_formula(&scheme, &phi).map_err(|e| e.to_string())?;
            let pulled = count_satisfying(&translated, &a).map_err(|e| e.to_string())?;
            check(direct == pulled, || {
                format!("triple {i}: |phi(I(A))| = {direct} but |I~(phi)(A)| = {pulled} for {}", a.to_json())
            })?;
            nonzero += usize::from(direct > 0);
        }
        Ok(format!("200 triples, {nonzero} with a nonzero count"))
    });
}

fn iso(a: &Structure, b: &Structure) -> bool {
    canonical_form_with_cap(a, GALLERY_CANON_CAP).unwrap() == canonical_form_with_cap(b, GALLERY_CANON_CAP).unwrap()
}

#[test]
fn criterion_4_gallery_isomorphism() {
    criterion(4, "gallery schemes match their direct constructions", 120, || {
        let none = GalleryParams::default();
        let mut indices = 0;
        for e in entries() {
            let report = gallery_check(e.name, &none, e.range.0..=e.range.1, false).map_err(|x| x.to_string())?;
            check(report.first_mismatch.is_none(), || {
                format!("{} differs from its oracle at n = {}", e.name, report.first_mismatch.as_ref().unwrap().n)
            })?;
            check(e.range.0 == 0 && e.range.1 >= 6, || format!("{} range too short", e.name))?;
            indices += report.rows.len();
        }
        check(entries().len() == ENTRY_NAMES.len(), || "entry table incomplete".into())?;
        let (crown, _) = gallery_build("crown", &none, 3).unwrap();
        check(iso(&crown, &graphs::cycle(6)), || "crown(3) is not C6".into())?;
        let j = GalleryParams {
            k: Some(2),
            d: Some(vec![1]),
            ..none.clone()
        };
        let (johnson, _) = gallery_build("johnson", &j, 5).unwrap();
        check(
            johnson.domain_size() == 10 && graphs::edge_count(&johnson) == 30,
            || "johnson(5,2,{1}) is not 10 vertices and 30 edges".into(),
        )?;
        for n in 4..=8u64 {
            let (chords, _) = gallery_build("chordGraph", &none, n).unwrap();
            let want = n * (n - 1) * (n - 2) * (n - 3) / 24;
            check(graphs::edge_count(&chords) as u64 == want, || format!("chordGraph({n}) edge count"))?;
        }
        let (sub, _) = gallery_build("subdivision", &none, 3).unwrap();
        check(iso(&sub, &graphs::cycle(6)), || "subdivision of K3 is not C6".into())?;
        let (line, _) = gallery_build("lineGraph", &none, 4).unwrap();
        check(iso(&line, &graphs::octahedron()), || "line graph of K4 is not the octahedron".into())?;
        Ok(format!("{} entries over {indices} indices, named examples hold", entries().len()))
    });
}

#[test]
fn criterion_5_detector() {
    criterion(5, "detector verdicts on gallery sequences and the cycle counterexample", 300, || {
        let none = GalleryParams::default();
        let mut runs = 0;
        for name in ENTRY_NAMES {
            let spec = scheme_spec(name, &none).unwrap();
            for (label, pattern) in detector_patterns() {
                let fit = detect_polynomial(&spec, &Query::hom(pattern), DEFAULT_VERIFY_COUNT).map_err(|e| e.to_string())?;
                check(fit.verdict == Verdict::Polynomial, || format!("{name} with {label}: {:?}", fit.verdict))?;
                check(
                    fit.verify_points.len() == DEFAULT_VERIFY_COUNT && fit.verify_points.iter().all(|p| p.matches),
                    || format!("{name} with {label}: held-out points"),
                )?;
                runs += 1;
            }
        }
        let complete = SequenceSpec::custom("complete", none.clone());
        let fit = detect_polynomial(&complete, &Query::hom(graphs::complete(3)), DEFAULT_VERIFY_COUNT).unwrap();
        let values: Vec<BigInt> = fit
            .sample_points
            .iter()
            .map(|p| p.value.clone())
            .chain(fit.verify_points.iter().map(|p| p.value.clone()))
            .take(5)
            .collect();
        check(
            fit.fit == &IntPolynomial::constant(6) * &IntPolynomial::choose(3) && values == [0, 0, 0, 6, 24].map(BigInt::from),
            || format!("K_n with K3 fit {} values {values:?}", fit.fit),
        )?;
        let cycles = SequenceSpec::custom("cycle", none);
        let fit = detect_polynomial(&cycles, &Query::hom(graphs::complete(3)), DEFAULT_VERIFY_COUNT).unwrap();
        check(fit.verdict == Verdict::NotPolynomial && fit.witness.is_some(), || {
            format!("cycles with K3: {:?}", fit.verdict)
        })?;
        Ok(format!(
            "{runs} gallery runs polynomial; K_n/K3 = 6*C(n,3); cycles rejected at n = {}",
            fit.witness.unwrap()
        ))
    });
}

#[test]
fn criterion_6_decomposition() {
    criterion(6, "bounded-degree decomposition", 60, || {
        let spec = SequenceSpec::Union {
            parts: vec![
                SequenceSpec::copies("n+1".parse().unwrap(), SequenceSpec::constant(graphs::complete(1))),
                SequenceSpec::copies("n^2".parse().unwrap(), SequenceSpec::constant(graphs::complete(2))),
            ],
        };
        let dec = bounded_decompose(&spec, 1).map_err(|e| e.to_string())?;
        let mut parts: Vec<(usize, IntPolynomial)> =
            dec.parts.iter().map(|p| (p.component.domain_size(), p.multiplicity.clone())).collect();
        parts.sort_by_key(|p| p.0);
        let want: Vec<(usize, IntPolynomial)> = vec![(1, "n+1".parse().unwrap()), (2, "n^2".parse().unwrap())];
        check(parts == want, || format!("parts {parts:?}"))?;
        check(dec.checked.len() == 3, || "three held-out indices".into())?;
        for &n in &dec.checked {
            let term = spec.term(n).unwrap();
            check(iso(&dec.reassemble(n).unwrap(), &term), || format!("reassembly differs at n = {n}"))?;
        }
        let crown = scheme_spec("crown", &GalleryParams::default()).unwrap();
        let rejected = matches!(bounded_decompose(&crown, 3), Err(GalleryError::UnboundedDegree { .. }));
        check(rejected, || "crown accepted".into())?;
        Ok(format!("(n+1)K1 + n^2 K2 recovered, reassembly checked at {:?}, crown rejected", dec.checked))
    });
}

/// Patterns over `{E, S, U}` on `k` vertices: simple `E`, any loopless `S`,
/// `U` on every vertex or, for `k ≤ 3`, on any subset. One per isomorphism class.
fn ordered_patterns(sig: &Signature, k: usize) -> Vec<Structure> {
    let pairs: Vec<(usize, usize)> = (0..k).tuple_combinations().collect();
    let marks: Vec<Vec<usize>> = if k <= 3 {
        (0..k).powerset().collect()
    } else {
        vec![(0..k).collect()]
    };
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for code in 0..8usize.pow(pairs.len() as u32) {
        for mark in &marks {
            let mut s = Structure::empty(sig.clone(), k);
            let mut c = code;
            for &(u, v) in &pairs {
                let digit = c % 8;
                c /= 8;
                if digit & 1 == 1 {
                    s.insert(0, vec![u, v]).unwrap();
                    s.insert(0, vec![v, u]).unwrap();
                }
                if digit & 2 == 2 {
                    s.insert(1, vec![u, v]).unwrap();
                }
                if digit & 4 == 4 {
                    s.insert(1, vec![v, u]).unwrap();
                }
            }
            for &m in mark {
                s.insert(2, vec![m]).unwrap();
            }
            if seen.insert(key(&s)) {
                out.push(s);
            }
        }
    }
    out
}

#[test]
fn criterion_7_ordered_sums() {
    criterion(7, "injective counts in ordered sums follow the telescoped formula", 120, || {
        let inner = Signature::graph();
        let names = OrderedSumNames::for_signature(&inner);
        let sig = names.signature(&inner);
        let patterns: Vec<Structure> = (0..=4).flat_map(|k| ordered_patterns(&sig, k)).collect();
        let mut nice = 0;
        for block in [graphs::complete(1), graphs::complete(2)] {
            for n in 0..=5 {
                let blocks = vec![block.clone(); n];
                let (t, _) = ordered_sum(&inner, &blocks).unwrap();
                for f in &patterns {
                    let direct = big(inj_count(f, &t).unwrap().value);
                    let formula = ordered_sum_inj(f, &inner, &blocks).map_err(|e| e.to_string())?;
                    check(direct == formula, || {
                        format!("{} in T<{}>_{n}: backtracking {direct}, formula {formula}", f.to_json(), block.domain_size())
                    })?;
                    if !is_nice(f, &names) {
                        let ind = ind_count(f, &t).unwrap().value;
                        check(ind == BigUint::from(0u32), || format!("non-nice {} has induced copies", f.to_json()))?;
                    } else {
                        nice += 1;
                    }
                }
            }
        }
        Ok(format!(
            "{} patterns x 2 inner structures x n = 0..5; {nice} nice cases",
            patterns.len()
        ))
    });
}

#[test]
fn criterion_8_quotient_certificates() {
    criterion(8, "line-graph quotient scheme on complete graphs", 30, || {
        let none = GalleryParams::default();
        let Ok(SequenceSpec::Interpreted {
            scheme: Scheme::Quotient(q),
            ..
        }) = scheme_spec("lineGraph", &none)
        else {
            return Err("lineGraph is not a quotient scheme".into());
        };
        for m in 3..=5usize {
            let out = apply_quotient(&q, &graphs::complete(m), Some(m as u64), SEED).map_err(|e| e.to_string())?;
            check(out.class_sizes.iter().all(|&s| s == 2), || format!("K{m}: class sizes {:?}", out.class_sizes))?;
            check(out.class_sizes.len() == m * (m - 1) / 2, || format!("K{m}: {} classes", out.class_sizes.len()))?;
            check(out.certificate_of.iter().all(Option::is_some), || format!("K{m}: uncovered class"))?;
            let direct = oracle("lineGraph", &none, m as u64).unwrap();
            check(weakly_isomorphic(&out.structure, &direct).unwrap(), || format!("K{m}: not the line graph"))?;
        }
        Ok("m = 3, 4, 5: classes of size 2, C(m,2) of them, line graphs recovered".into())
    });
}

#[test]
fn criterion_9_paley() {
    criterion(9, "hom(C4, Paley_q) cubic fit through q = 5, 13, 17, 29 checked at q = 37", 120, || {
        let report = paley_experiment(&graphs::cycle(4), &[5, 13, 17, 29, 37], 4).map_err(|e| e.to_string())?;
        check(report.note.contains("images"), || "hom versus image distinction not reported".into())?;
        let last = report.rows.last().unwrap();
        let summary = format!(
            "hom at 37 = {}, fit predicts {}; image counts {:?}",
            last.hom,
            last.predicted.clone().unwrap_or_default(),
            report.rows.iter().map(|r| r.images).collect::<Vec<_>>()
        );
        check(report.verified, || summary.clone())?;
        Ok(summary)
    });
}
