//! Brute-force oracles and seeded generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use polyseq::gallery::{canonical_form_with_cap, CanonicalKey};
use polyseq::structures::{Signature, Structure};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Quantifier-free formula kept independent of the library's syntax tree.
#[derive(Clone, Debug)]
pub enum F {
    Atom(String, Vec<usize>),
    Eq(usize, usize),
    Not(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
    Imp(Box<F>, Box<F>),
    Iff(Box<F>, Box<F>),
}

impl F {
    pub fn text(&self, names: &[String]) -> String {
        match self {
            F::Atom(r, args) => format!("{r}({})", args.iter().map(|&v| names[v].as_str()).join(",")),
            F::Eq(a, b) => format!("{} = {}", names[*a], names[*b]),
            F::Not(f) => format!("!({})", f.text(names)),
            F::And(a, b) => format!("({}) & ({})", a.text(names), b.text(names)),
            F::Or(a, b) => format!("({}) | ({})", a.text(names), b.text(names)),
            F::Imp(a, b) => format!("({}) -> ({})", a.text(names), b.text(names)),
            F::Iff(a, b) => format!("({}) <-> ({})", a.text(names), b.text(names)),
        }
    }

    pub fn eval(&self, a: &Structure, env: &[usize]) -> bool {
        match self {
            F::Atom(r, args) => {
                let t: Vec<usize> = args.iter().map(|&v| env[v]).collect();
                a.relation_by_name(r).is_some_and(|rel| rel.contains(&t))
            }
            F::Eq(x, y) => env[*x] == env[*y],
            F::Not(f) => !f.eval(a, env),
            F::And(x, y) => x.eval(a, env) && y.eval(a, env),
            F::Or(x, y) => x.eval(a, env) || y.eval(a, env),
            F::Imp(x, y) => !x.eval(a, env) || y.eval(a, env),
            F::Iff(x, y) => x.eval(a, env) == y.eval(a, env),
        }
    }
}

pub fn var_names(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

/// Random formula over `sig` in variables `0..vars` with `1..=max_atoms` atoms.
pub fn random_formula(rng: &mut ChaCha8Rng, sig: &Signature, vars: usize, max_atoms: usize) -> F {
    let atoms = rng.gen_range(1..=max_atoms);
    let mut parts: Vec<F> = (0..atoms)
        .map(|_| {
            let pick = rng.gen_range(0..=sig.len());
            let mut f = if pick == sig.len() {
                F::Eq(rng.gen_range(0..vars), rng.gen_range(0..vars))
            } else {
                let sym = &sig.symbols()[pick];
                F::Atom(sym.name.clone(), (0..sym.arity).map(|_| rng.gen_range(0..vars)).collect())
            };
            if rng.gen_bool(0.3) {
                f = F::Not(Box::new(f));
            }
            f
        })
        .collect();
    while parts.len() > 1 {
        let i = rng.gen_range(0..parts.len() - 1);
        let b = Box::new(parts.remove(i + 1));
        let a = Box::new(parts.remove(i));
        let mut f = match rng.gen_range(0..4) {
            0 => F::And(a, b),
            1 => F::Or(a, b),
            2 => F::Imp(a, b),
            _ => F::Iff(a, b),
        };
        if rng.gen_bool(0.2) {
            f = F::Not(Box::new(f));
        }
        parts.insert(i, f);
    }
    parts.pop().expect("at least one atom")
}

/// `|φ(A)|` over `A^vars` by enumeration.
pub fn brute_count(f: &F, a: &Structure, vars: usize) -> u64 {
    maps(vars, a.domain_size()).filter(|env| f.eval(a, env)).count() as u64
}

pub fn random_structure(rng: &mut ChaCha8Rng, sig: &Signature, n: usize, density: f64) -> Structure {
    let mut s = Structure::empty(sig.clone(), n);
    for (r, sym) in sig.symbols().iter().enumerate() {
        for t in maps(sym.arity, n) {
            if rng.gen_bool(density) {
                s.insert(r, t).unwrap();
            }
        }
    }
    s
}

pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Structure {
    let edges: Vec<(usize, usize)> = (0..n).tuple_combinations().filter(|_| rng.gen_bool(p)).collect();
    Structure::graph(n, &edges).unwrap()
}

/// Every map `[k] → [n]`, as a vertex list, in lexicographic order.
pub fn maps(k: usize, n: usize) -> Box<dyn Iterator<Item = Vec<usize>>> {
    if k == 0 {
        Box::new(std::iter::once(Vec::new()))
    } else {
        Box::new((0..k).map(move |_| 0..n).multi_cartesian_product())
    }
}

fn preserves(pattern: &Structure, target: &Structure, m: &[usize]) -> bool {
    pattern.signature().symbols().iter().zip(pattern.relations()).all(|(sym, rel)| {
        rel.iter().all(|t| {
            let image: Vec<usize> = t.iter().map(|&v| m[v]).collect();
            target.relation_by_name(&sym.name).is_some_and(|r| r.contains(&image))
        })
    })
}

fn injective(m: &[usize]) -> bool {
    m.iter().collect::<BTreeSet<_>>().len() == m.len()
}

pub fn brute_hom(pattern: &Structure, target: &Structure) -> u64 {
    maps(pattern.domain_size(), target.domain_size())
        .filter(|m| preserves(pattern, target, m))
        .count() as u64
}

pub fn brute_inj(pattern: &Structure, target: &Structure) -> u64 {
    maps(pattern.domain_size(), target.domain_size())
        .filter(|m| injective(m) && preserves(pattern, target, m))
        .count() as u64
}

/// Injective maps that also reflect every relation of the pattern's signature.
pub fn brute_ind(pattern: &Structure, target: &Structure) -> u64 {
    let k = pattern.domain_size();
    maps(k, target.domain_size())
        .filter(|m| {
            injective(m)
                && pattern.signature().symbols().iter().zip(pattern.relations()).all(|(sym, rel)| {
                    let trel = target.relation_by_name(&sym.name);
                    maps(sym.arity, k).all(|t| {
                        let image: Vec<usize> = t.iter().map(|&v| m[v]).collect();
                        rel.contains(&t) == trel.is_some_and(|r| r.contains(&image))
                    })
                })
        })
        .count() as u64
}

pub fn key(s: &Structure) -> CanonicalKey {
    canonical_form_with_cap(s, 64).unwrap()
}

/// Simple graphs on `k` vertices, one per isomorphism class.
pub fn graphs_up_to_iso(k: usize) -> Vec<Structure> {
    let pairs: Vec<(usize, usize)> = (0..k).tuple_combinations().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let edges: Vec<(usize, usize)> = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        let g = Structure::graph(k, &edges).unwrap();
        if seen.insert(key(&g)) {
            out.push(g);
        }
    }
    out
}
