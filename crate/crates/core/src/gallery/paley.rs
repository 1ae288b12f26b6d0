//! Homomorphism counts into Paley graphs as a function of `q`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::structures::Structure;

use super::GalleryError;

pub fn is_prime(q: u64) -> bool {
    q >= 2 && (2..).take_while(|d| d * d <= q).all(|d| q % d != 0)
}

/// Vertices `0..q`, `x ~ y` iff `x - y` is a nonzero square mod `q`.
pub fn paley_graph(q: u64) -> Result<Structure, GalleryError> {
    if !is_prime(q) || q % 4 != 1 {
        return Err(GalleryError::Paley(format!("{q} is not a prime congruent to 1 mod 4")));
    }
    let squares: HashSet<u64> = (1..q).map(|x| x * x % q).collect();
    let n = q as usize;
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (x + 1..n).map(move |y| (x, y)))
        .filter(|&(x, y)| squares.contains(&((y - x) as u64)))
        .collect();
    Ok(Structure::graph(n, &edges)?)
}

/// Graph homomorphisms `pattern → g` as vertex maps, by backtracking.
fn for_each_hom(pattern: &Structure, g: &Structure, mut visit: impl FnMut(&[usize])) {
    let e = pattern.signature().index_of("E");
    let ge = g.signature().index_of("E");
    let k = pattern.domain_size();
    let idx = g.index();
    let back: Vec<Vec<usize>> = (0..k)
        .map(|v| match e {
            Some(r) => pattern
                .relation(r)
                .iter()
                .filter_map(|t| match (t[0], t[1]) {
                    (a, b) if a == v && b < v => Some(b),
                    (a, b) if b == v && a < v => Some(a),
                    _ => None,
                })
                .collect(),
            None => Vec::new(),
        })
        .collect();
    let mut map = vec![0; k];
    fn go(
        v: usize,
        map: &mut Vec<usize>,
        back: &[Vec<usize>],
        n: usize,
        adj: &dyn Fn(usize, usize) -> bool,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if v == map.len() {
            visit(map);
            return;
        }
        for x in 0..n {
            if back[v].iter().all(|&u| adj(map[u], x)) {
                map[v] = x;
                go(v + 1, map, back, n, adj, visit);
            }
        }
    }
    let adj = |a: usize, b: usize| ge.is_some_and(|r| idx.holds(r, &[a, b]));
    go(0, &mut map, &back, g.domain_size(), &adj, &mut visit);
}

/// `hom(pattern, g)` and the number of distinct homomorphic images, an image
/// being the subgraph formed by the mapped vertices and edges.
pub fn hom_and_images(pattern: &Structure, g: &Structure) -> (u64, u64) {
    let e = pattern.signature().index_of("E");
    let edges: Vec<(usize, usize)> = e.map_or_else(Vec::new, |r| pattern.relation(r).iter().map(|t| (t[0], t[1])).collect());
    let mut homs = 0u64;
    let mut images: HashSet<(Vec<usize>, Vec<(usize, usize)>)> = HashSet::new();
    for_each_hom(pattern, g, |m| {
        homs += 1;
        let mut vs: Vec<usize> = m.to_vec();
        vs.sort_unstable();
        vs.dedup();
        let mut es: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| (m[a].min(m[b]), m[a].max(m[b])))
            .collect();
        es.sort_unstable();
        es.dedup();
        images.insert((vs, es));
    });
    (homs, images.len() as u64)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PaleyRow {
    pub q: u64,
    pub edges: u64,
    pub hom: u64,
    pub images: u64,
    /// Value of the fit at `q`; absent on fitted samples.
    pub predicted: Option<String>,
    #[serde(rename = "match")]
    pub matches: Option<bool>,
}

/// Lagrange fit through the first samples; coefficients of `1, q, q², …`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PaleyFit {
    pub degree: usize,
    pub coefficients: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PaleyReport {
    pub schema_version: u32,
    pub fit_points: usize,
    pub rows: Vec<PaleyRow>,
    pub hom_fit: PaleyFit,
    pub image_fit: PaleyFit,
    /// Every held-out hom count agrees with the fit.
    pub verified: bool,
    pub note: String,
}

impl PaleyReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

fn lagrange(points: &[(BigRational, BigRational)]) -> Vec<BigRational> {
    let mut coeffs = vec![BigRational::zero(); points.len()];
    for (i, (xi, yi)) in points.iter().enumerate() {
        let mut basis = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut next = vec![BigRational::zero(); basis.len() + 1];
            for (d, c) in basis.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * xj;
            }
            basis = next;
            denom *= xi - xj;
        }
        for (d, c) in basis.iter().enumerate() {
            coeffs[d] += c * yi / &denom;
        }
    }
    coeffs
}

fn eval(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn ratio(v: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn describe(coeffs: &[BigRational]) -> PaleyFit {
    let mut coefficients: Vec<String> = coeffs.iter().map(ToString::to_string).collect();
    while coefficients.len() > 1 && coefficients.last().is_some_and(|c| c == "0") {
        coefficients.pop();
    }
    PaleyFit {
        degree: coefficients.len() - 1,
        coefficients,
    }
}

/// Counts on every `q`, fits through the first `fit_points`, and checks the
/// fit on the remaining primes. The verdict is exploratory.
pub fn paley_experiment(pattern: &Structure, primes: &[u64], fit_points: usize) -> Result<PaleyReport, GalleryError> {
    if fit_points == 0 || fit_points > primes.len() {
        return Err(GalleryError::Paley(format!(
            "need between 1 and {} fit points, got {fit_points}",
            primes.len()
        )));
    }
    let counts = primes
        .par_iter()
        .map(|&q| {
            let g = paley_graph(q)?;
            let (hom, images) = hom_and_images(pattern, &g);
            Ok((q, crate::structures::graphs::edge_count(&g) as u64, hom, images))
        })
        .collect::<Vec<Result<_, GalleryError>>>()
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let fit_of = |pick: fn(&(u64, u64, u64, u64)) -> u64| {
        let pts: Vec<_> = counts[..fit_points].iter().map(|c| (ratio(c.0), ratio(pick(c)))).collect();
        lagrange(&pts)
    };
    let hom_coeffs = fit_of(|c| c.2);
    let image_coeffs = fit_of(|c| c.3);
    let rows: Vec<PaleyRow> = counts
        .iter()
        .enumerate()
        .map(|(i, &(q, edges, hom, images))| {
            let held_out = i >= fit_points;
            let predicted = eval(&hom_coeffs, &ratio(q));
            PaleyRow {
                q,
                edges,
                hom,
                images,
                predicted: held_out.then(|| predicted.to_string()),
                matches: held_out.then(|| predicted == ratio(hom)),
            }
        })
        .collect();
    let verified = rows.iter().all(|r| r.matches != Some(false));
    Ok(PaleyReport {
        schema_version: 1,
        fit_points,
        verified,
        hom_fit: describe(&hom_coeffs),
        image_fit: describe(&image_coeffs),
        rows,
        note: "hom counts every vertex map preserving edges; images counts distinct subgraphs \
               hit by such maps, which is what the polynomial question is about"
            .into(),
    })
}
