//! Scheme texts and direct constructions for the named graph families.

use itertools::Itertools;

use crate::interp::{parse_scheme, Scheme};
use crate::sequences::{nonneg, IntPolynomial, SequenceSpec};
use crate::structures::{graphs, Structure};

use super::{GalleryError, GalleryParams};

fn scheme(text: &str) -> Scheme {
    parse_scheme(text).unwrap_or_else(|e| panic!("built-in scheme does not parse: {e}\n{text}"))
}

fn conj(parts: Vec<String>) -> String {
    if parts.is_empty() {
        "true".into()
    } else {
        parts.into_iter().map(|p| format!("({p})")).join(" & ")
    }
}

fn disj(parts: Vec<String>) -> String {
    if parts.is_empty() {
        "false".into()
    } else {
        parts.into_iter().map(|p| format!("({p})")).join(" | ")
    }
}

fn vars(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

/// `|{x_1..x_k} ∩ {y_1..y_k}| ∈ D` for tuples of distinct elements.
fn intersection_in(k: usize, d: &[usize]) -> String {
    let mut cases = Vec::new();
    for &s in d {
        for i_set in (0..k).combinations(s) {
            for j_set in (0..k).combinations(s) {
                let mut parts = Vec::new();
                for i in (0..k).filter(|i| !i_set.contains(i)) {
                    for j in (0..k).filter(|j| !j_set.contains(j)) {
                        parts.push(format!("!(x{} = y{})", i + 1, j + 1));
                    }
                }
                for &i in &i_set {
                    parts.push(disj(j_set.iter().map(|&j| format!("x{} = y{}", i + 1, j + 1)).collect()));
                }
                cases.push(conj(parts));
            }
        }
    }
    disj(cases)
}

fn header(name: &str, source: &str, p: usize) -> String {
    format!("interpretation {name} {{\n  source: {source};\n  target: graph;\n  p: {p};\n")
}

fn group(prefix: &str, k: usize) -> String {
    vars(prefix, k).join(",")
}

pub(super) fn crown() -> Scheme {
    scheme(
        "interpretation crown {
           source: basic(k=1,l=2); target: graph; p: 2;
           domain(x1,x2): UT1(x1) & !UT1(x2);
           E(x1,x2; y1,y2): !(x1 = y1) & !(UE1(x2) <-> UE1(y2));
         }",
    )
}

pub(super) fn half_graph() -> Scheme {
    scheme(
        "interpretation halfGraph {
           source: basic(k=1,l=2); target: graph; p: 2;
           domain(x1,x2): UT1(x1) & !UT1(x2);
           E(x1,x2; y1,y2): (S1(x1,y1) & UE1(x2) & UE2(y2)) | (S1(y1,x1) & UE1(y2) & UE2(x2));
         }",
    )
}

/// Edge formula closed under swapping the two chords.
pub(super) fn chord_graph() -> Scheme {
    scheme(
        "interpretation chordGraph {
           source: basic(k=1,l=0); target: graph; p: 2;
           domain(x1,x2): S1(x1,x2);
           E(x1,x2; y1,y2): (S1(x1,y1) & S1(y1,x2) & S1(x2,y2)) | (S1(y1,x1) & S1(x1,y2) & S1(y2,x2));
         }",
    )
}

/// The complete graph `K_n` from `T_n` by forgetting the orientation.
pub(super) fn complete() -> Scheme {
    scheme(
        "interpretation complete {
           source: basic(k=1,l=0); target: graph; p: 1;
           domain(x): true;
           E(x; y): S1(x,y) | S1(y,x);
         }",
    )
}

pub(super) fn johnson(k: usize, d: &[usize]) -> Scheme {
    let (x, y) = (group("x", k), group("y", k));
    let chain = conj((1..k).map(|i| format!("S1(x{i},x{})", i + 1)).collect());
    let text = format!(
        "{}  domain({x}): {chain};\n  E({x}; {y}): {};\n}}\n",
        header("johnson", "basic(k=1,l=0)", k),
        intersection_in(k, d)
    );
    scheme(&text)
}

/// `F` on vertices `0..k`, vertex `i` blown up to `T_{P_{i+1}(n)}`.
pub(super) fn vertex_blowup(k: usize, edges: &[(usize, usize)]) -> Scheme {
    let rho = disj(
        edges
            .iter()
            .flat_map(|&(i, j)| [(i, j), (j, i)])
            .map(|(i, j)| format!("UT{}(x) & UT{}(y)", i + 1, j + 1))
            .collect(),
    );
    scheme(&format!(
        "{}  domain(x): true;\n  E(x; y): {rho};\n}}\n",
        header("vertexBlowup", &format!("basic(k={k},l=0)"), 1)
    ))
}

/// Root-to-vertex paths of the tree with `parents[v - 2]` the parent of
/// vertex `v` (vertices `1..=k`, root `1`).
fn tree_paths(parents: &[usize]) -> Vec<Vec<usize>> {
    let k = parents.len() + 1;
    (1..=k)
        .map(|v| {
            let mut path = vec![v];
            while *path.last().expect("nonempty") != 1 {
                let last = *path.last().expect("nonempty");
                path.push(parents[last - 2]);
            }
            path.reverse();
            path
        })
        .collect()
}

pub(super) fn tree_blowup(parents: &[usize]) -> Scheme {
    let k = parents.len() + 1;
    let (x, y) = (group("x", k), group("y", k));
    let iota = disj(
        tree_paths(parents)
            .into_iter()
            .map(|path| {
                let t = path.len();
                let mut parts: Vec<String> = path.iter().enumerate().map(|(i, a)| format!("UT{a}(x{})", i + 1)).collect();
                parts.extend((t + 1..=k).map(|i| format!("x{i} = x{t}")));
                conj(parts)
            })
            .collect(),
    );
    let rho_prime = |x: &str, y: &str| {
        disj(
            (1..k)
                .map(|i| {
                    let mut parts: Vec<String> = (1..=i).map(|j| format!("{x}{j} = {y}{j}")).collect();
                    parts.push(format!("{x}{i} = {x}{k}"));
                    parts.push(format!("!({y}{i} = {y}{k})"));
                    parts.push(format!("{y}{} = {y}{k}", i + 1));
                    conj(parts)
                })
                .collect(),
        )
    };
    let rho = disj(vec![rho_prime("x", "y"), rho_prime("y", "x")]);
    scheme(&format!(
        "{}  domain({x}): {iota};\n  E({x}; {y}): {rho};\n}}\n",
        header("treeBlowup", &format!("basic(k={k},l=0)"), k)
    ))
}

/// With `literal`, the domain formula `S1(y,x)`, which admits no centres;
/// otherwise centres are the pairs `(x, x)`.
pub(super) fn star_union(literal: bool) -> Scheme {
    let iota = if literal { "S1(y,x)" } else { "S1(x,y) | x = y" };
    scheme(&format!(
        "{}  domain(x,y): {iota};\n  E(x1,y1; x2,y2): (y1 = y2) & ((x1 = y1 & S1(x2,y2)) | (x2 = y2 & S1(x1,y1)));\n}}\n",
        header(if literal { "starUnionLiteral" } else { "starUnion" }, "basic(k=1,l=0)", 2)
    ))
}

pub(super) fn line_graph() -> Scheme {
    scheme(
        "interpretation lineGraph {
           source: graph; target: graph; p: 2;
           domain(x1,x2): E(x1,x2);
           E(x1,x2; y1,y2): !((x1 = y1 & x2 = y2) | (x1 = y2 & x2 = y1)) & (x1 = y1 | x1 = y2 | x2 = y1 | x2 = y2);
           equiv(x1,x2; y1,y2): (x1 = y1 & x2 = y2) | (x1 = y2 & x2 = y1);
           class edge: eta=true, size=2;
         }",
    )
}

pub(super) fn subdivision() -> Scheme {
    scheme(
        "interpretation subdivision {
           source: graph; target: graph; p: 2;
           domain(x1,x2): x1 = x2 | E(x1,x2);
           E(x1,x2; y1,y2): (x1 = x2 & !(y1 = y2) & (x1 = y1 | x1 = y2)) | (y1 = y2 & !(x1 = x2) & (y1 = x1 | y1 = x2));
           equiv(x1,x2; y1,y2): (x1 = y1 & x2 = y2) | (x1 = y2 & x2 = y1);
           class vertex: eta=x1 = x2, size=1;
           class edge: eta=!(x1 = x2), size=2;
         }",
    )
}

pub(super) fn clique_intersection(k: usize, d: &[usize]) -> Scheme {
    let (x, y) = (group("x", k), group("y", k));
    let clique = conj(
        (1..=k)
            .tuple_combinations()
            .map(|(i, j)| format!("E(x{i},x{j})"))
            .collect(),
    );
    let same = conj((1..=k).map(|i| disj((1..=k).map(|j| format!("x{i} = y{j}")).collect())).collect());
    let factorial: usize = (1..=k).product();
    scheme(&format!(
        "{}  domain({x}): {clique};\n  E({x}; {y}): ({}) & !({same});\n  equiv({x}; {y}): {same};\n  class clique: eta=true, size={factorial};\n}}\n",
        header("cliqueIntersection", "graph", k),
        intersection_in(k, d)
    ))
}

// Direct constructions.

pub(super) fn crown_graph(n: usize) -> Structure {
    let edges: Vec<_> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, n + j))).collect();
    Structure::graph(2 * n, &edges).expect("valid edges")
}

/// Vertices are the `k`-subsets of `0..n` in lexicographic order.
pub(super) fn johnson_graph(n: usize, k: usize, d: &[usize]) -> Structure {
    let sets: Vec<Vec<usize>> = (0..n).combinations(k).collect();
    sets_graph(&sets, d)
}

/// Distinct sets adjacent when the size of their intersection is in `d`.
fn sets_graph(sets: &[Vec<usize>], d: &[usize]) -> Structure {
    let mut edges = Vec::new();
    for (a, b) in (0..sets.len()).tuple_combinations() {
        let common = sets[a].iter().filter(|v| sets[b].contains(v)).count();
        if d.contains(&common) {
            edges.push((a, b));
        }
    }
    Structure::graph(sets.len(), &edges).expect("valid edges")
}

pub(super) fn blown_up_graph(sizes: &[usize], edges: &[(usize, usize)]) -> Structure {
    let starts: Vec<usize> = sizes.iter().scan(0, |acc, &s| {
        let start = *acc;
        *acc += s;
        Some(start)
    }).collect();
    let mut out = Vec::new();
    for &(i, j) in edges {
        for a in 0..sizes[i] {
            for b in 0..sizes[j] {
                out.push((starts[i] + a, starts[j] + b));
            }
        }
    }
    Structure::graph(sizes.iter().sum(), &out).expect("valid edges")
}

/// Forest of `sizes[0]` root copies; below each copy of vertex `v`, each
/// child `c` of `v` appears `sizes[c - 1]` times.
pub(super) fn blown_up_tree(parents: &[usize], sizes: &[usize]) -> Structure {
    let k = parents.len() + 1;
    let children = |v: usize| (2..=k).filter(move |&c| parents[c - 2] == v);
    let mut edges = Vec::new();
    let mut count = 0;
    let mut stack: Vec<(usize, Option<usize>)> = Vec::new();
    for _ in 0..sizes[0] {
        stack.push((1, None));
    }
    while let Some((v, parent)) = stack.pop() {
        let id = count;
        count += 1;
        if let Some(p) = parent {
            edges.push((p, id));
        }
        for c in children(v) {
            for _ in 0..sizes[c - 1] {
                stack.push((c, Some(id)));
            }
        }
    }
    Structure::graph(count, &edges).expect("valid edges")
}

/// Disjoint stars with `1, 2, …, m` vertices.
pub(super) fn star_forest(m: usize) -> Structure {
    let mut edges = Vec::new();
    let mut start = 0;
    for i in 1..=m {
        edges.extend((1..i).map(|j| (start, start + j)));
        start += i;
    }
    Structure::graph(start, &edges).expect("valid edges")
}

/// `a_i = i`, `b_j = n + j`, `a_i ~ b_j` iff `i < j`.
pub(super) fn half(n: usize) -> Structure {
    let edges: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, n + j))).collect();
    Structure::graph(2 * n, &edges).expect("valid edges")
}

/// Chords `{a, b}` of the convex `n`-gon, adjacent when they cross.
pub(super) fn chords(n: usize) -> Structure {
    let chords: Vec<(usize, usize)> = (0..n).tuple_combinations().collect();
    let mut edges = Vec::new();
    for (x, y) in (0..chords.len()).tuple_combinations() {
        let ((a, b), (c, d)) = (chords[x], chords[y]);
        if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
            edges.push((x, y));
        }
    }
    Structure::graph(chords.len(), &edges).expect("valid edges")
}

fn undirected_edges(g: &Structure) -> Vec<Vec<usize>> {
    g.relation(0).iter().filter(|t| t[0] < t[1]).cloned().collect()
}

pub(super) fn line_of(g: &Structure) -> Structure {
    sets_graph(&undirected_edges(g), &[1])
}

pub(super) fn subdivision_of(g: &Structure) -> Structure {
    let n = g.domain_size();
    let edges: Vec<_> = undirected_edges(g)
        .iter()
        .enumerate()
        .flat_map(|(i, e)| [(e[0], n + i), (e[1], n + i)])
        .collect();
    Structure::graph(n + edges.len() / 2, &edges).expect("valid edges")
}

pub(super) fn cliques_of(g: &Structure, k: usize, d: &[usize]) -> Structure {
    let cliques: Vec<Vec<usize>> = (0..g.domain_size())
        .combinations(k)
        .filter(|c| c.iter().tuple_combinations().all(|(&a, &b)| g.holds(0, &[a, b])))
        .collect();
    sets_graph(&cliques, d)
}

/// Named graph families available as `Custom` sequences besides the
/// gallery entries.
pub(super) fn plain_family(name: &str, n: usize) -> Option<Structure> {
    Some(match name {
        "cycle" => graphs::cycle(n),
        "path" => graphs::path(n),
        "complete" => graphs::complete(n),
        "empty" => graphs::empty(n),
        "star" => graphs::star(n),
        _ => return None,
    })
}

/// `P(n)` for each polynomial.
pub(super) fn sizes(polys: &[IntPolynomial], n: u64) -> Result<Vec<usize>, GalleryError> {
    polys
        .iter()
        .map(|p| nonneg(p, n, "size").map_err(GalleryError::from))
        .collect()
}

/// The base graph sequence for quotient entries: `K_n` unless overridden.
pub(super) fn base_spec(params: &GalleryParams) -> SequenceSpec {
    match &params.base {
        Some(b) => (**b).clone(),
        None => SequenceSpec::interpreted(complete(), SequenceSpec::basic(1, 0, vec![IntPolynomial::n()])),
    }
}

pub(super) fn base_graph(params: &GalleryParams, n: u64) -> Result<Structure, GalleryError> {
    match &params.base {
        Some(b) => Ok(b.term(n)?),
        None => Ok(graphs::complete(n as usize)),
    }
}
