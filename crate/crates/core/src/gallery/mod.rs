//! Named constructions as (scheme, direct oracle) pairs, canonical forms,
//! bounded-degree decomposition and the Paley experiment.

pub mod canon;
mod decompose;
mod entries;
mod paley;

use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counting::CountError;
use crate::interp::Scheme;
use crate::sequences::{
    detect_polynomial, size_degree, IntPolynomial, PolyError, Query, SequenceError, SequenceSpec, Verdict, DEFAULT_VERIFY_COUNT,
};
use crate::structures::{graphs, Signature, Structure, StructureError};

pub use canon::{canonical_form, canonical_form_with_cap, canonical_relabel, CanonicalKey, DEFAULT_CANON_CAP};
pub use decompose::{bounded_decompose, component_census, Decomposition, DecompositionPart};
pub use paley::{is_prime, paley_experiment, paley_graph, PaleyFit, PaleyReport, PaleyRow};

/// Cap for canonical forms of gallery outputs, which exceed the default.
pub const GALLERY_CANON_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GalleryError {
    #[error("unknown gallery entry `{0}`")]
    UnknownEntry(String),
    #[error("parameter `{name}`: {message}")]
    Param { name: String, message: String },
    #[error(transparent)]
    Sequence(#[from] SequenceError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("term {n} has maximum degree {degree}, above the cap {cap}")]
    UnboundedDegree { n: u64, degree: usize, cap: usize },
    #[error("decomposition does not reassemble term {n}")]
    Verification { n: u64 },
    #[error("{0}")]
    Paley(String),
}

fn param(name: &str, message: impl Into<String>) -> GalleryError {
    GalleryError::Param {
        name: name.into(),
        message: message.into(),
    }
}

/// Parameters of a gallery entry; each entry reads the fields it needs and
/// falls back to its defaults.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct GalleryParams {
    /// Tuple length for `johnson`, `kneser`, `cliqueIntersection`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Admissible intersection sizes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<usize>>,
    /// Blow-up sizes (`vertexBlowup`, `treeBlowup`) or the number of stars (`starUnion`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polys: Option<Vec<IntPolynomial>>,
    /// Edges of the blown-up graph on vertices `0..k`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(usize, usize)>>,
    /// `parents[i]` is the parent of tree vertex `i + 2`; the root is `1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parents: Option<Vec<usize>>,
    /// Graph sequence fed to `lineGraph`, `subdivision`, `cliqueIntersection`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<SequenceSpec>>,
    /// Use the unrepaired star-union domain formula `S1(y,x)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub literal: Option<bool>,
}

/// Static description of an entry for `gallery list`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct EntryInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub params: Vec<&'static str>,
    pub defaults: GalleryParams,
    pub range: (u64, u64),
}

pub const ENTRY_NAMES: [&str; 11] = [
    "crown",
    "kneser",
    "johnson",
    "vertexBlowup",
    "treeBlowup",
    "starUnion",
    "halfGraph",
    "chordGraph",
    "cliqueIntersection",
    "lineGraph",
    "subdivision",
];

fn polys(list: &[&str]) -> Option<Vec<IntPolynomial>> {
    Some(list.iter().map(|p| p.parse().expect("valid default")).collect())
}

/// Every entry with its defaults and default check range.
pub fn entries() -> Vec<EntryInfo> {
    let none = GalleryParams::default;
    let info = |name, description, params: &[&'static str], defaults, range| EntryInfo {
        name,
        description,
        params: params.to_vec(),
        defaults,
        range,
    };
    vec![
        info("crown", "K_{n,n} minus a perfect matching", &[], none(), (0, 6)),
        info(
            "kneser",
            "k-subsets of [n], adjacent when disjoint",
            &["k"],
            GalleryParams { k: Some(2), ..none() },
            (0, 6),
        ),
        info(
            "johnson",
            "k-subsets of [n], adjacent when the intersection size is in d",
            &["k", "d"],
            GalleryParams {
                k: Some(2),
                d: Some(vec![1]),
                ..none()
            },
            (0, 6),
        ),
        info(
            "vertexBlowup",
            "vertex i of a fixed graph replaced by P_i(n) twins",
            &["edges", "polys"],
            GalleryParams {
                edges: Some(vec![(0, 1), (1, 2)]),
                polys: polys(&["n", "n+1", "2*n"]),
                ..none()
            },
            (0, 6),
        ),
        info(
            "treeBlowup",
            "each edge of a rooted tree replaced by P_e(n) copies of the subtree below it",
            &["parents", "polys"],
            GalleryParams {
                parents: Some(vec![1, 2]),
                polys: polys(&["n", "n", "n"]),
                ..none()
            },
            (0, 6),
        ),
        info(
            "starUnion",
            "disjoint stars of orders 1..P(n)",
            &["polys", "literal"],
            GalleryParams {
                polys: polys(&["n"]),
                ..none()
            },
            (0, 6),
        ),
        info("halfGraph", "a_i ~ b_j iff i < j on 2n vertices", &[], none(), (0, 6)),
        info("chordGraph", "crossing chords of a convex n-gon", &[], none(), (0, 8)),
        info(
            "cliqueIntersection",
            "k-cliques of a graph sequence, adjacent when the intersection size is in d",
            &["k", "d", "base"],
            GalleryParams {
                k: Some(3),
                d: Some(vec![1]),
                ..none()
            },
            (0, 6),
        ),
        info("lineGraph", "line graphs of a graph sequence", &["base"], none(), (0, 6)),
        info("subdivision", "1-subdivisions of a graph sequence", &["base"], none(), (0, 6)),
    ]
}

pub fn entry(name: &str) -> Result<EntryInfo, GalleryError> {
    entries()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| GalleryError::UnknownEntry(name.into()))
}

/// `gallery list` output.
pub fn list_json() -> String {
    let list = serde_json::json!({ "schemaVersion": 1, "entries": entries() });
    serde_json::to_string_pretty(&list).expect("entries serialize")
}

/// Given parameters over the entry's defaults.
fn resolve(name: &str, params: &GalleryParams) -> Result<GalleryParams, GalleryError> {
    let d = entry(name)?.defaults;
    Ok(GalleryParams {
        k: params.k.or(d.k),
        d: params.d.clone().or(d.d),
        polys: params.polys.clone().or(d.polys),
        edges: params.edges.clone().or(d.edges),
        parents: params.parents.clone().or(d.parents),
        base: params.base.clone().or(d.base),
        literal: params.literal.or(d.literal),
    })
}

struct Resolved {
    k: usize,
    d: Vec<usize>,
    polys: Vec<IntPolynomial>,
    edges: Vec<(usize, usize)>,
    parents: Vec<usize>,
    params: GalleryParams,
}

fn validated(name: &str, params: &GalleryParams) -> Result<Resolved, GalleryError> {
    let p = resolve(name, params)?;
    let k = p.k.unwrap_or(0);
    let d = p.d.clone().unwrap_or_default();
    let polys = p.polys.clone().unwrap_or_default();
    let edges = p.edges.clone().unwrap_or_default();
    let parents = p.parents.clone().unwrap_or_default();
    match name {
        "kneser" | "johnson" | "cliqueIntersection" => {
            if k == 0 {
                return Err(param("k", "must be at least 1"));
            }
            if let Some(bad) = d.iter().find(|&&s| s > k) {
                return Err(param("d", format!("intersection size {bad} exceeds k = {k}")));
            }
        }
        "vertexBlowup" => {
            if polys.is_empty() {
                return Err(param("polys", "one polynomial per vertex is required"));
            }
            if let Some(&(i, j)) = edges.iter().find(|&&(i, j)| i >= polys.len() || j >= polys.len() || i == j) {
                return Err(param("edges", format!("edge ({i}, {j}) is a loop or leaves 0..{}", polys.len())));
            }
        }
        "treeBlowup" => {
            if polys.len() != parents.len() + 1 {
                return Err(param("polys", format!("expected {} polynomials", parents.len() + 1)));
            }
            if let Some((i, _)) = parents.iter().enumerate().find(|&(i, &p)| p == 0 || p > i + 1) {
                return Err(param("parents", format!("vertex {} needs a parent among 1..={}", i + 2, i + 1)));
            }
        }
        "starUnion" if polys.len() != 1 => return Err(param("polys", "exactly one polynomial is required")),
        _ => {}
    }
    if let Some(base) = &p.base {
        if base.signature()? != Signature::graph() {
            return Err(param("base", "must be a graph sequence"));
        }
    }
    Ok(Resolved {
        k,
        d,
        polys,
        edges,
        parents,
        params: p,
    })
}

/// The entry as an interpreted sequence.
pub fn scheme_spec(name: &str, params: &GalleryParams) -> Result<SequenceSpec, GalleryError> {
    let r = validated(name, params)?;
    let n = || vec![IntPolynomial::n()];
    let interp = |s: Scheme, inner| SequenceSpec::interpreted(s, inner);
    Ok(match name {
        "crown" => interp(entries::crown(), SequenceSpec::basic(1, 2, n())),
        "halfGraph" => interp(entries::half_graph(), SequenceSpec::basic(1, 2, n())),
        "chordGraph" => interp(entries::chord_graph(), SequenceSpec::basic(1, 0, n())),
        "kneser" => interp(entries::johnson(r.k, &[0]), SequenceSpec::basic(1, 0, n())),
        "johnson" => interp(entries::johnson(r.k, &r.d), SequenceSpec::basic(1, 0, n())),
        "vertexBlowup" => interp(
            entries::vertex_blowup(r.polys.len(), &r.edges),
            SequenceSpec::basic(r.polys.len(), 0, r.polys.clone()),
        ),
        "treeBlowup" => interp(
            entries::tree_blowup(&r.parents),
            SequenceSpec::basic(r.polys.len(), 0, r.polys.clone()),
        ),
        "starUnion" => interp(
            entries::star_union(r.params.literal.unwrap_or(false)),
            SequenceSpec::basic(1, 0, r.polys.clone()),
        ),
        "lineGraph" => interp(entries::line_graph(), entries::base_spec(&r.params)),
        "subdivision" => interp(entries::subdivision(), entries::base_spec(&r.params)),
        "cliqueIntersection" => interp(entries::clique_intersection(r.k, &r.d), entries::base_spec(&r.params)),
        other => return Err(GalleryError::UnknownEntry(other.into())),
    })
}

/// The direct construction at index `n`.
pub fn oracle(name: &str, params: &GalleryParams, n: u64) -> Result<Structure, GalleryError> {
    let r = validated(name, params)?;
    let m = n as usize;
    Ok(match name {
        "crown" => entries::crown_graph(m),
        "halfGraph" => entries::half(m),
        "chordGraph" => entries::chords(m),
        "kneser" => entries::johnson_graph(m, r.k, &[0]),
        "johnson" => entries::johnson_graph(m, r.k, &r.d),
        "vertexBlowup" => entries::blown_up_graph(&entries::sizes(&r.polys, n)?, &r.edges),
        "treeBlowup" => entries::blown_up_tree(&r.parents, &entries::sizes(&r.polys, n)?),
        "starUnion" => entries::star_forest(entries::sizes(&r.polys, n)?[0]),
        "lineGraph" => entries::line_of(&entries::base_graph(&r.params, n)?),
        "subdivision" => entries::subdivision_of(&entries::base_graph(&r.params, n)?),
        "cliqueIntersection" => entries::cliques_of(&entries::base_graph(&r.params, n)?, r.k, &r.d),
        other => return Err(GalleryError::UnknownEntry(other.into())),
    })
}

/// Both constructions at index `n`: `(via scheme, via oracle)`.
pub fn gallery_build(name: &str, params: &GalleryParams, n: u64) -> Result<(Structure, Structure), GalleryError> {
    let spec = scheme_spec(name, params)?;
    Ok((spec.term(n)?, oracle(name, params, n)?))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckRow {
    pub n: u64,
    pub scheme_vertices: usize,
    pub scheme_edges: usize,
    pub oracle_vertices: usize,
    pub oracle_edges: usize,
    pub keys_equal: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PatternVerdict {
    pub pattern: String,
    pub verdict: Verdict,
    pub fit: IntPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Mismatch {
    pub n: u64,
    pub via_scheme: Structure,
    pub via_oracle: Structure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GalleryReport {
    pub schema_version: u32,
    pub name: String,
    pub params: GalleryParams,
    pub rows: Vec<CheckRow>,
    pub detector: Vec<PatternVerdict>,
    pub first_mismatch: Option<Mismatch>,
}

impl GalleryReport {
    /// Every index matched and every detector verdict is `Polynomial`.
    pub fn passed(&self) -> bool {
        self.first_mismatch.is_none() && self.detector.iter().all(|v| v.verdict == Verdict::Polynomial)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// `n,schemeVertices,schemeEdges,oracleVertices,oracleEdges,keysEqual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,scheme_vertices,scheme_edges,oracle_vertices,oracle_edges,keys_equal\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n, r.scheme_vertices, r.scheme_edges, r.oracle_vertices, r.oracle_edges, r.keys_equal
            ));
        }
        out
    }
}

/// Patterns checked by `gallery_check`.
pub fn detector_patterns() -> Vec<(&'static str, Structure)> {
    vec![
        ("K1", graphs::complete(1)),
        ("K2", graphs::complete(2)),
        ("P3", graphs::path(3)),
        ("K3", graphs::complete(3)),
    ]
}

/// Compares scheme and oracle by canonical key on every `n` in `range`,
/// and with `detect` runs the detector on [`detector_patterns`].
pub fn gallery_check(
    name: &str,
    params: &GalleryParams,
    range: RangeInclusive<u64>,
    detect: bool,
) -> Result<GalleryReport, GalleryError> {
    let spec = scheme_spec(name, params)?;
    let built: Vec<(u64, Structure, Structure, bool)> = range
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|n| {
            let via_scheme = spec.term(n)?;
            let via_oracle = oracle(name, params, n)?;
            let equal = canonical_form_with_cap(&via_scheme, GALLERY_CANON_CAP)?
                == canonical_form_with_cap(&via_oracle, GALLERY_CANON_CAP)?;
            Ok((n, via_scheme, via_oracle, equal))
        })
        .collect::<Vec<Result<_, GalleryError>>>()
        .into_iter()
        .collect::<Result<_, _>>()?;
    let rows = built
        .iter()
        .map(|(n, s, o, eq)| CheckRow {
            n: *n,
            scheme_vertices: s.domain_size(),
            scheme_edges: graphs::edge_count(s),
            oracle_vertices: o.domain_size(),
            oracle_edges: graphs::edge_count(o),
            keys_equal: *eq,
        })
        .collect();
    let first_mismatch = built.into_iter().find(|b| !b.3).map(|(n, s, o, _)| Mismatch {
        n,
        via_scheme: s,
        via_oracle: o,
    });
    let mut detector = Vec::new();
    if detect {
        for (label, pattern) in detector_patterns() {
            let fit = detect_polynomial(&spec, &Query::hom(pattern), DEFAULT_VERIFY_COUNT)?;
            detector.push(PatternVerdict {
                pattern: label.into(),
                verdict: fit.verdict,
                fit: fit.fit,
            });
        }
    }
    Ok(GalleryReport {
        schema_version: 1,
        name: name.into(),
        params: resolve(name, params)?,
        rows,
        detector,
        first_mismatch,
    })
}

/// Signature of a `Custom` sequence.
pub fn custom_signature(name: &str, params: &GalleryParams) -> Result<Signature, GalleryError> {
    if entries::plain_family(name, 0).is_none() {
        validated(name, params)?;
    }
    Ok(Signature::graph())
}

/// Term of a `Custom` sequence: a plain family or a gallery oracle.
pub fn custom_term(name: &str, params: &GalleryParams, n: u64) -> Result<Structure, GalleryError> {
    match entries::plain_family(name, n as usize) {
        Some(g) => Ok(g),
        None => oracle(name, params, n),
    }
}

/// Degree bound on the size of a `Custom` sequence.
pub fn custom_size_degree(name: &str, params: &GalleryParams) -> Result<usize, GalleryError> {
    if entries::plain_family(name, 0).is_some() {
        return Ok(1);
    }
    Ok(size_degree(&scheme_spec(name, params)?)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::weakly_isomorphic;

    #[test]
    fn examples() {
        let none = GalleryParams::default();
        let (s, o) = gallery_build("crown", &none, 3).unwrap();
        assert!(weakly_isomorphic(&s, &graphs::cycle(6)).unwrap());
        assert!(weakly_isomorphic(&o, &graphs::cycle(6)).unwrap());
        let johnson = GalleryParams {
            k: Some(2),
            d: Some(vec![1]),
            ..none.clone()
        };
        let (s, _) = gallery_build("johnson", &johnson, 5).unwrap();
        assert_eq!((s.domain_size(), graphs::edge_count(&s)), (10, 30));
        let (s, _) = gallery_build("johnson", &johnson, 4).unwrap();
        assert_eq!((s.domain_size(), graphs::edge_count(&s)), (6, 12));
        let (s, o) = gallery_build("halfGraph", &none, 4).unwrap();
        assert_eq!((s.domain_size(), graphs::edge_count(&s)), (8, 6));
        assert!(weakly_isomorphic(&s, &o).unwrap());
        let (s, _) = gallery_build("chordGraph", &none, 4).unwrap();
        assert_eq!((s.domain_size(), graphs::edge_count(&s)), (6, 1));
    }

    #[test]
    fn literal_star_union_differs() {
        let literal = GalleryParams {
            literal: Some(true),
            ..GalleryParams::default()
        };
        let report = gallery_check("starUnion", &literal, 1..=5, false).unwrap();
        assert_eq!(report.first_mismatch.as_ref().map(|m| m.n), Some(1));
        assert!(report.rows.iter().all(|r| r.scheme_edges == 0));
        assert!(gallery_check("starUnion", &GalleryParams::default(), 1..=5, false).unwrap().passed());
    }

    #[test]
    fn parameter_errors() {
        let bad = GalleryParams {
            k: Some(2),
            d: Some(vec![3]),
            ..GalleryParams::default()
        };
        assert!(matches!(scheme_spec("johnson", &bad), Err(GalleryError::Param { .. })));
        assert!(matches!(scheme_spec("nope", &bad), Err(GalleryError::UnknownEntry(_))));
        let json = serde_json::to_string(&GalleryParams {
            polys: Some(vec!["n^2".parse().unwrap()]),
            ..GalleryParams::default()
        })
        .unwrap();
        assert_eq!(json, r#"{"polys":["C(n,1) + 2*C(n,2)"]}"#);
    }

    #[test]
    fn list_mentions_every_entry() {
        let list = list_json();
        for name in ENTRY_NAMES {
            assert!(list.contains(&format!("\"{name}\"")), "{name}");
        }
    }
}
