//! Finite relational structures over explicit signatures.
//!
//! Domains are dense `0..n` index ranges and every relation is kept as a
//! sorted, duplicate-free tuple set, so iteration order (and therefore every
//! derived output) is deterministic.

mod basic;
pub mod graphs;
mod index;
mod iso;
mod json;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use basic::{
    build_basic, build_marked_vertex, build_transitive_tournament, BasicStructureSpec,
};
pub use index::Indexed;
pub use iso::{weakly_isomorphic, weakly_isomorphic_with_cap, DEFAULT_ISO_CAP};

/// A tuple of domain indices.
pub type Tuple = Vec<usize>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("duplicate symbol `{0}` in signature")]
    DuplicateSymbol(String),
    #[error("symbol `{0}` must have arity at least 1")]
    ZeroArity(String),
    #[error("invalid symbol name `{0}`")]
    InvalidName(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("tuple {tuple:?} for `{symbol}` has length {got}, expected arity {expected}")]
    TupleArity {
        symbol: String,
        tuple: Tuple,
        expected: usize,
        got: usize,
    },
    #[error("tuple {tuple:?} for `{symbol}` leaves the domain 0..{domain}")]
    OutOfDomain {
        symbol: String,
        tuple: Tuple,
        domain: usize,
    },
    #[error("cannot merge `{left}` (arity {left_arity}) with `{right}` (arity {right_arity})")]
    MergeArity {
        left: String,
        left_arity: usize,
        right: String,
        right_arity: usize,
    },
    #[error("symbol `{0}` is already present")]
    NameClash(String),
    #[error("structure has {size} vertices, above the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
    #[error("{given} relation lists given for a signature of {symbols} symbols")]
    RelationCount { given: usize, symbols: usize },
    #[error("signatures differ: {left} vs {right}")]
    SignatureMismatch { left: String, right: String },
    #[error("malformed structure JSON: {0}")]
    Json(String),
}

/// A relation symbol with its arity.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// Checks the identifier rules shared by relation symbols and variables:
/// a letter or `_` followed by letters, digits, `_` or `'`.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// An ordered list of relation symbols with unique names.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new<I, S>(symbols: I) -> Result<Self, StructureError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut sig = Signature::default();
        for (name, arity) in symbols {
            sig.push(name.into(), arity)?;
        }
        Ok(sig)
    }

    /// The signature of simple graphs: one binary symbol `E`.
    pub fn graph() -> Self {
        Signature {
            symbols: vec![Symbol {
                name: "E".into(),
                arity: 2,
            }],
        }
    }

    pub fn push(&mut self, name: String, arity: usize) -> Result<(), StructureError> {
        if !is_identifier(&name) {
            return Err(StructureError::InvalidName(name));
        }
        if arity == 0 {
            return Err(StructureError::ZeroArity(name));
        }
        if self.index_of(&name).is_some() {
            return Err(StructureError::DuplicateSymbol(name));
        }
        self.symbols.push(Symbol { name, arity });
        Ok(())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn get(&self, name: &str) -> Option<&Symbol> {
        self.symbols.iter().find(|s| s.name == name)
    }

    pub fn arity_of(&self, name: &str) -> Option<usize> {
        self.get(name).map(|s| s.arity)
    }

    pub fn contains(&self, other: &Signature) -> bool {
        other
            .symbols
            .iter()
            .all(|s| self.arity_of(&s.name) == Some(s.arity))
    }

    /// Returns a name not yet used in this signature, appending ticks to
    /// `base` until it is free.
    pub fn fresh_name(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.index_of(&name).is_some() {
            name.push('\'');
        }
        name
    }

    /// `self ⊔ other`. Symbols of `other` whose names collide are suffixed
    /// with ticks; the returned vector gives the name each symbol of `other`
    /// received.
    pub fn disjoint_union(&self, other: &Signature) -> (Signature, Vec<String>) {
        let mut out = self.clone();
        let mut renamed = Vec::with_capacity(other.len());
        for sym in &other.symbols {
            let name = out.fresh_name(&sym.name);
            out.symbols.push(Symbol {
                name: name.clone(),
                arity: sym.arity,
            });
            renamed.push(name);
        }
        (out, renamed)
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}:{}", s.name, s.arity)?;
        }
        write!(f, "}}")
    }
}

/// A finite relational structure. Vertices are `0..domain_size()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Structure {
    signature: Signature,
    domain: usize,
    relations: Vec<BTreeSet<Tuple>>,
}

impl Structure {
    /// A structure with the given domain and all relations empty.
    pub fn empty(signature: Signature, domain: usize) -> Self {
        let relations = vec![BTreeSet::new(); signature.len()];
        Structure {
            signature,
            domain,
            relations,
        }
    }

    /// Builds a structure from one tuple list per symbol, in signature order.
    pub fn new<R, T>(signature: Signature, domain: usize, relations: R) -> Result<Self, StructureError>
    where
        R: IntoIterator<Item = T>,
        T: IntoIterator<Item = Tuple>,
    {
        let mut s = Structure::empty(signature, domain);
        for (i, tuples) in relations.into_iter().enumerate() {
            if i >= s.signature.len() {
                return Err(StructureError::RelationCount {
                    given: i + 1,
                    symbols: s.signature.len(),
                });
            }
            for t in tuples {
                s.insert(i, t)?;
            }
        }
        Ok(s)
    }

    /// Simple undirected graph on `n` vertices over [`Signature::graph`];
    /// each edge is stored in both orientations.
    pub fn graph(n: usize, edges: &[(usize, usize)]) -> Result<Self, StructureError> {
        let mut s = Structure::empty(Signature::graph(), n);
        for &(u, v) in edges {
            s.insert(0, vec![u, v])?;
            s.insert(0, vec![v, u])?;
        }
        Ok(s)
    }

    /// Adds a tuple to relation `rel`; returns whether it was new.
    pub fn insert(&mut self, rel: usize, tuple: Tuple) -> Result<bool, StructureError> {
        let sym = &self.signature.symbols[rel];
        if tuple.len() != sym.arity {
            return Err(StructureError::TupleArity {
                symbol: sym.name.clone(),
                expected: sym.arity,
                got: tuple.len(),
                tuple,
            });
        }
        if tuple.iter().any(|&v| v >= self.domain) {
            return Err(StructureError::OutOfDomain {
                symbol: sym.name.clone(),
                tuple,
                domain: self.domain,
            });
        }
        Ok(self.relations[rel].insert(tuple))
    }

    pub fn insert_named(&mut self, name: &str, tuple: Tuple) -> Result<bool, StructureError> {
        let rel = self
            .signature
            .index_of(name)
            .ok_or_else(|| StructureError::UnknownSymbol(name.to_string()))?;
        self.insert(rel, tuple)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn domain_size(&self) -> usize {
        self.domain
    }

    pub fn relation(&self, rel: usize) -> &BTreeSet<Tuple> {
        &self.relations[rel]
    }

    pub fn relations(&self) -> &[BTreeSet<Tuple>] {
        &self.relations
    }

    pub fn relation_by_name(&self, name: &str) -> Option<&BTreeSet<Tuple>> {
        self.signature.index_of(name).map(|i| &self.relations[i])
    }

    pub fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        self.relations[rel].contains(tuple)
    }

    pub fn tuple_count(&self) -> usize {
        self.relations.iter().map(BTreeSet::len).sum()
    }

    pub fn index(&self) -> Indexed<'_> {
        Indexed::new(self)
    }

    /// Same tuples under new symbol names (same order, same arities).
    pub fn with_symbol_names(&self, names: &[String]) -> Result<Structure, StructureError> {
        let sig = Signature::new(
            names
                .iter()
                .cloned()
                .zip(self.signature.symbols.iter().map(|s| s.arity)),
        )?;
        Ok(Structure {
            signature: sig,
            domain: self.domain,
            relations: self.relations.clone(),
        })
    }

    /// Image of the structure under the vertex bijection `perm` (old → new).
    pub fn relabel(&self, perm: &[usize]) -> Structure {
        debug_assert_eq!(perm.len(), self.domain);
        let relations = self
            .relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .map(|t| t.iter().map(|&v| perm[v]).collect())
                    .collect()
            })
            .collect();
        Structure {
            signature: self.signature.clone(),
            domain: self.domain,
            relations,
        }
    }

    /// Substructure induced on `vertices`; vertex `vertices[i]` becomes `i`.
    pub fn induced(&self, vertices: &[usize]) -> Structure {
        let mut pos = vec![usize::MAX; self.domain];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let relations = self
            .relations
            .iter()
            .map(|rel| {
                rel.iter()
                    .filter(|t| t.iter().all(|&v| pos[v] != usize::MAX))
                    .map(|t| t.iter().map(|&v| pos[v]).collect())
                    .collect()
            })
            .collect();
        Structure {
            signature: self.signature.clone(),
            domain: vertices.len(),
            relations,
        }
    }

    /// Connected components of the Gaifman graph, each sorted, ordered by
    /// smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.domain).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for rel in &self.relations {
            for t in rel {
                let a = find(&mut parent, t[0]);
                for &v in &t[1..] {
                    let b = find(&mut parent, v);
                    if a != b {
                        parent[b] = a;
                    }
                }
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..self.domain {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = groups.into_values().collect();
        comps.sort_by_key(|c| c[0]);
        comps
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Maximum number of distinct neighbours of a vertex in the Gaifman graph.
    pub fn max_degree(&self) -> usize {
        let mut nbrs = vec![BTreeSet::new(); self.domain];
        for rel in &self.relations {
            for t in rel {
                for &a in t {
                    for &b in t {
                        if a != b {
                            nbrs[a].insert(b);
                        }
                    }
                }
            }
        }
        nbrs.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Same structure viewed over a larger signature containing this one;
    /// the new symbols get empty relations.
    pub fn lifted_to(&self, target: &Signature) -> Result<Structure, StructureError> {
        self.adapt(&Adaptation::Lift(target.clone()))
    }

    pub fn adapt(&self, kind: &Adaptation) -> Result<Structure, StructureError> {
        adapt_signature(self, kind)
    }
}

/// `a ⊕ b`: disjoint union of the domains, `a`'s relations on the first
/// block and `b`'s (shifted by `|a|`, names ticked on collision) on the second.
pub fn strong_sum(a: &Structure, b: &Structure) -> Structure {
    let (signature, _) = a.signature.disjoint_union(&b.signature);
    let shift = a.domain;
    let mut relations = a.relations.clone();
    for rel in &b.relations {
        relations.push(
            rel.iter()
                .map(|t| t.iter().map(|&v| v + shift).collect())
                .collect(),
        );
    }
    Structure {
        signature,
        domain: a.domain + b.domain,
        relations,
    }
}

/// Left-associated strong sum of a list; the empty list gives the empty
/// structure over the empty signature.
pub fn strong_sum_all<'a, I>(parts: I) -> Structure
where
    I: IntoIterator<Item = &'a Structure>,
{
    parts
        .into_iter()
        .fold(Structure::empty(Signature::default(), 0), |acc, s| {
            strong_sum(&acc, s)
        })
}

/// Disjoint union `a + b` of two structures over the same signature.
pub fn disjoint_union(a: &Structure, b: &Structure) -> Result<Structure, StructureError> {
    if a.signature != b.signature {
        return Err(StructureError::SignatureMismatch {
            left: a.signature.to_string(),
            right: b.signature.to_string(),
        });
    }
    let mut out = a.clone();
    out.domain += b.domain;
    for (i, rel) in b.relations.iter().enumerate() {
        for t in rel {
            out.relations[i].insert(t.iter().map(|&v| v + a.domain).collect());
        }
    }
    Ok(out)
}

/// `m` disjoint copies of `s`.
pub fn copies(s: &Structure, m: usize) -> Structure {
    let mut out = Structure::empty(s.signature.clone(), s.domain * m);
    for c in 0..m {
        let shift = c * s.domain;
        for (i, rel) in s.relations.iter().enumerate() {
            for t in rel {
                out.relations[i].insert(t.iter().map(|&v| v + shift).collect());
            }
        }
    }
    out
}

/// Signature adaptations realised by trivial interpretation schemes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Adaptation {
    /// Extend to a signature containing the current one; new relations are empty.
    Lift(Signature),
    /// Drop the listed symbols.
    Forget(Vec<String>),
    /// For each `(keep, absorbed)` pair, union `absorbed` into `keep` and drop `absorbed`.
    Merge(Vec<(String, String)>),
    /// Add a unary relation holding on every vertex.
    Mark(String),
}

pub fn adapt_signature(s: &Structure, kind: &Adaptation) -> Result<Structure, StructureError> {
    match kind {
        Adaptation::Lift(target) => {
            for sym in s.signature.symbols() {
                match target.arity_of(&sym.name) {
                    Some(a) if a == sym.arity => {}
                    Some(_) => return Err(StructureError::NameClash(sym.name.clone())),
                    None => return Err(StructureError::UnknownSymbol(sym.name.clone())),
                }
            }
            let relations = target
                .symbols()
                .iter()
                .map(|sym| s.relation_by_name(&sym.name).cloned().unwrap_or_default())
                .collect();
            Ok(Structure {
                signature: target.clone(),
                domain: s.domain,
                relations,
            })
        }
        Adaptation::Forget(drop) => {
            for name in drop {
                if s.signature.index_of(name).is_none() {
                    return Err(StructureError::UnknownSymbol(name.clone()));
                }
            }
            let mut sig = Signature::default();
            let mut relations = Vec::new();
            for (sym, rel) in s.signature.symbols().iter().zip(&s.relations) {
                if !drop.contains(&sym.name) {
                    sig.symbols.push(sym.clone());
                    relations.push(rel.clone());
                }
            }
            Ok(Structure {
                signature: sig,
                domain: s.domain,
                relations,
            })
        }
        Adaptation::Merge(pairs) => {
            let mut out = s.clone();
            for (keep, absorbed) in pairs {
                let ki = out
                    .signature
                    .index_of(keep)
                    .ok_or_else(|| StructureError::UnknownSymbol(keep.clone()))?;
                let ai = out
                    .signature
                    .index_of(absorbed)
                    .ok_or_else(|| StructureError::UnknownSymbol(absorbed.clone()))?;
                let (ka, aa) = (out.signature.symbols[ki].arity, out.signature.symbols[ai].arity);
                if ka != aa || ki == ai {
                    return Err(StructureError::MergeArity {
                        left: keep.clone(),
                        left_arity: ka,
                        right: absorbed.clone(),
                        right_arity: aa,
                    });
                }
                let moved = out.relations.remove(ai);
                out.signature.symbols.remove(ai);
                let ki = out.signature.index_of(keep).expect("kept symbol");
                out.relations[ki].extend(moved);
            }
            Ok(out)
        }
        Adaptation::Mark(name) => {
            if s.signature.index_of(name).is_some() {
                return Err(StructureError::NameClash(name.clone()));
            }
            let mut out = s.clone();
            out.signature.push(name.clone(), 1)?;
            out.relations.push((0..s.domain).map(|v| vec![v]).collect());
            Ok(out)
        }
    }
}
