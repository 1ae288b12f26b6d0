//! Interpretation schemes: plain, graphical and quotient variants, formula
//! translation, composition, merging and the built-in graph products.

mod products;
mod quotient;
mod text;
mod translate;

use rayon::prelude::*;
use thiserror::Error;

use crate::budget;
use crate::logic::{Evaluator, Formula, LogicError, Node};
use crate::structures::{Signature, Structure, StructureError};

pub use products::{product_scheme, product_source_signature, ProductKind};
pub use quotient::{apply_quotient, Certificate, QuotientOutput, QuotientScheme};
pub use text::{parse_scheme, Scheme};
pub use translate::{compose, merge_marked_schemes, translate_formula};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InterpError {
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("input lacks source symbol `{symbol}` of arity {arity}")]
    SignatureMismatch { symbol: String, arity: usize },
    #[error("formula for `{which}` has {got} free variables, expected {expected}")]
    FreeVariableCount {
        which: String,
        expected: usize,
        got: usize,
    },
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("{what} needs {needed} candidates, above the budget of {budget}")]
    BudgetExceeded {
        what: String,
        needed: String,
        budget: u64,
    },
    #[error("edge formula is not symmetric: holds on {u:?},{v:?} but not on {v:?},{u:?}")]
    SymmetryViolation { u: Vec<usize>, v: Vec<usize> },
    #[error("equivalence formula is not {property}: witness {witness:?}")]
    NotEquivalence {
        property: String,
        witness: Vec<Vec<usize>>,
    },
    #[error("relation `{relation}` is not compatible with the equivalence: {representatives:?} vs {others:?}")]
    Compatibility {
        relation: String,
        representatives: Vec<Vec<usize>>,
        others: Vec<Vec<usize>>,
    },
    #[error("class of {representative:?} has {observed} members but certificate `{certificate}` declares {expected}")]
    CertificateMismatch {
        representative: Vec<usize>,
        certificate: String,
        expected: String,
        observed: usize,
    },
    #[error("no certificate covers the class of {0:?}")]
    UncoveredClass(Vec<usize>),
    #[error("mark `{0}` is not a unary symbol of its scheme's source")]
    MissingMark(String),
    #[error("symbol `{0}` occurs in more than one source signature")]
    NameClash(String),
    #[error("expected {expected} schemes to compose, got {got}")]
    Composition { expected: String, got: String },
    #[error("scheme file error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

/// `I = (p, ρ0, ρ1, …, ρq)`: target vertices are the `p`-tuples satisfying
/// `ρ0`, and the target relation `R_i` of arity `r_i` holds on
/// `(u_1, …, u_{r_i})` when `ρ_i` holds on their concatenation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterpretationScheme {
    name: String,
    p: usize,
    source: Signature,
    target: Signature,
    domain: Formula,
    relations: Vec<Formula>,
}

impl InterpretationScheme {
    pub fn new(
        name: impl Into<String>,
        p: usize,
        source: Signature,
        target: Signature,
        domain: Formula,
        relations: Vec<Formula>,
    ) -> Result<Self, InterpError> {
        if p == 0 {
            return Err(InterpError::ZeroExponent);
        }
        if domain.arity() != p {
            return Err(InterpError::FreeVariableCount {
                which: "domain".into(),
                expected: p,
                got: domain.arity(),
            });
        }
        if relations.len() != target.len() {
            return Err(InterpError::FreeVariableCount {
                which: "relation list".into(),
                expected: target.len(),
                got: relations.len(),
            });
        }
        for (sym, f) in target.symbols().iter().zip(&relations) {
            if f.arity() != p * sym.arity {
                return Err(InterpError::FreeVariableCount {
                    which: sym.name.clone(),
                    expected: p * sym.arity,
                    got: f.arity(),
                });
            }
        }
        let domain = domain.with_signature(source.clone())?;
        let relations = relations
            .iter()
            .map(|f| f.with_signature(source.clone()))
            .collect::<Result<_, _>>()?;
        Ok(InterpretationScheme {
            name: name.into(),
            p,
            source,
            target,
            domain,
            relations,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exponent(&self) -> usize {
        self.p
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn target(&self) -> &Signature {
        &self.target
    }

    pub fn domain_formula(&self) -> &Formula {
        &self.domain
    }

    pub fn relation_formulas(&self) -> &[Formula] {
        &self.relations
    }

    pub fn relation_formula(&self, name: &str) -> Option<&Formula> {
        self.target.index_of(name).map(|i| &self.relations[i])
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.domain.is_quantifier_free() && self.relations.iter().all(Formula::is_quantifier_free)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Renames source symbols (e.g. to read a summand of a strong sum).
    pub fn rename_source(&self, rename: &impl Fn(&str) -> Option<String>) -> Result<Self, InterpError> {
        let source = Signature::new(self.source.symbols().iter().map(|s| {
            (rename(&s.name).unwrap_or_else(|| s.name.clone()), s.arity)
        }))?;
        let domain = self.domain.rename_symbols(rename, source.clone())?;
        let relations = self
            .relations
            .iter()
            .map(|f| f.rename_symbols(rename, source.clone()))
            .collect::<Result<_, _>>()?;
        InterpretationScheme::new(self.name.clone(), self.p, source, self.target.clone(), domain, relations)
    }
}

/// Output of a scheme together with the source tuple behind each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpreted {
    pub structure: Structure,
    pub tuples: Vec<Vec<usize>>,
}

pub(crate) fn check_source(source: &Signature, a: &Structure) -> Result<(), InterpError> {
    for sym in source.symbols() {
        if a.signature().arity_of(&sym.name) != Some(sym.arity) {
            return Err(InterpError::SignatureMismatch {
                symbol: sym.name.clone(),
                arity: sym.arity,
            });
        }
    }
    Ok(())
}

fn check_count(what: &str, n: usize, k: usize, budget: u64) -> Result<(), InterpError> {
    match (n as u128).checked_pow(k as u32) {
        Some(c) if c <= budget as u128 => Ok(()),
        _ => Err(InterpError::BudgetExceeded {
            what: what.to_string(),
            needed: format!("{n}^{k}"),
            budget,
        }),
    }
}

/// Satisfying `p`-tuples of `phi` over `a`, in lexicographic order.
pub(crate) fn satisfying(phi: &Formula, a: &Structure) -> Result<Vec<Vec<usize>>, InterpError> {
    let n = a.domain_size();
    let p = phi.arity();
    check_count("domain", n, p, budget::tuple_budget())?;
    let ev = Evaluator::new(phi, a)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let chunks: Vec<Vec<Vec<usize>>> = (0..n)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut rest = vec![0; p - 1];
            loop {
                let mut t = Vec::with_capacity(p);
                t.push(first);
                t.extend_from_slice(&rest);
                if ev.holds(&t) {
                    out.push(t);
                }
                if !crate::logic::eval::advance(&mut rest, n) {
                    break;
                }
            }
            out
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Tuples `(i_1, …, i_r)` of indices into `elements` whose concatenated
/// source tuples satisfy `phi`, in lexicographic order.
pub(crate) fn relation_on(
    phi: &Formula,
    a: &Structure,
    elements: &[Vec<usize>],
    arity: usize,
) -> Result<Vec<Vec<usize>>, InterpError> {
    let m = elements.len();
    check_count("relation", m, arity, budget::assignment_budget())?;
    let ev = Evaluator::new(phi, a)?;
    if m == 0 {
        return Ok(Vec::new());
    }
    let chunks: Vec<Vec<Vec<usize>>> = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut out = Vec::new();
            let mut rest = vec![0; arity - 1];
            let mut values = Vec::new();
            loop {
                values.clear();
                values.extend_from_slice(&elements[first]);
                for &j in &rest {
                    values.extend_from_slice(&elements[j]);
                }
                if ev.holds(&values) {
                    let mut t = vec![first];
                    t.extend_from_slice(&rest);
                    out.push(t);
                }
                if !crate::logic::eval::advance(&mut rest, m) {
                    break;
                }
            }
            out
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

pub fn apply_interpretation(i: &InterpretationScheme, a: &Structure) -> Result<Interpreted, InterpError> {
    check_source(&i.source, a)?;
    let tuples = satisfying(&i.domain, a)?;
    let mut out = Structure::empty(i.target.clone(), tuples.len());
    for (r, (sym, f)) in i.target.symbols().iter().zip(&i.relations).enumerate() {
        for t in relation_on(f, a, &tuples, sym.arity)? {
            out.insert(r, t)?;
        }
    }
    Ok(Interpreted {
        structure: out,
        tuples,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum LoopPolicy {
    #[default]
    Drop,
    Keep,
}

/// `(p, ι, ρ)`: vertices are the `ι`-tuples, and `u ~ v` when `ρ(u; v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicalScheme {
    name: String,
    p: usize,
    source: Signature,
    iota: Formula,
    rho: Formula,
    loops: LoopPolicy,
}

impl GraphicalScheme {
    pub fn new(
        name: impl Into<String>,
        p: usize,
        source: Signature,
        iota: Formula,
        rho: Formula,
    ) -> Result<Self, InterpError> {
        let s = GraphicalScheme {
            name: name.into(),
            p,
            source: source.clone(),
            iota: iota.with_signature(source.clone())?,
            rho: rho.with_signature(source)?,
            loops: LoopPolicy::Drop,
        };
        // Validates exponent and arities.
        s.to_scheme()?;
        Ok(s)
    }

    pub fn with_loops(mut self, loops: LoopPolicy) -> Self {
        self.loops = loops;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn exponent(&self) -> usize {
        self.p
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn iota(&self) -> &Formula {
        &self.iota
    }

    pub fn rho(&self) -> &Formula {
        &self.rho
    }

    pub fn loops(&self) -> LoopPolicy {
        self.loops
    }

    /// The plain scheme with target `{E:2}`; dropped loops are excluded in
    /// the edge formula itself.
    pub fn to_scheme(&self) -> Result<InterpretationScheme, InterpError> {
        let edge = match self.loops {
            LoopPolicy::Keep => self.rho.clone(),
            LoopPolicy::Drop => {
                if self.rho.arity() != 2 * self.p {
                    return Err(InterpError::FreeVariableCount {
                        which: "E".into(),
                        expected: 2 * self.p,
                        got: self.rho.arity(),
                    });
                }
                let free = self.rho.free_vars();
                let same = Node::and((0..self.p).map(|k| Node::Eq(free[k], free[self.p + k])).collect());
                Formula::new(
                    Node::and(vec![self.rho.node().clone(), same.not()]),
                    self.rho.var_names().to_vec(),
                    free.to_vec(),
                    self.source.clone(),
                )?
            }
        };
        InterpretationScheme::new(
            self.name.clone(),
            self.p,
            self.source.clone(),
            Signature::graph(),
            self.iota.clone(),
            vec![edge],
        )
    }
}

/// Applies a graphical scheme after checking that the edge formula is
/// symmetric on this input.
pub fn apply_graphical(g: &GraphicalScheme, a: &Structure) -> Result<Interpreted, InterpError> {
    let out = apply_interpretation(&g.to_scheme()?, a)?;
    let edges = out.structure.relation(0);
    for e in edges {
        if !edges.contains(&vec![e[1], e[0]]) {
            return Err(InterpError::SymmetryViolation {
                u: out.tuples[e[0]].clone(),
                v: out.tuples[e[1]].clone(),
            });
        }
    }
    Ok(out)
}

/// Shared helper: a formula from text over `source` with declared variables.
pub(crate) fn formula(text: &str, source: &Signature, vars: &[&str]) -> Result<Formula, InterpError> {
    Ok(crate::logic::parse_formula(text, source, Some(vars))?)
}

/// Variable names `prefix1..prefixk`.
pub(crate) fn numbered(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}
