use std::collections::BTreeSet;

use super::ast::{Formula, Node, VarId};
use super::LogicError;

/// Default cap on the number of literals in a normal form.
pub const DEFAULT_DNF_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AtomKey {
    /// Stored with the smaller variable first.
    Eq(VarId, VarId),
    Rel(String, Vec<VarId>),
}

impl AtomKey {
    fn node(&self) -> Node {
        match self {
            AtomKey::Eq(a, b) => Node::Eq(*a, *b),
            AtomKey::Rel(s, args) => Node::Atom(s.clone(), args.clone()),
        }
    }
}

/// A possibly negated atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub atom: AtomKey,
    pub positive: bool,
}

/// A conjunction of literals.
type Clause = BTreeSet<Literal>;

fn literal(atom: AtomKey, positive: bool) -> Option<Clause> {
    if let AtomKey::Eq(a, b) = atom {
        if a == b {
            return positive.then(Clause::new);
        }
    }
    Some(Clause::from([Literal { atom, positive }]))
}

fn conjoin(a: &Clause, b: &Clause) -> Option<Clause> {
    let mut out = a.clone();
    for lit in b {
        let flipped = Literal {
            atom: lit.atom.clone(),
            positive: !lit.positive,
        };
        if out.contains(&flipped) {
            return None;
        }
        out.insert(lit.clone());
    }
    Some(out)
}

struct Builder {
    budget: usize,
}

impl Builder {
    fn check(&self, clauses: &[Clause]) -> Result<(), LogicError> {
        let size: usize = clauses.iter().map(|c| c.len().max(1)).sum();
        if size > self.budget {
            Err(LogicError::DnfBudget(self.budget))
        } else {
            Ok(())
        }
    }

    fn product(&self, parts: Vec<Vec<Clause>>) -> Result<Vec<Clause>, LogicError> {
        let mut acc = vec![Clause::new()];
        for part in parts {
            let mut next = Vec::new();
            for a in &acc {
                for b in &part {
                    if let Some(c) = conjoin(a, b) {
                        next.push(c);
                    }
                }
            }
            dedup(&mut next);
            self.check(&next)?;
            acc = next;
        }
        Ok(acc)
    }

    fn sum(&self, parts: Vec<Vec<Clause>>) -> Result<Vec<Clause>, LogicError> {
        let mut out: Vec<Clause> = parts.into_iter().flatten().collect();
        dedup(&mut out);
        self.check(&out)?;
        Ok(out)
    }

    /// Clauses of `node`, or of its negation when `neg` is set.
    fn clauses(&self, node: &Node, neg: bool) -> Result<Vec<Clause>, LogicError> {
        match node {
            Node::True | Node::False => {
                let value = matches!(node, Node::True) != neg;
                Ok(if value { vec![Clause::new()] } else { Vec::new() })
            }
            Node::Eq(a, b) => Ok(literal(AtomKey::Eq(*a.min(b), *a.max(b)), !neg).into_iter().collect()),
            Node::Atom(s, args) => Ok(literal(AtomKey::Rel(s.clone(), args.clone()), !neg)
                .into_iter()
                .collect()),
            Node::Not(a) => self.clauses(a, !neg),
            Node::And(v) | Node::Or(v) => {
                let parts = v
                    .iter()
                    .map(|n| self.clauses(n, neg))
                    .collect::<Result<Vec<_>, _>>()?;
                if matches!(node, Node::And(_)) != neg {
                    self.product(parts)
                } else {
                    self.sum(parts)
                }
            }
            Node::Implies(a, b) => {
                if neg {
                    let parts = vec![self.clauses(a, false)?, self.clauses(b, true)?];
                    self.product(parts)
                } else {
                    let parts = vec![self.clauses(a, true)?, self.clauses(b, false)?];
                    self.sum(parts)
                }
            }
            Node::Iff(a, b) => {
                let (ap, an) = (self.clauses(a, false)?, self.clauses(a, true)?);
                let (bp, bn) = (self.clauses(b, false)?, self.clauses(b, true)?);
                let (left, right) = if neg {
                    (self.product(vec![ap, bn])?, self.product(vec![an, bp])?)
                } else {
                    (self.product(vec![ap, bp])?, self.product(vec![an, bn])?)
                };
                self.sum(vec![left, right])
            }
            Node::Exists(..) | Node::Forall(..) => Err(LogicError::NotQuantifierFree),
        }
    }
}

fn dedup(clauses: &mut Vec<Clause>) {
    if clauses.iter().any(|c| c.is_empty()) {
        clauses.clear();
        clauses.push(Clause::new());
        return;
    }
    let mut seen = BTreeSet::new();
    clauses.retain(|c| seen.insert(c.clone()));
}

/// Clauses of a quantifier-free node, literals sorted within each clause.
pub fn dnf_clauses(node: &Node, budget: usize) -> Result<Vec<Vec<Literal>>, LogicError> {
    let clauses = Builder { budget }.clauses(node, false)?;
    Ok(clauses.into_iter().map(|c| c.into_iter().collect()).collect())
}

/// An equivalent disjunction of conjunctions of literals.
pub fn to_dnf(phi: &Formula) -> Result<Formula, LogicError> {
    to_dnf_with_budget(phi, DEFAULT_DNF_BUDGET)
}

pub fn to_dnf_with_budget(phi: &Formula, budget: usize) -> Result<Formula, LogicError> {
    if !phi.is_quantifier_free() {
        return Err(LogicError::NotQuantifierFree);
    }
    let clauses = dnf_clauses(phi.node(), budget)?;
    let node = Node::or(
        clauses
            .into_iter()
            .map(|c| {
                Node::and(
                    c.into_iter()
                        .map(|l| if l.positive { l.atom.node() } else { l.atom.node().not() })
                        .collect(),
                )
            })
            .collect(),
    );
    Formula::new(
        node,
        phi.var_names().to_vec(),
        phi.free_vars().to_vec(),
        phi.signature().clone(),
    )
}

/// True when `node` is a disjunction of conjunctions of literals.
pub fn is_dnf(node: &Node) -> bool {
    fn is_literal(n: &Node) -> bool {
        match n {
            Node::Eq(..) | Node::Atom(..) => true,
            Node::Not(a) => matches!(a.as_ref(), Node::Eq(..) | Node::Atom(..)),
            _ => false,
        }
    }
    fn is_clause(n: &Node) -> bool {
        match n {
            Node::True => true,
            Node::And(v) => v.iter().all(is_literal),
            other => is_literal(other),
        }
    }
    match node {
        Node::False => true,
        Node::Or(v) => v.iter().all(is_clause),
        other => is_clause(other),
    }
}
