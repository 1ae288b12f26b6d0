use std::collections::HashMap;

use rayon::prelude::*;

use crate::budget;
use crate::structures::{Indexed, Structure};

use super::ast::{Formula, Node, VarId};
use super::LogicError;

enum Compiled {
    True,
    False,
    Eq(VarId, VarId),
    Atom(usize, Vec<VarId>),
    Not(Box<Compiled>),
    And(Vec<Compiled>),
    Or(Vec<Compiled>),
    Iff(Box<Compiled>, Box<Compiled>),
    Exists(VarId, Box<Compiled>),
    Forall(VarId, Box<Compiled>),
}

fn compile(node: &Node, s: &Structure) -> Result<Compiled, LogicError> {
    Ok(match node {
        Node::True => Compiled::True,
        Node::False => Compiled::False,
        Node::Eq(a, b) => Compiled::Eq(*a, *b),
        Node::Atom(name, args) => {
            let rel = s.signature().index_of(name).ok_or_else(|| LogicError::UnknownSymbol {
                symbol: name.clone(),
                position: None,
            })?;
            let arity = s.signature().symbols()[rel].arity;
            if arity != args.len() {
                return Err(LogicError::ArityMismatch {
                    symbol: name.clone(),
                    expected: arity,
                    got: args.len(),
                    position: None,
                });
            }
            Compiled::Atom(rel, args.clone())
        }
        Node::Not(a) => Compiled::Not(Box::new(compile(a, s)?)),
        Node::And(v) => Compiled::And(v.iter().map(|n| compile(n, s)).collect::<Result<_, _>>()?),
        Node::Or(v) => Compiled::Or(v.iter().map(|n| compile(n, s)).collect::<Result<_, _>>()?),
        Node::Implies(a, b) => Compiled::Or(vec![
            Compiled::Not(Box::new(compile(a, s)?)),
            compile(b, s)?,
        ]),
        Node::Iff(a, b) => Compiled::Iff(Box::new(compile(a, s)?), Box::new(compile(b, s)?)),
        Node::Exists(v, a) => Compiled::Exists(*v, Box::new(compile(a, s)?)),
        Node::Forall(v, a) => Compiled::Forall(*v, Box::new(compile(a, s)?)),
    })
}

/// A formula compiled against one structure.
pub struct Evaluator<'a> {
    code: Compiled,
    index: Indexed<'a>,
    free: Vec<VarId>,
    var_count: usize,
}

impl<'a> Evaluator<'a> {
    /// Symbols are matched by name; every symbol used by the formula must
    /// exist in the structure with the same arity.
    pub fn new(phi: &Formula, s: &'a Structure) -> Result<Self, LogicError> {
        Ok(Evaluator {
            code: compile(phi.node(), s)?,
            index: s.index(),
            free: phi.free_vars().to_vec(),
            var_count: phi.var_count(),
        })
    }

    pub fn domain_size(&self) -> usize {
        self.index.domain_size()
    }

    /// Truth value with the free variables set to `values`, in order.
    pub fn holds(&self, values: &[usize]) -> bool {
        let mut env = vec![0; self.var_count];
        self.holds_in(values, &mut env)
    }

    fn holds_in(&self, values: &[usize], env: &mut [usize]) -> bool {
        for (&v, &x) in self.free.iter().zip(values) {
            env[v] = x;
        }
        self.eval(&self.code, env)
    }

    fn eval(&self, c: &Compiled, env: &mut [usize]) -> bool {
        match c {
            Compiled::True => true,
            Compiled::False => false,
            Compiled::Eq(a, b) => env[*a] == env[*b],
            Compiled::Atom(rel, args) => {
                let mut buf = [0usize; 8];
                if args.len() <= buf.len() {
                    for (slot, &a) in buf.iter_mut().zip(args) {
                        *slot = env[a];
                    }
                    self.index.holds(*rel, &buf[..args.len()])
                } else {
                    let t: Vec<usize> = args.iter().map(|&a| env[a]).collect();
                    self.index.holds(*rel, &t)
                }
            }
            Compiled::Not(a) => !self.eval(a, env),
            Compiled::And(v) => v.iter().all(|n| self.eval(n, env)),
            Compiled::Or(v) => v.iter().any(|n| self.eval(n, env)),
            Compiled::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            Compiled::Exists(x, a) => {
                let saved = env[*x];
                let r = (0..self.domain_size()).any(|d| {
                    env[*x] = d;
                    self.eval(a, env)
                });
                env[*x] = saved;
                r
            }
            Compiled::Forall(x, a) => {
                let saved = env[*x];
                let r = (0..self.domain_size()).all(|d| {
                    env[*x] = d;
                    self.eval(a, env)
                });
                env[*x] = saved;
                r
            }
        }
    }

    /// Number of free-variable tuples satisfying the formula.
    pub fn count(&self) -> u64 {
        let n = self.domain_size();
        let p = self.free.len();
        if p == 0 {
            return self.holds(&[]) as u64;
        }
        if n == 0 {
            return 0;
        }
        // Split on the first variable; each worker walks the rest in order.
        (0..n)
            .into_par_iter()
            .map(|first| {
                let mut env = vec![0; self.var_count];
                let mut values = vec![0; p];
                values[0] = first;
                let mut count = 0u64;
                loop {
                    if self.holds_in(&values, &mut env) {
                        count += 1;
                    }
                    if !advance(&mut values[1..], n) {
                        break;
                    }
                }
                count
            })
            .sum()
    }

    /// Calls `f` on every satisfying tuple, in lexicographic order.
    pub fn for_each_satisfying(&self, mut f: impl FnMut(&[usize])) {
        let n = self.domain_size();
        let p = self.free.len();
        if p > 0 && n == 0 {
            return;
        }
        let mut env = vec![0; self.var_count];
        let mut values = vec![0; p];
        loop {
            if self.holds_in(&values, &mut env) {
                f(&values);
            }
            if !advance(&mut values, n) {
                break;
            }
        }
    }
}

/// Odometer step over `[0, n)^k`; false once it wraps around.
pub(crate) fn advance(values: &mut [usize], n: usize) -> bool {
    for slot in values.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return true;
        }
        *slot = 0;
    }
    false
}

fn check_budget(n: usize, p: usize, budget: u64) -> Result<(), LogicError> {
    let needed = (n as u128).checked_pow(p as u32);
    match needed {
        Some(k) if k <= budget as u128 => Ok(()),
        _ => Err(LogicError::BudgetExceeded {
            needed: format!("{n}^{p}"),
            budget,
        }),
    }
}

/// Evaluates `phi` on `s` under a name-keyed assignment of its free variables.
pub fn eval_formula(
    phi: &Formula,
    s: &Structure,
    assignment: &HashMap<String, usize>,
) -> Result<bool, LogicError> {
    let values = phi
        .free_var_names()
        .into_iter()
        .map(|name| {
            assignment
                .get(name)
                .copied()
                .ok_or_else(|| LogicError::MissingAssignment(name.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    eval_at(phi, s, &values)
}

/// Evaluates `phi` with its free variables set to `values`, in order.
pub fn eval_at(phi: &Formula, s: &Structure, values: &[usize]) -> Result<bool, LogicError> {
    if values.len() != phi.arity() {
        return Err(LogicError::WrongValueCount {
            expected: phi.arity(),
            got: values.len(),
        });
    }
    for (name, &v) in phi.free_var_names().into_iter().zip(values) {
        if v >= s.domain_size() {
            return Err(LogicError::VertexOutOfRange {
                name: name.to_string(),
                vertex: v,
                domain: s.domain_size(),
            });
        }
    }
    Ok(Evaluator::new(phi, s)?.holds(values))
}

/// `|φ(A)|` by enumerating all `|A|^p` assignments.
pub fn count_satisfying(phi: &Formula, s: &Structure) -> Result<u64, LogicError> {
    count_satisfying_with_budget(phi, s, budget::assignment_budget())
}

pub fn count_satisfying_with_budget(
    phi: &Formula,
    s: &Structure,
    budget: u64,
) -> Result<u64, LogicError> {
    check_budget(s.domain_size(), phi.arity(), budget)?;
    Ok(Evaluator::new(phi, s)?.count())
}

/// The satisfaction set in lexicographic order.
pub fn satisfying_tuples(phi: &Formula, s: &Structure) -> Result<Vec<Vec<usize>>, LogicError> {
    check_budget(s.domain_size(), phi.arity(), budget::assignment_budget())?;
    let mut out = Vec::new();
    Evaluator::new(phi, s)?.for_each_satisfying(|t| out.push(t.to_vec()));
    Ok(out)
}
