//! Exact homomorphism, injective-homomorphism and induced-copy counts.

mod partition;

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::structures::{Indexed, Structure};

pub use partition::{mobius, partitions, quotient, Partition, Partitions};

/// Default cap on search-tree nodes per count.
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("symbol `{symbol}` has arity {pattern} in the pattern but {target} in the target")]
    ArityMismatch {
        symbol: String,
        pattern: usize,
        target: usize,
    },
    #[error("search exceeded the budget of {0} nodes")]
    BudgetExceeded(u64),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Hom,
    Inj,
    Ind,
}

impl fmt::Display for CountMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountMode::Hom => "hom",
            CountMode::Inj => "inj",
            CountMode::Ind => "ind",
        })
    }
}

impl std::str::FromStr for CountMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "hom" => Ok(CountMode::Hom),
            "inj" => Ok(CountMode::Inj),
            "ind" => Ok(CountMode::Ind),
            other => Err(format!("unknown count mode `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    pub value: BigUint,
    pub mode: CountMode,
    pub nodes_explored: u64,
}

pub fn hom_count(pattern: &Structure, target: &Structure) -> Result<CountReport, CountError> {
    count(CountMode::Hom, pattern, target, DEFAULT_NODE_BUDGET)
}

pub fn inj_count(pattern: &Structure, target: &Structure) -> Result<CountReport, CountError> {
    count(CountMode::Inj, pattern, target, DEFAULT_NODE_BUDGET)
}

pub fn ind_count(pattern: &Structure, target: &Structure) -> Result<CountReport, CountError> {
    count(CountMode::Ind, pattern, target, DEFAULT_NODE_BUDGET)
}

/// Shorthand for the count value alone.
pub fn count_value(mode: CountMode, pattern: &Structure, target: &Structure) -> Result<BigUint, CountError> {
    Ok(count(mode, pattern, target, DEFAULT_NODE_BUDGET)?.value)
}

/// Symbols are matched by name. A pattern symbol missing from the target
/// acts as an empty relation there; for `ind`, target symbols missing from
/// the pattern act as empty relations in the pattern.
pub fn count(
    mode: CountMode,
    pattern: &Structure,
    target: &Structure,
    budget: u64,
) -> Result<CountReport, CountError> {
    let zero = |nodes| CountReport {
        value: BigUint::zero(),
        mode,
        nodes_explored: nodes,
    };
    // Pairs (pattern relation, target relation).
    let mut pairs: Vec<(Option<usize>, usize)> = Vec::new();
    for (r, sym) in pattern.signature().symbols().iter().enumerate() {
        match target.signature().index_of(&sym.name) {
            Some(t) => {
                let ta = target.signature().symbols()[t].arity;
                if ta != sym.arity {
                    return Err(CountError::ArityMismatch {
                        symbol: sym.name.clone(),
                        pattern: sym.arity,
                        target: ta,
                    });
                }
                pairs.push((Some(r), t));
            }
            None if !pattern.relation(r).is_empty() => return Ok(zero(0)),
            None => {}
        }
    }
    if mode == CountMode::Ind {
        for (t, sym) in target.signature().symbols().iter().enumerate() {
            if pattern.signature().index_of(&sym.name).is_none() {
                pairs.push((None, t));
            }
        }
    }
    let n = target.domain_size();
    let k = pattern.domain_size();
    if mode != CountMode::Hom && k > n {
        return Ok(zero(0));
    }
    let index = target.index();
    let mut search = Search {
        index: &index,
        pattern,
        pairs: &pairs,
        injective: mode != CountMode::Hom,
        induced: mode == CountMode::Ind,
        map: vec![usize::MAX; k],
        used: vec![false; n],
        nodes: 0,
        budget,
    };
    let mut value = BigUint::one();
    if mode == CountMode::Hom {
        for comp in pattern.components() {
            let c = search.run(&comp)?;
            if c == 0 {
                return Ok(zero(search.nodes));
            }
            value *= c;
        }
    } else {
        let all: Vec<usize> = (0..k).collect();
        value = BigUint::from(search.run(&all)?);
    }
    Ok(CountReport {
        value,
        mode,
        nodes_explored: search.nodes,
    })
}

struct Check {
    target_rel: usize,
    tuple: Vec<usize>,
    expected: bool,
}

struct Step {
    vertex: usize,
    checks: Vec<Check>,
    /// Binary relation and placed neighbour whose adjacency list bounds the
    /// candidates: `(target_rel, other, other_is_source)`.
    anchor: Option<(usize, usize, bool)>,
}

struct Search<'a, 'b> {
    index: &'b Indexed<'a>,
    pattern: &'b Structure,
    pairs: &'b [(Option<usize>, usize)],
    injective: bool,
    induced: bool,
    map: Vec<usize>,
    used: Vec<bool>,
    nodes: u64,
    budget: u64,
}

impl Search<'_, '_> {
    /// Counts maps of the vertices in `part` (a union of components).
    fn run(&mut self, part: &[usize]) -> Result<u64, CountError> {
        let steps = self.plan(part);
        self.go(&steps, 0)
    }

    fn plan(&self, part: &[usize]) -> Vec<Step> {
        let k = self.pattern.domain_size();
        let mut in_part = vec![false; k];
        for &v in part {
            in_part[v] = true;
        }
        // Pattern tuples per vertex, restricted to relations present in the target.
        let mut incident: Vec<Vec<(usize, &Vec<usize>)>> = vec![Vec::new(); k];
        for &(pr, tr) in self.pairs {
            let Some(pr) = pr else { continue };
            for t in self.pattern.relation(pr) {
                let mut seen = Vec::new();
                for &v in t {
                    if !seen.contains(&v) {
                        seen.push(v);
                        incident[v].push((tr, t));
                    }
                }
            }
        }
        let mut placed = vec![false; k];
        let mut order = Vec::with_capacity(part.len());
        while order.len() < part.len() {
            let next = part
                .iter()
                .copied()
                .filter(|&v| !placed[v])
                .max_by_key(|&v| {
                    let linked = incident[v]
                        .iter()
                        .filter(|(_, t)| t.iter().any(|&u| u != v && placed[u]))
                        .count();
                    (linked, incident[v].len(), std::cmp::Reverse(v))
                })
                .expect("unplaced vertex remains");
            placed[next] = true;
            order.push(next);
        }
        let mut placed = vec![false; k];
        let mut steps = Vec::with_capacity(order.len());
        for &v in &order {
            placed[v] = true;
            let mut checks = Vec::new();
            if self.induced {
                let prefix: Vec<usize> = order[..=order.iter().position(|&u| u == v).expect("in order")].to_vec();
                for &(pr, tr) in self.pairs {
                    let arity = self.index.structure().signature().symbols()[tr].arity;
                    for t in tuples_through(&prefix, v, arity) {
                        let expected = pr.is_some_and(|pr| self.pattern.holds(pr, &t));
                        checks.push(Check {
                            target_rel: tr,
                            tuple: t,
                            expected,
                        });
                    }
                }
            } else {
                for &(tr, t) in &incident[v] {
                    if t.iter().all(|&u| placed[u]) {
                        checks.push(Check {
                            target_rel: tr,
                            tuple: t.clone(),
                            expected: true,
                        });
                    }
                }
            }
            let anchor = checks.iter().find_map(|c| {
                if !c.expected || c.tuple.len() != 2 {
                    return None;
                }
                match (c.tuple[0], c.tuple[1]) {
                    (a, b) if a == v && b != v => Some((c.target_rel, b, false)),
                    (a, b) if b == v && a != v => Some((c.target_rel, a, true)),
                    _ => None,
                }
            });
            steps.push(Step {
                vertex: v,
                checks,
                anchor,
            });
        }
        steps
    }

    fn go(&mut self, steps: &[Step], d: usize) -> Result<u64, CountError> {
        if d == steps.len() {
            return Ok(1);
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(CountError::BudgetExceeded(self.budget));
        }
        let step = &steps[d];
        let index = self.index;
        let candidates: Box<dyn Iterator<Item = usize>> = match step.anchor {
            Some((rel, other, true)) => Box::new(index.out_neighbors(rel, self.map[other]).iter().copied()),
            Some((rel, other, false)) => Box::new(index.in_neighbors(rel, self.map[other]).iter().copied()),
            None => Box::new(0..index.domain_size()),
        };
        let mut total = 0u64;
        let mut buf = Vec::new();
        for w in candidates {
            if self.injective && self.used[w] {
                continue;
            }
            self.map[step.vertex] = w;
            let ok = step.checks.iter().all(|c| {
                buf.clear();
                buf.extend(c.tuple.iter().map(|&u| self.map[u]));
                index.holds(c.target_rel, &buf) == c.expected
            });
            if !ok {
                continue;
            }
            if d + 1 == steps.len() {
                total += 1;
                continue;
            }
            self.used[w] = true;
            let sub = self.go(steps, d + 1);
            self.used[w] = false;
            total += sub?;
        }
        self.map[step.vertex] = usize::MAX;
        Ok(total)
    }
}

/// All tuples of the given arity over `prefix` that contain `v`.
fn tuples_through(prefix: &[usize], v: usize, arity: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let m = prefix.len();
    let mut idx = vec![0usize; arity];
    loop {
        let t: Vec<usize> = idx.iter().map(|&i| prefix[i]).collect();
        if t.contains(&v) {
            out.push(t);
        }
        let mut pos = arity;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < m {
                break;
            }
            idx[pos] = 0;
        }
    }
}
