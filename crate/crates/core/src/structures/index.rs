use std::collections::HashSet;

use super::{Structure, Tuple};

const DENSE_LIMIT: usize = 1 << 22;

enum Membership {
    Dense(Vec<u64>),
    Sparse(HashSet<Tuple>),
}

struct RelIndex {
    arity: usize,
    membership: Membership,
    /// For binary relations: successors and predecessors of each vertex.
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

/// Read-only view of a structure with constant-time tuple membership and,
/// for binary relations, adjacency lists.
pub struct Indexed<'a> {
    structure: &'a Structure,
    rels: Vec<RelIndex>,
}

impl<'a> Indexed<'a> {
    pub fn new(structure: &'a Structure) -> Self {
        let n = structure.domain_size();
        let rels = structure
            .signature()
            .symbols()
            .iter()
            .zip(structure.relations())
            .map(|(sym, rel)| {
                let cells = n.checked_pow(sym.arity as u32);
                let membership = match cells {
                    Some(c) if c <= DENSE_LIMIT => {
                        let mut bits = vec![0u64; c.div_ceil(64).max(1)];
                        for t in rel {
                            let k = encode(t, n);
                            bits[k / 64] |= 1 << (k % 64);
                        }
                        Membership::Dense(bits)
                    }
                    _ => Membership::Sparse(rel.iter().cloned().collect()),
                };
                let (mut out_adj, mut in_adj) = (Vec::new(), Vec::new());
                if sym.arity == 2 {
                    out_adj = vec![Vec::new(); n];
                    in_adj = vec![Vec::new(); n];
                    for t in rel {
                        out_adj[t[0]].push(t[1]);
                        in_adj[t[1]].push(t[0]);
                    }
                }
                RelIndex {
                    arity: sym.arity,
                    membership,
                    out_adj,
                    in_adj,
                }
            })
            .collect();
        Indexed { structure, rels }
    }

    pub fn structure(&self) -> &'a Structure {
        self.structure
    }

    pub fn domain_size(&self) -> usize {
        self.structure.domain_size()
    }

    #[inline]
    pub fn holds(&self, rel: usize, tuple: &[usize]) -> bool {
        let r = &self.rels[rel];
        debug_assert_eq!(r.arity, tuple.len());
        match &r.membership {
            Membership::Dense(bits) => {
                let k = encode(tuple, self.structure.domain_size());
                bits[k / 64] >> (k % 64) & 1 == 1
            }
            Membership::Sparse(set) => set.contains(tuple),
        }
    }

    /// Successors of `v` under binary relation `rel`.
    pub fn out_neighbors(&self, rel: usize, v: usize) -> &[usize] {
        &self.rels[rel].out_adj[v]
    }

    /// Predecessors of `v` under binary relation `rel`.
    pub fn in_neighbors(&self, rel: usize, v: usize) -> &[usize] {
        &self.rels[rel].in_adj[v]
    }
}

#[inline]
fn encode(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &v| acc * n + v)
}
