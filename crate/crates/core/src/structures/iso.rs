use itertools::Itertools;

use super::{Structure, StructureError};

/// Default domain-size cap for [`weakly_isomorphic`].
pub const DEFAULT_ISO_CAP: usize = 10;

/// `a ≈ b`: same structure up to renaming relations and relabelling
/// vertices. Plain backtracking, limited to [`DEFAULT_ISO_CAP`] vertices.
pub fn weakly_isomorphic(a: &Structure, b: &Structure) -> Result<bool, StructureError> {
    weakly_isomorphic_with_cap(a, b, DEFAULT_ISO_CAP)
}

pub fn weakly_isomorphic_with_cap(
    a: &Structure,
    b: &Structure,
    cap: usize,
) -> Result<bool, StructureError> {
    for s in [a, b] {
        if s.domain_size() > cap {
            return Err(StructureError::CapExceeded {
                size: s.domain_size(),
                cap,
            });
        }
    }
    if a.domain_size() != b.domain_size() || a.signature().len() != b.signature().len() {
        return Ok(false);
    }
    // Symbols can only be paired with symbols of equal arity and tuple count.
    let key = |s: &Structure, i: usize| (s.signature().symbols()[i].arity, s.relation(i).len());
    let mut groups_a: Vec<Vec<usize>> = Vec::new();
    let mut groups_b: Vec<Vec<usize>> = Vec::new();
    let keys_a: Vec<_> = (0..a.signature().len()).map(|i| key(a, i)).sorted().dedup().collect();
    for k in &keys_a {
        let ga: Vec<usize> = (0..a.signature().len()).filter(|&i| key(a, i) == *k).collect();
        let gb: Vec<usize> = (0..b.signature().len()).filter(|&i| key(b, i) == *k).collect();
        if ga.len() != gb.len() {
            return Ok(false);
        }
        groups_a.push(ga);
        groups_b.push(gb);
    }
    let mut symbol_map = vec![0usize; a.signature().len()];
    Ok(try_symbol_maps(a, b, &groups_a, &groups_b, 0, &mut symbol_map))
}

fn try_symbol_maps(
    a: &Structure,
    b: &Structure,
    groups_a: &[Vec<usize>],
    groups_b: &[Vec<usize>],
    g: usize,
    symbol_map: &mut Vec<usize>,
) -> bool {
    if g == groups_a.len() {
        return VertexSearch::new(a, b, symbol_map).run();
    }
    let k = groups_b[g].len();
    for perm in groups_b[g].iter().copied().permutations(k) {
        for (&ia, ib) in groups_a[g].iter().zip(perm) {
            symbol_map[ia] = ib;
        }
        if try_symbol_maps(a, b, groups_a, groups_b, g + 1, symbol_map) {
            return true;
        }
    }
    false
}

struct VertexSearch<'a> {
    b: &'a Structure,
    symbol_map: &'a [usize],
    /// Per vertex: (relation index, tuple) pairs containing it.
    incident_a: Vec<Vec<(usize, Vec<usize>)>>,
    incident_b: Vec<Vec<(usize, Vec<usize>)>>,
    profile_a: Vec<Vec<usize>>,
    profile_b: Vec<Vec<usize>>,
    order: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
}

const UNSET: usize = usize::MAX;

impl<'a> VertexSearch<'a> {
    fn new(a: &'a Structure, b: &'a Structure, symbol_map: &'a [usize]) -> Self {
        let n = a.domain_size();
        let incident = |s: &Structure| {
            let mut inc = vec![Vec::new(); n];
            for (r, rel) in s.relations().iter().enumerate() {
                for t in rel {
                    for v in t.iter().copied().unique() {
                        inc[v].push((r, t.clone()));
                    }
                }
            }
            inc
        };
        // Degree profile: occurrences per (relation, position), with b's
        // relations read through the symbol map.
        let profile = |s: &Structure, rel_order: &[usize]| {
            let width: usize = rel_order.iter().map(|&r| s.signature().symbols()[r].arity).sum();
            let mut p = vec![vec![0usize; width]; n];
            let mut offset = 0;
            for &r in rel_order {
                for t in s.relation(r) {
                    for (pos, &v) in t.iter().enumerate() {
                        p[v][offset + pos] += 1;
                    }
                }
                offset += s.signature().symbols()[r].arity;
            }
            p
        };
        let ident: Vec<usize> = (0..a.signature().len()).collect();
        let profile_a = profile(a, &ident);
        let profile_b = profile(b, symbol_map);
        let incident_a = incident(a);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(incident_a[v].len()));
        VertexSearch {
            b,
            symbol_map,
            incident_a,
            incident_b: incident(b),
            profile_a,
            profile_b,
            order,
            map: vec![UNSET; n],
            used: vec![false; n],
        }
    }

    fn run(&mut self) -> bool {
        let mut pa: Vec<_> = self.profile_a.clone();
        let mut pb: Vec<_> = self.profile_b.clone();
        pa.sort();
        pb.sort();
        pa == pb && self.extend(0)
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let v = self.order[depth];
        for w in 0..self.b.domain_size() {
            if self.used[w] || self.profile_a[v] != self.profile_b[w] {
                continue;
            }
            self.map[v] = w;
            self.used[w] = true;
            if self.consistent(v, w) && self.extend(depth + 1) {
                return true;
            }
            self.map[v] = UNSET;
            self.used[w] = false;
        }
        false
    }

    /// Tuples completed by placing `v ↦ w` must correspond one-to-one.
    fn consistent(&self, v: usize, w: usize) -> bool {
        let mut completed_a = 0usize;
        for (r, t) in &self.incident_a[v] {
            if t.iter().all(|&x| self.map[x] != UNSET) {
                let image: Vec<usize> = t.iter().map(|&x| self.map[x]).collect();
                if !self.b.holds(self.symbol_map[*r], &image) {
                    return false;
                }
                completed_a += 1;
            }
        }
        let completed_b = self.incident_b[w]
            .iter()
            .filter(|(_, t)| t.iter().all(|&y| self.used[y]))
            .count();
        completed_a == completed_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{build_transitive_tournament, graphs, strong_sum, Signature};

    #[test]
    fn renamed_tournament() {
        let t2 = build_transitive_tournament(2);
        let renamed = t2.with_symbol_names(&["U".into(), "R".into()]).unwrap();
        assert!(weakly_isomorphic(&t2, &renamed).unwrap());
    }

    #[test]
    fn reversed_tournament() {
        let t3 = build_transitive_tournament(3);
        let rev = t3.relabel(&[2, 1, 0]);
        assert_ne!(rev, t3);
        assert!(weakly_isomorphic(&t3, &rev).unwrap());
    }

    #[test]
    fn edge_vs_isolated() {
        let edge = graphs::complete(2);
        let iso = graphs::empty(2);
        assert!(!weakly_isomorphic(&edge, &iso).unwrap());
    }

    #[test]
    fn strong_sum_commutes_weakly() {
        let a = build_transitive_tournament(2);
        let b = graphs::path(3);
        assert!(weakly_isomorphic(&strong_sum(&a, &b), &strong_sum(&b, &a)).unwrap());
    }

    #[test]
    fn symbol_swap_needed() {
        let sig = Signature::new([("A", 2), ("B", 2)]).unwrap();
        let x = Structure::new(sig.clone(), 3, [vec![vec![0, 1]], vec![vec![1, 2]]]).unwrap();
        let y = Structure::new(sig, 3, [vec![vec![2, 0]], vec![vec![1, 2]]]).unwrap();
        assert!(weakly_isomorphic(&x, &y).unwrap());
    }

    #[test]
    fn cap_enforced() {
        let g = graphs::empty(11);
        assert_eq!(
            weakly_isomorphic(&g, &g),
            Err(StructureError::CapExceeded { size: 11, cap: 10 })
        );
        assert!(weakly_isomorphic_with_cap(&g, &g, 11).unwrap());
    }

    #[test]
    fn cycles_vs_triangles() {
        let c6 = graphs::cycle(6);
        let two_triangles = crate::structures::disjoint_union(&graphs::cycle(3), &graphs::cycle(3)).unwrap();
        assert!(!weakly_isomorphic(&c6, &two_triangles).unwrap());
        assert!(weakly_isomorphic(&c6, &c6.relabel(&[3, 5, 1, 0, 2, 4])).unwrap());
    }
}
