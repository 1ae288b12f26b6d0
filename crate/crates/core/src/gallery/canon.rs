//! Canonical keys for small structures by individualisation and refinement.

use std::cmp::Ordering;
use std::fmt;

use crate::structures::{Structure, StructureError};

/// Default domain-size cap for [`canonical_form`].
pub const DEFAULT_CANON_CAP: usize = 12;

/// Equal keys iff the structures are isomorphic with symbols matched by name
/// and position.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

pub fn canonical_form(s: &Structure) -> Result<CanonicalKey, StructureError> {
    canonical_form_with_cap(s, DEFAULT_CANON_CAP)
}

pub fn canonical_form_with_cap(s: &Structure, cap: usize) -> Result<CanonicalKey, StructureError> {
    if s.domain_size() > cap {
        return Err(StructureError::CapExceeded {
            size: s.domain_size(),
            cap,
        });
    }
    let (_, code) = canonical_labeling(s);
    let mut bytes = Vec::new();
    let push = |bytes: &mut Vec<u8>, x: usize| bytes.extend_from_slice(&(x as u32).to_le_bytes());
    push(&mut bytes, s.signature().len());
    for sym in s.signature().symbols() {
        push(&mut bytes, sym.name.len());
        bytes.extend_from_slice(sym.name.as_bytes());
        push(&mut bytes, sym.arity);
    }
    push(&mut bytes, s.domain_size());
    for x in code {
        push(&mut bytes, x as usize);
    }
    Ok(CanonicalKey(bytes))
}

/// The relabelled copy that realises the canonical key.
pub fn canonical_relabel(s: &Structure) -> Structure {
    let (lab, _) = canonical_labeling(s);
    s.relabel(&lab)
}

/// Returns the canonical labelling (vertex ↦ position) and its encoding.
fn canonical_labeling(s: &Structure) -> (Vec<usize>, Vec<u32>) {
    let n = s.domain_size();
    let mut search = Canon {
        s,
        tuples: s
            .relations()
            .iter()
            .map(|rel| rel.iter().map(|t| t.iter().map(|&v| v as u32).collect()).collect())
            .collect(),
        first: None,
        best: None,
        automorphisms: Vec::new(),
    };
    let colours = search.refine(vec![0; n]);
    search.descend(colours, &mut Vec::new());
    let best = search.best.expect("search reaches a leaf");
    (best.labeling, best.code)
}

#[derive(Clone)]
struct Leaf {
    labeling: Vec<usize>,
    code: Vec<u32>,
    path: Vec<usize>,
}

struct Canon<'a> {
    s: &'a Structure,
    tuples: Vec<Vec<Vec<u32>>>,
    first: Option<Leaf>,
    best: Option<Leaf>,
    automorphisms: Vec<Vec<usize>>,
}

impl Canon<'_> {
    /// Colour of each vertex is the start index of its cell in the ordered
    /// partition. Refines until stable, splitting cells in a label-invariant way.
    fn refine(&self, mut colour: Vec<usize>) -> Vec<usize> {
        let n = colour.len();
        loop {
            let mut sig: Vec<Vec<u32>> = vec![Vec::new(); n];
            let mut entries: Vec<Vec<Vec<u32>>> = vec![Vec::new(); n];
            for (r, rel) in self.tuples.iter().enumerate() {
                for t in rel {
                    let coloured: Vec<u32> = t.iter().map(|&v| colour[v as usize] as u32).collect();
                    for (pos, &v) in t.iter().enumerate() {
                        let mut e = Vec::with_capacity(coloured.len() + 2);
                        e.push(r as u32);
                        e.push(pos as u32);
                        e.extend_from_slice(&coloured);
                        entries[v as usize].push(e);
                    }
                }
            }
            for v in 0..n {
                entries[v].sort_unstable();
                let s = &mut sig[v];
                s.push(colour[v] as u32);
                for e in &entries[v] {
                    s.push(u32::MAX);
                    s.extend_from_slice(e);
                }
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| sig[a].cmp(&sig[b]));
            let mut next = vec![0; n];
            for i in 0..n {
                next[order[i]] = if i > 0 && sig[order[i]] == sig[order[i - 1]] {
                    next[order[i - 1]]
                } else {
                    i
                };
            }
            let cells = |c: &[usize]| {
                let mut v = c.to_vec();
                v.sort_unstable();
                v.dedup();
                v.len()
            };
            if cells(&next) == cells(&colour) {
                return next;
            }
            colour = next;
        }
    }

    /// First smallest non-singleton cell, as its member list.
    fn target_cell(colour: &[usize]) -> Option<Vec<usize>> {
        let n = colour.len();
        let mut size = vec![0usize; n];
        for &c in colour {
            size[c] += 1;
        }
        let c = (0..n).filter(|&c| size[c] > 1).min_by_key(|&c| (size[c], c))?;
        Some((0..n).filter(|&v| colour[v] == c).collect())
    }

    fn encode(&self, labeling: &[usize]) -> Vec<u32> {
        let mut code = Vec::new();
        for rel in &self.tuples {
            let mut mapped: Vec<Vec<u32>> = rel
                .iter()
                .map(|t| t.iter().map(|&v| labeling[v as usize] as u32).collect())
                .collect();
            mapped.sort_unstable();
            code.push(mapped.len() as u32);
            for t in mapped {
                code.extend(t);
            }
        }
        code
    }

    /// Explores the subtree below the ordered partition `colour`. Returns
    /// `Some(level)` to abandon everything below `level` after an
    /// automorphism was found.
    fn descend(&mut self, colour: Vec<usize>, path: &mut Vec<usize>) -> Option<usize> {
        let Some(cell) = Self::target_cell(&colour) else {
            return self.leaf(colour, path);
        };
        let level = path.len();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.in_explored_orbit(path, &explored, v) {
                continue;
            }
            explored.push(v);
            let mut child = colour.clone();
            let c = colour[v];
            for &u in &cell {
                if u != v {
                    child[u] = c + 1;
                }
            }
            let child = self.refine(child);
            path.push(v);
            let jump = self.descend(child, path);
            path.pop();
            if let Some(target) = jump {
                if target < level {
                    return Some(target);
                }
            }
        }
        None
    }

    fn in_explored_orbit(&self, path: &[usize], explored: &[usize], v: usize) -> bool {
        let n = self.s.domain_size();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for gamma in &self.automorphisms {
            if path.iter().all(|&u| gamma[u] == u) {
                for x in 0..n {
                    let (a, b) = (find(&mut parent, x), find(&mut parent, gamma[x]));
                    if a != b {
                        parent[a] = b;
                    }
                }
            }
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == rv)
    }

    fn leaf(&mut self, colour: Vec<usize>, path: &[usize]) -> Option<usize> {
        let code = self.encode(&colour);
        let leaf = Leaf {
            labeling: colour,
            code,
            path: path.to_vec(),
        };
        let Some(first) = &self.first else {
            self.first = Some(leaf.clone());
            self.best = Some(leaf);
            return None;
        };
        if leaf.code == first.code {
            let jump = common_prefix(&leaf.path, &first.path);
            self.record_automorphism(&first.labeling.clone(), &leaf.labeling);
            return Some(jump);
        }
        let best = self.best.as_ref().expect("best set with first");
        match leaf.code.cmp(&best.code) {
            Ordering::Less => {
                self.best = Some(leaf);
                None
            }
            Ordering::Equal => {
                let jump = common_prefix(&leaf.path, &best.path);
                self.record_automorphism(&best.labeling.clone(), &leaf.labeling);
                Some(jump)
            }
            Ordering::Greater => None,
        }
    }

    /// Both labelings give the same code, so `reference⁻¹ ∘ other` is an
    /// automorphism.
    fn record_automorphism(&mut self, reference: &[usize], other: &[usize]) {
        let n = reference.len();
        let mut inverse = vec![0; n];
        for (v, &p) in reference.iter().enumerate() {
            inverse[p] = v;
        }
        let gamma: Vec<usize> = (0..n).map(|v| inverse[other[v]]).collect();
        if gamma.iter().enumerate().any(|(i, &g)| i != g) {
            self.automorphisms.push(gamma);
        }
    }
}

fn common_prefix(a: &[usize], b: &[usize]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{build_transitive_tournament, graphs, weakly_isomorphic, Signature};
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn key(s: &Structure) -> CanonicalKey {
        canonical_form_with_cap(s, 64).unwrap()
    }

    #[test]
    fn distinguishes_small_graphs() {
        assert_ne!(key(&graphs::complete(3)), key(&graphs::path(3)));
        assert_ne!(key(&graphs::cycle(6)), key(&crate::structures::disjoint_union(&graphs::cycle(3), &graphs::cycle(3)).unwrap()));
        assert_eq!(key(&graphs::cycle(6)), key(&graphs::cycle(6).relabel(&[2, 4, 0, 1, 5, 3])));
    }

    #[test]
    fn random_relabelings() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(0..=9);
            let mut g = Structure::empty(Signature::graph(), n);
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen_bool(0.4) {
                        g.insert(0, vec![i, j]).unwrap();
                        g.insert(0, vec![j, i]).unwrap();
                    }
                }
            }
            let mut perm: Vec<usize> = (0..n).collect();
            perm.shuffle(&mut rng);
            let h = g.relabel(&perm);
            assert_eq!(key(&g), key(&h));
            assert_eq!(canonical_relabel(&g), canonical_relabel(&h));
        }
    }

    #[test]
    fn agrees_with_backtracking_isomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sig = Signature::new([("A", 2), ("B", 1), ("C", 3)]).unwrap();
        let random = |rng: &mut ChaCha8Rng| {
            let n = rng.gen_range(1..=5);
            let mut s = Structure::empty(sig.clone(), n);
            for _ in 0..rng.gen_range(0..5) {
                s.insert(0, vec![rng.gen_range(0..n), rng.gen_range(0..n)]).unwrap();
            }
            for _ in 0..rng.gen_range(0..2) {
                s.insert(1, vec![rng.gen_range(0..n)]).unwrap();
            }
            for _ in 0..rng.gen_range(0..2) {
                s.insert(2, vec![rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(0..n)])
                    .unwrap();
            }
            s
        };
        for _ in 0..300 {
            let a = random(&mut rng);
            let b = random(&mut rng);
            // Same key implies isomorphic; the converse is checked via relabelling.
            if key(&a) == key(&b) {
                assert!(weakly_isomorphic(&a, &b).unwrap());
            }
            let mut perm: Vec<usize> = (0..a.domain_size()).collect();
            perm.shuffle(&mut rng);
            assert_eq!(key(&a), key(&a.relabel(&perm)));
        }
    }

    #[test]
    fn symmetric_structures_are_fast() {
        for g in [graphs::empty(40), graphs::complete(30), graphs::complete_bipartite(12, 12), graphs::cycle(40)] {
            let mut perm: Vec<usize> = (0..g.domain_size()).rev().collect();
            perm.rotate_left(3);
            assert_eq!(key(&g), key(&g.relabel(&perm)));
        }
    }

    #[test]
    fn cap_and_signature() {
        assert!(canonical_form(&graphs::empty(13)).is_err());
        let t = build_transitive_tournament(2);
        let renamed = t.with_symbol_names(&["U".into(), "R".into()]).unwrap();
        assert_ne!(key(&t), key(&renamed));
    }
}
