use serde::{Deserialize, Serialize};

use super::{Signature, Structure};

/// The single marked vertex `E`: domain `{0}`, `U = {(0)}`.
pub fn build_marked_vertex() -> Structure {
    let sig = Signature::new([("U", 1)]).expect("static signature");
    Structure::new(sig, 1, [vec![vec![0]]]).expect("static structure")
}

/// The marked transitive tournament `T_n` over `{U:1, S:2}`:
/// `S(i, j)` iff `i < j`, and `U` holds everywhere.
pub fn build_transitive_tournament(n: usize) -> Structure {
    let sig = Signature::new([("U", 1), ("S", 2)]).expect("static signature");
    let mut t = Structure::empty(sig, n);
    for i in 0..n {
        t.insert(0, vec![i]).expect("in range");
        for j in i + 1..n {
            t.insert(1, vec![i, j]).expect("in range");
        }
    }
    t
}

/// Parameters of a basic structure in `B_{k,l}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasicStructureSpec {
    /// Number of tournaments.
    pub k: usize,
    /// Number of marked vertices.
    pub l: usize,
    /// Tournament orders `N_1..N_k`.
    pub orders: Vec<usize>,
}

impl BasicStructureSpec {
    pub fn new(k: usize, l: usize, orders: Vec<usize>) -> Self {
        assert_eq!(orders.len(), k, "one order per tournament");
        BasicStructureSpec { k, l, orders }
    }

    /// `β_{k,l}`: `UE1..UEl`, `UT1..UTk`, `S1..Sk`, in that order.
    pub fn signature(k: usize, l: usize) -> Signature {
        let unary_e = (1..=l).map(|i| (format!("UE{i}"), 1));
        let unary_t = (1..=k).map(|i| (format!("UT{i}"), 1));
        let orders = (1..=k).map(|i| (format!("S{i}"), 2));
        Signature::new(unary_e.chain(unary_t).chain(orders)).expect("distinct names")
    }
}

/// `E ⊕ … ⊕ E ⊕ T_{N_1} ⊕ … ⊕ T_{N_k}` with the canonical `β_{k,l}` names.
/// The marked vertices occupy indices `0..l`.
pub fn build_basic(spec: &BasicStructureSpec) -> Structure {
    let (k, l) = (spec.k, spec.l);
    let sig = BasicStructureSpec::signature(k, l);
    let domain = l + spec.orders.iter().sum::<usize>();
    let mut s = Structure::empty(sig, domain);
    for i in 0..l {
        s.insert(i, vec![i]).expect("in range");
    }
    let mut offset = l;
    for (t, &order) in spec.orders.iter().enumerate() {
        for a in 0..order {
            s.insert(l + t, vec![offset + a]).expect("in range");
            for b in a + 1..order {
                s.insert(l + k + t, vec![offset + a, offset + b])
                    .expect("in range");
            }
        }
        offset += order;
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{strong_sum, weakly_isomorphic};

    #[test]
    fn marked_vertex() {
        let e = build_marked_vertex();
        assert_eq!(e.domain_size(), 1);
        assert_eq!(e.relation_by_name("U").unwrap().len(), 1);
    }

    #[test]
    fn tournaments() {
        let t0 = build_transitive_tournament(0);
        assert_eq!(t0.domain_size(), 0);
        assert_eq!(t0.tuple_count(), 0);
        let t3 = build_transitive_tournament(3);
        let u: Vec<_> = t3.relation_by_name("U").unwrap().iter().cloned().collect();
        assert_eq!(u, vec![vec![0], vec![1], vec![2]]);
        // pairs i<j among 4 vertices, counted by enumeration
        let expected = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|(i, j)| i < j).count();
        assert_eq!(build_transitive_tournament(4).relation_by_name("S").unwrap().len(), expected);
        assert_eq!(expected, 6);
    }

    #[test]
    fn basic_examples() {
        let b = build_basic(&BasicStructureSpec::new(1, 2, vec![3]));
        assert_eq!(b.domain_size(), 5);
        assert_eq!(b.relation_by_name("S1").unwrap().len(), 3);
        let names: Vec<_> = b.signature().symbols().iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["UE1", "UE2", "UT1", "S1"]);

        let e = build_basic(&BasicStructureSpec::new(0, 1, vec![]));
        assert!(weakly_isomorphic(&e, &build_marked_vertex()).unwrap());

        let b2 = build_basic(&BasicStructureSpec::new(2, 0, vec![1, 1]));
        assert_eq!(b2.relation_by_name("S1").unwrap().len(), 0);
        assert_eq!(b2.relation_by_name("S2").unwrap().len(), 0);
        assert_eq!(b2.relation_by_name("UT1").unwrap().len(), 1);
        assert_eq!(b2.relation_by_name("UT2").unwrap().len(), 1);
    }

    #[test]
    fn basic_matches_explicit_chain() {
        for (k, l, orders) in [(1, 2, vec![3]), (2, 1, vec![2, 1]), (2, 0, vec![0, 3])] {
            let b = build_basic(&BasicStructureSpec::new(k, l, orders.clone()));
            let mut chain = Structure::empty(Signature::default(), 0);
            for _ in 0..l {
                chain = strong_sum(&chain, &build_marked_vertex());
            }
            for &o in &orders {
                chain = strong_sum(&chain, &build_transitive_tournament(o));
            }
            assert!(weakly_isomorphic(&b, &chain).unwrap(), "k={k} l={l}");
        }
    }
}
