//! Expansion of a quantifier-free count `|φ(A)|` into `Σ c_i·hom(F_i, A)`.
//!
//! For each partition of the free variables the formula becomes a boolean
//! function of the atoms it mentions over the blocks. Each satisfying truth
//! assignment counts injective maps realising it exactly, which inclusion and
//! exclusion turns into injective counts of patterns, and Möbius inversion
//! over the partition lattice turns into homomorphism counts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::counting::{hom_count, mobius, partitions, quotient, CountError};
use crate::gallery::canon::{canonical_form_with_cap, CanonicalKey};
use crate::structures::Structure;

use super::ast::{Formula, Node};
use super::LogicError;

/// Largest number of distinct atoms handled per variable partition.
pub const MAX_BASIS_ATOMS: usize = 16;

/// `Σ c_i · hom(F_i, ·)` with pairwise non-isomorphic patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomBasis {
    terms: Vec<(BigInt, Structure)>,
}

impl HomBasis {
    pub fn terms(&self) -> &[(BigInt, Structure)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn evaluate(&self, a: &Structure) -> Result<BigInt, CountError> {
        let mut total = BigInt::zero();
        for (c, f) in &self.terms {
            total += c * BigInt::from(hom_count(f, a)?.value);
        }
        Ok(total)
    }
}

impl fmt::Display for HomBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{c} * hom({})", p.to_json())?;
        }
        Ok(())
    }
}

/// Truth of a quantifier-free node once variables are merged into blocks
/// and each mentioned atom has a fixed value.
fn eval_blocks(
    node: &Node,
    block: &[usize],
    atoms: &HashMap<(String, Vec<usize>), usize>,
    sigma: u32,
) -> bool {
    let rec = |n: &Node| eval_blocks(n, block, atoms, sigma);
    match node {
        Node::True => true,
        Node::False => false,
        Node::Eq(a, b) => block[*a] == block[*b],
        Node::Atom(s, args) => {
            let key = (s.clone(), args.iter().map(|&v| block[v]).collect());
            sigma >> atoms[&key] & 1 == 1
        }
        Node::Not(a) => !rec(a),
        Node::And(v) => v.iter().all(rec),
        Node::Or(v) => v.iter().any(rec),
        Node::Implies(a, b) => !rec(a) || rec(b),
        Node::Iff(a, b) => rec(a) == rec(b),
        Node::Exists(..) | Node::Forall(..) => unreachable!("checked quantifier-free"),
    }
}

fn collect_atoms(node: &Node, block: &[usize], out: &mut Vec<(String, Vec<usize>)>) {
    match node {
        Node::Atom(s, args) => {
            let key = (s.clone(), args.iter().map(|&v| block[v]).collect::<Vec<_>>());
            if !out.contains(&key) {
                out.push(key);
            }
        }
        Node::Not(a) | Node::Exists(_, a) | Node::Forall(_, a) => collect_atoms(a, block, out),
        Node::And(v) | Node::Or(v) => v.iter().for_each(|n| collect_atoms(n, block, out)),
        Node::Implies(a, b) | Node::Iff(a, b) => {
            collect_atoms(a, block, out);
            collect_atoms(b, block, out);
        }
        Node::True | Node::False | Node::Eq(..) => {}
    }
}

pub fn qf_to_hom_basis(phi: &Formula) -> Result<HomBasis, LogicError> {
    if !phi.is_quantifier_free() {
        return Err(LogicError::NotQuantifierFree);
    }
    let p = phi.arity();
    if p == 0 {
        return Err(LogicError::NoFreeVariables);
    }
    let sig = phi.signature();
    // Coefficients of inj(F, ·), keyed by the exact pattern.
    let mut inj_terms: BTreeMap<(usize, Vec<(usize, Vec<usize>)>), i64> = BTreeMap::new();
    for part in partitions(p) {
        let m = part.block_count();
        let by_free = part.block_of();
        let mut block = vec![usize::MAX; phi.var_count()];
        for (i, &v) in phi.free_vars().iter().enumerate() {
            block[v] = by_free[i];
        }
        let mut atoms = Vec::new();
        collect_atoms(phi.node(), &block, &mut atoms);
        if atoms.len() > MAX_BASIS_ATOMS {
            return Err(LogicError::DnfBudget(1 << MAX_BASIS_ATOMS));
        }
        let lookup: HashMap<(String, Vec<usize>), usize> =
            atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let full: u32 = if atoms.is_empty() { 0 } else { u32::MAX >> (32 - atoms.len()) };
        // c_X = Σ over satisfying σ with σ⁺ ⊆ X of (−1)^{|X∖σ⁺|}.
        let mut coeff: HashMap<u32, i64> = HashMap::new();
        for sigma in 0..=full {
            if !eval_blocks(phi.node(), &block, &lookup, sigma) {
                continue;
            }
            let rest = full & !sigma;
            // Enumerate subsets S of the false atoms.
            let mut s = rest;
            loop {
                let sign = if s.count_ones() % 2 == 0 { 1 } else { -1 };
                *coeff.entry(sigma | s).or_default() += sign;
                if s == 0 {
                    break;
                }
                s = (s - 1) & rest;
            }
        }
        for (x, c) in coeff {
            if c == 0 {
                continue;
            }
            let mut tuples: Vec<(usize, Vec<usize>)> = (0..atoms.len())
                .filter(|i| x >> i & 1 == 1)
                .map(|i| {
                    let (name, args) = &atoms[i];
                    (sig.index_of(name).expect("atoms checked against signature"), args.clone())
                })
                .collect();
            tuples.sort();
            *inj_terms.entry((m, tuples)).or_default() += c;
        }
    }
    // inj(F, ·) = Σ_Θ μ(Θ) hom(F/Θ, ·), merged up to isomorphism.
    let mut merged: BTreeMap<(usize, CanonicalKey), (BigInt, Structure)> = BTreeMap::new();
    for ((m, tuples), c) in inj_terms {
        if c == 0 {
            continue;
        }
        let mut f = Structure::empty(sig.clone(), m);
        for (r, t) in tuples {
            f.insert(r, t).expect("block indices are in range");
        }
        for theta in partitions(m) {
            let q = quotient(&f, &theta).expect("partition matches the pattern");
            let key = canonical_form_with_cap(&q, usize::MAX).expect("no cap");
            let entry = merged
                .entry((q.domain_size(), key))
                .or_insert_with(|| (BigInt::zero(), q));
            entry.0 += mobius(&theta) * c;
        }
    }
    let terms = merged
        .into_values()
        .filter(|(c, _)| !c.is_zero())
        .collect();
    Ok(HomBasis { terms })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{count_satisfying, parse_formula, to_dnf};
    use crate::structures::{graphs, Signature};

    #[test]
    fn equality_is_one_vertex() {
        let f = parse_formula("x1 = x2", &Signature::graph(), None).unwrap();
        let b = qf_to_hom_basis(&f).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.terms()[0].0, BigInt::from(1));
        assert_eq!(b.terms()[0].1, Structure::empty(Signature::graph(), 1));
        assert_eq!(b.evaluate(&graphs::cycle(7)).unwrap(), BigInt::from(7));
    }

    #[test]
    fn edge_atom_on_loopless_graphs() {
        let f = parse_formula("E(x1,x2)", &Signature::graph(), None).unwrap();
        let b = qf_to_hom_basis(&f).unwrap();
        // inj(edge) + inj(loop) collapses to hom of the directed edge.
        assert_eq!(b.len(), 1);
        assert_eq!(b.terms()[0].1.relation(0).len(), 1);
        assert_eq!(b.terms()[0].1.domain_size(), 2);
        for g in [graphs::cycle(5), graphs::complete(4), graphs::path(3), graphs::empty(2)] {
            let value = b.evaluate(&g).unwrap();
            assert_eq!(value, BigInt::from(count_satisfying(&f, &g).unwrap()));
            assert_eq!(value, BigInt::from(graphs::edge_count(&g) * 2));
        }
    }

    #[test]
    fn matches_direct_counts() {
        let sig = Signature::graph();
        for text in [
            "E(x,y) & !E(y,x)",
            "!(x = y) & !E(x,y)",
            "E(x,y) & E(y,z) & !(x = z)",
            "E(x,y) -> E(y,z) | x = z",
            "E(x,x) <-> E(y,y)",
            "false",
            "true",
        ] {
            let f = parse_formula(text, &sig, Some(&["x", "y", "z"])).unwrap();
            let b = qf_to_hom_basis(&f).unwrap();
            let mut g = graphs::cycle(5);
            g.insert(0, vec![0, 0]).unwrap();
            g.insert(0, vec![0, 2]).unwrap();
            for a in [g, graphs::complete(3), graphs::path(4), graphs::empty(0)] {
                assert_eq!(
                    b.evaluate(&a).unwrap(),
                    BigInt::from(count_satisfying(&f, &a).unwrap()),
                    "{text}"
                );
            }
        }
    }

    #[test]
    fn syntax_independent() {
        let sig = Signature::graph();
        let f = parse_formula("!(E(x,y) & (x = y | E(y,x)))", &sig, None).unwrap();
        assert_eq!(qf_to_hom_basis(&f).unwrap(), qf_to_hom_basis(&to_dnf(&f).unwrap()).unwrap());
    }

    #[test]
    fn rejects_bad_input() {
        let sig = Signature::graph();
        let q = parse_formula("exists z (E(x,z))", &sig, None).unwrap();
        assert_eq!(qf_to_hom_basis(&q), Err(LogicError::NotQuantifierFree));
        let s = parse_formula("true", &sig, None).unwrap();
        assert_eq!(qf_to_hom_basis(&s), Err(LogicError::NoFreeVariables));
    }
}
