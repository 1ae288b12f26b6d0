use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::logic::{Evaluator, Formula};
use crate::sequences::IntPolynomial;
use crate::structures::Structure;

use super::{check_source, relation_on, satisfying, InterpError, InterpretationScheme};

/// Declares that classes of tuples satisfying `eta` have `size(n)` members.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub name: String,
    pub eta: Formula,
    pub size: IntPolynomial,
}

/// A scheme whose domain is further divided by an equivalence `ϖ` on
/// `p`-tuples; target relations are read on class representatives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientScheme {
    base: InterpretationScheme,
    varpi: Formula,
    certificates: Vec<Certificate>,
}

/// Number of random representative swaps tried per relation.
const COMPATIBILITY_SAMPLES: usize = 64;

impl QuotientScheme {
    pub fn new(
        base: InterpretationScheme,
        varpi: Formula,
        certificates: Vec<Certificate>,
    ) -> Result<Self, InterpError> {
        let p = base.exponent();
        if varpi.arity() != 2 * p {
            return Err(InterpError::FreeVariableCount {
                which: "equiv".into(),
                expected: 2 * p,
                got: varpi.arity(),
            });
        }
        let varpi = varpi.with_signature(base.source().clone())?;
        let mut certs = Vec::with_capacity(certificates.len());
        for c in certificates {
            if c.eta.arity() != p {
                return Err(InterpError::FreeVariableCount {
                    which: format!("class {}", c.name),
                    expected: p,
                    got: c.eta.arity(),
                });
            }
            certs.push(Certificate {
                eta: c.eta.with_signature(base.source().clone())?,
                ..c
            });
        }
        Ok(QuotientScheme {
            base,
            varpi,
            certificates: certs,
        })
    }

    pub fn base(&self) -> &InterpretationScheme {
        &self.base
    }

    pub fn varpi(&self) -> &Formula {
        &self.varpi
    }

    pub fn certificates(&self) -> &[Certificate] {
        &self.certificates
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.base.is_quantifier_free()
            && self.varpi.is_quantifier_free()
            && self.certificates.iter().all(|c| c.eta.is_quantifier_free())
    }

    /// Largest certificate degree (0 without certificates).
    pub fn certificate_degree(&self) -> usize {
        self.certificates.iter().map(|c| c.size.degree_or_zero()).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientOutput {
    pub structure: Structure,
    /// Lexicographically least tuple of each class.
    pub representatives: Vec<Vec<usize>>,
    pub class_sizes: Vec<usize>,
    /// Index of the first certificate whose `eta` holds on the representative.
    pub certificate_of: Vec<Option<usize>>,
}

/// Applies `q`; with `index = Some(n)` every class size is checked against
/// its certificate evaluated at `n`.
pub fn apply_quotient(
    q: &QuotientScheme,
    a: &Structure,
    index: Option<u64>,
    seed: u64,
) -> Result<QuotientOutput, InterpError> {
    let base = &q.base;
    check_source(base.source(), a)?;
    let tuples = satisfying(base.domain_formula(), a)?;
    let m = tuples.len();
    let mut same = vec![false; m * m];
    for t in relation_on(&q.varpi, a, &tuples, 2)? {
        same[t[0] * m + t[1]] = true;
    }
    let rel = |i: usize, j: usize| same[i * m + j];
    for i in 0..m {
        if !rel(i, i) {
            return Err(InterpError::NotEquivalence {
                property: "reflexive".into(),
                witness: vec![tuples[i].clone()],
            });
        }
    }
    for i in 0..m {
        for j in 0..m {
            if rel(i, j) && !rel(j, i) {
                return Err(InterpError::NotEquivalence {
                    property: "symmetric".into(),
                    witness: vec![tuples[i].clone(), tuples[j].clone()],
                });
            }
        }
    }
    for i in 0..m {
        for j in (0..m).filter(|&j| rel(i, j)) {
            if let Some(k) = (0..m).find(|&k| rel(j, k) && !rel(i, k)) {
                return Err(InterpError::NotEquivalence {
                    property: "transitive".into(),
                    witness: vec![tuples[i].clone(), tuples[j].clone(), tuples[k].clone()],
                });
            }
        }
    }
    // Classes in order of their least member.
    let mut class_of = vec![usize::MAX; m];
    let mut members: Vec<Vec<usize>> = Vec::new();
    for i in 0..m {
        if class_of[i] == usize::MAX {
            let c = members.len();
            let ms: Vec<usize> = (i..m).filter(|&j| rel(i, j)).collect();
            for &j in &ms {
                class_of[j] = c;
            }
            members.push(ms);
        }
    }
    let representatives: Vec<Vec<usize>> = members.iter().map(|ms| tuples[ms[0]].clone()).collect();
    let mut out = Structure::empty(base.target().clone(), members.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (r, (sym, rho)) in base.target().symbols().iter().zip(base.relation_formulas()).enumerate() {
        for t in relation_on(rho, a, &representatives, sym.arity)? {
            out.insert(r, t)?;
        }
        if members.is_empty() {
            continue;
        }
        let ev = Evaluator::new(rho, a)?;
        for _ in 0..COMPATIBILITY_SAMPLES {
            let classes: Vec<usize> = (0..sym.arity).map(|_| rng.gen_range(0..members.len())).collect();
            let others: Vec<Vec<usize>> = classes
                .iter()
                .map(|&c| tuples[members[c][rng.gen_range(0..members[c].len())]].clone())
                .collect();
            if out.holds(r, &classes) != ev.holds(&others.concat()) {
                return Err(InterpError::Compatibility {
                    relation: sym.name.clone(),
                    representatives: classes.iter().map(|&c| representatives[c].clone()).collect(),
                    others,
                });
            }
        }
    }
    let class_sizes: Vec<usize> = members.iter().map(Vec::len).collect();
    let mut certificate_of = vec![None; members.len()];
    if !q.certificates.is_empty() {
        let evs = q
            .certificates
            .iter()
            .map(|c| Evaluator::new(&c.eta, a))
            .collect::<Result<Vec<_>, _>>()?;
        for t in &tuples {
            if !evs.iter().any(|e| e.holds(t)) {
                return Err(InterpError::UncoveredClass(t.clone()));
            }
        }
        for (c, rep) in representatives.iter().enumerate() {
            let k = evs.iter().position(|e| e.holds(rep)).expect("coverage checked");
            certificate_of[c] = Some(k);
            if let Some(n) = index {
                let expected = q.certificates[k].size.eval_u64(n);
                if expected != class_sizes[c].into() {
                    return Err(InterpError::CertificateMismatch {
                        representative: rep.clone(),
                        certificate: q.certificates[k].name.clone(),
                        expected: expected.to_string(),
                        observed: class_sizes[c],
                    });
                }
            }
        }
    }
    Ok(QuotientOutput {
        structure: out,
        representatives,
        class_sizes,
        certificate_of,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::{apply_interpretation, formula};
    use crate::structures::{graphs, weakly_isomorphic, Signature};

    fn line_graph() -> QuotientScheme {
        let sig = Signature::graph();
        let base = InterpretationScheme::new(
            "line",
            2,
            sig.clone(),
            Signature::graph(),
            formula("E(x1,x2)", &sig, &["x1", "x2"]).unwrap(),
            vec![formula(
                "!((x1 = y1 & x2 = y2) | (x1 = y2 & x2 = y1)) & (x1 = y1 | x1 = y2 | x2 = y1 | x2 = y2)",
                &sig,
                &["x1", "x2", "y1", "y2"],
            )
            .unwrap()],
        )
        .unwrap();
        let varpi = formula("(x1 = y1 & x2 = y2) | (x1 = y2 & x2 = y1)", &sig, &["x1", "x2", "y1", "y2"]).unwrap();
        let cert = Certificate {
            name: "edge".into(),
            eta: formula("true", &sig, &["x1", "x2"]).unwrap(),
            size: IntPolynomial::constant(2),
        };
        QuotientScheme::new(base, varpi, vec![cert]).unwrap()
    }

    #[test]
    fn line_graph_of_triangle() {
        let out = apply_quotient(&line_graph(), &graphs::complete(3), Some(3), 0).unwrap();
        assert_eq!(out.class_sizes, vec![2, 2, 2]);
        assert!(weakly_isomorphic(&out.structure, &graphs::complete(3)).unwrap());
        assert_eq!(out.representatives, vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn identity_equivalence_is_plain_application() {
        let q = line_graph();
        let sig = Signature::graph();
        let eq = formula("x1 = y1 & x2 = y2", &sig, &["x1", "x2", "y1", "y2"]).unwrap();
        let plain = QuotientScheme::new(q.base().clone(), eq, Vec::new()).unwrap();
        let g = graphs::path(4);
        let out = apply_quotient(&plain, &g, None, 0).unwrap();
        assert_eq!(out.structure, apply_interpretation(q.base(), &g).unwrap().structure);
    }

    #[test]
    fn violations_are_reported() {
        let q = line_graph();
        let sig = Signature::graph();
        let vars = ["x1", "x2", "y1", "y2"];
        let not_eq = formula("x1 = y1", &sig, &vars).unwrap();
        let bad = QuotientScheme::new(q.base().clone(), not_eq, Vec::new()).unwrap();
        // Same first coordinate is an equivalence, but adjacency is not compatible with it.
        assert!(matches!(
            apply_quotient(&bad, &graphs::star(4), None, 0),
            Err(InterpError::Compatibility { .. })
        ));
        let asym = formula("x1 = y1 | E(x1,y2)", &sig, &vars).unwrap();
        let bad = QuotientScheme::new(q.base().clone(), asym, Vec::new()).unwrap();
        assert!(matches!(
            apply_quotient(&bad, &graphs::path(4), None, 0),
            Err(InterpError::NotEquivalence { .. })
        ));
        let wrong = QuotientScheme::new(
            q.base().clone(),
            q.varpi().clone(),
            vec![Certificate {
                name: "edge".into(),
                eta: formula("true", &sig, &["x1", "x2"]).unwrap(),
                size: IntPolynomial::constant(3),
            }],
        )
        .unwrap();
        assert!(matches!(
            apply_quotient(&wrong, &graphs::complete(3), Some(3), 0),
            Err(InterpError::CertificateMismatch { observed: 2, .. })
        ));
    }
}
