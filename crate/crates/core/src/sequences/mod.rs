//! Structure sequences, integer-valued polynomials and the polynomiality
//! detector.

mod detect;
mod ordered;
mod poly;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::counting::CountError;
use crate::gallery::{self, GalleryParams};
use crate::interp::{product_scheme, InterpError, ProductKind, Scheme};
use crate::logic::LogicError;
use crate::structures::{
    build_basic, copies, disjoint_union, strong_sum_all, Adaptation, BasicStructureSpec, Signature, Structure,
    StructureError,
};

pub use detect::{detect_polynomial, size_degree, PolynomialFit, Query, VerifyPoint, Verdict, DEFAULT_VERIFY_COUNT};
pub use ordered::{
    compatible_ordered_partitions, is_nice, ordered_sum, ordered_sum_inj, telescoped_inj, telescoped_inj_polynomial,
    OrderedSumNames,
};
pub use poly::{binomial, IntPolynomial, PolyError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SequenceError {
    #[error("{what} evaluates to {value} at n = {n}")]
    NegativeValue { what: String, n: u64, value: String },
    #[error("basic sequence polynomial {index} (`{poly}`) must be non-constant")]
    ConstantOrder { index: usize, poly: String },
    #[error("basic spec with k = {k} lists {got} polynomials")]
    OrderCount { k: usize, got: usize },
    #[error("{0} is not a graph sequence")]
    NotGraph(String),
    #[error("sequence parts have different signatures: {left} vs {right}")]
    SignatureMismatch { left: String, right: String },
    #[error("custom sequence: {0}")]
    Custom(String),
    #[error("value {0} does not fit a machine integer")]
    Overflow(String),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid sequence spec: {0}")]
    Json(String),
}

impl SequenceError {
    /// Whether the error is a work-limit overrun rather than a real failure.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            SequenceError::Interp(InterpError::BudgetExceeded { .. })
                | SequenceError::Interp(InterpError::Logic(LogicError::BudgetExceeded { .. }))
                | SequenceError::Logic(LogicError::BudgetExceeded { .. })
                | SequenceError::Count(CountError::BudgetExceeded(_))
        )
    }
}

/// A recipe for a sequence `(A_n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase", rename_all_fields = "camelCase")]
pub enum SequenceSpec {
    /// `E ⊕ … ⊕ E ⊕ T_{Q_1(n)} ⊕ … ⊕ T_{Q_k(n)}` with `l` marked vertices.
    Basic {
        k: usize,
        l: usize,
        orders: Vec<IntPolynomial>,
    },
    /// `T⟨A⟩_{length(n)}`: blocks `A_1, A_2, …` stacked under `S` and marked by `U`.
    OrderedSum {
        inner: Box<SequenceSpec>,
        #[serde(default = "IntPolynomial::n")]
        length: IntPolynomial,
    },
    /// A scheme applied termwise; the scheme is stored as scheme-file text.
    Interpreted { scheme: Scheme, inner: Box<SequenceSpec> },
    /// Strong sum of the parts (signatures combined, names ticked on clash).
    StrongSum { parts: Vec<SequenceSpec> },
    /// Disjoint union of parts over one signature.
    Union { parts: Vec<SequenceSpec> },
    /// `m(n)` disjoint copies.
    Copies { m: IntPolynomial, inner: Box<SequenceSpec> },
    /// The subsequence `A_{P(n)}`.
    Reindexed { p: IntPolynomial, inner: Box<SequenceSpec> },
    /// Every term gets the unary mark `mark` on all vertices.
    Marked {
        #[serde(default = "default_mark")]
        mark: String,
        inner: Box<SequenceSpec>,
    },
    /// A named generator from the gallery.
    Custom {
        name: String,
        #[serde(default)]
        params: GalleryParams,
    },
    /// The same structure at every index.
    Constant { structure: Structure },
}

fn default_mark() -> String {
    "U".into()
}

/// `Q(n)` as a `usize`, rejecting negative values.
pub fn nonneg(poly: &IntPolynomial, n: u64, what: &str) -> Result<usize, SequenceError> {
    let v = poly.eval_u64(n);
    if v.is_negative() {
        return Err(SequenceError::NegativeValue {
            what: format!("{what} `{poly}`"),
            n,
            value: v.to_string(),
        });
    }
    v.to_usize().ok_or_else(|| SequenceError::Overflow(v.to_string()))
}

impl SequenceSpec {
    pub fn basic(k: usize, l: usize, orders: Vec<IntPolynomial>) -> Self {
        SequenceSpec::Basic { k, l, orders }
    }

    pub fn constant(structure: Structure) -> Self {
        SequenceSpec::Constant { structure }
    }

    pub fn interpreted(scheme: Scheme, inner: SequenceSpec) -> Self {
        SequenceSpec::Interpreted {
            scheme,
            inner: Box::new(inner),
        }
    }

    pub fn copies(m: IntPolynomial, inner: SequenceSpec) -> Self {
        SequenceSpec::Copies {
            m,
            inner: Box::new(inner),
        }
    }

    pub fn reindexed(p: IntPolynomial, inner: SequenceSpec) -> Self {
        SequenceSpec::Reindexed {
            p,
            inner: Box::new(inner),
        }
    }

    pub fn ordered_sum(inner: SequenceSpec, length: IntPolynomial) -> Self {
        SequenceSpec::OrderedSum {
            inner: Box::new(inner),
            length,
        }
    }

    pub fn marked(mark: impl Into<String>, inner: SequenceSpec) -> Self {
        SequenceSpec::Marked {
            mark: mark.into(),
            inner: Box::new(inner),
        }
    }

    pub fn custom(name: impl Into<String>, params: GalleryParams) -> Self {
        SequenceSpec::Custom {
            name: name.into(),
            params,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SequenceError> {
        let spec: SequenceSpec = serde_json::from_str(text).map_err(|e| SequenceError::Json(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("specs serialize")
    }

    /// Structural checks that need no term: basic polynomials non-constant
    /// and listed once per tournament, signatures derivable.
    pub fn validate(&self) -> Result<(), SequenceError> {
        self.signature().map(|_| ())
    }

    /// Every polynomial in the tree, for the degree bound.
    fn children(&self) -> Vec<&SequenceSpec> {
        match self {
            SequenceSpec::OrderedSum { inner, .. }
            | SequenceSpec::Interpreted { inner, .. }
            | SequenceSpec::Copies { inner, .. }
            | SequenceSpec::Reindexed { inner, .. }
            | SequenceSpec::Marked { inner, .. } => vec![inner],
            SequenceSpec::StrongSum { parts } | SequenceSpec::Union { parts } => parts.iter().collect(),
            SequenceSpec::Basic { .. } | SequenceSpec::Custom { .. } | SequenceSpec::Constant { .. } => Vec::new(),
        }
    }

    /// Whether some node applies a quotient scheme.
    pub fn has_quotient(&self) -> bool {
        matches!(self, SequenceSpec::Interpreted { scheme: Scheme::Quotient(_), .. })
            || self.children().into_iter().any(SequenceSpec::has_quotient)
    }

    /// The signature of every term, derived without generating one.
    pub fn signature(&self) -> Result<Signature, SequenceError> {
        Ok(match self {
            SequenceSpec::Basic { k, l, orders } => {
                if orders.len() != *k {
                    return Err(SequenceError::OrderCount { k: *k, got: orders.len() });
                }
                if let Some((i, q)) = orders.iter().enumerate().find(|(_, q)| q.is_constant()) {
                    return Err(SequenceError::ConstantOrder {
                        index: i + 1,
                        poly: q.to_string(),
                    });
                }
                BasicStructureSpec::signature(*k, *l)
            }
            SequenceSpec::OrderedSum { inner, .. } => {
                let sig = inner.signature()?;
                OrderedSumNames::for_signature(&sig).signature(&sig)
            }
            SequenceSpec::Interpreted { scheme, inner } => {
                let sig = inner.signature()?;
                for sym in scheme.source().symbols() {
                    if sig.arity_of(&sym.name) != Some(sym.arity) {
                        return Err(InterpError::SignatureMismatch {
                            symbol: sym.name.clone(),
                            arity: sym.arity,
                        }
                        .into());
                    }
                }
                scheme.target()
            }
            SequenceSpec::StrongSum { parts } => {
                let mut sig = Signature::default();
                for p in parts {
                    sig = sig.disjoint_union(&p.signature()?).0;
                }
                sig
            }
            SequenceSpec::Union { parts } => {
                let sigs = parts.iter().map(SequenceSpec::signature).collect::<Result<Vec<_>, _>>()?;
                let first = sigs.first().cloned().unwrap_or_default();
                if let Some(other) = sigs.iter().find(|s| **s != first) {
                    return Err(SequenceError::SignatureMismatch {
                        left: first.to_string(),
                        right: other.to_string(),
                    });
                }
                first
            }
            SequenceSpec::Copies { inner, .. } | SequenceSpec::Reindexed { inner, .. } => inner.signature()?,
            SequenceSpec::Marked { mark, inner } => {
                let mut sig = inner.signature()?;
                sig.push(mark.clone(), 1)?;
                sig
            }
            SequenceSpec::Custom { name, params } => {
                gallery::custom_signature(name, params).map_err(|e| SequenceError::Custom(e.to_string()))?
            }
            SequenceSpec::Constant { structure } => structure.signature().clone(),
        })
    }

    /// The largest degree among the tree's polynomials (at least 1 if any).
    pub fn max_poly_degree(&self) -> usize {
        let own = match self {
            SequenceSpec::Basic { orders, .. } => orders.iter().map(IntPolynomial::degree_or_zero).max().unwrap_or(0),
            SequenceSpec::OrderedSum { length, .. } => length.degree_or_zero(),
            SequenceSpec::Copies { m, .. } => m.degree_or_zero(),
            SequenceSpec::Reindexed { p, .. } => p.degree_or_zero(),
            _ => 0,
        };
        self.children().into_iter().map(SequenceSpec::max_poly_degree).fold(own, usize::max)
    }

    /// Materializes `A_n`.
    pub fn term(&self, n: u64) -> Result<Structure, SequenceError> {
        generate_term(self, n)
    }
}

/// Materializes the `n`-th term of `spec`.
pub fn generate_term(spec: &SequenceSpec, n: u64) -> Result<Structure, SequenceError> {
    match spec {
        SequenceSpec::Basic { k, l, orders } => {
            spec.signature()?;
            let orders = orders
                .iter()
                .enumerate()
                .map(|(i, q)| nonneg(q, n, &format!("order {}", i + 1)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(build_basic(&BasicStructureSpec::new(*k, *l, orders)))
        }
        SequenceSpec::OrderedSum { inner, length } => {
            let len = nonneg(length, n, "length")?;
            let blocks = (1..=len as u64)
                .map(|i| generate_term(inner, i))
                .collect::<Result<Vec<_>, _>>()?;
            let sig = inner.signature()?;
            Ok(ordered_sum(&sig, &blocks)?.0)
        }
        SequenceSpec::Interpreted { scheme, inner } => {
            let a = generate_term(inner, n)?;
            Ok(scheme.apply(&a, Some(n), n)?)
        }
        SequenceSpec::StrongSum { parts } => {
            let terms = parts.iter().map(|p| generate_term(p, n)).collect::<Result<Vec<_>, _>>()?;
            Ok(strong_sum_all(&terms))
        }
        SequenceSpec::Union { parts } => {
            let sig = spec.signature()?;
            let mut out = Structure::empty(sig, 0);
            for p in parts {
                out = disjoint_union(&out, &generate_term(p, n)?)?;
            }
            Ok(out)
        }
        SequenceSpec::Copies { m, inner } => {
            let m = nonneg(m, n, "multiplicity")?;
            Ok(copies(&generate_term(inner, n)?, m))
        }
        SequenceSpec::Reindexed { p, inner } => {
            let at = nonneg(p, n, "index")?;
            generate_term(inner, at as u64)
        }
        SequenceSpec::Marked { mark, inner } => Ok(generate_term(inner, n)?.adapt(&Adaptation::Mark(mark.clone()))?),
        SequenceSpec::Custom { name, params } => {
            gallery::custom_term(name, params, n).map_err(|e| SequenceError::Custom(e.to_string()))
        }
        SequenceSpec::Constant { structure } => Ok(structure.clone()),
    }
}

/// The built-in product of two graph sequences:
/// `Interpreted(product scheme, StrongSum(Marked(a), Marked(b)))`.
pub fn product_sequences(op: ProductKind, a: SequenceSpec, b: SequenceSpec) -> Result<SequenceSpec, SequenceError> {
    for (side, s) in [("left operand", &a), ("right operand", &b)] {
        if s.signature()? != Signature::graph() {
            return Err(SequenceError::NotGraph(side.into()));
        }
    }
    let inner = SequenceSpec::StrongSum {
        parts: vec![SequenceSpec::marked("U", a), SequenceSpec::marked("U", b)],
    };
    Ok(SequenceSpec::interpreted(Scheme::Graphical(product_scheme(op)), inner))
}

/// `BigInt` from a `u64` count.
pub(crate) fn big(v: u64) -> BigInt {
    BigInt::from(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structures::{build_transitive_tournament, graphs, weakly_isomorphic};

    fn poly(s: &str) -> IntPolynomial {
        s.parse().unwrap()
    }

    fn forget_s(t: &Structure) -> Structure {
        let names = ["U".to_string(), "S".to_string()];
        t.with_symbol_names(&names).unwrap()
    }

    #[test]
    fn basic_terms() {
        let spec = SequenceSpec::basic(1, 0, vec![poly("n")]);
        let t = generate_term(&spec, 4).unwrap();
        assert_eq!(forget_s(&t), build_transitive_tournament(4));
        let re = SequenceSpec::reindexed(poly("n^2"), spec.clone());
        assert_eq!(forget_s(&generate_term(&re, 2).unwrap()), build_transitive_tournament(4));
        assert!(matches!(
            SequenceSpec::basic(1, 0, vec![poly("3")]).validate(),
            Err(SequenceError::ConstantOrder { index: 1, .. })
        ));
        let neg = SequenceSpec::basic(1, 0, vec![poly("n - 2")]);
        assert!(matches!(generate_term(&neg, 1), Err(SequenceError::NegativeValue { n: 1, .. })));
    }

    #[test]
    fn copies_of_an_edge() {
        let spec = SequenceSpec::copies(poly("n"), SequenceSpec::constant(graphs::complete(2)));
        let t = generate_term(&spec, 3).unwrap();
        assert_eq!(t.domain_size(), 6);
        assert_eq!(graphs::edge_count(&t), 3);
    }

    #[test]
    fn products() {
        let k2 = || SequenceSpec::constant(graphs::complete(2));
        let cases = [
            (ProductKind::Cartesian, graphs::complete(2), graphs::cycle(4)),
            (ProductKind::Direct, graphs::complete(2), crate::structures::copies(&graphs::complete(2), 2)),
            (ProductKind::Lexicographic, graphs::empty(2), graphs::cycle(4)),
        ];
        for (op, right, expected) in cases {
            let spec = product_sequences(op, k2(), SequenceSpec::constant(right)).unwrap();
            assert_eq!(spec.signature().unwrap(), Signature::graph());
            for n in 0..3 {
                assert!(weakly_isomorphic(&generate_term(&spec, n).unwrap(), &expected).unwrap(), "{op}");
            }
        }
        let t = SequenceSpec::constant(build_transitive_tournament(2));
        assert!(matches!(product_sequences(ProductKind::Direct, k2(), t), Err(SequenceError::NotGraph(_))));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind":"copies","m":"n^2","inner":{"kind":"basic","k":1,"l":2,"orders":["n+1"]}}"#;
        let spec = SequenceSpec::from_json(text).unwrap();
        let SequenceSpec::Copies { m, .. } = &spec else { panic!("expected copies") };
        assert_eq!(m.binomial_coeffs(), &[0.into(), 1.into(), 2.into()]);
        let again = SequenceSpec::from_json(&spec.to_json()).unwrap();
        assert_eq!(again, spec);
        let k2 = SequenceSpec::constant(graphs::complete(2));
        let prod = product_sequences(ProductKind::Strong, k2.clone(), k2).unwrap();
        assert_eq!(SequenceSpec::from_json(&prod.to_json()).unwrap(), prod);
    }

    #[test]
    fn union_needs_one_signature() {
        let spec = SequenceSpec::Union {
            parts: vec![
                SequenceSpec::constant(graphs::complete(2)),
                SequenceSpec::constant(build_transitive_tournament(1)),
            ],
        };
        assert!(matches!(spec.validate(), Err(SequenceError::SignatureMismatch { .. })));
    }
}
