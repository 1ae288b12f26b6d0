//! Graph operations as graphical schemes over `Mark(A) ⊕ Mark(B)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::structures::{Signature, Structure};

use super::{formula, GraphicalScheme};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    #[serde(rename = "union")]
    DisjointUnion,
    Direct,
    Cartesian,
    Strong,
    #[serde(rename = "lex")]
    Lexicographic,
}

impl ProductKind {
    pub const ALL: [ProductKind; 5] = [
        ProductKind::DisjointUnion,
        ProductKind::Direct,
        ProductKind::Cartesian,
        ProductKind::Strong,
        ProductKind::Lexicographic,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProductKind::DisjointUnion => "union",
            ProductKind::Direct => "direct",
            ProductKind::Cartesian => "cartesian",
            ProductKind::Strong => "strong",
            ProductKind::Lexicographic => "lex",
        }
    }

    /// Direct construction on simple graphs; product vertex `(i, j)` is
    /// `i·|B| + j`, and union vertices of `b` follow those of `a`.
    pub fn apply(self, a: &Structure, b: &Structure) -> Structure {
        let (n, m) = (a.domain_size(), b.domain_size());
        let ea = |i: usize, j: usize| a.holds(0, &[i, j]);
        let eb = |i: usize, j: usize| b.holds(0, &[i, j]);
        if self == ProductKind::DisjointUnion {
            return crate::structures::disjoint_union(a, b).expect("both graphs");
        }
        let mut out = Structure::empty(Signature::graph(), n * m);
        for (x1, x2) in (0..n).flat_map(|i| (0..m).map(move |j| (i, j))) {
            for (y1, y2) in (0..n).flat_map(|i| (0..m).map(move |j| (i, j))) {
                if (x1, x2) == (y1, y2) {
                    continue;
                }
                let direct = ea(x1, y1) && eb(x2, y2);
                let cartesian = (x1 == y1 && eb(x2, y2)) || (ea(x1, y1) && x2 == y2);
                let adjacent = match self {
                    ProductKind::Direct => direct,
                    ProductKind::Cartesian => cartesian,
                    ProductKind::Strong => direct || cartesian,
                    ProductKind::Lexicographic => ea(x1, y1) || (x1 == y1 && eb(x2, y2)),
                    ProductKind::DisjointUnion => unreachable!(),
                };
                if adjacent {
                    out.insert(0, vec![x1 * m + x2, y1 * m + y2]).expect("in range");
                }
            }
        }
        out
    }
}

impl fmt::Display for ProductKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProductKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ProductKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown product `{s}`"))
    }
}

/// `{E:2, U:1, E':2, U':1}`, the signature of `Mark(A) ⊕ Mark(B)`.
pub fn product_source_signature() -> Signature {
    Signature::new([("E", 2), ("U", 1), ("E'", 2), ("U'", 1)]).expect("valid signature")
}

pub fn product_scheme(kind: ProductKind) -> GraphicalScheme {
    let sig = product_source_signature();
    let (p, iota, rho) = match kind {
        ProductKind::DisjointUnion => (1, "true", "E(x,y) | E'(x,y)"),
        ProductKind::Direct => (2, "U(x1) & U'(x2)", "E(x1,y1) & E'(x2,y2)"),
        ProductKind::Cartesian => (2, "U(x1) & U'(x2)", "(x1 = y1 & E'(x2,y2)) | (E(x1,y1) & x2 = y2)"),
        ProductKind::Strong => (
            2,
            "U(x1) & U'(x2)",
            "(x1 = y1 & E'(x2,y2)) | (E(x1,y1) & x2 = y2) | (E(x1,y1) & E'(x2,y2))",
        ),
        ProductKind::Lexicographic => (2, "U(x1) & U'(x2)", "E(x1,y1) | (x1 = y1 & E'(x2,y2))"),
    };
    let (iota, rho) = if p == 1 {
        (formula(iota, &sig, &["x"]), formula(rho, &sig, &["x", "y"]))
    } else {
        (
            formula(iota, &sig, &["x1", "x2"]),
            formula(rho, &sig, &["x1", "x2", "y1", "y2"]),
        )
    };
    GraphicalScheme::new(kind.as_str(), p, sig, iota.expect("valid"), rho.expect("valid")).expect("valid scheme")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interp::apply_graphical;
    use crate::structures::{adapt_signature, graphs, strong_sum, weakly_isomorphic, Adaptation};

    fn marked_sum(a: &Structure, b: &Structure) -> Structure {
        let mark = |g: &Structure| adapt_signature(g, &Adaptation::Mark("U".into())).unwrap();
        strong_sum(&mark(a), &mark(b))
    }

    #[test]
    fn named_products() {
        let k2 = graphs::complete(2);
        let cart = ProductKind::Cartesian.apply(&k2, &k2);
        assert!(weakly_isomorphic(&cart, &graphs::cycle(4)).unwrap());
        let direct = ProductKind::Direct.apply(&k2, &k2);
        assert!(weakly_isomorphic(&direct, &crate::structures::copies(&k2, 2)).unwrap());
        let lex = ProductKind::Lexicographic.apply(&k2, &graphs::empty(2));
        assert!(weakly_isomorphic(&lex, &graphs::cycle(4)).unwrap());
    }

    #[test]
    fn schemes_equal_direct_products() {
        let gs = [graphs::complete(2), graphs::path(3), graphs::empty(2), graphs::cycle(4), graphs::empty(0)];
        for kind in ProductKind::ALL {
            let scheme = product_scheme(kind);
            for a in &gs {
                for b in &gs {
                    let out = apply_graphical(&scheme, &marked_sum(a, b)).unwrap();
                    assert_eq!(out.structure, kind.apply(a, b), "{kind}");
                }
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for kind in ProductKind::ALL {
            assert_eq!(kind.as_str().parse::<ProductKind>().unwrap(), kind);
            let json = serde_json::to_string(&kind).unwrap();
            assert_eq!(json, format!("\"{kind}\""));
        }
    }
}
