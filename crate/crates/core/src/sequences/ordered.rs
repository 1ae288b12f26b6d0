//! Ordered sums `T⟨A⟩_n` and their injective-count formula.

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::counting::{inj_count, partitions, CountError};
use crate::structures::{Adaptation, Signature, Structure, StructureError};

use super::IntPolynomial;

/// Names of the order and mark added by an ordered sum; ticked when the
/// inner signature already uses `S` or `U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedSumNames {
    pub order: String,
    pub mark: String,
}

impl OrderedSumNames {
    pub fn for_signature(inner: &Signature) -> Self {
        let order = inner.fresh_name("S");
        let mut with_order = inner.clone();
        with_order.push(order.clone(), 2).expect("fresh name");
        OrderedSumNames {
            mark: with_order.fresh_name("U"),
            order,
        }
    }

    /// `λ⁺`: the inner symbols, then the order, then the mark.
    pub fn signature(&self, inner: &Signature) -> Signature {
        let mut sig = inner.clone();
        sig.push(self.order.clone(), 2).expect("fresh name");
        sig.push(self.mark.clone(), 1).expect("fresh name");
        sig
    }

    /// Whether the ordered sum had to rename `S` or `U`.
    pub fn renamed(&self) -> bool {
        self.order != "S" || self.mark != "U"
    }
}

/// `T⟨A⟩`: the disjoint union of `blocks` over `inner`, with `S(x, y)` for
/// `x` in an earlier block than `y` and `U` on every vertex.
pub fn ordered_sum(inner: &Signature, blocks: &[Structure]) -> Result<(Structure, OrderedSumNames), StructureError> {
    let names = OrderedSumNames::for_signature(inner);
    let sig = names.signature(inner);
    let total = blocks.iter().map(Structure::domain_size).sum();
    let mut out = Structure::empty(sig, total);
    let (s, u) = (inner.len(), inner.len() + 1);
    let mut start = 0;
    for b in blocks {
        if b.signature() != inner {
            return Err(StructureError::SignatureMismatch {
                left: inner.to_string(),
                right: b.signature().to_string(),
            });
        }
        for (r, rel) in b.relations().iter().enumerate() {
            for t in rel {
                out.insert(r, t.iter().map(|&v| v + start).collect())?;
            }
        }
        let end = start + b.domain_size();
        for x in start..end {
            out.insert(u, vec![x])?;
            for y in end..total {
                out.insert(s, vec![x, y])?;
            }
        }
        start = end;
    }
    Ok((out, names))
}

/// Ordered partitions `(P_1, …, P_k)` of the pattern's vertices such that
/// every order tuple goes from an earlier to a later part and every tuple
/// of another non-mark relation stays within one part. These are exactly
/// the block patterns of injective maps into an ordered sum.
pub fn compatible_ordered_partitions(pattern: &Structure, names: &OrderedSumNames) -> Vec<Vec<Vec<usize>>> {
    let sig = pattern.signature();
    let order = sig.index_of(&names.order);
    let mark = sig.index_of(&names.mark);
    let n = pattern.domain_size();
    let mut out = Vec::new();
    for theta in partitions(n) {
        let blocks = theta.blocks();
        for perm in blocks.iter().permutations(blocks.len()) {
            let mut part = vec![0; n];
            for (i, b) in perm.iter().enumerate() {
                for &v in b.iter() {
                    part[v] = i;
                }
            }
            let ok = pattern.relations().iter().enumerate().all(|(r, rel)| {
                if Some(r) == mark {
                    true
                } else if Some(r) == order {
                    rel.iter().all(|t| part[t[0]] < part[t[1]])
                } else {
                    rel.iter().all(|t| t.iter().all(|&v| part[v] == part[t[0]]))
                }
            });
            if ok {
                out.push(perm.into_iter().cloned().collect());
            }
        }
    }
    out
}

/// Niceness: the mark holds on every vertex and a compatible ordered
/// partition exists. Patterns that are not nice have no induced copies in
/// an ordered sum.
pub fn is_nice(pattern: &Structure, names: &OrderedSumNames) -> bool {
    let marked = match pattern.relation_by_name(&names.mark) {
        Some(rel) => rel.len() == pattern.domain_size(),
        None => pattern.domain_size() == 0,
    };
    marked && !compatible_ordered_partitions(pattern, names).is_empty()
}

/// `Σ_{1 ≤ i_1 < … < i_k ≤ len} Π_j f_j(i_j)` where `values[j][i - 1] = f_j(i)`.
fn increasing_sum(values: &[Vec<BigInt>], len: usize) -> BigInt {
    let k = values.len();
    let mut dp = vec![BigInt::zero(); k + 1];
    dp[0] = BigInt::one();
    for i in 0..len {
        for j in (1..=k).rev() {
            let add = &dp[j - 1] * &values[j - 1][i];
            dp[j] += add;
        }
    }
    dp[k].clone()
}

/// `Σ_{1 ≤ i_1 < … < i_k ≤ n} P_1(i_1)·…·P_k(i_k)`.
pub fn telescoped_inj(fits: &[IntPolynomial], n: u64) -> BigInt {
    let values: Vec<Vec<BigInt>> = fits
        .iter()
        .map(|p| (1..=n).map(|i| p.eval_u64(i)).collect())
        .collect();
    increasing_sum(&values, n as usize)
}

/// The same sum as a polynomial in `n`.
pub fn telescoped_inj_polynomial(fits: &[IntPolynomial]) -> IntPolynomial {
    let degree: usize = fits.iter().map(|p| p.degree_or_zero() + 1).sum();
    let samples: Vec<(i64, BigInt)> = (0..=degree as u64).map(|n| (n as i64, telescoped_inj(fits, n))).collect();
    IntPolynomial::interpolate(&samples).expect("consecutive samples")
}

/// `inj(F, T⟨A⟩_n)` by the ordered-partition formula: each compatible
/// ordered partition contributes the telescoped sum of the parts'
/// injective counts into the blocks. `blocks[i]` is `A_{i+1}`.
pub fn ordered_sum_inj(pattern: &Structure, inner: &Signature, blocks: &[Structure]) -> Result<BigInt, CountError> {
    let names = OrderedSumNames::for_signature(inner);
    let forget = Adaptation::Forget(vec![names.order.clone(), names.mark.clone()]);
    let mut total = BigInt::zero();
    for parts in compatible_ordered_partitions(pattern, &names) {
        let mut values = Vec::with_capacity(parts.len());
        for p in &parts {
            let piece = pattern
                .induced(p)
                .adapt(&forget)
                .map_err(|e| CountError::InvalidPartition(e.to_string()))?;
            let row = blocks
                .iter()
                .map(|b| inj_count(&piece, b).map(|r| BigInt::from(r.value)))
                .collect::<Result<Vec<_>, _>>()?;
            values.push(row);
        }
        total += increasing_sum(&values, blocks.len());
    }
    Ok(total)
}
