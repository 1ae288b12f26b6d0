//! Sample, interpolate, verify.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{count_value, CountMode};
use crate::gallery;
use crate::logic::{count_satisfying, Formula, LogicError};
use crate::structures::Structure;

use super::{big, generate_term, IntPolynomial, SequenceError, SequenceSpec};

pub const DEFAULT_VERIFY_COUNT: usize = 5;

/// What is counted on each term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Query {
    Pattern { pattern: Structure, mode: CountMode },
    Formula(Formula),
}

impl Query {
    pub fn hom(pattern: Structure) -> Self {
        Query::Pattern {
            pattern,
            mode: CountMode::Hom,
        }
    }

    /// Number of variables the count ranges over.
    pub fn variables(&self) -> usize {
        match self {
            Query::Pattern { pattern, .. } => pattern.domain_size(),
            Query::Formula(phi) => phi.arity(),
        }
    }

    pub fn evaluate(&self, a: &Structure) -> Result<BigInt, SequenceError> {
        Ok(match self {
            Query::Pattern { pattern, mode } => count_value(*mode, pattern, a)?.into(),
            Query::Formula(phi) => big(count_satisfying(phi, a)?),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Polynomial,
    NotPolynomial,
    Inconclusive,
}

mod big_str {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplePoint {
    pub n: u64,
    #[serde(with = "big_str")]
    pub value: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyPoint {
    pub n: u64,
    #[serde(with = "big_str")]
    pub value: BigInt,
    #[serde(with = "big_str")]
    pub predicted: BigInt,
    #[serde(rename = "match")]
    pub matches: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct PolynomialFit {
    pub schema_version: u32,
    pub fit: IntPolynomial,
    pub degree_bound: usize,
    pub sample_points: Vec<SamplePoint>,
    pub verify_points: Vec<VerifyPoint>,
    pub verdict: Verdict,
    /// First index where the fit disagrees with the count.
    pub witness: Option<u64>,
    pub note: Option<String>,
}

impl PolynomialFit {
    /// `n,value,phase,match` rows, samples first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value,phase,match\n");
        for p in &self.sample_points {
            out.push_str(&format!("{},{},sample,true\n", p.n, p.value));
        }
        for p in &self.verify_points {
            out.push_str(&format!("{},{},verify,{}\n", p.n, p.value, p.matches));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("fits serialize")
    }
}

/// Upper bound on the degree of `n ↦ |A_n|`, assuming it is a polynomial.
pub fn size_degree(spec: &SequenceSpec) -> Result<usize, SequenceError> {
    Ok(match spec {
        SequenceSpec::Basic { orders, .. } => orders.iter().map(IntPolynomial::degree_or_zero).max().unwrap_or(0),
        SequenceSpec::OrderedSum { inner, length } => length.degree_or_zero() * (size_degree(inner)? + 1),
        SequenceSpec::Interpreted { scheme, inner } => scheme.exponent() * size_degree(inner)?,
        SequenceSpec::StrongSum { parts } | SequenceSpec::Union { parts } => {
            parts.iter().map(size_degree).collect::<Result<Vec<_>, _>>()?.into_iter().max().unwrap_or(0)
        }
        SequenceSpec::Copies { m, inner } => m.degree_or_zero() + size_degree(inner)?,
        SequenceSpec::Reindexed { p, inner } => p.degree_or_zero() * size_degree(inner)?,
        SequenceSpec::Marked { inner, .. } => size_degree(inner)?,
        SequenceSpec::Custom { name, params } => {
            gallery::custom_size_degree(name, params).map_err(|e| SequenceError::Custom(e.to_string()))?
        }
        SequenceSpec::Constant { .. } => 0,
    })
}

/// Counts at `n = 0..=d` with `d = (query variables) · size_degree(spec)`,
/// interpolates, and checks the fit at the next `verify_count` indices.
///
/// A work-limit overrun gives `Inconclusive` with the data gathered so far.
/// So does a failed verification on sequences built with quotient schemes,
/// whose degree bound is not proven.
pub fn detect_polynomial(spec: &SequenceSpec, query: &Query, verify_count: usize) -> Result<PolynomialFit, SequenceError> {
    if let Query::Formula(phi) = query {
        if !phi.is_quantifier_free() {
            return Err(LogicError::NotQuantifierFree.into());
        }
    }
    spec.validate()?;
    let d = query.variables() * size_degree(spec)?;
    let total = (d + 1 + verify_count) as u64;
    let values: Vec<Result<BigInt, SequenceError>> = (0..total)
        .into_par_iter()
        .map(|n| query.evaluate(&generate_term(spec, n)?))
        .collect();
    let mut fit = PolynomialFit {
        schema_version: 1,
        fit: IntPolynomial::zero(),
        degree_bound: d,
        sample_points: Vec::new(),
        verify_points: Vec::new(),
        verdict: Verdict::Polynomial,
        witness: None,
        note: None,
    };
    let mut values = values.into_iter().enumerate();
    for (n, v) in values.by_ref().take(d + 1) {
        match v {
            Ok(value) => fit.sample_points.push(SamplePoint { n: n as u64, value }),
            Err(e) if e.is_budget() => {
                fit.verdict = Verdict::Inconclusive;
                fit.note = Some(format!("sampling stopped at n = {n}: {e}"));
                return Ok(fit);
            }
            Err(e) => return Err(e),
        }
    }
    let samples: Vec<(i64, BigInt)> = fit.sample_points.iter().map(|p| (p.n as i64, p.value.clone())).collect();
    fit.fit = IntPolynomial::interpolate(&samples)?;
    for (n, v) in values {
        let n = n as u64;
        match v {
            Ok(value) => {
                let predicted = fit.fit.eval_u64(n);
                let matches = predicted == value;
                if !matches && fit.witness.is_none() {
                    fit.witness = Some(n);
                }
                fit.verify_points.push(VerifyPoint {
                    n,
                    value,
                    predicted,
                    matches,
                });
            }
            Err(e) if e.is_budget() => {
                fit.verdict = Verdict::Inconclusive;
                fit.note = Some(format!("verification stopped at n = {n}: {e}"));
                return Ok(fit);
            }
            Err(e) => return Err(e),
        }
    }
    if let Some(w) = fit.witness {
        if spec.has_quotient() {
            fit.verdict = Verdict::Inconclusive;
            fit.note = Some(format!("fit fails at n = {w}; the degree bound for quotient schemes is not proven"));
        } else {
            fit.verdict = Verdict::NotPolynomial;
        }
    }
    Ok(fit)
}
