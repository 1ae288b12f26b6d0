//! Bounded-degree sequences as unions of fixed components with polynomial
//! multiplicities.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::sequences::{nonneg, size_degree, IntPolynomial, SequenceSpec};
use crate::structures::{copies, disjoint_union, Signature, Structure, StructureError};

use super::{canonical_form_with_cap, canonical_relabel, CanonicalKey, GalleryError, GALLERY_CANON_CAP};

/// Component multiplicities of `s` by canonical key.
pub fn component_census(s: &Structure) -> Result<BTreeMap<CanonicalKey, (Structure, usize)>, StructureError> {
    let mut census: BTreeMap<CanonicalKey, (Structure, usize)> = BTreeMap::new();
    for comp in s.components() {
        let piece = s.induced(&comp);
        let key = canonical_form_with_cap(&piece, GALLERY_CANON_CAP)?;
        census.entry(key).or_insert_with(|| (canonical_relabel(&piece), 0)).1 += 1;
    }
    Ok(census)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DecompositionPart {
    pub key: String,
    pub component: Structure,
    pub multiplicity: IntPolynomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Decomposition {
    pub schema_version: u32,
    pub degree_cap: usize,
    pub size_degree: usize,
    pub parts: Vec<DecompositionPart>,
    /// Indices where the reassembled term was compared with the real one.
    pub checked: Vec<u64>,
}

impl Decomposition {
    /// The union of `multiplicity(n)` copies of every component.
    pub fn reassemble(&self, n: u64) -> Result<Structure, GalleryError> {
        let sig = self
            .parts
            .first()
            .map_or_else(Signature::graph, |p| p.component.signature().clone());
        let mut out = Structure::empty(sig, 0);
        for p in &self.parts {
            let m = nonneg(&p.multiplicity, n, "multiplicity")?;
            if m > 0 {
                out = disjoint_union(&out, &copies(&p.component, m))?;
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("decompositions serialize")
    }
}

/// Samples `n = 0..=D` with `D = size_degree(spec)`, interpolates the
/// multiplicity of every component type seen, and checks the result on the
/// next three indices.
pub fn bounded_decompose(spec: &SequenceSpec, cap: usize) -> Result<Decomposition, GalleryError> {
    const HELD_OUT: u64 = 3;
    let d = size_degree(spec)? as u64;
    let censuses: Vec<(u64, Structure, BTreeMap<CanonicalKey, (Structure, usize)>)> = (0..=d + HELD_OUT)
        .into_par_iter()
        .map(|n| {
            let term = spec.term(n)?;
            let degree = term.max_degree();
            if degree > cap {
                return Err(GalleryError::UnboundedDegree { n, degree, cap });
            }
            let census = component_census(&term)?;
            Ok((n, term, census))
        })
        .collect::<Vec<Result<_, GalleryError>>>()
        .into_iter()
        .collect::<Result<_, _>>()?;
    let mut kinds: BTreeMap<CanonicalKey, Structure> = BTreeMap::new();
    for (_, _, census) in censuses.iter().take(d as usize + 1) {
        for (key, (comp, _)) in census {
            kinds.entry(key.clone()).or_insert_with(|| comp.clone());
        }
    }
    let mut parts = Vec::new();
    for (key, component) in kinds {
        let samples: Vec<(i64, BigInt)> = censuses
            .iter()
            .take(d as usize + 1)
            .map(|(n, _, c)| (*n as i64, BigInt::from(c.get(&key).map_or(0, |e| e.1))))
            .collect();
        parts.push(DecompositionPart {
            key: key.to_string(),
            component,
            multiplicity: IntPolynomial::interpolate(&samples)?,
        });
    }
    let decomposition = Decomposition {
        schema_version: 1,
        degree_cap: cap,
        size_degree: d as usize,
        parts,
        checked: (d + 1..=d + HELD_OUT).collect(),
    };
    for (n, term, _) in censuses.iter().skip(d as usize + 1) {
        let rebuilt = decomposition.reassemble(*n)?;
        let same = rebuilt.domain_size() == term.domain_size()
            && component_census(&rebuilt)?
                .into_iter()
                .map(|(k, (_, m))| (k, m))
                .eq(component_census(term)?.into_iter().map(|(k, (_, m))| (k, m)));
        if !same {
            return Err(GalleryError::Verification { n: *n });
        }
    }
    Ok(decomposition)
}
