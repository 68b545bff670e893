//! The urns of random m-ary search trees: the composition-typed urn for
//! protected nodes, the gap urns for nodes and leaves, and the urn for
//! one-protected nodes.

mod closed;
mod gap;
pub mod paper_order;
mod protected;
mod types;

pub use closed::{
    closed_forms, lemma_root_check, phi, spectral_condition, ClosedForms, LemmaReport,
    SpectralCondition, TMap,
};
pub use gap::{leaves_gap_urn, node_urn, oneprotected_urn};
pub use protected::{protected_urn, protected_urn_capped, DEFAULT_SIGMA_CAP, DEFAULT_SPECTRUM_CAP};
pub use types::{composition_count, enumerate_types, SmallTreeType};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ratlinalg::{format_rational, serde_rational, Rational};
use crate::urn::UrnSpec;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Protected,
    Nodes,
    Leaves,
    OneProtected,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Protected => "protected",
            ModelKind::Nodes => "nodes",
            ModelKind::Leaves => "leaves",
            ModelKind::OneProtected => "one-protected",
        })
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "protected" => Ok(ModelKind::Protected),
            "nodes" => Ok(ModelKind::Nodes),
            "leaves" => Ok(ModelKind::Leaves),
            "one-protected" | "oneprotected" => Ok(ModelKind::OneProtected),
            _ => Err(Error::Domain(format!(
                "unknown model '{s}' (expected protected, nodes, leaves or one-protected)"
            ))),
        }
    }
}

/// An urn together with what is needed to read tree statistics off it.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelBundle {
    pub model: ModelKind,
    pub m: usize,
    pub spec: UrnSpec,
    /// Composition labels; only for the protected model.
    pub types: Option<Vec<SmallTreeType>>,
    pub functionals: BTreeMap<String, Vec<Rational>>,
    pub start: Vec<u64>,
    /// Number of keys in the tree at `start`.
    pub n0: u64,
}

impl ModelBundle {
    pub fn q(&self) -> usize {
        self.spec.q()
    }

    pub fn functional(&self, name: &str) -> Result<&[Rational]> {
        self.functionals
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| {
                let known: Vec<&str> = self.functionals.keys().map(String::as_str).collect();
                Error::Domain(format!(
                    "model {} has no functional '{name}' (known: {})",
                    self.model,
                    known.join(", ")
                ))
            })
    }

    pub fn sidecar(&self) -> Sidecar {
        let type_labels = match &self.types {
            Some(t) => TypeLabels::Compositions(t.iter().map(|t| t.k.clone()).collect()),
            None => TypeLabels::Roles(self.spec.labels().to_vec()),
        };
        Sidecar {
            model: self.model,
            m: self.m,
            type_labels,
            functionals: self.functionals.clone(),
            start: self.start.clone(),
            n0: self.n0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TypeLabels {
    Compositions(Vec<Vec<u32>>),
    Roles(Vec<String>),
}

/// Model metadata written next to the urn JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub model: ModelKind,
    pub m: usize,
    pub type_labels: TypeLabels,
    #[serde(with = "functional_map")]
    pub functionals: BTreeMap<String, Vec<Rational>>,
    pub start: Vec<u64>,
    pub n0: u64,
}

mod functional_map {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        m: &BTreeMap<String, Vec<Rational>>,
        s: S,
    ) -> Result<S::Ok, S::Error> {
        s.collect_map(
            m.iter()
                .map(|(k, v)| (k, v.iter().map(format_rational).collect::<Vec<_>>())),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<BTreeMap<String, Vec<Rational>>, D::Error> {
        #[derive(Deserialize)]
        struct V(#[serde(with = "serde_rational::vec")] Vec<Rational>);
        let raw: BTreeMap<String, V> = BTreeMap::deserialize(d)?;
        Ok(raw.into_iter().map(|(k, v)| (k, v.0)).collect())
    }
}

/// Builds a model by name with the default caps.
pub fn build_model(model: ModelKind, m: usize) -> Result<ModelBundle> {
    match model {
        ModelKind::Protected => protected_urn(m),
        ModelKind::Nodes => node_urn(m),
        ModelKind::Leaves => leaves_gap_urn(m),
        ModelKind::OneProtected => oneprotected_urn(m),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_round_trip() {
        for b in [protected_urn(2).unwrap(), oneprotected_urn(3).unwrap()] {
            let s = b.sidecar();
            let json = serde_json::to_string(&s).unwrap();
            let back: Sidecar = serde_json::from_str(&json).unwrap();
            assert_eq!(back, s);
        }
    }

    #[test]
    fn model_names() {
        for k in [
            ModelKind::Protected,
            ModelKind::Nodes,
            ModelKind::Leaves,
            ModelKind::OneProtected,
        ] {
            assert_eq!(k.to_string().parse::<ModelKind>().unwrap(), k);
        }
        assert!("trees".parse::<ModelKind>().is_err());
    }
}
