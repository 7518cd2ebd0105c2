//! TOML model files.
//!
//! ```toml
//! schema_version = 1
//! kind = "ergm"
//! n = 16
//!
//! [[terms]]
//! motif = "edge"
//! beta = -1.6339
//!
//! [[terms]]
//! motif = "twostar"        # or "triangle", or "v=4; edges=0-1,1-2,2-3"
//! beta = 0.0098
//! ```
//!
//! An Ising file sets `kind = "ising"`, `n`, `beta`, and either
//! `graph = "complete" | "cycle" | "path"` or `edges = [[0, 1], [1, 2]]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ErgmModel, GibbsModel, IsingModel};
use crate::error::{Error, Result};
use crate::graph::{Config, Motif};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    schema_version: u32,
    kind: String,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    graph: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terms: Option<Vec<TermSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermSpec {
    motif: String,
    beta: f64,
}

/// Either model family, as loaded from a file.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Ising(IsingModel),
    Ergm(ErgmModel),
}

impl GibbsModel for Model {
    fn dim(&self) -> usize {
        match self {
            Model::Ising(m) => m.dim(),
            Model::Ergm(m) => m.dim(),
        }
    }

    fn delta_l(&self, x: &Config, s: usize) -> f64 {
        match self {
            Model::Ising(m) => m.delta_l(x, s),
            Model::Ergm(m) => m.delta_l(x, s),
        }
    }

    fn log_weight(&self, x: &Config) -> f64 {
        match self {
            Model::Ising(m) => m.log_weight(x),
            Model::Ergm(m) => m.log_weight(x),
        }
    }

    fn dependency(&self, r: usize) -> Vec<usize> {
        match self {
            Model::Ising(m) => m.dependency(r),
            Model::Ergm(m) => m.dependency(r),
        }
    }
}

pub fn parse_model(text: &str) -> Result<Model> {
    let f: ModelFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if f.schema_version != SCHEMA_VERSION {
        return Err(Error::Parse(format!(
            "unsupported schema_version {} (expected {SCHEMA_VERSION})",
            f.schema_version
        )));
    }
    match f.kind.as_str() {
        "ising" => {
            if f.terms.is_some() {
                return Err(Error::Parse("an Ising model takes no [[terms]]".into()));
            }
            let beta = f
                .beta
                .ok_or_else(|| Error::Parse("an Ising model needs beta".into()))?;
            let m = match (f.graph.as_deref(), &f.edges) {
                (Some(_), Some(_)) => {
                    return Err(Error::Parse("give either graph or edges, not both".into()))
                }
                (Some("complete"), None) => IsingModel::complete(f.n, beta)?,
                (Some("cycle"), None) => IsingModel::cycle(f.n, beta)?,
                (Some("path"), None) => IsingModel::path(f.n, beta)?,
                (Some(other), None) => {
                    return Err(Error::Parse(format!("unknown Ising graph {other:?}")))
                }
                (None, Some(edges)) => {
                    let e: Vec<(usize, usize)> = edges.iter().map(|p| (p[0], p[1])).collect();
                    IsingModel::from_edges(f.n, &e, beta)?
                }
                (None, None) => return Err(Error::Parse("an Ising model needs graph or edges".into())),
            };
            Ok(Model::Ising(m))
        }
        "ergm" => {
            if f.beta.is_some() || f.graph.is_some() || f.edges.is_some() {
                return Err(Error::Parse("an ERGM takes only n and [[terms]]".into()));
            }
            let terms = f
                .terms
                .ok_or_else(|| Error::Parse("an ERGM needs [[terms]]".into()))?;
            let terms = terms
                .into_iter()
                .map(|t| Ok((t.motif.parse::<Motif>()?, t.beta)))
                .collect::<Result<Vec<_>>>()?;
            Ok(Model::Ergm(ErgmModel::new(f.n, terms)?))
        }
        other => Err(Error::Parse(format!("unknown model kind {other:?}"))),
    }
}

pub fn read_model(path: impl AsRef<Path>) -> Result<Model> {
    let text = std::fs::read_to_string(path.as_ref())?;
    parse_model(&text)
}

fn motif_text(h: &Motif) -> String {
    match h.name() {
        Some(n @ ("edge" | "twostar" | "triangle")) => n.to_string(),
        _ => h.to_string(),
    }
}

/// Serializes a model in the format read by [`parse_model`].
pub fn write_model(model: &Model) -> String {
    let f = match model {
        Model::Ising(m) => ModelFile {
            schema_version: SCHEMA_VERSION,
            kind: "ising".into(),
            n: m.n(),
            beta: Some(m.beta()),
            graph: None,
            edges: Some(m.edges().into_iter().map(|(a, b)| [a, b]).collect()),
            terms: None,
        },
        Model::Ergm(m) => ModelFile {
            schema_version: SCHEMA_VERSION,
            kind: "ergm".into(),
            n: m.n(),
            beta: None,
            graph: None,
            edges: None,
            terms: Some(
                m.terms()
                    .iter()
                    .map(|(h, b)| TermSpec {
                        motif: motif_text(h),
                        beta: *b,
                    })
                    .collect(),
            ),
        },
    };
    toml::to_string(&f).expect("model file serializes")
}
