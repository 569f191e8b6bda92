use serde::{Deserialize, Serialize};

use super::{CostMatrix, Edge, Problem};
use crate::error::{Error, Result};

/// On-disk problem document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub tau: f64,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
    pub cost: CostDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CostDocument {
    Sparse {
        rows: usize,
        cols: usize,
        entries: Vec<EntryDocument>,
    },
    Dense {
        values: Vec<Vec<DenseValue>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntryDocument {
    pub i: usize,
    pub j: usize,
    pub c: f64,
}

/// A dense cell: a finite number, or the string `"inf"` for an absent edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DenseValue {
    Finite(f64),
    Marker(String),
}

impl ProblemDocument {
    pub fn into_problem(self) -> Result<Problem> {
        let cost = match self.cost {
            CostDocument::Sparse {
                rows,
                cols,
                entries,
            } => CostMatrix::new(
                rows,
                cols,
                entries
                    .into_iter()
                    .map(|e| Edge {
                        i: e.i,
                        j: e.j,
                        c: e.c,
                    })
                    .collect(),
            )?,
            CostDocument::Dense { values } => {
                let cells = values
                    .into_iter()
                    .map(|row| {
                        row.into_iter()
                            .map(|v| match v {
                                DenseValue::Finite(c) => Ok(Some(c)),
                                DenseValue::Marker(s) if s == "inf" => Ok(None),
                                DenseValue::Marker(s) => Err(Error::Malformed(format!(
                                    "unexpected dense cost value {s:?}; only \"inf\" is allowed"
                                ))),
                            })
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                CostMatrix::from_dense(&cells)?
            }
        };
        Problem::new(self.mu, self.nu, self.tau, cost)
    }

    /// Sparse document for `p`.
    pub fn from_problem(p: &Problem) -> Self {
        Self {
            tau: p.tau(),
            mu: p.mu().to_vec(),
            nu: p.nu().to_vec(),
            cost: CostDocument::Sparse {
                rows: p.rows(),
                cols: p.cols(),
                entries: p
                    .cost()
                    .entries()
                    .iter()
                    .map(|e| EntryDocument {
                        i: e.i,
                        j: e.j,
                        c: e.c,
                    })
                    .collect(),
            },
        }
    }
}

/// Parses a problem document. Absent cost pairs become `+inf` (no edge).
pub fn parse_problem(bytes: &[u8]) -> Result<Problem> {
    let doc: ProblemDocument =
        serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    doc.into_problem()
}

/// Sparse JSON encoding of `p`; floats round-trip exactly.
pub fn serialize_problem(p: &Problem) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(&ProblemDocument::from_problem(p))
        .expect("problem documents always serialize");
    out.push(b'\n');
    out
}
