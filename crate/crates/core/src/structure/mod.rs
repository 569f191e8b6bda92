//! Scalability classification and the generalized Dulmage-Mendelsohn
//! decomposition, in exact rational arithmetic over the snapped marginals.

mod dm;
mod flow;

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::problem::{rational_marginals, Problem};

pub use dm::{dag_levels, dm_decompose, DmDecomposition};
use flow::{max_flow, TransportFlow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalabilityLabel {
    NotScalable,
    AsymptoticallyScalable,
    ExactlyScalable,
    Positive,
}

impl ScalabilityLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            ScalabilityLabel::Positive => "positive",
            ScalabilityLabel::ExactlyScalable => "exactly_scalable",
            ScalabilityLabel::AsymptoticallyScalable => "asymptotically_scalable",
            ScalabilityLabel::NotScalable => "not_scalable",
        }
    }

    /// Whether an instance with this label also carries `weaker`.
    pub fn implies(self, weaker: ScalabilityLabel) -> bool {
        use ScalabilityLabel::NotScalable;
        match (self, weaker) {
            (_, NotScalable) => self == NotScalable,
            (NotScalable, _) => false,
            _ => self >= weaker,
        }
    }

    pub fn is_scalable(self) -> bool {
        self != ScalabilityLabel::NotScalable
    }
}

impl fmt::Display for ScalabilityLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    /// A feasible coupling, one mass per support edge.
    Flow(Vec<(usize, usize, BigRational)>),
    /// Rows whose mass exceeds that of their neighborhood.
    Cut {
        rows: Vec<usize>,
        cols: Vec<usize>,
        row_mass: BigRational,
        col_mass: BigRational,
    },
}

impl Certificate {
    pub fn to_json(&self) -> Value {
        match self {
            Certificate::Flow(flow) => json!({
                "type": "flow",
                "flow": flow
                    .iter()
                    .map(|(i, j, v)| json!([i, j, v.to_string()]))
                    .collect::<Vec<_>>(),
            }),
            Certificate::Cut {
                rows,
                cols,
                row_mass,
                col_mass,
            } => json!({
                "type": "cut",
                "rows": rows,
                "cols": cols,
                "row_mass": row_mass.to_string(),
                "col_mass": col_mass.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalabilityClass {
    pub label: ScalabilityLabel,
    pub certificate: Certificate,
    /// Empty unless the label is `AsymptoticallyScalable`.
    pub forced_zero: Vec<(usize, usize)>,
}

/// A support graph with rational marginals, independent of costs.
#[derive(Debug, Clone)]
pub(crate) struct RationalSupport {
    pub rows: usize,
    pub cols: usize,
    pub edges: Vec<(usize, usize)>,
    pub mu: Vec<BigRational>,
    pub nu: Vec<BigRational>,
}

impl RationalSupport {
    pub fn of(p: &Problem) -> Self {
        let (mu, nu) = rational_marginals(p);
        Self {
            rows: p.rows(),
            cols: p.cols(),
            edges: p.cost().entries().iter().map(|e| (e.i, e.j)).collect(),
            mu,
            nu,
        }
    }

    fn flow(&self) -> TransportFlow {
        max_flow(self.rows, self.cols, &self.edges, &self.mu, &self.nu)
    }

    fn balanced(&self) -> bool {
        let total = |v: &[BigRational]| v.iter().fold(BigRational::zero(), |a, b| a + b);
        total(&self.mu) == total(&self.nu)
    }

    pub fn classify(&self) -> ScalabilityClass {
        let flow = self.flow();
        if !self.balanced() || !flow.saturates() {
            return ScalabilityClass {
                label: ScalabilityLabel::NotScalable,
                certificate: self.cut(&flow),
                forced_zero: Vec::new(),
            };
        }
        let certificate = Certificate::Flow(
            self.edges
                .iter()
                .enumerate()
                .map(|(e, &(i, j))| (i, j, flow.edge_flow(e)))
                .collect(),
        );
        let label = if self.edges.len() == self.rows * self.cols {
            ScalabilityLabel::Positive
        } else {
            let forced = forced_from_flow(&flow);
            if !forced.is_empty() {
                return ScalabilityClass {
                    label: ScalabilityLabel::AsymptoticallyScalable,
                    certificate,
                    forced_zero: forced,
                };
            }
            ScalabilityLabel::ExactlyScalable
        };
        ScalabilityClass {
            label,
            certificate,
            forced_zero: Vec::new(),
        }
    }

    fn cut(&self, flow: &TransportFlow) -> Certificate {
        let rows: Vec<usize> = (0..self.rows).filter(|&i| flow.reachable_rows[i]).collect();
        let mut in_cut = vec![false; self.cols];
        for &(i, j) in &self.edges {
            if flow.reachable_rows[i] {
                in_cut[j] = true;
            }
        }
        let cols: Vec<usize> = (0..self.cols).filter(|&j| in_cut[j]).collect();
        let sum = |idx: &[usize], v: &[BigRational]| {
            idx.iter().fold(BigRational::zero(), |a, &k| a + &v[k])
        };
        let (row_mass, col_mass) = (sum(&rows, &self.mu), sum(&cols, &self.nu));
        if row_mass > col_mass {
            return Certificate::Cut {
                rows,
                cols,
                row_mass,
                col_mass,
            };
        }
        // total masses differ; the mirrored cut lives on the column side
        let all: Vec<usize> = (0..self.rows).collect();
        Certificate::Cut {
            row_mass: sum(&all, &self.mu),
            col_mass: sum(&(0..self.cols).collect::<Vec<_>>(), &self.nu),
            rows: all,
            cols: (0..self.cols).collect(),
        }
    }

    pub fn forced_zero(&self) -> Result<Vec<(usize, usize)>> {
        let flow = self.flow();
        if !self.balanced() || !flow.saturates() {
            return Err(Error::NotScalable);
        }
        Ok(forced_from_flow(&flow))
    }
}

/// Zero-flow edges whose endpoints fall in different strongly connected
/// components of the residual graph restricted to rows and columns.
fn forced_from_flow(flow: &TransportFlow) -> Vec<(usize, usize)> {
    let m = flow.rows;
    let mut g = DiGraph::<(), ()>::with_capacity(m + flow.cols, 2 * flow.edges.len());
    let nodes: Vec<_> = (0..m + flow.cols).map(|_| g.add_node(())).collect();
    for (e, &(i, j)) in flow.edges.iter().enumerate() {
        g.add_edge(nodes[i], nodes[m + j], ());
        if !flow.flow[e].is_zero() {
            g.add_edge(nodes[m + j], nodes[i], ());
        }
    }
    let mut component = vec![0; m + flow.cols];
    for (c, scc) in tarjan_scc(&g).iter().enumerate() {
        for v in scc {
            component[v.index()] = c;
        }
    }
    flow.edges
        .iter()
        .enumerate()
        .filter(|&(e, &(i, j))| flow.flow[e].is_zero() && component[i] != component[m + j])
        .map(|(_, &edge)| edge)
        .collect()
}

/// Strongest label applicable to `p`, with a certificate.
pub fn classify(p: &Problem) -> ScalabilityClass {
    RationalSupport::of(p).classify()
}

/// Support edges carrying zero mass in every feasible coupling, sorted.
pub fn forced_zero_edges(p: &Problem) -> Result<Vec<(usize, usize)>> {
    RationalSupport::of(p).forced_zero()
}

/// The classification report document.
pub fn classification_report(p: &Problem) -> Result<Value> {
    let class = classify(p);
    let mut doc = json!({
        "class": class.label.as_str(),
        "forced_zero_edges": class.forced_zero.iter().map(|&(i, j)| json!([i, j])).collect::<Vec<_>>(),
        "certificate": class.certificate.to_json(),
        "blocks": [],
        "dag_edges": [],
        "levels": [],
        "ell": Value::Null,
    });
    if class.label.is_scalable() {
        let d = dm_decompose(p)?;
        doc["blocks"] = d
            .row_blocks
            .iter()
            .zip(&d.col_blocks)
            .zip(&d.masses)
            .map(|((rows, cols), mass)| json!({"rows": rows, "cols": cols, "mass": mass.to_string()}))
            .collect();
        doc["dag_edges"] = d.dag_edges.iter().map(|&(a, b)| json!([a, b])).collect();
        doc["levels"] = json!(d.levels);
        doc["ell"] = json!(d.ell);
    }
    Ok(doc)
}
