//! Seeded instance generators.
//!
//! Marginals are always built from small integer weights, so they snap back
//! to the intended rationals exactly.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::problem::{CostMatrix, Edge, Problem};
use crate::structure::{classify, ScalabilityLabel};

/// Attempts made by the exact generator before giving up.
pub const MAX_ATTEMPTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GenKind {
    Positive,
    Exact,
    Asymptotic,
    Soules,
}

impl GenKind {
    pub const ALL: [GenKind; 4] = [
        GenKind::Positive,
        GenKind::Exact,
        GenKind::Asymptotic,
        GenKind::Soules,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GenKind::Positive => "positive",
            GenKind::Exact => "exact",
            GenKind::Asymptotic => "asymptotic",
            GenKind::Soules => "soules",
        }
    }

    /// Label the classifier must return for instances of this kind.
    pub fn expected_label(self) -> ScalabilityLabel {
        match self {
            GenKind::Positive => ScalabilityLabel::Positive,
            GenKind::Exact => ScalabilityLabel::ExactlyScalable,
            GenKind::Asymptotic | GenKind::Soules => ScalabilityLabel::AsymptoticallyScalable,
        }
    }
}

impl std::str::FromStr for GenKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GenKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::OutOfRange(format!("unknown instance kind {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub m: usize,
    pub n: usize,
    /// Number of chained blocks; asymptotic kind only.
    pub depth: usize,
    pub seed: u64,
    pub tau: f64,
    /// Costs are drawn uniformly from `[0, cost_scale]`.
    pub cost_scale: f64,
}

impl Default for GenSpec {
    fn default() -> Self {
        Self {
            kind: GenKind::Positive,
            m: 4,
            n: 4,
            depth: 2,
            seed: 0,
            tau: 1.0,
            cost_scale: 1.0,
        }
    }
}

impl GenSpec {
    pub fn new(kind: GenKind, m: usize, n: usize, seed: u64) -> Self {
        Self {
            kind,
            m,
            n,
            seed,
            ..Self::default()
        }
    }

    pub fn chain(depth: usize, m: usize, n: usize, seed: u64) -> Self {
        Self {
            kind: GenKind::Asymptotic,
            m,
            n,
            depth,
            seed,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::OutOfRange(msg));
        if self.m == 0 || self.n == 0 {
            return bad(format!("sizes must be positive, got {}x{}", self.m, self.n));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if !(self.cost_scale >= 0.0 && self.cost_scale.is_finite()) {
            return bad(format!("cost scale must be nonnegative, got {}", self.cost_scale));
        }
        match self.kind {
            GenKind::Exact if self.m < 2 || self.n < 2 => {
                bad("the exact kind needs at least 2 rows and 2 columns".into())
            }
            GenKind::Asymptotic if self.depth < 2 => {
                bad(format!("depth must be at least 2, got {}", self.depth))
            }
            GenKind::Asymptotic if self.m < self.depth || self.n < self.depth => bad(format!(
                "a chain of depth {} needs at least that many rows and columns",
                self.depth
            )),
            _ => Ok(()),
        }
    }
}

/// Block structure planted by the asymptotic generator, in chain order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Planted {
    pub row_blocks: Vec<Vec<usize>>,
    pub col_blocks: Vec<Vec<usize>>,
    pub ell: usize,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub problem: Problem,
    /// Draws needed before the instance passed verification.
    pub attempts: usize,
    pub planted: Option<Planted>,
}

pub fn gen_instance(spec: &GenSpec) -> Result<Problem> {
    generate(spec).map(|g| g.problem)
}

/// Like [`gen_instance`], also reporting retries and planted structure.
pub fn generate(spec: &GenSpec) -> Result<Generated> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        GenKind::Soules => Ok(Generated {
            problem: soules(),
            attempts: 1,
            planted: None,
        }),
        GenKind::Positive => Ok(Generated {
            problem: positive(spec, &mut rng),
            attempts: 1,
            planted: None,
        }),
        GenKind::Exact => {
            for attempt in 1..=MAX_ATTEMPTS {
                let p = exact(spec, &mut rng)?;
                if classify(&p).label == ScalabilityLabel::ExactlyScalable {
                    return Ok(Generated {
                        problem: p,
                        attempts: attempt,
                        planted: None,
                    });
                }
            }
            Err(Error::RetryLimit(MAX_ATTEMPTS))
        }
        GenKind::Asymptotic => {
            let (problem, planted) = chain(spec, &mut rng)?;
            Ok(Generated {
                problem,
                attempts: 1,
                planted: Some(planted),
            })
        }
    }
}

/// The 2x2 instance with kernel `[[1, 1], [0, 1]]`: `mu = nu = (1/2, 1/2)`,
/// `tau = 1`, `C = -ln 4` on the three stored entries.
pub fn soules() -> Problem {
    let c = -(4f64.ln());
    let entries = vec![
        Edge { i: 0, j: 0, c },
        Edge { i: 0, j: 1, c },
        Edge { i: 1, j: 1, c },
    ];
    let cost = CostMatrix::new(2, 2, entries).expect("static instance");
    Problem::new(vec![0.5, 0.5], vec![0.5, 0.5], 1.0, cost).expect("static instance")
}

fn weights(rng: &mut ChaCha8Rng, len: usize) -> Vec<u64> {
    (0..len).map(|_| rng.gen_range(1..=9)).collect()
}

fn normalize(w: &[u64], mass: f64) -> Vec<f64> {
    let total: u64 = w.iter().sum();
    w.iter().map(|&x| x as f64 / total as f64 * mass).collect()
}

fn cost(rng: &mut ChaCha8Rng, scale: f64) -> f64 {
    rng.gen::<f64>() * scale
}

fn positive(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Problem {
    let mu = normalize(&weights(rng, spec.m), 1.0);
    let nu = normalize(&weights(rng, spec.n), 1.0);
    let mut entries = Vec::with_capacity(spec.m * spec.n);
    for i in 0..spec.m {
        for j in 0..spec.n {
            entries.push(Edge {
                i,
                j,
                c: cost(rng, spec.cost_scale),
            });
        }
    }
    let cost = CostMatrix::new(spec.m, spec.n, entries).expect("indices in range");
    Problem::new(mu, nu, spec.tau, cost).expect("shapes agree")
}

/// Connected support on `m x n`, not full when both sides have at least two
/// vertices. Returns edges as `(row, col)` pairs.
fn connected_support(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<(usize, usize)> {
    // random spanning tree: attach vertices one at a time to the opposite side
    let mut order: Vec<usize> = (0..m + n).collect();
    order.shuffle(rng);
    // start from one row and one column joined together
    let r0 = *order.iter().find(|&&v| v < m).expect("m >= 1");
    let c0 = *order.iter().find(|&&v| v >= m).expect("n >= 1");
    let mut rows_in = vec![r0];
    let mut cols_in = vec![c0 - m];
    let mut edges = vec![(r0, c0 - m)];
    for &v in &order {
        if v == r0 || v == c0 {
            continue;
        }
        if v < m {
            let j = *cols_in.choose(rng).expect("nonempty");
            edges.push((v, j));
            rows_in.push(v);
        } else {
            let i = *rows_in.choose(rng).expect("nonempty");
            edges.push((i, v - m));
            cols_in.push(v - m);
        }
    }
    let mut present = vec![false; m * n];
    for &(i, j) in &edges {
        present[i * n + j] = true;
    }
    let mut missing: Vec<usize> = (0..m * n).filter(|&x| !present[x]).collect();
    missing.shuffle(rng);
    // keep at least one cell empty so the support is never full
    let extra = if missing.len() > 1 {
        rng.gen_range(0..missing.len())
    } else {
        0
    };
    for &x in &missing[..extra] {
        edges.push((x / n, x % n));
    }
    edges.sort_unstable();
    edges
}

/// Marginals of a positive coupling with integer weights on `edges`, scaled
/// to total `mass`. Such marginals make the support exactly scalable.
fn witness_marginals(
    rng: &mut ChaCha8Rng,
    m: usize,
    n: usize,
    edges: &[(usize, usize)],
    mass: f64,
) -> (Vec<f64>, Vec<f64>) {
    let w = weights(rng, edges.len());
    let mut row = vec![0u64; m];
    let mut col = vec![0u64; n];
    for (&(i, j), &x) in edges.iter().zip(&w) {
        row[i] += x;
        col[j] += x;
    }
    (normalize(&row, mass), normalize(&col, mass))
}

fn exact(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<Problem> {
    let support = connected_support(rng, spec.m, spec.n);
    let (mu, nu) = witness_marginals(rng, spec.m, spec.n, &support, 1.0);
    let entries = support
        .into_iter()
        .map(|(i, j)| Edge {
            i,
            j,
            c: cost(rng, spec.cost_scale),
        })
        .collect();
    Problem::new(mu, nu, spec.tau, CostMatrix::new(spec.m, spec.n, entries)?)
}

/// Splits `total` into `parts` positive sizes.
fn split_sizes(rng: &mut ChaCha8Rng, total: usize, parts: usize) -> Vec<usize> {
    let mut sizes = vec![1; parts];
    for _ in parts..total {
        sizes[rng.gen_range(0..parts)] += 1;
    }
    sizes
}

fn chain(spec: &GenSpec, rng: &mut ChaCha8Rng) -> Result<(Problem, Planted)> {
    let depth = spec.depth;
    let row_sizes = split_sizes(rng, spec.m, depth);
    let col_sizes = split_sizes(rng, spec.n, depth);
    let mut row_perm: Vec<usize> = (0..spec.m).collect();
    let mut col_perm: Vec<usize> = (0..spec.n).collect();
    row_perm.shuffle(rng);
    col_perm.shuffle(rng);

    let mass = 1.0 / depth as f64;
    let mut mu = vec![0.0; spec.m];
    let mut nu = vec![0.0; spec.n];
    let mut entries = Vec::new();
    let mut row_blocks = Vec::with_capacity(depth);
    let mut col_blocks = Vec::with_capacity(depth);
    let (mut r, mut c) = (0, 0);
    for b in 0..depth {
        let rows = row_perm[r..r + row_sizes[b]].to_vec();
        let cols = col_perm[c..c + col_sizes[b]].to_vec();
        r += row_sizes[b];
        c += col_sizes[b];
        let (ms, ns) = (rows.len(), cols.len());
        // a 1 x k or k x 1 block must be full to stay connected
        let support = if ms >= 2 && ns >= 2 {
            connected_support(rng, ms, ns)
        } else {
            (0..ms).flat_map(|i| (0..ns).map(move |j| (i, j))).collect()
        };
        let (bmu, bnu) = witness_marginals(rng, ms, ns, &support, mass);
        for (a, &i) in rows.iter().enumerate() {
            mu[i] = bmu[a];
        }
        for (a, &j) in cols.iter().enumerate() {
            nu[j] = bnu[a];
        }
        for (a, b) in support {
            entries.push(Edge {
                i: rows[a],
                j: cols[b],
                c: cost(rng, spec.cost_scale),
            });
        }
        row_blocks.push(rows);
        col_blocks.push(cols);
    }
    for b in 0..depth - 1 {
        let links = rng.gen_range(1..=2.min(row_blocks[b].len() * col_blocks[b + 1].len()));
        let mut pairs: Vec<(usize, usize)> = row_blocks[b]
            .iter()
            .flat_map(|&i| col_blocks[b + 1].iter().map(move |&j| (i, j)))
            .collect();
        pairs.shuffle(rng);
        for &(i, j) in &pairs[..links] {
            entries.push(Edge {
                i,
                j,
                c: cost(rng, spec.cost_scale),
            });
        }
    }
    let cost = CostMatrix::new(spec.m, spec.n, entries)?;
    let problem = Problem::new(mu, nu, spec.tau, cost)?;
    for blocks in [&mut row_blocks, &mut col_blocks] {
        for block in blocks.iter_mut() {
            block.sort_unstable();
        }
    }
    Ok((
        problem,
        Planted {
            row_blocks,
            col_blocks,
            ell: depth - 1,
        },
    ))
}
