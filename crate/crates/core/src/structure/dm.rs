use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use num_rational::BigRational;
use num_traits::Zero;
use petgraph::unionfind::UnionFind;

use super::{RationalSupport, ScalabilityLabel};
use crate::error::{Error, Result};
use crate::problem::Problem;

/// Blocks are numbered in a topological order of the DAG; ties go to the
/// block holding the smallest row index.
#[derive(Debug, Clone, PartialEq)]
pub struct DmDecomposition {
    pub row_blocks: Vec<Vec<usize>>,
    pub col_blocks: Vec<Vec<usize>>,
    /// `(p, q)` whenever some support edge joins a row of `p` to a column
    /// of `q != p`.
    pub dag_edges: Vec<(usize, usize)>,
    /// Longest path, in edges, ending at each block.
    pub levels: Vec<usize>,
    pub ell: usize,
    /// `mu(I_p) = nu(J_p)`.
    pub masses: Vec<BigRational>,
    pub forced_zero: Vec<(usize, usize)>,
    pub row_block: Vec<usize>,
    pub col_block: Vec<usize>,
}

impl DmDecomposition {
    pub fn block_count(&self) -> usize {
        self.row_blocks.len()
    }

    pub fn mass_f64(&self, p: usize) -> f64 {
        crate::problem::ratio_to_f64(&self.masses[p])
    }
}

/// Kahn's algorithm with a caller-supplied priority, smallest first.
fn topological_order(count: usize, edges: &[(usize, usize)], key: &[usize]) -> Result<Vec<usize>> {
    let mut indeg = vec![0usize; count];
    let mut out = vec![Vec::new(); count];
    for &(a, b) in edges {
        out[a].push(b);
        indeg[b] += 1;
    }
    let mut ready: BinaryHeap<Reverse<(usize, usize)>> = (0..count)
        .filter(|&v| indeg[v] == 0)
        .map(|v| Reverse((key[v], v)))
        .collect();
    let mut order = Vec::with_capacity(count);
    while let Some(Reverse((_, v))) = ready.pop() {
        order.push(v);
        for &w in &out[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.push(Reverse((key[w], w)));
            }
        }
    }
    if order.len() == count {
        Ok(order)
    } else {
        Err(Error::Cycle)
    }
}

fn longest_paths(count: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>> {
    let order = topological_order(count, edges, &(0..count).collect::<Vec<_>>())?;
    let mut out = vec![Vec::new(); count];
    for &(a, b) in edges {
        out[a].push(b);
    }
    let mut level = vec![0usize; count];
    for v in order {
        for &w in &out[v] {
            level[w] = level[w].max(level[v] + 1);
        }
    }
    Ok(level)
}

/// Levels `ell_p` and the diameter `ell = max_p ell_p`.
pub fn dag_levels(d: &DmDecomposition) -> Result<(Vec<usize>, usize)> {
    let levels = longest_paths(d.block_count(), &d.dag_edges)?;
    let ell = levels.iter().copied().max().unwrap_or(0);
    Ok((levels, ell))
}

pub fn dm_decompose(p: &Problem) -> Result<DmDecomposition> {
    decompose(&RationalSupport::of(p))
}

pub(crate) fn decompose(s: &RationalSupport) -> Result<DmDecomposition> {
    let forced = s.forced_zero()?;
    let (m, n) = (s.rows, s.cols);
    let forced_set: BTreeSet<(usize, usize)> = forced.iter().copied().collect();

    let mut uf = UnionFind::<usize>::new(m + n);
    for &(i, j) in &s.edges {
        if !forced_set.contains(&(i, j)) {
            uf.union(i, m + j);
        }
    }
    // provisional ids in order of first appearance over rows, then columns
    let mut id_of_root = vec![usize::MAX; m + n];
    let mut root_count = 0;
    let provisional: Vec<usize> = (0..m + n)
        .map(|v| {
            let r = uf.find(v);
            if id_of_root[r] == usize::MAX {
                id_of_root[r] = root_count;
                root_count += 1;
            }
            id_of_root[r]
        })
        .collect();
    let mut min_row = vec![usize::MAX; root_count];
    for i in (0..m).rev() {
        min_row[provisional[i]] = i;
    }
    if min_row.contains(&usize::MAX) {
        return Err(Error::Consistency("a block has no rows".into()));
    }

    let mut cross = BTreeSet::new();
    for &(i, j) in &forced {
        let (a, b) = (provisional[i], provisional[m + j]);
        if a == b {
            return Err(Error::Consistency(format!(
                "forced-zero edge ({i}, {j}) lies inside a block"
            )));
        }
        cross.insert((a, b));
    }
    let cross: Vec<(usize, usize)> = cross.into_iter().collect();
    let order = topological_order(root_count, &cross, &min_row)?;
    let mut rank = vec![0; root_count];
    for (r, &b) in order.iter().enumerate() {
        rank[b] = r;
    }

    let row_block: Vec<usize> = (0..m).map(|i| rank[provisional[i]]).collect();
    let col_block: Vec<usize> = (0..n).map(|j| rank[provisional[m + j]]).collect();
    let mut row_blocks = vec![Vec::new(); root_count];
    let mut col_blocks = vec![Vec::new(); root_count];
    for i in 0..m {
        row_blocks[row_block[i]].push(i);
    }
    for j in 0..n {
        col_blocks[col_block[j]].push(j);
    }
    if col_blocks.iter().any(Vec::is_empty) {
        return Err(Error::Consistency("a block has no columns".into()));
    }
    let mut dag_edges: Vec<(usize, usize)> = cross.iter().map(|&(a, b)| (rank[a], rank[b])).collect();
    dag_edges.sort_unstable();

    let mut masses = Vec::with_capacity(root_count);
    for b in 0..root_count {
        let mass = row_blocks[b].iter().fold(BigRational::zero(), |a, &i| a + &s.mu[i]);
        let col_mass = col_blocks[b].iter().fold(BigRational::zero(), |a, &j| a + &s.nu[j]);
        if mass != col_mass {
            return Err(Error::Consistency(format!(
                "block {b} has row mass {mass} but column mass {col_mass}"
            )));
        }
        check_block(s, &row_blocks[b], &col_blocks[b], &mass, b)?;
        masses.push(mass);
    }

    let levels = longest_paths(root_count, &dag_edges)?;
    let ell = levels.iter().copied().max().unwrap_or(0);
    Ok(DmDecomposition {
        row_blocks,
        col_blocks,
        dag_edges,
        levels,
        ell,
        masses,
        forced_zero: forced,
        row_block,
        col_block,
    })
}

fn check_block(
    s: &RationalSupport,
    rows: &[usize],
    cols: &[usize],
    mass: &BigRational,
    b: usize,
) -> Result<()> {
    let sub = restrict(s, rows, cols, mass);
    let label = sub.classify().label;
    if label >= ScalabilityLabel::ExactlyScalable {
        Ok(())
    } else {
        Err(Error::Consistency(format!("block {b} is {label}, not exactly scalable")))
    }
}

/// The sub-support on `rows x cols` with marginals divided by `mass`.
pub(crate) fn restrict(
    s: &RationalSupport,
    rows: &[usize],
    cols: &[usize],
    mass: &BigRational,
) -> RationalSupport {
    let mut row_pos = vec![usize::MAX; s.rows];
    let mut col_pos = vec![usize::MAX; s.cols];
    for (a, &i) in rows.iter().enumerate() {
        row_pos[i] = a;
    }
    for (a, &j) in cols.iter().enumerate() {
        col_pos[j] = a;
    }
    RationalSupport {
        rows: rows.len(),
        cols: cols.len(),
        edges: s
            .edges
            .iter()
            .filter(|&&(i, j)| row_pos[i] != usize::MAX && col_pos[j] != usize::MAX)
            .map(|&(i, j)| (row_pos[i], col_pos[j]))
            .collect(),
        mu: rows.iter().map(|&i| &s.mu[i] / mass).collect(),
        nu: cols.iter().map(|&j| &s.nu[j] / mass).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GenSpec};
    use crate::testing::{soules, uniform_square};

    #[test]
    fn soules_blocks() {
        let d = dm_decompose(&soules()).unwrap();
        assert_eq!(d.row_blocks, vec![vec![0], vec![1]]);
        assert_eq!(d.col_blocks, vec![vec![0], vec![1]]);
        assert_eq!(d.dag_edges, vec![(0, 1)]);
        assert_eq!((d.levels.clone(), d.ell), (vec![0, 1], 1));
        assert_eq!(dag_levels(&d).unwrap(), (vec![0, 1], 1));
    }

    #[test]
    fn exact_instance_is_one_block() {
        let d = dm_decompose(&uniform_square(3)).unwrap();
        assert_eq!(d.block_count(), 1);
        assert!(d.dag_edges.is_empty());
        assert_eq!(d.ell, 0);
        assert_eq!(d.masses[0], BigRational::from_integer(1.into()));
    }

    #[test]
    fn recovers_planted_chain() {
        for seed in 0..10 {
            let g = generate(&GenSpec::chain(3, 6, 5, seed)).unwrap();
            let planted = g.planted.unwrap();
            let d = dm_decompose(&g.problem).unwrap();
            assert_eq!(d.row_blocks, planted.row_blocks);
            assert_eq!(d.col_blocks, planted.col_blocks);
            assert_eq!(d.dag_edges, vec![(0, 1), (1, 2)]);
            assert_eq!(d.levels, vec![0, 1, 2]);
            assert_eq!(d.ell, 2);
        }
    }

    #[test]
    fn levels_of_hand_built_dags() {
        let mut d = dm_decompose(&soules()).unwrap();
        d.row_blocks = vec![vec![]; 3];
        d.dag_edges = vec![(0, 1), (1, 2)];
        assert_eq!(dag_levels(&d).unwrap(), (vec![0, 1, 2], 2));
        d.dag_edges = vec![(0, 2), (1, 2), (0, 1)];
        assert_eq!(dag_levels(&d).unwrap(), (vec![0, 1, 2], 2));
        d.dag_edges = vec![(0, 1), (1, 2), (2, 0)];
        assert!(matches!(dag_levels(&d), Err(Error::Cycle)));
        d.row_blocks = vec![vec![]];
        d.dag_edges = vec![];
        assert_eq!(dag_levels(&d).unwrap(), (vec![0], 0));
    }
}
