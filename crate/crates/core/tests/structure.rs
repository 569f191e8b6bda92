mod support;

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use eot_core::generate::{generate, GenKind, GenSpec};
use eot_core::problem::rational_marginals;
use eot_core::structure::{classify, dag_levels, dm_decompose, forced_zero_edges, ScalabilityLabel};
use eot_core::Problem;

use support::{arb_feasible, arb_problem, edges, polytope_oracle};

const LABELS: [ScalabilityLabel; 4] = [
    ScalabilityLabel::NotScalable,
    ScalabilityLabel::AsymptoticallyScalable,
    ScalabilityLabel::ExactlyScalable,
    ScalabilityLabel::Positive,
];

fn check_against_oracle(p: &Problem) -> Result<(), TestCaseError> {
    let oracle = polytope_oracle(p);
    let label = classify(p).label;
    prop_assert_eq!(label.is_scalable(), oracle.feasible);
    if !oracle.feasible {
        prop_assert!(forced_zero_edges(p).is_err());
        return Ok(());
    }
    let forced = forced_zero_edges(p).unwrap();
    prop_assert_eq!(&forced, &oracle.forced_zero);
    let expected = if !forced.is_empty() {
        ScalabilityLabel::AsymptoticallyScalable
    } else if p.cost().is_full() {
        ScalabilityLabel::Positive
    } else {
        ScalabilityLabel::ExactlyScalable
    };
    prop_assert_eq!(label, expected);
    Ok(())
}

fn check_decomposition(p: &Problem) -> Result<(), TestCaseError> {
    let d = dm_decompose(p).unwrap();
    let (mu, nu) = rational_marginals(p);
    let forced: BTreeSet<_> = d.forced_zero.iter().copied().collect();
    let edge_set: BTreeSet<(usize, usize)> = d.dag_edges.iter().copied().collect();
    for (i, j) in edges(p) {
        let (a, b) = (d.row_block[i], d.col_block[j]);
        if a == b {
            prop_assert!(!forced.contains(&(i, j)));
        } else {
            prop_assert!(forced.contains(&(i, j)), "cross edge ({i}, {j}) not forced");
            prop_assert!(edge_set.contains(&(a, b)));
            prop_assert!(d.levels[b] > d.levels[a]);
            prop_assert!(a < b, "blocks are numbered topologically");
        }
    }
    let (levels, ell) = dag_levels(&d).unwrap();
    prop_assert_eq!(&levels, &d.levels);
    prop_assert_eq!(ell, d.ell);
    for b in 0..d.block_count() {
        let rm = d.row_blocks[b].iter().fold(BigRational::zero(), |s, &i| s + &mu[i]);
        let cm = d.col_blocks[b].iter().fold(BigRational::zero(), |s, &j| s + &nu[j]);
        prop_assert_eq!(&rm, &cm);
        prop_assert_eq!(&rm, &d.masses[b]);
        let rows = d.row_blocks[b].clone();
        let cols = d.col_blocks[b].clone();
        let sub = p.restrict(&rows, &cols, d.mass_f64(b)).unwrap();
        prop_assert!(classify(&sub).label.implies(ScalabilityLabel::ExactlyScalable));
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn classifier_matches_vertex_enumeration(p in arb_feasible(4)) {
        check_against_oracle(&p)?;
    }

    #[test]
    fn classifier_matches_on_random_marginals(p in arb_problem(4)) {
        check_against_oracle(&p)?;
    }

    #[test]
    fn decomposition_is_consistent(p in arb_feasible(6)) {
        check_decomposition(&p)?;
    }

    #[test]
    fn planted_chain_is_recovered(depth in 2usize..5, extra in 0usize..4, seed in 0u64..1000) {
        let (m, n) = (depth + extra, depth + extra / 2 + 1);
        let g = generate(&GenSpec::chain(depth, m, n, seed)).unwrap();
        let planted = g.planted.unwrap();
        let d = dm_decompose(&g.problem).unwrap();
        prop_assert_eq!(&d.row_blocks, &planted.row_blocks);
        prop_assert_eq!(&d.col_blocks, &planted.col_blocks);
        prop_assert_eq!(d.ell, planted.ell);
        check_decomposition(&g.problem)?;
    }
}

#[test]
fn implication_chain_is_monotone() {
    for (a, &x) in LABELS.iter().enumerate() {
        for (b, &y) in LABELS.iter().enumerate() {
            let expected = if x == ScalabilityLabel::NotScalable {
                y == x
            } else {
                a >= b && y != ScalabilityLabel::NotScalable || a == b
            };
            assert_eq!(x.implies(y), expected, "{x} => {y}");
        }
    }
}

#[test]
fn generated_kinds_classify_as_declared() {
    for kind in [GenKind::Positive, GenKind::Exact, GenKind::Asymptotic] {
        for seed in 0..40 {
            let spec = GenSpec { depth: 2 + seed as usize % 2, ..GenSpec::new(kind, 3, 4, seed) };
            let p = generate(&spec).unwrap().problem;
            let label = classify(&p).label;
            assert_eq!(label, kind.expected_label(), "{} seed {seed}", kind.as_str());
            if edges(&p).len() <= 16 {
                check_against_oracle(&p).unwrap();
            }
        }
    }
}
