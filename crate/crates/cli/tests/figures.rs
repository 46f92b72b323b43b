//! Exact comparisons with the published dependency graph and proof tree of the
//! leading example. Neither holds: see the notes on each test.

use std::collections::BTreeSet;
use std::time::Duration;

use padp_core::adp::canonical_problem;
use padp_core::parse::parse_ptrs;
use padp_core::processors::dep_graph;
use padp_core::processors::depgraph::labelled_edges;
use padp_core::strategy::{solve, StrategyConfig};
use padp_core::systems;

#[test]
#[ignore = "the published graph omits the self-loop on Q(s(x),s(y),z) -> Q(x,y,z), which any sound estimate must contain"]
fn dependency_graph_is_exactly_the_published_one() {
    let g = dep_graph(&canonical_problem(&parse_ptrs(systems::R1).unwrap()).adps);
    let edges: BTreeSet<(usize, usize)> = labelled_edges(&g, 1).into_iter().flat_map(|(a, bs)| bs.into_iter().map(move |b| (a, b))).collect();
    let figure: BTreeSet<(usize, usize)> = [(2, 3), (3, 3), (1, 4), (1, 5), (4, 5), (5, 4), (1, 6), (4, 6), (5, 6)].into_iter().collect();
    assert_eq!(edges, figure);
}

#[test]
#[ignore = "the strategy tries DG before UR and KP before RP, so the tree differs in shape though not in labels"]
fn proof_tree_is_exactly_the_published_one() {
    let p = canonical_problem(&parse_ptrs(systems::R1).unwrap());
    let tree = solve(&p, &StrategyConfig { timeout: Duration::from_secs(10), ..StrategyConfig::default() }).tree;
    assert_eq!(tree.processor_sequence(), ["UR[Pol_0]", "DG(2)", "RP[Pol_0]", "RP[Pol_1]", "KP[Pol_0]"]);
}
