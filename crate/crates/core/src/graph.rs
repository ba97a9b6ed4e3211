//! Reaction graph: linkage classes, weak reversibility and the reactant polytope.

use petgraph::algo::{kosaraju_scc, tarjan_scc};
use petgraph::graph::{DiGraph, NodeIndex, UnGraph};
use num::One;
use thiserror::Error;

use crate::geometry::linalg::{row_space_basis, sub, Q};
use crate::geometry::lp::{feasible_point, LinearConstraint, Relation};
use crate::network::ReactionNetwork;

#[derive(Debug, Clone, PartialEq)]
pub struct LinkageClass {
    /// Complex indices, ascending.
    pub complexes: Vec<usize>,
    /// Reaction indices whose source lies in this class.
    pub reactions: Vec<usize>,
    pub strongly_connected: bool,
    /// Exact basis of the span of this class's reaction vectors.
    pub subspace_basis: Vec<Vec<Q>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkageAnalysis {
    pub classes: Vec<LinkageClass>,
    pub weakly_reversible: bool,
}

/// Undirected components of the reaction graph. Each class is checked for
/// strong connectivity as a digraph.
pub fn linkage_classes(net: &ReactionNetwork) -> LinkageAnalysis {
    let nc = net.complexes().len();
    let mut und = UnGraph::<(), ()>::with_capacity(nc, net.reactions().len());
    let mut dir = DiGraph::<(), ()>::with_capacity(nc, net.reactions().len());
    for _ in 0..nc {
        und.add_node(());
        dir.add_node(());
    }
    for r in net.reactions() {
        und.add_edge(NodeIndex::new(r.source), NodeIndex::new(r.target), ());
        dir.add_edge(NodeIndex::new(r.source), NodeIndex::new(r.target), ());
    }
    let mut comps: Vec<Vec<usize>> =
        kosaraju_scc(&und).into_iter().map(|c| c.into_iter().map(|n| n.index()).collect()).collect();
    for c in &mut comps {
        c.sort_unstable();
    }
    comps.sort();
    let mut scc_id = vec![0usize; nc];
    for (k, c) in tarjan_scc(&dir).into_iter().enumerate() {
        for n in c {
            scc_id[n.index()] = k;
        }
    }
    let n = net.n_species();
    let classes: Vec<LinkageClass> = comps
        .into_iter()
        .map(|complexes| {
            let reactions: Vec<usize> =
                (0..net.reactions().len()).filter(|&r| complexes.contains(&net.reactions()[r].source)).collect();
            let vectors: Vec<Vec<Q>> = reactions.iter().map(|&r| net.reaction_vector(r)).collect();
            let strongly_connected = complexes.iter().all(|&c| scc_id[c] == scc_id[complexes[0]]);
            LinkageClass { subspace_basis: row_space_basis(&vectors, n), complexes, reactions, strongly_connected }
        })
        .collect();
    let weakly_reversible = classes.iter().all(|c| c.strongly_connected);
    LinkageAnalysis { classes, weakly_reversible }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolytopeError {
    #[error("network has no reactions")]
    NoReactions,
}

/// Source complexes (as complex indices) that are vertices of the reactant
/// polytope. A point is a vertex iff it is not a convex combination of the
/// other distinct sources, decided by an exact LP.
pub fn reactant_polytope_vertices(net: &ReactionNetwork) -> Result<Vec<usize>, PolytopeError> {
    let sources = net.source_complexes();
    if sources.is_empty() {
        return Err(PolytopeError::NoReactions);
    }
    let points: Vec<&[Q]> = sources.iter().map(|&c| net.complexes()[c].coeffs()).collect();
    let n = net.n_species();
    let mut out = Vec::new();
    for (k, &c) in sources.iter().enumerate() {
        let others: Vec<&[Q]> = points.iter().enumerate().filter(|(j, _)| *j != k).map(|(_, p)| *p).collect();
        if others.is_empty() || !in_convex_hull(points[k], &others, n) {
            out.push(c);
        }
    }
    out.sort_unstable();
    Ok(out)
}

fn in_convex_hull(p: &[Q], others: &[&[Q]], n: usize) -> bool {
    let m = others.len();
    let mut cons = Vec::with_capacity(n + 1 + m);
    for i in 0..n {
        let coeffs: Vec<Q> = others.iter().map(|y| y[i].clone()).collect();
        cons.push(LinearConstraint::new(coeffs, Relation::Eq, p[i].clone()));
    }
    cons.push(LinearConstraint::new(vec![Q::one(); m], Relation::Eq, Q::one()));
    for j in 0..m {
        let mut e = vec![Q::from_integer(0.into()); m];
        e[j] = Q::one();
        cons.push(LinearConstraint::new(e, Relation::Ge, Q::from_integer(0.into())));
    }
    feasible_point(m, &cons).is_some()
}

/// Reaction vectors of `net` relative to a subset of reactions.
pub fn class_vectors(net: &ReactionNetwork, reactions: &[usize]) -> Vec<Vec<Q>> {
    reactions.iter().map(|&r| sub(net.target(r).coeffs(), net.source(r).coeffs())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::linalg::rank;
    use crate::parse::parse_network;
    use crate::stoich::stoichiometric_subspace;

    fn net(text: &str) -> ReactionNetwork {
        parse_network(text).unwrap().network
    }

    #[test]
    fn two_classes_not_weakly_reversible() {
        let a = linkage_classes(&net("2A <-> A + B\nB -> 0\n0 -> 2B"));
        assert_eq!(a.classes.len(), 2);
        assert!(!a.weakly_reversible);
    }

    #[test]
    fn cycle_plus_reversible_pair() {
        let a = linkage_classes(&net("A -> B\nB -> C\nC -> A\n2A <-> 3B"));
        assert_eq!(a.classes.len(), 2);
        assert!(a.weakly_reversible);
    }

    #[test]
    fn single_irreversible_reaction() {
        let a = linkage_classes(&net("A -> B"));
        assert_eq!(a.classes.len(), 1);
        assert!(!a.weakly_reversible);
    }

    #[test]
    fn isolated_complex_is_its_own_class() {
        let a = linkage_classes(&net("A <-> B\n2A"));
        assert_eq!(a.classes.len(), 2);
        assert!(a.weakly_reversible);
    }

    #[test]
    fn class_subspaces_span_h() {
        let n = net("A -> B\nB -> C\nC -> A\n2A <-> 3B");
        let a = linkage_classes(&n);
        let all: Vec<Vec<Q>> = a.classes.iter().flat_map(|c| c.subspace_basis.clone()).collect();
        assert_eq!(rank(&all, 3), stoichiometric_subspace(&n).dimension);
    }

    #[test]
    fn polytope_of_strong_non_reversible_example() {
        let n = net("0 -> 3A + B\n2A -> B\n2B -> A + B");
        let v = reactant_polytope_vertices(&n).unwrap();
        let coords: Vec<Vec<Q>> = v.iter().map(|&c| n.complexes()[c].coeffs().to_vec()).collect();
        let expect = [[0, 0], [2, 0], [0, 2]];
        assert_eq!(coords.len(), 3);
        for e in expect {
            assert!(coords.contains(&crate::geometry::linalg::qvec(&e)));
        }
    }

    #[test]
    fn polytope_drops_interior_and_edge_points() {
        let n = net("0 -> A\n2A -> 0\n2B -> 0\nA -> B\nA + B -> 0");
        let v = reactant_polytope_vertices(&n).unwrap();
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn polytope_single_source() {
        let n = net("A -> B\nA -> 2B");
        assert_eq!(reactant_polytope_vertices(&n).unwrap().len(), 1);
    }

    #[test]
    fn polytope_requires_reactions() {
        let n = net("species: A\nA");
        assert_eq!(reactant_polytope_vertices(&n), Err(PolytopeError::NoReactions));
    }
}
