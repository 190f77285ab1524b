//! Edge orientations with capped out-degree and a large set of sinks.
//!
//! `balanced_orientation` orients every edge of a graph of maximum degree
//! `D` so that no vertex sends out more than `floor(D/2) + 1` arcs, while a
//! set of at least `n / (D^2 + 1)` vertices sends out none at all. The
//! sinks are a greedy independent set of the square of the graph; the rest
//! of the graph is oriented along Eulerian circuits after pairing odd
//! degrees through an auxiliary vertex.

use crate::graph::{greedy_independent_set, square, Graph};

/// A direction assignment for every edge of an underlying graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orientation {
    n: usize,
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
    arc_count: usize,
}

impl Orientation {
    /// Builds an orientation from explicit arcs `(u, v)` meaning `u -> v`.
    pub fn from_arc_list(n: usize, arcs: &[(u32, u32)]) -> Self {
        Self::from_arcs(n, arcs)
    }

    fn from_arcs(n: usize, arcs: &[(u32, u32)]) -> Self {
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(u, v) in arcs {
            out[u as usize].push(v);
            inn[v as usize].push(u);
        }
        for list in out.iter_mut().chain(inn.iter_mut()) {
            list.sort_unstable();
        }
        Self {
            n,
            out,
            inn,
            arc_count: arcs.len(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arc_count
    }

    #[inline]
    pub fn out_neighbors(&self, v: u32) -> &[u32] {
        &self.out[v as usize]
    }

    #[inline]
    pub fn in_neighbors(&self, v: u32) -> &[u32] {
        &self.inn[v as usize]
    }

    #[inline]
    pub fn out_degree(&self, v: u32) -> usize {
        self.out[v as usize].len()
    }

    /// All arcs `(u, v)` meaning `u -> v`, grouped by tail.
    pub fn arcs(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n as u32)
            .flat_map(move |u| self.out[u as usize].iter().map(move |&v| (u, v)))
    }

    /// Out-degree demands per vertex, indexed by vertex.
    pub fn out_degrees(&self) -> Vec<usize> {
        (0..self.n as u32).map(|v| self.out_degree(v)).collect()
    }
}

/// Orients all edges of `h`. Returns the orientation and the sink set
/// (ascending), every member of which has out-degree zero.
///
/// Guarantees: out-degree <= floor(max_degree/2) + 1 everywhere, and the
/// sink set has at least `n / (max_degree^2 + 1)` vertices.
pub fn balanced_orientation(h: &Graph) -> (Orientation, Vec<u32>) {
    let n = h.n();
    let sinks = greedy_independent_set(&square(h));
    let mut is_sink = vec![false; n];
    for &s in &sinks {
        is_sink[s as usize] = true;
    }

    let mut arcs: Vec<(u32, u32)> = Vec::with_capacity(h.edge_count());

    // Edges touching a sink all point into the sink. Since sinks are
    // independent in the square, no edge joins two sinks and no vertex has
    // two sink neighbors.
    for &s in &sinks {
        for &u in h.neighbors(s) {
            debug_assert!(!is_sink[u as usize]);
            arcs.push((u, s));
        }
    }

    // Remaining edges (both endpoints non-sink) get Eulerian treatment on
    // the auxiliary graph: vertex n is joined to every odd-degree vertex.
    let aux = n as u32;
    let mut edges: Vec<(u32, u32)> = h
        .edges()
        .filter(|&(u, v)| !is_sink[u as usize] && !is_sink[v as usize])
        .collect();
    let mut deg = vec![0usize; n + 1];
    for &(u, v) in &edges {
        deg[u as usize] += 1;
        deg[v as usize] += 1;
    }
    for v in 0..n as u32 {
        if deg[v as usize] % 2 == 1 {
            edges.push((v, aux));
            deg[v as usize] += 1;
            deg[aux as usize] += 1;
        }
    }
    debug_assert!(deg.iter().all(|d| d % 2 == 0));

    for (u, v) in eulerian_arcs(n + 1, &edges) {
        if u != aux && v != aux {
            arcs.push((u, v));
        }
    }

    (Orientation::from_arcs(n, &arcs), sinks)
}

/// Hierholzer's algorithm on a graph where every degree is even. Each
/// connected component with edges is traversed along a closed circuit;
/// consecutive circuit vertices become arcs. Every input edge appears in
/// exactly one arc.
fn eulerian_arcs(n: usize, edges: &[(u32, u32)]) -> Vec<(u32, u32)> {
    // incidence lists of edge ids, consumed via per-vertex cursors
    let mut incidence = vec![Vec::new(); n];
    for (id, &(u, v)) in edges.iter().enumerate() {
        incidence[u as usize].push(id);
        incidence[v as usize].push(id);
    }
    let mut cursor = vec![0usize; n];
    let mut used = vec![false; edges.len()];
    let mut arcs = Vec::with_capacity(edges.len());
    let mut stack: Vec<u32> = Vec::new();
    let mut circuit: Vec<u32> = Vec::new();

    for start in 0..n as u32 {
        if incidence[start as usize].is_empty() || cursor[start as usize] == incidence[start as usize].len() {
            continue;
        }
        stack.clear();
        circuit.clear();
        stack.push(start);
        while let Some(&v) = stack.last() {
            let vi = v as usize;
            let mut advanced = false;
            while cursor[vi] < incidence[vi].len() {
                let id = incidence[vi][cursor[vi]];
                if used[id] {
                    cursor[vi] += 1;
                    continue;
                }
                used[id] = true;
                cursor[vi] += 1;
                let (a, b) = edges[id];
                let w = if a == v { b } else { a };
                stack.push(w);
                advanced = true;
                break;
            }
            if !advanced {
                circuit.push(v);
                stack.pop();
            }
        }
        // circuit holds the closed walk; orient along consecutive pairs
        for pair in circuit.windows(2) {
            arcs.push((pair[0], pair[1]));
        }
    }
    debug_assert_eq!(arcs.len(), edges.len());
    arcs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, TargetKind, TargetSpec};
    use crate::rng::DetRng;
    use std::collections::BTreeSet;

    fn check_balanced(h: &Graph) {
        let (orientation, sinks) = balanced_orientation(h);
        let delta = h.max_degree();
        let cap = delta / 2 + 1;
        for v in 0..h.n() as u32 {
            assert!(
                orientation.out_degree(v) <= cap,
                "out-degree {} of {v} exceeds cap {cap}",
                orientation.out_degree(v)
            );
        }
        for &s in &sinks {
            assert_eq!(orientation.out_degree(s), 0, "sink {s} has out-arcs");
        }
        assert!(sinks.len() * (delta * delta + 1) >= h.n());
        // oriented edge multiset equals the edge set of h
        let mut oriented: Vec<(u32, u32)> = orientation
            .arcs()
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        oriented.sort_unstable();
        let mut expected: Vec<(u32, u32)> = h.edges().collect();
        expected.sort_unstable();
        assert_eq!(oriented, expected);
        // sink set is independent: no oriented edge joins two sinks
        let sink_set: BTreeSet<u32> = sinks.iter().copied().collect();
        for (u, v) in h.edges() {
            assert!(!(sink_set.contains(&u) && sink_set.contains(&v)));
        }
    }

    #[test]
    fn edgeless_graph_is_all_sinks() {
        let h = Graph::empty(7);
        let (orientation, sinks) = balanced_orientation(&h);
        assert_eq!(orientation.arc_count(), 0);
        assert_eq!(sinks, (0..7).collect::<Vec<u32>>());
    }

    #[test]
    fn four_cycle() {
        let h = generate(&TargetSpec { kind: TargetKind::Cycle, n: 4 }, 0).unwrap();
        check_balanced(&h);
        let (orientation, sinks) = balanced_orientation(&h);
        assert!(!sinks.is_empty());
        for v in 0..4u32 {
            assert!(orientation.out_degree(v) <= 2);
        }
    }

    #[test]
    fn complete_graph_on_four() {
        let h = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        check_balanced(&h);
        let (_, sinks) = balanced_orientation(&h);
        assert!(!sinks.is_empty());
    }

    #[test]
    fn triangle_demands() {
        // One sink, one vertex of out-degree two, one of out-degree one.
        let h = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let (orientation, sinks) = balanced_orientation(&h);
        let mut degs = orientation.out_degrees();
        degs.sort_unstable();
        assert_eq!(degs, vec![0, 1, 2]);
        assert_eq!(sinks.len(), 1);
    }

    #[test]
    fn random_graph_sweep() {
        // mixed target kinds plus ad-hoc bounded-degree graphs
        let mut rng = DetRng::new(99);
        for trial in 0..200u64 {
            let n = 2 + rng.below(60) as usize;
            let h = match trial % 4 {
                0 => {
                    let delta = 1 + rng.below(6) as usize;
                    generate(
                        &TargetSpec { kind: TargetKind::RandomForest { delta }, n },
                        trial,
                    )
                    .unwrap()
                }
                1 => {
                    let mut delta = 1 + rng.below(6) as usize;
                    if 2 * delta >= n {
                        delta = (n / 2).saturating_sub(1).max(1);
                    }
                    if delta >= n || (delta * n) % 2 == 1 {
                        delta -= 1;
                    }
                    generate(
                        &TargetSpec { kind: TargetKind::RandomRegular { delta }, n },
                        trial,
                    )
                    .unwrap()
                }
                _ => {
                    // random edges under a degree cap
                    let cap = 2 + rng.below(8) as usize;
                    let mut g = Graph::empty(n);
                    for _ in 0..3 * n {
                        let u = rng.below(n as u64) as u32;
                        let v = rng.below(n as u64) as u32;
                        if u != v && g.degree(u) < cap && g.degree(v) < cap {
                            g.add_edge(u, v);
                        }
                    }
                    g
                }
            };
            check_balanced(&h);
        }
    }
}
