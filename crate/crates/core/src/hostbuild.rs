//! Host-graph assembly (one placed gadget copy per hyperedge) and the
//! auxiliary colored graph: per hyperedge, the mode's finder hunts a
//! monochromatic cycle inside the placed copy under the adversary's
//! coloring, and each found cycle contributes one auxiliary edge (its
//! anchor pair) carrying the two lift paths.

use crate::gadgets::{find_for_mode, CycleMode, Gadget, GadgetError};
use crate::graphcore::{EdgeColoring, Graph, GraphError, Hypergraph};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HostBuildError {
    #[error("gadget has {gadget} vertices but hyperedges have {hyperedge}")]
    UniformityMismatch { gadget: usize, hyperedge: usize },
    #[error("host graph has {actual} edges, expected hyperedges x gadget edges = {expected}")]
    EdgeCountMismatch { expected: usize, actual: usize },
    #[error("coloring covers {actual} edges but the host graph has {expected}")]
    ColoringMismatch { expected: usize, actual: usize },
    #[error("mode {requested:?} does not match the gadget's mode {gadget:?}")]
    ModeMismatch { requested: CycleMode, gadget: CycleMode },
    #[error("no hyperedge produced an auxiliary edge (the coloring defeated every copy)")]
    NoAuxEdges,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

/// The host graph: one gadget copy per hyperedge, merged. `placements[e][i]`
/// is the host vertex carrying gadget vertex `i` in hyperedge `e`'s copy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HostGraph {
    pub hyper: Hypergraph,
    pub gadget: Gadget,
    pub graph: Graph,
    pub placements: Vec<Vec<u32>>,
}

impl HostGraph {
    /// Host edge id of a gadget edge inside one copy.
    pub fn placed_edge_id(&self, hyperedge: usize, a: u32, b: u32) -> Option<usize> {
        let pl = &self.placements[hyperedge];
        self.graph.edge_id(pl[a as usize], pl[b as usize])
    }
}

/// One auxiliary edge: the anchor pair of a monochromatic cycle found in
/// hyperedge `hyperedge`'s copy, with both lift paths in host coordinates
/// (each running from `endpoints.0` to `endpoints.1`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxEdgeRecord {
    pub hyperedge: usize,
    pub endpoints: (u32, u32),
    pub color: u32,
    pub cycle: Vec<u32>,
    pub short_path: Vec<u32>,
    pub long_path: Vec<u32>,
}

/// The auxiliary graph: same vertex set as the host, one edge per surviving
/// hyperedge. `edges[i]` is the record of the aux edge with graph id `i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxGraph {
    pub graph: Graph,
    pub edges: Vec<AuxEdgeRecord>,
    pub mode: CycleMode,
    /// Cycle length used by every kept copy: 6 (even mode), 5 (odd mode),
    /// or the computed most-frequent odd length (non-induced).
    pub cycle_len: usize,
    /// Hyperedges whose finder found no monochromatic cycle.
    pub skipped_no_cycle: usize,
    /// Non-induced only: copies whose cycle length lost the frequency vote.
    pub skipped_off_length: usize,
}

impl AuxGraph {
    pub fn record(&self, edge_id: usize) -> &AuxEdgeRecord {
        &self.edges[edge_id]
    }

    /// The hyperedge backing an aux edge.
    pub fn hyperedge_of(&self, edge_id: usize) -> usize {
        self.edges[edge_id].hyperedge
    }

    /// (short, long) lift path lengths in edges.
    pub fn lift_lengths(&self) -> (usize, usize) {
        match self.mode {
            CycleMode::EvenInduced => (2, 4),
            CycleMode::OddInduced => (2, 3),
            CycleMode::NonInduced => ((self.cycle_len - 1) / 2, (self.cycle_len + 1) / 2),
        }
    }
}

/// Places one seeded-random copy of the gadget on every hyperedge and
/// merges. Linearity makes edge collisions between copies impossible, so
/// e(host) = e(hypergraph) x e(gadget) exactly.
pub fn build_host(h: &Hypergraph, gadget: &Gadget, seed: u64) -> Result<HostGraph, HostBuildError> {
    if gadget.s != h.uniformity() {
        return Err(HostBuildError::UniformityMismatch {
            gadget: gadget.s,
            hyperedge: h.uniformity(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placements = Vec::with_capacity(h.edge_count());
    for e in 0..h.edge_count() {
        let mut pl: Vec<u32> = h.edge(e).to_vec();
        pl.shuffle(&mut rng);
        placements.push(pl);
    }
    let mut edges = Vec::with_capacity(h.edge_count() * gadget.graph.edge_count());
    for pl in &placements {
        for (_, a, b) in gadget.graph.edges() {
            edges.push((pl[a as usize], pl[b as usize]));
        }
    }
    let graph = Graph::from_edges(h.vertex_count(), &edges)?;
    let expected = h.edge_count() * gadget.graph.edge_count();
    if graph.edge_count() != expected {
        return Err(HostBuildError::EdgeCountMismatch { expected, actual: graph.edge_count() });
    }
    Ok(HostGraph { hyper: h.clone(), gadget: gadget.clone(), graph, placements })
}

/// Pulls the host coloring back to one copy's gadget-local coloring.
fn copy_coloring(host: &HostGraph, coloring: &EdgeColoring, hyperedge: usize) -> EdgeColoring {
    let mut colors = vec![0u32; host.gadget.graph.edge_count()];
    for (ge, a, b) in host.gadget.graph.edges() {
        let host_id = host
            .placed_edge_id(hyperedge, a, b)
            .expect("placed gadget edge exists in host graph");
        colors[ge] = coloring.of(host_id);
    }
    EdgeColoring { k: coloring.k, color: colors }
}

/// Runs the mode's finder on every copy and assembles the auxiliary graph.
/// Copies whose finder fails contribute nothing (logged in the counters).
/// Non-induced mode votes on the most frequent odd cycle length first
/// (ties to the smaller length) and keeps only copies achieving it.
pub fn build_auxiliary(
    host: &HostGraph,
    coloring: &EdgeColoring,
    mode: CycleMode,
) -> Result<AuxGraph, HostBuildError> {
    if mode != host.gadget.mode {
        return Err(HostBuildError::ModeMismatch { requested: mode, gadget: host.gadget.mode });
    }
    if coloring.color.len() != host.graph.edge_count() {
        return Err(HostBuildError::ColoringMismatch {
            expected: host.graph.edge_count(),
            actual: coloring.color.len(),
        });
    }

    let mut found: Vec<(usize, crate::gadgets::GadgetCycle)> = Vec::new();
    let mut skipped_no_cycle = 0;
    for e in 0..host.hyper.edge_count() {
        let local = copy_coloring(host, coloring, e);
        match find_for_mode(&host.gadget, &local)? {
            Some(cycle) => found.push((e, cycle)),
            None => skipped_no_cycle += 1,
        }
    }

    // Settle the common cycle length.
    let mut skipped_off_length = 0;
    let cycle_len = match mode {
        CycleMode::EvenInduced => 6,
        CycleMode::OddInduced => 5,
        CycleMode::NonInduced => {
            let mut freq: std::collections::BTreeMap<usize, usize> = std::collections::BTreeMap::new();
            for (_, c) in &found {
                *freq.entry(c.len()).or_insert(0) += 1;
            }
            // Most frequent, ties to the smaller length (shorter lift paths
            // give the downstream window more room).
            let best = freq
                .iter()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
                .map(|(&l, _)| l)
                .unwrap_or(0);
            let before = found.len();
            found.retain(|(_, c)| c.len() == best);
            skipped_off_length = before - found.len();
            best
        }
    };
    if found.is_empty() {
        return Err(HostBuildError::NoAuxEdges);
    }

    // Map each kept cycle through its placement into host coordinates.
    let mut records: Vec<AuxEdgeRecord> = Vec::with_capacity(found.len());
    for (e, c) in found {
        debug_assert_eq!(c.len(), cycle_len, "finder length disagrees with the mode");
        let pl = &host.placements[e];
        let map = |v: &u32| pl[*v as usize];
        let (a0, a1) = (map(&c.anchor.0), map(&c.anchor.1));
        records.push(AuxEdgeRecord {
            hyperedge: e,
            endpoints: (a0.min(a1), a0.max(a1)),
            color: c.color,
            cycle: c.vertices.iter().map(map).collect(),
            short_path: orient(c.short_path.iter().map(map).collect(), a0.min(a1)),
            long_path: orient(c.long_path.iter().map(map).collect(), a0.min(a1)),
        });
    }

    let pairs: Vec<(u32, u32)> = records.iter().map(|r| r.endpoints).collect();
    let graph = Graph::from_edges(host.graph.vertex_count(), &pairs)?;
    // Align record index with the graph's edge ids.
    let mut by_id: Vec<Option<AuxEdgeRecord>> = vec![None; records.len()];
    for r in records {
        let id = graph.edge_id(r.endpoints.0, r.endpoints.1).expect("aux edge present");
        by_id[id] = Some(r);
    }
    let edges: Vec<AuxEdgeRecord> = by_id.into_iter().map(|r| r.expect("bijection")).collect();

    Ok(AuxGraph { graph, edges, mode, cycle_len, skipped_no_cycle, skipped_off_length })
}

/// Both stored lift paths run from endpoints.0 to endpoints.1.
fn orient(mut path: Vec<u32>, from: u32) -> Vec<u32> {
    if path.first() != Some(&from) {
        path.reverse();
    }
    debug_assert_eq!(path.first(), Some(&from));
    path
}

/// The color class with the most aux edges (ties to the smaller color id)
/// and its spanning subgraph. The returned map sends the subgraph's edge
/// ids back to aux edge ids.
pub fn densest_color_subgraph(aux: &AuxGraph) -> (u32, Graph, Vec<usize>) {
    let mut counts: std::collections::BTreeMap<u32, usize> = std::collections::BTreeMap::new();
    for r in &aux.edges {
        *counts.entry(r.color).or_insert(0) += 1;
    }
    let mut best_color = 0;
    let mut best_count = 0;
    for (&color, &count) in &counts {
        if count > best_count {
            best_count = count;
            best_color = color;
        }
    }
    let (sub, old_ids) = aux.graph.filter_edges(|id| aux.edges[id].color == best_color);
    (best_color, sub, old_ids)
}
