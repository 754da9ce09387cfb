//! Core graph containers: compact immutable graphs with stable undirected
//! edge ids, uniform hypergraphs with incidence indexes, Berge-girth
//! computation, intersection graphs labeled by shared vertices, and a small
//! union-find.
//!
//! Everything downstream (host construction, goodness checks, the staged
//! search) is built on these types. Graphs are stored in compressed sparse
//! row form with sorted adjacency lists; subgraph operations keep the vertex
//! id space intact so that vertex ids stay meaningful across stages.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range (vertex count {1})")]
    VertexOutOfRange(u32, usize),
    #[error("self loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(u32, u32),
    #[error("cycle candidate too short: {0} vertices")]
    CycleTooShort(usize),
    #[error("cycle candidate repeats vertex {0}")]
    CycleRepeatsVertex(u32),
    #[error("cycle candidate not closed: {0} and {1} are not adjacent")]
    CycleNotClosed(u32, u32),
    #[error("hyperedge has {got} vertices, expected {expected}")]
    NonUniformEdge { got: usize, expected: usize },
    #[error("hyperedge repeats vertex {0}")]
    HyperedgeRepeatsVertex(u32),
    #[error("hypergraph not linear: hyperedges {0} and {1} share two or more vertices")]
    NotLinear(usize, usize),
    #[error("color {0} outside palette 1..={1}")]
    ColorOutOfRange(u32, u32),
}

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

/// Immutable undirected simple graph in CSR form.
///
/// Adjacency lists are sorted. Every undirected edge `{u, v}` with `u < v`
/// has a stable integer id: ids are assigned in order of `(u, v)`
/// lexicographically, which makes them reproducible across rebuilds from the
/// same edge set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neigh: Vec<u32>,
    /// For vertex `u`, edge ids `eid_base[u]..eid_base[u+1]` belong to edges
    /// `(u, v)` with `v > u`, ranked by `v` ascending.
    eid_base: Vec<usize>,
    edge_count: usize,
}

impl Graph {
    /// Builds a graph from an edge list. Rejects self loops and duplicates.
    pub fn from_edges(vertex_count: usize, edges: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let mut norm: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a as usize >= vertex_count {
                return Err(GraphError::VertexOutOfRange(a, vertex_count));
            }
            if b as usize >= vertex_count {
                return Err(GraphError::VertexOutOfRange(b, vertex_count));
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            norm.push((a.min(b), a.max(b)));
        }
        norm.sort_unstable();
        for w in norm.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        Ok(Self::from_sorted_unique(vertex_count, norm))
    }

    /// Builds a graph from an edge list, silently collapsing duplicates and
    /// dropping self loops. Useful when edges come from overlapping sources.
    pub fn from_edges_dedup(vertex_count: usize, edges: &[(u32, u32)]) -> Result<Graph, GraphError> {
        let mut norm: Vec<(u32, u32)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a as usize >= vertex_count {
                return Err(GraphError::VertexOutOfRange(a, vertex_count));
            }
            if b as usize >= vertex_count {
                return Err(GraphError::VertexOutOfRange(b, vertex_count));
            }
            if a != b {
                norm.push((a.min(b), a.max(b)));
            }
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Self::from_sorted_unique(vertex_count, norm))
    }

    fn from_sorted_unique(vertex_count: usize, norm: Vec<(u32, u32)>) -> Graph {
        let mut deg = vec![0usize; vertex_count];
        for &(u, v) in &norm {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0usize);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut neigh = vec![0u32; offsets[vertex_count]];
        let mut cursor = offsets[..vertex_count].to_vec();
        // norm is sorted by (u, v); inserting v under u keeps u's list sorted.
        // For the reverse direction, u values appear in ascending order per v
        // as well, so both lists end sorted.
        for &(u, v) in &norm {
            neigh[cursor[u as usize]] = v;
            cursor[u as usize] += 1;
        }
        for &(u, v) in &norm {
            neigh[cursor[v as usize]] = u;
            cursor[v as usize] += 1;
        }
        for u in 0..vertex_count {
            neigh[offsets[u]..offsets[u + 1]].sort_unstable();
        }
        let mut eid_base = Vec::with_capacity(vertex_count + 1);
        eid_base.push(0usize);
        for u in 0..vertex_count {
            let greater = neigh[offsets[u]..offsets[u + 1]]
                .iter()
                .filter(|&&v| v > u as u32)
                .count();
            eid_base.push(eid_base.last().unwrap() + greater);
        }
        Graph {
            offsets,
            neigh,
            eid_base,
            edge_count: norm.len(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn degree(&self, u: u32) -> usize {
        let u = u as usize;
        self.offsets[u + 1] - self.offsets[u]
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        let u = u as usize;
        &self.neigh[self.offsets[u]..self.offsets[u + 1]]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if u == v {
            return false;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Stable id of the undirected edge `{u, v}`, if present.
    pub fn edge_id(&self, u: u32, v: u32) -> Option<usize> {
        if u == v {
            return None;
        }
        let (a, b) = (u.min(v), u.max(v));
        let list = self.neighbors(a);
        let pos = list.binary_search(&b).ok()?;
        let suffix_start = list.partition_point(|&x| x <= a);
        Some(self.eid_base[a as usize] + (pos - suffix_start))
    }

    /// Endpoints `(u, v)` with `u < v` of the edge with the given id.
    pub fn edge_endpoints(&self, id: usize) -> Option<(u32, u32)> {
        if id >= self.edge_count {
            return None;
        }
        // Largest u with eid_base[u] <= id.
        let u = self.eid_base.partition_point(|&b| b <= id) - 1;
        let list = self.neighbors(u as u32);
        let suffix_start = list.partition_point(|&x| x <= u as u32);
        let v = list[suffix_start + (id - self.eid_base[u])];
        Some((u as u32, v))
    }

    /// Iterates all edges as `(id, u, v)` with `u < v`, in id order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, u32, u32)> + '_ {
        (0..self.vertex_count() as u32).flat_map(move |u| {
            let list = self.neighbors(u);
            let suffix_start = list.partition_point(|&x| x <= u);
            list[suffix_start..].iter().enumerate().map(move |(k, &v)| {
                (self.eid_base[u as usize] + k, u, v)
            })
        })
    }

    /// Vertices with degree at least one, ascending.
    pub fn support(&self) -> Vec<u32> {
        (0..self.vertex_count() as u32).filter(|&u| self.degree(u) > 0).collect()
    }

    pub fn support_size(&self) -> usize {
        (0..self.vertex_count() as u32).filter(|&u| self.degree(u) > 0).count()
    }

    /// Spanning subgraph keeping the edges whose id passes the predicate.
    /// Vertex ids are preserved. Returns the subgraph and, for each new edge
    /// id, the old edge id it came from.
    pub fn filter_edges(&self, mut keep: impl FnMut(usize) -> bool) -> (Graph, Vec<usize>) {
        let mut kept_edges = Vec::new();
        let mut old_ids = Vec::new();
        for (id, u, v) in self.edges() {
            if keep(id) {
                kept_edges.push((u, v));
                old_ids.push(id);
            }
        }
        // Edges iterate in id order, i.e. sorted (u, v); ids in the subgraph
        // are assigned in the same order, so old_ids lines up by construction.
        let g = Graph::from_sorted_unique(self.vertex_count(), kept_edges);
        (g, old_ids)
    }

    /// Spanning subgraph keeping only edges with both endpoints marked.
    /// Vertex ids are preserved; unmarked vertices become isolated.
    pub fn restrict_vertices(&self, keep: &[bool]) -> (Graph, Vec<usize>) {
        self.filter_edges(|id| {
            // filter_edges calls in id order; re-derive endpoints cheaply.
            true && {
                let (u, v) = self_edge_endpoints_unwrap(self, id);
                keep[u as usize] && keep[v as usize]
            }
        })
    }

    /// Re-numbers the vertices so that only the listed ones remain, in the
    /// given order. Returns the compacted graph and the old id of each new
    /// vertex. Edges with an endpoint outside the list are dropped.
    pub fn compact(&self, keep: &[u32]) -> (Graph, Vec<u32>) {
        let mut new_id = vec![u32::MAX; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v as usize] = i as u32;
        }
        let mut edges = Vec::new();
        for (_, u, v) in self.edges() {
            let (nu, nv) = (new_id[u as usize], new_id[v as usize]);
            if nu != u32::MAX && nv != u32::MAX {
                edges.push((nu.min(nv), nu.max(nv)));
            }
        }
        edges.sort_unstable();
        (Graph::from_sorted_unique(keep.len(), edges), keep.to_vec())
    }

    /// GraphViz rendering with optional vertex and edge highlights.
    pub fn to_dot(&self, highlight_vertices: &[u32], highlight_edges: &[(u32, u32)]) -> String {
        let hv: std::collections::HashSet<u32> = highlight_vertices.iter().copied().collect();
        let he: std::collections::HashSet<(u32, u32)> = highlight_edges
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect();
        let mut out = String::from("graph {\n  node [shape=circle];\n");
        for v in 0..self.vertex_count() as u32 {
            if hv.contains(&v) {
                let _ = writeln!(out, "  {v} [style=filled, fillcolor=gold];");
            } else if self.degree(v) > 0 {
                let _ = writeln!(out, "  {v};");
            }
        }
        for (_, u, v) in self.edges() {
            if he.contains(&(u, v)) {
                let _ = writeln!(out, "  {u} -- {v} [color=red, penwidth=2];");
            } else {
                let _ = writeln!(out, "  {u} -- {v};");
            }
        }
        out.push_str("}\n");
        out
    }
}

fn self_edge_endpoints_unwrap(g: &Graph, id: usize) -> (u32, u32) {
    g.edge_endpoints(id).expect("edge id produced by edges() is valid")
}

#[derive(Serialize, Deserialize)]
struct GraphSerde {
    vertex_count: usize,
    edges: Vec<(u32, u32)>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        GraphSerde {
            vertex_count: self.vertex_count(),
            edges: self.edges().map(|(_, u, v)| (u, v)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = GraphSerde::deserialize(d)?;
        Graph::from_edges(raw.vertex_count, &raw.edges).map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Girth and cycles
// ---------------------------------------------------------------------------

/// Length of a shortest cycle, or `None` if there is no cycle of length at
/// most `cap` (pass `usize::MAX` for the unrestricted girth).
pub fn graph_girth(g: &Graph, cap: usize) -> Option<usize> {
    let roots: Vec<u32> = (0..g.vertex_count() as u32).collect();
    graph_girth_rooted(g, &roots, cap)
}

/// Girth restricted to cycles that pass through at least one root. When the
/// roots form a transversal of all shortest cycles (for example one side of
/// a bipartition), this equals the girth.
pub fn graph_girth_rooted(g: &Graph, roots: &[u32], cap: usize) -> Option<usize> {
    let n = g.vertex_count();
    let mut best: usize = usize::MAX;
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![u32::MAX; n];
    let mut touched: Vec<u32> = Vec::new();
    let mut queue: std::collections::VecDeque<u32> = std::collections::VecDeque::new();
    for &r in roots {
        if g.degree(r) < 2 {
            continue;
        }
        for &t in &touched {
            dist[t as usize] = u32::MAX;
            parent[t as usize] = u32::MAX;
        }
        touched.clear();
        queue.clear();
        dist[r as usize] = 0;
        touched.push(r);
        queue.push_back(r);
        let depth_limit = (best.min(cap.saturating_add(1))) / 2;
        'bfs: while let Some(u) = queue.pop_front() {
            let du = dist[u as usize] as usize;
            if du >= depth_limit {
                break;
            }
            for &v in g.neighbors(u) {
                if v == parent[u as usize] {
                    continue;
                }
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = (du + 1) as u32;
                    parent[v as usize] = u;
                    touched.push(v);
                    queue.push_back(v);
                } else {
                    let len = du + dist[v as usize] as usize + 1;
                    if len < best {
                        best = len;
                    }
                    if best <= 3 {
                        break 'bfs;
                    }
                }
            }
        }
        if best == 3 {
            break;
        }
    }
    (best != usize::MAX && best <= cap).then_some(best)
}

/// Checks that `cycle` lists the vertices of a cycle in order and reports
/// whether that cycle is induced (has no chord). Errors describe why the
/// input fails to be a cycle at all.
pub fn is_induced_cycle(g: &Graph, cycle: &[u32]) -> Result<bool, GraphError> {
    let k = cycle.len();
    if k < 3 {
        return Err(GraphError::CycleTooShort(k));
    }
    let mut seen = std::collections::HashSet::with_capacity(k);
    for &v in cycle {
        if v as usize >= g.vertex_count() {
            return Err(GraphError::VertexOutOfRange(v, g.vertex_count()));
        }
        if !seen.insert(v) {
            return Err(GraphError::CycleRepeatsVertex(v));
        }
    }
    for i in 0..k {
        let (a, b) = (cycle[i], cycle[(i + 1) % k]);
        if !g.has_edge(a, b) {
            return Err(GraphError::CycleNotClosed(a, b));
        }
    }
    for i in 0..k {
        for j in (i + 2)..k {
            if i == 0 && j == k - 1 {
                continue;
            }
            if g.has_edge(cycle[i], cycle[j]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Hypergraph
// ---------------------------------------------------------------------------

/// Uniform hypergraph on vertices `0..n`. Hyperedges are sorted vertex lists
/// and hyperedge ids are their positions in `edges`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n: usize,
    s: usize,
    edges: Vec<Vec<u32>>,
}

impl Hypergraph {
    pub fn new(n: usize, s: usize, mut edges: Vec<Vec<u32>>) -> Result<Hypergraph, GraphError> {
        for e in edges.iter_mut() {
            if e.len() != s {
                return Err(GraphError::NonUniformEdge { got: e.len(), expected: s });
            }
            e.sort_unstable();
            for w in e.windows(2) {
                if w[0] == w[1] {
                    return Err(GraphError::HyperedgeRepeatsVertex(w[0]));
                }
            }
            if let Some(&last) = e.last() {
                if last as usize >= n {
                    return Err(GraphError::VertexOutOfRange(last, n));
                }
            }
        }
        Ok(Hypergraph { n, s, edges })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn uniformity(&self) -> usize {
        self.s
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, id: usize) -> &[u32] {
        &self.edges[id]
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    /// Keeps the hyperedges marked alive, preserving relative order, and
    /// returns the old id of each kept edge.
    pub fn retain_edges(&self, alive: &[bool]) -> (Hypergraph, Vec<usize>) {
        let mut edges = Vec::new();
        let mut old = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if alive[i] {
                edges.push(e.clone());
                old.push(i);
            }
        }
        (
            Hypergraph { n: self.n, s: self.s, edges },
            old,
        )
    }

    /// Max vertex degree (number of incident hyperedges).
    pub fn max_degree(&self) -> usize {
        let idx = self.incidence_index();
        (0..self.n).map(|v| idx.hyperedges_of(v as u32).len()).max().unwrap_or(0)
    }

    /// Vertex-to-hyperedge index in CSR form.
    pub fn incidence_index(&self) -> IncidenceIndex {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            for &v in e {
                deg[v as usize] += 1;
            }
        }
        let mut off = Vec::with_capacity(self.n + 1);
        off.push(0usize);
        for d in &deg {
            off.push(off.last().unwrap() + d);
        }
        let mut hyps = vec![0u32; off[self.n]];
        let mut cursor = off[..self.n].to_vec();
        for (i, e) in self.edges.iter().enumerate() {
            for &v in e {
                hyps[cursor[v as usize]] = i as u32;
                cursor[v as usize] += 1;
            }
        }
        IncidenceIndex { off, hyps }
    }

    /// Bipartite incidence graph: vertices `0..n` are hypergraph vertices,
    /// vertices `n..n+m` are hyperedges.
    pub fn incidence_graph(&self) -> Graph {
        let mut edges = Vec::with_capacity(self.edges.len() * self.s);
        for (i, e) in self.edges.iter().enumerate() {
            let enode = (self.n + i) as u32;
            for &v in e {
                edges.push((v, enode));
            }
        }
        Graph::from_edges(self.n + self.edges.len(), &edges)
            .expect("incidence edges are unique by construction")
    }
}

/// CSR map from vertex to the ids of hyperedges containing it.
#[derive(Debug, Clone)]
pub struct IncidenceIndex {
    off: Vec<usize>,
    hyps: Vec<u32>,
}

impl IncidenceIndex {
    pub fn hyperedges_of(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.hyps[self.off[v]..self.off[v + 1]]
    }
}

/// Berge girth: the least number of distinct hyperedges `e_1..e_b` admitting
/// distinct vertices `v_i` with `v_i` in both `e_i` and `e_{i+1}` (cyclically),
/// with `b >= 2`. Equals half the girth of the bipartite incidence graph.
/// Returns `None` when every Berge cycle is longer than `cap`.
pub fn berge_girth(h: &Hypergraph, cap: usize) -> Option<usize> {
    if h.edge_count() == 0 {
        return None;
    }
    let inc = h.incidence_graph();
    let roots: Vec<u32> = (h.vertex_count()..h.vertex_count() + h.edge_count())
        .map(|x| x as u32)
        .collect();
    let incidence_cap = cap.checked_mul(2).unwrap_or(usize::MAX);
    graph_girth_rooted(&inc, &roots, incidence_cap).map(|g| g / 2)
}

/// First pair of hyperedges sharing at least two vertices, if any.
pub fn berge_two_cycle(h: &Hypergraph) -> Option<(usize, usize)> {
    let mut pair_seen: HashMap<(u32, u32), u32> = HashMap::new();
    for (i, e) in h.edges().iter().enumerate() {
        for a in 0..e.len() {
            for b in (a + 1)..e.len() {
                let key = (e[a], e[b]);
                if let Some(&j) = pair_seen.get(&key) {
                    return Some((j as usize, i));
                }
                pair_seen.insert(key, i as u32);
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Intersection graph and sunflower cycles
// ---------------------------------------------------------------------------

/// Intersection graph of a linear hypergraph: one vertex per hyperedge, one
/// edge per pair of hyperedges sharing a vertex, labeled by that vertex.
/// Materializes all pairs, so intended for hosts of modest degree; at scale
/// the incidence index is used directly instead.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IntersectionGraph {
    pub hyper_count: usize,
    /// `(hyperedge a, hyperedge b, shared vertex)` with `a < b`.
    pub edges: Vec<(u32, u32, u32)>,
}

pub fn build_intersection_graph(h: &Hypergraph) -> Result<IntersectionGraph, GraphError> {
    if let Some((a, b)) = berge_two_cycle(h) {
        return Err(GraphError::NotLinear(a, b));
    }
    let idx = h.incidence_index();
    let mut edges = Vec::new();
    for v in 0..h.vertex_count() as u32 {
        let inc = idx.hyperedges_of(v);
        for a in 0..inc.len() {
            for b in (a + 1)..inc.len() {
                let (x, y) = (inc[a].min(inc[b]), inc[a].max(inc[b]));
                edges.push((x, y, v));
            }
        }
    }
    edges.sort_unstable();
    Ok(IntersectionGraph { hyper_count: h.edge_count(), edges })
}

/// True when some cycle of the intersection graph uses a single label, i.e.
/// one shared vertex accounts for a closed chain of hyperedges. Equivalent
/// to some label class containing a graph cycle, which union-find detects.
pub fn has_sunflower_cycle(ig: &IntersectionGraph) -> bool {
    let mut by_label: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
    for &(a, b, label) in &ig.edges {
        by_label.entry(label).or_default().push((a, b));
    }
    for (_, class) in by_label {
        let mut uf = UnionFind::new(ig.hyper_count);
        for (a, b) in class {
            if !uf.union(a as usize, b as usize) {
                return true;
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Edge colorings
// ---------------------------------------------------------------------------

/// Total edge coloring with palette `1..=k`, indexed by stable edge id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeColoring {
    pub k: u32,
    /// `color[edge_id]` in `1..=k`; length must equal the graph's edge count.
    pub color: Vec<u32>,
}

impl EdgeColoring {
    pub fn new(k: u32, color: Vec<u32>) -> Result<EdgeColoring, GraphError> {
        for &c in &color {
            if c < 1 || c > k {
                return Err(GraphError::ColorOutOfRange(c, k));
            }
        }
        Ok(EdgeColoring { k, color })
    }

    /// All edges in one color.
    pub fn monochrome(k: u32, edge_count: usize) -> EdgeColoring {
        EdgeColoring { k: k.max(1), color: vec![1; edge_count] }
    }

    pub fn of(&self, edge_id: usize) -> u32 {
        self.color[edge_id]
    }
}

// ---------------------------------------------------------------------------
// Union-find
// ---------------------------------------------------------------------------

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    /// Merges the two classes. Returns false when already joined (i.e. the
    /// new edge closes a cycle).
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra as u32;
        self.size[ra] += self.size[rb];
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }
}

// ---------------------------------------------------------------------------
// Tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cycle_graph(k: usize) -> Graph {
        let edges: Vec<(u32, u32)> = (0..k).map(|i| (i as u32, ((i + 1) % k) as u32)).collect();
        Graph::from_edges(k, &edges).unwrap()
    }

    fn complete_graph(k: usize) -> Graph {
        let mut edges = Vec::new();
        for a in 0..k as u32 {
            for b in (a + 1)..k as u32 {
                edges.push((a, b));
            }
        }
        Graph::from_edges(k, &edges).unwrap()
    }

    /// Exhaustive shortest-cycle search by DFS over simple paths. Exponential;
    /// only for tiny oracle graphs.
    fn brute_girth(g: &Graph) -> Option<usize> {
        let n = g.vertex_count();
        let mut best = usize::MAX;
        fn dfs(
            g: &Graph,
            start: u32,
            u: u32,
            visited: &mut Vec<bool>,
            depth: usize,
            best: &mut usize,
        ) {
            for &v in g.neighbors(u) {
                if v == start && depth >= 3 {
                    *best = (*best).min(depth);
                } else if v > start && !visited[v as usize] && depth + 1 < *best {
                    visited[v as usize] = true;
                    dfs(g, start, v, visited, depth + 1, best);
                    visited[v as usize] = false;
                }
            }
        }
        for start in 0..n as u32 {
            let mut visited = vec![false; n];
            visited[start as usize] = true;
            dfs(g, start, start, &mut visited, 1, &mut best);
        }
        (best != usize::MAX).then_some(best)
    }

    /// Exhaustive Berge-girth oracle: DFS over alternating sequences of
    /// distinct hyperedges and distinct connecting vertices. Exponential;
    /// only for tiny hypergraphs.
    fn brute_berge_girth(h: &Hypergraph) -> Option<usize> {
        fn rec(
            h: &Hypergraph,
            start: usize,
            cur: usize,
            used_e: &mut Vec<bool>,
            used_v: &mut std::collections::HashSet<u32>,
            len: usize,
            best: &mut Option<usize>,
        ) {
            if len >= 2 {
                for &v in h.edge(cur) {
                    if h.edge(start).binary_search(&v).is_ok() && !used_v.contains(&v) {
                        if best.map_or(true, |b| len < b) {
                            *best = Some(len);
                        }
                        break;
                    }
                }
            }
            if let Some(b) = *best {
                if len + 1 >= b {
                    return;
                }
            }
            for next in 0..h.edge_count() {
                if used_e[next] {
                    continue;
                }
                for &v in h.edge(cur) {
                    if h.edge(next).binary_search(&v).is_ok() && !used_v.contains(&v) {
                        used_e[next] = true;
                        used_v.insert(v);
                        rec(h, start, next, used_e, used_v, len + 1, best);
                        used_e[next] = false;
                        used_v.remove(&v);
                    }
                }
            }
        }
        let mut best = None;
        let mut used_e = vec![false; h.edge_count()];
        let mut used_v = std::collections::HashSet::new();
        for start in 0..h.edge_count() {
            used_e[start] = true;
            rec(h, start, start, &mut used_e, &mut used_v, 1, &mut best);
            used_e[start] = false;
        }
        best
    }

    #[test]
    fn edge_ids_are_dense_and_invertible() {
        let g = complete_graph(6);
        assert_eq!(g.edge_count(), 15);
        let mut seen = vec![false; 15];
        for (id, u, v) in g.edges() {
            assert_eq!(g.edge_id(u, v), Some(id));
            assert_eq!(g.edge_id(v, u), Some(id));
            assert_eq!(g.edge_endpoints(id), Some((u, v)));
            assert!(!seen[id]);
            seen[id] = true;
        }
        assert!(seen.into_iter().all(|x| x));
        assert_eq!(g.edge_endpoints(15), None);
        assert_eq!(g.edge_id(0, 0), None);
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert_eq!(
            Graph::from_edges(3, &[(0, 0)]).unwrap_err(),
            GraphError::SelfLoop(0)
        );
        assert_eq!(
            Graph::from_edges(3, &[(0, 1), (1, 0)]).unwrap_err(),
            GraphError::DuplicateEdge(0, 1)
        );
        assert_eq!(
            Graph::from_edges(2, &[(0, 5)]).unwrap_err(),
            GraphError::VertexOutOfRange(5, 2)
        );
        let g = Graph::from_edges_dedup(3, &[(0, 1), (1, 0), (2, 2)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn girth_matches_known_graphs() {
        assert_eq!(graph_girth(&cycle_graph(5), usize::MAX), Some(5));
        assert_eq!(graph_girth(&cycle_graph(9), usize::MAX), Some(9));
        assert_eq!(graph_girth(&complete_graph(4), usize::MAX), Some(3));
        // Complete bipartite K_{3,3}.
        let mut edges = Vec::new();
        for a in 0..3u32 {
            for b in 3..6u32 {
                edges.push((a, b));
            }
        }
        let k33 = Graph::from_edges(6, &edges).unwrap();
        assert_eq!(graph_girth(&k33, usize::MAX), Some(4));
        // Tree: no cycle.
        let tree = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]).unwrap();
        assert_eq!(graph_girth(&tree, usize::MAX), None);
        // Cap cuts off long cycles.
        assert_eq!(graph_girth(&cycle_graph(9), 8), None);
        assert_eq!(graph_girth(&cycle_graph(9), 9), Some(9));
    }

    #[test]
    fn induced_cycle_detects_chords() {
        let g = complete_graph(4);
        assert_eq!(is_induced_cycle(&g, &[0, 1, 2, 3]), Ok(false));
        assert_eq!(is_induced_cycle(&g, &[0, 1, 2]), Ok(true));
        let c6 = cycle_graph(6);
        assert_eq!(is_induced_cycle(&c6, &[0, 1, 2, 3, 4, 5]), Ok(true));
        assert_eq!(
            is_induced_cycle(&c6, &[0, 1, 2]),
            Err(GraphError::CycleNotClosed(2, 0))
        );
        assert_eq!(
            is_induced_cycle(&c6, &[0, 1]),
            Err(GraphError::CycleTooShort(2))
        );
        assert_eq!(
            is_induced_cycle(&c6, &[0, 1, 2, 1]),
            Err(GraphError::CycleRepeatsVertex(1))
        );
    }

    #[test]
    fn berge_girth_two_means_nonlinear() {
        // Two triples sharing two vertices.
        let h = Hypergraph::new(5, 3, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(berge_girth(&h, usize::MAX), Some(2));
        assert_eq!(berge_two_cycle(&h), Some((0, 1)));
    }

    #[test]
    fn berge_girth_loose_triangle() {
        // Three triples pairwise sharing one vertex, closing a chain.
        let h = Hypergraph::new(9, 3, vec![
            vec![0, 1, 2],
            vec![2, 3, 4],
            vec![4, 5, 0],
        ])
        .unwrap();
        assert_eq!(berge_girth(&h, usize::MAX), Some(3));
        assert_eq!(berge_two_cycle(&h), None);
    }

    #[test]
    fn berge_girth_of_fano_lines_is_three() {
        let lines: Vec<Vec<u32>> = vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
            vec![1, 3, 5],
            vec![1, 4, 6],
            vec![2, 3, 6],
            vec![2, 4, 5],
        ];
        let h = Hypergraph::new(7, 3, lines).unwrap();
        assert_eq!(berge_girth(&h, usize::MAX), Some(3));
    }

    #[test]
    fn berge_girth_respects_cap_and_acyclic_input() {
        let path = Hypergraph::new(7, 3, vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 6]]).unwrap();
        assert_eq!(berge_girth(&path, usize::MAX), None);
        let h = Hypergraph::new(9, 3, vec![vec![0, 1, 2], vec![2, 3, 4], vec![4, 5, 0]]).unwrap();
        assert_eq!(berge_girth(&h, 2), None);
        assert_eq!(berge_girth(&h, 3), Some(3));
    }

    #[test]
    fn hypergraph_validation() {
        assert!(matches!(
            Hypergraph::new(4, 3, vec![vec![0, 1]]),
            Err(GraphError::NonUniformEdge { got: 2, expected: 3 })
        ));
        assert!(matches!(
            Hypergraph::new(4, 3, vec![vec![0, 1, 1]]),
            Err(GraphError::HyperedgeRepeatsVertex(1))
        ));
        assert!(matches!(
            Hypergraph::new(3, 3, vec![vec![0, 1, 7]]),
            Err(GraphError::VertexOutOfRange(7, 3))
        ));
    }

    #[test]
    fn sunflower_cycle_detection() {
        // Three hyperedges all sharing vertex 0 pairwise: the label-0 class
        // is a triangle in the intersection graph.
        let h = Hypergraph::new(7, 3, vec![
            vec![0, 1, 2],
            vec![0, 3, 4],
            vec![0, 5, 6],
        ])
        .unwrap();
        let ig = build_intersection_graph(&h).unwrap();
        assert_eq!(ig.edges.len(), 3);
        assert!(has_sunflower_cycle(&ig));

        // Mixed-label triangle: a cycle exists but every label class is a
        // single edge, hence a forest.
        let h2 = Hypergraph::new(9, 3, vec![
            vec![0, 1, 2],
            vec![2, 3, 4],
            vec![4, 5, 0],
        ])
        .unwrap();
        let ig2 = build_intersection_graph(&h2).unwrap();
        assert_eq!(ig2.edges.len(), 3);
        assert!(!has_sunflower_cycle(&ig2));

        // Disjoint edges: no intersection edges at all.
        let h3 = Hypergraph::new(6, 3, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        assert!(!has_sunflower_cycle(&build_intersection_graph(&h3).unwrap()));
    }

    #[test]
    fn intersection_graph_rejects_nonlinear() {
        let h = Hypergraph::new(5, 3, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
        assert_eq!(
            build_intersection_graph(&h).unwrap_err(),
            GraphError::NotLinear(0, 1)
        );
    }

    #[test]
    fn edge_coloring_palette_validation() {
        assert!(EdgeColoring::new(2, vec![1, 2, 1]).is_ok());
        assert_eq!(
            EdgeColoring::new(2, vec![1, 3]).unwrap_err(),
            GraphError::ColorOutOfRange(3, 2)
        );
        assert_eq!(
            EdgeColoring::new(2, vec![0]).unwrap_err(),
            GraphError::ColorOutOfRange(0, 2)
        );
        let mono = EdgeColoring::monochrome(1, 4);
        assert_eq!(mono.of(3), 1);
    }

    #[test]
    fn union_find_basics() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(1, 2));
        assert!(!uf.union(0, 2));
        assert!(uf.same(0, 2));
        assert!(!uf.same(0, 3));
    }

    #[test]
    fn compact_renumbers_and_keeps_internal_edges() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let (sub, old) = g.compact(&[1, 2, 3]);
        assert_eq!(sub.vertex_count(), 3);
        assert_eq!(sub.edge_count(), 2);
        assert_eq!(old, vec![1, 2, 3]);
        assert!(sub.has_edge(0, 1) && sub.has_edge(1, 2) && !sub.has_edge(0, 2));
    }

    #[test]
    fn filter_and_restrict_preserve_id_space() {
        let g = complete_graph(4);
        let (sub, old_ids) = g.filter_edges(|id| id % 2 == 0);
        assert_eq!(sub.vertex_count(), 4);
        assert_eq!(sub.edge_count(), 3);
        for (new_id, u, v) in sub.edges() {
            assert_eq!(g.edge_id(u, v), Some(old_ids[new_id]));
        }
        let keep = vec![true, true, true, false];
        let (sub2, _) = g.restrict_vertices(&keep);
        assert_eq!(sub2.vertex_count(), 4);
        assert_eq!(sub2.edge_count(), 3);
        assert_eq!(sub2.degree(3), 0);
        assert_eq!(sub2.support_size(), 3);
    }

    #[test]
    fn graph_serde_round_trip() {
        let g = complete_graph(5);
        let json = serde_json::to_string(&g).unwrap();
        let back: Graph = serde_json::from_str(&json).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn dot_output_mentions_highlights() {
        let g = cycle_graph(4);
        let dot = g.to_dot(&[2], &[(0, 1)]);
        assert!(dot.contains("2 [style=filled"));
        assert!(dot.contains("0 -- 1 [color=red"));
        assert!(dot.starts_with("graph {"));
    }

    proptest! {
        #[test]
        fn girth_matches_brute_force(edges in proptest::collection::vec((0u32..8, 0u32..8), 0..16)) {
            let g = Graph::from_edges_dedup(8, &edges).unwrap();
            prop_assert_eq!(graph_girth(&g, usize::MAX), brute_girth(&g));
        }

        #[test]
        fn berge_girth_equals_half_incidence_girth(
            raw in proptest::collection::vec(proptest::collection::vec(0u32..10, 3), 1..7)
        ) {
            // Deduplicate vertices inside each candidate edge and keep only
            // proper 3-sets.
            let mut edges = Vec::new();
            for mut e in raw {
                e.sort_unstable();
                e.dedup();
                if e.len() == 3 {
                    edges.push(e);
                }
            }
            prop_assume!(!edges.is_empty());
            let h = Hypergraph::new(10, 3, edges).unwrap();
            let inc = h.incidence_graph();
            let direct = graph_girth(&inc, usize::MAX).map(|g| g / 2);
            prop_assert_eq!(berge_girth(&h, usize::MAX), direct);
        }

        #[test]
        fn berge_girth_matches_alternating_sequence_enumerator(
            raw in proptest::collection::vec(proptest::collection::vec(0u32..9, 3), 1..7)
        ) {
            let mut edges = Vec::new();
            for mut e in raw {
                e.sort_unstable();
                e.dedup();
                if e.len() == 3 {
                    edges.push(e);
                }
            }
            prop_assume!(!edges.is_empty());
            let h = Hypergraph::new(9, 3, edges).unwrap();
            prop_assert_eq!(berge_girth(&h, usize::MAX), brute_berge_girth(&h));
        }

        #[test]
        fn sunflower_matches_label_class_cycle_check(
            raw in proptest::collection::vec(proptest::collection::vec(0u32..8, 3), 1..7)
        ) {
            let mut edges = Vec::new();
            for mut e in raw {
                e.sort_unstable();
                e.dedup();
                if e.len() == 3 {
                    edges.push(e);
                }
            }
            prop_assume!(!edges.is_empty());
            let h = Hypergraph::new(8, 3, edges).unwrap();
            prop_assume!(berge_two_cycle(&h).is_none());
            let ig = build_intersection_graph(&h).unwrap();
            // Oracle: a label class has a cycle iff its edge count exceeds
            // (touched vertices - components), computed per label.
            let mut by_label: std::collections::HashMap<u32, Vec<(u32, u32)>> = Default::default();
            for &(a, b, l) in &ig.edges {
                by_label.entry(l).or_default().push((a, b));
            }
            let mut oracle = false;
            for (_, class) in by_label {
                let mut verts: Vec<u32> = class.iter().flat_map(|&(a, b)| [a, b]).collect();
                verts.sort_unstable();
                verts.dedup();
                let mut uf = UnionFind::new(ig.hyper_count);
                let mut tree_edges = 0usize;
                for &(a, b) in &class {
                    if uf.union(a as usize, b as usize) {
                        tree_edges += 1;
                    }
                }
                if class.len() > tree_edges {
                    oracle = true;
                }
                let _ = verts;
            }
            prop_assert_eq!(has_sunflower_cycle(&ig), oracle);
        }
    }
}
