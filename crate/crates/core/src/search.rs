//! The two staged searches on the expander subgraph: a modified DFS that
//! builds a long good path, and the alternating tree growth that attaches
//! two large good trees to the path's endpoints.
//!
//! Both maintain the bookkeeping sets P (path/spine), S1 (vertices retired
//! for lack of unexplored neighbors), S2 (vertices retired by ruined
//! extensions), and U (unexplored), plus a labeled auxiliary graph F inside
//! the hyperedge-intersection structure. Overflowing a cap is a reported
//! outcome carrying the final statistics, never a crash: the originating
//! analysis rules overflows out by contradiction, but at desk scale they
//! are legitimate results.

use crate::goodness::GoodnessContext;
use crate::graphcore::{has_sunflower_cycle, Graph, Hypergraph, IntersectionGraph};
use crate::profile::SearchProfile;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use thiserror::Error;

/// Labeled subgraph of the hyperedge-intersection structure. Vertices are
/// hyperedge ids; each edge carries the shared host vertex as its label.
/// Stored in ordered sets so serialization is canonical.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FGraph {
    pub vertices: BTreeSet<u32>,
    pub edges: BTreeMap<(u32, u32), u32>,
}

impl FGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Returns true when the vertex was not present before.
    pub fn add_vertex(&mut self, h: u32) -> bool {
        self.vertices.insert(h)
    }

    pub fn contains_vertex(&self, h: u32) -> bool {
        self.vertices.contains(&h)
    }

    /// Inserts an edge (endpoints added implicitly). Returns true when new.
    pub fn add_edge(&mut self, a: u32, b: u32, label: u32) -> bool {
        assert_ne!(a, b, "F edges join distinct hyperedges");
        self.vertices.insert(a);
        self.vertices.insert(b);
        self.edges.insert((a.min(b), a.max(b)), label).is_none()
    }

    pub fn to_intersection_graph(&self, hyper_count: usize) -> IntersectionGraph {
        IntersectionGraph {
            hyper_count,
            edges: self.edges.iter().map(|(&(a, b), &l)| (a, b, l)).collect(),
        }
    }
}

/// Smallest vertex shared by two hyperedges; they must intersect.
fn shared_label(hyper: &Hypergraph, a: usize, b: usize) -> u32 {
    let (ea, eb) = (hyper.edge(a), hyper.edge(b));
    let (mut i, mut j) = (0, 0);
    while i < ea.len() && j < eb.len() {
        match ea[i].cmp(&eb[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return ea[i],
        }
    }
    panic!("hyperedges {a} and {b} do not intersect");
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VertexState {
    Outside,
    U,
    P,
    Tree,
    S1,
    S2,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DfsStats {
    pub rounds: usize,
    pub restarts: usize,
    pub dead_ends: usize,
    pub good_extensions: usize,
    pub ruined_extensions: usize,
    pub path_len: usize,
    pub s1: usize,
    pub s2: usize,
    pub u_left: usize,
    pub f_vertices: usize,
    pub f_edges: usize,
    pub invariant_violations: usize,
    pub first_violation: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TreeStats {
    pub rounds: usize,
    pub grew: usize,
    pub dismantles: usize,
    pub bad_rounds: usize,
    /// Pool candidates that received a goodness verdict (deleted ones skip).
    pub cand_seen: usize,
    /// Verdicts that came back good, across all rounds.
    pub goods_seen: usize,
    pub tree_size: usize,
    pub spine_len: usize,
    pub s1: usize,
    pub s2: usize,
    pub u_left: usize,
    pub f_vertices: usize,
    pub f_edges: usize,
    /// (|S|, |N_U(S)|) for the union S of step-1 dismantled leaf sets.
    pub claim_audit: Option<(usize, usize)>,
    pub invariant_violations: usize,
    pub first_violation: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PathResult {
    pub path: Vec<u32>,
    pub f: FGraph,
    pub stats: DfsStats,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeState {
    /// Final spine, front to back. `root` is the fixed middle vertex of
    /// the original path.
    pub spine: Vec<u32>,
    pub root: u32,
    /// Grown edges as (parent, child), in insertion order.
    pub tree_edges: Vec<(u32, u32)>,
    /// Per side: all tree vertices including the spine endpoint.
    pub side_vertices: [Vec<u32>; 2],
    /// Per side: the final active leaf sets X1, X2.
    pub leaf_sets: [Vec<u32>; 2],
    /// Per side: each growth round's added leaves, oldest first, since the
    /// last reset.
    pub batches: [Vec<Vec<u32>>; 2],
    pub f: FGraph,
    pub stats: TreeStats,
}

impl TreeState {
    /// All edges of T = T1 ∪ P ∪ T2.
    pub fn all_edges(&self) -> Vec<(u32, u32)> {
        let mut edges: Vec<(u32, u32)> =
            self.spine.windows(2).map(|w| (w[0], w[1])).collect();
        edges.extend_from_slice(&self.tree_edges);
        edges
    }

    pub fn tree_vertex_count(&self) -> usize {
        self.spine.len() + self.side_vertices[0].len() + self.side_vertices[1].len() - 2
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RSets {
    pub r1: Vec<u32>,
    pub r2: Vec<u32>,
    pub rounds_back_used: usize,
    pub widened: bool,
}

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("unexplored set exhausted at path length {} (target {target})", stats.path_len)]
    Exhausted { target: usize, stats: Box<DfsStats> },
    #[error("DFS S1 cap {cap} tripped")]
    DfsS1Cap { cap: usize, stats: Box<DfsStats> },
    #[error("DFS S2 cap {cap} tripped")]
    DfsS2Cap { cap: usize, stats: Box<DfsStats> },
    #[error("tree growth S1 cap {cap} tripped")]
    TreeS1Cap { cap: usize, stats: Box<TreeStats> },
    #[error("tree growth S2 cap {cap} tripped")]
    TreeS2Cap { cap: usize, stats: Box<TreeStats> },
    #[error("spine would shrink below the floor {floor}")]
    SpineFloor { floor: usize, stats: Box<TreeStats> },
    #[error("input path has {len} vertices, below the floor {floor}")]
    PathTooShort { len: usize, floor: usize },
    #[error("graph edge ({0}, {1}) is absent from the auxiliary graph")]
    EdgeOutsideAux(u32, u32),
    #[error("goodness query failed: {0}")]
    Goodness(#[from] crate::goodness::GoodnessError),
    #[error("internal accounting failed: {0}")]
    Accounting(String),
}

impl SearchError {
    /// The run statistics frozen into the error, when the variant has them.
    pub fn stats_json(&self) -> Option<serde_json::Value> {
        match self {
            SearchError::Exhausted { stats, .. }
            | SearchError::DfsS1Cap { stats, .. }
            | SearchError::DfsS2Cap { stats, .. } => serde_json::to_value(stats).ok(),
            SearchError::TreeS1Cap { stats, .. }
            | SearchError::TreeS2Cap { stats, .. }
            | SearchError::SpineFloor { stats, .. } => serde_json::to_value(stats).ok(),
            _ => None,
        }
    }
}

/// Hyperedge id -> its auxiliary edge endpoints (the inverse of the
/// backing map; one entry per aux edge).
fn aux_inverse(ctx: &GoodnessContext) -> HashMap<usize, (u32, u32)> {
    ctx.aux.edges.iter().map(|r| (r.hyperedge, r.endpoints)).collect()
}

fn support_of(g: &Graph) -> Vec<u32> {
    (0..g.vertex_count() as u32).filter(|&v| g.degree(v) > 0).collect()
}

fn check_subgraph_of_aux(gprime: &Graph, ctx: &GoodnessContext) -> Result<(), SearchError> {
    if gprime.vertex_count() != ctx.aux.graph.vertex_count() {
        return Err(SearchError::Accounting(format!(
            "vertex space mismatch: {} vs aux {}",
            gprime.vertex_count(),
            ctx.aux.graph.vertex_count()
        )));
    }
    for (_, u, v) in gprime.edges() {
        if ctx.aux.graph.edge_id(u, v).is_none() {
            return Err(SearchError::EdgeOutsideAux(u, v));
        }
    }
    Ok(())
}

/// Modified depth-first search for a long good path.
///
/// Each round: restart from the smallest unexplored vertex if the path is
/// empty; retire a dead-end endpoint to S1; otherwise extend by the
/// smallest unexplored neighbor. A good extension records its backing
/// hyperedge in F as an isolated vertex; a ruined one retires the new
/// vertex (and the ruining hyperedge's own aux endpoints) to S2 and grows F
/// by one or two vertices and two or three edges. Succeeds as soon as the
/// path carries `profile.path_target_edges` edges.
pub fn find_good_path(
    gprime: &Graph,
    ctx: &GoodnessContext,
    profile: &SearchProfile,
    debug_invariants: bool,
) -> Result<PathResult, SearchError> {
    check_subgraph_of_aux(gprime, ctx)?;
    let inverse = aux_inverse(ctx);
    let n = gprime.vertex_count();
    let mut state = vec![VertexState::Outside; n];
    let support = support_of(gprime);
    for &v in &support {
        state[v as usize] = VertexState::U;
    }
    let mut u_count = support.len();
    let mut cursor = 0usize;
    let mut p: Vec<u32> = Vec::new();
    let mut f = FGraph::default();
    let mut stats = DfsStats::default();
    let mut s1 = 0usize;
    let mut s2 = 0usize;
    let max_rounds = 20 * (n + 10) + 1000;

    let snapshot = |stats: &mut DfsStats, p: &[u32], f: &FGraph, s1, s2, u| {
        stats.path_len = p.len();
        stats.s1 = s1;
        stats.s2 = s2;
        stats.u_left = u;
        stats.f_vertices = f.vertex_count();
        stats.f_edges = f.edge_count();
    };

    loop {
        if stats.rounds >= max_rounds {
            snapshot(&mut stats, &p, &f, s1, s2, u_count);
            return Err(SearchError::Accounting(format!(
                "round guard tripped after {} rounds",
                stats.rounds
            )));
        }
        stats.rounds += 1;

        // Step 1: restart from the smallest unexplored vertex.
        if p.is_empty() {
            while cursor < n && state[cursor] != VertexState::U {
                cursor += 1;
            }
            if cursor == n {
                snapshot(&mut stats, &p, &f, s1, s2, u_count);
                return Err(SearchError::Exhausted {
                    target: profile.path_target_edges,
                    stats: Box::new(stats),
                });
            }
            let v = cursor as u32;
            state[v as usize] = VertexState::P;
            u_count -= 1;
            p.push(v);
            stats.restarts += 1;
        }
        let v = *p.last().unwrap();

        // Smallest unexplored neighbor, if any. Adjacency lists are sorted.
        let next = gprime
            .neighbors(v)
            .iter()
            .copied()
            .find(|&w| state[w as usize] == VertexState::U);
        match next {
            None => {
                // Step 2: dead end.
                p.pop();
                state[v as usize] = VertexState::S1;
                s1 += 1;
                stats.dead_ends += 1;
                if s1 >= profile.dfs_s1_cap {
                    snapshot(&mut stats, &p, &f, s1, s2, u_count);
                    return Err(SearchError::DfsS1Cap {
                        cap: profile.dfs_s1_cap,
                        stats: Box::new(stats),
                    });
                }
            }
            Some(u) => {
                // Step 3: extend and test.
                let ruin = ctx.ruin_witness(&p, u)?;
                u_count -= 1;
                p.push(u);
                state[u as usize] = VertexState::P;
                match ruin {
                    None => {
                        stats.good_extensions += 1;
                        let h1 = ctx
                            .backing_hyperedge(v, u)
                            .ok_or(SearchError::EdgeOutsideAux(v, u))? as u32;
                        assert!(
                            f.add_vertex(h1),
                            "hyperedge {h1} re-entered F although an endpoint was unexplored"
                        );
                        if p.len() - 1 >= profile.path_target_edges {
                            snapshot(&mut stats, &p, &f, s1, s2, u_count);
                            return Ok(PathResult { path: p, f, stats });
                        }
                    }
                    Some(w) => {
                        // Step 4: ruined extension.
                        stats.ruined_extensions += 1;
                        let h1 = ctx
                            .backing_hyperedge(v, u)
                            .ok_or(SearchError::EdgeOutsideAux(v, u))? as u32;
                        let h2 = w.hyperedge as u32;
                        if !f.contains_vertex(h2) {
                            let met = w.met_path_hyperedge.ok_or_else(|| {
                                SearchError::Accounting(
                                    "fresh ruin witness lacks a met path hyperedge".into(),
                                )
                            })? as u32;
                            f.add_edge(h2, met, shared_label(ctx.hyper, h2 as usize, met as usize));
                        }
                        assert!(
                            f.add_vertex(h1),
                            "hyperedge {h1} re-entered F although an endpoint was unexplored"
                        );
                        f.add_edge(h1, h2, shared_label(ctx.hyper, h1 as usize, h2 as usize));
                        if p.len() < 3 {
                            return Err(SearchError::Accounting(
                                "a single-edge path was ruined; host is not linear".into(),
                            ));
                        }
                        let vprev = p[p.len() - 3];
                        let hvv = ctx
                            .backing_hyperedge(vprev, v)
                            .ok_or(SearchError::EdgeOutsideAux(vprev, v))?
                            as u32;
                        f.add_edge(h1, hvv, shared_label(ctx.hyper, h1 as usize, hvv as usize));
                        // Retire the ruining hyperedge's aux endpoints.
                        if let Some(&(x, y)) = inverse.get(&(h2 as usize)) {
                            for z in [x, y] {
                                if state[z as usize] == VertexState::U {
                                    state[z as usize] = VertexState::S2;
                                    u_count -= 1;
                                    s2 += 1;
                                }
                            }
                        }
                        p.pop();
                        state[u as usize] = VertexState::S2;
                        s2 += 1;
                        if s2 >= profile.dfs_s2_cap {
                            snapshot(&mut stats, &p, &f, s1, s2, u_count);
                            return Err(SearchError::DfsS2Cap {
                                cap: profile.dfs_s2_cap,
                                stats: Box::new(stats),
                            });
                        }
                    }
                }
            }
        }

        if debug_invariants {
            if let Some(msg) = dfs_invariant_violation(ctx, &p, &f, s1, s2, &state) {
                stats.invariant_violations += 1;
                if stats.first_violation.is_none() {
                    stats.first_violation = Some(msg);
                }
            }
        }
    }
}

/// First violated round-boundary invariant of the DFS, if any.
fn dfs_invariant_violation(
    ctx: &GoodnessContext,
    p: &[u32],
    f: &FGraph,
    s1: usize,
    s2: usize,
    state: &[VertexState],
) -> Option<String> {
    if p.len() >= 2 {
        match ctx.is_good_path(p) {
            Ok(cert) if !cert.verdict => {
                return Some(format!("path not good: {:?}", cert.witness));
            }
            Err(e) => return Some(format!("path check failed: {e}")),
            _ => {}
        }
    }
    let (v_f, e_f) = (f.vertex_count() as f64, f.edge_count() as f64);
    if (s2 as f64) / 3.0 > v_f {
        return Some(format!("v(F) = {v_f} below |S2|/3 = {}", s2 as f64 / 3.0));
    }
    if v_f > (p.len() + s1 + 2 * s2) as f64 {
        return Some(format!("v(F) = {v_f} above |P|+|S1|+2|S2| = {}", p.len() + s1 + 2 * s2));
    }
    if e_f < 1.5 * (v_f - (p.len() + s1) as f64) {
        return Some(format!(
            "e(F) = {e_f} below (3/2)(v(F)-|P|-|S1|) = {}",
            1.5 * (v_f - (p.len() + s1) as f64)
        ));
    }
    if has_sunflower_cycle(&f.to_intersection_graph(ctx.hyper.edge_count())) {
        return Some("F contains a sunflower cycle".into());
    }
    // Endpoints of F hyperedges must be out of U.
    for &h in &f.vertices {
        if let Some(&(x, y)) = aux_inverse(ctx).get(&(h as usize)) {
            for z in [x, y] {
                if state[z as usize] == VertexState::U {
                    return Some(format!("aux endpoint {z} of F hyperedge {h} is still in U"));
                }
            }
        }
    }
    None
}

struct Side {
    endpoint: u32,
    tree: HashSet<u32>,
    active_leaves: Vec<u32>,
    all_leaves: BTreeSet<u32>,
    batches: Vec<Vec<u32>>,
}

impl Side {
    fn fresh(endpoint: u32) -> Side {
        Side {
            endpoint,
            tree: HashSet::from([endpoint]),
            active_leaves: vec![endpoint],
            all_leaves: BTreeSet::from([endpoint]),
            batches: Vec::new(),
        }
    }
}

/// Alternating tree growth from the good path's endpoints.
///
/// Rounds grow the side with the smaller active leaf set by a factor of
/// `growth_factor` or, failing that, either dismantle both trees and
/// shorten the spine (too few unexplored neighbors) or retire a batch of
/// ruined candidates into S2 with the two-or-three-edge F accounting.
/// Succeeds when T = T1 ∪ P ∪ T2 reaches `profile.tree_target` vertices.
pub fn grow_trees(
    gprime: &Graph,
    ctx: &GoodnessContext,
    path: &[u32],
    profile: &SearchProfile,
    debug_invariants: bool,
) -> Result<TreeState, SearchError> {
    check_subgraph_of_aux(gprime, ctx)?;
    if path.len() < profile.p_floor.max(3) {
        return Err(SearchError::PathTooShort {
            len: path.len(),
            floor: profile.p_floor.max(3),
        });
    }
    let inverse = aux_inverse(ctx);
    let n = gprime.vertex_count();
    let mut state = vec![VertexState::Outside; n];
    for &v in &support_of(gprime) {
        state[v as usize] = VertexState::U;
    }
    let mut u_count = state.iter().filter(|&&s| s == VertexState::U).count();
    let mut spine: VecDeque<u32> = path.iter().copied().collect();
    // Parent records exist only for grown tree vertices; each chain ends at
    // the spine endpoint its side hangs from. The invariants and the final
    // state report the current spine midpoint as the tree's root anchor.
    let mut parent: HashMap<u32, u32> = HashMap::new();
    for &v in path.iter() {
        state[v as usize] = VertexState::P;
        u_count -= 1;
    }

    let mut f = FGraph::default();
    // F starts with the hyperedges of all gprime edges induced by the path.
    for (_, a, b) in gprime.edges() {
        if state[a as usize] == VertexState::P && state[b as usize] == VertexState::P {
            let h = ctx.backing_hyperedge(a, b).ok_or(SearchError::EdgeOutsideAux(a, b))?;
            f.add_vertex(h as u32);
        }
    }
    // Seeded and tree-edge hyperedges enter F as bare vertices with no edge
    // guarantee; the density invariant discounts exactly those.
    let f_seeded = f.vertex_count();
    let mut f_tree_debt = 0usize;

    let mut sides = [Side::fresh(spine[0]), Side::fresh(*spine.back().unwrap())];
    let mut tree_edges: Vec<(u32, u32)> = Vec::new();
    let mut s1 = 0usize;
    let mut s2 = 0usize;
    let mut claim_set: BTreeSet<u32> = BTreeSet::new();
    let mut stats = TreeStats::default();
    let max_rounds = 20 * (n + 10) + 1000;

    let tree_size = |spine: &VecDeque<u32>, sides: &[Side; 2]| {
        spine.len() + sides[0].tree.len() + sides[1].tree.len() - 2
    };
    let nbhd_in_u = |g: &Graph, set: &BTreeSet<u32>, state: &[VertexState]| {
        let mut out: Vec<u32> = set
            .iter()
            .flat_map(|&x| g.neighbors(x).iter().copied())
            .filter(|&w| state[w as usize] == VertexState::U)
            .collect();
        out.sort_unstable();
        out.dedup();
        out.len()
    };
    let snapshot = |stats: &mut TreeStats,
                    spine: &VecDeque<u32>,
                    sides: &[Side; 2],
                    f: &FGraph,
                    s1: usize,
                    s2: usize,
                    u: usize,
                    claim: &BTreeSet<u32>,
                    claim_nbhd: usize| {
        stats.tree_size = spine.len() + sides[0].tree.len() + sides[1].tree.len() - 2;
        stats.spine_len = spine.len();
        stats.s1 = s1;
        stats.s2 = s2;
        stats.u_left = u;
        stats.f_vertices = f.vertex_count();
        stats.f_edges = f.edge_count();
        stats.claim_audit =
            if claim.is_empty() { None } else { Some((claim.len(), claim_nbhd)) };
    };

    loop {
        if stats.rounds >= max_rounds {
            let cn = nbhd_in_u(gprime, &claim_set, &state);
            snapshot(&mut stats, &spine, &sides, &f, s1, s2, u_count, &claim_set, cn);
            return Err(SearchError::Accounting(format!(
                "round guard tripped after {} rounds",
                stats.rounds
            )));
        }
        stats.rounds += 1;

        // The side with the smaller active leaf set grows this round.
        let (a, b) = if sides[0].active_leaves.len() <= sides[1].active_leaves.len() {
            (0, 1)
        } else {
            (1, 0)
        };
        let x2 = sides[b].active_leaves.len();
        let need = (profile.growth_factor * x2 as f64).ceil() as usize;
        // The pool must hold at least 4·need − 1 candidates: when fewer
        // than `need` are good, each surviving ruined candidate deleted at
        // most two others, so ruined survivors number at least
        // (|B| − need + 1) / 3 ≥ need. Step 5 relies on this count.
        let b_size =
            ((profile.expansion_threshold * x2 as f64).ceil() as usize).max(4 * need - 1);

        // Unexplored neighborhood of the active leaf set, ascending.
        let mut candidates: Vec<u32> = sides[a]
            .active_leaves
            .iter()
            .flat_map(|&x| gprime.neighbors(x).iter().copied())
            .filter(|&w| state[w as usize] == VertexState::U)
            .collect();
        candidates.sort_unstable();
        candidates.dedup();

        if candidates.len() <= b_size {
            // Step 1: dismantle both trees and shorten the spine.
            if spine.len() - 1 < profile.p_floor {
                let cn = nbhd_in_u(gprime, &claim_set, &state);
                snapshot(&mut stats, &spine, &sides, &f, s1, s2, u_count, &claim_set, cn);
                return Err(SearchError::SpineFloor {
                    floor: profile.p_floor,
                    stats: Box::new(stats),
                });
            }
            stats.dismantles += 1;
            claim_set.extend(sides[a].active_leaves.iter().copied());
            let other_endpoint = sides[b].endpoint;
            for side in [a, b] {
                for &w in sides[side].tree.iter() {
                    if w != other_endpoint {
                        state[w as usize] = VertexState::S1;
                        s1 += 1;
                    }
                }
            }
            // The active endpoint also leaves the spine.
            let new_endpoint;
            if sides[a].endpoint == spine[0] {
                spine.pop_front();
                new_endpoint = spine[0];
            } else {
                spine.pop_back();
                new_endpoint = *spine.back().unwrap();
            }
            sides[a] = Side::fresh(new_endpoint);
            sides[b] = Side::fresh(other_endpoint);
            tree_edges.clear();
        } else {
            // Step 2: per candidate, the connecting leaf is its smallest
            // neighbor inside the active leaf set.
            let bvec: Vec<u32> = candidates[..b_size].to_vec();
            let leafset: HashSet<u32> = sides[a].active_leaves.iter().copied().collect();
            let index_of: HashMap<u32, usize> =
                bvec.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            let vprime_of = |v: u32| -> u32 {
                gprime
                    .neighbors(v)
                    .iter()
                    .copied()
                    .find(|w| leafset.contains(w))
                    .expect("candidate taken from the leaf neighborhood")
            };
            // Chain from a grown vertex to its side's spine endpoint,
            // inclusive; spine vertices carry no parent record, so the walk
            // stops exactly at the endpoint.
            let chain_to_endpoint = |x: u32| -> Vec<u32> {
                let mut out = vec![x];
                let mut cur = x;
                while let Some(&p) = parent.get(&cur) {
                    cur = p;
                    out.push(cur);
                }
                out
            };
            // The spine walked from side b's endpoint over to side a's.
            let spine_from_b: Vec<u32> = if sides[b].endpoint == *spine.back().unwrap() {
                spine.iter().rev().copied().collect()
            } else {
                spine.iter().copied().collect()
            };
            // Maximal tree paths: an opposite leaf, up over the whole
            // spine, ready for the descent into side a.
            let opposite_prefixes: Vec<Vec<u32>> = sides[b]
                .all_leaves
                .iter()
                .map(|&l| {
                    let mut p = chain_to_endpoint(l);
                    p.extend_from_slice(&spine_from_b[1..]);
                    p
                })
                .collect();
            let mut check_paths: HashMap<u32, Vec<Vec<u32>>> = HashMap::new();
            let mut full_paths_to = |vp: u32| -> Vec<Vec<u32>> {
                check_paths
                    .entry(vp)
                    .or_insert_with(|| {
                        let mut down = chain_to_endpoint(vp);
                        down.reverse(); // endpoint .. vp
                        opposite_prefixes
                            .iter()
                            .map(|pre| {
                                let mut p = pre.clone();
                                p.extend_from_slice(&down[1..]);
                                p
                            })
                            .collect()
                    })
                    .clone()
            };

            // Step 3: deletion pass. Verdicts are against the unchanged T.
            let mut in_b = vec![true; bvec.len()];
            let mut ruin_of: Vec<Option<(u32, Option<u32>)>> = vec![None; bvec.len()];
            let mut goods: Vec<usize> = Vec::new();
            for i in 0..bvec.len() {
                if !in_b[i] {
                    continue;
                }
                let v = bvec[i];
                let vp = vprime_of(v);
                let mut witness = None;
                for p_check in full_paths_to(vp) {
                    if let Some(w) = ctx.ruin_witness(&p_check, v)? {
                        witness = Some(w);
                        break;
                    }
                }
                stats.cand_seen += 1;
                match witness {
                    None => {
                        stats.goods_seen += 1;
                        goods.push(i);
                    }
                    Some(w) => {
                        ruin_of[i] =
                            Some((w.hyperedge as u32, w.met_path_hyperedge.map(|m| m as u32)));
                        if let Some(&(x, y)) = inverse.get(&w.hyperedge) {
                            for z in [x, y] {
                                if let Some(&j) = index_of.get(&z) {
                                    if j > i {
                                        in_b[j] = false;
                                    }
                                }
                            }
                        }
                    }
                }
            }

            if goods.len() >= need {
                // Step 4: grow the active side.
                stats.grew += 1;
                let mut new_leaves = Vec::with_capacity(need);
                for &i in goods.iter().take(need) {
                    let v = bvec[i];
                    let vp = vprime_of(v);
                    parent.insert(v, vp);
                    sides[a].tree.insert(v);
                    sides[a].all_leaves.remove(&vp);
                    sides[a].all_leaves.insert(v);
                    tree_edges.push((vp, v));
                    state[v as usize] = VertexState::Tree;
                    u_count -= 1;
                    new_leaves.push(v);
                }
                sides[a].active_leaves = new_leaves.clone();
                sides[a].batches.push(new_leaves);
            } else {
                // Step 5: a batch of ruined candidates, retired with the
                // two-or-three-edge F accounting.
                stats.bad_rounds += 1;
                let bprime: Vec<usize> = (0..bvec.len())
                    .filter(|&i| in_b[i] && ruin_of[i].is_some())
                    .take(need)
                    .collect();
                if bprime.len() < need {
                    let cn = nbhd_in_u(gprime, &claim_set, &state);
                    snapshot(&mut stats, &spine, &sides, &f, s1, s2, u_count, &claim_set, cn);
                    return Err(SearchError::Accounting(format!(
                        "step 5 found only {} of {} ruined candidates",
                        bprime.len(),
                        need
                    )));
                }
                // All tree vertices off the spine retire to S2, and every
                // grown tree edge's hyperedge enters F.
                for side in [a, b] {
                    for &w in sides[side].tree.iter() {
                        if w != sides[side].endpoint {
                            state[w as usize] = VertexState::S2;
                            s2 += 1;
                        }
                    }
                }
                for &(x, y) in &tree_edges {
                    let h = ctx.backing_hyperedge(x, y).ok_or(SearchError::EdgeOutsideAux(x, y))?;
                    assert!(
                        f.add_vertex(h as u32),
                        "tree-edge hyperedge {h} re-entered F although an endpoint was unexplored"
                    );
                    f_tree_debt += 1;
                }
                for &i in &bprime {
                    let v = bvec[i];
                    let vp = vprime_of(v);
                    let (h_i, met) = ruin_of[i].unwrap();
                    state[v as usize] = VertexState::S2;
                    u_count -= 1;
                    s2 += 1;
                    let h_edge =
                        ctx.backing_hyperedge(vp, v).ok_or(SearchError::EdgeOutsideAux(vp, v))?
                            as u32;
                    assert!(
                        f.add_vertex(h_edge),
                        "candidate hyperedge {h_edge} re-entered F although its endpoint was unexplored"
                    );
                    let fresh_hi = !f.contains_vertex(h_i);
                    if let Some(&(x, y)) = inverse.get(&(h_i as usize)) {
                        for z in [x, y] {
                            if state[z as usize] == VertexState::U {
                                state[z as usize] = VertexState::S2;
                                u_count -= 1;
                                s2 += 1;
                            }
                        }
                    }
                    // A grown connecting leaf carries a recorded parent; a
                    // spine endpoint's upward edge is its spine edge.
                    let vpp = match parent.get(&vp) {
                        Some(&p) => p,
                        None => {
                            if vp == spine[0] {
                                spine[1]
                            } else {
                                debug_assert_eq!(vp, *spine.back().unwrap());
                                spine[spine.len() - 2]
                            }
                        }
                    };
                    let h_up = ctx
                        .backing_hyperedge(vpp, vp)
                        .ok_or(SearchError::EdgeOutsideAux(vpp, vp))?
                        as u32;
                    f.add_edge(h_edge, h_up, shared_label(ctx.hyper, h_edge as usize, h_up as usize));
                    f.add_edge(h_edge, h_i, shared_label(ctx.hyper, h_edge as usize, h_i as usize));
                    if fresh_hi {
                        let met = met.ok_or_else(|| {
                            SearchError::Accounting(
                                "fresh ruin witness lacks a met path hyperedge".into(),
                            )
                        })?;
                        f.add_edge(h_i, met, shared_label(ctx.hyper, h_i as usize, met as usize));
                    }
                }
                // Both trees collapse back to their spine endpoints.
                sides[a] = Side::fresh(sides[a].endpoint);
                sides[b] = Side::fresh(sides[b].endpoint);
                tree_edges.clear();
            }
        }

        if debug_invariants {
            if let Some(msg) = tree_invariant_violation(
                ctx,
                gprime,
                &spine,
                spine[spine.len() / 2],
                &sides,
                &tree_edges,
                &f,
                f_seeded,
                f_tree_debt,
                s2,
                &state,
                &claim_set,
                profile,
            ) {
                stats.invariant_violations += 1;
                if stats.first_violation.is_none() {
                    stats.first_violation = Some(msg);
                }
            }
        }

        // End-of-round termination checks; success takes precedence.
        if tree_size(&spine, &sides) >= profile.tree_target {
            let cn = nbhd_in_u(gprime, &claim_set, &state);
            snapshot(&mut stats, &spine, &sides, &f, s1, s2, u_count, &claim_set, cn);
            let mut side_vertices = [Vec::new(), Vec::new()];
            let mut leaf_sets = [Vec::new(), Vec::new()];
            let mut batches = [Vec::new(), Vec::new()];
            for i in 0..2 {
                let mut vs: Vec<u32> = sides[i].tree.iter().copied().collect();
                vs.sort_unstable();
                side_vertices[i] = vs;
                leaf_sets[i] = sides[i].active_leaves.clone();
                batches[i] = sides[i].batches.clone();
            }
            return Ok(TreeState {
                spine: spine.iter().copied().collect(),
                root: spine[spine.len() / 2],
                tree_edges,
                side_vertices,
                leaf_sets,
                batches,
                f,
                stats,
            });
        }
        if s1 >= profile.tree_s1_cap {
            let cn = nbhd_in_u(gprime, &claim_set, &state);
            snapshot(&mut stats, &spine, &sides, &f, s1, s2, u_count, &claim_set, cn);
            return Err(SearchError::TreeS1Cap {
                cap: profile.tree_s1_cap,
                stats: Box::new(stats),
            });
        }
        if s2 >= profile.tree_s2_cap {
            let cn = nbhd_in_u(gprime, &claim_set, &state);
            snapshot(&mut stats, &spine, &sides, &f, s1, s2, u_count, &claim_set, cn);
            return Err(SearchError::TreeS2Cap {
                cap: profile.tree_s2_cap,
                stats: Box::new(stats),
            });
        }
    }
}

/// First violated round-boundary invariant of the tree growth, if any.
#[allow(clippy::too_many_arguments)]
fn tree_invariant_violation(
    ctx: &GoodnessContext,
    gprime: &Graph,
    spine: &VecDeque<u32>,
    root: u32,
    sides: &[Side; 2],
    tree_edges: &[(u32, u32)],
    f: &FGraph,
    f_seeded: usize,
    f_tree_debt: usize,
    s2: usize,
    state: &[VertexState],
    claim_set: &BTreeSet<u32>,
    profile: &SearchProfile,
) -> Option<String> {
    // (A) T is a good tree rooted at the fixed root.
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let spine_vec: Vec<u32> = spine.iter().copied().collect();
    edges.extend(spine_vec.windows(2).map(|w| (w[0], w[1])));
    edges.extend_from_slice(tree_edges);
    match ctx.is_good_tree(&edges, root) {
        Ok(cert) if !cert.verdict => return Some(format!("tree not good: {:?}", cert.witness)),
        Err(e) => return Some(format!("tree check failed: {e}")),
        _ => {}
    }
    // Leaf-ratio discipline.
    let (l0, l1) = (sides[0].active_leaves.len(), sides[1].active_leaves.len());
    let factor = |small: usize| (profile.growth_factor * small as f64).ceil() as usize;
    if !(l0 == l1 || l0 == factor(l1) || l1 == factor(l0)) {
        return Some(format!("leaf ratio broken: |X1| = {l0}, |X2| = {l1}"));
    }
    // (D) F size window. Path-seeded hyperedges stand in for the length-n
    // term of the original asymptotic claim; the rest is exact counting.
    let (v_f, e_f) = (f.vertex_count() as f64, f.edge_count() as f64);
    if (s2 as f64) / 4.0 > v_f {
        return Some(format!("v(F) = {v_f} below |S2|/4 = {}", s2 as f64 / 4.0));
    }
    if v_f > (f_seeded + 2 * s2) as f64 {
        return Some(format!(
            "v(F) = {v_f} above seeded+2|S2| = {}",
            f_seeded + 2 * s2
        ));
    }
    // (E) F density and sunflower freedom. Every retired candidate puts at
    // least three F edges behind every two F vertices; seeded and tree-edge
    // vertices carry no edges and are discounted exactly.
    let discount = (f_seeded + f_tree_debt) as f64;
    if e_f < 1.5 * (v_f - discount) - 1e-9 {
        return Some(format!(
            "e(F) = {e_f} below 1.5(v(F)-seeded-tree) = {}",
            1.5 * (v_f - discount)
        ));
    }
    if has_sunflower_cycle(&f.to_intersection_graph(ctx.hyper.edge_count())) {
        return Some("F contains a sunflower cycle".into());
    }
    // (F) spine floor.
    if spine.len() < profile.p_floor {
        return Some(format!("spine length {} below the floor {}", spine.len(), profile.p_floor));
    }
    // (C) dismantled leaf sets have a bounded unexplored neighborhood.
    if !claim_set.is_empty() {
        let mut nbhd: Vec<u32> = claim_set
            .iter()
            .flat_map(|&x| gprime.neighbors(x).iter().copied())
            .filter(|&w| state[w as usize] == VertexState::U)
            .collect();
        nbhd.sort_unstable();
        nbhd.dedup();
        if (nbhd.len() as f64) > profile.claim_scale * claim_set.len() as f64 {
            return Some(format!(
                "|N_U(S)| = {} exceeds claim_scale * |S| = {}",
                nbhd.len(),
                profile.claim_scale * claim_set.len() as f64
            ));
        }
    }
    None
}

/// The last `rounds_back` growth batches of each side, widened as needed so
/// each side's remnant |V(T_i)| - |R_i| fits the spine budget.
pub fn compute_r_sets(ts: &TreeState, rounds_back: usize, spine_budget: usize) -> RSets {
    let max_batches = ts.batches[0].len().max(ts.batches[1].len());
    let mut rb = rounds_back;
    loop {
        let collect = |side: usize| -> Vec<u32> {
            let batches = &ts.batches[side];
            let start = batches.len().saturating_sub(rb);
            let mut out: Vec<u32> =
                batches[start..].iter().flat_map(|b| b.iter().copied()).collect();
            out.sort_unstable();
            out
        };
        let r1 = collect(0);
        let r2 = collect(1);
        let fits = |side: usize, r: &Vec<u32>| ts.side_vertices[side].len() - r.len() <= spine_budget;
        if (fits(0, &r1) && fits(1, &r2)) || rb >= max_batches {
            return RSets { r1, r2, rounds_back_used: rb, widened: rb != rounds_back };
        }
        rb += 1;
    }
}
