//! Goodness of auxiliary paths, trees, and cycles.
//!
//! A path in the auxiliary graph is *good* when (1) the hyperedges backing
//! its edges are pairwise disjoint, except that adjacent path edges share
//! exactly their common path vertex, and (2) no other hyperedge meets the
//! union of the backing hyperedges in two or more vertices. Good trees have
//! every root-through path good; good cycles come with a covering family of
//! good subpaths hitting every pair of cycle edges. Goodness is what makes
//! the final lift vertex-disjoint, so these checks gate every search step.

use crate::graphcore::{Hypergraph, IncidenceIndex};
use crate::hostbuild::AuxGraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GoodnessError {
    #[error("vertex sequence is not a path of the auxiliary graph: {0}")]
    NotAPath(String),
    #[error("edge set is not a tree containing the root: {0}")]
    NotATree(String),
    #[error("vertex sequence is not a cycle of the auxiliary graph: {0}")]
    NotACycle(String),
    #[error("cover member {index} is not a subpath of the cycle")]
    CoverMemberNotSubpath { index: usize },
    #[error("ruin query malformed: {0}")]
    BadRuinQuery(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum GoodnessViolation {
    /// Condition 1: two backing hyperedges intersect beyond what adjacency
    /// on the path allows.
    EdgePairOverlap {
        edge_a: (u32, u32),
        edge_b: (u32, u32),
        hyp_a: usize,
        hyp_b: usize,
        shared: Vec<u32>,
    },
    /// Condition 2: an outside hyperedge meets the union of backing
    /// hyperedges in two or more vertices.
    MeddlingHyperedge { hyperedge: usize, touched: Vec<u32> },
    /// Cycle cover: some pair of cycle edges appears in no cover member.
    UncoveredEdgePair { edge_a: (u32, u32), edge_b: (u32, u32) },
    /// Cycle cover: a member fails its own goodness check.
    BadCoverMember { index: usize, inner: Box<GoodnessViolation> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubjectKind {
    Path,
    Tree,
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoodCertificate {
    pub kind: SubjectKind,
    pub subject: Vec<u32>,
    pub verdict: bool,
    pub witness: Option<GoodnessViolation>,
}

/// A hyperedge whose presence makes an extension bad. `far` records whether
/// it reaches a path edge at distance two or more from the extension point
/// (the shape the high-girth analysis predicts); near-ruins appear only at
/// low girth. For a third-party ruin, `met_path_hyperedge` is the first
/// path hyperedge (in path order) the witness intersects; for a direct
/// collision of the new hyperedge with a path hyperedge it is None and
/// `hyperedge` is the collided path hyperedge itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuinWitness {
    pub hyperedge: usize,
    pub far: bool,
    pub met_path_hyperedge: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub trials: usize,
    pub paths_checked: usize,
    pub violations: usize,
    pub first_violation: Option<(Vec<u32>, GoodnessViolation)>,
}

/// Read-only context bundling the hypergraph, its incidence index, and the
/// auxiliary graph. All goodness queries run through it.
pub struct GoodnessContext<'a> {
    pub hyper: &'a Hypergraph,
    pub aux: &'a AuxGraph,
    idx: IncidenceIndex,
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

impl<'a> GoodnessContext<'a> {
    pub fn new(hyper: &'a Hypergraph, aux: &'a AuxGraph) -> GoodnessContext<'a> {
        GoodnessContext { hyper, aux, idx: hyper.incidence_index() }
    }

    /// The hyperedge backing aux edge (u, v), if that edge exists.
    pub fn backing_hyperedge(&self, u: u32, v: u32) -> Option<usize> {
        self.aux.graph.edge_id(u, v).map(|id| self.aux.hyperedge_of(id))
    }

    /// The hyperedge backing aux edge (u, v).
    fn backing(&self, u: u32, v: u32) -> Result<usize, GoodnessError> {
        self.aux
            .graph
            .edge_id(u, v)
            .map(|id| self.aux.hyperedge_of(id))
            .ok_or_else(|| GoodnessError::NotAPath(format!("({u}, {v}) is not an aux edge")))
    }

    fn path_hyperedges(&self, p: &[u32]) -> Result<Vec<usize>, GoodnessError> {
        if p.is_empty() {
            return Err(GoodnessError::NotAPath("empty vertex sequence".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &v in p {
            if !seen.insert(v) {
                return Err(GoodnessError::NotAPath(format!("vertex {v} repeats")));
            }
        }
        p.windows(2).map(|w| self.backing(w[0], w[1])).collect()
    }

    /// Union (sorted, deduplicated) of the vertices of the given hyperedges.
    fn hyperedge_union(&self, hs: &[usize]) -> Vec<u32> {
        let mut u: Vec<u32> = hs.iter().flat_map(|&h| self.hyper.edge(h).iter().copied()).collect();
        u.sort_unstable();
        u.dedup();
        u
    }

    /// First condition-1 violation among the backing hyperedges, if any.
    fn condition1_violation(&self, p: &[u32], hs: &[usize]) -> Option<GoodnessViolation> {
        for i in 0..hs.len() {
            for j in (i + 1)..hs.len() {
                let shared = if hs[i] == hs[j] {
                    self.hyper.edge(hs[i]).to_vec()
                } else {
                    intersect_sorted(self.hyper.edge(hs[i]), self.hyper.edge(hs[j]))
                };
                let ok = if j == i + 1 {
                    shared == vec![p[i + 1]]
                } else {
                    shared.is_empty()
                };
                if !ok {
                    return Some(GoodnessViolation::EdgePairOverlap {
                        edge_a: (p[i], p[i + 1]),
                        edge_b: (p[j], p[j + 1]),
                        hyp_a: hs[i],
                        hyp_b: hs[j],
                        shared,
                    });
                }
            }
        }
        None
    }

    /// First condition-2 violation: the smallest-id hyperedge outside `hs`
    /// meeting their union in two or more vertices.
    fn condition2_violation(&self, hs: &[usize], union: &[u32]) -> Option<GoodnessViolation> {
        let hset: std::collections::HashSet<usize> = hs.iter().copied().collect();
        let mut candidates: Vec<usize> = union
            .iter()
            .flat_map(|&v| self.idx.hyperedges_of(v).iter().map(|&e| e as usize))
            .filter(|e| !hset.contains(e))
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        for f in candidates {
            let touched = intersect_sorted(self.hyper.edge(f), union);
            if touched.len() >= 2 {
                return Some(GoodnessViolation::MeddlingHyperedge { hyperedge: f, touched });
            }
        }
        None
    }

    /// Checks both goodness conditions for a path given as its vertex
    /// sequence. A single vertex is vacuously good.
    pub fn is_good_path(&self, p: &[u32]) -> Result<GoodCertificate, GoodnessError> {
        let hs = self.path_hyperedges(p)?;
        let witness = self.condition1_violation(p, &hs).or_else(|| {
            let union = self.hyperedge_union(&hs);
            self.condition2_violation(&hs, &union)
        });
        Ok(GoodCertificate {
            kind: SubjectKind::Path,
            subject: p.to_vec(),
            verdict: witness.is_none(),
            witness,
        })
    }

    /// Assuming `p` is good, decides whether extending it by the aux edge
    /// (last(p), u) stays good; if not, names a hyperedge to blame. For a
    /// third-party ruin that is the smallest-id hyperedge meeting both the
    /// new backing hyperedge and the old union; for a direct overlap it is
    /// the path hyperedge collided with. Returns None exactly when the
    /// extended path is good.
    pub fn ruin_witness(&self, p: &[u32], u: u32) -> Result<Option<RuinWitness>, GoodnessError> {
        let v = *p.last().ok_or_else(|| GoodnessError::BadRuinQuery("empty path".into()))?;
        if p.contains(&u) {
            return Err(GoodnessError::BadRuinQuery(format!("{u} is already on the path")));
        }
        let h_star = self
            .aux
            .graph
            .edge_id(v, u)
            .map(|id| self.aux.hyperedge_of(id))
            .ok_or_else(|| GoodnessError::BadRuinQuery(format!("({v}, {u}) is not an aux edge")))?;
        let hs = self.path_hyperedges(p)?;
        let star_vs = self.hyper.edge(h_star);

        // Direct overlaps of the new hyperedge with path hyperedges.
        for (i, &he) in hs.iter().enumerate() {
            let shared = if he == h_star {
                star_vs.to_vec()
            } else {
                intersect_sorted(self.hyper.edge(he), star_vs)
            };
            let ok = if i + 1 == hs.len() { shared == vec![v] } else { shared.is_empty() };
            if !ok {
                return Ok(Some(RuinWitness {
                    hyperedge: he,
                    far: false,
                    met_path_hyperedge: None,
                }));
            }
        }

        // Third-party ruins: outside hyperedges meeting the extended union
        // in two or more vertices. Since the old path is good, every such
        // hyperedge touches the new hyperedge (its intersection with the
        // old union alone is at most one vertex), so scanning the incidence
        // lists of the new hyperedge's vertices finds them all.
        let mut extended = self.hyperedge_union(&hs);
        extended.extend_from_slice(star_vs);
        extended.sort_unstable();
        extended.dedup();
        let hset: std::collections::HashSet<usize> = hs.iter().copied().collect();
        let mut candidates: Vec<usize> = star_vs
            .iter()
            .flat_map(|&w| self.idx.hyperedges_of(w).iter().map(|&e| e as usize))
            .filter(|&f| f != h_star && !hset.contains(&f))
            .collect();
        candidates.sort_unstable();
        candidates.dedup();
        for f in candidates {
            let fe = self.hyper.edge(f);
            if intersect_sorted(fe, &extended).len() >= 2 {
                // Far means it reaches a path edge at distance >= 2 from v:
                // hyperedges of edges e_i with i <= m-4 (the last edge is
                // i = m-2, its neighbor i = m-3).
                let far = hs
                    .iter()
                    .take(hs.len().saturating_sub(2))
                    .any(|&he| !intersect_sorted(fe, self.hyper.edge(he)).is_empty());
                let met = hs
                    .iter()
                    .copied()
                    .find(|&he| !intersect_sorted(fe, self.hyper.edge(he)).is_empty());
                return Ok(Some(RuinWitness { hyperedge: f, far, met_path_hyperedge: met }));
            }
        }
        Ok(None)
    }

    /// Every root-through path of the tree must be good: all root-to-leaf
    /// paths plus all leaf-to-leaf paths whose branches differ. Subpaths of
    /// good paths are good, so the maximal paths decide the verdict.
    pub fn is_good_tree(
        &self,
        edges: &[(u32, u32)],
        root: u32,
    ) -> Result<GoodCertificate, GoodnessError> {
        if edges.is_empty() {
            return Ok(GoodCertificate {
                kind: SubjectKind::Tree,
                subject: vec![root],
                verdict: true,
                witness: None,
            });
        }
        // Adjacency + validation.
        let mut adj: std::collections::HashMap<u32, Vec<u32>> = std::collections::HashMap::new();
        for &(a, b) in edges {
            if self.aux.graph.edge_id(a, b).is_none() {
                return Err(GoodnessError::NotATree(format!("({a}, {b}) is not an aux edge")));
            }
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        if !adj.contains_key(&root) {
            return Err(GoodnessError::NotATree(format!("root {root} not in the edge set")));
        }
        if adj.len() != edges.len() + 1 {
            return Err(GoodnessError::NotATree("edge count does not match a tree".into()));
        }
        // BFS from the root; a tree reaches everything exactly once.
        let mut parent: std::collections::HashMap<u32, u32> = std::collections::HashMap::new();
        let mut order = vec![root];
        parent.insert(root, root);
        let mut qi = 0;
        while qi < order.len() {
            let x = order[qi];
            qi += 1;
            for &y in adj[&x].iter() {
                if !parent.contains_key(&y) {
                    parent.insert(y, x);
                    order.push(y);
                }
            }
        }
        if order.len() != adj.len() {
            return Err(GoodnessError::NotATree("edge set is disconnected".into()));
        }

        let path_to_root = |mut x: u32| -> Vec<u32> {
            let mut path = vec![x];
            while x != root {
                x = parent[&x];
                path.push(x);
            }
            path
        };
        let branch_of = |x: u32| -> u32 {
            // Second-to-last vertex on the path to the root (the root's
            // child on x's branch).
            let p = path_to_root(x);
            p[p.len().saturating_sub(2)]
        };
        let leaves: Vec<u32> =
            order.iter().copied().filter(|&x| x != root && adj[&x].len() == 1).collect();

        let mut subject: Vec<u32> = order.clone();
        subject.sort_unstable();

        // Root-to-leaf paths.
        for &l in &leaves {
            let mut p = path_to_root(l);
            p.reverse();
            let cert = self.is_good_path(&p)?;
            if !cert.verdict {
                return Ok(GoodCertificate {
                    kind: SubjectKind::Tree,
                    subject,
                    verdict: false,
                    witness: cert.witness,
                });
            }
        }
        // Leaf-to-leaf paths through the root.
        for i in 0..leaves.len() {
            for j in (i + 1)..leaves.len() {
                if branch_of(leaves[i]) == branch_of(leaves[j]) {
                    continue;
                }
                let mut p = path_to_root(leaves[i]);
                let down = path_to_root(leaves[j]);
                p.extend(down.iter().rev().skip(1));
                let cert = self.is_good_path(&p)?;
                if !cert.verdict {
                    return Ok(GoodCertificate {
                        kind: SubjectKind::Tree,
                        subject,
                        verdict: false,
                        witness: cert.witness,
                    });
                }
            }
        }
        Ok(GoodCertificate { kind: SubjectKind::Tree, subject, verdict: true, witness: None })
    }

    /// A cycle is good relative to a cover of subpaths when every cover
    /// member is a good path and every unordered pair of cycle edges lies
    /// inside some member.
    pub fn is_good_cycle(
        &self,
        q: &[u32],
        cover: &[Vec<u32>],
    ) -> Result<GoodCertificate, GoodnessError> {
        let l = q.len();
        if l < 3 {
            return Err(GoodnessError::NotACycle("fewer than three vertices".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for &v in q {
            if !seen.insert(v) {
                return Err(GoodnessError::NotACycle(format!("vertex {v} repeats")));
            }
        }
        for i in 0..l {
            let (a, b) = (q[i], q[(i + 1) % l]);
            if self.aux.graph.edge_id(a, b).is_none() {
                return Err(GoodnessError::NotACycle(format!("({a}, {b}) is not an aux edge")));
            }
        }

        // Locate each member as a contiguous arc; collect its edge indices.
        let mut covered = vec![vec![false; l]; l];
        for (mi, member) in cover.iter().enumerate() {
            let arc_edges = locate_arc(q, member)
                .ok_or(GoodnessError::CoverMemberNotSubpath { index: mi })?;
            let cert = self.is_good_path(member)?;
            if !cert.verdict {
                return Ok(GoodCertificate {
                    kind: SubjectKind::Cycle,
                    subject: q.to_vec(),
                    verdict: false,
                    witness: Some(GoodnessViolation::BadCoverMember {
                        index: mi,
                        inner: Box::new(cert.witness.unwrap()),
                    }),
                });
            }
            for (ai, &a) in arc_edges.iter().enumerate() {
                for &b in &arc_edges[ai..] {
                    covered[a.min(b)][a.max(b)] = true;
                    covered[a][b] = true;
                }
            }
        }
        for i in 0..l {
            for j in (i + 1)..l {
                if !covered[i][j] {
                    return Ok(GoodCertificate {
                        kind: SubjectKind::Cycle,
                        subject: q.to_vec(),
                        verdict: false,
                        witness: Some(GoodnessViolation::UncoveredEdgePair {
                            edge_a: (q[i], q[(i + 1) % l]),
                            edge_b: (q[j], q[(j + 1) % l]),
                        }),
                    });
                }
            }
        }
        Ok(GoodCertificate {
            kind: SubjectKind::Cycle,
            subject: q.to_vec(),
            verdict: true,
            witness: None,
        })
    }

    /// Samples random non-repeating walks of at most `g` edges in the aux
    /// graph and checks each for goodness. On hosts whose Berge girth
    /// exceeds `g`, zero violations are expected; any hit is either an
    /// implementation bug or a girth violation.
    pub fn short_paths_probe(&self, g: usize, trials: usize, seed: u64) -> ProbeReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let support: Vec<u32> = (0..self.aux.graph.vertex_count() as u32)
            .filter(|&v| self.aux.graph.degree(v) > 0)
            .collect();
        let mut report = ProbeReport {
            trials,
            paths_checked: 0,
            violations: 0,
            first_violation: None,
        };
        if support.is_empty() || g == 0 {
            return report;
        }
        for _ in 0..trials {
            let start = support[rng.random_range(0..support.len())];
            let target = 1 + rng.random_range(0..g);
            let mut path = vec![start];
            for _ in 0..target {
                let cur = *path.last().unwrap();
                let nbrs: Vec<u32> = self
                    .aux
                    .graph
                    .neighbors(cur)
                    .iter()
                    .copied()
                    .filter(|x| !path.contains(x))
                    .collect();
                if nbrs.is_empty() {
                    break;
                }
                path.push(nbrs[rng.random_range(0..nbrs.len())]);
            }
            if path.len() < 2 {
                continue;
            }
            report.paths_checked += 1;
            let cert = self.is_good_path(&path).expect("walk is a valid aux path");
            if !cert.verdict {
                report.violations += 1;
                if report.first_violation.is_none() {
                    report.first_violation = Some((path, cert.witness.unwrap()));
                }
            }
        }
        report
    }
}

/// Matches `member` against the cycle as a contiguous arc (either
/// orientation); returns the cycle-edge indices it covers.
fn locate_arc(q: &[u32], member: &[u32]) -> Option<Vec<usize>> {
    let l = q.len();
    if member.len() < 2 || member.len() > l {
        return None;
    }
    for start in 0..l {
        let fwd = (0..member.len()).all(|t| q[(start + t) % l] == member[t]);
        if fwd {
            return Some((0..member.len() - 1).map(|t| (start + t) % l).collect());
        }
        let bwd = (0..member.len()).all(|t| q[(start + t) % l] == member[member.len() - 1 - t]);
        if bwd {
            return Some((0..member.len() - 1).map(|t| (start + t) % l).collect());
        }
    }
    None
}

/// Auxiliary graph for goodness probes on hosts without a coloring: one aux
/// edge per hyperedge, on its two smallest vertices. Color and lift data
/// are placeholders; only the endpoints and hyperedge ids matter to
/// goodness.
pub fn synthetic_probe_aux(h: &Hypergraph) -> Result<AuxGraph, crate::graphcore::GraphError> {
    use crate::hostbuild::AuxEdgeRecord;
    let pairs: Vec<(u32, u32)> = (0..h.edge_count())
        .map(|e| {
            let ed = h.edge(e);
            (ed[0], ed[1])
        })
        .collect();
    let graph = crate::graphcore::Graph::from_edges(h.vertex_count(), &pairs)?;
    let mut by_id: Vec<Option<AuxEdgeRecord>> = vec![None; pairs.len()];
    for (e, &(a, b)) in pairs.iter().enumerate() {
        let id = graph.edge_id(a, b).expect("just inserted");
        by_id[id] = Some(AuxEdgeRecord {
            hyperedge: e,
            endpoints: (a, b),
            color: 1,
            cycle: Vec::new(),
            short_path: Vec::new(),
            long_path: Vec::new(),
        });
    }
    Ok(AuxGraph {
        graph,
        edges: by_id.into_iter().map(|r| r.expect("bijection")).collect(),
        mode: crate::gadgets::CycleMode::NonInduced,
        cycle_len: 3,
        skipped_no_cycle: 0,
        skipped_off_length: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::CycleMode;
    use crate::graphcore::Graph;
    use crate::hostbuild::AuxEdgeRecord;
    use crate::hypergen::{sample_host_hypergraph, HostParams};

    /// Builds a synthetic aux graph from explicit (u, v, hyperedge) triples.
    fn synth_aux(n: usize, triples: &[(u32, u32, usize)]) -> AuxGraph {
        let pairs: Vec<(u32, u32)> = triples.iter().map(|&(a, b, _)| (a, b)).collect();
        let graph = Graph::from_edges(n, &pairs).unwrap();
        let mut by_id: Vec<Option<AuxEdgeRecord>> = vec![None; triples.len()];
        for &(a, b, h) in triples {
            let id = graph.edge_id(a, b).unwrap();
            by_id[id] = Some(AuxEdgeRecord {
                hyperedge: h,
                endpoints: (a.min(b), a.max(b)),
                color: 1,
                cycle: Vec::new(),
                short_path: Vec::new(),
                long_path: Vec::new(),
            });
        }
        AuxGraph {
            graph,
            edges: by_id.into_iter().map(|r| r.unwrap()).collect(),
            mode: CycleMode::NonInduced,
            cycle_len: 3,
            skipped_no_cycle: 0,
            skipped_off_length: 0,
        }
    }

    /// Two chained hyperedges and an optional meddler f = {1, 3, 9} that
    /// touches both.
    fn chain_host(with_meddler: bool) -> (Hypergraph, AuxGraph) {
        let mut edges = vec![vec![1, 2, 5], vec![2, 3, 6]];
        if with_meddler {
            edges.push(vec![1, 3, 9]);
        }
        let h = Hypergraph::new(10, 3, edges).unwrap();
        let aux = synth_aux(10, &[(1, 2, 0), (2, 3, 1)]);
        (h, aux)
    }

    #[test]
    fn single_edge_and_single_vertex_paths_are_good() {
        let (h, aux) = chain_host(false);
        let ctx = GoodnessContext::new(&h, &aux);
        assert!(ctx.is_good_path(&[1, 2]).unwrap().verdict);
        assert!(ctx.is_good_path(&[7]).unwrap().verdict);
    }

    #[test]
    fn clean_two_edge_path_is_good_and_reversal_invariant() {
        let (h, aux) = chain_host(false);
        let ctx = GoodnessContext::new(&h, &aux);
        assert!(ctx.is_good_path(&[1, 2, 3]).unwrap().verdict);
        assert!(ctx.is_good_path(&[3, 2, 1]).unwrap().verdict);
    }

    #[test]
    fn meddling_hyperedge_detected() {
        let (h, aux) = chain_host(true);
        let ctx = GoodnessContext::new(&h, &aux);
        let cert = ctx.is_good_path(&[1, 2, 3]).unwrap();
        assert!(!cert.verdict);
        match cert.witness {
            Some(GoodnessViolation::MeddlingHyperedge { hyperedge: 2, ref touched }) => {
                assert_eq!(touched, &vec![1, 3]);
            }
            ref w => panic!("unexpected witness {w:?}"),
        }
        // Reversal gives the same verdict.
        assert!(!ctx.is_good_path(&[3, 2, 1]).unwrap().verdict);
    }

    #[test]
    fn adjacent_edges_may_only_share_the_path_vertex() {
        // h0 = {1,2,5}, h1 = {2,3,5}: adjacent aux edges share vertex 5 on
        // top of the path vertex 2.
        let h = Hypergraph::new(10, 3, vec![vec![1, 2, 5], vec![2, 3, 5]]).unwrap();
        let aux = synth_aux(10, &[(1, 2, 0), (2, 3, 1)]);
        let ctx = GoodnessContext::new(&h, &aux);
        let cert = ctx.is_good_path(&[1, 2, 3]).unwrap();
        assert!(!cert.verdict);
        match cert.witness {
            Some(GoodnessViolation::EdgePairOverlap { ref shared, .. }) => {
                assert_eq!(shared, &vec![2, 5]);
            }
            ref w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn distant_edges_must_be_disjoint() {
        // Path 1-2-3-4; h(12) = {1,2,8} and h(34) = {3,4,8} share vertex 8.
        let h = Hypergraph::new(10, 3, vec![
            vec![1, 2, 8],
            vec![2, 3, 7],
            vec![3, 4, 8],
        ])
        .unwrap();
        let aux = synth_aux(10, &[(1, 2, 0), (2, 3, 1), (3, 4, 2)]);
        let ctx = GoodnessContext::new(&h, &aux);
        let cert = ctx.is_good_path(&[1, 2, 3, 4]).unwrap();
        assert!(!cert.verdict);
        match cert.witness {
            Some(GoodnessViolation::EdgePairOverlap { edge_a, edge_b, ref shared, .. }) => {
                assert_eq!(edge_a, (1, 2));
                assert_eq!(edge_b, (3, 4));
                assert_eq!(shared, &vec![8]);
            }
            ref w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn malformed_paths_are_rejected() {
        let (h, aux) = chain_host(false);
        let ctx = GoodnessContext::new(&h, &aux);
        assert!(matches!(ctx.is_good_path(&[]), Err(GoodnessError::NotAPath(_))));
        assert!(matches!(ctx.is_good_path(&[1, 2, 1]), Err(GoodnessError::NotAPath(_))));
        assert!(matches!(ctx.is_good_path(&[1, 3]), Err(GoodnessError::NotAPath(_))));
    }

    #[test]
    fn ruin_witness_matches_full_recheck() {
        // Chain of four aux edges with assorted meddlers; every extension
        // decision must agree with is_good_path on the extended path.
        let h = Hypergraph::new(20, 3, vec![
            vec![1, 2, 10],
            vec![2, 3, 11],
            vec![3, 4, 12],
            vec![4, 5, 13],
            vec![10, 13, 19], // touches h0 and h3
        ])
        .unwrap();
        let aux = synth_aux(20, &[(1, 2, 0), (2, 3, 1), (3, 4, 2), (4, 5, 3)]);
        let ctx = GoodnessContext::new(&h, &aux);
        for end in 2..5u32 {
            let p: Vec<u32> = (1..=end).collect();
            if !ctx.is_good_path(&p).unwrap().verdict {
                continue;
            }
            let u = end + 1;
            let ruin = ctx.ruin_witness(&p, u).unwrap();
            let mut ext = p.clone();
            ext.push(u);
            let good = ctx.is_good_path(&ext).unwrap().verdict;
            assert_eq!(ruin.is_none(), good, "extension {ext:?}");
        }
        // The 4->5 extension is ruined by hyperedge 4 reaching h0 (far).
        let ruin = ctx.ruin_witness(&[1, 2, 3, 4], 5).unwrap().unwrap();
        assert_eq!(ruin.hyperedge, 4);
        assert!(ruin.far);
    }

    #[test]
    fn sibling_edge_at_the_endpoint_is_no_ruin() {
        // A second hyperedge hanging off the path's last vertex meets the
        // extended union only there; it must not be mistaken for a meddler
        // even though it touches both the old union and the new hyperedge.
        let h = Hypergraph::new(40, 3, vec![
            vec![1, 2, 10],
            vec![2, 3, 11],
            vec![3, 4, 12], // the extension
            vec![3, 8, 13], // sibling through vertex 3 only
        ])
        .unwrap();
        let aux = synth_aux(40, &[(1, 2, 0), (2, 3, 1), (3, 4, 2), (3, 8, 3)]);
        let ctx = GoodnessContext::new(&h, &aux);
        assert!(ctx.ruin_witness(&[1, 2, 3], 4).unwrap().is_none());
        assert!(ctx.is_good_path(&[1, 2, 3, 4]).unwrap().verdict);
        // But a hyperedge grabbing two vertices of the new hyperedge alone
        // is a meddler with no met path hyperedge.
        let h2 = Hypergraph::new(40, 3, vec![
            vec![1, 2, 10],
            vec![2, 3, 11],
            vec![3, 4, 12],
            vec![4, 12, 13],
        ])
        .unwrap();
        let ctx2 = GoodnessContext::new(&h2, &aux);
        let ruin = ctx2.ruin_witness(&[1, 2, 3], 4).unwrap().unwrap();
        assert_eq!(ruin.hyperedge, 3);
        assert!(!ruin.far);
        assert_eq!(ruin.met_path_hyperedge, None);
        assert!(!ctx2.is_good_path(&[1, 2, 3, 4]).unwrap().verdict);
    }

    #[test]
    fn near_ruin_is_not_far() {
        // Meddler touches only the new hyperedge and the adjacent edge's.
        let h = Hypergraph::new(20, 3, vec![
            vec![1, 2, 10],
            vec![2, 3, 11],
            vec![3, 4, 12],
            vec![11, 12, 19],
        ])
        .unwrap();
        let aux = synth_aux(20, &[(1, 2, 0), (2, 3, 1), (3, 4, 2)]);
        let ctx = GoodnessContext::new(&h, &aux);
        let ruin = ctx.ruin_witness(&[1, 2, 3], 4).unwrap().unwrap();
        assert_eq!(ruin.hyperedge, 3);
        assert!(!ruin.far);
    }

    #[test]
    fn direct_overlap_names_the_collided_hyperedge() {
        // h(34) shares vertex 10 with h(12): extending 1-2-3 by 4 collides
        // directly, no third party involved.
        let h = Hypergraph::new(20, 3, vec![
            vec![1, 2, 10],
            vec![2, 3, 11],
            vec![3, 4, 10],
        ])
        .unwrap();
        let aux = synth_aux(20, &[(1, 2, 0), (2, 3, 1), (3, 4, 2)]);
        let ctx = GoodnessContext::new(&h, &aux);
        let ruin = ctx.ruin_witness(&[1, 2, 3], 4).unwrap().unwrap();
        assert_eq!(ruin.hyperedge, 0);
        assert!(!ruin.far);
        assert!(!ctx.is_good_path(&[1, 2, 3, 4]).unwrap().verdict);
    }

    #[test]
    fn ruin_query_validation() {
        let (h, aux) = chain_host(false);
        let ctx = GoodnessContext::new(&h, &aux);
        assert!(matches!(
            ctx.ruin_witness(&[1, 2], 1),
            Err(GoodnessError::BadRuinQuery(_))
        ));
        assert!(matches!(
            ctx.ruin_witness(&[1, 2], 9),
            Err(GoodnessError::BadRuinQuery(_))
        ));
    }

    #[test]
    fn good_tree_accepts_and_short_circuits() {
        // Star-of-paths tree rooted at 3: edges (1,2),(2,3),(3,4),(3,6).
        let h = Hypergraph::new(20, 3, vec![
            vec![1, 2, 10],
            vec![2, 3, 11],
            vec![3, 4, 12],
            vec![3, 6, 13],
        ])
        .unwrap();
        let aux = synth_aux(20, &[(1, 2, 0), (2, 3, 1), (3, 4, 2), (3, 6, 3)]);
        let ctx = GoodnessContext::new(&h, &aux);
        let cert = ctx.is_good_tree(&[(1, 2), (2, 3), (3, 4), (3, 6)], 3).unwrap();
        assert!(cert.verdict);
        assert_eq!(cert.subject, vec![1, 2, 3, 4, 6]);
        // Single vertex tree.
        assert!(ctx.is_good_tree(&[], 5).unwrap().verdict);
    }

    #[test]
    fn bad_cross_path_fails_the_tree() {
        // Same tree, but a meddler connects the {1,2}-hyperedge's spare
        // vertex to the {3,6}-hyperedge's spare vertex: the cross path
        // 1-2-3-6 is bad while e.g. 1-2-3-4 stays good.
        let h = Hypergraph::new(20, 3, vec![
            vec![1, 2, 10],
            vec![2, 3, 11],
            vec![3, 4, 12],
            vec![3, 6, 13],
            vec![10, 13, 19],
        ])
        .unwrap();
        let aux = synth_aux(20, &[(1, 2, 0), (2, 3, 1), (3, 4, 2), (3, 6, 3)]);
        let ctx = GoodnessContext::new(&h, &aux);
        assert!(ctx.is_good_path(&[1, 2, 3, 4]).unwrap().verdict);
        let cert = ctx.is_good_tree(&[(1, 2), (2, 3), (3, 4), (3, 6)], 3).unwrap();
        assert!(!cert.verdict);
        assert!(matches!(
            cert.witness,
            Some(GoodnessViolation::MeddlingHyperedge { hyperedge: 4, .. })
        ));
    }

    #[test]
    fn tree_validation_rejects_cycles_and_disconnection() {
        let h = Hypergraph::new(20, 3, vec![
            vec![1, 2, 10],
            vec![2, 3, 11],
            vec![1, 3, 12],
            vec![5, 6, 13],
        ])
        .unwrap();
        let aux = synth_aux(20, &[(1, 2, 0), (2, 3, 1), (1, 3, 2), (5, 6, 3)]);
        let ctx = GoodnessContext::new(&h, &aux);
        assert!(matches!(
            ctx.is_good_tree(&[(1, 2), (2, 3), (1, 3)], 1),
            Err(GoodnessError::NotATree(_))
        ));
        assert!(matches!(
            ctx.is_good_tree(&[(1, 2), (5, 6)], 1),
            Err(GoodnessError::NotATree(_))
        ));
        assert!(matches!(
            ctx.is_good_tree(&[(1, 2)], 9),
            Err(GoodnessError::NotATree(_))
        ));
    }

    /// Five-cycle 1-2-3-4-5 on clean hyperedges. Five is the shortest
    /// length with any good cover at all: shorter cycles force a member
    /// whose two endpoints both lie in an off-member cycle hyperedge.
    fn pentagon_ctx(meddler: bool) -> (Hypergraph, AuxGraph) {
        let mut edges = vec![
            vec![1, 2, 10],
            vec![2, 3, 11],
            vec![3, 4, 12],
            vec![4, 5, 13],
            vec![1, 5, 14],
        ];
        if meddler {
            // Touches the spare vertices of h0 and h2: ruins exactly the
            // cover members containing both.
            edges.push(vec![10, 12, 19]);
        }
        let h = Hypergraph::new(20, 3, edges).unwrap();
        let aux = synth_aux(20, &[(1, 2, 0), (2, 3, 1), (3, 4, 2), (4, 5, 3), (5, 1, 4)]);
        (h, aux)
    }

    fn pentagon_cover() -> Vec<Vec<u32>> {
        // All arcs of three edges; every pair of the five cycle edges is at
        // cyclic distance at most two, so this covers all ten pairs.
        vec![
            vec![1, 2, 3, 4],
            vec![2, 3, 4, 5],
            vec![3, 4, 5, 1],
            vec![4, 5, 1, 2],
            vec![5, 1, 2, 3],
        ]
    }

    #[test]
    fn cycle_cover_accepts_complete_cover() {
        let (h, aux) = pentagon_ctx(false);
        let ctx = GoodnessContext::new(&h, &aux);
        let cert = ctx.is_good_cycle(&[1, 2, 3, 4, 5], &pentagon_cover()).unwrap();
        assert!(cert.verdict, "witness: {:?}", cert.witness);
    }

    #[test]
    fn cycle_cover_reports_uncovered_pair() {
        let (h, aux) = pentagon_ctx(false);
        let ctx = GoodnessContext::new(&h, &aux);
        let mut cover = pentagon_cover();
        cover.pop(); // drop [5,1,2,3]: pair (e1, e4) loses its only member
        let cert = ctx.is_good_cycle(&[1, 2, 3, 4, 5], &cover).unwrap();
        assert!(!cert.verdict);
        match cert.witness {
            Some(GoodnessViolation::UncoveredEdgePair { edge_a, edge_b }) => {
                assert_eq!(edge_a, (2, 3));
                assert_eq!(edge_b, (5, 1));
            }
            ref w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn cycle_cover_reports_bad_member() {
        let (h, aux) = pentagon_ctx(true);
        let ctx = GoodnessContext::new(&h, &aux);
        let cert = ctx.is_good_cycle(&[1, 2, 3, 4, 5], &pentagon_cover()).unwrap();
        assert!(!cert.verdict);
        match cert.witness {
            Some(GoodnessViolation::BadCoverMember { index: 0, ref inner }) => match **inner {
                GoodnessViolation::MeddlingHyperedge { hyperedge: 5, .. } => {}
                ref w => panic!("unexpected inner witness {w:?}"),
            },
            ref w => panic!("unexpected witness {w:?}"),
        }
    }

    #[test]
    fn cycle_cover_rejects_non_subpath_member() {
        let (h, aux) = pentagon_ctx(false);
        let ctx = GoodnessContext::new(&h, &aux);
        let err = ctx.is_good_cycle(&[1, 2, 3, 4, 5], &[vec![1, 3, 5]]).unwrap_err();
        assert_eq!(err, GoodnessError::CoverMemberNotSubpath { index: 0 });
        // Reversed arcs are fine.
        let cert = ctx
            .is_good_cycle(&[1, 2, 3, 4, 5], &pentagon_cover())
            .unwrap();
        assert!(cert.verdict);
        let rev: Vec<Vec<u32>> = pentagon_cover()
            .into_iter()
            .map(|mut m| {
                m.reverse();
                m
            })
            .collect();
        assert!(ctx.is_good_cycle(&[1, 2, 3, 4, 5], &rev).unwrap().verdict);
    }

    #[test]
    fn subpath_monotonicity_on_random_walks() {
        let p = HostParams {
            n_vertices: 150,
            c: 1.0,
            s: 3,
            g: 6,
            alpha: 1.0,
            k: 1,
            n: 9,
            mode: CycleMode::NonInduced,
        };
        let h = sample_host_hypergraph(&p, 3);
        let aux = synthetic_probe_aux(&h).unwrap();
        let ctx = GoodnessContext::new(&h, &aux);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let support: Vec<u32> =
            (0..aux.graph.vertex_count() as u32).filter(|&v| aux.graph.degree(v) > 0).collect();
        let mut checked = 0;
        for _ in 0..200 {
            let start = support[rng.random_range(0..support.len())];
            let mut path = vec![start];
            for _ in 0..5 {
                let cur = *path.last().unwrap();
                let nbrs: Vec<u32> = aux
                    .graph
                    .neighbors(cur)
                    .iter()
                    .copied()
                    .filter(|x| !path.contains(x))
                    .collect();
                if nbrs.is_empty() {
                    break;
                }
                path.push(nbrs[rng.random_range(0..nbrs.len())]);
            }
            if path.len() < 3 {
                continue;
            }
            if ctx.is_good_path(&path).unwrap().verdict {
                checked += 1;
                // Every contiguous subpath must be good too.
                for a in 0..path.len() {
                    for b in (a + 1)..path.len() {
                        assert!(ctx.is_good_path(&path[a..=b]).unwrap().verdict);
                    }
                }
            }
        }
        assert!(checked > 0, "walks never produced a good path to test");
    }

    #[test]
    fn probe_is_clean_on_girthy_host_and_catches_injection() {
        let p = HostParams {
            n_vertices: 150,
            c: 1.0,
            s: 3,
            g: 6,
            alpha: 1.0,
            k: 1,
            n: 9,
            mode: CycleMode::NonInduced,
        };
        let h = sample_host_hypergraph(&p, 8);
        let aux = synthetic_probe_aux(&h).unwrap();
        let ctx = GoodnessContext::new(&h, &aux);
        let report = ctx.short_paths_probe(p.g, 500, 11);
        assert!(report.paths_checked > 100);
        assert_eq!(report.violations, 0, "violation: {:?}", report.first_violation);

        // Negative control: a hyperedge meeting two chained hyperedges.
        let (h2, aux2) = chain_host(true);
        let ctx2 = GoodnessContext::new(&h2, &aux2);
        let report2 = ctx2.short_paths_probe(4, 300, 1);
        assert!(report2.violations > 0);
        assert!(report2.first_violation.is_some());

        // Zero trials: empty report.
        let empty = ctx2.short_paths_probe(4, 0, 1);
        assert_eq!(empty.paths_checked, 0);
    }
}
