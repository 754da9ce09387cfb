//! The staged pipeline: from a run profile to a certified cycle.
//!
//! Stages run in a fixed order, each seeded independently from the master
//! seed by stage name, each leaving a metadata record. Any failure stops
//! the run with the failing stage's name and diagnosis. The record of a
//! run is deterministic given the profile: wall-clock readings live in a
//! separate timestamps field that comparisons exclude.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::colorer::color_edges;
use crate::cycleclose::{
    assemble_cycle, aux_cycle_window, expand_balls_filtered, lift_cycle, n_i_of_s,
    spine_hyperedges, verify_final, CloseError, FinalReport, LiftChoice, LiftResult,
};
use crate::gadgets::{build_gadget, CycleMode};
use crate::goodness::GoodnessContext;
use crate::graphcore::EdgeColoring;
use crate::hostbuild::{build_auxiliary, build_host, densest_color_subgraph, HostGraph};
use crate::hypergen::{default_alpha, sample_until_verified, HostParams};
use crate::expander::{extract_expander, min_degree_core};
use crate::profile::{derive_seed, RunProfile};
use crate::search::{compute_r_sets, find_good_path, grow_trees};

/// One stage's footprint in the run record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    /// The seed handed to the stage, for stages that draw randomness.
    pub seed: Option<u64>,
    pub meta: Value,
}

/// What a successful run proves, in replayable form: the auxiliary cycle
/// with its cover, the lifted host cycle with its segment choices, and the
/// final verifier's report. Re-verification needs only this, the host
/// graph, and the coloring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub mode: CycleMode,
    pub k: u32,
    pub n: usize,
    pub aux_cycle: Vec<u32>,
    pub cover: Vec<Vec<u32>>,
    pub lift: LiftResult,
    pub report: FinalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunOutcome {
    Success { certificate: Box<Certificate> },
    ParameterError { message: String },
    StageFailure { stage: String, diagnosis: String },
    VerificationFailure { certificate: Box<Certificate> },
}

/// Process exit code the outcome maps to.
pub fn exit_code(outcome: &RunOutcome) -> i32 {
    match outcome {
        RunOutcome::Success { .. } => 0,
        RunOutcome::ParameterError { .. } => 2,
        RunOutcome::StageFailure { .. } => 3,
        RunOutcome::VerificationFailure { .. } => 4,
    }
}

/// Wall-clock readings, quarantined so the rest of the record stays
/// byte-identical across reruns of one profile.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timestamps {
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub profile: RunProfile,
    pub stages: Vec<StageRecord>,
    pub outcome: RunOutcome,
    pub timestamps: Timestamps,
}

impl RunRecord {
    /// Everything but the timestamps: the part of the record that two runs
    /// of the same profile reproduce byte for byte.
    pub fn deterministic_json(&self) -> Value {
        json!({
            "profile": self.profile,
            "stages": self.stages,
            "outcome": self.outcome,
        })
    }
}

/// The run's heavyweight byproducts, for callers that write artifacts.
#[derive(Debug, Default)]
pub struct PipelineOutput {
    pub record: RunRecord,
    pub host: Option<HostGraph>,
    pub coloring: Option<EdgeColoring>,
}

impl Default for RunRecord {
    fn default() -> RunRecord {
        RunRecord {
            profile: RunProfile::desk(CycleMode::NonInduced, 1, 3, 0),
            stages: Vec::new(),
            outcome: RunOutcome::ParameterError { message: "unset".into() },
            timestamps: Timestamps::default(),
        }
    }
}

fn unix_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// Runs every stage against the profile and returns the full record plus
/// the host and coloring for artifact emission. Never panics on a stage
/// failure; the outcome carries what happened.
pub fn run_pipeline(profile: &RunProfile) -> PipelineOutput {
    let started = unix_ms();
    let clock = Instant::now();
    let mut out = PipelineOutput::default();
    let mut stages: Vec<StageRecord> = Vec::new();
    let outcome = drive(profile, &mut stages, &mut out);
    out.record = RunRecord {
        profile: profile.clone(),
        stages,
        outcome,
        timestamps: Timestamps {
            started_unix_ms: started,
            finished_unix_ms: unix_ms(),
            duration_ms: clock.elapsed().as_millis() as u64,
        },
    };
    out
}

fn fail(stage: &str, diagnosis: impl ToString) -> RunOutcome {
    RunOutcome::StageFailure { stage: stage.to_string(), diagnosis: diagnosis.to_string() }
}

fn drive(
    profile: &RunProfile,
    stages: &mut Vec<StageRecord>,
    out: &mut PipelineOutput,
) -> RunOutcome {
    if let Err(e) = profile.validate() {
        return RunOutcome::ParameterError { message: e.to_string() };
    }
    let ms = profile.master_seed;
    let gadget = match build_gadget(&profile.gadget, derive_seed(ms, "gadget")) {
        Ok(g) => g,
        Err(e) => return RunOutcome::ParameterError { message: e.to_string() },
    };
    let host_params = HostParams {
        n_vertices: profile.host.n_vertices,
        c: profile.host.c,
        s: gadget.s,
        g: profile.host.g,
        alpha: profile
            .host
            .alpha
            .unwrap_or_else(|| default_alpha(profile.host.c, gadget.s)),
        k: profile.k,
        n: profile.n,
        mode: profile.mode,
    };

    // ---- sample_until_verified -------------------------------------------
    let (hyper, verification) = match sample_until_verified(
        &host_params,
        profile.host.max_retries,
        ms,
        &profile.host.budget,
    ) {
        Ok(pair) => pair,
        Err(e) => return fail("sample_until_verified", e),
    };
    stages.push(StageRecord {
        stage: "sample_until_verified".into(),
        seed: Some(ms),
        meta: json!({
            "hyperedges": hyper.edge_count(),
            "vertices": hyper.vertex_count(),
            "uniformity": hyper.uniformity(),
            "alpha": host_params.alpha,
            "report": verification,
        }),
    });

    // ---- build_host --------------------------------------------------------
    let host_seed = derive_seed(ms, "build_host");
    let host = match build_host(&hyper, &gadget, host_seed) {
        Ok(h) => h,
        Err(e) => return fail("build_host", e),
    };
    stages.push(StageRecord {
        stage: "build_host".into(),
        seed: Some(host_seed),
        meta: json!({
            "gadget": profile.gadget.to_string(),
            "gadget_vertices": gadget.s,
            "gadget_edges": gadget.graph.edge_count(),
            "host_vertices": host.graph.vertex_count(),
            "host_edges": host.graph.edge_count(),
        }),
    });

    // ---- colorer -----------------------------------------------------------
    let color_seed = derive_seed(ms, "colorer");
    let coloring = match color_edges(&profile.colorer, &host.graph, profile.k, color_seed)
    {
        Ok(c) => c,
        Err(e) => return fail("colorer", e),
    };
    let mut histogram = std::collections::BTreeMap::new();
    for &c in &coloring.color {
        *histogram.entry(c).or_insert(0u64) += 1;
    }
    stages.push(StageRecord {
        stage: "colorer".into(),
        seed: Some(color_seed),
        meta: json!({ "k": profile.k, "histogram": histogram }),
    });

    // ---- build_auxiliary ----------------------------------------------------
    let aux = match build_auxiliary(&host, &coloring, profile.mode) {
        Ok(a) => a,
        Err(e) => {
            out.host = Some(host);
            out.coloring = Some(coloring);
            return fail("build_auxiliary", e);
        }
    };
    stages.push(StageRecord {
        stage: "build_auxiliary".into(),
        seed: None,
        meta: json!({
            "aux_edges": aux.graph.edge_count(),
            "cycle_len": aux.cycle_len,
            "skipped_no_cycle": aux.skipped_no_cycle,
            "skipped_off_length": aux.skipped_off_length,
        }),
    });

    // ---- densest_color_subgraph ----------------------------------------------
    let (color_class, sub, _old_ids) = densest_color_subgraph(&aux);
    stages.push(StageRecord {
        stage: "densest_color_subgraph".into(),
        seed: None,
        meta: json!({
            "color": color_class,
            "class_edges": sub.edge_count(),
            "total_edges": aux.graph.edge_count(),
        }),
    });

    // The remaining stages all certify against the hypergraph and the full
    // auxiliary graph; searches walk only the chosen color class.
    let ctx = GoodnessContext::new(&hyper, &aux);
    let inc_idx = hyper.incidence_index();
    let keep = (host, coloring);

    // ---- extract_expander -----------------------------------------------------
    let expansion = match extract_expander(&sub, &profile.expander) {
        Ok(x) => x,
        Err(e) => {
            out.host = Some(keep.0);
            out.coloring = Some(keep.1);
            return fail("extract_expander", e);
        }
    };
    stages.push(StageRecord {
        stage: "extract_expander".into(),
        seed: None,
        meta: json!({
            "support_vertices": expansion.vertices.len(),
            "edges": expansion.graph.edge_count(),
            "density": expansion.density,
            "iterations": expansion.iterations,
            "size_ok": expansion.size_ok,
            "gamma": expansion.gamma,
        }),
    });

    // ---- min_degree_core ---------------------------------------------------
    let gprime = min_degree_core(&expansion.graph, profile.core_delta);
    let live = (0..gprime.vertex_count() as u32)
        .filter(|&v| !gprime.neighbors(v).is_empty())
        .count();
    stages.push(StageRecord {
        stage: "min_degree_core".into(),
        seed: None,
        meta: json!({
            "delta": profile.core_delta,
            "live_vertices": live,
            "edges": gprime.edge_count(),
        }),
    });
    if gprime.edge_count() == 0 {
        out.host = Some(keep.0);
        out.coloring = Some(keep.1);
        return fail("min_degree_core", "the core is empty at this degree floor");
    }

    // ---- find_good_path -----------------------------------------------------
    let pr = match find_good_path(&gprime, &ctx, &profile.search, profile.debug_invariants)
    {
        Ok(p) => p,
        Err(e) => {
            if let Some(stats) = e.stats_json() {
                stages.push(StageRecord {
                    stage: "find_good_path".into(),
                    seed: None,
                    meta: json!({ "failure_stats": stats }),
                });
            }
            out.host = Some(keep.0);
            out.coloring = Some(keep.1);
            return fail("find_good_path", e);
        }
    };
    stages.push(StageRecord {
        stage: "find_good_path".into(),
        seed: None,
        meta: json!({ "path_vertices": pr.path.len(), "stats": pr.stats }),
    });

    // ---- grow_trees ----------------------------------------------------------
    let ts = match grow_trees(&gprime, &ctx, &pr.path, &profile.search, profile.debug_invariants)
    {
        Ok(t) => t,
        Err(e) => {
            if let Some(stats) = e.stats_json() {
                stages.push(StageRecord {
                    stage: "grow_trees".into(),
                    seed: None,
                    meta: json!({ "failure_stats": stats }),
                });
            }
            out.host = Some(keep.0);
            out.coloring = Some(keep.1);
            return fail("grow_trees", e);
        }
    };
    stages.push(StageRecord {
        stage: "grow_trees".into(),
        seed: None,
        meta: json!({
            "tree_vertices": ts.tree_vertex_count(),
            "spine_len": ts.spine.len(),
            "side_sizes": [ts.side_vertices[0].len(), ts.side_vertices[1].len()],
            "rounds": [ts.batches[0].len(), ts.batches[1].len()],
            "stats": ts.stats,
        }),
    });

    // ---- compute_r_sets --------------------------------------------------------
    let rsets = compute_r_sets(&ts, profile.search.rounds_back, profile.search.spine_budget);
    stages.push(StageRecord {
        stage: "compute_r_sets".into(),
        seed: None,
        meta: json!({
            "r1": rsets.r1.len(),
            "r2": rsets.r2.len(),
            "rounds_back_used": rsets.rounds_back_used,
            "widened": rsets.widened,
        }),
    });

    // ---- n_i_of_s ---------------------------------------------------------------
    let s_set = match spine_hyperedges(&aux, &ts, &rsets.r1, &rsets.r2) {
        Ok(s) => s,
        Err(e) => {
            out.host = Some(keep.0);
            out.coloring = Some(keep.1);
            return fail("n_i_of_s", e);
        }
    };
    let nis = n_i_of_s(&hyper, &inc_idx, &s_set);
    // The distance-two shield is airtight when the host dwarfs it; on desk
    // hosts it swallows the support, so the balls fall back to per-vertex
    // ruin checks and the hard exclusion shrinks to the tree plus every
    // vertex inside a hyperedge backing a protected tree edge.
    let shield_usable = 2 * nis.len() <= live;
    let mut hard_excluded: Vec<u32> = ts
        .spine
        .iter()
        .copied()
        .chain(ts.tree_edges.iter().flat_map(|&(a, b)| [a, b]))
        .chain(s_set.iter().flat_map(|&h| hyper.edge(h).iter().copied()))
        .chain(nis.iter().copied().take(if shield_usable { usize::MAX } else { 0 }))
        .collect();
    hard_excluded.sort_unstable();
    hard_excluded.dedup();
    stages.push(StageRecord {
        stage: "n_i_of_s".into(),
        seed: None,
        meta: json!({
            "spine_hyperedges": s_set.len(),
            "excluded_vertices": nis.len(),
            "shield_usable": shield_usable,
            "hard_excluded": hard_excluded.len(),
        }),
    });

    // ---- expand_balls / assemble_cycle (meet candidates, widening ladder) -------
    let (short, long) = aux.lift_lengths();
    let window = aux_cycle_window(short, long, profile.n);
    let mut tried: std::collections::HashSet<u32> = std::collections::HashSet::new();
    let mut meets_tried = 0usize;
    let mut last_reject = String::new();
    let mut found: Option<(crate::cycleclose::BallMeeting, crate::cycleclose::AssembledCycle)> =
        None;
    'ladder: for attempt in 0..=profile.close.retries {
        let max_steps =
            profile.close.max_steps + attempt as usize * profile.close.step_increment;
        // Each rung collects more meeting candidates; earlier rungs'
        // rejects are skipped by meet vertex, so every splice is tried
        // once.
        let meet_target = 8 * (attempt as usize + 1);
        let meetings = match expand_balls_filtered(
            &ctx,
            &ts,
            &gprime,
            &rsets.r1,
            &rsets.r2,
            &hard_excluded,
            max_steps,
            meet_target,
        ) {
            Ok(m) => m,
            Err(e) => {
                out.host = Some(keep.0);
                out.coloring = Some(keep.1);
                return fail("expand_balls", e);
            }
        };
        stages.push(StageRecord {
            stage: "expand_balls".into(),
            seed: None,
            meta: json!({
                "attempt": attempt,
                "max_steps": max_steps,
                "meet_candidates": meetings.len(),
                "layer_sizes": meetings[0].layer_sizes,
            }),
        });
        let fresh: Vec<_> =
            meetings.into_iter().filter(|m| !tried.contains(&m.meet)).collect();
        for meeting in fresh {
            tried.insert(meeting.meet);
            meets_tried += 1;
            let asm = match assemble_cycle(&ts, &rsets.r1, &rsets.r2, &meeting, window) {
                Ok(a) => a,
                Err(e @ CloseError::LengthOutsideWindow { .. }) => {
                    last_reject = e.to_string();
                    continue;
                }
                Err(e) => {
                    out.host = Some(keep.0);
                    out.coloring = Some(keep.1);
                    return fail("assemble_cycle", e);
                }
            };
            // Layer accounting: the bridging arc spans both R-prefixes and
            // both arms, so its length is bounded by the rounds walked and
            // the R depth.
            let p3_len = asm.cover[2].len();
            let p3_bound = 2 * meeting.steps + 2 * rsets.rounds_back_used + 1;
            if p3_len > p3_bound {
                last_reject =
                    format!("bridging arc has {p3_len} vertices, above the bound {p3_bound}");
                continue;
            }
            let cert = match ctx.is_good_cycle(&asm.cycle, &asm.cover) {
                Ok(c) => c,
                Err(e) => {
                    out.host = Some(keep.0);
                    out.coloring = Some(keep.1);
                    return fail("is_good_cycle", e);
                }
            };
            if cert.verdict {
                found = Some((meeting, asm));
                break 'ladder;
            }
            last_reject = format!(
                "cycle is not good: {}",
                serde_json::to_string(&cert.witness).unwrap_or_default()
            );
        }
    }
    let Some((meeting, asm)) = found else {
        out.host = Some(keep.0);
        out.coloring = Some(keep.1);
        return fail(
            "is_good_cycle",
            format!("all {meets_tried} meeting candidates rejected; last: {last_reject}"),
        );
    };
    let p3_len = asm.cover[2].len();
    stages.push(StageRecord {
        stage: "assemble_cycle".into(),
        seed: None,
        meta: json!({
            "meet": meeting.meet,
            "steps": meeting.steps,
            "arm_lengths": [meeting.arm1.len(), meeting.arm2.len()],
            "meets_tried": meets_tried,
            "cycle_len": asm.cycle.len(),
            "window": [window.0, window.1],
            "prefix_len": asm.prefix_len,
            "suffix_len": asm.suffix_len,
            "cover_lengths": [asm.cover[0].len(), asm.cover[1].len(), p3_len],
            "p3_bound": 2 * meeting.steps + 2 * rsets.rounds_back_used + 1,
        }),
    });
    stages.push(StageRecord {
        stage: "is_good_cycle".into(),
        seed: None,
        meta: json!({ "verdict": true, "cycle_len": asm.cycle.len() }),
    });

    // ---- lift_cycle ----------------------------------------------------------------
    let lr = match lift_cycle(&aux, &asm.cycle, profile.n) {
        Ok(l) => l,
        Err(e) => {
            out.host = Some(keep.0);
            out.coloring = Some(keep.1);
            return fail("lift_cycle", e);
        }
    };
    let long_count =
        lr.choices.iter().filter(|(_, c)| *c == LiftChoice::Long).count();
    stages.push(StageRecord {
        stage: "lift_cycle".into(),
        seed: None,
        meta: json!({
            "length": lr.length,
            "long_segments": long_count,
            "short_segments": lr.choices.len() - long_count,
            "color": lr.color,
        }),
    });

    // ---- verify_final ---------------------------------------------------------------
    let (host, coloring) = keep;
    let report = verify_final(&host.graph, &coloring, &lr, profile.mode, profile.n);
    stages.push(StageRecord {
        stage: "verify_final".into(),
        seed: None,
        meta: json!({ "report": report }),
    });
    let certificate = Box::new(Certificate {
        mode: profile.mode,
        k: profile.k,
        n: profile.n,
        aux_cycle: asm.cycle,
        cover: asm.cover,
        lift: lr,
        report: report.clone(),
    });
    out.host = Some(host);
    out.coloring = Some(coloring);
    if report.verdict {
        RunOutcome::Success { certificate }
    } else {
        RunOutcome::VerificationFailure { certificate }
    }
}
