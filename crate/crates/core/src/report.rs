//! JSON run reports.

use serde::{Deserialize, Serialize};

use crate::certificate::VerificationReport;
use crate::compaction::CompactFootprint;
use crate::engine::{EngineConfig, Mode, PhiBackend, RunOutcome};
use crate::types::{RawEdge, StreamStats};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub mode: Mode,
    pub epsilon: f64,
    pub beta: Option<u32>,
    pub quantize: bool,
    pub threshold_n: Option<u64>,
    pub phi_backend: PhiBackend,
    pub trace: bool,
}

impl ConfigEcho {
    pub fn new(cfg: &EngineConfig, beta: Option<u32>) -> Self {
        ConfigEcho {
            mode: cfg.mode,
            epsilon: cfg.epsilon,
            beta,
            quantize: cfg.quantize,
            threshold_n: cfg.threshold_n,
            phi_backend: cfg.phi_backend,
            trace: cfg.trace_enabled,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchingSummary {
    pub size: usize,
    pub weight: f64,
    /// Input vertex ids and input weights.
    pub edges: Vec<RawEdge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSummary {
    pub epsilon: f64,
    pub phi_sum: f64,
    pub upper_bound: f64,
}

/// [`StreamStats`] without the per-vertex vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub edges_seen: u64,
    pub edges_pushed: u64,
    pub edges_skipped: u64,
    pub edges_evicted: u64,
    pub self_loops_rejected: u64,
    pub edges_dropped: u64,
    pub vertices_seen: usize,
    pub peak_stack_size: u64,
    pub final_stack_size: u64,
    pub peak_queue_size: u64,
    pub max_vertex_push_count: u32,
    pub w_max_seen: f64,
    pub w_min_seen: f64,
    pub min_leftover_pushed: f64,
    pub work_units: u64,
}

impl From<&StreamStats> for StatsSummary {
    fn from(s: &StreamStats) -> Self {
        StatsSummary {
            edges_seen: s.edges_seen,
            edges_pushed: s.edges_pushed,
            edges_skipped: s.edges_skipped,
            edges_evicted: s.edges_evicted,
            self_loops_rejected: s.self_loops_rejected,
            edges_dropped: s.edges_dropped,
            vertices_seen: s.vertices_seen(),
            peak_stack_size: s.peak_stack_size,
            final_stack_size: s.final_stack_size,
            peak_queue_size: s.peak_queue_size,
            max_vertex_push_count: s.max_vertex_push_count(),
            w_max_seen: s.w_max_seen,
            w_min_seen: s.w_min_seen,
            min_leftover_pushed: s.min_leftover_pushed,
            work_units: s.work_units,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub wall_ns: u64,
    pub ns_per_edge: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config: ConfigEcho,
    pub matching: MatchingSummary,
    pub certificate: CertificateSummary,
    pub stats: StatsSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold_delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compact: Option<CompactFootprint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    /// Only present when requested, so default reports are reproducible byte for byte.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn new(out: &RunOutcome) -> Self {
        RunReport {
            config: ConfigEcho::new(&out.config, out.beta),
            matching: MatchingSummary {
                size: out.matching.len(),
                weight: out.matching.total_weight,
                edges: out.matching_raw(),
            },
            certificate: CertificateSummary {
                epsilon: out.certificate.epsilon,
                phi_sum: out.certificate.phi_sum,
                upper_bound: out.certificate.upper_bound(),
            },
            stats: StatsSummary::from(&out.stats),
            threshold_delta: out.threshold_delta,
            compact: out.compact.clone(),
            verification: None,
            timing: None,
            warnings: Vec::new(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports hold only plain data")
    }

    /// Multi-line human summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let c = &self.config;
        s += &format!("mode {} eps {}", c.mode, c.epsilon);
        if let Some(b) = c.beta {
            s += &format!(" beta {b}");
        }
        s += "\n";
        s += &format!(
            "matching: {} edges, weight {}\n",
            self.matching.size, self.matching.weight
        );
        s += &format!(
            "certificate: phi_sum {} upper_bound {}\n",
            self.certificate.phi_sum, self.certificate.upper_bound
        );
        let st = &self.stats;
        s += &format!(
            "edges: seen {} pushed {} skipped {} evicted {} dropped {} self-loops {}\n",
            st.edges_seen, st.edges_pushed, st.edges_skipped, st.edges_evicted, st.edges_dropped, st.self_loops_rejected
        );
        s += &format!(
            "space: peak stack {} final stack {} peak queue {}\n",
            st.peak_stack_size, st.final_stack_size, st.peak_queue_size
        );
        if let Some(f) = &self.compact {
            s += &format!("compact phi: {:.1} bytes/vertex\n", f.bytes_per_vertex);
        }
        if let Some(t) = &self.timing {
            s += &format!("time: {} ns total, {:.1} ns/edge\n", t.wall_ns, t.ns_per_edge);
        }
        if let Some(v) = &self.verification {
            for c in &v.checks {
                s += &format!(
                    "check {:<28} {} ({} checked, worst slack {})\n",
                    c.check,
                    if c.passed { "ok" } else { "FAILED" },
                    c.checked,
                    c.worst_slack.map_or("-".to_string(), |w| format!("{w:.3e}"))
                );
            }
        }
        for w in &self.warnings {
            s += &format!("warning: {w}\n");
        }
        s
    }
}
