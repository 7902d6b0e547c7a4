//! The one-pass matching engine.
//!
//! Every arriving edge `{u, v}` is tested against the endpoint potentials:
//! it is skipped when `w < (1 + eps)(phi_u + phi_v)`, otherwise its leftover
//! `w - phi_u - phi_v` is added to both potentials and the edge is pushed.
//! In [`Mode::Capped`] each vertex additionally keeps a FIFO of the edges
//! pushed at it; when a FIFO grows past `beta` its oldest edge leaves the
//! stack. The final matching is built by unwinding the stack greedily.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::certificate::DualCertificate;
use crate::compaction::{quantize, CompactFootprint, CompactPhi, FilterDecision, ThresholdFilter};
use crate::error::{Error, Result};
use crate::stack::{EdgeStack, Handle, StackEntry};
use crate::types::{
    EdgeRecord, Matching, RawEdge, StreamStats, TraceDecision, TraceEvent, VertexId, VertexTable,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Unbounded stack, `eps = 0`.
    Basic,
    /// Exponentially increasing potentials, unbounded stack.
    Exp,
    /// Per-vertex queues capped at `beta`.
    Capped,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Basic, Mode::Exp, Mode::Capped];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Basic => "basic",
            Mode::Exp => "exp",
            Mode::Capped => "capped",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "basic" => Ok(Mode::Basic),
            "exp" => Ok(Mode::Exp),
            "capped" => Ok(Mode::Capped),
            other => Err(format!("unknown mode `{other}` (expected basic, exp or capped)")),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiBackend {
    #[default]
    Dense,
    Compact,
}

impl FromStr for PhiBackend {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "dense" => Ok(PhiBackend::Dense),
            "compact" => Ok(PhiBackend::Compact),
            other => Err(format!("unknown phi backend `{other}` (expected dense or compact)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub mode: Mode,
    pub epsilon: f64,
    pub beta_override: Option<u32>,
    pub trace_enabled: bool,
    /// Round every admitted weight down to a power of `1 + eps`.
    pub quantize: bool,
    /// Vertex-count bound enabling the threshold filter.
    pub threshold_n: Option<u64>,
    pub phi_backend: PhiBackend,
    /// With the compact backend, also keep exact potentials for comparison.
    pub shadow_phi: bool,
}

impl EngineConfig {
    pub fn new(mode: Mode, epsilon: f64) -> Self {
        EngineConfig {
            mode,
            epsilon,
            beta_override: None,
            trace_enabled: false,
            quantize: false,
            threshold_n: None,
            phi_backend: PhiBackend::Dense,
            shadow_phi: false,
        }
    }

    pub fn basic() -> Self {
        Self::new(Mode::Basic, 0.0)
    }

    pub fn exp(epsilon: f64) -> Self {
        Self::new(Mode::Exp, epsilon)
    }

    pub fn capped(epsilon: f64) -> Self {
        Self::new(Mode::Capped, epsilon)
    }

    pub fn with_trace(mut self) -> Self {
        self.trace_enabled = true;
        self
    }

    pub fn with_beta(mut self, beta: u32) -> Self {
        self.beta_override = Some(beta);
        self
    }

    /// Quantization, threshold filter and compact potentials together.
    pub fn with_compaction(mut self, n_bound: u64) -> Self {
        self.quantize = true;
        self.threshold_n = Some(n_bound);
        self.phi_backend = PhiBackend::Compact;
        self
    }

    /// Checks the mode/epsilon combination. `basic` always runs with eps = 0.
    pub fn validated(mut self) -> Result<Self> {
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::EpsilonOutOfRange(self.epsilon, "[0, inf)"));
        }
        match self.mode {
            Mode::Basic => self.epsilon = 0.0,
            Mode::Exp => {
                if self.epsilon <= 0.0 {
                    return Err(Error::EpsilonOutOfRange(self.epsilon, "(0, inf) for mode exp"));
                }
            }
            Mode::Capped => {
                if !(self.epsilon > 0.0 && self.epsilon <= 0.25) {
                    return Err(Error::EpsilonOutOfRange(
                        self.epsilon,
                        "(0, 1/4] for mode capped",
                    ));
                }
            }
        }
        if self.beta_override == Some(0) {
            return Err(Error::Config("beta must be positive".into()));
        }
        if self.beta_override.is_some() && self.mode != Mode::Capped {
            return Err(Error::Config("beta only applies to mode capped".into()));
        }
        if self.quantize && self.epsilon <= 0.0 {
            return Err(Error::Config("quantization needs epsilon > 0".into()));
        }
        if self.phi_backend == PhiBackend::Compact {
            if !self.quantize {
                return Err(Error::Config("the compact phi backend needs --quantize".into()));
            }
            if self.threshold_n.is_none() {
                return Err(Error::Config(
                    "the compact phi backend needs a vertex bound (--threshold-n)".into(),
                ));
            }
        }
        Ok(self)
    }

    /// Queue capacity in effect, `None` outside mode capped.
    pub fn beta(&self) -> Option<u32> {
        match self.mode {
            Mode::Capped => Some(match self.beta_override {
                Some(b) => b,
                None => default_beta(self.epsilon).ok()?,
            }),
            _ => None,
        }
    }
}

/// `ceil(3 ln(1/eps) / eps) + 1`.
pub fn default_beta(epsilon: f64) -> Result<u32> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::EpsilonOutOfRange(epsilon, "(0, 1]"));
    }
    let core = (3.0 * (1.0 / epsilon).ln() / epsilon).ceil();
    Ok(core as u32 + 1)
}

/// Outcome of [`Engine::process_edge`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decision {
    Skipped,
    Pushed { leftover: f64, evictions: u8 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Admission {
    Accepted { edge: EdgeRecord, original_w: f64 },
    SelfLoop,
    Dropped,
}

/// Turns raw stream records into engine edges: weight validation, self-loop
/// rejection, threshold filter, vertex remapping and quantization.
#[derive(Clone, Debug)]
pub struct Ingestor {
    table: VertexTable,
    filter: ThresholdFilter,
    quantize_eps: Option<f64>,
}

impl Ingestor {
    pub fn new(cfg: &EngineConfig) -> Self {
        Ingestor {
            table: VertexTable::new(),
            filter: ThresholdFilter::new(cfg.epsilon, cfg.threshold_n),
            quantize_eps: cfg.quantize.then_some(cfg.epsilon),
        }
    }

    pub fn admit(&mut self, raw: RawEdge) -> Result<Admission> {
        if !(raw.w.is_finite() && raw.w > 0.0) {
            return Err(Error::InvalidWeight(raw.w));
        }
        if raw.u == raw.v {
            return Ok(Admission::SelfLoop);
        }
        if self.filter.admit(raw.w) == FilterDecision::Drop {
            return Ok(Admission::Dropped);
        }
        let u = self.table.remap(raw.u);
        let v = self.table.remap(raw.v);
        let w = match self.quantize_eps {
            Some(eps) => quantize(raw.w, eps).value(eps),
            None => raw.w,
        };
        Ok(Admission::Accepted {
            edge: EdgeRecord { u, v, w },
            original_w: raw.w,
        })
    }

    pub fn table(&self) -> &VertexTable {
        &self.table
    }

    pub fn filter(&self) -> &ThresholdFilter {
        &self.filter
    }
}

/// Replays ingestion over a buffered stream: the engine edges, in order,
/// exactly as an engine with the same configuration would see them.
pub fn prepare_stream(edges: &[RawEdge], cfg: &EngineConfig) -> Result<Vec<EdgeRecord>> {
    Ok(prepare_stream_weighted(edges, cfg)?.into_iter().map(|(e, _)| e).collect())
}

/// [`prepare_stream`] keeping each edge's input weight next to it.
pub fn prepare_stream_weighted(edges: &[RawEdge], cfg: &EngineConfig) -> Result<Vec<(EdgeRecord, f64)>> {
    let mut ing = Ingestor::new(cfg);
    let mut out = Vec::with_capacity(edges.len());
    for &raw in edges {
        if let Admission::Accepted { edge, original_w } = ing.admit(raw)? {
            out.push((edge, original_w));
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
enum PhiStore {
    Dense(Vec<f64>),
    Compact(Box<CompactPhi>),
}

/// Everything a finished run produces.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub config: EngineConfig,
    pub beta: Option<u32>,
    /// Matched edges in internal vertex ids, carrying their input weights.
    pub matching: Matching,
    /// Matching weight under the weights the engine actually processed.
    pub engine_matching_weight: f64,
    pub certificate: DualCertificate,
    pub stats: StreamStats,
    pub trace: Option<Vec<TraceEvent>>,
    /// Exact potentials kept next to the compact store (when requested).
    pub shadow_phi: Option<Vec<f64>>,
    /// Per-vertex tracked overstatement of the compact store.
    pub small_mass_bounds: Option<Vec<f64>>,
    pub small_mass_cap: Option<f64>,
    pub compact: Option<CompactFootprint>,
    pub vertices: VertexTable,
    pub threshold_delta: Option<f64>,
}

impl RunOutcome {
    /// Matched edges translated back to input vertex ids.
    pub fn matching_raw(&self) -> Vec<RawEdge> {
        self.matching
            .edges
            .iter()
            .map(|e| RawEdge::new(self.vertices.raw_id(e.u), self.vertices.raw_id(e.v), e.w))
            .collect()
    }

    /// Potentials whose doubled-leftover identity is exact: the shadow
    /// vector for the compact backend, the certificate otherwise.
    pub fn exact_phi(&self) -> &[f64] {
        self.shadow_phi.as_deref().unwrap_or(&self.certificate.phi)
    }
}

/// Single-pass engine state. Strictly sequential; move it between threads
/// between edge arrivals if needed.
#[derive(Clone, Debug)]
pub struct Engine {
    cfg: EngineConfig,
    beta: Option<usize>,
    ingest: Ingestor,
    phi: PhiStore,
    shadow: Option<Vec<f64>>,
    stack: EdgeStack,
    queues: Vec<VecDeque<Handle>>,
    queue_work: u64,
    stats: StreamStats,
    trace: Option<Vec<TraceEvent>>,
    seq: u64,
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Result<Self> {
        let cfg = cfg.validated()?;
        let phi = match cfg.phi_backend {
            PhiBackend::Dense => PhiStore::Dense(Vec::new()),
            PhiBackend::Compact => PhiStore::Compact(Box::new(CompactPhi::new(
                cfg.epsilon,
                cfg.threshold_n.unwrap_or(2),
            )?)),
        };
        let shadow = (cfg.phi_backend == PhiBackend::Compact && cfg.shadow_phi).then(Vec::new);
        Ok(Engine {
            beta: cfg.beta().map(|b| b as usize),
            ingest: Ingestor::new(&cfg),
            phi,
            shadow,
            stack: EdgeStack::new(),
            queues: Vec::new(),
            queue_work: 0,
            stats: StreamStats {
                min_leftover_pushed: f64::INFINITY,
                w_min_seen: f64::INFINITY,
                ..StreamStats::default()
            },
            trace: cfg.trace_enabled.then(Vec::new),
            seq: 0,
            cfg,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    pub fn beta(&self) -> Option<usize> {
        self.beta
    }

    pub fn stats(&self) -> &StreamStats {
        &self.stats
    }

    /// Live stack entries right now.
    pub fn stack_len(&self) -> usize {
        self.stack.len()
    }

    pub fn queue_len(&self, v: VertexId) -> usize {
        self.queues.get(v.index()).map_or(0, VecDeque::len)
    }

    pub fn trace(&self) -> Option<&[TraceEvent]> {
        self.trace.as_deref()
    }

    /// Current potential of `v`.
    pub fn phi(&mut self, v: VertexId) -> f64 {
        match &mut self.phi {
            PhiStore::Dense(phi) => phi.get(v.index()).copied().unwrap_or(0.0),
            PhiStore::Compact(cp) => cp.get(v.index()),
        }
    }

    /// Feeds one raw stream record. `Ok(None)` for self-loops and edges the
    /// threshold filter dropped.
    pub fn ingest(&mut self, raw: RawEdge) -> Result<Option<Decision>> {
        match self.ingest.admit(raw)? {
            Admission::Accepted { edge, original_w } => {
                self.process_weighted(edge, original_w).map(Some)
            }
            Admission::SelfLoop => {
                self.stats.self_loops_rejected += 1;
                Ok(None)
            }
            Admission::Dropped => {
                self.stats.edges_dropped += 1;
                Ok(None)
            }
        }
    }

    /// Processes an edge given in internal vertex ids, bypassing ingestion.
    pub fn process_edge(&mut self, e: EdgeRecord) -> Result<Decision> {
        if e.u == e.v {
            return Err(Error::Config(format!("self-loop at vertex {}", e.u)));
        }
        if !(e.w.is_finite() && e.w > 0.0) {
            return Err(Error::InvalidWeight(e.w));
        }
        self.process_weighted(e, e.w)
    }

    fn ensure_vertex(&mut self, v: usize) {
        if v >= self.stats.per_vertex_push_counts.len() {
            self.stats.per_vertex_push_counts.resize(v + 1, 0);
            if let PhiStore::Dense(phi) = &mut self.phi {
                phi.resize(v + 1, 0.0);
            }
            if let Some(shadow) = &mut self.shadow {
                shadow.resize(v + 1, 0.0);
            }
            if self.beta.is_some() {
                self.queues.resize_with(v + 1, VecDeque::new);
            }
        }
    }

    fn record(&mut self, arrival: u64, edge: EdgeRecord, decision: TraceDecision) {
        if let Some(trace) = &mut self.trace {
            trace.push(TraceEvent {
                seq: self.seq,
                arrival,
                edge,
                decision,
            });
            self.seq += 1;
        }
    }

    fn process_weighted(&mut self, e: EdgeRecord, original_w: f64) -> Result<Decision> {
        let (u, v) = (e.u.index(), e.v.index());
        self.ensure_vertex(u.max(v));
        let eps = self.cfg.epsilon;
        let arrival = self.stats.edges_seen;
        self.stats.edges_seen += 1;
        self.stats.w_max_seen = self.stats.w_max_seen.max(e.w);
        self.stats.w_min_seen = self.stats.w_min_seen.min(e.w);

        if let PhiStore::Compact(cp) = &mut self.phi {
            cp.observe_weight(quantize(e.w, eps));
        }
        let phi_u = self.phi(e.u);
        let phi_v = self.phi(e.v);
        let covered = phi_u + phi_v;
        let raw_leftover = e.w - covered;
        // With eps = 0 an edge whose leftover is exactly zero carries no
        // positive weight and is skipped.
        if e.w < (1.0 + eps) * covered || raw_leftover <= 0.0 {
            self.stats.edges_skipped += 1;
            self.record(arrival, e, TraceDecision::Skipped);
            return Ok(Decision::Skipped);
        }

        let leftover = match &mut self.phi {
            PhiStore::Dense(phi) => {
                phi[u] += raw_leftover;
                phi[v] += raw_leftover;
                raw_leftover
            }
            PhiStore::Compact(cp) => {
                let q = quantize(raw_leftover, eps);
                cp.add(u, q)?;
                cp.add(v, q)?;
                q.value(eps)
            }
        };
        if let Some(shadow) = &mut self.shadow {
            shadow[u] += leftover;
            shadow[v] += leftover;
        }

        self.stats.edges_pushed += 1;
        self.stats.per_vertex_push_counts[u] += 1;
        self.stats.per_vertex_push_counts[v] += 1;
        self.stats.min_leftover_pushed = self.stats.min_leftover_pushed.min(leftover);
        self.record(
            arrival,
            e,
            TraceDecision::Pushed {
                leftover,
                phi_u_before: phi_u,
                phi_v_before: phi_v,
            },
        );

        let handle = self.stack.push(StackEntry {
            edge: e,
            arrival,
            leftover,
            original_w,
        });

        let mut evictions = 0u8;
        if let Some(beta) = self.beta {
            for x in [u, v] {
                self.queues[x].push_back(handle);
                self.queue_work += 1;
                if self.queues[x].len() > beta {
                    let victim = self.queues[x].pop_front().expect("queue is over capacity");
                    self.queue_work += 1;
                    if let Some(gone) = self.stack.remove(victim) {
                        evictions += 1;
                        self.stats.edges_evicted += 1;
                        self.record(
                            gone.arrival,
                            gone.edge,
                            TraceDecision::Evicted {
                                victim: gone.arrival,
                                evictor: arrival,
                            },
                        );
                    }
                }
                let qlen = self.queues[x].len() as u64;
                self.stats.peak_queue_size = self.stats.peak_queue_size.max(qlen);
            }
        }
        self.stats.peak_stack_size = self.stats.peak_stack_size.max(self.stack.len() as u64);
        Ok(Decision::Pushed {
            leftover,
            evictions,
        })
    }

    /// Unwinds the stack into a greedy matching. Consumes the engine.
    pub fn finish(self) -> RunOutcome {
        let Engine {
            cfg,
            beta,
            ingest,
            phi,
            shadow,
            stack,
            queue_work,
            mut stats,
            trace,
            ..
        } = self;
        let n = stats.per_vertex_push_counts.len();
        let mut matched = vec![false; n];
        let mut edges = Vec::new();
        let mut engine_weight = 0.0;
        for entry in stack.iter_top_down() {
            let (u, v) = (entry.edge.u.index(), entry.edge.v.index());
            if !matched[u] && !matched[v] {
                matched[u] = true;
                matched[v] = true;
                engine_weight += entry.edge.w;
                edges.push(EdgeRecord {
                    w: entry.original_w,
                    ..entry.edge
                });
            }
        }
        stats.final_stack_size = stack.len() as u64;
        stats.work_units = stack.work() + queue_work;
        if stats.edges_pushed == 0 {
            stats.min_leftover_pushed = 0.0;
        }
        if stats.edges_seen == 0 {
            stats.w_min_seen = 0.0;
        }

        let (phi, small_mass_bounds, small_mass_cap, compact) = match phi {
            PhiStore::Dense(mut phi) => {
                phi.resize(n, 0.0);
                (phi, None, None, None)
            }
            PhiStore::Compact(mut cp) => {
                let mut decoded = cp.decode_all();
                decoded.resize(n, 0.0);
                let bounds = (0..n).map(|v| cp.small_mass_bound(v)).collect();
                (decoded, Some(bounds), Some(cp.small_mass_cap()), Some(cp.footprint()))
            }
        };
        let threshold_delta = ingest.filter().is_enabled().then(|| ingest.filter().delta());
        RunOutcome {
            beta: beta.map(|b| b as u32),
            matching: Matching::from_edges(edges),
            engine_matching_weight: engine_weight,
            certificate: DualCertificate::new(phi, cfg.epsilon),
            stats,
            trace,
            shadow_phi: shadow,
            small_mass_bounds,
            small_mass_cap,
            compact,
            vertices: ingest.table,
            threshold_delta,
            config: cfg,
        }
    }
}

/// Runs one configured engine over a stream in a single pass.
pub fn run_stream<I>(edges: I, cfg: EngineConfig) -> Result<RunOutcome>
where
    I: IntoIterator<Item = RawEdge>,
{
    let mut engine = Engine::new(cfg)?;
    for raw in edges {
        engine.ingest(raw)?;
    }
    Ok(engine.finish())
}

/// [`run_stream`] over edges whose vertex ids are taken as raw ids.
pub fn run_edges(edges: &[EdgeRecord], cfg: EngineConfig) -> Result<RunOutcome> {
    run_stream(edges.iter().map(|&e| RawEdge::from(e)), cfg)
}
