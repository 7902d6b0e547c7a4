//! Domain types shared by the engine, the verifiers and the oracle.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Relative tolerance for every inequality checked during verification.
pub const TAU: f64 = 1e-9;

/// Dense internal vertex index, allocated in first-seen order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u32);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One stream item.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub u: VertexId,
    pub v: VertexId,
    pub w: f64,
}

impl EdgeRecord {
    pub fn new(u: u32, v: u32, w: f64) -> Self {
        EdgeRecord {
            u: VertexId(u),
            v: VertexId(v),
            w,
        }
    }

    #[inline]
    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }

    #[inline]
    pub fn shares_endpoint(&self, other: &EdgeRecord) -> bool {
        self.touches(other.u) || self.touches(other.v)
    }

    /// Endpoints with the smaller id first.
    pub fn ordered(&self) -> (VertexId, VertexId) {
        if self.u <= self.v {
            (self.u, self.v)
        } else {
            (self.v, self.u)
        }
    }
}

/// An edge as it appears in an input stream, before vertex remapping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RawEdge {
    pub u: u64,
    pub v: u64,
    pub w: f64,
}

impl RawEdge {
    pub fn new(u: u64, v: u64, w: f64) -> Self {
        RawEdge { u, v, w }
    }
}

impl From<EdgeRecord> for RawEdge {
    fn from(e: EdgeRecord) -> Self {
        RawEdge::new(e.u.0 as u64, e.v.0 as u64, e.w)
    }
}

/// A set of vertex-disjoint edges.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Matching {
    pub edges: Vec<EdgeRecord>,
    pub total_weight: f64,
}

impl Matching {
    pub fn from_edges(edges: Vec<EdgeRecord>) -> Self {
        let total_weight = edges.iter().map(|e| e.w).sum();
        Matching {
            edges,
            total_weight,
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Checks vertex-disjointness and the stored total in O(|M|).
    pub fn is_valid(&self) -> bool {
        let mut seen = std::collections::HashSet::with_capacity(self.edges.len() * 2);
        for e in &self.edges {
            if e.u == e.v || !seen.insert(e.u) || !seen.insert(e.v) {
                return false;
            }
        }
        let sum: f64 = self.edges.iter().map(|e| e.w).sum();
        (sum - self.total_weight).abs() <= TAU * sum.abs().max(1.0)
    }
}

/// Counters maintained by the engine over one run.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StreamStats {
    pub edges_seen: u64,
    pub edges_pushed: u64,
    pub edges_skipped: u64,
    pub edges_evicted: u64,
    /// Self-loops rejected at ingestion; not counted in `edges_seen`.
    pub self_loops_rejected: u64,
    /// Edges removed by the weight threshold filter; not counted in `edges_seen`.
    pub edges_dropped: u64,
    pub peak_stack_size: u64,
    pub final_stack_size: u64,
    pub peak_queue_size: u64,
    pub per_vertex_push_counts: Vec<u32>,
    pub w_max_seen: f64,
    pub w_min_seen: f64,
    /// Smallest leftover weight among pushed edges.
    pub min_leftover_pushed: f64,
    /// Elementary stack and queue operations, for the amortized-work check.
    pub work_units: u64,
}

impl StreamStats {
    pub fn vertices_seen(&self) -> usize {
        self.per_vertex_push_counts.len()
    }

    pub fn max_vertex_push_count(&self) -> u32 {
        self.per_vertex_push_counts.iter().copied().max().unwrap_or(0)
    }
}

/// What the engine did with an arriving edge.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceDecision {
    Skipped,
    Pushed {
        leftover: f64,
        phi_u_before: f64,
        phi_v_before: f64,
    },
    /// `edge` of the enclosing event is the victim.
    Evicted { victim: u64, evictor: u64 },
}

/// One line of the per-edge decision log.
///
/// `arrival` is the position of the edge among processed stream edges and
/// serves as its identity, since parallel edges are legal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub seq: u64,
    pub arrival: u64,
    pub edge: EdgeRecord,
    pub decision: TraceDecision,
}

/// Injective map from external vertex ids to dense indices.
///
/// Small raw ids are looked up in a flat table; the table only grows while
/// it stays within a constant factor of the vertex count, so sparse or huge
/// ids fall back to hashing.
#[derive(Clone, Debug, Default)]
pub struct VertexTable {
    direct: Vec<u32>,
    index: HashMap<u64, VertexId>,
    raw: Vec<u64>,
}

const UNSET: u32 = u32::MAX;
const DIRECT_FLOOR: u64 = 1 << 16;

impl VertexTable {
    pub fn new() -> Self {
        Self::default()
    }

    fn direct_limit(&self) -> u64 {
        DIRECT_FLOOR.max(8 * self.raw.len() as u64)
    }

    pub fn remap(&mut self, raw_id: u64) -> VertexId {
        if let Some(id) = self.get(raw_id) {
            return id;
        }
        let id = VertexId(self.raw.len() as u32);
        self.raw.push(raw_id);
        if raw_id < self.direct_limit() {
            let i = raw_id as usize;
            if i >= self.direct.len() {
                let want = (i + 1).max(self.direct.len() * 2).min(self.direct_limit() as usize);
                self.direct.resize(want, UNSET);
            }
            self.direct[i] = id.0;
        } else {
            self.index.insert(raw_id, id);
        }
        id
    }

    #[inline]
    pub fn get(&self, raw_id: u64) -> Option<VertexId> {
        // ids hashed before the flat table grew over them stay in the map
        match usize::try_from(raw_id).ok().and_then(|i| self.direct.get(i)) {
            Some(&d) if d != UNSET => Some(VertexId(d)),
            _ if self.index.is_empty() => None,
            _ => self.index.get(&raw_id).copied(),
        }
    }

    pub fn raw_id(&self, id: VertexId) -> u64 {
        self.raw[id.index()]
    }

    pub fn len(&self) -> usize {
        self.raw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw.is_empty()
    }
}
