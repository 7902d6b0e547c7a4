//! Ground truth for small graphs, an offline greedy baseline and seeded
//! stream generators.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::default_beta;
use crate::error::{Error, Result};
use crate::types::{EdgeRecord, Matching, VertexId};

/// Largest vertex count [`exact_mwm`] accepts.
pub const ORACLE_CAP: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct SmallGraph {
    pub n: usize,
    pub edges: Vec<EdgeRecord>,
}

impl SmallGraph {
    pub fn new(n: usize, edges: Vec<EdgeRecord>) -> Result<Self> {
        if n > ORACLE_CAP {
            return Err(Error::OracleCap { n, cap: ORACLE_CAP });
        }
        if let Some(e) = edges.iter().find(|e| e.u.index() >= n || e.v.index() >= n) {
            return Err(Error::Config(format!("edge {}-{} outside 0..{n}", e.u, e.v)));
        }
        Ok(SmallGraph { n, edges })
    }

    /// Graph on the vertices `0..=max id` of a stream.
    pub fn from_edges(edges: &[EdgeRecord]) -> Result<Self> {
        let n = edges
            .iter()
            .map(|e| e.u.index().max(e.v.index()) + 1)
            .max()
            .unwrap_or(0);
        SmallGraph::new(n, edges.to_vec())
    }
}

/// Maximum-weight matching by dynamic programming over vertex subsets.
///
/// `best[S]` pairs the lowest vertex of `S` with each neighbour in `S`, or
/// leaves it unmatched. Parallel edges collapse to their heaviest copy.
pub fn exact_mwm(g: &SmallGraph) -> Result<Matching> {
    let n = g.n;
    if n > ORACLE_CAP {
        return Err(Error::OracleCap { n, cap: ORACLE_CAP });
    }
    let mut w = vec![vec![0.0f64; n]; n];
    let mut pick: Vec<Vec<Option<EdgeRecord>>> = vec![vec![None; n]; n];
    for e in &g.edges {
        let (a, b) = (e.u.index(), e.v.index());
        if a == b || e.w <= 0.0 {
            continue;
        }
        if e.w > w[a][b] {
            w[a][b] = e.w;
            w[b][a] = e.w;
            pick[a][b] = Some(*e);
            pick[b][a] = Some(*e);
        }
    }
    let full = (1usize << n) - 1;
    let mut best = vec![0.0f64; full + 1];
    for s in 1..=full {
        let i = s.trailing_zeros() as usize;
        let rest = s & !(1 << i);
        let mut val = best[rest];
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            if w[i][j] > 0.0 {
                val = val.max(w[i][j] + best[rest & !(1 << j)]);
            }
        }
        best[s] = val;
    }
    let mut edges = Vec::new();
    let mut s = full;
    while s != 0 {
        let i = s.trailing_zeros() as usize;
        let rest = s & !(1 << i);
        if best[s] == best[rest] {
            s = rest;
            continue;
        }
        let mut others = rest;
        loop {
            let j = others.trailing_zeros() as usize;
            others &= others - 1;
            let r = rest & !(1 << j);
            if w[i][j] > 0.0 && w[i][j] + best[r] == best[s] {
                edges.push(pick[i][j].expect("weight implies an edge"));
                s = r;
                break;
            }
        }
    }
    Ok(Matching::from_edges(edges))
}

/// Heaviest-first greedy matching, ties broken by `(u, v)`.
pub fn offline_greedy(g: &SmallGraph) -> Matching {
    greedy_matching(&g.edges)
}

/// [`offline_greedy`] over any edge list, without the vertex cap.
pub fn greedy_matching(edges: &[EdgeRecord]) -> Matching {
    let mut sorted: Vec<EdgeRecord> = edges.iter().filter(|e| e.u != e.v).copied().collect();
    sorted.sort_by(|a, b| b.w.total_cmp(&a.w).then((a.u, a.v).cmp(&(b.u, b.v))));
    let mut used = HashSet::new();
    let mut out = Vec::new();
    for e in sorted {
        if !used.contains(&e.u) && !used.contains(&e.v) {
            used.insert(e.u);
            used.insert(e.v);
            out.push(e);
        }
    }
    Matching::from_edges(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphModel {
    /// `m` distinct edges chosen uniformly.
    GnmRandom,
    /// All `n(n-1)/2` pairs; `m` is ignored.
    Complete,
    /// `m` distinct edges between halves `0..n/2` and `n/2..n`.
    Bipartite,
    Path,
    /// Vertex 0 joined to every other vertex.
    Star,
    /// Hubs receiving `beta + 2` edges of rapidly growing weight each, so
    /// their queues overflow in mode capped. Weight law and order are ignored.
    EvictionAdversary { epsilon: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightLaw {
    /// Uniform real in `[1, max]`.
    Uniform { max: f64 },
    /// `(1 + epsilon)^k` with `k` uniform over the exponents not exceeding `max`.
    PowersOf { epsilon: f64, max: f64 },
    Constant { value: f64 },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrivalOrder {
    #[default]
    ArrivalRandom,
    WeightIncreasing,
    WeightDecreasing,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub model: GraphModel,
    pub n: u64,
    pub m: u64,
    pub weight_law: WeightLaw,
    pub order: ArrivalOrder,
    pub seed: u64,
}

impl StreamSpec {
    pub fn new(model: GraphModel, n: u64, m: u64, weight_law: WeightLaw, order: ArrivalOrder, seed: u64) -> Self {
        StreamSpec {
            model,
            n,
            m,
            weight_law,
            order,
            seed,
        }
    }
}

fn sample_weight(law: &WeightLaw, rng: &mut ChaCha8Rng) -> f64 {
    match *law {
        WeightLaw::Uniform { max } => {
            if max > 1.0 {
                rng.gen_range(1.0..=max)
            } else {
                1.0
            }
        }
        WeightLaw::PowersOf { epsilon, max } => {
            let top = (max.ln() / epsilon.ln_1p()).floor().max(0.0) as i32;
            let k = rng.gen_range(0..=top);
            (1.0 + epsilon).powi(k)
        }
        WeightLaw::Constant { value } => value,
    }
}

fn check_law(law: &WeightLaw) -> Result<()> {
    let ok = match *law {
        WeightLaw::Uniform { max } => max.is_finite() && max >= 1.0,
        WeightLaw::PowersOf { epsilon, max } => epsilon > 0.0 && epsilon.is_finite() && max.is_finite() && max >= 1.0,
        WeightLaw::Constant { value } => value.is_finite() && value > 0.0,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::Spec(format!("invalid weight law {law:?}")))
    }
}

fn vertex(x: u64) -> VertexId {
    VertexId(x as u32)
}

fn distinct_pairs(
    count: u64,
    universe: u64,
    rng: &mut ChaCha8Rng,
    all: impl Fn() -> Vec<(u64, u64)>,
    draw: impl Fn(&mut ChaCha8Rng) -> (u64, u64),
) -> Vec<(u64, u64)> {
    // Dense requests shuffle the full pair list, sparse ones reject duplicates.
    if count.saturating_mul(3) >= universe {
        let mut pairs = all();
        pairs.shuffle(rng);
        pairs.truncate(count as usize);
        pairs
    } else {
        let mut seen = HashSet::with_capacity(count as usize);
        let mut out = Vec::with_capacity(count as usize);
        while (out.len() as u64) < count {
            let (a, b) = draw(rng);
            let key = (a.min(b), a.max(b));
            if seen.insert(key) {
                out.push((a, b));
            }
        }
        out
    }
}

fn adversary(n: u64, epsilon: f64) -> Result<Vec<EdgeRecord>> {
    if !(epsilon > 0.0 && epsilon <= 0.25) {
        return Err(Error::Spec(format!("eviction adversary needs epsilon in (0, 1/4], got {epsilon}")));
    }
    if n < 2 {
        return Err(Error::Spec("eviction adversary needs n >= 2".into()));
    }
    let beta = default_beta(epsilon)? as u64;
    let per_hub = beta + 2;
    let hubs = (n / (beta + 3)).max(1);
    let block = n / hubs;
    let mut out = Vec::with_capacity((hubs * per_hub) as usize);
    for h in 0..hubs {
        let hub = h * block;
        let spokes = block - 1;
        let reused = spokes < per_hub;
        let step = if reused {
            2.0 * (1.0 + epsilon).powi(2)
        } else {
            (1.0 + epsilon).powi(2)
        };
        let mut w = 1.0f64;
        for k in 0..per_hub {
            let spoke = hub + 1 + k % spokes;
            if !w.is_finite() || w > 1e300 {
                return Err(Error::Spec("eviction adversary weights overflow".into()));
            }
            out.push(EdgeRecord {
                u: vertex(hub),
                v: vertex(spoke),
                w,
            });
            w *= step;
        }
    }
    Ok(out)
}

/// Deterministic stream for `spec`: the same spec always yields the same
/// edges in the same order.
pub fn generate_stream(spec: &StreamSpec) -> Result<Vec<EdgeRecord>> {
    let n = spec.n;
    if n > u32::MAX as u64 {
        return Err(Error::Spec(format!("n = {n} exceeds the vertex id range")));
    }
    if let GraphModel::EvictionAdversary { epsilon } = spec.model {
        return adversary(n, epsilon);
    }
    check_law(&spec.weight_law)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let pairs_total = n * n.saturating_sub(1) / 2;
    let pairs: Vec<(u64, u64)> = match spec.model {
        GraphModel::GnmRandom => {
            if spec.m > pairs_total {
                return Err(Error::Spec(format!("m = {} exceeds n(n-1)/2 = {pairs_total}", spec.m)));
            }
            distinct_pairs(
                spec.m,
                pairs_total,
                &mut rng,
                || (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect(),
                |r| loop {
                    let a = r.gen_range(0..n);
                    let b = r.gen_range(0..n);
                    if a != b {
                        break (a, b);
                    }
                },
            )
        }
        GraphModel::Bipartite => {
            let left = n / 2;
            let right = n - left;
            if spec.m > left * right {
                return Err(Error::Spec(format!("m = {} exceeds {left}*{right} bipartite pairs", spec.m)));
            }
            distinct_pairs(
                spec.m,
                left * right,
                &mut rng,
                || (0..left).flat_map(|a| (left..n).map(move |b| (a, b))).collect(),
                |r| (r.gen_range(0..left), r.gen_range(left..n)),
            )
        }
        GraphModel::Complete => (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect(),
        GraphModel::Path => (1..n).map(|b| (b - 1, b)).collect(),
        GraphModel::Star => (1..n).map(|b| (0, b)).collect(),
        GraphModel::EvictionAdversary { .. } => unreachable!(),
    };
    let mut edges: Vec<EdgeRecord> = pairs
        .into_iter()
        .map(|(a, b)| EdgeRecord {
            u: vertex(a),
            v: vertex(b),
            w: sample_weight(&spec.weight_law, &mut rng),
        })
        .collect();
    match spec.order {
        ArrivalOrder::ArrivalRandom => edges.shuffle(&mut rng),
        ArrivalOrder::WeightIncreasing => edges.sort_by(|a, b| a.w.total_cmp(&b.w)),
        ArrivalOrder::WeightDecreasing => edges.sort_by(|a, b| b.w.total_cmp(&a.w)),
    }
    Ok(edges)
}
