//! Throughput and space measurements over generated streams.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::engine::{run_stream, EngineConfig, Mode};
use crate::error::Result;
use crate::oracle::{generate_stream, StreamSpec};
use crate::types::RawEdge;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchCell {
    pub mode: Mode,
    pub epsilon: f64,
    pub beta: Option<u32>,
    pub edges: u64,
    pub vertices: usize,
    /// Best wall time over the repetitions.
    pub best_ns: u64,
    pub ns_per_edge: f64,
    pub edges_per_sec: f64,
    pub peak_stack_size: u64,
    /// `n * beta` in mode capped.
    pub stack_cap: Option<u64>,
    pub max_vertex_push_count: u32,
    pub edges_evicted: u64,
    pub matching_weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub spec: Option<StreamSpec>,
    pub reps: u32,
    pub cells: Vec<BenchCell>,
}

/// Times `reps` full runs of one configuration and keeps the fastest.
pub fn run_cell(edges: &[RawEdge], cfg: &EngineConfig, reps: u32) -> Result<BenchCell> {
    let mut best = u64::MAX;
    let mut last = None;
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        let out = run_stream(edges.iter().copied(), cfg.clone())?;
        best = best.min(start.elapsed().as_nanos() as u64);
        last = Some(out);
    }
    let out = last.expect("at least one repetition");
    let m = edges.len().max(1) as f64;
    let n = out.stats.vertices_seen();
    Ok(BenchCell {
        mode: out.config.mode,
        epsilon: out.config.epsilon,
        beta: out.beta,
        edges: edges.len() as u64,
        vertices: n,
        best_ns: best,
        ns_per_edge: best as f64 / m,
        edges_per_sec: if best == 0 { 0.0 } else { m * 1e9 / best as f64 },
        peak_stack_size: out.stats.peak_stack_size,
        stack_cap: out.beta.map(|b| n as u64 * b as u64),
        max_vertex_push_count: out.stats.max_vertex_push_count(),
        edges_evicted: out.stats.edges_evicted,
        matching_weight: out.matching.total_weight,
    })
}

/// Runs every configuration over the same stream, one after another.
pub fn run_grid(edges: &[RawEdge], configs: &[EngineConfig], reps: u32) -> Result<Vec<BenchCell>> {
    configs.iter().map(|c| run_cell(edges, c, reps)).collect()
}

pub fn bench_spec(spec: &StreamSpec, configs: &[EngineConfig], reps: u32) -> Result<BenchTable> {
    let edges: Vec<RawEdge> = generate_stream(spec)?.into_iter().map(RawEdge::from).collect();
    Ok(BenchTable {
        spec: Some(spec.clone()),
        reps,
        cells: run_grid(&edges, configs, reps)?,
    })
}

impl BenchTable {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:<7} {:>8} {:>5} {:>10} {:>10} {:>12} {:>11} {:>12} {:>9}\n",
            "mode", "eps", "beta", "edges", "ns/edge", "edges/s", "peak_stack", "n*beta", "evicted"
        );
        for c in &self.cells {
            s += &format!(
                "{:<7} {:>8.4} {:>5} {:>10} {:>10.1} {:>12.0} {:>11} {:>12} {:>9}\n",
                c.mode.as_str(),
                c.epsilon,
                c.beta.map_or("-".into(), |b| b.to_string()),
                c.edges,
                c.ns_per_edge,
                c.edges_per_sec,
                c.peak_stack_size,
                c.stack_cap.map_or("-".into(), |b| b.to_string()),
                c.edges_evicted
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{ArrivalOrder, GraphModel, WeightLaw};

    #[test]
    fn grid_reports_space() {
        let spec = StreamSpec::new(GraphModel::GnmRandom, 200, 2000, WeightLaw::Uniform { max: 100.0 }, ArrivalOrder::ArrivalRandom, 1);
        let t = bench_spec(&spec, &[EngineConfig::capped(0.25), EngineConfig::exp(0.25)], 1).unwrap();
        assert_eq!(t.cells.len(), 2);
        let capped = &t.cells[0];
        assert_eq!(capped.beta, Some(18));
        assert!(capped.peak_stack_size <= capped.stack_cap.unwrap());
        assert_eq!(t.cells[1].stack_cap, None);
        assert!(t.to_text().lines().count() == 3);
    }
}
