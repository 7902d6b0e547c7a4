//! Stream specs, generation and the edge-stream text format.
//!
//! cargo run --example generate_streams

use mwm_stream::io::{parse_edge_stream, write_edge_stream};
use mwm_stream::oracle::{generate_stream, ArrivalOrder, GraphModel, StreamSpec, WeightLaw};
use mwm_stream::{run_stream, EngineConfig, RawEdge};

fn main() -> mwm_stream::Result<()> {
    let specs = [
        StreamSpec::new(GraphModel::Path, 5, 0, WeightLaw::Constant { value: 1.0 }, ArrivalOrder::ArrivalRandom, 0),
        StreamSpec::new(GraphModel::Bipartite, 8, 10, WeightLaw::Uniform { max: 50.0 }, ArrivalOrder::WeightDecreasing, 3),
        StreamSpec::new(GraphModel::EvictionAdversary { epsilon: 0.25 }, 2, 0, WeightLaw::Constant { value: 1.0 }, ArrivalOrder::ArrivalRandom, 0),
    ];
    for spec in &specs {
        let json = serde_json::to_string(spec)?;
        let edges: Vec<RawEdge> = generate_stream(spec)?.into_iter().map(RawEdge::from).collect();
        let mut text = Vec::new();
        write_edge_stream(&mut text, Some(spec.n), Some(&format!("spec {json}")), edges.iter().copied())?;
        let text = String::from_utf8(text).expect("ascii");
        println!("{}", text.lines().take(6).collect::<Vec<_>>().join("\n"));
        if text.lines().count() > 6 {
            println!("... {} lines", text.lines().count());
        }
        let back = parse_edge_stream(text.as_bytes())?;
        assert_eq!(back.edges, edges);
        let out = run_stream(back.edges, EngineConfig::capped(0.25))?;
        println!("capped run: weight {}, {} evictions\n", out.matching.total_weight, out.stats.edges_evicted);
    }
    Ok(())
}
