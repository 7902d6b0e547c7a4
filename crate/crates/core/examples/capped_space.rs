//! Stored edges of mode exp versus mode capped on a weight-increasing stream.
//!
//! cargo run --release --example capped_space

use mwm_stream::oracle::{generate_stream, ArrivalOrder, GraphModel, StreamSpec, WeightLaw};
use mwm_stream::{run_stream, EngineConfig, RawEdge};

fn main() -> mwm_stream::Result<()> {
    let spec = StreamSpec::new(
        GraphModel::GnmRandom,
        20_000,
        400_000,
        WeightLaw::PowersOf { epsilon: 0.01, max: 1e9 },
        ArrivalOrder::WeightIncreasing,
        1,
    );
    let stream: Vec<RawEdge> = generate_stream(&spec)?.into_iter().map(RawEdge::from).collect();
    println!("{} edges on {} vertices, weights increasing\n", stream.len(), spec.n);
    println!("{:<7} {:>7} {:>5} {:>11} {:>12} {:>10} {:>14}", "mode", "eps", "beta", "peak stack", "n*beta", "evicted", "matching");
    for eps in [0.25, 0.125, 0.0625] {
        for cfg in [EngineConfig::exp(eps), EngineConfig::capped(eps)] {
            let out = run_stream(stream.iter().copied(), cfg)?;
            let n = out.stats.vertices_seen() as u64;
            println!(
                "{:<7} {:>7} {:>5} {:>11} {:>12} {:>10} {:>14.1}",
                out.config.mode.as_str(),
                eps,
                out.beta.map_or("-".into(), |b| b.to_string()),
                out.stats.peak_stack_size,
                out.beta.map_or("-".into(), |b| (n * b as u64).to_string()),
                out.stats.edges_evicted,
                out.matching.total_weight
            );
        }
    }
    Ok(())
}
