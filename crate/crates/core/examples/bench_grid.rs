//! Throughput and space across modes and stream sizes.
//!
//! cargo run --release --example bench_grid

use mwm_stream::bench::bench_spec;
use mwm_stream::oracle::{ArrivalOrder, GraphModel, StreamSpec, WeightLaw};
use mwm_stream::EngineConfig;

fn main() -> mwm_stream::Result<()> {
    let configs = [EngineConfig::basic(), EngineConfig::exp(0.25), EngineConfig::capped(0.25), EngineConfig::capped(0.0625)];
    for m in [10_000u64, 100_000, 1_000_000] {
        let spec = StreamSpec::new(GraphModel::GnmRandom, m / 10, m, WeightLaw::Uniform { max: 100.0 }, ArrivalOrder::ArrivalRandom, 1);
        let table = bench_spec(&spec, &configs, 3)?;
        println!("m = {m}\n{}", table.to_text());
    }
    Ok(())
}
