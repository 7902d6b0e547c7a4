//! Engine, offline greedy and the exact optimum on random small graphs.
//!
//! cargo run --release --example oracle_compare

use mwm_stream::oracle::{exact_mwm, generate_stream, offline_greedy, ArrivalOrder, GraphModel, SmallGraph, StreamSpec, WeightLaw};
use mwm_stream::{run_edges, EngineConfig};

fn main() -> mwm_stream::Result<()> {
    let configs = [EngineConfig::basic(), EngineConfig::exp(0.1), EngineConfig::capped(0.25), EngineConfig::capped(0.0625)];
    let mut worst = vec![f64::INFINITY; configs.len() + 1];
    let mut mean = vec![0.0; configs.len() + 1];
    let trials = 300;
    for seed in 0..trials {
        let n = 6 + seed % 11;
        let spec = StreamSpec::new(GraphModel::GnmRandom, n, (n * (n - 1) / 4).min(60), WeightLaw::Uniform { max: 100.0 }, ArrivalOrder::ArrivalRandom, seed);
        let edges = generate_stream(&spec)?;
        let g = SmallGraph::new(n as usize, edges.clone())?;
        let opt = exact_mwm(&g)?.total_weight;
        let mut ratios: Vec<f64> = Vec::new();
        for cfg in &configs {
            ratios.push(run_edges(&edges, cfg.clone())?.matching.total_weight / opt);
        }
        ratios.push(offline_greedy(&g).total_weight / opt);
        for (i, r) in ratios.into_iter().enumerate() {
            worst[i] = worst[i].min(r);
            mean[i] += r / trials as f64;
        }
    }
    let names = ["basic", "exp 0.1", "capped 0.25", "capped 1/16", "offline greedy"];
    println!("{:<16} {:>10} {:>10}", "algorithm", "mean", "worst");
    for i in 0..names.len() {
        println!("{:<16} {:>10.4} {:>10.4}", names[i], mean[i], worst[i]);
    }
    Ok(())
}
