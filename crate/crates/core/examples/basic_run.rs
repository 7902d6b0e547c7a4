//! The three engine modes over one small stream.
//!
//! cargo run --example basic_run

use mwm_stream::{run_stream, EngineConfig, RawEdge};

fn main() -> mwm_stream::Result<()> {
    // a 6-cycle with one heavy chord, arriving in an unlucky order
    let stream = [
        RawEdge::new(1, 2, 4.0),
        RawEdge::new(2, 3, 5.0),
        RawEdge::new(3, 4, 4.0),
        RawEdge::new(4, 5, 6.0),
        RawEdge::new(5, 6, 3.0),
        RawEdge::new(6, 1, 7.0),
        RawEdge::new(1, 4, 12.0),
    ];
    let configs = [
        EngineConfig::basic(),
        EngineConfig::exp(0.1),
        EngineConfig::capped(0.25),
    ];
    for cfg in configs {
        let out = run_stream(stream, cfg)?;
        println!(
            "{:<6} eps={:<5} matching weight {:>5}  certified upper bound {:>7.3}  pushed {} of {}",
            out.config.mode.as_str(),
            out.config.epsilon,
            out.matching.total_weight,
            out.certificate.upper_bound(),
            out.stats.edges_pushed,
            out.stats.edges_seen,
        );
        for e in out.matching_raw() {
            println!("         {} - {}  w={}", e.u, e.v, e.w);
        }
    }
    Ok(())
}
