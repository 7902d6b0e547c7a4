//! Feeding an engine one edge at a time and watching its decisions.
//!
//! cargo run --example incremental

use mwm_stream::{Decision, Engine, EngineConfig, RawEdge, TraceDecision};

fn main() -> mwm_stream::Result<()> {
    // beta = 2 so that the hub's queue overflows quickly
    let mut engine = Engine::new(EngineConfig::capped(0.25).with_beta(2).with_trace())?;
    let stream = [
        RawEdge::new(0, 1, 1.0),
        RawEdge::new(0, 2, 10.0),
        RawEdge::new(0, 2, 11.0),
        RawEdge::new(0, 3, 100.0),
        RawEdge::new(7, 7, 5.0),
        RawEdge::new(1, 3, 60.0),
    ];
    for raw in stream {
        match engine.ingest(raw)? {
            None => println!("{}-{} w={:<5} rejected at ingestion", raw.u, raw.v, raw.w),
            Some(Decision::Skipped) => println!("{}-{} w={:<5} skipped", raw.u, raw.v, raw.w),
            Some(Decision::Pushed { leftover, evictions }) => println!(
                "{}-{} w={:<5} pushed with leftover {leftover}, {evictions} eviction(s), stack holds {}",
                raw.u,
                raw.v,
                raw.w,
                engine.stack_len()
            ),
        }
    }
    let out = engine.finish();
    println!("\ntrace:");
    for ev in out.trace.as_deref().unwrap_or(&[]) {
        match ev.decision {
            TraceDecision::Evicted { victim, evictor } => println!("  edge #{victim} evicted by #{evictor}"),
            d => println!("  edge #{} {:?}", ev.arrival, d),
        }
    }
    println!("\nmatching weight {}", out.matching.total_weight);
    Ok(())
}
