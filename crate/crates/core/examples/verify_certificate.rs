//! Checking a run: stream replay, trace replay, and what a tampered trace looks like.
//!
//! cargo run --example verify_certificate

use mwm_stream::io::{read_trace, save_trace};
use mwm_stream::oracle::{generate_stream, ArrivalOrder, GraphModel, StreamSpec, WeightLaw};
use mwm_stream::{run_stream, verify_run, verify_trace, EngineConfig, RawEdge, TraceDecision};

fn main() -> mwm_stream::Result<()> {
    let spec = StreamSpec::new(GraphModel::Complete, 80, 0, WeightLaw::PowersOf { epsilon: 0.05, max: 1e6 }, ArrivalOrder::WeightIncreasing, 4);
    let stream: Vec<RawEdge> = generate_stream(&spec)?.into_iter().map(RawEdge::from).collect();
    let cfg = EngineConfig::capped(0.25).with_trace();
    let out = run_stream(stream.iter().copied(), cfg.clone())?;
    println!("{} edges, {} pushed, {} evicted\n", out.stats.edges_seen, out.stats.edges_pushed, out.stats.edges_evicted);

    let report = verify_run(&out, &stream)?;
    for c in &report.checks {
        println!(
            "{:<26} {:<6} {:>6} checked  worst slack {}",
            c.check,
            if c.passed { "ok" } else { "FAILED" },
            c.checked,
            c.worst_slack.map_or("-".into(), |s| format!("{s:.3e}"))
        );
    }

    let dir = std::env::temp_dir().join(format!("mwm-trace-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("trace.jsonl");
    save_trace(&path, out.trace.as_deref().unwrap())?;
    let mut trace = read_trace(&path)?;
    println!("\ntrace file {} verifies: {}", path.display(), verify_trace(&stream, &trace, &cfg)?.passed);

    let i = trace
        .iter()
        .rposition(|ev| matches!(ev.decision, TraceDecision::Pushed { .. }))
        .expect("something was pushed");
    if let TraceDecision::Pushed { phi_u_before, .. } = &mut trace[i].decision {
        *phi_u_before += 1.0;
    }
    let tampered = verify_trace(&stream, &trace, &cfg)?;
    println!("after adding 1 to one recorded potential:");
    for c in tampered.failed() {
        println!("  {} failed: {}", c.check, c.offending[0].detail);
    }
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}
