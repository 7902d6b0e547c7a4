//! Quantized weights, the small-weight filter and the compact potential store.
//!
//! cargo run --release --example compaction

use mwm_stream::oracle::{generate_stream, ArrivalOrder, GraphModel, StreamSpec, WeightLaw};
use mwm_stream::{quantize, run_stream, verify_run, EngineConfig, RawEdge};

fn main() -> mwm_stream::Result<()> {
    let eps = 0.125;
    for w in [1.0, 5.0, 1000.0] {
        let q = quantize(w, eps);
        println!("quantize({w}) = (1+eps)^{} = {:.4}", q.exponent, q.value(eps));
    }

    let n = 5_000;
    let spec = StreamSpec::new(GraphModel::GnmRandom, n, 60_000, WeightLaw::PowersOf { epsilon: 0.01, max: 1e6 }, ArrivalOrder::ArrivalRandom, 2);
    let stream: Vec<RawEdge> = generate_stream(&spec)?.into_iter().map(RawEdge::from).collect();

    let dense = run_stream(stream.iter().copied(), EngineConfig::capped(eps))?;
    let mut cfg = EngineConfig::capped(eps).with_compaction(n);
    cfg.shadow_phi = true;
    let compact = run_stream(stream.iter().copied(), cfg)?;

    println!("\nplain run:     matching {:.1}", dense.matching.total_weight);
    println!("compacted run: matching {:.1}, {} edges below delta = {:.3e} dropped", compact.matching.total_weight, compact.stats.edges_dropped, compact.threshold_delta.unwrap_or(0.0));
    if let Some(f) = &compact.compact {
        println!("compact phi:   window {} positions, {} bits/digit, {:.1} bytes per vertex", f.window, f.digit_bits, f.bytes_per_vertex);
    }
    let shadow = compact.shadow_phi.as_ref().unwrap();
    let bounds = compact.small_mass_bounds.as_ref().unwrap();
    let worst = compact
        .certificate
        .phi
        .iter()
        .zip(shadow)
        .zip(bounds)
        .map(|((d, s), b)| if *b > 0.0 { (d - s) / b } else { 0.0 })
        .fold(0.0, f64::max);
    println!("decoded - exact uses at most {:.1}% of the tracked slack", worst * 100.0);
    let report = verify_run(&compact, &stream)?;
    println!("verification: {}", if report.passed { "all checks pass" } else { "FAILED" });
    Ok(())
}
