//! Whole-run verification: replays the buffered stream against a finished
//! run, or against a trace file alone.

use std::collections::HashSet;

use crate::certificate::{
    check_bound_covers, check_compact_shadow, check_condition, check_composition, check_discard_sums,
    check_dual_feasible, check_dual_feasible_with, check_eviction_ratio,
    check_exponential_growth, check_push_lemma, check_trace_identity, CheckReport,
    DiscardForest, DualCertificate, LeftoverRule, VerificationReport,
};
use crate::engine::{prepare_stream_weighted, EngineConfig, Mode, PhiBackend, RunOutcome};
use crate::error::{Error, Result};
use crate::types::{EdgeRecord, Matching, RawEdge, TraceDecision, TraceEvent, TAU};

/// Upper bound on pushes at one vertex in mode exp: the first push leaves at
/// least `min_leftover`, every later one multiplies the potential by
/// `1 + growth`, and no potential exceeds `w_max`.
pub fn exp_push_bound(growth: f64, w_max: f64, min_leftover: f64) -> f64 {
    if min_leftover <= 0.0 || w_max <= min_leftover {
        return 1.0;
    }
    1.0 + (w_max / min_leftover).ln() / growth.ln_1p()
}

fn growth_of(cfg: &EngineConfig) -> f64 {
    match cfg.phi_backend {
        PhiBackend::Dense => cfg.epsilon,
        PhiBackend::Compact => cfg.epsilon / (1.0 + cfg.epsilon),
    }
}

fn discard_eps(cfg: &EngineConfig) -> f64 {
    if cfg.mode == Mode::Capped {
        cfg.epsilon
    } else {
        0.0
    }
}

fn space_checks(out: &RunOutcome) -> Vec<CheckReport> {
    let stats = &out.stats;
    let mut checks = Vec::new();
    if let Some(beta) = out.beta {
        let n = stats.vertices_seen() as u64;
        let cap = n * beta as u64;
        checks.push(check_condition("space_stack", stats.peak_stack_size <= cap, || {
            format!("peak stack {} exceeds n*beta = {cap}", stats.peak_stack_size)
        }));
        checks.push(check_condition("space_queue", stats.peak_queue_size <= beta as u64, || {
            format!("peak queue {} exceeds beta = {beta}", stats.peak_queue_size)
        }));
    } else if out.config.mode == Mode::Exp && out.config.phi_backend == PhiBackend::Dense {
        let bound = exp_push_bound(out.config.epsilon, stats.w_max_seen, stats.min_leftover_pushed);
        let worst = stats.max_vertex_push_count();
        checks.push(check_condition("space_push_count", (worst as f64) <= bound * (1.0 + TAU), || {
            format!("vertex pushed {worst} times, bound {bound}")
        }));
    }
    checks
}

fn trace_checks(trace: &[TraceEvent], exact_phi: &[f64], cfg: &EngineConfig) -> Vec<CheckReport> {
    let rule = match cfg.phi_backend {
        PhiBackend::Dense => LeftoverRule::Exact,
        PhiBackend::Compact => LeftoverRule::RoundedDown,
    };
    let mut checks = vec![
        check_push_lemma(trace),
        check_trace_identity(trace, exact_phi, cfg.epsilon, rule),
    ];
    if cfg.epsilon > 0.0 {
        checks.push(check_exponential_growth(trace, growth_of(cfg)));
    }
    if cfg.mode == Mode::Capped {
        checks.push(check_eviction_ratio(trace, cfg.epsilon));
        checks.push(match DiscardForest::from_trace(trace) {
            Ok(f) => check_discard_sums(&f, cfg.epsilon),
            Err(e) => check_condition("discard_sums", false, || e.to_string()),
        });
    }
    checks
}

/// Verifies a finished run against the stream it consumed.
pub fn verify_run(out: &RunOutcome, stream: &[RawEdge]) -> Result<VerificationReport> {
    let cfg = &out.config;
    let prepared = prepare_stream_weighted(stream, cfg)?;
    if prepared.len() as u64 != out.stats.edges_seen {
        return Err(Error::TraceMismatch(format!(
            "stream replays to {} edges, run saw {}",
            prepared.len(),
            out.stats.edges_seen
        )));
    }
    let engine_edges: Vec<EdgeRecord> = prepared.iter().map(|(e, _)| *e).collect();
    let cert = &out.certificate;
    let mut checks = vec![
        check_condition("matching_valid", out.matching.is_valid(), || "matching is not vertex-disjoint".into()),
        check_dual_feasible(cert, &engine_edges),
    ];
    if cfg.quantize {
        let eff = (1.0 + cfg.epsilon).powi(2) - 1.0;
        let originals = prepared
            .iter()
            .enumerate()
            .map(|(i, (e, w))| (i as u64, EdgeRecord { w: *w, ..*e }));
        checks.push(check_dual_feasible_with(cert, originals, eff, "dual_feasibility_original"));
    }
    let scale = if cfg.quantize { 1.0 + cfg.epsilon } else { 1.0 };
    checks.push(check_bound_covers(
        "matching_within_bound",
        cert.upper_bound() * scale,
        out.matching.total_weight,
    ));
    let exact_known = cfg.phi_backend == PhiBackend::Dense || out.shadow_phi.is_some();
    if exact_known {
        let phi_sum: f64 = out.exact_phi().iter().sum();
        checks.push(check_composition(out.engine_matching_weight, phi_sum, discard_eps(cfg)));
    }
    checks.extend(space_checks(out));
    if let (Some(shadow), Some(bounds)) = (&out.shadow_phi, &out.small_mass_bounds) {
        checks.push(check_compact_shadow(&cert.phi, shadow, bounds));
    }
    if let Some(trace) = &out.trace {
        if exact_known {
            checks.extend(trace_checks(trace, out.exact_phi(), cfg));
        } else {
            let mut partial = trace_checks(trace, &[], cfg);
            partial.retain(|c| c.check != "trace_identity");
            checks.extend(partial);
        }
    }
    Ok(VerificationReport::new(checks))
}

/// Matching obtained by unwinding the stack a trace describes, under the
/// weights recorded in the trace.
pub fn replay_matching(trace: &[TraceEvent]) -> Matching {
    let evicted: HashSet<u64> = trace
        .iter()
        .filter_map(|ev| match ev.decision {
            TraceDecision::Evicted { victim, .. } => Some(victim),
            _ => None,
        })
        .collect();
    let mut kept: Vec<(u64, EdgeRecord)> = trace
        .iter()
        .filter(|ev| matches!(ev.decision, TraceDecision::Pushed { .. }) && !evicted.contains(&ev.arrival))
        .map(|ev| (ev.arrival, ev.edge))
        .collect();
    kept.sort_by_key(|k| std::cmp::Reverse(k.0));
    let mut used = HashSet::new();
    let mut edges = Vec::new();
    for (_, e) in kept {
        if !used.contains(&e.u) && !used.contains(&e.v) {
            used.insert(e.u);
            used.insert(e.v);
            edges.push(e);
        }
    }
    Matching::from_edges(edges)
}

/// Verifies a trace file against the stream it claims to describe, with
/// potentials rebuilt from the trace. Only dense-backend traces qualify.
pub fn verify_trace(stream: &[RawEdge], trace: &[TraceEvent], cfg: &EngineConfig) -> Result<VerificationReport> {
    let cfg = cfg.clone().validated()?;
    if cfg.phi_backend == PhiBackend::Compact {
        return Err(Error::Config(
            "traces of the compact backend carry rounded potentials and cannot be replayed".into(),
        ));
    }
    let prepared = prepare_stream_weighted(stream, &cfg)?;
    let decisions: Vec<&TraceEvent> = trace
        .iter()
        .filter(|ev| !matches!(ev.decision, TraceDecision::Evicted { .. }))
        .collect();
    if decisions.len() != prepared.len() {
        return Err(Error::TraceMismatch(format!(
            "trace decides {} edges, stream has {}",
            decisions.len(),
            prepared.len()
        )));
    }
    let mut matches_stream = true;
    let mut first_bad = None;
    for (i, (ev, (e, _))) in decisions.iter().zip(&prepared).enumerate() {
        if ev.arrival != i as u64 || ev.edge != *e {
            matches_stream = false;
            first_bad.get_or_insert(i);
        }
    }
    let n = prepared
        .iter()
        .map(|(e, _)| e.u.index().max(e.v.index()) + 1)
        .max()
        .unwrap_or(0);
    let mut phi = vec![0.0; n];
    for ev in trace {
        if let TraceDecision::Pushed { leftover, .. } = ev.decision {
            for x in [ev.edge.u.index(), ev.edge.v.index()] {
                if x < n {
                    phi[x] += leftover;
                }
            }
        }
    }
    let cert = DualCertificate::new(phi, cfg.epsilon);
    let engine_edges: Vec<EdgeRecord> = prepared.iter().map(|(e, _)| *e).collect();
    let matching = replay_matching(trace);
    let mut checks = vec![
        check_condition("trace_matches_stream", matches_stream, || {
            format!("trace diverges from the stream at edge {}", first_bad.unwrap_or(0))
        }),
        check_dual_feasible(&cert, &engine_edges),
        check_bound_covers("matching_within_bound", cert.upper_bound(), matching.total_weight),
        check_composition(matching.total_weight, cert.phi_sum, discard_eps(&cfg)),
    ];
    checks.extend(trace_checks(trace, &cert.phi, &cfg));
    Ok(VerificationReport::new(checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run_stream;

    fn raw(u: u64, v: u64, w: f64) -> RawEdge {
        RawEdge::new(u, v, w)
    }

    #[test]
    fn path_run_verifies() {
        let stream = [raw(0, 1, 1.0), raw(1, 2, 2.0)];
        let out = run_stream(stream, EngineConfig::basic().with_trace()).unwrap();
        let rep = verify_run(&out, &stream).unwrap();
        assert!(rep.passed, "{rep:#?}");
        assert!(rep.get("push_lemma").is_some());
    }

    #[test]
    fn trace_verifies_and_tamper_fails() {
        // beta = 2 evicts the first hub edge; tenfold growth keeps the
        // eviction ratio that the default beta would guarantee
        let stream = [raw(0, 1, 1.0), raw(0, 2, 10.0), raw(0, 3, 100.0), raw(1, 3, 50.0)];
        let cfg = EngineConfig::capped(0.25).with_beta(2).with_trace();
        let out = run_stream(stream, cfg.clone()).unwrap();
        assert_eq!(out.stats.edges_evicted, 1);
        let trace = out.trace.clone().unwrap();
        let rep = verify_trace(&stream, &trace, &cfg).unwrap();
        assert!(rep.passed, "{rep:#?}");
        assert_eq!(replay_matching(&trace).total_weight, out.engine_matching_weight);

        let mut bad = trace.clone();
        let i = bad
            .iter()
            .rposition(|ev| matches!(ev.decision, TraceDecision::Pushed { .. }))
            .unwrap();
        if let TraceDecision::Pushed { phi_u_before, .. } = &mut bad[i].decision {
            *phi_u_before += 1.0;
        }
        let rep = verify_trace(&stream, &bad, &cfg).unwrap();
        assert!(!rep.passed);
        assert!(!rep.get("trace_identity").unwrap().passed);
    }

    #[test]
    fn trace_count_mismatch_refused() {
        let stream = [raw(0, 1, 1.0), raw(1, 2, 2.0)];
        let cfg = EngineConfig::basic().with_trace();
        let out = run_stream(stream, cfg.clone()).unwrap();
        let trace = out.trace.unwrap();
        assert!(verify_trace(&stream[..1], &trace, &cfg).is_err());
    }

    #[test]
    fn push_bound_examples() {
        assert_eq!(exp_push_bound(0.5, 1.0, 1.0), 1.0);
        // 1.5^2 = 2.25
        assert!((exp_push_bound(0.5, 2.25, 1.0) - 3.0).abs() < 1e-12);
    }
}
