// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//
// Ratios, feasibility and the lemma inequalities are recomputed here from
// raw run data (matching, potentials, trace) rather than through the
// library's own checkers; the exact oracle is the subset DP.

use std::collections::HashMap;
use std::process::Command;
use std::time::Instant;

use mwm_stream::certificate::{check_discard_sums, check_eviction_ratio, DiscardForest};
use mwm_stream::engine::{default_beta, run_stream, EngineConfig, RunOutcome};
use mwm_stream::oracle::{exact_mwm, generate_stream, ArrivalOrder, GraphModel, SmallGraph, StreamSpec, WeightLaw};
use mwm_stream::{verify_run, RawEdge, TraceDecision, TAU};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORDERS: [ArrivalOrder; 3] = [
    ArrivalOrder::ArrivalRandom,
    ArrivalOrder::WeightIncreasing,
    ArrivalOrder::WeightDecreasing,
];
const EPSILONS: [f64; 3] = [1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0];
const GRAPHS: u64 = 200;

struct Verdict {
    id: &'static str,
    title: &'static str,
    failures: Vec<String>,
    summary: String,
}

impl Verdict {
    fn new(id: &'static str, title: &'static str) -> Self {
        Verdict {
            id,
            title,
            failures: Vec::new(),
            summary: String::new(),
        }
    }

    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }

    fn expect(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.fail(msg());
        }
    }

    fn print(&self) -> bool {
        let ok = self.failures.is_empty();
        println!(
            "{} criterion {:>2}: {} | {}",
            if ok { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.summary
        );
        for f in self.failures.iter().take(5) {
            println!("      {f}");
        }
        if self.failures.len() > 5 {
            println!("      ... {} more", self.failures.len() - 5);
        }
        ok
    }
}

fn raw_stream(spec: &StreamSpec) -> Vec<RawEdge> {
    generate_stream(spec).unwrap().into_iter().map(RawEdge::from).collect()
}

/// Oracle instances: n in 4..=16, m in 1..=min(60, n(n-1)/2).
fn small_specs(law: WeightLaw, salt: u64) -> Vec<(StreamSpec, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0000 + salt);
    let mut out = Vec::new();
    for g in 0..GRAPHS {
        let n: u64 = rng.gen_range(4..=16);
        let m: u64 = rng.gen_range(1..=(n * (n - 1) / 2).min(60));
        let seed = salt * 1_000_003 + g;
        let base = StreamSpec::new(GraphModel::GnmRandom, n, m, law, ArrivalOrder::ArrivalRandom, seed);
        let opt = {
            let edges = generate_stream(&base).unwrap();
            exact_mwm(&SmallGraph::new(n as usize, edges).unwrap()).unwrap().total_weight
        };
        for order in ORDERS {
            out.push((StreamSpec { order, ..base.clone() }, opt));
        }
    }
    out
}

/// Potential of a raw vertex id after a run.
fn phi_of(out: &RunOutcome, phi: &[f64], raw: u64) -> f64 {
    out.vertices.get(raw).map_or(0.0, |v| phi.get(v.index()).copied().unwrap_or(0.0))
}

fn matching_ok(out: &RunOutcome, stream: &[RawEdge]) -> bool {
    let mut used = std::collections::HashSet::new();
    let m = out.matching_raw();
    let disjoint = m.iter().all(|e| used.insert(e.u) && used.insert(e.v));
    let present = m.iter().all(|e| stream.iter().any(|s| s.u == e.u && s.v == e.v && s.w == e.w));
    let sum: f64 = m.iter().map(|e| e.w).sum();
    disjoint && present && (sum - out.matching.total_weight).abs() <= TAU * sum.max(1.0)
}

/// Largest relative violation of `w <= (1 + eps)(phi_u + phi_v)` over the stream.
fn worst_infeasibility(out: &RunOutcome, stream: &[RawEdge], eps: f64) -> f64 {
    let phi = &out.certificate.phi;
    stream
        .iter()
        .filter(|e| e.u != e.v)
        .map(|e| (e.w - (1.0 + eps) * (phi_of(out, phi, e.u) + phi_of(out, phi, e.v))) / e.w)
        .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Default)]
struct IdentityTally {
    runs: u64,
    pushes: u64,
    failures: Vec<String>,
}

impl IdentityTally {
    /// `sum over pushes of 2 w' = sum of potentials`, within TAU per push.
    fn observe(&mut self, label: &str, out: &RunOutcome) {
        let Some(trace) = &out.trace else { return };
        let mut doubled = 0.0;
        let mut pushes = 0u64;
        for ev in trace {
            if let TraceDecision::Pushed { leftover, .. } = ev.decision {
                doubled += 2.0 * leftover;
                pushes += 1;
            }
        }
        let phi_sum: f64 = out.exact_phi().iter().sum();
        self.runs += 1;
        self.pushes += pushes;
        if (doubled - phi_sum).abs() > TAU * pushes.max(1) as f64 * phi_sum.max(1.0) {
            self.failures.push(format!("{label}: 2*sum w' = {doubled}, sum phi = {phi_sum}"));
        }
    }
}

struct RatioRuns {
    runs: u64,
    worst: f64,
}

fn criteria_1_to_4(ids: &mut IdentityTally, space: &mut Verdict) -> Vec<Verdict> {
    let mut c1 = Verdict::new("1", "capped: w(M) >= OPT / (2(1+6eps))");
    let mut c2 = Verdict::new("2", "exp: w(M) >= OPT / (2(1+eps))");
    let mut c3 = Verdict::new("3", "basic: w(M) >= OPT / 2");
    let mut c4 = Verdict::new("4", "dual feasibility and OPT <= (1+eps) sum phi");
    let mut stats: HashMap<&str, RatioRuns> = HashMap::new();
    let mut feas_runs = 0u64;
    let mut worst_feas = f64::NEG_INFINITY;
    let instances = small_specs(WeightLaw::Uniform { max: 100.0 }, 1);
    let started = Instant::now();
    for (spec, opt) in &instances {
        let stream = raw_stream(spec);
        let mut configs = vec![("basic", EngineConfig::basic(), 2.0)];
        for eps in EPSILONS {
            configs.push(("capped", EngineConfig::capped(eps), 2.0 * (1.0 + 6.0 * eps)));
            configs.push(("exp", EngineConfig::exp(eps), 2.0 * (1.0 + eps)));
        }
        for (name, cfg, factor) in configs {
            let cfg = cfg.with_trace();
            let eps = cfg.epsilon;
            let out = run_stream(stream.iter().copied(), cfg).unwrap();
            let label = format!("{name} eps={eps} seed={} order={:?}", spec.seed, spec.order);
            let v = match name {
                "capped" => &mut c1,
                "exp" => &mut c2,
                _ => &mut c3,
            };
            let w = out.matching.total_weight;
            v.expect(matching_ok(&out, &stream), || format!("{label}: invalid matching"));
            v.expect(w * factor >= opt * (1.0 - TAU), || format!("{label}: w(M) = {w}, OPT = {opt}"));
            let r = stats.entry(name).or_insert(RatioRuns { runs: 0, worst: f64::INFINITY });
            r.runs += 1;
            if *opt > 0.0 {
                r.worst = r.worst.min(w / opt);
            }

            let infeas = worst_infeasibility(&out, &stream, eps);
            worst_feas = worst_feas.max(infeas);
            feas_runs += 1;
            c4.expect(infeas <= TAU, || format!("{label}: edge exceeds cover by {infeas:.3e} relative"));
            let ub = (1.0 + eps) * out.certificate.phi.iter().sum::<f64>();
            c4.expect(*opt <= ub * (1.0 + TAU), || format!("{label}: OPT {opt} > upper bound {ub}"));
            c4.expect(w <= ub * (1.0 + TAU), || format!("{label}: w(M) {w} > upper bound {ub}"));
            // the library's own verifier must agree
            let rep = verify_run(&out, &stream).unwrap();
            c4.expect(rep.passed, || format!("{label}: verifier failed {:?}", rep.failed().map(|c| &c.check).collect::<Vec<_>>()));

            if let Some(beta) = out.beta {
                let cap = out.stats.vertices_seen() as u64 * beta as u64;
                space.expect(out.stats.peak_stack_size <= cap, || format!("{label}: peak stack {} > n*beta {cap}", out.stats.peak_stack_size));
            }
            ids.observe(&label, &out);
        }
    }
    let secs = started.elapsed().as_secs_f64();
    for (v, key) in [(&mut c1, "capped"), (&mut c2, "exp"), (&mut c3, "basic")] {
        let r = &stats[key];
        v.summary = format!(
            "{} runs over {} instances, worst w(M)/OPT = {:.4}",
            r.runs,
            instances.len(),
            r.worst
        );
    }
    c4.summary = format!("{feas_runs} runs, worst relative excess {worst_feas:.3e}, {secs:.1}s for criteria 1-4");
    vec![c1, c2, c3, c4]
}

fn criterion_5(mut v: Verdict) -> Verdict {
    // capped at n = 1e5
    let mut big = Vec::new();
    for eps in [0.25, 1.0 / 16.0] {
        let spec = StreamSpec::new(GraphModel::GnmRandom, 100_000, 1_000_000, WeightLaw::Uniform { max: 1e6 }, ArrivalOrder::WeightIncreasing, 5);
        let out = run_stream(raw_stream(&spec), EngineConfig::capped(eps)).unwrap();
        let beta = out.beta.unwrap() as u64;
        let cap = out.stats.vertices_seen() as u64 * beta;
        v.expect(out.stats.peak_stack_size <= cap, || format!("n=1e5 eps={eps}: peak {} > {cap}", out.stats.peak_stack_size));
        big.push(format!("eps={eps}: peak {} <= {cap}", out.stats.peak_stack_size));
    }

    // exp push counts against log_{1+eps}(W) + 2
    let mut runs = 0u64;
    let mut worst_margin = f64::INFINITY;
    let laws = [
        WeightLaw::Uniform { max: 100.0 },
        WeightLaw::Uniform { max: 1e6 },
        WeightLaw::PowersOf { epsilon: 0.01, max: 1e6 },
    ];
    for (li, law) in laws.iter().enumerate() {
        for order in ORDERS {
            for eps in [1.0f64 / 16.0, 1.0 / 8.0, 1.0 / 4.0, 1.0 / 2.0] {
                for (n, m) in [(16, 60), (200, 5_000), (2_000, 40_000)] {
                    let spec = StreamSpec::new(GraphModel::GnmRandom, n, m, *law, order, 100 + li as u64);
                    let stream = raw_stream(&spec);
                    let (lo, hi) = stream
                        .iter()
                        .fold((f64::INFINITY, 0.0f64), |(lo, hi), e| (lo.min(e.w), hi.max(e.w)));
                    let bound = (hi / lo).ln() / eps.ln_1p() + 2.0;
                    let out = run_stream(stream, EngineConfig::exp(eps)).unwrap();
                    let worst = out.stats.max_vertex_push_count() as f64;
                    runs += 1;
                    worst_margin = worst_margin.min(bound - worst);
                    v.expect(worst <= bound, || {
                        format!("exp eps={eps} n={n} {law:?} {order:?}: {worst} pushes at a vertex, bound {bound:.2}")
                    });
                }
            }
        }
    }

    // measured compact footprint
    let spec = StreamSpec::new(GraphModel::GnmRandom, 10_000, 100_000, WeightLaw::Uniform { max: 1e6 }, ArrivalOrder::ArrivalRandom, 6);
    let out = run_stream(raw_stream(&spec), EngineConfig::capped(0.125).with_compaction(10_000)).unwrap();
    let bytes = out.compact.as_ref().map_or(f64::NAN, |f| f.bytes_per_vertex);
    v.summary = format!(
        "capped n=1e5 [{}]; exp push bound over {runs} streams, min slack {worst_margin:.2}; compact phi {bytes:.1} bytes/vertex",
        big.join(", ")
    );
    v
}

struct LemmaCounts {
    runs: u64,
    evictions: u64,
    kept_with_discards: u64,
}

/// Recomputes both eviction inequalities from a trace.
fn eviction_lemmas(out: &RunOutcome, eps: f64, label: &str, v: &mut Verdict, c: &mut LemmaCounts) {
    let trace = out.trace.as_ref().unwrap();
    let mut leftover = HashMap::new();
    let mut evictor_of = HashMap::new();
    for ev in trace {
        match ev.decision {
            TraceDecision::Pushed { leftover: l, .. } => {
                leftover.insert(ev.arrival, l);
            }
            TraceDecision::Evicted { victim, evictor } => {
                c.evictions += 1;
                let (lv, le) = (leftover[&victim], leftover[&evictor]);
                v.expect(le >= lv / eps * (1.0 - TAU), || {
                    format!("{label}: evictor {evictor} w'={le} < w'_victim/eps = {}", lv / eps)
                });
                evictor_of.insert(victim, evictor);
            }
            TraceDecision::Skipped => {}
        }
    }
    let mut discarded: HashMap<u64, f64> = HashMap::new();
    for &victim in evictor_of.keys() {
        let mut end = victim;
        while let Some(&next) = evictor_of.get(&end) {
            end = next;
        }
        *discarded.entry(end).or_default() += leftover[&victim];
    }
    for (kept, sum) in discarded {
        c.kept_with_discards += 1;
        let budget = 4.0 * eps * leftover[&kept];
        v.expect(sum <= budget * (1.0 + TAU), || format!("{label}: D({kept}) sums to {sum} > 4 eps w' = {budget}"));
    }
    // the library checkers must agree
    v.expect(check_eviction_ratio(trace, eps).passed, || format!("{label}: library eviction check disagrees"));
    let forest = DiscardForest::from_trace(trace).unwrap();
    v.expect(check_discard_sums(&forest, eps).passed, || format!("{label}: library discard check disagrees"));
    c.runs += 1;
}

fn criterion_6(mut v: Verdict, ids: &mut IdentityTally, space: &mut Verdict) -> Verdict {
    let mut adv = LemmaCounts { runs: 0, evictions: 0, kept_with_discards: 0 };
    let mut dense = LemmaCounts { runs: 0, evictions: 0, kept_with_discards: 0 };
    for eps in [1.0 / 8.0, 1.0 / 4.0] {
        for n in [2u64, 3, 60, 500, 5_000] {
            let spec = StreamSpec::new(GraphModel::EvictionAdversary { epsilon: eps }, n, 0, WeightLaw::Constant { value: 1.0 }, ArrivalOrder::ArrivalRandom, 0);
            let stream = raw_stream(&spec);
            let out = run_stream(stream.iter().copied(), EngineConfig::capped(eps).with_trace()).unwrap();
            let label = format!("adversary n={n} eps={eps}");
            v.expect(out.stats.edges_evicted > 0, || format!("{label}: no evictions"));
            eviction_lemmas(&out, eps, &label, &mut v, &mut adv);
            ids.observe(&label, &out);
        }
        let laws = [WeightLaw::PowersOf { epsilon: 0.05, max: 1e6 }, WeightLaw::Uniform { max: 1e6 }];
        for (li, law) in laws.iter().enumerate() {
            for order in ORDERS {
                for seed in 0..4 {
                    let spec = match seed % 2 {
                        0 => StreamSpec::new(GraphModel::Complete, 80, 0, *law, order, seed + 10 * li as u64),
                        _ => StreamSpec::new(GraphModel::GnmRandom, 120, 5_000, *law, order, seed + 10 * li as u64),
                    };
                    let stream = raw_stream(&spec);
                    let out = run_stream(stream.iter().copied(), EngineConfig::capped(eps).with_trace()).unwrap();
                    let label = format!("dense {:?} eps={eps} {law:?} {order:?} seed={seed}", spec.model);
                    eviction_lemmas(&out, eps, &label, &mut v, &mut dense);
                    ids.observe(&label, &out);
                    let cap = out.stats.vertices_seen() as u64 * out.beta.unwrap() as u64;
                    space.expect(out.stats.peak_stack_size <= cap, || format!("{label}: peak stack above n*beta"));
                }
            }
        }
    }
    v.expect(dense.evictions > 0, || "dense random streams never evicted".into());
    v.summary = format!(
        "adversary: {} runs, {} evictions, {} discard sets; dense: {} runs, {} evictions, {} discard sets",
        adv.runs, adv.evictions, adv.kept_with_discards, dense.runs, dense.evictions, dense.kept_with_discards
    );
    v
}

fn criterion_8(mut v: Verdict, ids: &mut IdentityTally) -> Verdict {
    let mut runs = 0u64;
    let mut worst = f64::INFINITY;
    let mut shadow_checked = 0u64;
    let mut dropped = 0u64;
    let laws = [WeightLaw::Uniform { max: 1e6 }, WeightLaw::PowersOf { epsilon: 0.05, max: 1e6 }];
    for (li, law) in laws.iter().enumerate() {
        for (spec, opt) in small_specs(*law, 10 + li as u64) {
            let stream = raw_stream(&spec);
            for eps in [1.0 / 16.0, 1.0 / 8.0] {
                let mut cfg = EngineConfig::capped(eps).with_compaction(spec.n).with_trace();
                cfg.shadow_phi = true;
                let out = run_stream(stream.iter().copied(), cfg).unwrap();
                let label = format!("eps={eps} {law:?} seed={} order={:?}", spec.seed, spec.order);
                let w = out.matching.total_weight;
                runs += 1;
                dropped += out.stats.edges_dropped;
                if opt > 0.0 {
                    worst = worst.min(w / opt);
                }
                v.expect(matching_ok(&out, &stream), || format!("{label}: invalid matching"));
                v.expect(w * 2.0 * (1.0 + 10.0 * eps) >= opt * (1.0 - TAU), || format!("{label}: w(M) = {w}, OPT = {opt}"));
                let shadow = out.shadow_phi.as_ref().unwrap();
                let bounds = out.small_mass_bounds.as_ref().unwrap();
                for (x, ((&d, &s), &b)) in out.certificate.phi.iter().zip(shadow).zip(bounds).enumerate() {
                    shadow_checked += 1;
                    let tol = TAU * s.max(1.0);
                    v.expect(d >= s - tol && d <= s + b + tol, || {
                        format!("{label}: vertex {x} decoded {d}, shadow {s}, bound {b}")
                    });
                }
                let rep = verify_run(&out, &stream).unwrap();
                v.expect(rep.passed, || format!("{label}: verifier failed {:?}", rep.failed().map(|c| &c.check).collect::<Vec<_>>()));
                ids.observe(&label, &out);
            }
        }
    }
    v.summary = format!(
        "{runs} runs, worst w(M)/OPT = {worst:.4} (bound 1/(2(1+10eps)) >= {:.4}), {shadow_checked} shadow comparisons, {dropped} edges dropped by threshold",
        1.0 / (2.0 * (1.0 + 10.0 / 8.0))
    );
    v
}

fn criterion_9(mut v: Verdict) -> Verdict {
    let mut per_edge = Vec::new();
    for (m, reps) in [(10_000u64, 60), (100_000, 12), (1_000_000, 4)] {
        let spec = StreamSpec::new(GraphModel::GnmRandom, m / 10, m, WeightLaw::Uniform { max: 100.0 }, ArrivalOrder::ArrivalRandom, 9);
        let stream = raw_stream(&spec);
        let mut best = f64::INFINITY;
        for _ in 0..reps {
            let start = Instant::now();
            let out = run_stream(stream.iter().copied(), EngineConfig::capped(0.25)).unwrap();
            let ns = start.elapsed().as_nanos() as f64;
            std::hint::black_box(out.matching.total_weight);
            best = best.min(ns / m as f64);
        }
        per_edge.push((m, best));
    }
    let lo = per_edge.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = per_edge.iter().map(|p| p.1).fold(0.0, f64::max);
    v.expect(hi < 3.0 * lo, || format!("per-edge time spread {:.2}x", hi / lo));
    v.summary = per_edge
        .iter()
        .map(|(m, ns)| format!("m={m}: {ns:.1} ns/edge ({:.2e} edges/s)", 1e9 / ns))
        .collect::<Vec<_>>()
        .join(", ")
        + &format!("; spread {:.2}x", hi / lo);
    v
}

fn criterion_10(mut v: Verdict) -> Verdict {
    let bin = env!("CARGO_BIN_EXE_mwm-stream");
    let dir = tempfile::tempdir().unwrap();
    let stream = dir.path().join("s.txt");
    let stream2 = dir.path().join("s2.txt");
    let gen = |out: &std::path::Path| {
        Command::new(bin)
            .args(["gen", "--model", "gnm_random", "--n", "400", "--m", "6000", "--weight-law", "uniform", "--w-max", "1000000", "--seed", "17", "--out"])
            .arg(out)
            .status()
            .unwrap()
    };
    v.expect(gen(&stream).success() && gen(&stream2).success(), || "gen failed".into());
    let a = std::fs::read(&stream).unwrap();
    v.expect(a == std::fs::read(&stream2).unwrap(), || "gen output differs between runs".into());
    let flag_sets: [&[&str]; 4] = [
        &["--mode", "capped", "--epsilon", "0.25", "--verify"],
        &["--mode", "exp", "--epsilon", "0.1", "--verify"],
        &["--mode", "basic"],
        &["--mode", "capped", "--epsilon", "0.125", "--quantize", "--threshold-n", "400", "--phi-backend", "compact", "--shadow-phi", "--verify"],
    ];
    let mut compared = 0;
    for flags in flag_sets {
        let run = || {
            Command::new(bin).arg("run").arg(&stream).args(flags).arg("--json").output().unwrap()
        };
        let (x, y) = (run(), run());
        compared += 1;
        v.expect(x.status.success(), || format!("{flags:?}: exit {:?}: {}", x.status.code(), String::from_utf8_lossy(&x.stderr)));
        v.expect(!x.stdout.is_empty() && x.stdout == y.stdout, || format!("{flags:?}: reports differ"));
    }
    v.summary = format!("gen twice identical ({} bytes); {compared} flag sets run twice, byte-identical JSON", a.len());
    v
}

fn main() {
    let started = Instant::now();
    assert_eq!(default_beta(0.25).unwrap(), 18);
    let mut ids = IdentityTally::default();
    let mut space = Verdict::new("5", "space: capped peak <= n*beta, exp pushes <= log_{1+eps} W + 2");
    let mut verdicts = criteria_1_to_4(&mut ids, &mut space);
    let c6 = criterion_6(Verdict::new("6", "eviction ratio and discard sums"), &mut ids, &mut space);
    let c8 = criterion_8(Verdict::new("8", "compaction: w(M) >= OPT / (2(1+10eps)), compact phi within shadow bound"), &mut ids);
    verdicts.push(criterion_5(space));
    verdicts.push(c6);
    let mut c7 = Verdict::new("7", "trace identity sum 2w' = sum phi");
    c7.failures = std::mem::take(&mut ids.failures);
    c7.expect(ids.runs > 0, || "no traced runs".into());
    c7.summary = format!("{} traced runs, {} pushes", ids.runs, ids.pushes);
    verdicts.push(c7);
    verdicts.push(c8);
    verdicts.push(criterion_9(Verdict::new("9", "per-edge time within 3x across 1e4, 1e5, 1e6 edges")));
    verdicts.push(criterion_10(Verdict::new("10", "byte-identical reports for identical inputs")));

    let mut all = true;
    for v in &verdicts {
        all &= v.print();
    }
    println!("acceptance: {} in {:.1}s", if all { "all criteria pass" } else { "FAILURES" }, started.elapsed().as_secs_f64());
    if !all {
        std::process::exit(1);
    }
}
