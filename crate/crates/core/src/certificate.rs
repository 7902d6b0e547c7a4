//! Dual certificates and the trace-level inequalities behind the
//! approximation guarantees.
//!
//! Every check returns a [`CheckReport`] instead of failing fast. Slack is
//! relative and signed: negative slack below `-TAU` is a violation, and the
//! report keeps the worst item plus the first few offenders.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{EdgeRecord, TraceDecision, TraceEvent, VertexId, TAU};

/// Final potentials of a run. Scaled by `1 + epsilon` they form a feasible
/// solution of the fractional vertex-cover dual of matching.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub phi: Vec<f64>,
    pub epsilon: f64,
    pub phi_sum: f64,
}

impl DualCertificate {
    pub fn new(phi: Vec<f64>, epsilon: f64) -> Self {
        let phi_sum = phi.iter().sum();
        DualCertificate {
            phi,
            epsilon,
            phi_sum,
        }
    }

    #[inline]
    pub fn phi_of(&self, v: VertexId) -> f64 {
        self.phi.get(v.index()).copied().unwrap_or(0.0)
    }

    /// `(1 + eps) * sum(phi)`; no matching in the certified stream weighs more.
    pub fn upper_bound(&self) -> f64 {
        (1.0 + self.epsilon) * self.phi_sum
    }

    pub fn is_well_formed(&self) -> bool {
        let sum: f64 = self.phi.iter().sum();
        self.phi.iter().all(|&p| p >= 0.0 && p.is_finite())
            && (sum - self.phi_sum).abs() <= TAU * sum.max(1.0)
    }
}

/// Free-function form of [`DualCertificate::upper_bound`].
pub fn upper_bound(cert: &DualCertificate) -> f64 {
    cert.upper_bound()
}

/// One failing (or worst) item of a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Offense {
    /// Arrival index of the edge concerned, if any.
    pub arrival: Option<u64>,
    pub slack: f64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub passed: bool,
    pub checked: u64,
    pub violations: u64,
    /// Smallest relative slack seen; `None` when nothing was checked.
    pub worst_slack: Option<f64>,
    pub worst: Option<Offense>,
    pub offending: Vec<Offense>,
}

const MAX_OFFENDERS: usize = 16;

struct Tally {
    report: CheckReport,
}

impl Tally {
    fn new(name: &str) -> Self {
        Tally {
            report: CheckReport {
                check: name.to_string(),
                passed: true,
                checked: 0,
                violations: 0,
                worst_slack: None,
                worst: None,
                offending: Vec::new(),
            },
        }
    }

    fn observe(&mut self, arrival: Option<u64>, slack: f64, detail: impl FnOnce() -> String) {
        let r = &mut self.report;
        r.checked += 1;
        let is_worst = r.worst_slack.is_none_or(|w| slack < w) || slack.is_nan();
        let violated = slack.is_nan() || slack < -TAU;
        if !is_worst && !violated {
            return;
        }
        let off = Offense {
            arrival,
            slack,
            detail: detail(),
        };
        if is_worst {
            r.worst_slack = Some(slack);
            r.worst = Some(off.clone());
        }
        if violated {
            r.passed = false;
            r.violations += 1;
            if r.offending.len() < MAX_OFFENDERS {
                r.offending.push(off);
            }
        }
    }

    fn fail(&mut self, arrival: Option<u64>, detail: String) {
        self.observe(arrival, -1.0, || detail);
    }

    fn finish(self) -> CheckReport {
        self.report
    }
}

fn rel(lhs_minus_rhs: f64, scale: f64) -> f64 {
    let scale = scale.abs();
    if scale > 0.0 {
        lhs_minus_rhs / scale
    } else {
        lhs_minus_rhs
    }
}

/// Pass/fail check for a structural condition.
pub fn check_condition(name: &str, ok: bool, detail: impl FnOnce() -> String) -> CheckReport {
    let mut t = Tally::new(name);
    t.observe(None, if ok { 0.0 } else { -1.0 }, || if ok { "ok".into() } else { detail() });
    t.finish()
}

/// `w_e <= (1 + eps)(phi_u + phi_v)` for every edge of the replayed stream.
pub fn check_dual_feasible(cert: &DualCertificate, edges: &[EdgeRecord]) -> CheckReport {
    check_dual_feasible_with(cert, edges.iter().enumerate().map(|(i, e)| (i as u64, *e)), cert.epsilon, "dual_feasibility")
}

/// Dual feasibility with an explicit epsilon, over `(arrival, edge)` pairs.
pub fn check_dual_feasible_with(
    cert: &DualCertificate,
    edges: impl IntoIterator<Item = (u64, EdgeRecord)>,
    epsilon: f64,
    name: &str,
) -> CheckReport {
    let mut t = Tally::new(name);
    for (arrival, e) in edges {
        let cover = (1.0 + epsilon) * (cert.phi_of(e.u) + cert.phi_of(e.v));
        t.observe(Some(arrival), rel(cover - e.w, e.w), || {
            format!("edge {}-{} weight {} exceeds cover {}", e.u, e.v, e.w, cover)
        });
    }
    t.finish()
}

/// `bound >= value` for a named quantity (matching weights, oracle optimum).
pub fn check_bound_covers(name: &str, bound: f64, value: f64) -> CheckReport {
    let mut t = Tally::new(name);
    t.observe(None, rel(bound - value, value.max(1.0)), || {
        format!("bound {bound} below {value}")
    });
    t.finish()
}

/// For each pushed `e = {u, v}`: `w_e >= w'_e + sum of w'` over earlier
/// pushed edges sharing an endpoint with `e` (parallel edges counted once).
pub fn check_push_lemma(trace: &[TraceEvent]) -> CheckReport {
    let mut t = Tally::new("push_lemma");
    let mut per_vertex: HashMap<VertexId, f64> = HashMap::new();
    let mut per_pair: HashMap<(VertexId, VertexId), f64> = HashMap::new();
    for ev in trace {
        let TraceDecision::Pushed { leftover, .. } = ev.decision else {
            continue;
        };
        let e = ev.edge;
        let su = per_vertex.get(&e.u).copied().unwrap_or(0.0);
        let sv = per_vertex.get(&e.v).copied().unwrap_or(0.0);
        let both = per_pair.get(&e.ordered()).copied().unwrap_or(0.0);
        let preceding = su + sv - both + leftover;
        t.observe(Some(ev.arrival), rel(e.w - preceding, e.w), || {
            format!("weight {} below preceding leftover sum {}", e.w, preceding)
        });
        *per_vertex.entry(e.u).or_default() += leftover;
        *per_vertex.entry(e.v).or_default() += leftover;
        *per_pair.entry(e.ordered()).or_default() += leftover;
    }
    t.finish()
}

/// How leftovers relate to the potentials recorded before each push.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeftoverRule {
    /// `w' = w - phi_u - phi_v` and recorded potentials are exact sums.
    Exact,
    /// `w'` is `w - phi_u - phi_v` rounded down to a power of `1 + eps`, and
    /// recorded potentials may overstate the exact sums.
    RoundedDown,
}

/// Replays the trace: recorded potentials against running leftover sums,
/// each leftover against its weight, and finally `sum 2w' = sum phi` together
/// with per-vertex agreement against `exact_phi`.
pub fn check_trace_identity(
    trace: &[TraceEvent],
    exact_phi: &[f64],
    epsilon: f64,
    rule: LeftoverRule,
) -> CheckReport {
    let mut t = Tally::new("trace_identity");
    let mut sums: Vec<f64> = vec![0.0; exact_phi.len()];
    let mut pushes = 0u64;
    let mut doubled = 0.0;
    let at = |sums: &mut Vec<f64>, v: VertexId| -> f64 {
        if v.index() >= sums.len() {
            sums.resize(v.index() + 1, 0.0);
        }
        sums[v.index()]
    };
    for ev in trace {
        let TraceDecision::Pushed {
            leftover,
            phi_u_before,
            phi_v_before,
        } = ev.decision
        else {
            continue;
        };
        let e = ev.edge;
        let ru = at(&mut sums, e.u);
        let rv = at(&mut sums, e.v);
        for (recorded, replayed, x) in [(phi_u_before, ru, e.u), (phi_v_before, rv, e.v)] {
            let scale = replayed.max(1.0);
            let slack = match rule {
                LeftoverRule::Exact => -(recorded - replayed).abs() / scale,
                LeftoverRule::RoundedDown => (recorded - replayed) / scale,
            };
            t.observe(Some(ev.arrival), slack, || {
                format!("vertex {x}: recorded phi {recorded}, replayed {replayed}")
            });
        }
        let raw = e.w - phi_u_before - phi_v_before;
        let slack = match rule {
            LeftoverRule::Exact => -(leftover - raw).abs() / e.w,
            LeftoverRule::RoundedDown => {
                let upper = (raw - leftover) / e.w;
                let lower = (leftover * (1.0 + epsilon) - raw) / e.w;
                upper.min(lower)
            }
        };
        t.observe(Some(ev.arrival), slack, || {
            format!("leftover {leftover} inconsistent with w - phi = {raw}")
        });
        sums[e.u.index()] += leftover;
        sums[e.v.index()] += leftover;
        doubled += 2.0 * leftover;
        pushes += 1;
    }
    let phi_sum: f64 = exact_phi.iter().sum();
    let tol_scale = (pushes.max(1) as f64) * phi_sum.max(1.0);
    t.observe(None, -(doubled - phi_sum).abs() / tol_scale, || {
        format!("sum of doubled leftovers {doubled} vs potential sum {phi_sum}")
    });
    sums.resize(sums.len().max(exact_phi.len()), 0.0);
    for (v, (&s, &p)) in sums.iter().zip(exact_phi.iter().chain(std::iter::repeat(&0.0))).enumerate() {
        t.observe(None, -(s - p).abs() / p.max(1.0), || {
            format!("vertex {v}: replayed {s}, final phi {p}")
        });
    }
    t.finish()
}

/// Every push multiplies both endpoint potentials by at least `1 + growth`
/// (or lifts them from zero), and leaves a positive leftover of at least
/// `growth * (phi_u + phi_v)`.
pub fn check_exponential_growth(trace: &[TraceEvent], growth: f64) -> CheckReport {
    let mut t = Tally::new("exponential_growth");
    for ev in trace {
        let TraceDecision::Pushed {
            leftover,
            phi_u_before,
            phi_v_before,
        } = ev.decision
        else {
            continue;
        };
        if leftover.is_nan() || leftover <= 0.0 {
            t.fail(Some(ev.arrival), format!("non-positive leftover {leftover}"));
            continue;
        }
        let need = growth * (phi_u_before + phi_v_before);
        t.observe(Some(ev.arrival), rel(leftover - need, leftover.max(need)), || {
            format!("leftover {leftover} below {need}")
        });
        for before in [phi_u_before, phi_v_before] {
            if before > 0.0 {
                let after = before + leftover;
                t.observe(Some(ev.arrival), rel(after - (1.0 + growth) * before, after), || {
                    format!("potential {before} grew only to {after}")
                });
            }
        }
    }
    t.finish()
}

fn pushed_leftovers(trace: &[TraceEvent]) -> HashMap<u64, f64> {
    trace
        .iter()
        .filter_map(|ev| match ev.decision {
            TraceDecision::Pushed { leftover, .. } => Some((ev.arrival, leftover)),
            _ => None,
        })
        .collect()
}

/// Every eviction satisfies `w'_evictor >= w'_victim / eps`.
pub fn check_eviction_ratio(trace: &[TraceEvent], epsilon: f64) -> CheckReport {
    let mut t = Tally::new("eviction_ratio");
    let leftovers = pushed_leftovers(trace);
    for ev in trace {
        let TraceDecision::Evicted { victim, evictor } = ev.decision else {
            continue;
        };
        match (leftovers.get(&victim), leftovers.get(&evictor)) {
            (Some(&lv), Some(&le)) => {
                let need = lv / epsilon;
                t.observe(Some(evictor), rel(le - need, need), || {
                    format!("evictor {evictor} leftover {le} below {need} (victim {victim} leftover {lv})")
                });
            }
            _ => t.fail(
                Some(evictor),
                format!("eviction {victim} by {evictor} names an edge that was never pushed"),
            ),
        }
    }
    t.finish()
}

/// Eviction chains resolved to the edges that discarded them.
///
/// An evicted edge is discarded by the never-evicted edge at the end of its
/// eviction chain.
#[derive(Clone, Debug, Default)]
pub struct DiscardForest {
    leftover: HashMap<u64, f64>,
    /// Pushed edges in arrival order.
    pushed: Vec<u64>,
    evictor_of: HashMap<u64, u64>,
    victims_of: HashMap<u64, Vec<u64>>,
    /// Kept edge -> its discarded set, members in ascending arrival order.
    pub discarded_by: BTreeMap<u64, Vec<u64>>,
}

impl DiscardForest {
    pub fn from_trace(trace: &[TraceEvent]) -> Result<Self> {
        let mut f = DiscardForest::default();
        for ev in trace {
            match ev.decision {
                TraceDecision::Pushed { leftover, .. } => {
                    if f.leftover.insert(ev.arrival, leftover).is_some() {
                        return Err(Error::TraceMismatch(format!(
                            "edge {} pushed twice",
                            ev.arrival
                        )));
                    }
                    f.pushed.push(ev.arrival);
                }
                TraceDecision::Evicted { victim, evictor } => {
                    if !f.leftover.contains_key(&victim) || !f.leftover.contains_key(&evictor) {
                        return Err(Error::TraceMismatch(format!(
                            "eviction of {victim} by {evictor} precedes their pushes"
                        )));
                    }
                    if victim >= evictor {
                        return Err(Error::TraceMismatch(format!(
                            "edge {victim} evicted by later-or-equal edge {evictor}"
                        )));
                    }
                    if f.evictor_of.insert(victim, evictor).is_some() {
                        return Err(Error::TraceMismatch(format!("edge {victim} evicted twice")));
                    }
                    f.victims_of.entry(evictor).or_default().push(victim);
                }
                TraceDecision::Skipped => {}
            }
        }
        let mut terminal: HashMap<u64, u64> = HashMap::new();
        // Evictors arrive after their victims, so walking arrivals downwards
        // resolves every evictor's terminal before its victims need it.
        for &e in f.pushed.iter().rev() {
            let end = match f.evictor_of.get(&e) {
                Some(by) => terminal[by],
                None => e,
            };
            terminal.insert(e, end);
            if end != e {
                f.discarded_by.entry(end).or_default().push(e);
            }
        }
        for members in f.discarded_by.values_mut() {
            members.sort_unstable();
        }
        Ok(f)
    }

    pub fn is_kept(&self, arrival: u64) -> bool {
        self.leftover.contains_key(&arrival) && !self.evictor_of.contains_key(&arrival)
    }

    pub fn leftover(&self, arrival: u64) -> Option<f64> {
        self.leftover.get(&arrival).copied()
    }

    /// Sum of leftovers over everything the edge transitively evicted.
    fn subtree_sums(&self) -> HashMap<u64, f64> {
        let mut sums: HashMap<u64, f64> = HashMap::with_capacity(self.pushed.len());
        for &e in &self.pushed {
            let s = self.victims_of.get(&e).map_or(0.0, |vs| {
                vs.iter().map(|c| self.leftover[c] + sums[c]).sum()
            });
            sums.insert(e, s);
        }
        sums
    }
}

/// `sum over D(e) of w' <= 4 eps w'_e` for every pushed edge that evicted
/// something (kept edges use their full discarded set).
pub fn check_discard_sums(forest: &DiscardForest, epsilon: f64) -> CheckReport {
    let mut t = Tally::new("discard_sums");
    let sums = forest.subtree_sums();
    for &e in &forest.pushed {
        let discarded = sums[&e];
        if discarded == 0.0 && !forest.victims_of.contains_key(&e) {
            continue;
        }
        let budget = 4.0 * epsilon * forest.leftover[&e];
        t.observe(Some(e), rel(budget - discarded, budget), || {
            format!("discarded leftover {discarded} exceeds 4*eps*w' = {budget}")
        });
    }
    // The flattened sets must carry exactly the subtree mass.
    for (&kept, members) in &forest.discarded_by {
        let flat: f64 = members.iter().map(|m| forest.leftover[m]).sum();
        let tree = sums[&kept];
        if (flat - tree).abs() > TAU * tree.max(1.0) {
            t.fail(Some(kept), format!("discard set sums to {flat}, chain walk gives {tree}"));
        }
    }
    t.finish()
}

/// `2 (1 + 4 eps') w(M) >= sum phi`, with `eps' = eps` when edges may have
/// been evicted and `0` otherwise.
pub fn check_composition(matching_weight: f64, phi_sum: f64, discard_eps: f64) -> CheckReport {
    let mut t = Tally::new("composition");
    let lhs = 2.0 * (1.0 + 4.0 * discard_eps) * matching_weight;
    t.observe(None, rel(lhs - phi_sum, phi_sum.max(1.0)), || {
        format!("2(1+4eps) w(M) = {lhs} below potential sum {phi_sum}")
    });
    t.finish()
}

/// Decoded compact potentials never understate the exact ones and overstate
/// them by at most the tracked small-mass bound.
pub fn check_compact_shadow(decoded: &[f64], exact: &[f64], bounds: &[f64]) -> CheckReport {
    let mut t = Tally::new("compact_shadow");
    for (v, ((&d, &x), &b)) in decoded.iter().zip(exact).zip(bounds).enumerate() {
        let scale = x.max(1.0);
        let over = d - x;
        let slack = ((over + TAU * scale) / scale).min((b - over) / scale);
        t.observe(None, slack, || {
            format!("vertex {v}: decoded {d}, exact {x}, tracked bound {b}")
        });
    }
    t.finish()
}

/// All checks of one verification pass.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub checks: Vec<CheckReport>,
}

impl VerificationReport {
    pub fn new(checks: Vec<CheckReport>) -> Self {
        VerificationReport {
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn get(&self, name: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.check == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckReport> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::TraceDecision::*;

    fn pushed(arrival: u64, e: EdgeRecord, leftover: f64, pu: f64, pv: f64) -> TraceEvent {
        TraceEvent {
            seq: 0,
            arrival,
            edge: e,
            decision: Pushed {
                leftover,
                phi_u_before: pu,
                phi_v_before: pv,
            },
        }
    }

    fn evicted(victim: u64, evictor: u64) -> TraceEvent {
        TraceEvent {
            seq: 0,
            arrival: victim,
            edge: EdgeRecord::new(0, 1, 1.0),
            decision: Evicted { victim, evictor },
        }
    }

    #[test]
    fn single_edge_feasible() {
        let cert = DualCertificate::new(vec![5.0, 5.0], 0.0);
        let r = check_dual_feasible(&cert, &[EdgeRecord::new(0, 1, 5.0)]);
        assert!(r.passed);
        assert_eq!(r.checked, 1);
        assert!((r.worst_slack.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn skipped_edge_feasible() {
        let cert = DualCertificate::new(vec![5.0, 5.0, 0.0], 0.5);
        let r = check_dual_feasible(&cert, &[EdgeRecord::new(0, 1, 5.0), EdgeRecord::new(0, 2, 5.0)]);
        assert!(r.passed);
    }

    #[test]
    fn infeasible_edge_reported() {
        let cert = DualCertificate::new(vec![1.0, 1.0], 0.0);
        let r = check_dual_feasible(&cert, &[EdgeRecord::new(0, 1, 1.0), EdgeRecord::new(0, 1, 3.0)]);
        assert!(!r.passed);
        assert_eq!(r.violations, 1);
        assert_eq!(r.offending[0].arrival, Some(1));
        assert!((r.worst_slack.unwrap() + 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn upper_bounds() {
        assert_eq!(DualCertificate::new(vec![0.0; 4], 0.5).upper_bound(), 0.0);
        let cert = DualCertificate::new(vec![1.0, 2.0, 1.0], 0.0);
        assert_eq!(upper_bound(&cert), 4.0);
        assert!(check_bound_covers("opt", cert.upper_bound(), 2.0).passed);
        assert!(!check_bound_covers("opt", 1.0, 2.0).passed);
    }

    #[test]
    fn push_lemma_path_equality() {
        let trace = vec![
            pushed(0, EdgeRecord::new(0, 1, 1.0), 1.0, 0.0, 0.0),
            pushed(1, EdgeRecord::new(1, 2, 2.0), 1.0, 1.0, 0.0),
        ];
        let r = check_push_lemma(&trace);
        assert!(r.passed);
        assert_eq!(r.checked, 2);
        assert_eq!(r.worst_slack, Some(0.0));
    }

    #[test]
    fn push_lemma_catches_inflated_leftover() {
        let trace = vec![
            pushed(0, EdgeRecord::new(0, 1, 1.0), 1.0, 0.0, 0.0),
            pushed(1, EdgeRecord::new(1, 2, 2.0), 1.5, 1.0, 0.0),
        ];
        assert!(!check_push_lemma(&trace).passed);
    }

    #[test]
    fn push_lemma_parallel_edges_counted_once() {
        let trace = vec![
            pushed(0, EdgeRecord::new(0, 1, 1.0), 1.0, 0.0, 0.0),
            pushed(1, EdgeRecord::new(1, 0, 3.0), 1.0, 1.0, 1.0),
        ];
        let r = check_push_lemma(&trace);
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn trace_identity_detects_tampering() {
        let mut trace = vec![
            pushed(0, EdgeRecord::new(0, 1, 1.0), 1.0, 0.0, 0.0),
            pushed(1, EdgeRecord::new(1, 2, 2.0), 1.0, 1.0, 0.0),
        ];
        let phi = [1.0, 2.0, 1.0];
        assert!(check_trace_identity(&trace, &phi, 0.0, LeftoverRule::Exact).passed);
        if let Pushed { phi_u_before, .. } = &mut trace[1].decision {
            *phi_u_before += 1.0;
        }
        assert!(!check_trace_identity(&trace, &phi, 0.0, LeftoverRule::Exact).passed);
    }

    #[test]
    fn eviction_ratio_cases() {
        assert!(check_eviction_ratio(&[], 0.25).passed);
        let trace = vec![
            pushed(0, EdgeRecord::new(0, 1, 1.0), 1.0, 0.0, 0.0),
            pushed(5, EdgeRecord::new(0, 2, 10.0), 4.0, 6.0, 0.0),
            evicted(0, 5),
        ];
        assert!(check_eviction_ratio(&trace, 0.25).passed);
        let bad = vec![
            pushed(0, EdgeRecord::new(0, 1, 1.0), 1.0, 0.0, 0.0),
            pushed(5, EdgeRecord::new(0, 2, 10.0), 3.0, 6.0, 0.0),
            evicted(0, 5),
        ];
        assert!(!check_eviction_ratio(&bad, 0.25).passed);
    }

    #[test]
    fn forest_resolves_chains() {
        // 0 evicted by 2, 2 evicted by 7, 1 evicted by 7; 7 is kept
        let e = EdgeRecord::new(0, 1, 100.0);
        let trace = vec![
            pushed(0, e, 0.01, 0.0, 0.0),
            pushed(1, e, 0.02, 0.0, 0.0),
            pushed(2, e, 0.1, 0.0, 0.0),
            evicted(0, 2),
            pushed(7, e, 1.0, 0.0, 0.0),
            evicted(2, 7),
            evicted(1, 7),
        ];
        let f = DiscardForest::from_trace(&trace).unwrap();
        assert_eq!(f.discarded_by.get(&7), Some(&vec![0, 1, 2]));
        assert!(f.is_kept(7));
        assert!(!f.is_kept(2));
        // 0.13 <= 4 * 0.25 * 1.0, and for edge 2: 0.01 <= 0.1
        let r = check_discard_sums(&f, 0.25);
        assert!(r.passed, "{r:?}");
        assert_eq!(r.checked, 2);
        assert!(!check_discard_sums(&f, 0.02).passed);
    }

    #[test]
    fn forest_rejects_malformed_traces() {
        let e = EdgeRecord::new(0, 1, 1.0);
        assert!(DiscardForest::from_trace(&[evicted(0, 1)]).is_err());
        let twice = vec![
            pushed(0, e, 1.0, 0.0, 0.0),
            pushed(1, e, 1.0, 0.0, 0.0),
            pushed(2, e, 1.0, 0.0, 0.0),
            evicted(0, 1),
            evicted(0, 2),
        ];
        assert!(DiscardForest::from_trace(&twice).is_err());
    }

    #[test]
    fn empty_discard_sets_vacuous() {
        let f = DiscardForest::from_trace(&[]).unwrap();
        let r = check_discard_sums(&f, 0.25);
        assert!(r.passed);
        assert_eq!(r.checked, 0);
        assert_eq!(r.worst_slack, None);
    }

    #[test]
    fn composition_and_shadow() {
        assert!(check_composition(2.0, 4.0, 0.0).passed);
        assert!(!check_composition(1.9, 4.0, 0.0).passed);
        assert!(check_composition(1.9, 4.0, 0.25).passed);
        assert!(check_compact_shadow(&[1.0, 2.5], &[1.0, 2.0], &[0.0, 0.5]).passed);
        assert!(!check_compact_shadow(&[1.0, 2.6], &[1.0, 2.0], &[0.0, 0.5]).passed);
        assert!(!check_compact_shadow(&[0.9], &[1.0], &[0.5]).passed);
    }

    #[test]
    fn report_serializes() {
        let r = VerificationReport::new(vec![check_composition(2.0, 4.0, 0.0)]);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.contains("\"check\":\"composition\""));
        assert!(r.passed);
    }
}
