//! Outside-in audit of the switching strategy's invariants.
//!
//! [`SpanningMonitor`] wraps a [`SpanningBuilder`], mirrors the engine's
//! graph in a shadow copy, and re-checks after every single round:
//!
//! - the good set maps onto built edges (full scan, no incrementalism);
//! - the bijection only changes at a switch, swapping exactly the switched
//!   pair, at most once per vertex within a phase;
//! - the good set only grows, and each vertex is switched in at most once;
//! - for every still-bad vertex, its embedded good neighborhood only grows
//!   within a phase;
//! - per phase, any candidate whose neighbor images were all offered before
//!   its own image was offered `degree_cap` more times must have seen its
//!   row's bad vertex turn good by phase end (audited from the offer log).
//!
//! Violations are collected, not panicked on, so a run can be inspected
//! after the fact.

use crate::adaptive::SpanningBuilder;
use crate::graph::Graph;
use crate::process::{Builder, ProcessView};
use crate::verify::is_good_set;
use std::collections::BTreeMap;

/// Candidate bookkeeping captured at the start of a switching phase.
struct PhaseSnapshot {
    label: String,
    /// Per row: the bad vertex.
    bad: Vec<u32>,
    /// Per (row, slot): candidate image and its neighbor images.
    territories: Vec<(usize, u32, Vec<u32>)>,
    /// Offers seen during this phase, in order.
    offers: Vec<u32>,
}

#[derive(Clone, Debug, Default)]
pub struct InvariantReport {
    pub rounds: u64,
    pub switches: usize,
    pub phases_audited: usize,
    pub violations: Vec<String>,
}

impl InvariantReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub struct SpanningMonitor {
    inner: SpanningBuilder,
    shadow: Graph,
    prev_phi: Vec<u32>,
    prev_good: Vec<bool>,
    prev_events: usize,
    prev_label: String,
    /// Per-vertex image changes within the current phase.
    phase_changes: Vec<u32>,
    /// Per-vertex switch-ins over the whole run.
    switched_in: Vec<bool>,
    /// Embedded good neighborhood per still-bad row, for monotonicity.
    bad_nbr_images: BTreeMap<u32, Vec<u32>>,
    snapshot: Option<PhaseSnapshot>,
    report: InvariantReport,
    n: usize,
}

impl SpanningMonitor {
    pub fn new(inner: SpanningBuilder) -> Self {
        let n = inner.target().n();
        let prev_phi = inner.phi().forward().to_vec();
        let prev_good = inner.good_mask().to_vec();
        let prev_label = inner.phase().to_owned();
        Self {
            inner,
            shadow: Graph::empty(n),
            prev_phi,
            prev_good,
            prev_events: 0,
            prev_label,
            phase_changes: vec![0; n],
            switched_in: vec![false; n],
            bad_nbr_images: BTreeMap::new(),
            snapshot: None,
            report: InvariantReport::default(),
            n,
        }
    }

    pub fn inner(&self) -> &SpanningBuilder {
        &self.inner
    }

    /// Finalizes the pending phase audit and returns the findings.
    pub fn into_report(mut self) -> InvariantReport {
        self.audit_phase();
        self.report
    }

    fn violation(&mut self, round: u64, msg: String) {
        self.report.violations.push(format!("round {round}: {msg}"));
    }

    fn capture_phase(&mut self) {
        self.phase_changes.iter_mut().for_each(|c| *c = 0);
        self.bad_nbr_images.clear();
        self.snapshot = None;
        if !self.inner.is_switching() {
            return;
        }
        let h = self.inner.target();
        let state = self.inner.state();
        let phi = self.inner.phi();
        let mut territories = Vec::new();
        for (row, candidates) in state.candidate_rows().iter().enumerate() {
            for &a in candidates {
                let nbr_images: Vec<u32> = h.neighbors(a).iter().map(|&y| phi.image(y)).collect();
                territories.push((row, phi.image(a), nbr_images));
            }
        }
        self.snapshot = Some(PhaseSnapshot {
            label: self.inner.phase().to_owned(),
            bad: state.bad_rows().to_vec(),
            territories,
            offers: Vec::new(),
        });
    }

    /// Offer-log scan: if all of a candidate's neighbor images appeared
    /// before `degree_cap` later offers of the candidate image, the row's
    /// bad vertex must be good by the end of the phase.
    fn audit_phase(&mut self) {
        let Some(snapshot) = self.snapshot.take() else {
            return;
        };
        self.report.phases_audited += 1;
        let d = self.inner.schedule().degree_cap;
        let good = self.inner.good_mask();
        for (row, cand_image, nbr_images) in &snapshot.territories {
            let mut missing: std::collections::HashSet<u32> =
                nbr_images.iter().copied().collect();
            let mut later_offers = 0usize;
            for &w in &snapshot.offers {
                if missing.is_empty() && w == *cand_image {
                    later_offers += 1;
                }
                missing.remove(&w);
            }
            let event_occurred = missing.is_empty() && later_offers >= d;
            let b = snapshot.bad[*row];
            if event_occurred && !good[b as usize] {
                self.report.violations.push(format!(
                    "phase {}: candidate image {cand_image} saw its trigger event but bad vertex {b} stayed bad",
                    snapshot.label
                ));
            }
        }
    }

    fn check_round(&mut self, round: u64, offered: u32, chosen: u32) {
        self.shadow.add_edge(offered, chosen);
        // the offer belongs to the phase that played it: log it before any
        // phase hand-over is processed
        if let Some(snapshot) = self.snapshot.as_mut() {
            snapshot.offers.push(offered);
        }
        let label = self.inner.phase().to_owned();
        if label != self.prev_label {
            self.audit_phase();
            self.capture_phase();
            self.prev_label = label;
        }

        let mut found: Vec<String> = Vec::new();
        let mut switches = 0usize;
        let mut switched_now: Option<u32> = None;
        {
            let h = self.inner.target();
            let phi = self.inner.phi();
            let good = self.inner.good_mask();

            // the good set is genuinely good, in full against the shadow
            if !is_good_set(&self.shadow, phi, good, h) {
                found.push("good set maps to a missing edge".into());
            }

            // good only grows
            for x in 0..self.n {
                if self.prev_good[x] && !good[x] {
                    found.push(format!("vertex {x} left the good set"));
                }
            }

            // image changes happen only via a switch of exactly one pair
            let changed: Vec<u32> = (0..self.n as u32)
                .filter(|&x| phi.image(x) != self.prev_phi[x as usize])
                .collect();
            let new_events = self.inner.events().len();
            match new_events - self.prev_events {
                0 => {
                    if !changed.is_empty() {
                        found.push(format!("images of {changed:?} changed without a switch"));
                    }
                }
                1 => {
                    let ev = self.inner.events().last().expect("event exists");
                    switches = 1;
                    switched_now = Some(ev.bad_vertex);
                    let mut expect =
                        vec![ev.bad_vertex.min(ev.candidate), ev.bad_vertex.max(ev.candidate)];
                    expect.dedup();
                    if changed != expect {
                        found.push(format!("switch of {expect:?} changed images of {changed:?}"));
                    }
                    if self.switched_in[ev.bad_vertex as usize] {
                        found.push(format!("vertex {} switched twice", ev.bad_vertex));
                    }
                    if self.prev_good[ev.bad_vertex as usize] {
                        found.push(format!("switched vertex {} was already good", ev.bad_vertex));
                    }
                    for &x in &changed {
                        self.phase_changes[x as usize] += 1;
                        if self.phase_changes[x as usize] > 1 {
                            found.push(format!("image of {x} changed twice in one phase"));
                        }
                    }
                }
                k => found.push(format!("{k} switches in a single round")),
            }

            // embedded good neighborhoods of still-bad vertices only grow
            if self.inner.is_switching() {
                let state = self.inner.state();
                for &b in state.bad_rows() {
                    if good[b as usize] {
                        self.bad_nbr_images.remove(&b);
                        continue;
                    }
                    let mut current: Vec<u32> = h
                        .neighbors(b)
                        .iter()
                        .filter(|&&y| good[y as usize])
                        .map(|&y| phi.image(y))
                        .collect();
                    current.sort_unstable();
                    if let Some(prev) = self.bad_nbr_images.get(&b) {
                        if !prev.iter().all(|v| current.binary_search(v).is_ok()) {
                            found.push(format!("embedded neighborhood of bad vertex {b} shrank"));
                        }
                    }
                    self.bad_nbr_images.insert(b, current);
                }
            }

            self.prev_phi.copy_from_slice(phi.forward());
            self.prev_good.copy_from_slice(good);
            self.prev_events = new_events;
        }
        if let Some(b) = switched_now {
            self.switched_in[b as usize] = true;
        }
        self.report.switches += switches;
        for msg in found {
            self.violation(round, msg);
        }
        self.report.rounds = round;
    }
}

impl Builder for SpanningMonitor {
    fn on_offer(&mut self, offered: u32, view: &ProcessView<'_>) -> u32 {
        let chosen = self.inner.on_offer(offered, view);
        self.check_round(view.round, offered, chosen);
        chosen
    }

    fn is_done(&self, view: &ProcessView<'_>) -> bool {
        self.inner.is_done(view)
    }

    fn phase(&self) -> &str {
        self.inner.phase()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adaptive::{spanning_strategy, PhaseSchedule};
    use crate::graph::{generate, TargetKind, TargetSpec};
    use crate::process::{run, RunOptions};
    use crate::rng::derive_seed;

    #[test]
    fn clean_runs_produce_clean_reports() {
        let n = 120;
        for trial in 0..10u64 {
            let h = generate(
                &TargetSpec { kind: TargetKind::RandomRegular { delta: 4 }, n },
                derive_seed(21, trial),
            )
            .unwrap();
            let mut schedule = PhaseSchedule::defaults(n, 4, 4);
            schedule.ell0 = 6 * n as u64; // keep a few bad vertices around
            let builder = spanning_strategy(h, schedule);
            let mut monitor = SpanningMonitor::new(builder);
            let out = run(&mut monitor, n, 80 * n as u64, derive_seed(22, trial), &RunOptions::default())
                .unwrap();
            let switched = !monitor.inner().events().is_empty();
            let report = monitor.into_report();
            assert!(report.ok(), "violations: {:?}", report.violations);
            if out.success && switched {
                assert!(report.switches > 0);
            }
        }
    }

    #[test]
    fn shadow_graph_catches_tampering() {
        // sanity for the audit itself: a deliberately broken "good set"
        // claim must trip the checker. Feed a wrong mask through the
        // public checker to confirm the scan notices missing edges.
        let h = generate(&TargetSpec { kind: TargetKind::Cycle, n: 5 }, 0).unwrap();
        let g = Graph::empty(5);
        let phi = crate::graph::Bijection::identity(5);
        assert!(!is_good_set(&g, &phi, &vec![true; 5], &h));
    }
}
