//! Spanning-graph builders: the two-stage strategy (out-neighbor filling,
//! then phased role switching) and the single-stage variant for targets
//! whose degree is large compared to `log n`.

use crate::adaptive::embedding::{
    claim_candidate_count, extract_good_set, fallback_choice, initial_step, EmbeddingState,
    SetupReport, SwitchEvent,
};
use crate::adaptive::schedule::PhaseSchedule;
use crate::graph::{Bijection, Graph};
use crate::orient::{balanced_orientation, Orientation};
use crate::process::{Builder, ProcessView};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    Filling,
    Switching,
    Done,
    Failed,
    Exhausted,
}

/// Builder for an arbitrary bounded-degree spanning target.
///
/// Stage one fixes the identity embedding and fills out-neighborhoods along
/// a balanced orientation. Stage two extracts the good set and repairs the
/// bad vertices with switching phases of shrinking budget, re-selecting
/// candidates between phases.
pub struct SpanningBuilder {
    h: Graph,
    orientation: Orientation,
    schedule: PhaseSchedule,
    state: EmbeddingState,
    counts: Vec<u64>,
    phase: Phase,
    label: String,
    rounds_in_phase: u64,
    phase_budget: u64,
    iteration: usize,
    failure: Option<String>,
    setup_reports: Vec<SetupReport>,
}

/// Two-stage builder over the balanced orientation of `h`.
pub fn spanning_strategy(h: Graph, schedule: PhaseSchedule) -> SpanningBuilder {
    let n = h.n();
    let (orientation, _sinks) = balanced_orientation(&h);
    let mut state = EmbeddingState::new(Bijection::identity(n), &[]);
    let phase = if h.edge_count() == 0 {
        state.mark_all_good();
        Phase::Done
    } else {
        Phase::Filling
    };
    SpanningBuilder {
        h,
        orientation,
        schedule,
        state,
        counts: vec![0; n],
        label: match phase {
            Phase::Done => "done".into(),
            _ => "fill".into(),
        },
        phase,
        rounds_in_phase: 0,
        phase_budget: 0,
        iteration: 0,
        failure: None,
        setup_reports: Vec::new(),
    }
}

impl SpanningBuilder {
    pub fn target(&self) -> &Graph {
        &self.h
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    pub fn schedule(&self) -> &PhaseSchedule {
        &self.schedule
    }

    pub fn phi(&self) -> &Bijection {
        self.state.phi()
    }

    pub fn good_mask(&self) -> &[bool] {
        self.state.good_mask()
    }

    pub fn state(&self) -> &EmbeddingState {
        &self.state
    }

    pub fn events(&self) -> &[SwitchEvent] {
        self.state.events()
    }

    pub fn failure(&self) -> Option<&str> {
        self.failure.as_deref()
    }

    pub fn setup_reports(&self) -> &[SetupReport] {
        &self.setup_reports
    }

    pub fn is_switching(&self) -> bool {
        self.phase == Phase::Switching
    }

    fn enter_done(&mut self) {
        self.phase = Phase::Done;
        self.label = "done".into();
    }

    fn enter_switch_phase(&mut self, iteration: usize) {
        let delta = self.schedule.delta.max(1);
        let m = claim_candidate_count(self.h.n(), delta, self.state.bad_count());
        match self.state.setup_switching(&self.h, self.schedule.degeneracy, m) {
            Ok(report) => {
                self.phase_budget = if iteration == 0 {
                    self.schedule.ell1
                } else {
                    self.schedule.phase2_rounds(self.h.n(), report.m)
                };
                self.setup_reports.push(report);
                self.iteration = iteration;
                self.rounds_in_phase = 0;
                self.phase = Phase::Switching;
                self.label = format!("switch:{iteration}");
            }
            Err(err) => {
                self.failure = Some(err.to_string());
                self.phase = Phase::Failed;
                self.label = "failed".into();
            }
        }
    }

    fn after_round(&mut self) {
        match self.phase {
            Phase::Filling if self.rounds_in_phase >= self.schedule.ell0 => {
                let (good, _bad) = extract_good_set(
                    &self.h,
                    &self.orientation,
                    self.state.phi(),
                    &self.counts,
                    self.schedule.fill_threshold(),
                );
                self.state = EmbeddingState::new(self.state.phi().clone(), &good);
                if self.state.all_good() {
                    self.enter_done();
                } else {
                    self.enter_switch_phase(0);
                }
            }
            Phase::Switching => {
                if self.state.all_good() {
                    self.enter_done();
                } else if self.rounds_in_phase >= self.phase_budget {
                    let next = self.iteration + 1;
                    if next > self.schedule.max_phase2_iterations {
                        self.failure = Some(format!(
                            "bad vertices remain after {} switching phases",
                            self.iteration + 1
                        ));
                        self.phase = Phase::Exhausted;
                        self.label = "exhausted".into();
                    } else {
                        self.enter_switch_phase(next);
                    }
                }
            }
            _ => {}
        }
    }
}

impl Builder for SpanningBuilder {
    fn on_offer(&mut self, offered: u32, view: &ProcessView<'_>) -> u32 {
        let g = view.graph;
        let chosen = match self.phase {
            Phase::Filling => {
                self.counts[offered as usize] += 1;
                initial_step(&self.orientation, self.state.phi(), offered, g)
            }
            Phase::Switching => self.state.switching_step(&self.h, offered, view.round, g),
            _ => fallback_choice(offered, g),
        };
        self.rounds_in_phase += 1;
        self.after_round();
        chosen
    }

    fn is_done(&self, _view: &ProcessView<'_>) -> bool {
        self.phase == Phase::Done
    }

    fn phase(&self) -> &str {
        &self.label
    }
}

/// Single-stage builder: out-neighbor filling alone, done once every
/// vertex has been offered as often as its out-degree demand.
pub struct HighDeltaBuilder {
    orientation: Orientation,
    phi: Bijection,
    counts: Vec<u64>,
    demand: Vec<u64>,
    unmet: usize,
    budget: u64,
}

/// Filling-only builder with budget `(1 + epsilon) * delta * n / 2`.
pub fn high_delta_strategy(h: &Graph, epsilon: f64) -> HighDeltaBuilder {
    assert!(epsilon > 0.0 && epsilon < 1.0, "epsilon must be in (0, 1)");
    let n = h.n();
    let (orientation, _) = balanced_orientation(h);
    let phi = Bijection::identity(n);
    // demand per process vertex: with the identity map, vertex v serves
    // role v
    let demand: Vec<u64> = (0..n as u32).map(|v| orientation.out_degree(v) as u64).collect();
    let unmet = demand.iter().filter(|&&d| d > 0).count();
    let budget = ((1.0 + epsilon) * h.max_degree() as f64 * n as f64 / 2.0).ceil() as u64;
    HighDeltaBuilder {
        orientation,
        phi,
        counts: vec![0; n],
        demand,
        unmet,
        budget,
    }
}

impl HighDeltaBuilder {
    /// Budget the strategy was sized for.
    pub fn recommended_budget(&self) -> u64 {
        self.budget
    }

    pub fn phi(&self) -> &Bijection {
        &self.phi
    }
}

impl Builder for HighDeltaBuilder {
    fn on_offer(&mut self, offered: u32, view: &ProcessView<'_>) -> u32 {
        let c = &mut self.counts[offered as usize];
        *c += 1;
        if *c == self.demand[offered as usize] {
            self.unmet -= 1;
        }
        initial_step(&self.orientation, &self.phi, offered, view.graph)
    }

    fn is_done(&self, _view: &ProcessView<'_>) -> bool {
        self.unmet == 0
    }

    fn phase(&self) -> &str {
        "fill"
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, TargetKind, TargetSpec};
    use crate::process::{run, RunOptions};
    use crate::rng::derive_seed;
    use crate::verify::is_embedding;

    #[test]
    fn edgeless_target_is_done_immediately() {
        let h = Graph::empty(10);
        let schedule = PhaseSchedule::defaults(10, 0, 1);
        let mut b = spanning_strategy(h, schedule);
        let out = run(&mut b, 10, 100, 1, &RunOptions::default()).unwrap();
        assert!(out.success);
        assert_eq!(out.rounds_used, 0);
    }

    #[test]
    fn perfect_matching_embeds_within_ten_n() {
        // workbench calibration: 100 seeded runs on a 200-vertex matching
        let n = 200;
        let mut ok = 0;
        for trial in 0..100u64 {
            let h = generate(&TargetSpec { kind: TargetKind::PerfectMatching, n }, 0).unwrap();
            let schedule = PhaseSchedule::defaults(n, 1, 1);
            let mut b = spanning_strategy(h.clone(), schedule);
            let out = run(&mut b, n, 10 * n as u64, derive_seed(0xA11CE, trial), &RunOptions::default()).unwrap();
            if out.success {
                assert!(is_embedding(&out.graph, b.phi(), &h));
                ok += 1;
            }
        }
        assert!(ok >= 95, "only {ok}/100 matching runs succeeded");
    }

    #[test]
    fn forced_switching_still_embeds() {
        // shrink the filling budget so the switching machinery must repair
        // a real bad set
        let n = 300;
        let mut ok = 0;
        let mut any_switch = false;
        for trial in 0..30u64 {
            let h = generate(
                &TargetSpec { kind: TargetKind::RandomRegular { delta: 4 }, n },
                derive_seed(7, trial),
            )
            .unwrap();
            let mut schedule = PhaseSchedule::defaults(n, 4, 4);
            schedule.ell0 = 10 * n as u64; // leaves a few bad vertices
            let mut b = spanning_strategy(h.clone(), schedule);
            let out = run(&mut b, n, 80 * n as u64, derive_seed(8, trial), &RunOptions::default()).unwrap();
            any_switch |= !b.events().is_empty();
            if out.success {
                assert!(is_embedding(&out.graph, b.phi(), &h));
                ok += 1;
            }
        }
        assert!(ok >= 26, "only {ok}/30 forced-switching runs succeeded");
        assert!(any_switch, "no run exercised a switch");
    }

    #[test]
    fn high_delta_budget_formula() {
        let h = generate(
            &TargetSpec { kind: TargetKind::RandomRegular { delta: 10 }, n: 1000 },
            3,
        )
        .unwrap();
        let b = high_delta_strategy(&h, 0.5);
        assert_eq!(b.recommended_budget(), 7500);
    }

    #[test]
    fn high_delta_done_immediately_on_edgeless() {
        let h = Graph::empty(6);
        let mut b = high_delta_strategy(&h, 0.5);
        let out = run(&mut b, 6, 10, 0, &RunOptions::default()).unwrap();
        assert!(out.success);
        assert_eq!(out.rounds_used, 0);
    }

    #[test]
    fn high_delta_succeeds_in_the_dense_regime() {
        // clique blocks of size 61: degree 60 dwarfs log(122), so the
        // filling budget covers every demand with room to spare
        let n = 122;
        let h = generate(&TargetSpec { kind: TargetKind::KrFactor { r: 61 }, n }, 0).unwrap();
        let mut ok = 0;
        for trial in 0..40u64 {
            let mut b = high_delta_strategy(&h, 0.999);
            let budget = b.recommended_budget();
            let out = run(&mut b, n, budget, derive_seed(0xD0, trial), &RunOptions::default()).unwrap();
            if out.success {
                assert!(is_embedding(&out.graph, b.phi(), &h));
                ok += 1;
            }
        }
        assert!(ok >= 36, "only {ok}/40 dense-regime runs succeeded");
    }
}
