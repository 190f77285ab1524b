//! Embedding state and single-round decision rules for the adaptive
//! strategies: the out-neighbor filling step over a fixed orientation, the
//! good/bad extraction that follows it, and the role-switching step that
//! repairs the remaining bad vertices by swapping them with scattered
//! candidates.

use crate::graph::{scattered_candidates, Bijection, Graph};
use crate::orient::Orientation;
use thiserror::Error;

/// Ratio rule for the candidate-table width: `ceil(pool / (8 delta^2 bad))`.
pub fn claim_candidate_count(pool: usize, delta: usize, bad: usize) -> usize {
    assert!(bad > 0 && delta > 0);
    pool.div_ceil(8 * delta * delta * bad)
}

/// Lowest-index vertex other than `offered` and not adjacent to it; when
/// `offered` is adjacent to everything, the lowest-index other vertex.
/// This is the edge claimed whenever a strategy has no useful move.
pub fn fallback_choice(offered: u32, g: &Graph) -> u32 {
    let adj = g.neighbors(offered);
    let mut ai = 0usize;
    for v in 0..g.n() as u32 {
        if v == offered {
            continue;
        }
        while ai < adj.len() && adj[ai] < v {
            ai += 1;
        }
        if ai < adj.len() && adj[ai] == v {
            continue;
        }
        return v;
    }
    if offered == 0 {
        1
    } else {
        0
    }
}

/// One round of the out-neighbor filling strategy: connect the offered
/// vertex toward the image of some unserved out-neighbor of its role,
/// lowest image first; fall back when none remains.
pub fn initial_step(orientation: &Orientation, phi: &Bijection, offered: u32, g: &Graph) -> u32 {
    let role = phi.preimage(offered);
    let mut best: Option<u32> = None;
    for &y in orientation.out_neighbors(role) {
        let u = phi.image(y);
        if !g.has_edge(offered, u) && best.map_or(true, |b| u < b) {
            best = Some(u);
        }
    }
    best.unwrap_or_else(|| fallback_choice(offered, g))
}

/// Splits the target vertices after a filling stage: a vertex is kept only
/// if its own image was offered at least `threshold` times and every
/// in-neighbor's image was as well. Returns `(good, bad)`, both ascending.
pub fn extract_good_set(
    h: &Graph,
    orientation: &Orientation,
    phi: &Bijection,
    counts: &[u64],
    threshold: u64,
) -> (Vec<u32>, Vec<u32>) {
    let n = h.n();
    let served: Vec<bool> = (0..n as u32)
        .map(|x| counts[phi.image(x) as usize] >= threshold)
        .collect();
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for x in 0..n as u32 {
        let ok = served[x as usize]
            && orientation
                .in_neighbors(x)
                .iter()
                .all(|&y| served[y as usize]);
        if ok {
            good.push(x);
        } else {
            bad.push(x);
        }
    }
    (good, bad)
}

#[derive(Clone, Debug)]
pub struct SwitchEvent {
    pub round: u64,
    pub row: usize,
    pub slot: usize,
    pub bad_vertex: u32,
    pub candidate: u32,
}

#[derive(Clone, Debug)]
pub struct SetupReport {
    pub requested_m: usize,
    pub m: usize,
    pub rows: usize,
    pub halvings: usize,
}

#[derive(Debug, Error)]
pub enum SwitchSetupError {
    #[error("no bad vertices to switch")]
    NoBadVertices,
    #[error("good set too small: |good| = {good} < 4 * {delta} * {bad}")]
    GoodSetTooSmall { good: usize, delta: usize, bad: usize },
    #[error("only {found} scattered candidates available for {rows} bad vertices")]
    NotEnoughCandidates { found: usize, rows: usize },
}

/// Mutable state of the switching strategy: the bijection, the good set,
/// the ordered bad list, and the candidate table with its owner index.
///
/// Invariants, maintained across `setup_switching` / `switching_step`:
/// the map stays a bijection; the good set only grows; candidate closed
/// neighborhoods are pairwise disjoint, avoid bad vertices, and have no
/// target edge into them.
#[derive(Clone, Debug)]
pub struct EmbeddingState {
    phi: Bijection,
    good: Vec<bool>,
    good_count: usize,
    bad: Vec<u32>,
    candidates: Vec<Vec<u32>>,
    /// For each process vertex, the candidate row/slot whose claimed
    /// territory (candidate image plus its neighbor images) contains it.
    owner: Vec<Option<(u32, u32)>>,
    switched: Vec<bool>,
    m: usize,
    events: Vec<SwitchEvent>,
}

impl EmbeddingState {
    pub fn new(phi: Bijection, good_vertices: &[u32]) -> Self {
        let n = phi.n();
        let mut good = vec![false; n];
        for &x in good_vertices {
            good[x as usize] = true;
        }
        let good_count = good_vertices.len();
        Self {
            phi,
            good,
            good_count,
            bad: Vec::new(),
            candidates: Vec::new(),
            owner: vec![None; n],
            switched: Vec::new(),
            m: 0,
            events: Vec::new(),
        }
    }

    pub fn phi(&self) -> &Bijection {
        &self.phi
    }

    pub fn good_mask(&self) -> &[bool] {
        &self.good
    }

    pub fn good_count(&self) -> usize {
        self.good_count
    }

    pub fn all_good(&self) -> bool {
        self.good_count == self.good.len()
    }

    pub fn bad_count(&self) -> usize {
        self.good.len() - self.good_count
    }

    /// Current bad vertices, ascending.
    pub fn bad_vertices(&self) -> Vec<u32> {
        (0..self.good.len() as u32)
            .filter(|&x| !self.good[x as usize])
            .collect()
    }

    /// The ordered bad list fixed by the last `setup_switching`.
    pub fn bad_rows(&self) -> &[u32] {
        &self.bad
    }

    pub fn candidate_rows(&self) -> &[Vec<u32>] {
        &self.candidates
    }

    pub fn owner_of(&self, process_vertex: u32) -> Option<(u32, u32)> {
        self.owner[process_vertex as usize]
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn events(&self) -> &[SwitchEvent] {
        &self.events
    }

    /// Marks every vertex good; used for trivially satisfied targets.
    pub fn mark_all_good(&mut self) {
        self.good.iter_mut().for_each(|g| *g = true);
        self.good_count = self.good.len();
    }

    /// Rebuilds the candidate table for the current partition.
    ///
    /// Candidates are scattered (pairwise distance >= 3 in `h`) vertices of
    /// the good set with degree at most `min(2 * degeneracy_cap, delta)`
    /// and no bad neighbor. When fewer than `bad * m` are available, `m` is
    /// halved down to 1 before giving up.
    pub fn setup_switching(
        &mut self,
        h: &Graph,
        degeneracy_cap: usize,
        m: usize,
    ) -> Result<SetupReport, SwitchSetupError> {
        assert!(m >= 1);
        let bad = self.bad_vertices();
        let rows = bad.len();
        if rows == 0 {
            return Err(SwitchSetupError::NoBadVertices);
        }
        let delta = h.max_degree().max(1);
        if self.good_count < 4 * delta * rows {
            return Err(SwitchSetupError::GoodSetTooSmall {
                good: self.good_count,
                delta,
                bad: rows,
            });
        }
        let deg_cap = (2 * degeneracy_cap).min(delta);
        let eligible: Vec<bool> = (0..h.n() as u32)
            .map(|a| {
                self.good[a as usize]
                    && h.degree(a) <= deg_cap
                    && h.neighbors(a).iter().all(|&y| self.good[y as usize])
            })
            .collect();
        let found = scattered_candidates(h, &eligible, rows * m, deg_cap);

        let mut chosen_m = m;
        let mut halvings = 0;
        while found.len() < rows * chosen_m && chosen_m > 1 {
            chosen_m = (chosen_m / 2).max(1);
            halvings += 1;
            log::warn!(
                "candidate shortfall: {} found for {} rows, halving m to {}",
                found.len(),
                rows,
                chosen_m
            );
        }
        if found.len() < rows * chosen_m {
            return Err(SwitchSetupError::NotEnoughCandidates {
                found: found.len(),
                rows,
            });
        }

        self.bad = bad;
        self.m = chosen_m;
        self.switched = vec![false; rows];
        self.candidates = found[..rows * chosen_m]
            .chunks(chosen_m)
            .map(<[u32]>::to_vec)
            .collect();
        self.owner.iter_mut().for_each(|o| *o = None);
        for (i, row) in self.candidates.iter().enumerate() {
            for (k, &a) in row.iter().enumerate() {
                let slot = Some((i as u32, k as u32));
                let pa = self.phi.image(a);
                debug_assert!(self.owner[pa as usize].is_none(), "owner sets overlap");
                self.owner[pa as usize] = slot;
                for &y in h.neighbors(a) {
                    let py = self.phi.image(y);
                    debug_assert!(self.owner[py as usize].is_none(), "owner sets overlap");
                    self.owner[py as usize] = slot;
                }
            }
        }
        Ok(SetupReport {
            requested_m: m,
            m: chosen_m,
            rows,
            halvings,
        })
    }

    /// One round of the switching strategy.
    ///
    /// When the offered vertex lies in some candidate's territory and that
    /// row's bad vertex is still bad: an offer of a candidate *neighbor*
    /// image is connected to the bad vertex's image; an offer of the
    /// candidate image itself is connected to the lowest unserved image of
    /// the bad vertex's good neighborhood. Afterwards, if the bad image now
    /// covers the candidate's neighbor images and the candidate image
    /// covers the bad vertex's good neighborhood, the two roles are swapped
    /// and the bad vertex becomes good. All other offers claim the fallback
    /// edge and leave the state untouched.
    pub fn switching_step(&mut self, h: &Graph, offered: u32, round: u64, g: &Graph) -> u32 {
        let Some((row, slot)) = self.owner[offered as usize] else {
            return fallback_choice(offered, g);
        };
        let (i, k) = (row as usize, slot as usize);
        let b = self.bad[i];
        if self.good[b as usize] {
            return fallback_choice(offered, g);
        }
        let a = self.candidates[i][k];
        let image_a = self.phi.image(a);
        let image_b = self.phi.image(b);

        // the bad vertex's neighborhood inside the current good set, mapped
        // through the current bijection
        let mut bad_nbr_images: Vec<u32> = h
            .neighbors(b)
            .iter()
            .filter(|&&y| self.good[y as usize])
            .map(|&y| self.phi.image(y))
            .collect();
        bad_nbr_images.sort_unstable();

        let chosen = if offered == image_a {
            bad_nbr_images
                .iter()
                .copied()
                .find(|&u| !g.has_edge(image_a, u))
                .unwrap_or_else(|| fallback_choice(offered, g))
        } else {
            image_b
        };
        debug_assert_ne!(chosen, offered);

        // adjacency including the edge claimed this round
        let adj = |x: u32, y: u32| {
            g.has_edge(x, y) || (x == offered && y == chosen) || (x == chosen && y == offered)
        };
        let bad_covers_candidate_side = h
            .neighbors(a)
            .iter()
            .all(|&y| adj(image_b, self.phi.image(y)));
        let candidate_covers_bad_side = bad_nbr_images.iter().all(|&u| adj(image_a, u));
        if bad_covers_candidate_side && candidate_covers_bad_side {
            self.phi.swap_images(a, b);
            self.good[b as usize] = true;
            self.good_count += 1;
            self.switched[i] = true;
            self.events.push(SwitchEvent {
                round,
                row: i,
                slot: k,
                bad_vertex: b,
                candidate: a,
            });
            debug_assert!(self.phi.is_consistent());
        }
        chosen
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, TargetKind, TargetSpec};
    use crate::orient::{balanced_orientation, Orientation};

    fn perfect_matching(n: usize) -> Graph {
        generate(&TargetSpec { kind: TargetKind::PerfectMatching, n }, 0).unwrap()
    }

    #[test]
    fn candidate_count_rule() {
        assert_eq!(claim_candidate_count(800, 5, 4), 1);
        assert_eq!(claim_candidate_count(99, 1, 1), 13);
        assert_eq!(claim_candidate_count(2000, 2, 1), 63);
    }

    #[test]
    fn fallback_skips_offered_and_adjacent() {
        let mut g = Graph::empty(4);
        assert_eq!(fallback_choice(2, &g), 0);
        g.add_edge(2, 0);
        assert_eq!(fallback_choice(2, &g), 1);
        g.add_edge(2, 1);
        g.add_edge(2, 3);
        // adjacent to everyone: lowest other index
        assert_eq!(fallback_choice(2, &g), 0);
        assert_eq!(fallback_choice(0, &g), 1);
    }

    #[test]
    fn initial_step_follows_cycle_orientation() {
        let arcs: Vec<(u32, u32)> = (0..4).map(|v| (v, (v + 1) % 4)).collect();
        let orientation = Orientation::from_arc_list(4, &arcs);
        let phi = Bijection::identity(4);
        let g = Graph::empty(4);
        assert_eq!(initial_step(&orientation, &phi, 0, &g), 1);
        // once adjacent, the out-image is exhausted and the fallback fires
        let mut g2 = Graph::empty(4);
        g2.add_edge(0, 1);
        assert_eq!(initial_step(&orientation, &phi, 0, &g2), 2);
    }

    #[test]
    fn initial_step_on_sink_falls_back() {
        let h = perfect_matching(4);
        let (orientation, sinks) = balanced_orientation(&h);
        let phi = Bijection::identity(4);
        let g = Graph::empty(4);
        let s = sinks[0];
        let chosen = initial_step(&orientation, &phi, s, &g);
        assert_eq!(chosen, fallback_choice(s, &g));
    }

    #[test]
    fn extract_good_set_corner_cases() {
        let h = perfect_matching(4);
        let (orientation, _) = balanced_orientation(&h);
        let phi = Bijection::identity(4);

        let (good, bad) = extract_good_set(&h, &orientation, &phi, &[5, 5, 5, 5], 1);
        assert_eq!(good, vec![0, 1, 2, 3]);
        assert!(bad.is_empty());

        let (good, bad) = extract_good_set(&h, &orientation, &phi, &[0, 0, 0, 0], 1);
        assert!(good.is_empty());
        assert_eq!(bad.len(), 4);
    }

    #[test]
    fn extract_good_set_oriented_path() {
        // path 0 -> 1 -> 2, images offered (2, 2, 0) times, threshold 1:
        // vertex 2 is unserved; nothing is fed by it, so good = {0, 1}
        let h = generate(&TargetSpec { kind: TargetKind::Path, n: 3 }, 0).unwrap();
        let orientation = Orientation::from_arc_list(3, &[(0, 1), (1, 2)]);
        let phi = Bijection::identity(3);
        let (good, bad) = extract_good_set(&h, &orientation, &phi, &[2, 2, 0], 1);
        assert_eq!(good, vec![0, 1]);
        assert_eq!(bad, vec![2]);

        // if instead vertex 0 is the unserved one, it poisons its out-neighbor
        let (good, bad) = extract_good_set(&h, &orientation, &phi, &[0, 2, 2], 1);
        assert_eq!(good, vec![2]);
        assert_eq!(bad, vec![0, 1]);
    }

    #[test]
    fn setup_rejects_degenerate_partitions() {
        let h = perfect_matching(100);
        let phi = Bijection::identity(100);
        let all: Vec<u32> = (0..100).collect();
        let mut state = EmbeddingState::new(phi.clone(), &all);
        assert!(matches!(
            state.setup_switching(&h, 1, 1),
            Err(SwitchSetupError::NoBadVertices)
        ));

        let mut state = EmbeddingState::new(phi, &all[..4]);
        assert!(matches!(
            state.setup_switching(&h, 1, 1),
            Err(SwitchSetupError::GoodSetTooSmall { .. })
        ));
    }

    #[test]
    fn setup_on_matching_selects_eligible_candidates() {
        // one bad vertex in a 100-vertex perfect matching; the usual rule
        // gives m = 13 candidates whose partners are good
        let h = perfect_matching(100);
        let phi = Bijection::identity(100);
        let good: Vec<u32> = (1..100).collect();
        let mut state = EmbeddingState::new(phi, &good);
        let m = claim_candidate_count(99, 1, 1);
        assert_eq!(m, 13);
        let report = state.setup_switching(&h, 1, m).unwrap();
        assert_eq!(report.m, 13);
        assert_eq!(report.rows, 1);
        assert_eq!(report.halvings, 0);
        let row = &state.candidate_rows()[0];
        assert_eq!(row.len(), 13);
        for &a in row {
            // candidates sit in good pairs, away from the bad vertex 0
            assert!(a >= 2);
            let partner = if a % 2 == 0 { a + 1 } else { a - 1 };
            assert!(good.contains(&partner));
        }
    }

    #[test]
    fn setup_halves_m_on_shortfall() {
        // small matching: ask for far more candidates than exist
        let h = perfect_matching(40);
        let phi = Bijection::identity(40);
        let good: Vec<u32> = (1..40).collect();
        let mut state = EmbeddingState::new(phi, &good);
        let report = state.setup_switching(&h, 1, 64).unwrap();
        assert!(report.halvings > 0);
        assert!(report.m >= 1);
        assert_eq!(state.candidate_rows()[0].len(), report.m);
    }

    #[test]
    fn switch_fires_after_both_sides_covered() {
        // 6-vertex matching {0,1} {2,3} {4,5}; bad vertex 0 (partner 1 good).
        let h = perfect_matching(6);
        let phi = Bijection::identity(6);
        let good: Vec<u32> = (1..6).collect();
        let mut state = EmbeddingState::new(phi, &good);
        state.setup_switching(&h, 1, 1).unwrap();
        let a = state.candidate_rows()[0][0];
        assert_eq!(a, 2); // lowest eligible scattered vertex
        let partner = 3u32;

        let mut g = Graph::empty(6);
        // offer the candidate's partner image: builder connects it to image(0)
        let chosen = state.switching_step(&h, partner, 1, &g);
        assert_eq!(chosen, 0);
        g.add_edge(partner, chosen);
        assert_eq!(state.bad_count(), 1); // candidate image not yet covered

        // offer the candidate image: builder connects toward image(1)
        let chosen = state.switching_step(&h, a, 2, &g);
        assert_eq!(chosen, 1);
        g.add_edge(a, chosen);
        // both cover conditions now hold, so the switch fired
        assert_eq!(state.bad_count(), 0);
        assert_eq!(state.events().len(), 1);
        assert_eq!(state.phi().image(0), 2);
        assert_eq!(state.phi().image(2), 0);
        assert_eq!(state.phi().image(4), 4);
    }

    #[test]
    fn unowned_offer_leaves_state_unchanged() {
        let h = perfect_matching(6);
        let phi = Bijection::identity(6);
        let good: Vec<u32> = (1..6).collect();
        let mut state = EmbeddingState::new(phi, &good);
        state.setup_switching(&h, 1, 1).unwrap();
        let g = Graph::empty(6);
        // vertex 5 is outside every candidate territory (candidate 2, nbr 3)
        assert_eq!(state.owner_of(5), None);
        let before = state.phi().clone();
        let chosen = state.switching_step(&h, 5, 1, &g);
        assert_eq!(chosen, fallback_choice(5, &g));
        assert_eq!(state.phi(), &before);
        assert_eq!(state.bad_count(), 1);
    }

    #[test]
    fn no_switch_when_bad_side_uncovered() {
        // candidate image exhausted its useful move but the bad image still
        // misses a candidate-neighbor edge: no switch happens
        let h = perfect_matching(6);
        let phi = Bijection::identity(6);
        let good: Vec<u32> = (1..6).collect();
        let mut state = EmbeddingState::new(phi, &good);
        state.setup_switching(&h, 1, 1).unwrap();
        let a = state.candidate_rows()[0][0]; // 2, partner 3

        let mut g = Graph::empty(6);
        // candidate image already adjacent to image(1): its useful move is spent
        g.add_edge(a, 1);
        let chosen = state.switching_step(&h, a, 1, &g);
        // bad side (0 ~ 3) still uncovered: fallback edge, no switch
        assert_eq!(chosen, fallback_choice(a, &g));
        assert_eq!(state.bad_count(), 1);
        assert!(state.events().is_empty());
    }
}
