//! Offline solver: given the whole offer sequence up front, the least
//! prefix after which the target can be built.
//!
//! A prefix works iff some bijection matches each role's out-degree demand
//! (under the balanced orientation) with a vertex offered at least that
//! often; sorting demands and appearance counts descending and comparing
//! pointwise decides that exactly (swapping any crossed assignment never
//! hurts). Feasibility is monotone in the prefix length, so a binary
//! search finds the minimum.

use crate::graph::Graph;
use crate::orient::balanced_orientation;

/// Least `m` such that the first `m` offers cover the orientation demands
/// of `h` under some bijection, or `None` when even the full sequence
/// falls short.
pub fn offline_min_rounds(h: &Graph, sequence: &[u32]) -> Option<usize> {
    let n = h.n();
    let (orientation, _) = balanced_orientation(h);
    let mut demands: Vec<usize> = orientation.out_degrees();
    demands.sort_unstable_by(|a, b| b.cmp(a));
    while demands.last() == Some(&0) {
        demands.pop();
    }
    if demands.is_empty() {
        return Some(0);
    }

    let feasible = |m: usize| -> bool {
        let mut counts = vec![0usize; n];
        for &v in &sequence[..m] {
            counts[v as usize] += 1;
        }
        counts.sort_unstable_by(|a, b| b.cmp(a));
        demands.iter().zip(&counts).all(|(d, c)| c >= d)
    };

    if !feasible(sequence.len()) {
        return None;
    }
    let (mut lo, mut hi) = (0usize, sequence.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(lo)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, TargetKind, TargetSpec};
    use crate::process::draw_sequence;

    #[test]
    fn edgeless_target_needs_zero_rounds() {
        let h = Graph::empty(5);
        assert_eq!(offline_min_rounds(&h, &[0, 1, 2]), Some(0));
        assert_eq!(offline_min_rounds(&h, &[]), Some(0));
    }

    #[test]
    fn triangle_with_skewed_demands() {
        // the triangle orients to demands {2, 1, 0}: two offers of one
        // vertex are not enough, a second distinct vertex must appear
        let h = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(offline_min_rounds(&h, &[1, 1, 2, 0]), Some(3));
        assert_eq!(offline_min_rounds(&h, &[1, 1, 1, 1]), None);
    }

    #[test]
    fn one_demand_each_is_a_coupon_run() {
        // a perfect matching demands one offer per non-sink role; a
        // permutation of half the vertices... use the exact structure:
        // n/2 demands of 1, so the least prefix holding n/2 distinct
        // vertices wins
        let h = generate(&TargetSpec { kind: TargetKind::PerfectMatching, n: 6 }, 0).unwrap();
        // demands: one per matched pair = 3 ones
        assert_eq!(offline_min_rounds(&h, &[0, 0, 1, 2, 3]), Some(4));
        assert_eq!(offline_min_rounds(&h, &[0, 1, 2, 3]), Some(3));
        assert_eq!(offline_min_rounds(&h, &[5, 5, 5, 5]), None);
    }

    #[test]
    fn full_sequence_exactly_sufficient() {
        // when every vertex is demanded once, a permutation needs all n
        let h = {
            // star pairs: each edge oriented somewhere, demands sum to n/2;
            // build instead the structure whose demands are all-ones:
            // a matching on all n vertices demands n/2 ones, so use the
            // permutation restricted test below on the triangle factor
            generate(&TargetSpec { kind: TargetKind::PerfectMatching, n: 4 }, 0).unwrap()
        };
        // permutation of [4]: demands (1,1); the first two distinct offers
        // settle it
        assert_eq!(offline_min_rounds(&h, &[3, 2, 1, 0]), Some(2));
    }

    #[test]
    fn monotone_in_prefix_length() {
        let h = generate(
            &TargetSpec { kind: TargetKind::RandomRegular { delta: 4 }, n: 20 },
            5,
        )
        .unwrap();
        let seq = draw_sequence(20, 400, 17);
        let m = offline_min_rounds(&h, &seq).expect("long sequence suffices");
        assert!(m <= 400);
        // any longer prefix stays feasible, any shorter prefix is not
        assert_eq!(offline_min_rounds(&h, &seq[..m]), Some(m));
        assert_eq!(offline_min_rounds(&h, &seq[..m - 1]), None);
    }
}
