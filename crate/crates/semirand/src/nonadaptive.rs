//! Non-adaptive builders: per-vertex adjacency lists fixed before the
//! process starts. The i-th offer of a vertex connects it to the i-th
//! entry of its list; existing edges are skipped.
//!
//! The block constructions partition the vertices into contiguous blocks
//! of roughly `sqrt(ln n)` vertices. Each list enumerates the own block
//! first (ascending), optionally the next block (for the cycle-chaining
//! variant), then everything else ascending. Lists are evaluated lazily
//! from the block boundaries, so memory stays linear in `n`.

use crate::process::{Builder, ProcessView};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ListError {
    #[error("n = {0} is too small for this construction")]
    TooSmall(usize),
    #[error("r = {r} does not divide n = {n}")]
    NotDivisible { n: usize, r: usize },
    #[error("list of vertex {0} is not a permutation of the other vertices")]
    NotAPermutation(u32),
}

/// Ordered partition of `{0, .., n-1}` into contiguous blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    n: usize,
    /// `k + 1` boundaries; block `i` is `starts[i]..starts[i+1]`.
    starts: Vec<u32>,
}

impl BlockPartition {
    /// `k` blocks of size `floor(n/k)` or `ceil(n/k)`.
    pub fn balanced(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n.max(1));
        let starts = (0..=k).map(|i| (i * n / k) as u32).collect();
        Self { n, starts }
    }

    /// Blocks whose sizes are multiples of `r`, as equal as possible
    /// (unit = one group of `r` consecutive vertices).
    pub fn balanced_divisible(n: usize, k: usize, r: usize) -> Self {
        assert!(r >= 1 && n % r == 0);
        let units = n / r;
        assert!(k >= 1 && k <= units);
        let starts = (0..=k).map(|i| (i * units / k * r) as u32).collect();
        Self { n, starts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn block(&self, i: usize) -> std::ops::Range<u32> {
        self.starts[i]..self.starts[i + 1]
    }

    pub fn size(&self, i: usize) -> usize {
        (self.starts[i + 1] - self.starts[i]) as usize
    }

    pub fn block_of(&self, v: u32) -> usize {
        match self.starts.binary_search(&v) {
            Ok(i) if i == self.k() => i - 1,
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    pub fn blocks(&self) -> impl Iterator<Item = std::ops::Range<u32>> + '_ {
        (0..self.k()).map(|i| self.block(i))
    }

    pub fn min_size(&self) -> usize {
        (0..self.k()).map(|i| self.size(i)).min().unwrap_or(0)
    }

    pub fn max_size(&self) -> usize {
        (0..self.k()).map(|i| self.size(i)).max().unwrap_or(0)
    }
}

/// Default block count `round(n / sqrt(ln n))`, clamped to `[1, n]`.
pub fn default_block_count(n: usize) -> usize {
    let nf = n as f64;
    let k = (nf / nf.ln().sqrt()).round() as usize;
    k.clamp(1, n)
}

#[derive(Clone, Debug)]
enum ListLayout {
    Explicit(Vec<Vec<u32>>),
    Blocked {
        partition: BlockPartition,
        /// Enumerate the successor block right after the own block.
        chain_next: bool,
    },
}

/// Per-vertex predetermined adjacency lists plus the offer cursors.
#[derive(Clone, Debug)]
pub struct ListFamily {
    n: usize,
    layout: ListLayout,
    cursors: Vec<u32>,
}

impl ListFamily {
    /// Wraps explicit lists, checking each is a permutation of the other
    /// vertices.
    pub fn explicit(lists: Vec<Vec<u32>>) -> Result<Self, ListError> {
        let n = lists.len();
        for (w, list) in lists.iter().enumerate() {
            let mut seen = vec![false; n];
            if list.len() != n - 1 {
                return Err(ListError::NotAPermutation(w as u32));
            }
            for &v in list {
                if v as usize >= n || v as usize == w || seen[v as usize] {
                    return Err(ListError::NotAPermutation(w as u32));
                }
                seen[v as usize] = true;
            }
        }
        Ok(Self {
            n,
            layout: ListLayout::Explicit(lists),
            cursors: vec![0; n],
        })
    }

    fn blocked(partition: BlockPartition, chain_next: bool) -> Self {
        let n = partition.n();
        Self {
            n,
            layout: ListLayout::Blocked { partition, chain_next },
            cursors: vec![0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn partition(&self) -> Option<&BlockPartition> {
        match &self.layout {
            ListLayout::Blocked { partition, .. } => Some(partition),
            ListLayout::Explicit(_) => None,
        }
    }

    pub fn cursor(&self, v: u32) -> u32 {
        self.cursors[v as usize]
    }

    /// The `i`-th list entry of `w` (1-based `i` in `1..=n-1`).
    pub fn entry(&self, w: u32, i: u32) -> u32 {
        debug_assert!(i >= 1 && (i as usize) < self.n);
        let mut j = (i - 1) as usize;
        match &self.layout {
            ListLayout::Explicit(lists) => lists[w as usize][j],
            ListLayout::Blocked { partition, chain_next } => {
                let k = partition.k();
                let bi = partition.block_of(w);
                let own = partition.block(bi);
                let own_len = own.len() - 1;
                if j < own_len {
                    let idx = own.start + j as u32;
                    return if idx < w { idx } else { idx + 1 };
                }
                j -= own_len;
                let next = (*chain_next && k > 1).then(|| partition.block((bi + 1) % k));
                if let Some(nb) = &next {
                    if j < nb.len() {
                        return nb.start + j as u32;
                    }
                    j -= nb.len();
                }
                // remaining vertices ascending, skipping the excluded blocks
                let mut excluded = vec![own];
                if let Some(nb) = next {
                    excluded.push(nb);
                }
                excluded.sort_by_key(|r| r.start);
                let mut cursor = 0u32;
                for ex in excluded {
                    let gap = (ex.start - cursor) as usize;
                    if j < gap {
                        return cursor + j as u32;
                    }
                    j -= gap;
                    cursor = ex.end;
                }
                cursor + j as u32
            }
        }
    }

    /// Advances `offered`'s cursor and returns the list entry to connect
    /// to. Past the end of the list the final entry repeats (the engine
    /// skips the duplicate edge).
    pub fn step(&mut self, offered: u32) -> u32 {
        let c = &mut self.cursors[offered as usize];
        *c += 1;
        let i = (*c).min(self.n as u32 - 1);
        self.entry(offered, i)
    }

    /// Materialized list of `w`, mostly for tests and inspection.
    pub fn materialize(&self, w: u32) -> Vec<u32> {
        (1..self.n as u32).map(|i| self.entry(w, i)).collect()
    }
}

/// Lists for growing a Hamilton cycle: own block, successor block, rest.
pub fn hamilton_lists(n: usize) -> (ListFamily, BlockPartition) {
    hamilton_lists_with_blocks(n, default_block_count(n))
}

pub fn hamilton_lists_with_blocks(n: usize, k: usize) -> (ListFamily, BlockPartition) {
    assert!(n >= 3, "hamilton lists need n >= 3");
    let partition = BlockPartition::balanced(n, k);
    let family = ListFamily::blocked(partition.clone(), true);
    (family, partition)
}

/// Lists for growing a clique factor: own block first, rest ascending.
/// Block sizes are multiples of `r`.
pub fn kr_factor_lists(n: usize, r: usize) -> Result<(ListFamily, BlockPartition), ListError> {
    if r == 0 || n == 0 {
        return Err(ListError::TooSmall(n));
    }
    if n % r != 0 {
        return Err(ListError::NotDivisible { n, r });
    }
    let k = default_block_count(n).min(n / r);
    kr_factor_lists_with_blocks(n, r, k)
}

pub fn kr_factor_lists_with_blocks(
    n: usize,
    r: usize,
    k: usize,
) -> Result<(ListFamily, BlockPartition), ListError> {
    if r == 0 || n == 0 {
        return Err(ListError::TooSmall(n));
    }
    if n % r != 0 {
        return Err(ListError::NotDivisible { n, r });
    }
    let partition = BlockPartition::balanced_divisible(n, k, r);
    let family = ListFamily::blocked(partition.clone(), false);
    Ok((family, partition))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BudgetKind {
    Isolated,
    Hamilton,
    KrFactor(usize),
}

/// Round budgets the list constructions are sized for:
/// `ceil(8 n sqrt(ln n))` for the Hamilton (and isolated-vertex) runs,
/// `ceil(9 r n sqrt(ln n))` for the clique factor.
pub fn recommended_budget(kind: BudgetKind, n: usize) -> u64 {
    let base = n as f64 * (n as f64).ln().sqrt();
    let rounds = match kind {
        BudgetKind::Isolated | BudgetKind::Hamilton => 8.0 * base,
        BudgetKind::KrFactor(r) => 9.0 * r as f64 * base,
    };
    rounds.ceil() as u64
}

/// When a list run should stop early.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopRule {
    /// Play out the whole budget.
    Never,
    /// Stop once no isolated vertex remains.
    NoIsolated,
}

/// Engine adapter playing a list family.
pub struct ListBuilder {
    family: ListFamily,
    stop: StopRule,
}

impl ListBuilder {
    pub fn new(family: ListFamily, stop: StopRule) -> Self {
        Self { family, stop }
    }

    pub fn family(&self) -> &ListFamily {
        &self.family
    }
}

impl Builder for ListBuilder {
    fn on_offer(&mut self, offered: u32, _view: &ProcessView<'_>) -> u32 {
        self.family.step(offered)
    }

    fn is_done(&self, view: &ProcessView<'_>) -> bool {
        match self.stop {
            StopRule::Never => false,
            StopRule::NoIsolated => view.isolated == 0,
        }
    }

    fn phase(&self) -> &str {
        "list"
    }
}
