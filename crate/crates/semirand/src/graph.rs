//! Simple undirected graphs on `{0, .., n-1}`, target generators, and the
//! structural helpers used by the builder strategies (graph square, greedy
//! independent sets, distance-3 packings).

use crate::rng::DetRng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {0} out of range (n = {1})")]
    VertexOutOfRange(u32, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(u32),
    #[error("duplicate edge {{{0}, {1}}}")]
    DuplicateEdge(u32, u32),
    #[error("bad edge-list header: {0}")]
    BadHeader(String),
    #[error("bad edge-list line {0}: {1}")]
    BadLine(usize, String),
    #[error("edge count mismatch: header says {expected}, file has {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("regular graph sampling failed after {0} attempts")]
    RegularRetriesExceeded(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Simple undirected graph with sorted adjacency lists.
///
/// Adjacency is kept symmetric, duplicate-free and self-loop free at all
/// times; `edge_count` is half the sum of the adjacency list lengths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<u32>>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self {
            n,
            adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from an explicit edge list, rejecting self-loops,
    /// duplicates and out-of-range endpoints.
    pub fn from_edges(n: usize, edges: &[(u32, u32)]) -> Result<Self, GraphError> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            if u as usize >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if v as usize >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !g.add_edge(u, v) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn degree(&self, v: u32) -> usize {
        self.adj[v as usize].len()
    }

    #[inline]
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    #[inline]
    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        if u == v {
            return false;
        }
        // probe the shorter list
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a as usize].binary_search(&b).is_ok()
    }

    /// Inserts `{u, v}` and returns true; returns false (graph unchanged)
    /// when the edge is already present. Panics on self-loops or
    /// out-of-range endpoints: callers are expected to screen those.
    pub fn add_edge(&mut self, u: u32, v: u32) -> bool {
        assert!(u != v, "self-loop at {u}");
        assert!((u as usize) < self.n && (v as usize) < self.n, "vertex out of range");
        match self.adj[u as usize].binary_search(&v) {
            Ok(_) => false,
            Err(pos_u) => {
                self.adj[u as usize].insert(pos_u, v);
                let pos_v = self.adj[v as usize].binary_search(&u).unwrap_err();
                self.adj[v as usize].insert(pos_v, u);
                self.edge_count += 1;
                true
            }
        }
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` pairs with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.n as u32).flat_map(move |u| {
            self.adj[u as usize]
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn is_forest(&self) -> bool {
        // acyclic <=> every component has (vertices - 1) edges; BFS count
        let mut seen = vec![false; self.n];
        let mut queue = Vec::new();
        for s in 0..self.n as u32 {
            if seen[s as usize] {
                continue;
            }
            seen[s as usize] = true;
            queue.clear();
            queue.push(s);
            let mut verts = 0usize;
            let mut deg_sum = 0usize;
            let mut head = 0;
            while head < queue.len() {
                let v = queue[head];
                head += 1;
                verts += 1;
                deg_sum += self.degree(v);
                for &w in self.neighbors(v) {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push(w);
                    }
                }
            }
            if deg_sum / 2 != verts - 1 {
                return false;
            }
        }
        true
    }

    /// All vertices at distance <= `radius` from `from`, including `from`.
    pub fn ball(&self, from: u32, radius: usize) -> Vec<u32> {
        let mut out = vec![from];
        let mut seen = std::collections::HashSet::new();
        seen.insert(from);
        let mut frontier = vec![from];
        for _ in 0..radius {
            let mut next = Vec::new();
            for &v in &frontier {
                for &w in self.neighbors(v) {
                    if seen.insert(w) {
                        next.push(w);
                        out.push(w);
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// Full symmetry / sortedness / count audit; used by the test suites.
    pub fn validate(&self) -> Result<(), String> {
        let mut half_edges = 0usize;
        for v in 0..self.n as u32 {
            let list = self.neighbors(v);
            if !list.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("adjacency of {v} not strictly sorted"));
            }
            for &w in list {
                if w == v {
                    return Err(format!("self-loop at {v}"));
                }
                if w as usize >= self.n {
                    return Err(format!("neighbor {w} of {v} out of range"));
                }
                if self.adj[w as usize].binary_search(&v).is_err() {
                    return Err(format!("asymmetric edge {{{v}, {w}}}"));
                }
            }
            half_edges += list.len();
        }
        if half_edges != 2 * self.edge_count {
            return Err(format!(
                "edge_count {} does not match half-degree sum {}",
                self.edge_count, half_edges
            ));
        }
        Ok(())
    }

    // ----- edge-list file format: first line "n m", then m lines "u v" -----

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edge_count);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| GraphError::BadHeader("empty file".into()))?;
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GraphError::BadHeader(header.into()))?;
        let m: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| GraphError::BadHeader(header.into()))?;
        if parts.next().is_some() {
            return Err(GraphError::BadHeader(header.into()));
        }
        let mut g = Self::empty(n);
        let mut found = 0usize;
        for (idx, line) in lines {
            let mut parts = line.split_whitespace();
            let u: u32 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| GraphError::BadLine(idx + 1, line.into()))?;
            let v: u32 = parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| GraphError::BadLine(idx + 1, line.into()))?;
            if parts.next().is_some() {
                return Err(GraphError::BadLine(idx + 1, line.into()));
            }
            if u as usize >= n || v as usize >= n {
                return Err(GraphError::VertexOutOfRange(u.max(v), n));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !g.add_edge(u, v) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            found += 1;
        }
        if found != m {
            return Err(GraphError::EdgeCountMismatch { expected: m, found });
        }
        Ok(g)
    }

    pub fn write_edge_list<P: AsRef<Path>>(&self, path: P) -> Result<(), GraphError> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }

    pub fn read_edge_list<P: AsRef<Path>>(path: P) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_edge_list(&text)
    }
}

/// Bijection between target vertices and process vertices, stored with its
/// inverse so both directions are O(1).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bijection {
    fwd: Vec<u32>,
    inv: Vec<u32>,
}

impl Bijection {
    pub fn identity(n: usize) -> Self {
        let fwd: Vec<u32> = (0..n as u32).collect();
        Self {
            inv: fwd.clone(),
            fwd,
        }
    }

    /// Validates that `fwd` is a permutation and builds the inverse.
    pub fn from_forward(fwd: Vec<u32>) -> Option<Self> {
        let n = fwd.len();
        let mut inv = vec![u32::MAX; n];
        for (x, &v) in fwd.iter().enumerate() {
            if v as usize >= n || inv[v as usize] != u32::MAX {
                return None;
            }
            inv[v as usize] = x as u32;
        }
        Some(Self { fwd, inv })
    }

    pub fn n(&self) -> usize {
        self.fwd.len()
    }

    /// phi(x): process vertex playing the role of target vertex `x`.
    #[inline]
    pub fn image(&self, x: u32) -> u32 {
        self.fwd[x as usize]
    }

    /// phi^{-1}(v): target vertex whose role process vertex `v` plays.
    #[inline]
    pub fn preimage(&self, v: u32) -> u32 {
        self.inv[v as usize]
    }

    pub fn forward(&self) -> &[u32] {
        &self.fwd
    }

    /// Swaps the images of target vertices `x` and `y`.
    pub fn swap_images(&mut self, x: u32, y: u32) {
        let ix = self.fwd[x as usize];
        let iy = self.fwd[y as usize];
        self.fwd[x as usize] = iy;
        self.fwd[y as usize] = ix;
        self.inv[ix as usize] = y;
        self.inv[iy as usize] = x;
    }

    pub fn is_consistent(&self) -> bool {
        self.fwd.len() == self.inv.len()
            && self
                .fwd
                .iter()
                .enumerate()
                .all(|(x, &v)| (v as usize) < self.inv.len() && self.inv[v as usize] == x as u32)
    }
}

/// The square of `h`: an edge joins every pair at distance 1 or 2.
pub fn square(h: &Graph) -> Graph {
    let n = h.n();
    let mut out = Graph::empty(n);
    let mut mark = vec![false; n];
    for u in 0..n as u32 {
        let mut touched = Vec::new();
        for &v in h.neighbors(u) {
            if v > u && !mark[v as usize] {
                mark[v as usize] = true;
                touched.push(v);
            }
            for &w in h.neighbors(v) {
                if w > u && !mark[w as usize] {
                    mark[w as usize] = true;
                    touched.push(w);
                }
            }
        }
        for &v in &touched {
            out.add_edge(u, v);
            mark[v as usize] = false;
        }
    }
    out
}

/// Greedy independent set, visiting vertices by ascending (degree, index).
///
/// The result is maximal, hence at least `n / (max_degree + 1)` vertices.
/// Returned ascending.
pub fn greedy_independent_set(g: &Graph) -> Vec<u32> {
    let n = g.n();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let mut blocked = vec![false; n];
    let mut picked = Vec::new();
    for v in order {
        if blocked[v as usize] {
            continue;
        }
        picked.push(v);
        for &w in g.neighbors(v) {
            blocked[w as usize] = true;
        }
    }
    picked.sort_unstable();
    picked
}

/// Greedy packing of up to `count` vertices from `allowed` (degree at most
/// `deg_cap`) that are pairwise at distance >= 3 in `h`. Scans vertices in
/// ascending order; returns fewer than `count` only when the packing is
/// exhausted.
pub fn scattered_candidates(h: &Graph, allowed: &[bool], count: usize, deg_cap: usize) -> Vec<u32> {
    assert_eq!(allowed.len(), h.n());
    let mut blocked = vec![false; h.n()];
    let mut picked = Vec::new();
    if count == 0 {
        return picked;
    }
    for v in 0..h.n() as u32 {
        if !allowed[v as usize] || blocked[v as usize] || h.degree(v) > deg_cap {
            continue;
        }
        picked.push(v);
        if picked.len() == count {
            break;
        }
        for w in h.ball(v, 2) {
            blocked[w as usize] = true;
        }
    }
    picked
}

// ---------------------------------------------------------------------------
// Target specifications
// ---------------------------------------------------------------------------

/// What target graph to build, together with the vertex count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TargetSpec {
    pub kind: TargetKind,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TargetKind {
    Cycle,
    Path,
    PerfectMatching,
    KrFactor { r: usize },
    StarForest { delta: usize },
    RandomRegular { delta: usize },
    RandomForest { delta: usize },
    FromFile { path: String },
}

impl TargetKind {
    pub fn name(&self) -> &'static str {
        match self {
            TargetKind::Cycle => "cycle",
            TargetKind::Path => "path",
            TargetKind::PerfectMatching => "perfect_matching",
            TargetKind::KrFactor { .. } => "kr_factor",
            TargetKind::StarForest { .. } => "star_forest",
            TargetKind::RandomRegular { .. } => "random_regular",
            TargetKind::RandomForest { .. } => "random_forest",
            TargetKind::FromFile { .. } => "from_file",
        }
    }
}

/// Flat JSON form: `{kind, n, delta, r, path}` with unused fields omitted.
#[derive(Serialize, Deserialize)]
struct RawTargetSpec {
    kind: String,
    #[serde(default)]
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    path: Option<String>,
}

impl Serialize for TargetSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let (delta, r, path) = match &self.kind {
            TargetKind::KrFactor { r } => (None, Some(*r), None),
            TargetKind::StarForest { delta }
            | TargetKind::RandomRegular { delta }
            | TargetKind::RandomForest { delta } => (Some(*delta), None, None),
            TargetKind::FromFile { path } => (None, None, Some(path.clone())),
            _ => (None, None, None),
        };
        RawTargetSpec {
            kind: self.kind.name().to_owned(),
            n: self.n,
            delta,
            r,
            path,
        }
        .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TargetSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = RawTargetSpec::deserialize(de)?;
        TargetSpec::from_parts(&raw.kind, raw.n, raw.delta, raw.r, raw.path.as_deref())
            .map_err(serde::de::Error::custom)
    }
}

impl TargetSpec {
    /// Assembles a spec from the flat field set, validating per kind.
    pub fn from_parts(
        kind: &str,
        n: usize,
        delta: Option<usize>,
        r: Option<usize>,
        path: Option<&str>,
    ) -> Result<Self, GraphError> {
        let need_delta = || {
            delta.ok_or_else(|| GraphError::InvalidTarget(format!("kind '{kind}' needs delta")))
        };
        let kind = match kind {
            "cycle" => TargetKind::Cycle,
            "path" => TargetKind::Path,
            "perfect_matching" => TargetKind::PerfectMatching,
            "kr_factor" => TargetKind::KrFactor {
                r: r.ok_or_else(|| GraphError::InvalidTarget("kr_factor needs r".into()))?,
            },
            "star_forest" => TargetKind::StarForest { delta: need_delta()? },
            "random_regular" => TargetKind::RandomRegular { delta: need_delta()? },
            "random_forest" => TargetKind::RandomForest { delta: need_delta()? },
            "from_file" => TargetKind::FromFile {
                path: path
                    .ok_or_else(|| GraphError::InvalidTarget("from_file needs path".into()))?
                    .to_owned(),
            },
            other => {
                return Err(GraphError::InvalidTarget(format!("unknown kind '{other}'")))
            }
        };
        Ok(TargetSpec { kind, n })
    }
}

/// Generates the target graph. Deterministic given `seed`.
pub fn generate(spec: &TargetSpec, seed: u64) -> Result<Graph, GraphError> {
    let n = spec.n;
    let bad = |msg: String| Err(GraphError::InvalidTarget(msg));
    match &spec.kind {
        TargetKind::Cycle => {
            if n < 3 {
                return bad(format!("cycle needs n >= 3, got {n}"));
            }
            let mut g = Graph::empty(n);
            for v in 0..n as u32 {
                g.add_edge(v, ((v as usize + 1) % n) as u32);
            }
            Ok(g)
        }
        TargetKind::Path => {
            if n == 0 {
                return bad("path needs n >= 1".into());
            }
            let mut g = Graph::empty(n);
            for v in 1..n as u32 {
                g.add_edge(v - 1, v);
            }
            Ok(g)
        }
        TargetKind::PerfectMatching => {
            if n == 0 || n % 2 != 0 {
                return bad(format!("perfect matching needs even n >= 2, got {n}"));
            }
            let mut g = Graph::empty(n);
            for i in 0..n / 2 {
                g.add_edge((2 * i) as u32, (2 * i + 1) as u32);
            }
            Ok(g)
        }
        TargetKind::KrFactor { r } => {
            let r = *r;
            if r < 1 || n == 0 || n % r != 0 {
                return bad(format!("kr_factor needs r >= 1 dividing n (r = {r}, n = {n})"));
            }
            let mut g = Graph::empty(n);
            for block in 0..n / r {
                let base = (block * r) as u32;
                for i in 0..r as u32 {
                    for j in (i + 1)..r as u32 {
                        g.add_edge(base + i, base + j);
                    }
                }
            }
            Ok(g)
        }
        TargetKind::StarForest { delta } => {
            let delta = *delta;
            if delta == 0 {
                return bad("star_forest needs delta >= 1".into());
            }
            let mut g = Graph::empty(n);
            for s in 0..n / (delta + 1) {
                let center = (s * (delta + 1)) as u32;
                for leaf in 1..=delta as u32 {
                    g.add_edge(center, center + leaf);
                }
            }
            Ok(g)
        }
        TargetKind::RandomRegular { delta } => random_regular(n, *delta, seed),
        TargetKind::RandomForest { delta } => random_forest(n, *delta, seed),
        TargetKind::FromFile { path } => {
            let g = Graph::read_edge_list(path)?;
            if n != 0 && g.n() != n {
                return bad(format!("file has n = {}, spec says {n}", g.n()));
            }
            Ok(g)
        }
    }
}

const REGULAR_MAX_ATTEMPTS: usize = 200;

/// Configuration-model sample of a `delta`-regular graph. Each attempt
/// pairs a shuffled stub vector and then repairs self-loops and duplicate
/// edges by degree-preserving pair switches; an attempt that cannot be
/// repaired is resampled, up to the attempt cap. Whole-pairing rejection
/// alone would almost never produce a simple graph once `delta` grows past
/// a handful, so the switch repair is what makes moderate degrees usable.
fn random_regular(n: usize, delta: usize, seed: u64) -> Result<Graph, GraphError> {
    if delta >= n.max(1) || (n * delta) % 2 != 0 {
        return Err(GraphError::InvalidTarget(format!(
            "random_regular needs delta < n and delta * n even (delta = {delta}, n = {n})"
        )));
    }
    if delta == 0 {
        return Ok(Graph::empty(n));
    }
    let mut rng = DetRng::new(seed);
    let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| std::iter::repeat(v).take(delta)).collect();
    for _ in 0..REGULAR_MAX_ATTEMPTS {
        rng.shuffle(&mut stubs);
        if let Some(edges) = pair_with_switch_repair(&stubs, &mut rng) {
            let g = Graph::from_edges(n, &edges).expect("repaired pairing is simple");
            debug_assert!((0..n as u32).all(|v| g.degree(v) == delta));
            return Ok(g);
        }
    }
    Err(GraphError::RegularRetriesExceeded(REGULAR_MAX_ATTEMPTS))
}

/// Pairs consecutive stubs; invalid pairs (loops, duplicates) are rewired
/// against randomly chosen valid pairs, preserving all degrees.
fn pair_with_switch_repair(stubs: &[u32], rng: &mut DetRng) -> Option<Vec<(u32, u32)>> {
    let key = |u: u32, v: u32| (u.min(v), u.max(v));
    let mut pairs: Vec<(u32, u32)> = stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    let mut present = std::collections::HashSet::with_capacity(pairs.len());
    let mut bad = Vec::new();
    for (i, &(u, v)) in pairs.iter().enumerate() {
        if u == v || !present.insert(key(u, v)) {
            bad.push(i);
        }
    }
    let mut budget = 200 + 100 * bad.len();
    while let Some(&i) = bad.last() {
        if budget == 0 {
            return None;
        }
        budget -= 1;
        let j = rng.below(pairs.len() as u64) as usize;
        if i == j || bad.contains(&j) {
            continue;
        }
        let (u, v) = pairs[i];
        let (mut x, mut y) = pairs[j];
        if rng.below(2) == 1 {
            std::mem::swap(&mut x, &mut y);
        }
        let (e1, e2) = (key(u, x), key(v, y));
        if u == x || v == y || e1 == e2 || present.contains(&e1) || present.contains(&e2) {
            continue;
        }
        present.remove(&key(x, y));
        present.insert(e1);
        present.insert(e2);
        pairs[i] = (u, x);
        pairs[j] = (v, y);
        bad.pop();
    }
    Some(pairs)
}

/// Random forest with degree cap: each new vertex attaches to a uniformly
/// chosen earlier vertex that still has spare degree, or starts a fresh
/// component when none is available.
fn random_forest(n: usize, delta: usize, seed: u64) -> Result<Graph, GraphError> {
    if delta == 0 {
        return Ok(Graph::empty(n));
    }
    let mut rng = DetRng::new(seed);
    let mut g = Graph::empty(n);
    let mut eligible: Vec<u32> = Vec::with_capacity(n);
    if n > 0 {
        eligible.push(0);
    }
    for v in 1..n as u32 {
        if eligible.is_empty() {
            eligible.push(v);
            continue;
        }
        let idx = rng.below(eligible.len() as u64) as usize;
        let parent = eligible[idx];
        g.add_edge(parent, v);
        if g.degree(parent) >= delta {
            eligible.swap_remove(idx);
        }
        if g.degree(v) < delta {
            eligible.push(v);
        }
    }
    Ok(g)
}
