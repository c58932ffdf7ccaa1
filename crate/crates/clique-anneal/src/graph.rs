//! Graph and community ingestion, induced-subgraph handling, and the node
//! feature / distortion operators used to build training samples.
//!
//! A [`Graph`] is immutable after construction: undirected, simple (no
//! self-loops, no duplicate edges), adjacency sorted, node ids dense in
//! `[0, n)`. Original file ids are kept in a dense→original table so outputs
//! can be written back in the input id space.

use crate::error::{Error, Result};
use rand::Rng;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

pub type NodeId = u32;

/// Immutable undirected simple graph with per-node raw features (default 1.0).
#[derive(Debug, Clone)]
pub struct Graph {
    adj: Vec<Vec<NodeId>>,
    raw: Vec<f64>,
    orig_ids: Vec<u64>,
    aug: Vec<[f64; 6]>,
}

/// Counters reported by [`Graph::load_edge_list`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub self_loops_dropped: usize,
    pub duplicate_edges_dropped: usize,
}

impl Graph {
    /// Build a graph from an edge list over dense ids `0..n`. Self-loops are
    /// rejected here (the file loader drops them with a warning before
    /// calling this); duplicate and reversed edges are deduplicated.
    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId)]) -> Result<Graph> {
        let orig = (0..n as u64).collect();
        Graph::from_edges_with_ids(n, edges, orig, None)
    }

    fn from_edges_with_ids(
        n: usize,
        edges: &[(NodeId, NodeId)],
        orig_ids: Vec<u64>,
        raw: Option<Vec<f64>>,
    ) -> Result<Graph> {
        if n == 0 {
            return Err(Error::Data("empty graph".into()));
        }
        let mut adj: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u == v {
                return Err(Error::Data(format!("self-loop at node {u}")));
            }
            if u as usize >= n || v as usize >= n {
                return Err(Error::Data(format!("edge ({u},{v}) outside [0,{n})")));
            }
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        let raw = raw.unwrap_or_else(|| vec![1.0; n]);
        let mut g = Graph {
            adj,
            raw,
            orig_ids,
            aug: Vec::new(),
        };
        g.aug = (0..n as NodeId).map(|v| g.compute_aug(v)).collect();
        Ok(g)
    }

    /// Parse a whitespace-separated edge list (`#`-prefixed comment lines
    /// ignored), remapping original ids to dense ids in first-appearance
    /// order. Returns the graph plus drop counters.
    pub fn load_edge_list(path: &Path) -> Result<(Graph, LoadStats)> {
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
        let reader = BufReader::new(file);
        let mut map: HashMap<u64, NodeId> = HashMap::new();
        let mut orig_ids: Vec<u64> = Vec::new();
        let mut edges: Vec<(NodeId, NodeId)> = Vec::new();
        let mut stats = LoadStats::default();
        let dense = |raw: u64, orig_ids: &mut Vec<u64>, map: &mut HashMap<u64, NodeId>| {
            *map.entry(raw).or_insert_with(|| {
                orig_ids.push(raw);
                (orig_ids.len() - 1) as NodeId
            })
        };
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut it = trimmed.split_whitespace();
            let (a, b) = match (it.next(), it.next()) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    return Err(Error::Data(format!(
                        "{}:{}: expected two integer tokens",
                        path.display(),
                        lineno + 1
                    )))
                }
            };
            let parse = |tok: &str| -> Result<u64> {
                tok.parse::<u64>().map_err(|_| {
                    Error::Data(format!(
                        "{}:{}: malformed node id {tok:?}",
                        path.display(),
                        lineno + 1
                    ))
                })
            };
            let (a, b) = (parse(a)?, parse(b)?);
            if a == b {
                stats.self_loops_dropped += 1;
                continue;
            }
            let u = dense(a, &mut orig_ids, &mut map);
            let v = dense(b, &mut orig_ids, &mut map);
            edges.push((u.min(v), u.max(v)));
        }
        if orig_ids.is_empty() {
            return Err(Error::Data(format!("{}: empty graph", path.display())));
        }
        let before = edges.len();
        edges.sort_unstable();
        edges.dedup();
        stats.duplicate_edges_dropped = before - edges.len();
        let g = Graph::from_edges_with_ids(orig_ids.len(), &edges, orig_ids, None)?;
        Ok((g, stats))
    }

    /// Write the edge list using original ids, one `u v` pair per line,
    /// each undirected edge once with the smaller dense endpoint first.
    pub fn write_edge_list(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for u in 0..self.n() as NodeId {
            for &v in self.neighbors(u) {
                if u < v {
                    writeln!(out, "{} {}", self.orig_ids[u as usize], self.orig_ids[v as usize])
                        .unwrap();
                }
            }
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Two-column original→dense id table.
    pub fn write_id_map(&self, path: &Path) -> Result<()> {
        let mut out = String::new();
        for (dense, orig) in self.orig_ids.iter().enumerate() {
            writeln!(out, "{orig} {dense}").unwrap();
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|l| l.len()).sum::<usize>() / 2
    }

    #[inline]
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v as usize]
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v as usize].len()
    }

    #[inline]
    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    pub fn raw_feature(&self, v: NodeId) -> f64 {
        self.raw[v as usize]
    }

    pub fn orig_id(&self, v: NodeId) -> u64 {
        self.orig_ids[v as usize]
    }

    pub fn dense_id(&self, orig: u64) -> Option<NodeId> {
        // The table is small relative to query volume only in tests; callers
        // needing bulk lookups should build their own map.
        self.orig_ids
            .iter()
            .position(|&o| o == orig)
            .map(|i| i as NodeId)
    }

    fn compute_aug(&self, v: NodeId) -> [f64; 6] {
        let deg = self.degree(v);
        if deg == 0 {
            return [self.raw[v as usize], 0.0, 0.0, 0.0, 0.0, 0.0];
        }
        let mut max = f64::MIN;
        let mut min = f64::MAX;
        let mut sum = 0.0;
        for &u in self.neighbors(v) {
            let d = self.degree(u) as f64;
            max = max.max(d);
            min = min.min(d);
            sum += d;
        }
        let avg = sum / deg as f64;
        let var = self
            .neighbors(v)
            .iter()
            .map(|&u| {
                let d = self.degree(u) as f64 - avg;
                d * d
            })
            .sum::<f64>()
            / deg as f64;
        [
            self.raw[v as usize],
            deg as f64,
            max,
            min,
            avg,
            var.sqrt(),
        ]
    }

    /// `[f_v, deg(v), max(DN), min(DN), avg(DN), std(DN)]`; DN statistics are 0
    /// for an isolated node and std is the population deviation.
    pub fn aug_feature(&self, v: NodeId) -> [f64; 6] {
        self.aug[v as usize]
    }

    /// Mean of the neighbors' augment features (zeros for an isolated node).
    pub fn mean_neighbor_aug(&self, v: NodeId) -> [f64; 6] {
        let mut out = [0.0; 6];
        let deg = self.degree(v);
        if deg == 0 {
            return out;
        }
        for &u in self.neighbors(v) {
            for (o, x) in out.iter_mut().zip(self.aug[u as usize]) {
                *o += x;
            }
        }
        for o in &mut out {
            *o /= deg as f64;
        }
        out
    }

    /// Nodes outside `sub` with at least one neighbor in `sub`. `sub` must be
    /// sorted; the result is sorted and disjoint from `sub`.
    pub fn one_hop_neighbors(&self, sub: &[NodeId]) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = Vec::new();
        for &v in sub {
            for &u in self.neighbors(v) {
                if sub.binary_search(&u).is_err() {
                    out.push(u);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Number of edges between `v` and the nodes of `sub` (excluding `v` itself).
    pub fn links_into(&self, v: NodeId, sub: &[NodeId]) -> usize {
        self.neighbors(v)
            .iter()
            .filter(|&&u| u != v && sub.binary_search(&u).is_ok())
            .count()
    }

    /// True if the induced subgraph on `sub` (sorted) is connected.
    pub fn induced_connected(&self, sub: &[NodeId]) -> bool {
        if sub.is_empty() {
            return false;
        }
        let mut seen = vec![false; sub.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &u in self.neighbors(sub[i]) {
                if let Ok(j) = sub.binary_search(&u) {
                    if !seen[j] {
                        seen[j] = true;
                        count += 1;
                        stack.push(j);
                    }
                }
            }
        }
        count == sub.len()
    }

    /// Whether the induced subgraph on `sub` contains at least one triangle.
    pub fn induced_has_triangle(&self, sub: &[NodeId]) -> bool {
        for (i, &a) in sub.iter().enumerate() {
            for &b in &sub[i + 1..] {
                if !self.has_edge(a, b) {
                    continue;
                }
                for &c in sub {
                    if c != a && c != b && self.has_edge(a, c) && self.has_edge(b, c) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// A labeled community: a set of node ids interpreted as an induced subgraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Community {
    pub id: usize,
    pub members: Vec<NodeId>,
}

impl Community {
    pub fn new(id: usize, mut members: Vec<NodeId>) -> Community {
        members.sort_unstable();
        members.dedup();
        Community { id, members }
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Parse a community file: one community per line, whitespace-separated node
/// ids in the graph's original id space. Empty lines are skipped; duplicates
/// within a line collapse.
pub fn load_communities(path: &Path, g: &Graph) -> Result<Vec<Community>> {
    let file = std::fs::File::open(path)
        .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
    let mut map: HashMap<u64, NodeId> = HashMap::with_capacity(g.n());
    for v in 0..g.n() as NodeId {
        map.insert(g.orig_id(v), v);
    }
    let reader = BufReader::new(file);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut members = Vec::new();
        for tok in trimmed.split_whitespace() {
            let raw: u64 = tok.parse().map_err(|_| {
                Error::Data(format!(
                    "{}:{}: malformed node id {tok:?}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let dense = map.get(&raw).copied().ok_or_else(|| {
                Error::Data(format!(
                    "{}:{}: unknown node id {raw}",
                    path.display(),
                    lineno + 1
                ))
            })?;
            members.push(dense);
        }
        out.push(Community::new(out.len(), members));
    }
    Ok(out)
}

/// Write communities using original ids, one per line, members sorted by
/// dense id.
pub fn write_communities(path: &Path, g: &Graph, comms: &[Vec<NodeId>]) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    for members in comms {
        let line: Vec<String> = members.iter().map(|&v| g.orig_id(v).to_string()).collect();
        writeln!(file, "{}", line.join(" "))?;
    }
    Ok(())
}

/// Result of a distortion operator; `skipped` means the precondition failed
/// and `members` is the input unchanged (the sampler resamples).
#[derive(Debug, Clone)]
pub struct Distorted {
    pub members: Vec<NodeId>,
    pub skipped: bool,
}

fn distortion_count(len: usize, m_pct: u32) -> usize {
    // ceil(m_pct * len / 100)
    (m_pct as usize * len).div_ceil(100)
}

/// Replace `m_pct`% of `sub`'s nodes with distinct outside nodes adjacent to
/// `sub`. Cardinality is preserved; when there are not enough boundary
/// neighbors the sample is skip-flagged.
pub fn distort_replace<R: Rng>(g: &Graph, sub: &[NodeId], m_pct: u32, rng: &mut R) -> Distorted {
    let r = distortion_count(sub.len(), m_pct);
    if r == 0 {
        return Distorted {
            members: sub.to_vec(),
            skipped: false,
        };
    }
    let pool = g.one_hop_neighbors(sub);
    if pool.len() < r {
        return Distorted {
            members: sub.to_vec(),
            skipped: true,
        };
    }
    let drop_idx = rand::seq::index::sample(rng, sub.len(), r).into_vec();
    let add_idx = rand::seq::index::sample(rng, pool.len(), r).into_vec();
    let mut members: Vec<NodeId> = sub
        .iter()
        .enumerate()
        .filter(|(i, _)| !drop_idx.contains(i))
        .map(|(_, &v)| v)
        .collect();
    members.extend(add_idx.iter().map(|&i| pool[i]));
    members.sort_unstable();
    Distorted {
        members,
        skipped: false,
    }
}

/// Remove `m_pct`% of `sub`'s nodes, preferring removals that keep at least
/// one triangle in the remainder. Requires `|sub| ≥ 4`; smaller inputs are
/// skip-flagged.
pub fn distort_remove<R: Rng>(g: &Graph, sub: &[NodeId], m_pct: u32, rng: &mut R) -> Distorted {
    let r = distortion_count(sub.len(), m_pct);
    if r == 0 {
        return Distorted {
            members: sub.to_vec(),
            skipped: false,
        };
    }
    if sub.len() < 4 {
        return Distorted {
            members: sub.to_vec(),
            skipped: true,
        };
    }
    let r = r.min(sub.len() - 1);
    let mut members = sub.to_vec();
    for _ in 0..r {
        // Prefer nodes whose removal keeps a triangle in the remainder.
        let mut safe: Vec<usize> = Vec::new();
        for i in 0..members.len() {
            let mut rest = members.clone();
            rest.remove(i);
            if g.induced_has_triangle(&rest) {
                safe.push(i);
            }
        }
        let pick = if safe.is_empty() {
            rng.gen_range(0..members.len())
        } else {
            safe[rng.gen_range(0..safe.len())]
        };
        members.remove(pick);
    }
    Distorted {
        members,
        skipped: false,
    }
}

/// Sorted union of two sorted node sets.
pub fn union_sorted(a: &[NodeId], b: &[NodeId]) -> Vec<NodeId> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    out.extend_from_slice(a);
    out.extend_from_slice(b);
    out.sort_unstable();
    out.dedup();
    out
}

/// Train/valid/test split over community indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub train: Vec<usize>,
    pub valid: Vec<usize>,
    pub test: Vec<usize>,
}

impl DatasetSplit {
    /// Seeded shuffle split; percentages refer to community counts with the
    /// remainder going to test. At least one training community is kept.
    pub fn random<R: Rng>(
        n_comms: usize,
        train_pct: f64,
        valid_pct: f64,
        rng: &mut R,
    ) -> Result<DatasetSplit> {
        if n_comms == 0 {
            return Err(Error::Data("no communities to split".into()));
        }
        let mut idx: Vec<usize> = (0..n_comms).collect();
        for i in (1..idx.len()).rev() {
            let j = rng.gen_range(0..=i);
            idx.swap(i, j);
        }
        let n_train = ((n_comms as f64 * train_pct / 100.0).round() as usize).max(1);
        let n_valid = (n_comms as f64 * valid_pct / 100.0).round() as usize;
        let n_train = n_train.min(n_comms);
        let n_valid = n_valid.min(n_comms - n_train);
        let train = idx[..n_train].to_vec();
        let valid = idx[n_train..n_train + n_valid].to_vec();
        let test = idx[n_train + n_valid..].to_vec();
        Ok(DatasetSplit { train, valid, test })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let fmt = |v: &[usize]| {
            v.iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        std::fs::write(
            path,
            format!(
                "train {}\nvalid {}\ntest {}\n",
                fmt(&self.train),
                fmt(&self.valid),
                fmt(&self.test)
            ),
        )?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<DatasetSplit> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
        let mut train = None;
        let mut valid = None;
        let mut test = None;
        for (lineno, line) in text.lines().enumerate() {
            let mut it = line.split_whitespace();
            let tag = match it.next() {
                Some(t) => t,
                None => continue,
            };
            let ids: Vec<usize> = it
                .map(|t| {
                    t.parse().map_err(|_| {
                        Error::Data(format!(
                            "{}:{}: malformed index {t:?}",
                            path.display(),
                            lineno + 1
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            match tag {
                "train" => train = Some(ids),
                "valid" => valid = Some(ids),
                "test" => test = Some(ids),
                other => {
                    return Err(Error::Data(format!(
                        "{}:{}: unknown split tag {other:?}",
                        path.display(),
                        lineno + 1
                    )))
                }
            }
        }
        match (train, test) {
            (Some(train), Some(test)) => Ok(DatasetSplit {
                train,
                valid: valid.unwrap_or_default(),
                test,
            }),
            _ => Err(Error::Data(format!(
                "{}: split file missing train/test lines",
                path.display()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(7)
    }

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        use std::io::Write;
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn load_triangle() {
        let f = write_tmp("0 1\n1 2\n2 0\n");
        let (g, stats) = Graph::load_edge_list(f.path()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.edge_count(), 3);
        assert_eq!(stats, LoadStats::default());
    }

    #[test]
    fn load_drops_self_loop_with_warning_count() {
        let f = write_tmp("0 1\n5 5\n");
        let (g, stats) = Graph::load_edge_list(f.path()).unwrap();
        assert_eq!(g.n(), 2);
        assert_eq!(stats.self_loops_dropped, 1);
    }

    #[test]
    fn load_dedups_reversed_edge() {
        let f = write_tmp("0 1\n1 0\n");
        let (g, stats) = Graph::load_edge_list(f.path()).unwrap();
        // Oracle: the deduplicated edge set of the input.
        let mut oracle: BTreeSet<(u64, u64)> = BTreeSet::new();
        for (a, b) in [(0u64, 1u64), (1, 0)] {
            oracle.insert((a.min(b), a.max(b)));
        }
        assert_eq!(g.edge_count(), oracle.len());
        assert_eq!(stats.duplicate_edges_dropped, 1);
    }

    #[test]
    fn load_rejects_malformed_line_with_line_number() {
        let f = write_tmp("0 1\nnope 2\n");
        let err = Graph::load_edge_list(f.path()).unwrap_err();
        assert!(err.to_string().contains(":2:"), "{err}");
    }

    #[test]
    fn load_rejects_empty() {
        let f = write_tmp("# just a comment\n");
        assert!(Graph::load_edge_list(f.path()).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let f = write_tmp("3 9\n9 4\n4 3\n3 9\n7 8\n");
        let (g, _) = Graph::load_edge_list(f.path()).unwrap();
        let out = tempfile::NamedTempFile::new().unwrap();
        g.write_edge_list(out.path()).unwrap();
        let (g2, stats2) = Graph::load_edge_list(out.path()).unwrap();
        assert_eq!(stats2, LoadStats::default());
        let edges = |g: &Graph| -> BTreeSet<(u64, u64)> {
            let mut set = BTreeSet::new();
            for u in 0..g.n() as NodeId {
                for &v in g.neighbors(u) {
                    let (a, b) = (g.orig_id(u), g.orig_id(v));
                    set.insert((a.min(b), a.max(b)));
                }
            }
            set
        };
        assert_eq!(edges(&g), edges(&g2));
    }

    #[test]
    fn communities_parse_and_dedup() {
        let ef = write_tmp("1 2\n2 3\n4 5\n7 8\n");
        let (g, _) = Graph::load_edge_list(ef.path()).unwrap();
        let cf = write_tmp("1 2 3\n4 5\n\n7 7 8\n");
        let comms = load_communities(cf.path(), &g).unwrap();
        assert_eq!(comms.len(), 3);
        assert_eq!(comms[0].len(), 3);
        assert_eq!(comms[1].len(), 2);
        assert_eq!(comms[2].len(), 2); // "7 7 8" collapses
    }

    #[test]
    fn communities_unknown_id_is_error() {
        let ef = write_tmp("0 1\n");
        let (g, _) = Graph::load_edge_list(ef.path()).unwrap();
        let cf = write_tmp("0 42\n");
        let err = load_communities(cf.path(), &g).unwrap_err();
        assert!(err.to_string().contains("42"), "{err}");
        assert!(err.to_string().contains(":1:"), "{err}");
    }

    #[test]
    fn aug_feature_triangle() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(g.aug_feature(0), [1.0, 2.0, 2.0, 2.0, 2.0, 0.0]);
    }

    #[test]
    fn aug_feature_isolated() {
        let g = Graph::from_edges(3, &[(0, 1)]).unwrap();
        assert_eq!(g.aug_feature(2), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn aug_feature_star_center() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(g.aug_feature(0), [1.0, 3.0, 1.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn aug_feature_permutation_equivariant() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)];
        let g = Graph::from_edges(4, &edges).unwrap();
        // relabel via permutation p
        let p = [2u32, 0, 3, 1];
        let mapped: Vec<(NodeId, NodeId)> = edges
            .iter()
            .map(|&(a, b)| (p[a as usize], p[b as usize]))
            .collect();
        let h = Graph::from_edges(4, &mapped).unwrap();
        for v in 0..4u32 {
            assert_eq!(g.aug_feature(v), h.aug_feature(p[v as usize]));
        }
    }

    #[test]
    fn one_hop_examples() {
        let k4 = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        assert_eq!(k4.one_hop_neighbors(&[0, 1, 2]), vec![3]);
        assert_eq!(k4.one_hop_neighbors(&[0, 1, 2, 3]), Vec::<NodeId>::new());
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.one_hop_neighbors(&[1]), vec![0, 2]);
    }

    #[test]
    fn replace_swaps_exactly_one_of_four() {
        // 4-clique with two pendant neighbors
        let g = Graph::from_edges(
            6,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (1, 2),
                (1, 3),
                (2, 3),
                (3, 4),
                (2, 5),
            ],
        )
        .unwrap();
        let sub = [0u32, 1, 2, 3];
        let mut r = rng();
        for _ in 0..20 {
            let d = distort_replace(&g, &sub, 25, &mut r);
            assert!(!d.skipped);
            assert_eq!(d.members.len(), 4);
            let kept = d.members.iter().filter(|v| sub.contains(v)).count();
            assert_eq!(kept, 3, "exactly one swap expected: {:?}", d.members);
        }
    }

    #[test]
    fn replace_zero_pct_is_identity() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let d = distort_replace(&g, &[0, 1], 0, &mut rng());
        assert!(!d.skipped);
        assert_eq!(d.members, vec![0, 1]);
    }

    #[test]
    fn replace_whole_component_skips() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let d = distort_replace(&g, &[0, 1, 2], 25, &mut rng());
        assert!(d.skipped);
        assert_eq!(d.members, vec![0, 1, 2]);
    }

    #[test]
    fn remove_from_4clique_leaves_triangle() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let sub = [0u32, 1, 2, 3];
        // Oracle: every single-node removal of a 4-clique retains a triangle.
        for skip in 0..4 {
            let rest: Vec<NodeId> = sub.iter().copied().filter(|&v| v != skip).collect();
            assert!(g.induced_has_triangle(&rest));
        }
        let mut r = rng();
        for _ in 0..10 {
            let d = distort_remove(&g, &sub, 25, &mut r);
            assert!(!d.skipped);
            assert_eq!(d.members.len(), 3);
            assert!(g.induced_has_triangle(&d.members));
        }
    }

    #[test]
    fn remove_skips_small_sub() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let d = distort_remove(&g, &[0, 1, 2], 25, &mut rng());
        assert!(d.skipped);
    }

    #[test]
    fn remove_zero_pct_is_identity() {
        let g = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let d = distort_remove(&g, &[0, 1, 2, 3], 0, &mut rng());
        assert!(!d.skipped);
        assert_eq!(d.members, vec![0, 1, 2, 3]);
    }

    #[test]
    fn split_partitions_indices() {
        let s = DatasetSplit::random(100, 9.0, 1.0, &mut rng()).unwrap();
        assert_eq!(s.train.len(), 9);
        assert_eq!(s.valid.len(), 1);
        assert_eq!(s.test.len(), 90);
        let mut all: Vec<usize> = s
            .train
            .iter()
            .chain(&s.valid)
            .chain(&s.test)
            .copied()
            .collect();
        all.sort_unstable();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn split_round_trips() {
        let s = DatasetSplit::random(20, 10.0, 5.0, &mut rng()).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        s.save(f.path()).unwrap();
        assert_eq!(DatasetSplit::load(f.path()).unwrap(), s);
    }
}
