//! Maximal clique enumeration (Bron–Kerbosch with pivoting), a per-node
//! clique index, and the merge/top-k helpers the proposer and annealer build
//! on. Cliques are size ≥ 3 everywhere: single edges are never treated as
//! cliques in this crate.

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use rayon::prelude::*;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};

pub const MIN_CLIQUE_SIZE: usize = 3;

/// Maximal cliques of a graph plus a node → clique-ids map.
///
/// The clique list is ordered size-descending, ties by lexicographic member
/// order, so every downstream sequence is reproducible.
#[derive(Debug, Clone)]
pub struct CliqueIndex {
    cliques: Vec<Vec<NodeId>>,
    by_node: Vec<Vec<u32>>,
}

/// Counts adjacency probes so tests can pin the enumeration budget.
#[derive(Debug, Default)]
pub struct OpCounter {
    pub edge_checks: AtomicU64,
}

impl OpCounter {
    pub fn edge_checks(&self) -> u64 {
        self.edge_checks.load(Ordering::Relaxed)
    }
}

struct BkContext<'a> {
    g: &'a Graph,
    cap: usize,
    counter: &'a OpCounter,
}

impl BkContext<'_> {
    #[inline]
    fn adjacent(&self, u: NodeId, v: NodeId) -> bool {
        self.counter.edge_checks.fetch_add(1, Ordering::Relaxed);
        self.g.has_edge(u, v)
    }

    /// Maximal cliques extending `r`, with candidates `p` and exclusion `x`.
    fn expand(
        &self,
        r: &mut Vec<NodeId>,
        p: Vec<NodeId>,
        x: Vec<NodeId>,
        out: &mut Vec<Vec<NodeId>>,
    ) -> Result<()> {
        if p.is_empty() && x.is_empty() {
            if r.len() >= MIN_CLIQUE_SIZE {
                if out.len() >= self.cap {
                    return Err(Error::Budget(format!(
                        "clique count cap {} exceeded",
                        self.cap
                    )));
                }
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return Ok(());
        }
        // Pivot on the candidate/excluded vertex covering most of p.
        let pivot = p
            .iter()
            .chain(x.iter())
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| self.adjacent(u, v)).count())
            .unwrap();
        let todo: Vec<NodeId> = p
            .iter()
            .copied()
            .filter(|&v| !self.adjacent(pivot, v))
            .collect();
        let mut p = p;
        let mut x = x;
        for v in todo {
            let next_p: Vec<NodeId> = p
                .iter()
                .copied()
                .filter(|&u| u != v && self.adjacent(v, u))
                .collect();
            let next_x: Vec<NodeId> = x
                .iter()
                .copied()
                .filter(|&u| self.adjacent(v, u))
                .collect();
            r.push(v);
            self.expand(r, next_p, next_x, out)?;
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
        Ok(())
    }
}

/// Enumerate all maximal cliques (size ≥ 3) of `g`, or only those touching
/// `restrict_to` when given. Seeds are processed on a worker pool; the final
/// index is a deterministic single-threaded reduction.
pub fn enumerate_maximal_cliques(
    g: &Graph,
    restrict_to: Option<&[NodeId]>,
    cap: usize,
    counter: &OpCounter,
) -> Result<CliqueIndex> {
    let seeds: Vec<NodeId> = match restrict_to {
        Some(r) => {
            let mut s = r.to_vec();
            s.sort_unstable();
            s.dedup();
            s
        }
        None => (0..g.n() as NodeId).collect(),
    };
    // Per-seed runs find every maximal clique containing that seed: any
    // extension vertex must be a neighbor, so maximality is global.
    let per_seed: Vec<Result<Vec<Vec<NodeId>>>> = seeds
        .par_iter()
        .map(|&v| {
            let ctx = BkContext { g, cap, counter };
            let mut out = Vec::new();
            let mut r = vec![v];
            let p: Vec<NodeId> = g.neighbors(v).to_vec();
            ctx.expand(&mut r, p, Vec::new(), &mut out)?;
            Ok(out)
        })
        .collect();
    let mut set: BTreeSet<Vec<NodeId>> = BTreeSet::new();
    for chunk in per_seed {
        for c in chunk? {
            set.insert(c);
            if set.len() > cap {
                return Err(Error::Budget(format!("clique count cap {cap} exceeded")));
            }
        }
    }
    let mut cliques: Vec<Vec<NodeId>> = set.into_iter().collect();
    cliques.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
    let mut by_node: Vec<Vec<u32>> = vec![Vec::new(); g.n()];
    for (ci, c) in cliques.iter().enumerate() {
        for &v in c {
            by_node[v as usize].push(ci as u32);
        }
    }
    Ok(CliqueIndex { cliques, by_node })
}

impl CliqueIndex {
    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    pub fn clique(&self, id: usize) -> &[NodeId] {
        &self.cliques[id]
    }

    pub fn cliques(&self) -> &[Vec<NodeId>] {
        &self.cliques
    }

    pub fn cliques_of(&self, v: NodeId) -> &[u32] {
        &self.by_node[v as usize]
    }

    /// Union of all cliques containing `v`, minus `exclude` (sorted). A node
    /// indexed in no clique yields the empty set; callers decide how to
    /// treat such boundary nodes.
    pub fn merged_clique(&self, v: NodeId, exclude: &[NodeId]) -> Vec<NodeId> {
        let ids = self.cliques_of(v);
        let mut out: Vec<NodeId> = Vec::new();
        for &ci in ids {
            out.extend_from_slice(&self.cliques[ci as usize]);
        }
        out.sort_unstable();
        out.dedup();
        out.retain(|m| exclude.binary_search(m).is_err());
        out
    }

    /// The `k` largest cliques fully contained in `community` (sorted),
    /// size-descending, ties by smallest member id. Returns fewer when fewer
    /// exist.
    pub fn top_cliques(&self, community: &[NodeId], k: usize) -> Vec<Vec<NodeId>> {
        let mut inside: Vec<&Vec<NodeId>> = self
            .cliques
            .iter()
            .filter(|c| c.iter().all(|v| community.binary_search(v).is_ok()))
            .collect();
        // The global order is already size desc then lexicographic, which
        // breaks size ties by the smallest member id.
        inside.truncate(k);
        inside.into_iter().cloned().collect()
    }

    /// Count of `sub` nodes not covered by any size-≥3 clique within the
    /// induced subgraph of `sub`. A node is covered iff one of its indexed
    /// cliques intersects `sub` in ≥ 3 nodes.
    pub fn mis_num(&self, sub: &[NodeId]) -> usize {
        sub.iter()
            .filter(|&&v| {
                !self.cliques_of(v).iter().any(|&ci| {
                    self.cliques[ci as usize]
                        .iter()
                        .filter(|u| sub.binary_search(u).is_ok())
                        .count()
                        >= MIN_CLIQUE_SIZE
                })
            })
            .count()
    }

    /// Cache format: `# graph-hash <hex>` header then one clique per line.
    pub fn save_cache(&self, path: &Path, g: &Graph) -> Result<()> {
        let mut out = format!("# graph-hash {:016x}\n", graph_hash(g));
        for c in &self.cliques {
            let line: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            writeln!(out, "{}", line.join(" ")).unwrap();
        }
        std::fs::write(path, out)?;
        Ok(())
    }

    /// Load a cache, rejecting it when the graph hash differs.
    pub fn load_cache(path: &Path, g: &Graph) -> Result<CliqueIndex> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Data(format!("cannot open {}: {e}", path.display())))?;
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Data(format!("{}: empty clique cache", path.display())))?;
        let expect = format!("# graph-hash {:016x}", graph_hash(g));
        if header != expect {
            return Err(Error::Data(format!(
                "{}: stale clique cache (graph hash mismatch)",
                path.display()
            )));
        }
        let mut cliques = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let c: Vec<NodeId> = line
                .split_whitespace()
                .map(|t| {
                    t.parse().map_err(|_| {
                        Error::Data(format!(
                            "{}:{}: malformed node id {t:?}",
                            path.display(),
                            lineno + 2
                        ))
                    })
                })
                .collect::<Result<_>>()?;
            cliques.push(c);
        }
        let mut by_node: Vec<Vec<u32>> = vec![Vec::new(); g.n()];
        for (ci, c) in cliques.iter().enumerate() {
            for &v in c {
                if v as usize >= g.n() {
                    return Err(Error::Data(format!(
                        "{}: clique node {v} outside graph",
                        path.display()
                    )));
                }
                by_node[v as usize].push(ci as u32);
            }
        }
        Ok(CliqueIndex { cliques, by_node })
    }
}

/// FNV-1a over the adjacency structure; stable across runs and platforms.
pub fn graph_hash(g: &Graph) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut mix = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    mix(g.n() as u64);
    for u in 0..g.n() as NodeId {
        for &v in g.neighbors(u) {
            if u < v {
                mix(u as u64);
                mix(v as u64);
            }
        }
    }
    h
}
