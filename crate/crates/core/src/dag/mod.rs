//! Graph ingestion and dataset construction.
//!
//! Edges are stored as `(child, parent)` id pairs, meaning "child is-a parent";
//! the transitive closure of that relation is what the embeddings learn.

mod closure;
mod pairs;
mod split;
pub mod synth;

use std::collections::HashMap;

pub use closure::{transitive_closure, transitive_reduction};
pub use pairs::PairSet;
pub use split::{read_manifest, split_dataset, write_manifest, DagDataset, SplitParams};

use crate::error::{Error, Result};

/// A validated directed acyclic graph with dense node ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    node_names: Vec<String>,
    edges: Vec<(usize, usize)>,
}

impl Dag {
    /// Builds a DAG, deduplicating edges and rejecting self-loops and cycles.
    pub fn new(node_names: Vec<String>, mut edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = node_names.len();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::IndexOutOfRange {
                    index: u.max(v),
                    len: n,
                });
            }
            if u == v {
                return Err(Error::SelfLoop(node_names[u].clone()));
            }
        }
        edges.sort_unstable();
        edges.dedup();
        let dag = Dag { node_names, edges };
        if let Some((u, v)) = dag.find_back_edge() {
            return Err(Error::Cycle {
                child: dag.node_names[u].clone(),
                parent: dag.node_names[v].clone(),
            });
        }
        Ok(dag)
    }

    pub fn node_count(&self) -> usize {
        self.node_names.len()
    }

    pub fn node_names(&self) -> &[String] {
        &self.node_names
    }

    pub fn name(&self, id: usize) -> &str {
        &self.node_names[id]
    }

    /// Sorted, deduplicated `(child, parent)` pairs.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn name_index(&self) -> HashMap<&str, usize> {
        self.node_names
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect()
    }

    /// Out-neighbour lists (child → parents).
    pub(crate) fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
        }
        adj
    }

    /// Iterative three-colour DFS; returns an edge closing a cycle, if any.
    fn find_back_edge(&self) -> Option<(usize, usize)> {
        const WHITE: u8 = 0;
        const GREY: u8 = 1;
        const BLACK: u8 = 2;
        let adj = self.adjacency();
        let mut colour = vec![WHITE; self.node_count()];
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for root in 0..self.node_count() {
            if colour[root] != WHITE {
                continue;
            }
            colour[root] = GREY;
            stack.push((root, 0));
            while let Some(&mut (u, ref mut next)) = stack.last_mut() {
                if let Some(&v) = adj[u].get(*next) {
                    *next += 1;
                    match colour[v] {
                        WHITE => {
                            colour[v] = GREY;
                            stack.push((v, 0));
                        }
                        GREY => return Some((u, v)),
                        _ => {}
                    }
                } else {
                    colour[u] = BLACK;
                    stack.pop();
                }
            }
        }
        None
    }

    /// Every edge flipped; names and ids preserved.
    pub fn reverse(&self) -> Dag {
        let mut edges: Vec<(usize, usize)> = self.edges.iter().map(|&(u, v)| (v, u)).collect();
        edges.sort_unstable();
        Dag {
            node_names: self.node_names.clone(),
            edges,
        }
    }

    /// One `child<TAB>parent` line per edge.
    pub fn to_tsv(&self) -> String {
        pairs_to_tsv(&self.node_names, &self.edges)
    }
}

pub(crate) fn pairs_to_tsv(names: &[String], pairs: &[(usize, usize)]) -> String {
    let mut out = String::new();
    for &(u, v) in pairs {
        out.push_str(&names[u]);
        out.push('\t');
        out.push_str(&names[v]);
        out.push('\n');
    }
    out
}

/// Parses `child<TAB>parent` lines. Blank lines and lines starting with `#`
/// are skipped; ids follow first appearance.
pub fn parse_edge_list(text: &str) -> Result<Dag> {
    let mut names: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 2 || fields.iter().any(|f| f.is_empty()) {
            return Err(Error::Parse {
                line: lineno + 1,
                message: format!(
                    "expected exactly 2 non-empty tab-separated fields, found {}",
                    fields.len()
                ),
            });
        }
        let mut id = |name: &str| -> usize {
            if let Some(&i) = index.get(name) {
                return i;
            }
            names.push(name.to_string());
            index.insert(name.to_string(), names.len() - 1);
            names.len() - 1
        };
        let child = id(fields[0]);
        let parent = id(fields[1]);
        edges.push((child, parent));
    }
    Dag::new(names, edges)
}
