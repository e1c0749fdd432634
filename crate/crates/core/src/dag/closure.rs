use super::{Dag, PairSet};

/// Reusable visited bitset that clears only the bits it set.
struct Marks {
    bits: Vec<u64>,
    touched: Vec<usize>,
}

impl Marks {
    fn new(n: usize) -> Self {
        Marks {
            bits: vec![0; n.div_ceil(64)],
            touched: Vec::new(),
        }
    }

    /// Sets bit `i`; returns false if it was already set.
    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        if self.bits[w] & b != 0 {
            return false;
        }
        self.bits[w] |= b;
        self.touched.push(i);
        true
    }

    fn contains(&self, i: usize) -> bool {
        self.bits[i / 64] & (1u64 << (i % 64)) != 0
    }

    fn clear(&mut self) {
        for &i in &self.touched {
            self.bits[i / 64] = 0;
        }
        self.touched.clear();
    }
}

/// Marks everything reachable from the nodes in `starts` (inclusive).
fn reach(adj: &[Vec<usize>], starts: &[usize], marks: &mut Marks, stack: &mut Vec<usize>) {
    stack.clear();
    for &s in starts {
        if marks.insert(s) {
            stack.push(s);
        }
    }
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if marks.insert(v) {
                stack.push(v);
            }
        }
    }
}

/// All `(u, v)` with `u != v` and a directed path `u → … → v`.
pub fn transitive_closure(dag: &Dag) -> PairSet {
    let adj = dag.adjacency();
    let n = dag.node_count();
    let mut marks = Marks::new(n);
    let mut stack = Vec::new();
    let mut pairs = Vec::new();
    for u in 0..n {
        reach(&adj, &adj[u], &mut marks, &mut stack);
        let mut row: Vec<usize> = marks.touched.clone();
        row.sort_unstable();
        pairs.extend(row.into_iter().map(|v| (u, v)));
        marks.clear();
    }
    PairSet::from_unsorted(pairs)
}

/// The minimal edge set with the same closure: edge `(u, v)` survives iff `v`
/// is not reachable from another successor of `u`.
pub fn transitive_reduction(dag: &Dag) -> PairSet {
    let adj = dag.adjacency();
    let n = dag.node_count();
    let mut marks = Marks::new(n);
    let mut stack = Vec::new();
    let mut kept = Vec::new();
    for u in 0..n {
        // Everything reachable in two or more steps from u.
        for &w in &adj[u] {
            reach(&adj, &adj[w], &mut marks, &mut stack);
        }
        kept.extend(adj[u].iter().filter(|&&v| !marks.contains(v)).map(|&v| (u, v)));
        marks.clear();
    }
    PairSet::from_unsorted(kept)
}
