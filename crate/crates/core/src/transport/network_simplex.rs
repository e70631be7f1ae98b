//! Primal network simplex for dense transportation problems.
//!
//! Sources `0..m` ship to sinks `m..m+n` over a complete bipartite set of
//! uncapacitated arcs. The initial basis hangs every node from an extra root
//! through artificial arcs (cost `0` for supply nodes, a big-M cost for demand
//! nodes), which gives a strongly feasible spanning tree. Entering arcs are
//! found by block search and the leaving arc is chosen with Cunningham's rule,
//! so degenerate pivots cannot cycle.
//!
//! Children are kept in doubly linked sibling lists. A pivot re-hangs the
//! stem between the entering and leaving arcs and then refreshes depths and
//! potentials of the moved subtree only, each potential recomputed from its
//! parent rather than shifted, so round-off does not accumulate.

use crate::error::{Error, Result};

const NONE: usize = usize::MAX;

/// Solution of a min-cost transportation problem.
#[derive(Debug, Clone)]
pub(crate) struct FlowSolution {
    /// Row-major `m x n` flows.
    pub flow: Vec<f64>,
    pub pivots: usize,
    /// Mass left on artificial arcs (nonzero only when supplies and demands
    /// are slightly unbalanced).
    pub residual: f64,
}

struct Simplex<'a> {
    m: usize,
    n: usize,
    cost: &'a [f64],
    art_cost: f64,
    /// `true` when the artificial arc of a node points towards the root.
    art_up: Vec<bool>,
    flow: Vec<f64>,
    in_tree: Vec<bool>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    /// Whether `pred[u]` is directed from `u` to `parent[u]`.
    up: Vec<bool>,
    depth: Vec<usize>,
    pi: Vec<f64>,
    first_child: Vec<usize>,
    next_sib: Vec<usize>,
    prev_sib: Vec<usize>,
    stack: Vec<usize>,
}

impl<'a> Simplex<'a> {
    fn real_arcs(&self) -> usize {
        self.m * self.n
    }

    fn root(&self) -> usize {
        self.m + self.n
    }

    #[inline]
    fn source(&self, a: usize) -> usize {
        let ra = self.real_arcs();
        if a < ra {
            a / self.n
        } else if self.art_up[a - ra] {
            a - ra
        } else {
            self.root()
        }
    }

    #[inline]
    fn target(&self, a: usize) -> usize {
        let ra = self.real_arcs();
        if a < ra {
            self.m + a % self.n
        } else if self.art_up[a - ra] {
            self.root()
        } else {
            a - ra
        }
    }

    #[inline]
    fn arc_cost(&self, a: usize) -> f64 {
        let ra = self.real_arcs();
        if a < ra {
            self.cost[a]
        } else if self.art_up[a - ra] {
            0.0
        } else {
            self.art_cost
        }
    }

    fn new(supply: &[f64], demand: &[f64], cost: &'a [f64]) -> Self {
        let (m, n) = (supply.len(), demand.len());
        let nodes = m + n;
        let root = nodes;
        let max_cost = cost.iter().fold(0.0f64, |acc, c| acc.max(c.abs()));
        let art_cost = (max_cost + 1.0) * (nodes as f64 + 1.0);

        let mut s = Self {
            m,
            n,
            cost,
            art_cost,
            art_up: vec![true; nodes],
            flow: vec![0.0; m * n + nodes],
            in_tree: vec![false; m * n],
            parent: vec![root; nodes + 1],
            pred: vec![NONE; nodes + 1],
            up: vec![true; nodes + 1],
            depth: vec![0; nodes + 1],
            pi: vec![0.0; nodes + 1],
            first_child: vec![NONE; nodes + 1],
            next_sib: vec![NONE; nodes + 1],
            prev_sib: vec![NONE; nodes + 1],
            stack: Vec::with_capacity(nodes + 1),
        };
        s.parent[root] = NONE;
        for u in 0..nodes {
            let b = if u < m { supply[u] } else { -demand[u - m] };
            let a = m * n + u;
            s.pred[u] = a;
            s.art_up[u] = b >= 0.0;
            s.up[u] = b >= 0.0;
            s.flow[a] = b.abs();
            s.attach(u, root);
        }
        s.refresh_subtree(root);
        s
    }

    fn attach(&mut self, u: usize, p: usize) {
        let head = self.first_child[p];
        self.next_sib[u] = head;
        self.prev_sib[u] = NONE;
        if head != NONE {
            self.prev_sib[head] = u;
        }
        self.first_child[p] = u;
    }

    fn detach(&mut self, u: usize, p: usize) {
        let (prev, next) = (self.prev_sib[u], self.next_sib[u]);
        if prev == NONE {
            self.first_child[p] = next;
        } else {
            self.next_sib[prev] = next;
        }
        if next != NONE {
            self.prev_sib[next] = prev;
        }
    }

    fn set_from_parent(&mut self, c: usize) {
        let p = self.parent[c];
        let c_cost = self.arc_cost(self.pred[c]);
        self.pi[c] = if self.up[c] {
            self.pi[p] - c_cost
        } else {
            self.pi[p] + c_cost
        };
        self.depth[c] = self.depth[p] + 1;
    }

    /// Recomputes depths and potentials below `top` (and of `top` itself
    /// unless it is the root).
    fn refresh_subtree(&mut self, top: usize) {
        if top == self.root() {
            self.depth[top] = 0;
            self.pi[top] = 0.0;
        } else {
            self.set_from_parent(top);
        }
        self.stack.clear();
        self.stack.push(top);
        while let Some(p) = self.stack.pop() {
            let mut c = self.first_child[p];
            while c != NONE {
                self.set_from_parent(c);
                self.stack.push(c);
                c = self.next_sib[c];
            }
        }
    }

    #[inline]
    fn reduced_cost(&self, a: usize) -> f64 {
        self.cost[a] + self.pi[a / self.n] - self.pi[self.m + a % self.n]
    }

    fn find_entering(&self, next_arc: &mut usize, block: usize, eps: f64) -> Option<usize> {
        let total = self.real_arcs();
        let mut best = None;
        let mut min = -eps;
        let mut count = 0;
        let start = *next_arc;
        for step in 0..total {
            let a = (start + step) % total;
            if !self.in_tree[a] {
                let c = self.reduced_cost(a);
                if c < min {
                    min = c;
                    best = Some(a);
                }
            }
            count += 1;
            if count == block {
                if best.is_some() {
                    *next_arc = (a + 1) % total;
                    return best;
                }
                count = 0;
            }
        }
        if let Some(a) = best {
            *next_arc = (a + 1) % total;
        }
        best
    }

    fn pivot(&mut self, in_arc: usize) -> Result<()> {
        let first = self.source(in_arc);
        let second = self.target(in_arc);

        let (mut u, mut v) = (first, second);
        while u != v {
            if self.depth[u] > self.depth[v] {
                u = self.parent[u];
            } else {
                v = self.parent[v];
            }
        }
        let join = u;

        // Cunningham's rule: the last blocking arc in cycle orientation.
        let mut delta = f64::INFINITY;
        let mut u_out = NONE;
        let mut on_first = false;
        let mut u = first;
        while u != join {
            if self.up[u] {
                let d = self.flow[self.pred[u]];
                if d < delta {
                    delta = d;
                    u_out = u;
                    on_first = true;
                }
            }
            u = self.parent[u];
        }
        let mut u = second;
        while u != join {
            if !self.up[u] {
                let d = self.flow[self.pred[u]];
                if d <= delta {
                    delta = d;
                    u_out = u;
                    on_first = false;
                }
            }
            u = self.parent[u];
        }
        if u_out == NONE {
            return Err(Error::InvalidConfig("unbounded transportation problem".into()));
        }

        if delta > 0.0 {
            self.flow[in_arc] += delta;
            let mut u = first;
            while u != join {
                let a = self.pred[u];
                if self.up[u] {
                    self.flow[a] -= delta;
                } else {
                    self.flow[a] += delta;
                }
                u = self.parent[u];
            }
            let mut u = second;
            while u != join {
                let a = self.pred[u];
                if self.up[u] {
                    self.flow[a] += delta;
                } else {
                    self.flow[a] -= delta;
                }
                u = self.parent[u];
            }
        }
        let out_arc = self.pred[u_out];
        self.flow[out_arc] = 0.0;
        if out_arc < self.real_arcs() {
            self.in_tree[out_arc] = false;
        }
        self.in_tree[in_arc] = true;

        let (u_in, v_in) = if on_first { (first, second) } else { (second, first) };

        // Reverse the stem between u_in and u_out.
        let mut stem = u_in;
        let mut new_parent = v_in;
        let mut new_pred = in_arc;
        let mut new_up = u_in == self.source(in_arc);
        loop {
            let old_parent = self.parent[stem];
            let old_pred = self.pred[stem];
            let old_up = self.up[stem];
            self.detach(stem, old_parent);
            self.parent[stem] = new_parent;
            self.pred[stem] = new_pred;
            self.up[stem] = new_up;
            self.attach(stem, new_parent);
            if stem == u_out {
                break;
            }
            new_parent = stem;
            new_pred = old_pred;
            new_up = !old_up;
            stem = old_parent;
        }
        self.refresh_subtree(u_in);
        Ok(())
    }
}

/// Minimizes `sum cost[i][j] * x[i][j]` subject to row sums `supply` and
/// column sums `demand`. The two totals must agree up to round-off.
pub(crate) fn solve(supply: &[f64], demand: &[f64], cost: &[f64]) -> Result<FlowSolution> {
    let (m, n) = (supply.len(), demand.len());
    debug_assert_eq!(cost.len(), m * n);
    let mut simplex = Simplex::new(supply, demand, cost);

    let arcs = m * n;
    let block = ((arcs as f64).sqrt().ceil() as usize).max(10).min(arcs.max(1));
    let eps = 64.0 * f64::EPSILON * simplex.art_cost;
    let limit = 50 * (arcs + m + n) + 10_000;
    let mut next_arc = 0;
    let mut pivots = 0;
    while let Some(a) = simplex.find_entering(&mut next_arc, block, eps) {
        if pivots == limit {
            return Err(Error::PivotLimit(limit));
        }
        simplex.pivot(a)?;
        pivots += 1;
    }

    let residual = simplex.flow[arcs..].iter().sum();
    simplex.flow.truncate(arcs);
    Ok(FlowSolution {
        flow: simplex.flow,
        pivots,
        residual,
    })
}
