//! One-to-all shortest paths (label setting, binary heap).

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::network::Network;

pub const NO_LINK: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    dist: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, ties on lower node index
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Shortest path tree rooted at one origin.
#[derive(Debug, Clone, Default)]
pub struct ShortestPathTree {
    origin: usize,
    dist: Vec<f64>,
    pred: Vec<usize>,
    heap: BinaryHeap<Entry>,
}

impl core::fmt::Debug for Entry {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "({}, {})", self.node, self.dist)
    }
}

impl ShortestPathTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Recomputes the tree for `origin` under per-link `cost`.
    pub fn compute(&mut self, net: &Network, cost: &[f64], origin: usize) -> Result<()> {
        net.check_len(cost.len())?;
        if let Some(a) = cost.iter().position(|c| !(*c >= 0.0)) {
            return Err(Error::NegativeCost { link: a, cost: cost[a] });
        }
        let n = net.node_count();
        self.origin = origin;
        self.dist.clear();
        self.dist.resize(n, f64::INFINITY);
        self.pred.clear();
        self.pred.resize(n, NO_LINK);
        self.heap.clear();

        self.dist[origin] = 0.0;
        self.heap.push(Entry { dist: 0.0, node: origin });
        let ftn = net.first_thru_node();
        while let Some(Entry { dist, node }) = self.heap.pop() {
            if dist > self.dist[node] {
                continue;
            }
            if node != origin && node < ftn {
                continue;
            }
            for &a in net.outgoing(node) {
                let head = net.link(a).head;
                let nd = dist + cost[a];
                if nd < self.dist[head] {
                    self.dist[head] = nd;
                    self.pred[head] = a;
                    self.heap.push(Entry { dist: nd, node: head });
                }
            }
        }
        Ok(())
    }

    pub fn origin(&self) -> usize {
        self.origin
    }

    pub fn distance(&self, node: usize) -> f64 {
        self.dist[node]
    }

    pub fn distances(&self) -> &[f64] {
        &self.dist
    }

    /// Link entering `node` on its shortest path, or [`NO_LINK`].
    pub fn predecessor(&self, node: usize) -> usize {
        self.pred[node]
    }

    /// Link sequence from the origin to `dest`.
    pub fn path_to(&self, net: &Network, dest: usize) -> Result<Vec<usize>> {
        if !self.dist[dest].is_finite() {
            return Err(Error::Unreachable {
                origin: self.origin,
                destination: dest,
            });
        }
        let mut links = Vec::new();
        let mut node = dest;
        while node != self.origin {
            let a = self.pred[node];
            links.push(a);
            node = net.link(a).tail;
        }
        links.reverse();
        Ok(links)
    }
}

/// Convenience wrapper returning `(distance, predecessor link)` per node.
pub fn shortest_paths(net: &Network, cost: &[f64], origin: usize) -> Result<Vec<(f64, usize)>> {
    let mut tree = ShortestPathTree::new();
    tree.compute(net, cost, origin)?;
    Ok(tree.dist.iter().copied().zip(tree.pred.iter().copied()).collect())
}
