//! Road network, O-D demand and toll bounds.
//!
//! Nodes and links are dense 0-based indices. Link order is the order in
//! which links were supplied, and every per-link vector in the crate uses
//! that order.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};

/// One directed link with BPR parameters `t(v) = t0 * (1 + b * (v / C)^p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Link {
    pub tail: usize,
    pub head: usize,
    pub capacity: f64,
    pub free_flow_time: f64,
    pub b: f64,
    pub power: f64,
}

impl Link {
    pub fn bpr(tail: usize, head: usize, capacity: f64, free_flow_time: f64) -> Self {
        Link {
            tail,
            head,
            capacity,
            free_flow_time,
            b: 0.15,
            power: 4.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Network {
    node_count: usize,
    first_thru_node: usize,
    links: Vec<Link>,
    out_start: Vec<usize>,
    out_links: Vec<usize>,
    time_scale: f64,
}

impl Network {
    /// Builds a network. `first_thru_node` is the dense index of the first
    /// node that paths may pass through (zone centroids below it are only
    /// used as path endpoints); pass 0 when every node is a through node.
    pub fn new(node_count: usize, first_thru_node: usize, links: Vec<Link>) -> Result<Self> {
        for (i, l) in links.iter().enumerate() {
            if l.tail >= node_count || l.head >= node_count {
                return Err(Error::InvalidNetwork(format!(
                    "link {i} references node outside 0..{node_count}"
                )));
            }
            if !(l.capacity > 0.0) || !l.capacity.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "link {i} has nonpositive capacity {}",
                    l.capacity
                )));
            }
            if !(l.free_flow_time >= 0.0) || !l.free_flow_time.is_finite() {
                return Err(Error::InvalidNetwork(format!(
                    "link {i} has negative free-flow time {}",
                    l.free_flow_time
                )));
            }
            if !(l.b >= 0.0) || !(l.power >= 1.0) {
                return Err(Error::InvalidNetwork(format!(
                    "link {i} has BPR parameters b={} p={} (need b >= 0, p >= 1)",
                    l.b, l.power
                )));
            }
        }

        let mut out_start = alloc::vec![0usize; node_count + 1];
        for l in &links {
            out_start[l.tail + 1] += 1;
        }
        for i in 0..node_count {
            out_start[i + 1] += out_start[i];
        }
        let mut fill = out_start.clone();
        let mut out_links = alloc::vec![0usize; links.len()];
        for (i, l) in links.iter().enumerate() {
            out_links[fill[l.tail]] = i;
            fill[l.tail] += 1;
        }

        Ok(Network {
            node_count,
            first_thru_node,
            links,
            out_start,
            out_links,
            time_scale: 1.0,
        })
    }

    /// Sets the factor applied to `sum_a t_a(v_a) v_a` when reporting total
    /// travel time (e.g. `1/60` for minute link times reported in hours).
    pub fn with_time_scale(mut self, scale: f64) -> Self {
        assert!(scale > 0.0 && scale.is_finite(), "time scale must be positive");
        self.time_scale = scale;
        self
    }

    pub fn time_scale(&self) -> f64 {
        self.time_scale
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn first_thru_node(&self) -> usize {
        self.first_thru_node
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, a: usize) -> &Link {
        &self.links[a]
    }

    /// Outgoing link indices of `node`, in input order.
    pub fn outgoing(&self, node: usize) -> &[usize] {
        &self.out_links[self.out_start[node]..self.out_start[node + 1]]
    }

    /// Index of the first link from `tail` to `head`.
    pub fn find_link(&self, tail: usize, head: usize) -> Option<usize> {
        self.outgoing(tail)
            .iter()
            .copied()
            .find(|&a| self.links[a].head == head)
    }

    pub fn mean_free_flow_time(&self) -> f64 {
        if self.links.is_empty() {
            return 0.0;
        }
        self.links.iter().map(|l| l.free_flow_time).sum::<f64>() / self.links.len() as f64
    }

    pub(crate) fn check_len(&self, got: usize) -> Result<()> {
        if got != self.links.len() {
            return Err(Error::LengthMismatch {
                expected: self.links.len(),
                got,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OdPair {
    pub origin: usize,
    pub destination: usize,
    pub demand: f64,
}

/// O-D demand table with pairs grouped by origin. Zero-demand and
/// self-loop entries are dropped on construction.
#[derive(Debug, Clone, Default)]
pub struct Demand {
    pairs: Vec<OdPair>,
    groups: Vec<(usize, Range<usize>)>,
}

impl Demand {
    pub fn new(node_count: usize, pairs: impl IntoIterator<Item = OdPair>) -> Result<Self> {
        let mut kept = Vec::new();
        for p in pairs {
            if p.origin >= node_count || p.destination >= node_count {
                return Err(Error::InvalidDemand(format!(
                    "pair ({}, {}) references node outside 0..{node_count}",
                    p.origin, p.destination
                )));
            }
            if !(p.demand >= 0.0) || !p.demand.is_finite() {
                return Err(Error::InvalidDemand(format!(
                    "pair ({}, {}) has invalid demand {}",
                    p.origin, p.destination, p.demand
                )));
            }
            if p.demand > 0.0 && p.origin != p.destination {
                kept.push(p);
            }
        }
        // stable: destination order within an origin is preserved
        kept.sort_by_key(|p| p.origin);
        let mut groups: Vec<(usize, Range<usize>)> = Vec::new();
        for (i, p) in kept.iter().enumerate() {
            match groups.last_mut() {
                Some((o, r)) if *o == p.origin => r.end = i + 1,
                _ => groups.push((p.origin, i..i + 1)),
            }
        }
        Ok(Demand {
            pairs: kept,
            groups,
        })
    }

    pub fn pairs(&self) -> &[OdPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `(origin, pair index range)` for every origin with positive demand.
    pub fn origins(&self) -> &[(usize, Range<usize>)] {
        &self.groups
    }

    pub fn total(&self) -> f64 {
        self.pairs.iter().map(|p| p.demand).sum()
    }
}

/// Box `U = [0, u_hat]` for link tolls.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TollBox {
    upper: Vec<f64>,
}

impl TollBox {
    pub fn new(upper: Vec<f64>) -> Result<Self> {
        if let Some(a) = upper.iter().position(|u| !(*u >= 0.0)) {
            return Err(Error::domain(format!("toll cap on link {a} is negative")));
        }
        Ok(TollBox { upper })
    }

    /// `u_hat_a = factor * t0_a` for every link.
    pub fn proportional(net: &Network, factor: f64) -> Self {
        TollBox {
            upper: net
                .links()
                .iter()
                .map(|l| factor * l.free_flow_time)
                .collect(),
        }
    }

    pub fn uniform(m: usize, cap: f64) -> Self {
        TollBox {
            upper: alloc::vec![cap; m],
        }
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        z.len() == self.upper.len() && z.iter().zip(&self.upper).all(|(x, u)| *x >= 0.0 && x <= u)
    }

    /// Euclidean projection onto the box, in place.
    pub fn project(&self, z: &mut [f64]) {
        for (x, u) in z.iter_mut().zip(&self.upper) {
            *x = x.clamp(0.0, *u);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn forward_star_groups_by_tail() {
        let net = Network::new(
            3,
            0,
            vec![
                Link::bpr(1, 2, 1.0, 1.0),
                Link::bpr(0, 1, 1.0, 1.0),
                Link::bpr(0, 2, 1.0, 1.0),
            ],
        )
        .unwrap();
        assert_eq!(net.outgoing(0), &[1, 2]);
        assert_eq!(net.outgoing(1), &[0]);
        assert!(net.outgoing(2).is_empty());
        assert_eq!(net.find_link(0, 2), Some(2));
        assert_eq!(net.find_link(2, 0), None);
    }

    #[test]
    fn rejects_bad_capacity() {
        let err = Network::new(2, 0, vec![Link::bpr(0, 1, 0.0, 1.0)]).unwrap_err();
        assert!(matches!(err, Error::InvalidNetwork(_)));
    }

    #[test]
    fn demand_drops_zero_and_groups() {
        let d = Demand::new(
            4,
            vec![
                OdPair { origin: 2, destination: 3, demand: 5.0 },
                OdPair { origin: 0, destination: 1, demand: 0.0 },
                OdPair { origin: 0, destination: 3, demand: 2.0 },
                OdPair { origin: 2, destination: 1, demand: 1.0 },
            ],
        )
        .unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.origins().len(), 2);
        assert_eq!(d.origins()[1], (2, 1..3));
        assert_eq!(d.pairs()[1].destination, 3);
        assert_eq!(d.total(), 8.0);
    }

    #[test]
    fn toll_box_projection() {
        let b = TollBox::uniform(3, 2.0);
        let mut z = vec![-1.0, 1.0, 5.0];
        b.project(&mut z);
        assert_eq!(z, vec![0.0, 1.0, 2.0]);
        assert!(b.contains(&z));
    }
}
