//! Lower-level value function `V(z) = min_v f(z, v)` and the gap function.
//!
//! `V` is only available through an equilibrium solve. [`ValueOracle`] runs
//! those solves at a tight relative gap, warm-starts each one from the last
//! path set, and caches results keyed on the exact bit pattern of `z`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::assign::{solve_ue, AssignmentConfig, PathSet};
use crate::cost::beckmann_potential;
use crate::error::Result;
use crate::network::{Demand, Network};

/// Relative numerical floor below which a negative gap is treated as zero.
pub const GAP_FLOOR: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct Equilibrium {
    /// `V(z)`.
    pub value: f64,
    /// `S(z)`, the z-tolled equilibrium link flows (also `grad V(z)`).
    pub flows: Vec<f64>,
    pub relative_gap: f64,
}

pub struct ValueOracle<'a> {
    net: &'a Network,
    demand: &'a Demand,
    cfg: AssignmentConfig,
    cache: BTreeMap<Vec<u64>, Equilibrium>,
    capacity: usize,
    warm: Option<PathSet>,
    solves: usize,
    hits: usize,
}

fn key(z: &[f64]) -> Vec<u64> {
    // +0.0 and -0.0 are the same toll
    z.iter().map(|x| if *x == 0.0 { 0 } else { x.to_bits() }).collect()
}

impl<'a> ValueOracle<'a> {
    pub fn new(net: &'a Network, demand: &'a Demand) -> Self {
        Self::with_config(net, demand, AssignmentConfig::with_tol(1e-8))
    }

    pub fn with_config(net: &'a Network, demand: &'a Demand, cfg: AssignmentConfig) -> Self {
        ValueOracle {
            net,
            demand,
            cfg,
            cache: BTreeMap::new(),
            capacity: 1024,
            warm: None,
            solves: 0,
            hits: 0,
        }
    }

    pub fn network(&self) -> &'a Network {
        self.net
    }

    pub fn demand(&self) -> &'a Demand {
        self.demand
    }

    pub fn config(&self) -> &AssignmentConfig {
        &self.cfg
    }

    /// Number of equilibrium solves performed (cache misses).
    pub fn solves(&self) -> usize {
        self.solves
    }

    pub fn cache_hits(&self) -> usize {
        self.hits
    }

    /// Equilibrium at tolls `z`, solved on first request.
    pub fn equilibrium(&mut self, z: &[f64]) -> Result<&Equilibrium> {
        self.net.check_len(z.len())?;
        let k = key(z);
        if self.cache.contains_key(&k) {
            self.hits += 1;
            return Ok(&self.cache[&k]);
        }
        let state = solve_ue(self.net, self.demand, z, &self.cfg, self.warm.take())?;
        self.solves += 1;
        if !state.converged {
            log::warn!(
                "value-function solve hit the iteration cap at relative gap {:.3e}",
                state.relative_gap
            );
        }
        let value = beckmann_potential(self.net, z, &state.flows)?;
        self.warm = Some(state.paths);
        if self.cache.len() >= self.capacity {
            self.cache.clear();
        }
        let eq = Equilibrium {
            value,
            flows: state.flows,
            relative_gap: state.relative_gap,
        };
        Ok(self.cache.entry(k).or_insert(eq))
    }

    /// `V(z)`.
    pub fn value(&mut self, z: &[f64]) -> Result<f64> {
        Ok(self.equilibrium(z)?.value)
    }

    /// `S(z)`.
    pub fn response(&mut self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(self.equilibrium(z)?.flows.clone())
    }

    /// `f(z, v) - V(z)`. Values in `[-GAP_FLOOR * max(1, f), 0)` are clamped
    /// to zero; anything more negative is returned as is (and logged).
    pub fn gap(&mut self, z: &[f64], v: &[f64]) -> Result<f64> {
        let f = beckmann_potential(self.net, z, v)?;
        let value = self.value(z)?;
        Ok(clamp_gap(f - value, f))
    }
}

pub(crate) fn clamp_gap(raw: f64, scale: f64) -> f64 {
    let floor = GAP_FLOOR * scale.abs().max(1.0);
    if raw >= 0.0 {
        raw
    } else if raw >= -floor {
        0.0
    } else {
        log::warn!("gap {raw:.3e} below numerical floor {:.3e}", -floor);
        raw
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{Link, OdPair};
    use alloc::vec;

    fn two_route() -> (Network, Demand) {
        let net = Network::new(
            2,
            0,
            vec![Link::bpr(0, 1, 10.0, 1.0), Link::bpr(0, 1, 8.0, 1.5)],
        )
        .unwrap();
        let d = Demand::new(2, [OdPair { origin: 0, destination: 1, demand: 20.0 }]).unwrap();
        (net, d)
    }

    #[test]
    fn gap_vanishes_at_equilibrium_and_caches() {
        let (net, d) = two_route();
        let mut o = ValueOracle::new(&net, &d);
        let z = [0.3, 0.0];
        let s = o.response(&z).unwrap();
        assert_eq!(o.gap(&z, &s).unwrap(), 0.0);
        assert_eq!(o.solves(), 1);
        assert!(o.cache_hits() >= 1);
        assert!(o.gap(&z, &[10.0, 10.0]).unwrap() > 0.0);
    }

    #[test]
    fn clamp_rules() {
        assert_eq!(clamp_gap(-1e-9, 1.0), 0.0);
        assert_eq!(clamp_gap(2.0, 1.0), 2.0);
        assert_eq!(clamp_gap(-1.0, 1.0), -1.0);
    }
}
