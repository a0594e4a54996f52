//! Path-based greedy traffic assignment.
//!
//! Every O-D pair keeps a working set of paths with flows. One outer
//! iteration computes a shortest path tree per origin from a consistent
//! flow state (this gives the relative gap and the new columns), then sweeps
//! the pairs and re-balances flow inside each path set with a greedy
//! Newton-type shift: path costs are linearized with diagonal derivatives and
//! the resulting quadratic subproblem over the simplex is solved exactly by
//! sorting. A backtracking guard keeps the potential non-increasing.
//!
//! Link flows are always derived from path flows, so flow conservation holds
//! at every step.

use alloc::vec;
use alloc::vec::Vec;

pub use crate::cost::CostMode;
use crate::error::{Error, Result};
use crate::network::{Demand, Network};
use crate::paths::ShortestPathTree;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Path {
    pub links: Vec<usize>,
    pub flow: f64,
}

/// Working path sets, one per O-D pair in [`Demand::pairs`] order.
#[derive(Debug, Clone, Default, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PathSet {
    pairs: Vec<Vec<Path>>,
}

impl PathSet {
    pub fn pair(&self, w: usize) -> &[Path] {
        &self.pairs[w]
    }

    pub fn pair_count(&self) -> usize {
        self.pairs.len()
    }

    pub fn path_count(&self) -> usize {
        self.pairs.iter().map(Vec::len).sum()
    }

    /// Link flows `v = Delta h`.
    pub fn link_flows(&self, m: usize) -> Vec<f64> {
        let mut v = vec![0.0; m];
        for paths in &self.pairs {
            for p in paths {
                for &a in &p.links {
                    v[a] += p.flow;
                }
            }
        }
        v
    }

    /// Largest `|sum_r h_r - d_w|` over pairs.
    pub fn conservation_error(&self, demand: &Demand) -> f64 {
        self.pairs
            .iter()
            .zip(demand.pairs())
            .map(|(paths, od)| (paths.iter().map(|p| p.flow).sum::<f64>() - od.demand).abs())
            .fold(0.0, f64::max)
    }

    fn matches(&self, demand: &Demand) -> bool {
        self.pairs.len() == demand.len()
            && self.conservation_error(demand) <= 1e-9 * (1.0 + demand.total())
            && self.pairs.iter().all(|p| !p.is_empty())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AssignmentConfig {
    /// Target relative gap.
    pub tol: f64,
    pub max_iter: usize,
    /// Greedy shifts per pair per outer iteration.
    pub max_inner_shifts: usize,
    /// Paths whose flow drops below this are removed.
    pub min_path_flow: f64,
}

impl Default for AssignmentConfig {
    fn default() -> Self {
        AssignmentConfig {
            tol: 1e-8,
            max_iter: 500,
            max_inner_shifts: 40,
            min_path_flow: 1e-12,
        }
    }
}

impl AssignmentConfig {
    pub fn with_tol(tol: f64) -> Self {
        AssignmentConfig {
            tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssignmentState {
    pub flows: Vec<f64>,
    pub paths: PathSet,
    pub relative_gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Potential of the cost mode after each outer iteration.
    pub objective_trace: Vec<f64>,
}

struct Engine<'a> {
    net: &'a Network,
    demand: &'a Demand,
    mode: CostMode<'a>,
    cfg: AssignmentConfig,
    flows: Vec<f64>,
    paths: PathSet,
    cost: Vec<f64>,
    // scratch for a pair shift
    delta: Vec<f64>,
    touched: Vec<usize>,
    mark: Vec<bool>,
}

/// Solves `min sum_a int_0^{v_a} c_a` over the flow polytope.
///
/// `warm` may carry the path set of an earlier solve on the same demand;
/// it is discarded if it does not fit.
pub fn solve_assignment(
    net: &Network,
    demand: &Demand,
    mode: CostMode<'_>,
    cfg: &AssignmentConfig,
    warm: Option<PathSet>,
) -> Result<AssignmentState> {
    if !(cfg.tol > 0.0) {
        return Err(Error::domain("assignment tolerance must be positive"));
    }
    mode.check(net)?;
    let m = net.link_count();
    let mut eng = Engine {
        net,
        demand,
        mode,
        cfg: *cfg,
        flows: vec![0.0; m],
        paths: PathSet::default(),
        cost: vec![0.0; m],
        delta: vec![0.0; m],
        touched: Vec::new(),
        mark: vec![false; m],
    };
    match warm {
        Some(ps) if ps.matches(demand) => {
            eng.paths = ps;
            eng.sync_flows();
        }
        _ => eng.all_or_nothing()?,
    }

    let mut trees: Vec<ShortestPathTree> = Vec::new();
    let mut state_gap;
    let mut iterations = 0;
    let mut converged = false;
    let mut trace = Vec::new();
    loop {
        iterations += 1;
        eng.refresh_costs()?;
        state_gap = eng.measure_gap_and_add_columns(&mut trees)?;
        if state_gap <= cfg.tol {
            converged = true;
            break;
        }
        if iterations >= cfg.max_iter {
            break;
        }
        eng.sweep();
        eng.sync_flows();
        trace.push(eng.mode.objective(net, &eng.flows));
    }
    if trace.is_empty() {
        trace.push(eng.mode.objective(net, &eng.flows));
    }
    if !converged {
        log::debug!(
            "assignment stopped at iteration cap {} with relative gap {:.3e}",
            cfg.max_iter,
            state_gap
        );
    }
    Ok(AssignmentState {
        flows: eng.flows,
        paths: eng.paths,
        relative_gap: state_gap,
        iterations,
        converged,
        objective_trace: trace,
    })
}

/// System-optimal assignment (UE under marginal cost `t + v t'`).
pub fn solve_so(net: &Network, demand: &Demand, cfg: &AssignmentConfig) -> Result<AssignmentState> {
    solve_assignment(net, demand, CostMode::SystemOptimal, cfg, None)
}

/// Tolled user equilibrium.
pub fn solve_ue(
    net: &Network,
    demand: &Demand,
    tolls: &[f64],
    cfg: &AssignmentConfig,
    warm: Option<PathSet>,
) -> Result<AssignmentState> {
    solve_assignment(net, demand, CostMode::Tolled(tolls), cfg, warm)
}

/// Relative gap of a path set under `mode`:
/// `(sum_w sum_r h c - sum_w d_w min c) / sum_w d_w min c`.
pub fn relative_gap(net: &Network, demand: &Demand, mode: CostMode<'_>, paths: &PathSet) -> Result<f64> {
    let v = paths.link_flows(net.link_count());
    let cost: Vec<f64> = (0..net.link_count())
        .map(|a| mode.cost(net, a, v[a].max(0.0)))
        .collect();
    let mut tree = ShortestPathTree::new();
    let (mut total, mut best) = (0.0, 0.0);
    for (origin, range) in demand.origins() {
        tree.compute(net, &cost, *origin)?;
        for w in range.clone() {
            let od = demand.pairs()[w];
            let min = tree.distance(od.destination);
            if !min.is_finite() {
                return Err(Error::Unreachable {
                    origin: od.origin,
                    destination: od.destination,
                });
            }
            best += od.demand * min;
            for p in paths.pair(w) {
                total += p.flow * p.links.iter().map(|&a| cost[a]).sum::<f64>();
            }
        }
    }
    Ok(gap_ratio(total, best))
}

/// Largest relative excess `(c_r - min_w) / min_w` over paths carrying more
/// than `flow_eps` (an epsilon-version of the Wardrop conditions).
pub fn wardrop_violation(
    net: &Network,
    demand: &Demand,
    mode: CostMode<'_>,
    paths: &PathSet,
    flow_eps: f64,
) -> Result<f64> {
    let v = paths.link_flows(net.link_count());
    let cost: Vec<f64> = (0..net.link_count())
        .map(|a| mode.cost(net, a, v[a].max(0.0)))
        .collect();
    let mut tree = ShortestPathTree::new();
    let mut worst: f64 = 0.0;
    for (origin, range) in demand.origins() {
        tree.compute(net, &cost, *origin)?;
        for w in range.clone() {
            let min = tree.distance(demand.pairs()[w].destination);
            for p in paths.pair(w).iter().filter(|p| p.flow > flow_eps) {
                let c: f64 = p.links.iter().map(|&a| cost[a]).sum();
                let excess = if min > 0.0 { (c - min) / min } else { c - min };
                worst = worst.max(excess);
            }
        }
    }
    Ok(worst)
}

fn gap_ratio(total: f64, best: f64) -> f64 {
    if best > 0.0 {
        ((total - best) / best).max(0.0)
    } else {
        (total - best).max(0.0)
    }
}

impl Engine<'_> {
    fn sync_flows(&mut self) {
        self.flows = self.paths.link_flows(self.net.link_count());
    }

    fn refresh_costs(&mut self) -> Result<()> {
        for a in 0..self.net.link_count() {
            let v = self.flows[a].max(0.0);
            let c = self.mode.cost(self.net, a, v);
            if !c.is_finite() {
                return Err(Error::NonMonotoneCost {
                    link: a,
                    derivative: f64::NAN,
                });
            }
            let d = self.mode.derivative(self.net, a, v);
            if d < 0.0 || d.is_nan() {
                return Err(Error::NonMonotoneCost { link: a, derivative: d });
            }
            self.cost[a] = c;
        }
        Ok(())
    }

    fn all_or_nothing(&mut self) -> Result<()> {
        self.refresh_costs()?;
        let mut tree = ShortestPathTree::new();
        let mut pairs = vec![Vec::new(); self.demand.len()];
        for (origin, range) in self.demand.origins() {
            tree.compute(self.net, &self.cost, *origin)?;
            for w in range.clone() {
                let od = self.demand.pairs()[w];
                let links = tree.path_to(self.net, od.destination)?;
                pairs[w].push(Path {
                    links,
                    flow: od.demand,
                });
            }
        }
        self.paths = PathSet { pairs };
        self.sync_flows();
        Ok(())
    }

    /// Shortest paths from the current (consistent) state: returns the
    /// relative gap and adds every new shortest path as a zero-flow column.
    fn measure_gap_and_add_columns(&mut self, trees: &mut Vec<ShortestPathTree>) -> Result<f64> {
        let origins = self.demand.origins();
        if trees.len() < origins.len() {
            trees.resize_with(origins.len(), ShortestPathTree::new);
        }
        let (mut total, mut best) = (0.0, 0.0);
        for (k, (origin, range)) in origins.iter().enumerate() {
            let tree = &mut trees[k];
            tree.compute(self.net, &self.cost, *origin)?;
            for w in range.clone() {
                let od = self.demand.pairs()[w];
                let min = tree.distance(od.destination);
                if !min.is_finite() {
                    return Err(Error::Unreachable {
                        origin: od.origin,
                        destination: od.destination,
                    });
                }
                best += od.demand * min;
                let set = &mut self.paths.pairs[w];
                let mut set_min = f64::INFINITY;
                for p in set.iter() {
                    let c: f64 = p.links.iter().map(|&a| self.cost[a]).sum();
                    total += p.flow * c;
                    set_min = set_min.min(c);
                }
                // only add a column if it improves on the working set
                if min < set_min * (1.0 - 1e-14) {
                    let links = tree.path_to(self.net, od.destination)?;
                    if !set.iter().any(|p| p.links == links) {
                        set.push(Path { links, flow: 0.0 });
                    }
                }
            }
        }
        Ok(gap_ratio(total, best))
    }

    fn sweep(&mut self) {
        for w in 0..self.demand.len() {
            if self.paths.pairs[w].len() < 2 {
                continue;
            }
            for _ in 0..self.cfg.max_inner_shifts {
                if !self.shift_pair(w) {
                    break;
                }
            }
        }
    }

    /// One greedy shift for pair `w`. Returns false when the pair is already
    /// balanced to within a tenth of the target gap or no descent is found.
    fn shift_pair(&mut self, w: usize) -> bool {
        let net = self.net;
        let mode = self.mode;
        let demand = self.demand.pairs()[w].demand;
        let n = self.paths.pairs[w].len();

        // links on every path of the pair carry no flow change, so their
        // curvature is left out of the separable Newton model
        let set = &self.paths.pairs[w];
        let shared = |a: usize| set.iter().all(|p| p.links.contains(&a));
        let mut c = vec![0.0; n];
        let mut s = vec![0.0; n];
        for (i, p) in set.iter().enumerate() {
            for &a in &p.links {
                let v = self.flows[a].max(0.0);
                c[i] += mode.cost(net, a, v);
                if !shared(a) {
                    s[i] += mode.derivative(net, a, v);
                }
            }
        }
        let cmin = c.iter().copied().fold(f64::INFINITY, f64::min);
        let excess = self.paths.pairs[w]
            .iter()
            .zip(&c)
            .filter(|(p, _)| p.flow > 0.0)
            .map(|(_, &ci)| ci - cmin)
            .fold(0.0, f64::max);
        if excess <= 0.1 * self.cfg.tol * cmin.max(f64::MIN_POSITIVE) {
            return false;
        }

        // target flows of the linearized problem
        let h: Vec<f64> = self.paths.pairs[w].iter().map(|p| p.flow).collect();
        let floor = 1e-12;
        for (si, ci) in s.iter_mut().zip(&c) {
            *si = si.max(floor * ci.abs().max(1.0));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| {
            (c[i] - h[i] * s[i])
                .total_cmp(&(c[j] - h[j] * s[j]))
                .then(i.cmp(&j))
        });
        let (mut sum_h, mut sum_cs, mut sum_inv) = (0.0, 0.0, 0.0);
        let mut pi = 0.0;
        for (k, &i) in order.iter().enumerate() {
            sum_h += h[i];
            sum_cs += c[i] / s[i];
            sum_inv += 1.0 / s[i];
            pi = (demand - sum_h + sum_cs) / sum_inv;
            match order.get(k + 1) {
                Some(&j) if pi > c[j] - h[j] * s[j] => continue,
                _ => break,
            }
        }
        // direction in path space, built so that it sums to zero exactly
        // (rounding `h + d` near large flows would otherwise leak a residual
        // that swamps the slope once costs agree to ~1e-9)
        let mut d: Vec<f64> = (0..n)
            .map(|i| ((pi - c[i]) / s[i]).max(-h[i]))
            .collect();
        let big = (0..n)
            .max_by(|&i, &j| h[i].total_cmp(&h[j]).then(j.cmp(&i)))
            .unwrap_or(0);
        let rest: f64 = (0..n).filter(|&i| i != big).map(|i| d[i]).sum();
        d[big] = (-rest).max(-h[big]);
        let slope: f64 = (0..n).map(|i| d[i] * (c[i] - cmin)).sum();
        if !(slope < 0.0) {
            return false;
        }

        // link flow direction for this pair
        for a in self.touched.drain(..) {
            self.mark[a] = false;
            self.delta[a] = 0.0;
        }
        for (i, p) in self.paths.pairs[w].iter().enumerate() {
            if d[i] == 0.0 {
                continue;
            }
            for &a in &p.links {
                if !self.mark[a] {
                    self.mark[a] = true;
                    self.touched.push(a);
                }
                self.delta[a] += d[i];
            }
        }
        let base: f64 = self
            .touched
            .iter()
            .map(|&a| mode.potential(net, a, self.flows[a].max(0.0)))
            .sum();
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial: f64 = self
                .touched
                .iter()
                .map(|&a| mode.potential(net, a, (self.flows[a] + step * self.delta[a]).max(0.0)))
                .sum();
            // a nonpositive slope at the trial point also certifies descent
            // (the potential is convex along the direction) and is immune to
            // cancellation in `trial - base`
            if trial < base || self.slope_at(step) <= 0.0 {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            return false;
        }

        for &a in &self.touched {
            self.flows[a] += step * self.delta[a];
        }
        let set = &mut self.paths.pairs[w];
        for (i, p) in set.iter_mut().enumerate() {
            p.flow = (h[i] + step * d[i]).max(0.0);
        }
        self.tidy_pair(w);
        true
    }

    fn slope_at(&self, step: f64) -> f64 {
        self.touched
            .iter()
            .map(|&a| {
                let v = (self.flows[a] + step * self.delta[a]).max(0.0);
                self.mode.cost(self.net, a, v) * self.delta[a]
            })
            .sum()
    }

    /// Drops negligible paths and restores `sum_r h_r = d_w` exactly on the
    /// largest path.
    fn tidy_pair(&mut self, w: usize) {
        let demand = self.demand.pairs()[w].demand;
        let min_flow = self.cfg.min_path_flow;
        let set = &mut self.paths.pairs[w];
        let mut i = 0;
        while i < set.len() {
            if set.len() > 1 && set[i].flow < min_flow {
                for &a in &set[i].links {
                    self.flows[a] -= set[i].flow;
                }
                set.swap_remove(i);
            } else {
                i += 1;
            }
        }
        let big = (0..set.len())
            .max_by(|&i, &j| set[i].flow.total_cmp(&set[j].flow).then(j.cmp(&i)))
            .unwrap_or(0);
        let others: f64 = set
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != big)
            .map(|(_, p)| p.flow)
            .sum();
        let fixed = (demand - others).max(0.0);
        let change = fixed - set[big].flow;
        set[big].flow = fixed;
        for &a in &set[big].links {
            self.flows[a] += change;
        }
    }
}
