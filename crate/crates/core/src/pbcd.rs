//! Penalized block coordinate descent for the cardinality-constrained
//! toll problem.
//!
//! The problem is rewritten with an unconstrained copy `z` of the toll vector
//! `u`, and the two coupling constraints (`v` is the `z`-tolled equilibrium,
//! `u = z`) are moved into the objective:
//!
//! ```text
//! Phi_rho(u, z, v) = F(v) + rho1 (f(z, v) - V(z)) + rho2 ||u - z||^2
//! ```
//!
//! [`Pbcd::bcd_solve`] minimizes `Phi_rho` for fixed `rho` by alternating the
//! `(u, v)` block (top-k projection plus one weighted assignment) and the `z`
//! block ([`pg_update`], a Barzilai-Borwein projected gradient on the box).
//! [`Pbcd::solve`] grows `rho` geometrically until the relative gap and the
//! relative `||u - z||` both fall under their tolerances.

use alloc::vec;
use alloc::vec::Vec;

use crate::assign::{solve_assignment, AssignmentConfig, CostMode, PathSet};
use crate::baselines::References;
use crate::cardinality::{project_topk, supp_count};
use crate::cost::{beckmann_potential, total_travel_time};
use crate::error::{Error, Result};
use crate::math::{ceil, dist2, dot, ln, norm2, sqrt};
use crate::network::{Demand, Network, TollBox};
use crate::value::{clamp_gap, ValueOracle};

/// Default initial `rho1` relative to the network time scale.
pub const RHO1_FACTOR: f64 = 1.14;
/// Default initial `rho2` relative to `F(v_ue) / m`.
pub const RHO2_FACTOR: f64 = 1e-3;

/// Penalty weights `(rho1, rho2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Penalty {
    pub rho1: f64,
    pub rho2: f64,
}

/// Parameters of the projected gradient z-step.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PgConfig {
    pub alpha_min: f64,
    pub alpha_max: f64,
    /// Backtracking factor.
    pub eta: f64,
    /// Armijo constant.
    pub sigma: f64,
    /// Stop once `||P_U(z - grad g) - z|| <= tol`.
    pub tol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
}

impl Default for PgConfig {
    fn default() -> Self {
        PgConfig {
            alpha_min: 1e-20,
            alpha_max: 1e20,
            eta: 0.1,
            sigma: 0.01,
            tol: 1e-3,
            max_iter: 100,
            max_backtracks: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PbcdConfig {
    /// Maximum number of tolled links.
    pub kappa: usize,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Relative gap tolerance of the outer loop.
    pub eps1: f64,
    /// Relative `||u - z||` tolerance of the outer loop.
    pub eps2: f64,
    /// Initial `rho1`; `None` means `RHO1_FACTOR` times the network time scale.
    pub rho1: Option<f64>,
    /// Initial `rho2`; `None` means `RHO2_FACTOR * F(v_ue) / m`.
    pub rho2: Option<f64>,
    /// Constant initial toll on every link; `None` picks 1.0 when
    /// `kappa <= 0.2 m` and 0 otherwise.
    pub initial_toll: Option<f64>,
    /// Per-link toll cap as a multiple of the free-flow time.
    pub toll_cap_factor: f64,
    pub max_outer: usize,
    /// BCD rounds per penalty level.
    pub max_inner: usize,
    /// BCD stops when one round decreases `Phi` by at most this fraction.
    pub inner_rel_tol: f64,
    pub pg: PgConfig,
    /// Relative gap for every equilibrium and weighted assignment solve.
    pub ue_tol: f64,
    pub ue_max_iter: usize,
}

impl Default for PbcdConfig {
    fn default() -> Self {
        PbcdConfig {
            kappa: 0,
            gamma1: 1.8,
            gamma2: 5.0,
            eps1: 1e-4,
            eps2: 1e-3,
            rho1: None,
            rho2: None,
            initial_toll: None,
            toll_cap_factor: 50.0,
            max_outer: 60,
            max_inner: 50,
            inner_rel_tol: 1e-6,
            pg: PgConfig::default(),
            ue_tol: 1e-8,
            ue_max_iter: 1000,
        }
    }
}

impl PbcdConfig {
    pub fn with_kappa(kappa: usize) -> Self {
        PbcdConfig {
            kappa,
            ..Self::default()
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.kappa > m {
            return Err(Error::domain(alloc::format!(
                "kappa = {} exceeds the link count {m}",
                self.kappa
            )));
        }
        if !(self.gamma1 > 1.0 && self.gamma2 > 1.0) {
            return Err(Error::domain("penalty growth factors must exceed 1"));
        }
        let positive = [
            self.eps1,
            self.eps2,
            self.inner_rel_tol,
            self.pg.tol,
            self.ue_tol,
            self.pg.alpha_min,
        ];
        if positive.iter().any(|x| !(*x > 0.0)) {
            return Err(Error::domain("tolerances must be positive"));
        }
        if !(self.pg.alpha_max >= self.pg.alpha_min) {
            return Err(Error::domain("alpha_max must not be below alpha_min"));
        }
        if !(self.pg.eta > 0.0 && self.pg.eta < 1.0 && self.pg.sigma > 0.0 && self.pg.sigma < 1.0) {
            return Err(Error::domain("eta and sigma must lie in (0, 1)"));
        }
        if !(self.toll_cap_factor >= 0.0) {
            return Err(Error::domain("toll cap factor must be nonnegative"));
        }
        for r in [self.rho1, self.rho2].into_iter().flatten() {
            if !(r > 0.0) {
                return Err(Error::domain("initial penalties must be positive"));
            }
        }
        if let Some(t) = self.initial_toll {
            if !(t >= 0.0) {
                return Err(Error::domain("initial toll must be nonnegative"));
            }
        }
        Ok(())
    }

    /// The constant initial toll actually used for `m` links.
    pub fn initial_toll_for(&self, m: usize) -> f64 {
        self.initial_toll
            .unwrap_or(if (self.kappa as f64) <= 0.2 * m as f64 { 1.0 } else { 0.0 })
    }
}

/// Outcome of one z-step.
#[derive(Debug, Clone)]
pub struct PgOutcome {
    pub z: Vec<f64>,
    pub iterations: usize,
    /// `||P_U(z - grad g(z)) - z||` at the returned point.
    pub residual: f64,
    pub converged: bool,
    /// The Armijo search ran out of backtracks.
    pub line_search_failed: bool,
}

/// `g(z) = rho1 (f(z, v_r) - V(z)) + rho2 ||z - u_r||^2` and its gradient
/// `rho1 (v_r - S(z)) + 2 rho2 (z - u_r)`.
pub fn z_objective(
    oracle: &mut ValueOracle<'_>,
    rho: Penalty,
    u_r: &[f64],
    v_r: &[f64],
    z: &[f64],
) -> Result<(f64, Vec<f64>)> {
    let f = beckmann_potential(oracle.network(), z, v_r)?;
    let eq = oracle.equilibrium(z)?;
    let g = rho.rho1 * (f - eq.value) + rho.rho2 * dist2(z, u_r);
    let grad = (0..z.len())
        .map(|a| rho.rho1 * (v_r[a] - eq.flows[a]) + 2.0 * rho.rho2 * (z[a] - u_r[a]))
        .collect();
    Ok((g, grad))
}

fn projected_residual(bounds: &TollBox, z: &[f64], grad: &[f64]) -> f64 {
    let mut step: Vec<f64> = z.iter().zip(grad).map(|(x, g)| x - g).collect();
    bounds.project(&mut step);
    sqrt(dist2(&step, z))
}

/// Projected gradient with Barzilai-Borwein initial steps and Armijo
/// backtracking for the z-subproblem, started at `z_start`.
pub fn pg_update(
    oracle: &mut ValueOracle<'_>,
    rho: Penalty,
    u_r: &[f64],
    v_r: &[f64],
    z_start: &[f64],
    bounds: &TollBox,
    cfg: &PgConfig,
) -> Result<PgOutcome> {
    let m = oracle.network().link_count();
    for len in [u_r.len(), v_r.len(), z_start.len(), bounds.len()] {
        if len != m {
            return Err(Error::LengthMismatch { expected: m, got: len });
        }
    }
    let mut z = z_start.to_vec();
    bounds.project(&mut z);
    let (mut g, mut grad) = z_objective(oracle, rho, u_r, v_r, &z)?;
    let mut alpha = 1.0;
    let mut iterations = 0;
    let mut line_search_failed = false;
    loop {
        let residual = projected_residual(bounds, &z, &grad);
        if residual <= cfg.tol || iterations >= cfg.max_iter || line_search_failed {
            return Ok(PgOutcome {
                z,
                iterations,
                residual,
                converged: residual <= cfg.tol,
                line_search_failed,
            });
        }
        iterations += 1;
        let mut tau = alpha;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let mut trial: Vec<f64> = z.iter().zip(&grad).map(|(x, d)| x - tau * d).collect();
            bounds.project(&mut trial);
            let step: Vec<f64> = trial.iter().zip(&z).map(|(a, b)| a - b).collect();
            if step.iter().all(|s| *s == 0.0) {
                break;
            }
            let (g_trial, grad_trial) = z_objective(oracle, rho, u_r, v_r, &trial)?;
            if g_trial <= g + cfg.sigma * dot(&grad, &step) {
                accepted = Some((trial, step, g_trial, grad_trial));
                break;
            }
            tau *= cfg.eta;
        }
        let Some((trial, s, g_trial, grad_trial)) = accepted else {
            log::debug!("z-step line search failed at residual {residual:.3e}");
            line_search_failed = true;
            continue;
        };
        let y: Vec<f64> = grad_trial.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        alpha = if sy <= 0.0 {
            cfg.alpha_max
        } else {
            (dot(&s, &s) / sy).clamp(cfg.alpha_min, cfg.alpha_max)
        };
        z = trial;
        g = g_trial;
        grad = grad_trial;
    }
}

/// One row of the inner (BCD) trace.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InnerRecord {
    pub outer: usize,
    pub inner: usize,
    pub rho1: f64,
    pub rho2: f64,
    pub phi: f64,
    /// `f(z, v) - V(z)`.
    pub gap: f64,
    /// `||u - z||`.
    pub distance: f64,
    pub pg_iterations: usize,
    pub pg_residual: f64,
}

/// One row of the outer trace.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OuterRecord {
    pub outer: usize,
    pub rho1: f64,
    pub rho2: f64,
    pub phi: f64,
    pub gap: f64,
    pub relative_gap: f64,
    pub distance: f64,
    pub relative_distance: f64,
    /// `F` at the `u`-tolled equilibrium.
    pub objective: f64,
    pub inner_iterations: usize,
    /// The next penalty level starts again from the fallback toll.
    pub restarted: bool,
}

#[derive(Debug, Clone)]
pub struct BcdOutcome {
    pub u: Vec<f64>,
    pub z: Vec<f64>,
    pub v: Vec<f64>,
    pub phi: f64,
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Residual of the last z-step.
    pub pg_residual: f64,
    /// Rounds where `Phi` rose by more than the numerical slack.
    pub descent_violations: usize,
}

#[derive(Debug, Clone)]
pub struct PbcdOutcome {
    /// Final cardinality-feasible toll vector `u`.
    pub tolls: Vec<f64>,
    pub z: Vec<f64>,
    /// Flows `v` of the last `(u, v)` subproblem.
    pub flows: Vec<f64>,
    /// Equilibrium flows under `tolls`.
    pub equilibrium_flows: Vec<f64>,
    /// `F` at the `tolls`-tolled equilibrium.
    pub objective: f64,
    pub f_ue: f64,
    pub f_so: f64,
    pub upsilon: f64,
    pub final_penalty: Penalty,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub converged: bool,
    pub relative_gap: f64,
    pub relative_distance: f64,
    pub pg_residual: f64,
    pub descent_violations: usize,
    /// Theoretical outer-iteration bound evaluated with this run's inputs.
    pub iteration_bound: Option<u64>,
    pub inner_trace: Vec<InnerRecord>,
    pub outer_trace: Vec<OuterRecord>,
}

/// Outer-iteration count after which the penalty terms are provably below
/// `eps1` (gap) and `eps2` (distance, squared) given `Phi <= upsilon`.
pub fn iteration_bound(
    upsilon: f64,
    f_lower: f64,
    rho: Penalty,
    gamma1: f64,
    gamma2: f64,
    eps1: f64,
    eps2: f64,
) -> Result<u64> {
    let spread = upsilon - f_lower;
    if !(spread > 0.0) {
        return Err(Error::domain("upsilon must exceed the lower bound on F"));
    }
    if !(rho.rho1 > 0.0 && rho.rho2 > 0.0 && eps1 > 0.0 && eps2 > 0.0) {
        return Err(Error::domain("penalties and tolerances must be positive"));
    }
    if !(gamma1 > 1.0 && gamma2 > 1.0) {
        return Err(Error::domain("growth factors must exceed 1"));
    }
    let k1 = (ln(spread) - ln(eps1 * rho.rho1)) / ln(gamma1) + 1.0;
    let k2 = (ln(spread) - ln(eps2 * eps2 * rho.rho2)) / ln(gamma2) + 1.0;
    Ok(ceil(k1.max(k2)).max(1.0) as u64)
}

/// PBCD solver state for one instance and budget.
pub struct Pbcd<'a> {
    net: &'a Network,
    demand: &'a Demand,
    bounds: TollBox,
    cfg: PbcdConfig,
    oracle: ValueOracle<'a>,
    assign_cfg: AssignmentConfig,
    // warm start for the weighted assignments
    weighted_paths: Option<PathSet>,
    references: Option<References>,
}

impl<'a> Pbcd<'a> {
    pub fn new(net: &'a Network, demand: &'a Demand, cfg: PbcdConfig) -> Result<Self> {
        let bounds = TollBox::proportional(net, cfg.toll_cap_factor);
        Self::with_bounds(net, demand, bounds, cfg)
    }

    pub fn with_bounds(
        net: &'a Network,
        demand: &'a Demand,
        bounds: TollBox,
        cfg: PbcdConfig,
    ) -> Result<Self> {
        cfg.validate(net.link_count())?;
        net.check_len(bounds.len())?;
        let assign_cfg = AssignmentConfig {
            tol: cfg.ue_tol,
            max_iter: cfg.ue_max_iter,
            ..AssignmentConfig::default()
        };
        Ok(Pbcd {
            net,
            demand,
            bounds,
            oracle: ValueOracle::with_config(net, demand, assign_cfg),
            assign_cfg,
            cfg,
            weighted_paths: None,
            references: None,
        })
    }

    /// Reuses precomputed untolled-equilibrium and system-optimum
    /// references instead of solving them in [`Pbcd::solve`].
    pub fn with_references(mut self, refs: References) -> Result<Self> {
        self.net.check_len(refs.v_ue.len())?;
        self.references = Some(refs);
        Ok(self)
    }

    pub fn config(&self) -> &PbcdConfig {
        &self.cfg
    }

    pub fn bounds(&self) -> &TollBox {
        &self.bounds
    }

    pub fn oracle(&mut self) -> &mut ValueOracle<'a> {
        &mut self.oracle
    }

    /// `Phi_rho(u, z, v)`.
    pub fn eval_phi(&mut self, rho: Penalty, u: &[f64], z: &[f64], v: &[f64]) -> Result<f64> {
        let gap = self.oracle.gap(z, v)?;
        Ok(total_travel_time(self.net, v)? + rho.rho1 * gap + rho.rho2 * dist2(u, z))
    }

    /// Minimizes `Phi_rho(., z, .)` over `U_kappa x Omega`; returns `(u, v, Phi)`.
    pub fn solve_uv(&mut self, rho: Penalty, z: &[f64]) -> Result<(Vec<f64>, Vec<f64>, f64)> {
        let u = project_topk(z, self.cfg.kappa)?;
        let mode = CostMode::Weighted { rho1: rho.rho1, z };
        let state = solve_assignment(
            self.net,
            self.demand,
            mode,
            &self.assign_cfg,
            self.weighted_paths.take(),
        )?;
        if !state.converged {
            log::warn!(
                "weighted assignment stopped at relative gap {:.3e}",
                state.relative_gap
            );
        }
        self.weighted_paths = Some(state.paths);
        let phi = self.eval_phi(rho, &u, z, &state.flows)?;
        Ok((u, state.flows, phi))
    }

    /// Block coordinate descent on `Phi_rho` from `z_init`.
    pub fn bcd_solve(
        &mut self,
        z_init: &[f64],
        rho: Penalty,
        outer: usize,
        trace: &mut Vec<InnerRecord>,
    ) -> Result<BcdOutcome> {
        let mut z = z_init.to_vec();
        self.bounds.project(&mut z);
        let (mut u, mut v, mut phi) = self.solve_uv(rho, &z)?;
        let mut gap = self.oracle.gap(&z, &v)?;
        trace.push(InnerRecord {
            outer,
            inner: 0,
            rho1: rho.rho1,
            rho2: rho.rho2,
            phi,
            gap,
            distance: sqrt(dist2(&u, &z)),
            pg_iterations: 0,
            pg_residual: f64::NAN,
        });
        let mut converged = false;
        let mut descent_violations = 0;
        let mut pg_residual = f64::NAN;
        let mut iterations = 0;
        while iterations < self.cfg.max_inner {
            iterations += 1;
            let pg = pg_update(&mut self.oracle, rho, &u, &v, &z, &self.bounds, &self.cfg.pg)?;
            pg_residual = pg.residual;
            let (u_new, v_new, phi_new) = self.solve_uv(rho, &pg.z)?;
            let slack = 1e-9 * phi.abs().max(1.0);
            if phi_new > phi + slack {
                descent_violations += 1;
                log::warn!(
                    "Phi rose from {phi:.12e} to {phi_new:.12e} in BCD round {iterations}"
                );
            }
            let decrease = (phi - phi_new) / phi.abs().max(1.0);
            z = pg.z;
            u = u_new;
            v = v_new;
            phi = phi_new;
            gap = self.oracle.gap(&z, &v)?;
            trace.push(InnerRecord {
                outer,
                inner: iterations,
                rho1: rho.rho1,
                rho2: rho.rho2,
                phi,
                gap,
                distance: sqrt(dist2(&u, &z)),
                pg_iterations: pg.iterations,
                pg_residual: pg.residual,
            });
            log::debug!(
                "  round {iterations}: phi={phi:.9e} gap={gap:.3e} dist={:.3e} pg_iter={} pg_res={:.2e} solves={}",
                sqrt(dist2(&u, &z)),
                pg.iterations,
                pg.residual,
                self.oracle.solves()
            );
            if decrease <= self.cfg.inner_rel_tol {
                converged = true;
                break;
            }
        }
        Ok(BcdOutcome {
            u,
            z,
            v,
            phi,
            gap,
            iterations,
            converged,
            pg_residual,
            descent_violations,
        })
    }

    /// Full penalized outer loop.
    pub fn solve(&mut self) -> Result<PbcdOutcome> {
        let net = self.net;
        let m = net.link_count();
        let zero = vec![0.0; m];

        // fallback: the untolled equilibrium
        let (f_ue, f_so) = match &self.references {
            Some(r) => (r.f_ue, r.f_so),
            None => {
                let v_feas = self.oracle.response(&zero)?;
                let so = crate::assign::solve_so(net, self.demand, &self.assign_cfg)?;
                (total_travel_time(net, &v_feas)?, total_travel_time(net, &so.flows)?)
            }
        };

        let mut rho = Penalty {
            rho1: self.cfg.rho1.unwrap_or(RHO1_FACTOR * net.time_scale()),
            rho2: self
                .cfg
                .rho2
                .unwrap_or(RHO2_FACTOR * f_ue.max(1e-12) / m.max(1) as f64),
        };
        let rho_init = rho;
        let mut z0 = vec![self.cfg.initial_toll_for(m); m];
        self.bounds.project(&mut z0);

        let (_, _, phi0) = self.solve_uv(rho, &z0)?;
        let upsilon = f_ue.max(phi0);
        let bound = iteration_bound(
            upsilon,
            f_so,
            rho,
            self.cfg.gamma1,
            self.cfg.gamma2,
            self.cfg.eps1,
            self.cfg.eps2,
        )
        .ok();
        log::info!(
            "PBCD kappa={} F_ue={f_ue:.6} F_so={f_so:.6} upsilon={upsilon:.6} bound={bound:?}",
            self.cfg.kappa
        );

        let mut inner_trace = Vec::new();
        let mut outer_trace: Vec<OuterRecord> = Vec::new();
        let mut inner_total = 0;
        let mut violations = 0;
        let mut best: Option<(f64, BcdOutcome, Vec<f64>)> = None;
        let mut last: Option<(BcdOutcome, Vec<f64>, f64, f64, f64)> = None;
        let mut converged = false;
        let mut k = 0;
        while k < self.cfg.max_outer {
            k += 1;
            let bcd = self.bcd_solve(&z0, rho, k, &mut inner_trace)?;
            inner_total += bcd.iterations;
            violations += bcd.descent_violations;

            let f = beckmann_potential(net, &bcd.z, &bcd.v)?;
            let rel_gap = clamp_gap(bcd.gap, f).max(0.0) / f.abs().max(1.0);
            let dist = sqrt(dist2(&bcd.u, &bcd.z));
            let rel_dist = dist / norm2(&bcd.u).max(1.0);
            let s_u = self.oracle.response(&bcd.u)?;
            let objective = total_travel_time(net, &s_u)?;
            let done = rel_gap <= self.cfg.eps1 && rel_dist <= self.cfg.eps2;

            let mut restarted = false;
            if !done {
                rho = Penalty {
                    rho1: self.cfg.gamma1 * rho.rho1,
                    rho2: self.cfg.gamma2 * rho.rho2,
                };
                let (_, _, guard) = self.solve_uv(rho, &bcd.z)?;
                if guard <= upsilon {
                    z0 = bcd.z.clone();
                } else {
                    restarted = true;
                    z0 = zero.clone();
                }
            }
            log::info!(
                "outer {k}: rho=({:.3e}, {:.3e}) rel_gap={rel_gap:.3e} rel_dist={rel_dist:.3e} F(S(u))={objective:.6} supp={}{}",
                rho.rho1,
                rho.rho2,
                supp_count(&bcd.u),
                if restarted { " restart" } else { "" }
            );
            let rec_rho = if done {
                rho
            } else {
                Penalty {
                    rho1: rho.rho1 / self.cfg.gamma1,
                    rho2: rho.rho2 / self.cfg.gamma2,
                }
            };
            outer_trace.push(OuterRecord {
                outer: k,
                rho1: rec_rho.rho1,
                rho2: rec_rho.rho2,
                phi: bcd.phi,
                gap: bcd.gap,
                relative_gap: rel_gap,
                distance: dist,
                relative_distance: rel_dist,
                objective,
                inner_iterations: bcd.iterations,
                restarted,
            });
            if best.as_ref().is_none_or(|(f, _, _)| objective < *f) {
                best = Some((objective, bcd.clone(), s_u.clone()));
            }
            last = Some((bcd, s_u, objective, rel_gap, rel_dist));
            if done {
                converged = true;
                break;
            }
        }

        let final_penalty = outer_trace
            .last()
            .map(|r| Penalty { rho1: r.rho1, rho2: r.rho2 })
            .unwrap_or(rho_init);
        let (bcd, s_u, objective, rel_gap, rel_dist) = match (converged, last, best) {
            (true, Some(l), _) => l,
            (false, _, Some((f, b, s))) => {
                let fz = beckmann_potential(net, &b.z, &b.v)?;
                let rg = clamp_gap(b.gap, fz).max(0.0) / fz.abs().max(1.0);
                let rd = sqrt(dist2(&b.u, &b.z)) / norm2(&b.u).max(1.0);
                (b, s, f, rg, rd)
            }
            _ => return Err(Error::domain("PBCD needs at least one outer iteration")),
        };
        Ok(PbcdOutcome {
            tolls: bcd.u,
            z: bcd.z,
            flows: bcd.v,
            equilibrium_flows: s_u,
            objective,
            f_ue,
            f_so,
            upsilon,
            final_penalty,
            outer_iterations: k,
            inner_iterations: inner_total,
            converged,
            relative_gap: rel_gap,
            relative_distance: rel_dist,
            pg_residual: bcd.pg_residual,
            descent_violations: violations,
            iteration_bound: bound,
            inner_trace,
            outer_trace,
        })
    }
}

/// Runs PBCD with the toll box `[0, toll_cap_factor * t0]`.
pub fn pbcd_solve(net: &Network, demand: &Demand, cfg: &PbcdConfig) -> Result<PbcdOutcome> {
    Pbcd::new(net, demand, cfg.clone())?.solve()
}
