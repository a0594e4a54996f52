//! The operations behind each CLI subcommand, usable without the binary.

use std::time::Instant;

use tollforge_core::assign::solve_ue;
use tollforge_core::baselines::{
    heuristic_select, optimize_tolls_fixed_set, References, Rule, SearchOptions,
};
use tollforge_core::cost::total_travel_time;
use tollforge_core::pbcd::{Pbcd, PbcdOutcome};
use tollforge_core::{AssignmentConfig, AssignmentState, TollBox};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::oracle::brute_force;
use crate::report::{Method, SolveReport, SweepRow};
use crate::tolls::toll_rows;

/// Process-level run settings shared by every command.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    /// Worker threads for brute-force enumeration.
    pub threads: usize,
    /// Single thread, and wall times reported as 0 so reports are byte-identical.
    pub deterministic: bool,
    /// Overrides the search seed of the config when set.
    pub seed: Option<u64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            threads: std::thread::available_parallelism().map_or(1, |n| n.get()),
            deterministic: false,
            seed: None,
        }
    }
}

impl RunOptions {
    pub fn deterministic(seed: u64) -> Self {
        RunOptions {
            threads: 1,
            deterministic: true,
            seed: Some(seed),
        }
    }

    fn threads(&self) -> usize {
        if self.deterministic {
            1
        } else {
            self.threads.max(1)
        }
    }

    fn elapsed(&self, start: Instant) -> f64 {
        if self.deterministic {
            0.0
        } else {
            start.elapsed().as_secs_f64()
        }
    }

    fn search(&self, cfg: &Config) -> SearchOptions {
        let mut s = cfg.search;
        if let Some(seed) = self.seed {
            s.seed = seed;
        }
        s
    }
}

/// Applies the configured time scale to an instance.
pub fn prepare(mut inst: Instance, cfg: &Config) -> Result<Instance> {
    cfg.validate()?;
    inst.network = inst.network.with_time_scale(cfg.time_scale);
    Ok(inst)
}

pub fn references(inst: &Instance, cfg: &Config) -> Result<References> {
    Ok(References::compute(
        &inst.network,
        &inst.demand,
        &cfg.assignment.to_config(),
    )?)
}

fn bounds(inst: &Instance, cfg: &Config) -> TollBox {
    TollBox::proportional(&inst.network, cfg.pbcd.toll_cap_factor)
}

/// Equilibrium under `tolls` (all zero when absent) at relative gap `tol`.
pub fn solve_ue_report(
    inst: &Instance,
    tolls: Option<&[f64]>,
    tol: f64,
    cfg: &Config,
    run: &RunOptions,
) -> Result<(SolveReport, AssignmentState)> {
    let start = Instant::now();
    let m = inst.network.link_count();
    let zero = vec![0.0; m];
    let tolls = tolls.unwrap_or(&zero);
    if tolls.len() != m {
        return Err(Error::Validation(format!(
            "toll vector has {} entries for {m} links",
            tolls.len()
        )));
    }
    let acfg = AssignmentConfig {
        tol,
        ..cfg.assignment.to_config()
    };
    let state = solve_ue(&inst.network, &inst.demand, tolls, &acfg, None)?;
    let refs = references(inst, cfg)?;
    let objective = total_travel_time(&inst.network, &state.flows)?;
    let mut report = SolveReport::new(
        &inst.name,
        None,
        Method::Ue,
        toll_rows(&inst.raw_network, tolls),
        objective,
        refs.f_ue,
        refs.f_so,
    )?;
    report.inner_iterations = state.iterations;
    report.converged = state.converged;
    report.relative_gap = Some(state.relative_gap);
    report.wall_time_s = run.elapsed(start);
    Ok((report, state))
}

/// PBCD for one `kappa`. Pass `refs` to skip the reference solves.
pub fn solve_cbcp(
    inst: &Instance,
    kappa: usize,
    refs: Option<References>,
    cfg: &Config,
    run: &RunOptions,
) -> Result<(SolveReport, PbcdOutcome)> {
    let start = Instant::now();
    let mut pcfg = cfg.pbcd.clone();
    pcfg.kappa = kappa;
    let out = if cfg.rho1_starts.is_empty() {
        let mut solver = Pbcd::new(&inst.network, &inst.demand, pcfg)?;
        if let Some(r) = refs {
            solver = solver.with_references(r)?;
        }
        solver.solve()?
    } else {
        let refs = match refs {
            Some(r) => r,
            None => references(inst, cfg)?,
        };
        let mut best: Option<PbcdOutcome> = None;
        for &rho1 in &cfg.rho1_starts {
            pcfg.rho1 = Some(rho1);
            let out = Pbcd::new(&inst.network, &inst.demand, pcfg.clone())?
                .with_references(refs.clone())?
                .solve()?;
            log::info!("kappa = {kappa}, rho1 = {rho1}: F = {}", out.objective);
            if best.as_ref().is_none_or(|b| out.objective < b.objective) {
                best = Some(out);
            }
        }
        best.expect("rho1_starts is nonempty")
    };
    let mut report = SolveReport::new(
        &inst.name,
        Some(kappa),
        Method::Pbcd,
        toll_rows(&inst.raw_network, &out.tolls),
        out.objective,
        out.f_ue,
        out.f_so,
    )?;
    report.outer_iterations = out.outer_iterations;
    report.inner_iterations = out.inner_iterations;
    report.converged = out.converged;
    report.relative_gap = Some(out.relative_gap);
    report.wall_time_s = run.elapsed(start);
    Ok((report, out))
}

/// PBCD over several `kappa` values sharing one pair of reference solves.
/// A failing `kappa` is recorded in its row and the sweep goes on.
pub fn sweep(inst: &Instance, kappas: &[usize], cfg: &Config, run: &RunOptions) -> Result<Vec<SweepRow>> {
    let refs = references(inst, cfg)?;
    let mut rows = Vec::with_capacity(kappas.len());
    for &kappa in kappas {
        let start = Instant::now();
        let row = match solve_cbcp(inst, kappa, Some(refs.clone()), cfg, run) {
            Ok((r, _)) => SweepRow {
                kappa,
                red: Some(r.red),
                objective: Some(r.objective),
                cpu_time_s: r.wall_time_s,
                converged: Some(r.converged),
                outer_iterations: Some(r.outer_iterations),
                inner_iterations: Some(r.inner_iterations),
                tolled_links: Some(r.tolls.len()),
                error: None,
            },
            Err(e) => {
                log::warn!("kappa = {kappa}: {e}");
                SweepRow {
                    kappa,
                    red: None,
                    objective: None,
                    cpu_time_s: run.elapsed(start),
                    converged: None,
                    outer_iterations: None,
                    inner_iterations: None,
                    tolled_links: None,
                    error: Some(e.to_string()),
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Ranking heuristic followed by toll search on the selected links.
pub fn baseline(
    inst: &Instance,
    kappa: usize,
    rule: Rule,
    cfg: &Config,
    run: &RunOptions,
) -> Result<SolveReport> {
    let start = Instant::now();
    let acfg = cfg.assignment.to_config();
    let refs = references(inst, cfg)?;
    let set = heuristic_select(&inst.network, &inst.demand, kappa, rule, &refs, &acfg)?;
    let (tolls, objective, evaluations, exhausted) = if set.is_empty() {
        (vec![0.0; inst.network.link_count()], refs.f_ue, 0, false)
    } else {
        let out = optimize_tolls_fixed_set(
            &inst.network,
            &inst.demand,
            &set,
            &bounds(inst, cfg),
            &run.search(cfg),
            &acfg,
        )?;
        (out.tolls, out.objective, out.evaluations, out.budget_exhausted)
    };
    let mut report = SolveReport::new(
        &inst.name,
        Some(kappa),
        rule.into(),
        toll_rows(&inst.raw_network, &tolls),
        objective,
        refs.f_ue,
        refs.f_so,
    )?;
    report.outer_iterations = 1;
    report.inner_iterations = evaluations;
    report.converged = !exhausted;
    report.wall_time_s = run.elapsed(start);
    Ok(report)
}

/// Brute-force enumeration of every `kappa`-set.
pub fn oracle(inst: &Instance, kappa: usize, cfg: &Config, run: &RunOptions) -> Result<SolveReport> {
    let start = Instant::now();
    let acfg = cfg.assignment.to_config();
    let refs = references(inst, cfg)?;
    let out = brute_force(
        &inst.network,
        &inst.demand,
        kappa,
        cfg.oracle.budget,
        &bounds(inst, cfg),
        &run.search(cfg),
        &acfg,
        run.threads(),
    )?;
    let mut report = SolveReport::new(
        &inst.name,
        Some(kappa),
        Method::Oracle,
        toll_rows(&inst.raw_network, &out.tolls),
        out.objective,
        refs.f_ue,
        refs.f_so,
    )?;
    report.outer_iterations = out.sets_evaluated;
    report.converged = !out.budget_exhausted;
    report.wall_time_s = run.elapsed(start);
    Ok(report)
}
