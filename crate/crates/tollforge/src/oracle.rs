//! Brute-force enumeration with subset evaluations spread over a thread pool.

use rayon::prelude::*;
use tollforge_core::baselines::{
    better, check_enumeration_budget, optimize_tolls_fixed_set, subsets,
    EnumerationOutcome, SearchOptions, SetSource, TollLinkSet,
};
use tollforge_core::{AssignmentConfig, Demand, Network, TollBox};

use crate::error::{Error, Result};

struct Candidate {
    objective: f64,
    links: Vec<usize>,
    tolls: Vec<f64>,
    exhausted: bool,
    count: usize,
}

fn merge(a: Candidate, b: Candidate) -> Candidate {
    let count = a.count + b.count;
    let exhausted = a.exhausted || b.exhausted;
    let mut best = if better((&b.objective, &b.links), (&a.objective, &a.links)) {
        b
    } else {
        a
    };
    best.count = count;
    best.exhausted = exhausted;
    best
}

/// Same result as the sequential enumeration for any thread count: the
/// reduction keeps the lowest `F`, then the lexicographically smallest set.
#[allow(clippy::too_many_arguments)]
pub fn brute_force(
    net: &Network,
    demand: &Demand,
    kappa: usize,
    budget: u64,
    bounds: &TollBox,
    opts: &SearchOptions,
    cfg: &AssignmentConfig,
    threads: usize,
) -> Result<EnumerationOutcome> {
    let m = net.link_count();
    check_enumeration_budget(m, kappa, budget as u128)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    let sets: Vec<Vec<usize>> = subsets(m, kappa).collect();
    let best = pool.install(|| {
        sets.into_par_iter()
            .map(|links| -> Result<Candidate> {
                let set = TollLinkSet::new(links, SetSource::Enumerated, m)?;
                let r = optimize_tolls_fixed_set(net, demand, &set, bounds, opts, cfg)?;
                Ok(Candidate {
                    objective: r.objective,
                    links: set.links().to_vec(),
                    tolls: r.tolls,
                    exhausted: r.budget_exhausted,
                    count: 1,
                })
            })
            .try_reduce_with(|a, b| Ok(merge(a, b)))
    });
    let best = best.ok_or_else(|| Error::Validation("no subset to evaluate".into()))??;
    Ok(EnumerationOutcome {
        set: TollLinkSet::new(best.links, SetSource::Enumerated, m)?,
        tolls: best.tolls,
        objective: best.objective,
        sets_evaluated: best.count,
        budget_exhausted: best.exhausted,
    })
}
