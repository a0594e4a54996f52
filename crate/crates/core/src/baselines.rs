//! Comparison methods: toll-link ranking heuristics, toll-level search on a
//! fixed link set, brute-force enumeration, and the R.E.D. metric.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assign::{solve_so, AssignmentConfig};
use crate::cost::{time_derivative, total_travel_time};
use crate::error::{Error, Result};
use crate::math::{powf, sqrt};
use crate::network::{Demand, Network, TollBox};
use crate::value::ValueOracle;

/// Where a toll link set came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SetSource {
    Pbcd,
    H1,
    H2,
    H3,
    H4,
    Enumerated,
}

/// Ranking heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Rule {
    /// `t'(v_ue) v_ue`.
    H1,
    /// `t'(v_ue) v_ue - t'(v_so) v_so`.
    H2,
    /// `v_ue - v_so`.
    H3,
    /// Most negative `dF/du_a` at the untolled equilibrium.
    H4,
}

impl Rule {
    pub const ALL: [Rule; 4] = [Rule::H1, Rule::H2, Rule::H3, Rule::H4];

    pub fn source(self) -> SetSource {
        match self {
            Rule::H1 => SetSource::H1,
            Rule::H2 => SetSource::H2,
            Rule::H3 => SetSource::H3,
            Rule::H4 => SetSource::H4,
        }
    }
}

impl core::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "h1" => Ok(Rule::H1),
            "h2" => Ok(Rule::H2),
            "h3" => Ok(Rule::H3),
            "h4" => Ok(Rule::H4),
            _ => Err(Error::domain(format!("unknown heuristic `{s}`"))),
        }
    }
}

/// Ordered, duplicate-free list of toll links.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TollLinkSet {
    links: Vec<usize>,
    source: SetSource,
}

impl TollLinkSet {
    pub fn new(links: Vec<usize>, source: SetSource, m: usize) -> Result<Self> {
        if let Some(a) = links.iter().find(|a| **a >= m) {
            return Err(Error::domain(format!("link index {a} out of range 0..{m}")));
        }
        if links.iter().sorted().tuple_windows().any(|(a, b)| a == b) {
            return Err(Error::domain("duplicate link in toll set"));
        }
        Ok(TollLinkSet { links, source })
    }

    /// Support of a toll vector.
    pub fn from_tolls(u: &[f64], source: SetSource) -> Self {
        TollLinkSet {
            links: crate::cardinality::support(u),
            source,
        }
    }

    pub fn links(&self) -> &[usize] {
        &self.links
    }

    pub fn source(&self) -> SetSource {
        self.source
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }
}

/// Untolled equilibrium and system optimum of an instance.
#[derive(Debug, Clone)]
pub struct References {
    pub v_ue: Vec<f64>,
    pub v_so: Vec<f64>,
    pub f_ue: f64,
    pub f_so: f64,
}

impl References {
    pub fn compute(net: &Network, demand: &Demand, cfg: &AssignmentConfig) -> Result<Self> {
        let m = net.link_count();
        let ue = crate::assign::solve_ue(net, demand, &vec![0.0; m], cfg, None)?;
        let so = solve_so(net, demand, cfg)?;
        Ok(References {
            f_ue: total_travel_time(net, &ue.flows)?,
            f_so: total_travel_time(net, &so.flows)?,
            v_ue: ue.flows,
            v_so: so.flows,
        })
    }

    /// R.E.D. of a total travel time against these references.
    pub fn red(&self, f_star: f64) -> Result<f64> {
        red_metric(f_star, self.f_ue, self.f_so)
    }
}

/// Relative excessive delay `(F* - F_so) / (F_ue - F_so)`, clamped to
/// `[0, 1]`.
pub fn red_metric(f_star: f64, f_ue: f64, f_so: f64) -> Result<f64> {
    if !(f_ue > f_so) {
        return Err(Error::Degenerate(format!(
            "F_ue = {f_ue} does not exceed F_so = {f_so}"
        )));
    }
    let r = (f_star - f_so) / (f_ue - f_so);
    if !(0.0..=1.0).contains(&r) {
        log::debug!("R.E.D. {r:.6} outside [0, 1] clamped");
    }
    Ok(r.clamp(0.0, 1.0))
}

// descending score, ties toward the lower index
fn top_by_score(scores: &[(usize, f64)], kappa: usize) -> Vec<usize> {
    let mut s = scores.to_vec();
    s.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    s.into_iter().take(kappa).map(|(a, _)| a).collect()
}

/// `dF(S(u))/du_a` at `u = 0` by finite differences with toll step `delta`.
///
/// Central differences where `delta` leaves the link cost nonnegative
/// (`t0 >= delta`), forward differences otherwise. Each probe is a
/// warm-started equilibrium solve. Non-finite estimates come back as NaN.
pub fn sensitivity_gradient(
    net: &Network,
    demand: &Demand,
    delta: f64,
    cfg: &AssignmentConfig,
) -> Result<Vec<f64>> {
    if !(delta > 0.0) {
        return Err(Error::domain("sensitivity step must be positive"));
    }
    let m = net.link_count();
    let mut oracle = ValueOracle::with_config(net, demand, *cfg);
    let mut u = vec![0.0; m];
    let f0 = total_travel_time(net, &oracle.response(&u)?)?;
    let mut grad = Vec::with_capacity(m);
    for a in 0..m {
        u[a] = delta;
        let plus = total_travel_time(net, &oracle.response(&u)?)?;
        let d = if net.link(a).free_flow_time >= delta {
            u[a] = -delta;
            let minus = total_travel_time(net, &oracle.response(&u)?)?;
            (plus - minus) / (2.0 * delta)
        } else {
            (plus - f0) / delta
        };
        u[a] = 0.0;
        grad.push(if d.is_finite() { d } else { f64::NAN });
    }
    Ok(grad)
}

/// Default H4 step: `1e-3` times the mean free-flow time.
pub fn default_sensitivity_step(net: &Network) -> f64 {
    let t = net.mean_free_flow_time();
    if t > 0.0 {
        1e-3 * t
    } else {
        1e-3
    }
}

/// Candidate links of H1-H3: links whose untolled flow exceeds the
/// system-optimal flow.
pub fn overloaded_links(refs: &References) -> Vec<usize> {
    refs.v_ue
        .iter()
        .zip(&refs.v_so)
        .enumerate()
        .filter(|(_, (ue, so))| **ue - **so > 1e-9 * so.abs().max(1.0))
        .map(|(a, _)| a)
        .collect()
}

/// Picks up to `kappa` toll links with a ranking heuristic.
pub fn heuristic_select(
    net: &Network,
    demand: &Demand,
    kappa: usize,
    rule: Rule,
    refs: &References,
    cfg: &AssignmentConfig,
) -> Result<TollLinkSet> {
    let m = net.link_count();
    net.check_len(refs.v_ue.len())?;
    net.check_len(refs.v_so.len())?;
    if kappa > m {
        return Err(Error::domain(format!("kappa = {kappa} exceeds link count {m}")));
    }
    if kappa == 0 {
        return TollLinkSet::new(Vec::new(), rule.source(), m);
    }
    let scores: Vec<(usize, f64)> = match rule {
        Rule::H4 => {
            let g = sensitivity_gradient(net, demand, default_sensitivity_step(net), cfg)?;
            g.into_iter()
                .enumerate()
                .filter(|(_, d)| d.is_finite())
                .map(|(a, d)| (a, -d))
                .collect()
        }
        _ => {
            let pool = overloaded_links(refs);
            if pool.len() < kappa {
                log::warn!(
                    "{rule:?}: only {} links carry more flow at UE than at SO (kappa = {kappa})",
                    pool.len()
                );
            }
            pool.into_iter()
                .map(|a| {
                    let l = net.link(a);
                    let (ue, so) = (refs.v_ue[a], refs.v_so[a]);
                    let s = match rule {
                        Rule::H1 => time_derivative(l, ue) * ue,
                        Rule::H2 => time_derivative(l, ue) * ue - time_derivative(l, so) * so,
                        _ => ue - so,
                    };
                    (a, s)
                })
                .collect()
        }
    };
    TollLinkSet::new(top_by_score(&scores, kappa), rule.source(), m)
}

/// Budgets and tolerances of the fixed-set toll search.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SearchOptions {
    /// Upper bound on the number of grid points (`G^k <= grid_points`).
    pub grid_points: usize,
    /// Largest per-dimension grid resolution.
    pub max_grid_per_dim: usize,
    /// Extra random starting points for the local search.
    pub starts: usize,
    /// Total objective evaluations (equilibrium solves) for one set. Each
    /// local search gets an even share of what the grid and earlier
    /// searches left over.
    pub max_evaluations: usize,
    /// Uniform samples along each search line before the Brent refinement.
    pub line_samples: usize,
    /// Tolerance on toll coordinates.
    pub xtol: f64,
    /// Relative objective tolerance of the conjugate-direction loop. Keep it
    /// above the noise of an equilibrium solve, or the loop runs on noise.
    pub ftol: f64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            grid_points: 100_000,
            max_grid_per_dim: 101,
            starts: 2,
            max_evaluations: 20_000,
            line_samples: 16,
            xtol: 1e-4,
            ftol: 1e-7,
            seed: 0,
        }
    }
}

impl SearchOptions {
    /// Per-dimension grid size for `k` tolled links. The grid gets at most
    /// half of `max_evaluations` so the local search always runs; when even
    /// two points per axis do not fit, the grid is the single point 0.
    pub fn grid_per_dim(&self, k: usize) -> usize {
        if k == 0 {
            return 1;
        }
        let cap = self.grid_points.min(self.max_evaluations / 2) as f64;
        let mut g = self.max_grid_per_dim.max(2);
        while g > 2 && powf(g as f64, k as f64) > cap {
            g -= 1;
        }
        if powf(g as f64, k as f64) > cap {
            1
        } else {
            g
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixedSetOutcome {
    /// Full-length toll vector, zero off the set.
    pub tolls: Vec<f64>,
    pub objective: f64,
    pub grid_objective: f64,
    pub evaluations: usize,
    /// The total evaluation budget ran out before the last search finished.
    pub budget_exhausted: bool,
}

struct BudgetExhausted;

/// `F(S(u))` restricted to a link set, with an evaluation counter.
struct SetObjective<'o, 'a> {
    oracle: &'o mut ValueOracle<'a>,
    set: &'o [usize],
    full: Vec<f64>,
    evaluations: usize,
    budget: usize,
    /// Evaluation count at which the current search stops (`<= budget`).
    limit: usize,
    best: Option<(f64, Vec<f64>)>,
}

impl SetObjective<'_, '_> {
    fn eval(&mut self, x: &[f64]) -> core::result::Result<Result<f64>, BudgetExhausted> {
        if self.evaluations >= self.limit {
            return Err(BudgetExhausted);
        }
        self.evaluations += 1;
        for (i, &a) in self.set.iter().enumerate() {
            self.full[a] = x[i];
        }
        let f = match self.oracle.response(&self.full) {
            Ok(s) => total_travel_time(self.oracle.network(), &s),
            Err(e) => return Ok(Err(e)),
        };
        if let Ok(f) = f {
            if self.best.as_ref().is_none_or(|(b, _)| f < *b) {
                self.best = Some((f, x.to_vec()));
            }
        }
        Ok(f)
    }
}

// Short-circuits both the budget and solver errors.
macro_rules! eval {
    ($obj:expr, $x:expr) => {
        match $obj.eval($x) {
            Ok(r) => r?,
            Err(BudgetExhausted) => return Ok(None),
        }
    };
}

/// Bounded scalar minimization on `[a, b]` (golden section with parabolic
/// steps). Returns `(t, f(t))`, or `None` when the budget ran out.
fn brent_bounded(
    mut f: impl FnMut(f64) -> core::result::Result<Result<f64>, BudgetExhausted>,
    a: f64,
    b: f64,
    xtol: f64,
) -> Result<Option<(f64, f64)>> {
    const GOLDEN: f64 = 0.381_966_011_250_105_1;
    let (mut a, mut b) = (a, b);
    let mut x = a + GOLDEN * (b - a);
    let (mut w, mut v) = (x, x);
    let mut fx = match f(x) {
        Ok(r) => r?,
        Err(BudgetExhausted) => return Ok(None),
    };
    let (mut fw, mut fv) = (fx, fx);
    let (mut d, mut e): (f64, f64) = (0.0, 0.0);
    for _ in 0..500 {
        let xm = 0.5 * (a + b);
        let tol1 = 1e-10 * x.abs() + xtol / 3.0;
        let tol2 = 2.0 * tol1;
        if (x - xm).abs() <= tol2 - 0.5 * (b - a) {
            break;
        }
        let mut golden = true;
        if e.abs() > tol1 {
            // parabola through x, w, v
            let r = (x - w) * (fx - fv);
            let mut q = (x - v) * (fx - fw);
            let mut p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if q > 0.0 {
                p = -p;
            }
            q = q.abs();
            let etemp = e;
            e = d;
            if p.abs() < (0.5 * q * etemp).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if xm >= x { tol1 } else { -tol1 };
                }
                golden = false;
            }
        }
        if golden {
            e = if x >= xm { a - x } else { b - x };
            d = GOLDEN * e;
        }
        let u = if d.abs() >= tol1 {
            x + d
        } else if d > 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = match f(u) {
            Ok(r) => r?,
            Err(BudgetExhausted) => return Ok(None),
        };
        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            (v, fv) = (w, fw);
            (w, fw) = (x, fx);
            (x, fx) = (u, fu);
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                (v, fv) = (w, fw);
                (w, fw) = (u, fu);
            } else if fu <= fv || v == x || v == w {
                (v, fv) = (u, fu);
            }
        }
    }
    Ok(Some((x, fx)))
}

/// Step range `[lo, hi]` keeping `x + t d` inside `[0, upper]`.
fn step_range(x: &[f64], d: &[f64], upper: &[f64]) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for i in 0..x.len() {
        if d[i] > 0.0 {
            lo = lo.max(-x[i] / d[i]);
            hi = hi.min((upper[i] - x[i]) / d[i]);
        } else if d[i] < 0.0 {
            lo = lo.max((upper[i] - x[i]) / d[i]);
            hi = hi.min(-x[i] / d[i]);
        }
    }
    (lo.min(0.0), hi.max(0.0))
}

/// Line minimization along `d` from `x`; returns the new point and value.
fn line_min(
    obj: &mut SetObjective<'_, '_>,
    x: &[f64],
    fx: f64,
    d: &[f64],
    upper: &[f64],
    xtol: f64,
    samples: usize,
) -> Result<Option<(Vec<f64>, f64)>> {
    let (lo, hi) = step_range(x, d, upper);
    // a zero (or underflowed) direction leaves the range unbounded
    if !(lo.is_finite() && hi.is_finite()) || hi - lo <= 0.0 {
        return Ok(Some((x.to_vec(), fx)));
    }
    let dn = sqrt(d.iter().map(|v| v * v).sum());
    let tol = if dn > 0.0 { xtol / dn } else { xtol };
    let point = |t: f64| -> Vec<f64> {
        x.iter()
            .zip(d)
            .zip(upper)
            .map(|((xi, di), ui)| (xi + t * di).clamp(0.0, *ui))
            .collect()
    };
    // uniform scan to bracket the best basin, then Brent inside the bracket
    let samples = samples.max(2);
    let ts: Vec<f64> = (0..=samples)
        .map(|j| lo + (hi - lo) * j as f64 / samples as f64)
        .collect();
    let (mut best_t, mut best_f) = (0.0, fx);
    let mut best_j = None;
    for (j, &t) in ts.iter().enumerate() {
        let f = eval!(obj, &point(t));
        if f < best_f {
            (best_t, best_f, best_j) = (t, f, Some(j));
        }
    }
    let (a, b) = match best_j {
        Some(j) => (ts[j.saturating_sub(1)], ts[(j + 1).min(samples)]),
        None => {
            // the start point beat every sample; refine around t = 0
            let h = (hi - lo) / samples as f64;
            ((-h).max(lo), h.min(hi))
        }
    };
    let res = brent_bounded(|t| obj.eval(&point(t)), a, b, tol)?;
    Ok(res.map(|(t, ft)| {
        if ft < best_f {
            (point(t), ft)
        } else if best_f < fx {
            (point(best_t), best_f)
        } else {
            (x.to_vec(), fx)
        }
    }))
}

/// Conjugate-direction search (Powell) inside the box, starting at `x0`.
fn powell(
    obj: &mut SetObjective<'_, '_>,
    x0: &[f64],
    upper: &[f64],
    opts: &SearchOptions,
) -> Result<Option<(Vec<f64>, f64)>> {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut fx = eval!(obj, &x);
    let mut dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    for _ in 0..200 {
        let (x_start, f_start) = (x.clone(), fx);
        let (mut big_i, mut big_drop) = (0, 0.0);
        for (i, d) in dirs.iter().enumerate() {
            let before = fx;
            let Some((nx, nf)) = line_min(obj, &x, fx, d, upper, opts.xtol, opts.line_samples)? else {
                return Ok(None);
            };
            x = nx;
            fx = nf;
            if before - fx > big_drop {
                big_drop = before - fx;
                big_i = i;
            }
        }
        let converged =
            2.0 * (f_start - fx) <= opts.ftol * (f_start.abs() + fx.abs()) + 1e-20;
        if converged {
            break;
        }
        let d_new: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| a - b).collect();
        if d_new.iter().all(|v| *v == 0.0) {
            break;
        }
        let ext: Vec<f64> = x
            .iter()
            .zip(&d_new)
            .zip(upper)
            .map(|((xi, di), ui)| (xi + di).clamp(0.0, *ui))
            .collect();
        let fe = eval!(obj, &ext);
        if fe < f_start {
            let t = 2.0 * (f_start - 2.0 * fx + fe) * powf(f_start - fx - big_drop, 2.0)
                - big_drop * powf(f_start - fe, 2.0);
            if t < 0.0 {
                let Some((nx, nf)) = line_min(obj, &x, fx, &d_new, upper, opts.xtol, opts.line_samples)? else {
                    return Ok(None);
                };
                x = nx;
                fx = nf;
                // replace the direction of largest decrease
                dirs[big_i] = dirs[n - 1].clone();
                dirs[n - 1] = d_new;
            }
        }
        // restart on degenerate direction sets
        if dirs.iter().any(|d| d.iter().all(|v| *v == 0.0 || !v.is_finite())) {
            dirs = (0..n)
                .map(|i| {
                    let mut e = vec![0.0; n];
                    e[i] = 1.0;
                    e
                })
                .collect();
        }
    }
    Ok(Some((x, fx)))
}

/// Best toll levels on a fixed link set: a coarse grid over the box, then
/// conjugate-direction searches from the best grid point and from
/// `opts.starts` random points. Each evaluation is an equilibrium solve.
pub fn optimize_tolls_fixed_set(
    net: &Network,
    demand: &Demand,
    set: &TollLinkSet,
    bounds: &TollBox,
    opts: &SearchOptions,
    cfg: &AssignmentConfig,
) -> Result<FixedSetOutcome> {
    let m = net.link_count();
    net.check_len(bounds.len())?;
    let links = set.links();
    let k = links.len();
    let upper: Vec<f64> = links.iter().map(|&a| bounds.upper()[a]).collect();
    let mut oracle = ValueOracle::with_config(net, demand, *cfg);
    let mut obj = SetObjective {
        oracle: &mut oracle,
        set: links,
        full: vec![0.0; m],
        evaluations: 0,
        budget: opts.max_evaluations.max(1),
        limit: opts.max_evaluations.max(1),
        best: None,
    };

    let mut exhausted = false;
    let grid_objective;
    'search: {
        // grid
        let g = opts.grid_per_dim(k);
        let axis = |i: usize, j: usize| -> f64 {
            if g <= 1 {
                0.0
            } else {
                upper[i] * j as f64 / (g - 1) as f64
            }
        };
        let mut idx = vec![0usize; k];
        loop {
            let x: Vec<f64> = (0..k).map(|i| axis(i, idx[i])).collect();
            match obj.eval(&x) {
                Ok(r) => {
                    r?;
                }
                Err(BudgetExhausted) => {
                    exhausted = true;
                    break;
                }
            }
            // odometer increment
            let mut i = 0;
            while i < k {
                idx[i] += 1;
                if idx[i] < g {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
            if i == k {
                break;
            }
        }
        grid_objective = obj.best.as_ref().map(|b| b.0).unwrap_or(f64::INFINITY);
        if exhausted || k == 0 {
            break 'search;
        }

        let mut starts = vec![obj.best.as_ref().map(|b| b.1.clone()).unwrap_or(vec![0.0; k])];
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.starts {
            starts.push(upper.iter().map(|&u| rng.gen::<f64>() * u).collect());
        }
        let n = starts.len();
        for (i, s) in starts.iter().enumerate() {
            obj.limit = obj.evaluations + (obj.budget - obj.evaluations) / (n - i);
            match powell(&mut obj, s, &upper, opts)? {
                Some((_, f)) => {
                    log::debug!("start {i}: F = {f} after {} evaluations", obj.evaluations)
                }
                None if obj.evaluations >= obj.budget => {
                    exhausted = true;
                    break 'search;
                }
                None => log::debug!("start {i} used its share of {} evaluations", obj.evaluations),
            }
        }
    }
    if exhausted {
        log::warn!("toll search on {:?} used its {} evaluations", links, obj.budget);
    }
    let (objective, x) = obj
        .best
        .clone()
        .ok_or_else(|| Error::domain("toll search made no evaluation"))?;
    let mut tolls = vec![0.0; m];
    for (i, &a) in links.iter().enumerate() {
        tolls[a] = x[i];
    }
    Ok(FixedSetOutcome {
        tolls,
        objective,
        grid_objective,
        evaluations: obj.evaluations,
        budget_exhausted: exhausted,
    })
}

/// Number of `kappa`-subsets of `m` links.
pub fn combination_count(m: usize, kappa: usize) -> u128 {
    if kappa > m {
        return 0;
    }
    let k = kappa.min(m - kappa) as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (m as u128 - i) / (i + 1);
    }
    c
}

/// Every `kappa`-subset of `0..m` in lexicographic order.
pub fn subsets(m: usize, kappa: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..m).combinations(kappa)
}

/// Result of a brute-force search.
#[derive(Debug, Clone)]
pub struct EnumerationOutcome {
    pub set: TollLinkSet,
    pub tolls: Vec<f64>,
    pub objective: f64,
    pub sets_evaluated: usize,
    pub budget_exhausted: bool,
}

/// Deterministic reduction: lower `F`, then the lexicographically smaller set.
pub fn better(a: (&f64, &[usize]), b: (&f64, &[usize])) -> bool {
    match a.0.total_cmp(b.0) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => a.1 < b.1,
    }
}

pub fn check_enumeration_budget(m: usize, kappa: usize, budget: u128) -> Result<u128> {
    let count = combination_count(m, kappa);
    if count > budget {
        return Err(Error::OverBudget { count, budget });
    }
    Ok(count)
}

/// Globally best `kappa`-set by enumerating every subset and running
/// [`optimize_tolls_fixed_set`] on each.
pub fn brute_force_cbcp(
    net: &Network,
    demand: &Demand,
    kappa: usize,
    budget: u128,
    bounds: &TollBox,
    opts: &SearchOptions,
    cfg: &AssignmentConfig,
) -> Result<EnumerationOutcome> {
    let m = net.link_count();
    check_enumeration_budget(m, kappa, budget)?;
    let mut best: Option<(f64, TollLinkSet, Vec<f64>)> = None;
    let mut count = 0;
    let mut exhausted = false;
    for links in subsets(m, kappa) {
        let set = TollLinkSet::new(links, SetSource::Enumerated, m)?;
        let r = optimize_tolls_fixed_set(net, demand, &set, bounds, opts, cfg)?;
        count += 1;
        exhausted |= r.budget_exhausted;
        let take = match &best {
            None => true,
            Some((f, s, _)) => better((&r.objective, set.links()), (f, s.links())),
        };
        if take {
            best = Some((r.objective, set, r.tolls));
        }
    }
    let (objective, set, tolls) = best.ok_or_else(|| Error::domain("no subset evaluated"))?;
    Ok(EnumerationOutcome {
        set,
        tolls,
        objective,
        sets_evaluated: count,
        budget_exhausted: exhausted,
    })
}
