//! Link performance, objectives and generalized link costs.

use alloc::format;

use crate::error::{Error, Result};
use crate::math::powf;
use crate::network::{Link, Network};

#[inline]
pub(crate) fn time(l: &Link, v: f64) -> f64 {
    l.free_flow_time * (1.0 + l.b * powf(v / l.capacity, l.power))
}

#[inline]
pub(crate) fn time_derivative(l: &Link, v: f64) -> f64 {
    if l.b == 0.0 {
        return 0.0;
    }
    let p = l.power;
    l.free_flow_time * l.b * p * powf(v / l.capacity, p - 1.0) / l.capacity
}

#[inline]
pub(crate) fn time_second_derivative(l: &Link, v: f64) -> f64 {
    let p = l.power;
    if l.b == 0.0 || p == 1.0 {
        return 0.0;
    }
    if v == 0.0 && p < 2.0 {
        // unbounded curvature at the origin; the Newton denominator only
        // needs a nonnegative value here
        return 0.0;
    }
    l.free_flow_time * l.b * p * (p - 1.0) * powf(v / l.capacity, p - 2.0)
        / (l.capacity * l.capacity)
}

/// `int_0^v t(x) dx` in closed form.
#[inline]
pub(crate) fn time_integral(l: &Link, v: f64) -> f64 {
    let p = l.power;
    l.free_flow_time * (v + l.b * v * powf(v / l.capacity, p) / (p + 1.0))
}

fn check_flow(a: usize, v: f64) -> Result<()> {
    if !(v >= 0.0) {
        return Err(Error::domain(format!("negative flow {v} on link {a}")));
    }
    Ok(())
}

impl Network {
    /// BPR travel time of link `a` at flow `v`.
    pub fn bpr_time(&self, a: usize, v: f64) -> Result<f64> {
        check_flow(a, v)?;
        Ok(time(self.link(a), v))
    }

    /// `dt_a/dv` at flow `v`.
    pub fn bpr_time_derivative(&self, a: usize, v: f64) -> Result<f64> {
        check_flow(a, v)?;
        Ok(time_derivative(self.link(a), v))
    }

    pub fn bpr_time_integral(&self, a: usize, v: f64) -> Result<f64> {
        check_flow(a, v)?;
        Ok(time_integral(self.link(a), v))
    }
}

/// `F(v) = sum_a t_a(v_a) v_a`, multiplied by the network's time scale.
pub fn total_travel_time(net: &Network, v: &[f64]) -> Result<f64> {
    net.check_len(v.len())?;
    let raw: f64 = net
        .links()
        .iter()
        .zip(v)
        .map(|(l, &x)| time(l, x.max(0.0)) * x)
        .sum();
    Ok(raw * net.time_scale())
}

/// Lower-level objective `f(u, v) = sum_a [int_0^{v_a} t_a + u_a v_a]`.
pub fn beckmann_potential(net: &Network, u: &[f64], v: &[f64]) -> Result<f64> {
    net.check_len(v.len())?;
    net.check_len(u.len())?;
    Ok(net
        .links()
        .iter()
        .zip(u.iter().zip(v))
        .map(|(l, (&toll, &x))| time_integral(l, x.max(0.0)) + toll * x)
        .sum())
}

/// Link cost functions the assignment engine can equilibrate.
#[derive(Debug, Clone, Copy)]
pub enum CostMode<'a> {
    /// Plain user equilibrium with link tolls: `c = t + u`.
    Tolled(&'a [f64]),
    /// Weighted upper/lower objective `F(v) + rho1 f(z, v)`:
    /// `c = s (t + v t') + rho1 (t + z)` where `s` is the network time scale.
    Weighted { rho1: f64, z: &'a [f64] },
    /// System optimum, marginal cost `c = t + v t'`.
    SystemOptimal,
}

impl CostMode<'_> {
    pub(crate) fn check(&self, net: &Network) -> Result<()> {
        match self {
            CostMode::Tolled(u) => net.check_len(u.len()),
            CostMode::Weighted { rho1, z } => {
                if !(*rho1 >= 0.0) {
                    return Err(Error::domain(format!("rho1 must be nonnegative, got {rho1}")));
                }
                net.check_len(z.len())
            }
            CostMode::SystemOptimal => Ok(()),
        }
    }

    #[inline]
    pub fn cost(&self, net: &Network, a: usize, v: f64) -> f64 {
        let l = net.link(a);
        match self {
            CostMode::Tolled(u) => time(l, v) + u[a],
            CostMode::Weighted { rho1, z } => {
                let t = time(l, v);
                net.time_scale() * (t + v * time_derivative(l, v)) + rho1 * (t + z[a])
            }
            CostMode::SystemOptimal => time(l, v) + v * time_derivative(l, v),
        }
    }

    #[inline]
    pub fn derivative(&self, net: &Network, a: usize, v: f64) -> f64 {
        let l = net.link(a);
        match self {
            CostMode::Tolled(_) => time_derivative(l, v),
            CostMode::Weighted { rho1, .. } => {
                let d1 = time_derivative(l, v);
                net.time_scale() * (2.0 * d1 + v * time_second_derivative(l, v)) + rho1 * d1
            }
            CostMode::SystemOptimal => {
                2.0 * time_derivative(l, v) + v * time_second_derivative(l, v)
            }
        }
    }

    /// `int_0^v c_a(x) dx`.
    #[inline]
    pub fn potential(&self, net: &Network, a: usize, v: f64) -> f64 {
        let l = net.link(a);
        match self {
            CostMode::Tolled(u) => time_integral(l, v) + u[a] * v,
            CostMode::Weighted { rho1, z } => {
                net.time_scale() * time(l, v) * v + rho1 * (time_integral(l, v) + z[a] * v)
            }
            CostMode::SystemOptimal => time(l, v) * v,
        }
    }

    /// Sum of link potentials; the objective the assignment minimizes.
    pub fn objective(&self, net: &Network, v: &[f64]) -> f64 {
        (0..net.link_count())
            .map(|a| self.potential(net, a, v[a].max(0.0)))
            .sum()
    }
}
