//! Solver invariants on the bundled instances: BCD descent, gap sign,
//! the z-step gradient, termination residuals and Wardrop conditions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tollforge::Instance;
use tollforge_core::assign::{solve_ue, wardrop_violation};
use tollforge_core::cost::beckmann_potential;
use tollforge_core::pbcd::{pbcd_solve, z_objective, Penalty, PbcdOutcome};
use tollforge_core::value::GAP_FLOOR;
use tollforge_core::{AssignmentConfig, CostMode, PbcdConfig, TollBox, ValueOracle};

fn hearn() -> Instance {
    Instance::named("hearn").unwrap()
}

fn sioux_falls() -> Instance {
    Instance::named("sioux-falls").unwrap()
}

fn random_tolls(rng: &mut ChaCha8Rng, bounds: &TollBox, scale: f64) -> Vec<f64> {
    bounds.upper().iter().map(|u| rng.gen::<f64>() * u * scale).collect()
}

fn hearn_runs() -> Vec<PbcdOutcome> {
    let h = hearn();
    (1..=5)
        .map(|k| pbcd_solve(&h.network, &h.demand, &PbcdConfig::with_kappa(k)).unwrap())
        .collect()
}

#[test]
fn bcd_rounds_strictly_descend_and_terminate_at_kkt() {
    let pg_tol = PbcdConfig::default().pg.tol;
    let cfg = PbcdConfig::default();
    for (k, out) in hearn_runs().iter().enumerate() {
        let kappa = k + 1;
        assert_eq!(out.descent_violations, 0, "kappa = {kappa}");
        // independent check on the recorded trace
        for w in out.inner_trace.windows(2) {
            if w[0].outer == w[1].outer {
                let slack = 1e-9 * w[0].phi.abs().max(1.0);
                assert!(
                    w[1].phi <= w[0].phi + slack,
                    "kappa = {kappa}, outer {} round {}: {} -> {}",
                    w[1].outer,
                    w[1].inner,
                    w[0].phi,
                    w[1].phi
                );
            }
        }
        let supp = out.tolls.iter().filter(|x| x.abs() > 1e-9).count();
        assert!(supp <= kappa);
        if out.converged {
            assert!(out.relative_gap <= cfg.eps1, "kappa = {kappa}: gap {}", out.relative_gap);
            assert!(
                out.relative_distance <= cfg.eps2,
                "kappa = {kappa}: distance {}",
                out.relative_distance
            );
            assert!(
                out.pg_residual <= pg_tol,
                "kappa = {kappa}: z-step residual {} above {pg_tol}",
                out.pg_residual
            );
        }
    }
}

#[test]
fn penalties_grow_geometrically() {
    let cfg = PbcdConfig::default();
    for out in hearn_runs() {
        let first = &out.outer_trace[0];
        for (i, r) in out.outer_trace.iter().enumerate() {
            let e = i as i32;
            assert!((r.rho1 / (first.rho1 * cfg.gamma1.powi(e)) - 1.0).abs() < 1e-12);
            assert!((r.rho2 / (first.rho2 * cfg.gamma2.powi(e)) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn gap_is_nonnegative_on_random_pairs() {
    let h = hearn();
    let bounds = TollBox::proportional(&h.network, 50.0);
    let tight = AssignmentConfig::with_tol(1e-10);
    let loose = AssignmentConfig::with_tol(1e-2);
    let mut oracle = ValueOracle::with_config(&h.network, &h.demand, tight);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let z = random_tolls(&mut rng, &bounds, 0.2);
        // a feasible flow: a convex combination of two tolled equilibria
        let t1 = random_tolls(&mut rng, &bounds, 0.5);
        let t2 = random_tolls(&mut rng, &bounds, 0.5);
        let v1 = solve_ue(&h.network, &h.demand, &t1, &loose, None).unwrap().flows;
        let v2 = solve_ue(&h.network, &h.demand, &t2, &loose, None).unwrap().flows;
        let lambda: f64 = rng.gen();
        let v: Vec<f64> = v1.iter().zip(&v2).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        let f = beckmann_potential(&h.network, &z, &v).unwrap();
        let raw = f - oracle.value(&z).unwrap();
        assert!(raw >= -GAP_FLOOR * f.max(1.0), "raw gap {raw}");
        assert!(oracle.gap(&z, &v).unwrap() >= 0.0);
    }
}

/// Central differences of `g` against the analytic gradient.
fn check_gradient(inst: &Instance, points: usize, coords: Option<usize>, seed: u64) {
    let net = &inst.network;
    let m = net.link_count();
    let bounds = TollBox::proportional(net, 50.0);
    let mut oracle =
        ValueOracle::with_config(net, &inst.demand, AssignmentConfig::with_tol(1e-12));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = Penalty { rho1: 0.7, rho2: 0.3 };
    for _ in 0..points {
        let z = random_tolls(&mut rng, &bounds, 0.1);
        let u_r = random_tolls(&mut rng, &bounds, 0.1);
        let v_r = oracle.response(&random_tolls(&mut rng, &bounds, 0.1)).unwrap();
        let (_, grad) = z_objective(&mut oracle, rho, &u_r, &v_r, &z).unwrap();
        let mut fd = vec![0.0; m];
        let mut err2 = 0.0;
        let mut norm2 = 0.0;
        let picked: Vec<usize> = match coords {
            None => (0..m).collect(),
            Some(n) => (0..n).map(|_| rng.gen_range(0..m)).collect(),
        };
        for &a in &picked {
            let h = 1e-4 * bounds.upper()[a];
            let mut zp = z.clone();
            let mut zm = z.clone();
            zp[a] += h;
            zm[a] -= h;
            let gp = z_objective(&mut oracle, rho, &u_r, &v_r, &zp).unwrap().0;
            let gm = z_objective(&mut oracle, rho, &u_r, &v_r, &zm).unwrap().0;
            fd[a] = (gp - gm) / (2.0 * h);
            err2 += (fd[a] - grad[a]).powi(2);
            norm2 += grad[a].powi(2);
        }
        let rel = (err2 / norm2.max(1e-300)).sqrt();
        assert!(rel <= 1e-4, "relative gradient error {rel:.3e} on {}", inst.name);
    }
}

#[test]
fn z_gradient_matches_finite_differences_on_hearn() {
    check_gradient(&hearn(), 5, None, 11);
}

#[test]
fn z_gradient_matches_finite_differences_on_sioux_falls() {
    check_gradient(&sioux_falls(), 5, Some(6), 13);
}

#[test]
fn converged_assignments_satisfy_wardrop() {
    let cfg = AssignmentConfig::with_tol(1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for inst in [hearn(), sioux_falls()] {
        let bounds = TollBox::proportional(&inst.network, 50.0);
        let mut toll_sets = vec![vec![0.0; inst.network.link_count()]];
        for _ in 0..3 {
            toll_sets.push(random_tolls(&mut rng, &bounds, 0.05));
        }
        for u in &toll_sets {
            let s = solve_ue(&inst.network, &inst.demand, u, &cfg, None).unwrap();
            assert!(s.converged);
            let w = wardrop_violation(&inst.network, &inst.demand, CostMode::Tolled(u), &s.paths, 1e-3)
                .unwrap();
            assert!(w <= 1e-4, "{}: Wardrop violation {w:.3e}", inst.name);
        }
    }
}
