mod common;

use common::*;
use persuaded_search::dist::MPC_TOLERANCE;
use persuaded_search::public::{phi, phi_context};
use persuaded_search::search::bellman_residual;
use persuaded_search::sim::{episode_rng, StationaryPolicy};
use persuaded_search::*;
use proptest::prelude::*;

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(48)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn c_matches_quadrature_and_is_convex_decreasing(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let env = random_environment(&mut rng);
        let f = env.prior();
        let g = random_mpc(f, &mut rng);
        let (lo, hi) = g.support();
        prop_assert!((g.incremental_benefit(lo).unwrap() - (g.mean() - lo)).abs() < 1e-12);
        prop_assert_eq!(g.incremental_benefit(hi).unwrap(), 0.0);
        let n = 64;
        let xs: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let cs: Vec<f64> = xs.iter().map(|&x| g.incremental_benefit(x).unwrap()).collect();
        for (x, c) in xs.iter().zip(&cs) {
            prop_assert!((c - c_oracle(&g, *x)).abs() < 1e-10);
        }
        for w in cs.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-15);
        }
        for w in cs.windows(3) {
            prop_assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-12);
        }
        // right derivative G(x) - 1 from a one-sided difference
        let h = 1e-7 * (hi - lo);
        for &x in &xs[..n] {
            let fd = (g.incremental_benefit(x + h).unwrap() - g.incremental_benefit(x).unwrap()) / h;
            let d = g.right_derivative_cb(x).unwrap();
            let jump = g.cdf(x + h) - g.cdf(x);
            prop_assert!((fd - d).abs() <= jump + 1e-5);
        }
    }

    #[test]
    fn partitions_sit_between_uninformative_and_prior(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let env = random_environment(&mut rng);
        let f = env.prior();
        let g = random_mpc(f, &mut rng);
        prop_assert!(is_mpc(&g, f, MPC_TOLERANCE).holds);
        prop_assert!(is_mpc(&PmDist::uninformative(f), &g, MPC_TOLERANCE).holds);
        prop_assert!((mean_oracle(&g) - f.mean()).abs() < 1e-10);

        let b = benchmarks(&env).unwrap();
        let r = reservation_value(&env, &g).unwrap();
        prop_assert!(r.r >= b.r_lo - 1e-10 && r.r <= b.r_hi + 1e-10);
        prop_assert!(bellman_residual(&env, &g, r.u) <= 1e-10);
        prop_assert!((r.r - reservation_oracle(&g, env.delta())).abs() < 1e-9);
    }

    #[test]
    fn no_binary_cutoff_beats_the_equilibrium(seed in any::<u64>(), t in 0.01f64..0.99) {
        let mut rng = rng(seed);
        let env = random_environment(&mut rng);
        let f = env.prior();
        let (lo, hi) = f.support();
        let eq = equilibrium_passfail(&env).unwrap();
        let g = PmDist::binary_split(f, lo + t * (hi - lo)).unwrap();
        prop_assert!(principal_value(&env, &g).unwrap() <= eq.principal_value + 1e-10);
        // any partition does no better either
        let m = random_mpc(f, &mut rng);
        prop_assert!(principal_value(&env, &m).unwrap() <= eq.principal_value + 1e-10);
    }

    #[test]
    fn equilibrium_contracts_verify(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let env = random_environment(&mut rng);
        let eq = equilibrium_passfail(&env).unwrap();
        let lc = equilibrium_lower_censorship(&env).unwrap();
        let rep = verify_stationary(&env, &eq.contract).unwrap();
        prop_assert!(rep.passed(), "{}", rep);
        prop_assert!(verify_stationary(&env, &lc.contract).unwrap().passed());
        prop_assert!(is_mpc(&eq.contract.dist, &lc.contract.dist, MPC_TOLERANCE).holds);
        let id = eq.contract.price / (1.0 - env.delta() * eq.fail_probability) - eq.principal_value;
        prop_assert!(id.abs() < 1e-12);
    }

    #[test]
    fn episodes_satisfy_the_budget_identity(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let env = random_environment(&mut rng);
        let eq = equilibrium_passfail(&env).unwrap();
        let policy = StationaryPolicy::stationary(&env, &eq);
        for i in 0..20 {
            let e = policy.play(&mut episode_rng(seed, i));
            prop_assert!(e.stopped && e.stop_period >= 1);
            let consumed = env.delta().powi(e.stop_period as i32 - 1) * eq.pass_mean;
            let scale = 1.0 + eq.pass_mean.abs();
            prop_assert!((e.agent_payoff + e.principal_payoff - consumed).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn interval_public_signals(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let env = random_environment(&mut rng);
        let f = env.prior().clone();
        let (lo, hi) = f.support();
        let n = rng.gen_range(1..4);
        let mut cuts: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.gen_range(0.05..0.95)).collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3 * (hi - lo));
        let model = PublicSignalModel::interval_split(f, &cuts).unwrap();
        let b = benchmarks(&env).unwrap();
        let peq = solve_public_equilibrium(&env, &model).unwrap();
        prop_assert!(peq.r_xi >= b.r_lo - 1e-10 && peq.r_xi <= b.r_hi + 1e-10);
        prop_assert!(peq.k_star >= 0.0 && peq.k_star <= (b.r_hi - peq.r_xi).max(0.0));
        prop_assert!(peq.fixed_point_residual.abs() <= 1e-10);
        prop_assert!(peq.self_generation_residual.abs() <= 1e-9);
        let v = b.u_hi - peq.agent_value - peq.k_star / env.delta();
        prop_assert!((peq.principal_value - v).abs() < 1e-12);

        let ctx = phi_context(&env, &model).unwrap();
        let ks: Vec<f64> = (0..=16).map(|i| ctx.k_max() * i as f64 / 16.0).collect();
        let vals: Vec<f64> = ks.iter().map(|&k| phi(&model, &ctx, k).unwrap()).collect();
        if ctx.k_max() > 0.0 {
            for w in vals.windows(2) {
                prop_assert!(w[1] < w[0]);
            }
        }
        prop_assert!(vals[0] >= 0.0 && *vals.last().unwrap() <= 0.0);
    }
}

use rand::Rng;
