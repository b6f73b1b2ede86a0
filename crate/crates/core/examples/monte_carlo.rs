//! Monte Carlo playout of the stationary and public-signal equilibria.

use persuaded_search::{
    equilibrium_passfail, simulate_public, simulate_stationary, solve_public_equilibrium,
    Environment, Prior, PublicSignalModel, SimulationReport,
};

fn show(name: &str, rep: &SimulationReport, u: f64, v: f64) {
    let (q1, q1_se) = rep.first_period_stop();
    println!("== {name} ({} episodes, seed {})", rep.n_episodes, rep.seed);
    println!(
        "   agent      {:.6} +/- {:.6}   theory {u:.6}",
        rep.agent_mean, rep.agent_se
    );
    println!(
        "   principal  {:.6} +/- {:.6}   theory {v:.6}",
        rep.principal_mean, rep.principal_se
    );
    println!(
        "   stop in period 1: {q1:.4} +/- {q1_se:.4}, mean stopping period {:.4}",
        rep.mean_stop_period()
    );
}

fn main() -> persuaded_search::Result<()> {
    let n = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);
    let env = Environment::new(Prior::uniform(0.0, 1.0)?, 2.0 / 3.0)?;

    let eq = equilibrium_passfail(&env)?;
    let rep = simulate_stationary(&env, &eq, n, 1)?;
    show(
        "pass/fail equilibrium",
        &rep,
        eq.agent_value,
        eq.principal_value,
    );
    println!(
        "   discounted periods {:.6} +/- {:.6}, theory {:.6}",
        rep.discounted_periods_mean,
        rep.discounted_periods_se,
        eq.discounted_duration(env.delta())
    );

    let model = PublicSignalModel::interval_split(env.prior().clone(), &[0.5])?;
    let peq = solve_public_equilibrium(&env, &model)?;
    let rep = simulate_public(&env, &model, &peq, n, 1)?;
    show(
        "public split at one half",
        &rep,
        peq.agent_value,
        peq.principal_value,
    );
    Ok(())
}
