//! Free public signals: case classification per outcome, the loss function
//! and its fixed point, and the full-extraction test.

use persuaded_search::public::{
    full_extraction_check, phi, phi_context, public_posterior_mean_dist, Outcome,
};
use persuaded_search::{solve_public_equilibrium, Environment, Prior, PublicSignalModel};

fn report(
    env: &Environment,
    name: &str,
    model: &PublicSignalModel,
) -> persuaded_search::Result<f64> {
    let peq = solve_public_equilibrium(env, model)?;
    let g = public_posterior_mean_dist(model)?;
    println!("== {name}: interim means {:?}", g.atoms());
    println!(
        "   r_xi = {:.10}  k* = {:.10e}  U = {:.10}  V = {:.10}",
        peq.r_xi, peq.k_star, peq.agent_value, peq.principal_value
    );
    for p in &peq.outcomes {
        println!(
            "   {:<8} weight {:.3}  {:<15} xbar {:<12} cutoff {:<12} price {:.8}  psi {:.8}",
            p.label,
            p.weight,
            p.case.tag(),
            p.xbar.map_or("-".into(), |x| format!("{x:.8}")),
            p.cutoff.map_or("-".into(), |x| format!("{x:.8}")),
            p.price,
            p.psi
        );
    }
    let ctx = phi_context(env, model)?;
    let samples: Vec<String> = (0..=4)
        .map(|i| {
            let k = ctx.k_max() * i as f64 / 4.0;
            format!("{:.2e}", phi(model, &ctx, k).unwrap())
        })
        .collect();
    println!("   Phi on [0, r_hi - r_xi]: {}", samples.join(", "));
    println!(
        "   full extraction: {:?}",
        full_extraction_check(env, model)?
    );
    Ok(peq.principal_value)
}

fn main() -> persuaded_search::Result<()> {
    let f = Prior::uniform(0.0, 1.0)?;
    let env = Environment::new(f.clone(), 2.0 / 3.0)?;

    report(
        &env,
        "no public information",
        &PublicSignalModel::singleton(f.clone()),
    )?;
    report(
        &env,
        "above/below one half",
        &PublicSignalModel::interval_split(f.clone(), &[0.5])?,
    )?;

    let d = 10.0 / 9.0;
    let rest =
        Prior::interim_from_knots(&[(0.0, 0.0), (0.35, 0.35 * d), (0.45, 0.35 * d), (1.0, 1.0)])?;
    let reveal = PublicSignalModel::new(
        f.clone(),
        vec![
            Outcome {
                label: "a".into(),
                weight: 0.1,
                interim: Prior::uniform(0.35, 0.45)?,
            },
            Outcome {
                label: "b".into(),
                weight: 0.9,
                interim: rest,
            },
        ],
    )?;
    report(&env, "reveal [0.35, 0.45]", &reveal)?;

    let w = 0.05;
    let bump = [(0.0, 0.0), (0.33, 0.033), (0.38, 0.938), (1.0, 1.0)];
    let rest: Vec<(f64, f64)> = bump
        .iter()
        .map(|&(x, y)| (x, (x - w * y) / (1.0 - w)))
        .collect();
    let tilted = PublicSignalModel::new(
        f.clone(),
        vec![
            Outcome {
                label: "tilted".into(),
                weight: w,
                interim: Prior::from_knots(&bump)?,
            },
            Outcome {
                label: "rest".into(),
                weight: 1.0 - w,
                interim: Prior::from_knots(&rest)?,
            },
        ],
    )?;
    report(&env, "full-support tilt", &tilted)?;

    // Finer public partitions give the principal less to sell; observed
    // here, not a general guarantee.
    println!("\nprincipal value as the public partition refines:");
    let mut cuts: Vec<f64> = Vec::new();
    for c in [0.6, 0.4, 0.5, 0.3] {
        cuts.push(c);
        cuts.sort_by(f64::total_cmp);
        let peq =
            solve_public_equilibrium(&env, &PublicSignalModel::interval_split(f.clone(), &cuts)?)?;
        println!("  cuts {cuts:?}: V = {:.8}", peq.principal_value);
    }
    Ok(())
}
