//! The pass/fail equilibrium, its lower-censorship twin and the cutoff scan
//! of the principal's objective.

use persuaded_search::equilibrium::{passfail_properties, self_generation_residuals};
use persuaded_search::{
    best_binary_cutoff, equilibrium_lower_censorship, equilibrium_passfail, Environment, Prior,
};

fn main() -> persuaded_search::Result<()> {
    let env = Environment::new(Prior::uniform(0.0, 1.0)?, 2.0 / 3.0)?;
    let eq = equilibrium_passfail(&env)?;
    println!("pass/fail equilibrium, uniform prior, delta = 2/3");
    println!("  agent value U      {:.10}", eq.agent_value);
    println!("  principal value V  {:.10}", eq.principal_value);
    println!("  price p            {:.10}", eq.contract.price);
    println!("  cutoff             {:.10}", eq.cutoff);
    println!(
        "  fail / pass means  {:.6} / {:.6}",
        eq.fail_mean, eq.pass_mean
    );
    println!("  pass probability   {:.6}", 1.0 - eq.fail_probability);
    println!(
        "  expected discounted periods paid {:.6}",
        eq.discounted_duration(env.delta())
    );
    let (a, p) = self_generation_residuals(&env, &eq);
    println!("  self-generation residuals  agent {a:.1e}  principal {p:.1e}");

    let props = passfail_properties(&env)?;
    println!(
        "  c_G* touches c_F at the cutoff: gap {:.1e}, slope gap {:.1e}",
        props.tangency_gap, props.slope_gap
    );

    let lc = equilibrium_lower_censorship(&env)?;
    println!(
        "\nlower censorship: same price {:.10}, same value {:.10}, {} atom(s) + continuous mass {:.4}",
        lc.contract.price,
        lc.principal_value,
        lc.contract.dist.atoms().len(),
        lc.contract.dist.continuous_mass()
    );

    let scan = best_binary_cutoff(&env, 4096)?;
    println!(
        "\ncutoff scan over 4096 points: best {:.6} at {:.6} (grid step {:.1e}), single-peaked = {}",
        scan.value, scan.cutoff, scan.spacing, scan.single_peaked
    );
    for (x, v) in scan.values.iter().step_by(512) {
        println!("  x = {x:.4}  value = {v:.6}");
    }
    Ok(())
}
