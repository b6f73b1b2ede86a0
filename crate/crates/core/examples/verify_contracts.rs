//! Checking candidate stationary contracts against the equilibrium
//! conditions.

use persuaded_search::{
    equilibrium_passfail, verify_stationary, Contract, Distribution, Environment, PmDist, Prior,
};

fn main() -> persuaded_search::Result<()> {
    let env = Environment::new(Prior::uniform(0.0, 1.0)?, 2.0 / 3.0)?;
    let f = env.prior();
    let eq = equilibrium_passfail(&env)?;
    let r_lo = 1.0 / 3.0;
    let at_rlo = PmDist::binary_split(f, r_lo)?;
    let at_rlo_price = at_rlo.incremental_benefit(r_lo)? - (f.mean() - r_lo);

    let candidates = [
        ("equilibrium pass/fail", eq.contract.clone()),
        (
            "overpriced pass/fail",
            Contract::new(&env, 0.07, eq.contract.dist.clone())?,
        ),
        (
            "full information at the equilibrium price",
            Contract::new(&env, eq.contract.price, PmDist::full_info(f))?,
        ),
        (
            "pass/fail at r_lo, binding price",
            Contract::new(&env, at_rlo_price, at_rlo)?,
        ),
    ];
    for (name, contract) in &candidates {
        let report = verify_stationary(&env, contract)?;
        println!("== {name} (price {:.8})", contract.price);
        println!("{report}\n");
    }

    let spread = PmDist::new(0.0, 1.0, &[(0.0, 0.5), (1.0, 0.5)], None)?;
    match Contract::new(&env, 0.0, spread) {
        Ok(_) => println!("unexpectedly accepted a spread"),
        Err(e) => println!("rejected before verification: {e}"),
    }
    Ok(())
}
