//! How the equilibrium price and value move with patience.

use persuaded_search::{equilibrium_passfail, Environment, Prior};

fn main() -> persuaded_search::Result<()> {
    println!(
        "{:>8} {:>12} {:>12} {:>12} {:>10} {:>10}",
        "delta", "price", "V", "cutoff", "p / V", "identity"
    );
    for delta in [0.5, 0.66, 0.8, 0.9, 0.95, 0.99, 0.999, 0.9999, 0.99999] {
        let env = Environment::new(Prior::uniform(0.0, 1.0)?, delta)?;
        let eq = equilibrium_passfail(&env)?;
        let ratio = eq.contract.price / eq.principal_value;
        let identity = eq.contract.price / (1.0 - delta * eq.fail_probability) - eq.principal_value;
        println!(
            "{delta:>8} {:>12.8} {:>12.8} {:>12.8} {ratio:>10.6} {identity:>10.1e}",
            eq.contract.price, eq.principal_value, eq.cutoff
        );
    }
    println!("\np / V = 1 - delta F(cutoff): the price peaks at intermediate patience and then");
    println!("falls like sqrt(1 - delta) while V rises toward hi - mean = 0.5.");
    Ok(())
}
