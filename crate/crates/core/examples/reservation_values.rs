//! Reservation values: autarky and efficient benchmarks, the value of
//! intermediate information, and the value-iteration cross-check.

use persuaded_search::search::{autarky_by_bisection, never_searches};
use persuaded_search::{
    benchmarks, reservation_value, value_iteration_oracle, Environment, PmDist, Prior,
};

fn main() -> persuaded_search::Result<()> {
    let env = Environment::new(Prior::uniform(0.0, 1.0)?, 2.0 / 3.0)?;
    let b = benchmarks(&env)?;
    println!("uniform prior, delta = 2/3");
    println!("  autarky    u = {:.12}  r = {:.12}", b.u_lo, b.r_lo);
    println!("  efficient  u = {:.12}  r = {:.12}", b.u_hi, b.r_hi);
    println!("  (3 - sqrt 5)/2 = {:.12}", (3.0 - 5f64.sqrt()) / 2.0);
    let bisected = autarky_by_bisection(&env)?;
    println!("  autarky by bisection r = {:.12}", bisected.r);

    println!("\nreservation value rises with information:");
    let f = env.prior();
    for cut in [0.1, 0.2, 0.3, 0.381966, 0.5, 0.7] {
        let g = PmDist::binary_split(f, cut)?;
        let r = reservation_value(&env, &g)?;
        let vi = value_iteration_oracle(&env, &g, 10_000, 1e-13)?;
        println!(
            "  pass/fail at {cut:<8} r = {:.10}  u = {:.10}  value iteration u = {:.10} ({} steps)",
            r.r, r.u, vi.u, vi.iterations
        );
    }

    let tilted = Environment::new(Prior::linear_density(0.0, 2.0, -0.4)?, 0.9)?;
    let b = benchmarks(&tilted)?;
    println!(
        "\ndecreasing density on [0, 2], delta = 0.9: r_lo = {:.8}, r_hi = {:.8}",
        b.r_lo, b.r_hi
    );
    println!(
        "projection error of the density onto knots: {:.2e}",
        tilted.prior().projection_error()
    );

    let high = Environment::new(Prior::uniform(0.9, 1.0)?, 0.5)?;
    println!(
        "\nprior on [0.9, 1], delta = 0.5: never searches = {}",
        never_searches(&high)
    );
    println!("benchmarks: {:?}", benchmarks(&high).unwrap_err());
    Ok(())
}
