//! Posterior-mean distributions, their incremental-benefit curves and the
//! mean-preserving-contraction test.

use persuaded_search::{is_mpc, Distribution, PmDist, Prior};

fn main() -> persuaded_search::Result<()> {
    let f = Prior::uniform(0.0, 1.0)?;
    let cut = 0.4;
    let family = [
        ("prior", PmDist::full_info(&f)),
        ("uninformative", PmDist::uninformative(&f)),
        ("pass/fail at 0.4", PmDist::binary_split(&f, cut)?),
        ("censor below 0.4", PmDist::lower_censorship(&f, cut)?),
        (
            "partition",
            PmDist::partition(&f, &[0.2, 0.6], &[false, true, false])?,
        ),
    ];

    println!(
        "{:<18} {:>8} {:>10} {:>10} {:>10}",
        "distribution", "mean", "c(0.25)", "c(0.5)", "c(0.75)"
    );
    for (name, g) in &family {
        let c = |x| g.incremental_benefit(x).unwrap();
        println!(
            "{name:<18} {:>8.4} {:>10.6} {:>10.6} {:>10.6}",
            g.mean(),
            c(0.25),
            c(0.5),
            c(0.75)
        );
    }

    println!("\nevery member is a contraction of the prior:");
    for (name, g) in &family {
        let rep = is_mpc(g, &f, 1e-9);
        println!(
            "  {name:<18} holds = {}  max(c_G - c_F) = {:+.2e}",
            rep.holds, rep.max_violation
        );
    }

    // Two atoms at 0.1 and 0.9 spread the uniform prior out instead.
    let spread = PmDist::new(0.0, 1.0, &[(0.1, 0.5), (0.9, 0.5)], None)?;
    let rep = is_mpc(&spread, &f, 1e-9);
    println!(
        "\natoms {{0.1, 0.9}}: holds = {}, worst violation {:.4} at x = {:.4}",
        rep.holds, rep.max_violation, rep.at
    );

    let g = PmDist::new(0.0, 1.0, &[(0.25, 0.5)], Some(&[(0.5, 0.0), (1.0, 0.5)]))?;
    println!(
        "\nmixed distribution: atoms {:?}, continuous mass {}, cdf(0.75) = {}",
        g.atoms(),
        g.continuous_mass(),
        g.cdf(0.75)
    );
    Ok(())
}
