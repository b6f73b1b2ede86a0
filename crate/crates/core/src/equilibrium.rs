//! Stationary equilibrium with a signal-selling principal: construction of
//! the pass/fail and lower-censorship equilibria, the principal's reduced
//! objective, a brute-force cutoff oracle, and a checker for arbitrary
//! stationary contracts.

use std::fmt;

use crate::dist::{is_mpc, Distribution, PmDist, MPC_TOLERANCE};
use crate::error::{Error, Result};
use crate::roots::{bisect_decreasing, SolverOptions};
use crate::search::{benchmarks, reservation_value, Benchmarks, Environment};

/// Equality tolerance for verification checks (scaled by the quality range).
pub const EQUALITY_TOL: f64 = 1e-9;
/// Slack allowed in pointwise dominance checks.
pub const DOMINANCE_TOL: f64 = 1e-10;
/// Cutoff grid used by [`verify_stationary`] for the optimality check.
pub const PM_ORACLE_GRID: usize = 4096;
/// Allowed shortfall of a contract's value against the cutoff oracle.
pub const PM_ORACLE_TOL: f64 = 1e-6;

/// A stationary offer: price plus the induced posterior-mean distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Contract {
    pub price: f64,
    pub dist: PmDist,
}

impl Contract {
    /// Checks the price is a nonnegative number and `dist` is a
    /// mean-preserving contraction of the environment's prior.
    pub fn new(env: &Environment, price: f64, dist: PmDist) -> Result<Self> {
        if !(price >= 0.0) || !price.is_finite() {
            return Err(Error::MalformedContract(format!(
                "price must be a finite nonnegative number, got {price}"
            )));
        }
        let f = env.prior();
        if dist.domain() != f.support() {
            return Err(Error::MalformedContract(format!(
                "distribution domain {:?} differs from the prior's {:?}",
                dist.domain(),
                f.support()
            )));
        }
        let mpc = is_mpc(&dist, f, MPC_TOLERANCE);
        if !mpc.holds {
            return Err(Error::MalformedContract(format!(
                "distribution is not a mean-preserving contraction of the prior \
                 (c_G - c_F reaches {:.3e} at {:.6}, mean gap {:.3e})",
                mpc.max_violation, mpc.at, mpc.mean_gap
            )));
        }
        Ok(Self { price, dist })
    }
}

/// How a signal maps a realized quality to the posterior mean the agent sees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Signal {
    Uninformative {
        mean: f64,
    },
    FullInfo,
    /// Quality `<= cutoff` fails, the rest passes.
    PassFail {
        cutoff: f64,
        fail_mean: f64,
        pass_mean: f64,
    },
    /// Quality `<= cutoff` is pooled; higher quality is revealed.
    LowerCensorship {
        cutoff: f64,
        fail_mean: f64,
    },
}

impl Signal {
    pub fn posterior_mean(&self, theta: f64) -> f64 {
        match *self {
            Signal::Uninformative { mean } => mean,
            Signal::FullInfo => theta,
            Signal::PassFail {
                cutoff,
                fail_mean,
                pass_mean,
            } => {
                if theta <= cutoff {
                    fail_mean
                } else {
                    pass_mean
                }
            }
            Signal::LowerCensorship { cutoff, fail_mean } => {
                if theta <= cutoff {
                    fail_mean
                } else {
                    theta
                }
            }
        }
    }
}

/// A constructed stationary equilibrium.
#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumSolution {
    /// Agent continuation value `U`.
    pub agent_value: f64,
    /// Principal continuation value `V`.
    pub principal_value: f64,
    pub contract: Contract,
    pub signal: Signal,
    pub benchmarks: Benchmarks,
    /// Pass/fail threshold; equals the efficient reservation value.
    pub cutoff: f64,
    /// `E[theta | theta <= cutoff]`.
    pub fail_mean: f64,
    /// `E[theta | theta > cutoff]`.
    pub pass_mean: f64,
    /// Prior mass below the cutoff, `F(r_hi)`.
    pub fail_probability: f64,
}

impl EquilibriumSolution {
    /// Expected number of discounted periods the principal is paid:
    /// `1 / (1 - delta F(r_hi))`.
    pub fn discounted_duration(&self, delta: f64) -> f64 {
        1.0 / (1.0 - delta * self.fail_probability)
    }
}

/// Pass/fail equilibrium at the efficient threshold.
pub fn equilibrium_passfail(env: &Environment) -> Result<EquilibriumSolution> {
    build_equilibrium(env, false)
}

/// Lower-censorship equilibrium: same payoffs and price, more information.
pub fn equilibrium_lower_censorship(env: &Environment) -> Result<EquilibriumSolution> {
    build_equilibrium(env, true)
}

fn build_equilibrium(env: &Environment, censor: bool) -> Result<EquilibriumSolution> {
    let b = benchmarks(env)?;
    let f = env.prior();
    let delta = env.delta();
    let cutoff = b.r_hi;
    let fail_probability = f.cdf(cutoff);
    let fail_mean = f.conditional_mean_below(cutoff)?;
    let pass_mean = f.conditional_mean_above(cutoff)?;
    let (dist, signal) = if censor {
        (
            PmDist::lower_censorship(f, cutoff)?,
            Signal::LowerCensorship { cutoff, fail_mean },
        )
    } else {
        (
            PmDist::binary_split(f, cutoff)?,
            Signal::PassFail {
                cutoff,
                fail_mean,
                pass_mean,
            },
        )
    };
    let agent_value = b.u_lo;
    let principal_value = b.u_hi - b.u_lo;
    let price = principal_value * (1.0 - delta * fail_probability);

    let tol = EQUALITY_TOL * scale(env);
    let g0 = PmDist::uninformative(f);
    let binding = dist.incremental_benefit(b.r_lo)? - g0.incremental_benefit(b.r_lo)?;
    if (binding - price).abs() > tol {
        return Err(Error::Inconsistent(format!(
            "binding participation price {binding} differs from the closed form {price}"
        )));
    }
    let flat = dist.cdf(b.r_lo) - fail_probability;
    if flat.abs() > tol {
        return Err(Error::Inconsistent(format!(
            "equilibrium CDF at r_lo misses F(r_hi) by {flat}"
        )));
    }
    let contract = Contract::new(env, price, dist)?;
    Ok(EquilibriumSolution {
        agent_value,
        principal_value,
        contract,
        signal,
        benchmarks: b,
        cutoff,
        fail_mean,
        pass_mean,
        fail_probability,
    })
}

fn scale(env: &Environment) -> f64 {
    let f = env.prior();
    1f64.max(f.lo().abs()).max(f.hi().abs())
}

/// The principal's stationary payoff from offering `g` at the binding price,
/// `(c_g(r_lo) - c_0(r_lo)) / (1 - delta g(r_lo))`.
pub fn principal_value(env: &Environment, g: &dyn Distribution) -> Result<f64> {
    env.require_search()?;
    let f = env.prior();
    let r_lo = f.mean().max(0.0) * env.delta();
    let g0 = PmDist::uninformative(f);
    let numerator = g.expected_excess(r_lo) - g0.expected_excess(r_lo);
    Ok(numerator / (1.0 - env.delta() * g.cdf(r_lo)))
}

/// Grid scan of pass/fail cutoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct CutoffScan {
    pub cutoff: f64,
    pub value: f64,
    pub spacing: f64,
    /// No rise after a strict fall along the grid.
    pub single_peaked: bool,
    pub values: Vec<(f64, f64)>,
}

/// Brute-force maximization of [`principal_value`] over binary splits at
/// `grid_size` equispaced interior cutoffs.
pub fn best_binary_cutoff(env: &Environment, grid_size: usize) -> Result<CutoffScan> {
    env.require_search()?;
    if grid_size == 0 {
        return Err(Error::InvalidEnvironment(
            "cutoff grid must be nonempty".into(),
        ));
    }
    let f = env.prior();
    let (lo, hi) = f.support();
    let spacing = (hi - lo) / (grid_size + 1) as f64;
    let values = (1..=grid_size)
        .map(|i| {
            let x = lo + spacing * i as f64;
            let g = PmDist::binary_split(f, x)?;
            Ok((x, principal_value(env, &g)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let (cutoff, value) =
        values
            .iter()
            .copied()
            .fold((f64::NAN, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
    let mut fallen = false;
    let mut single_peaked = true;
    for w in values.windows(2) {
        let d = w[1].1 - w[0].1;
        if d < -1e-14 {
            fallen = true;
        } else if d > 1e-14 && fallen {
            single_peaked = false;
        }
    }
    Ok(CutoffScan {
        cutoff,
        value,
        spacing,
        single_peaked,
        values,
    })
}

/// Shape properties of the pass/fail distribution at the efficient threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassFailProperties {
    /// `c_{G*}(r_hi) - c_F(r_hi)`.
    pub tangency_gap: f64,
    /// Difference of right derivatives of `c_{G*}` and `c_F` at `r_hi`.
    pub slope_gap: f64,
    /// Largest `c_{G*} - c_F` on the validation grid.
    pub dominance_gap: f64,
    /// `r(G*) - r_hi`.
    pub reservation_gap: f64,
    /// `m1 < r_lo < r_hi < m2`.
    pub ordered: bool,
}

pub fn passfail_properties(env: &Environment) -> Result<PassFailProperties> {
    let eq = equilibrium_passfail(env)?;
    let f = env.prior();
    let g = &eq.contract.dist;
    let r_hi = eq.benchmarks.r_hi;
    let r_lo = eq.benchmarks.r_lo;
    let tangency_gap = g.incremental_benefit(r_hi)? - f.incremental_benefit(r_hi)?;
    let slope_gap = g.right_derivative_cb(r_hi)? - f.right_derivative_cb(r_hi)?;
    let dominance_gap = is_mpc(g, f, MPC_TOLERANCE).max_violation;
    let reservation_gap = reservation_value(env, g)?.r - r_hi;
    let ordered = eq.fail_mean < r_lo && r_lo < r_hi && r_hi < eq.pass_mean;
    Ok(PassFailProperties {
        tangency_gap,
        slope_gap,
        dominance_gap,
        reservation_gap,
        ordered,
    })
}

/// One line of a [`VerificationReport`].
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub description: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
}

/// Per-condition results of [`verify_stationary`].
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// Agent value implied by self-generation under this contract.
    pub implied_agent_value: f64,
    /// Principal's stationary payoff from this contract (0 if rejected).
    pub contract_value: f64,
    /// Best pass/fail value found by the cutoff oracle.
    pub oracle_value: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<12} {:<6} {:>14} {:>10}  condition",
            "check", "status", "residual", "tol"
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<12} {:<6} {:>14.6e} {:>10.1e}  {}",
                c.name,
                if c.passed { "pass" } else { "FAIL" },
                c.residual,
                c.tolerance,
                c.description
            )?;
        }
        writeln!(f, "implied agent value    {:.12}", self.implied_agent_value)?;
        writeln!(f, "contract value         {:.12}", self.contract_value)?;
        writeln!(f, "cutoff oracle value    {:.12}", self.oracle_value)?;
        write!(
            f,
            "overall: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Agent value `U` solving `U = delta U + c_G(delta U) - p`.
fn self_generated_agent_value(env: &Environment, contract: &Contract) -> Result<f64> {
    let delta = env.delta();
    let g = &contract.dist;
    let p = contract.price;
    let (lo, hi) = g.support();
    let slope = (1.0 - delta) / delta;
    let a = lo.min(delta * (g.mean() - p)) - 1.0;
    let b = hi.max(0.0) + 1.0;
    let opts = SolverOptions {
        max_iterations: 400,
        ..env.solver()
    };
    let r = bisect_decreasing(
        "agent self-generation",
        |r| g.expected_excess(r) - p - slope * r,
        a,
        b,
        opts,
    )?;
    Ok(r / delta)
}

/// Checks whether `contract`, offered in every period, is a stationary
/// equilibrium. Failed conditions are reported, not returned as errors.
pub fn verify_stationary(env: &Environment, contract: &Contract) -> Result<VerificationReport> {
    let contract = Contract::new(env, contract.price, contract.dist.clone())?;
    let b = benchmarks(env)?;
    let f = env.prior();
    let delta = env.delta();
    let g = &contract.dist;
    let p = contract.price;
    let tol = EQUALITY_TOL * scale(env);
    let (r_lo, r_hi) = (b.r_lo, b.r_hi);
    let target_v = b.u_hi - b.u_lo;
    let f_rhi = f.cdf(r_hi);
    let g0 = PmDist::uninformative(f);
    let gstar = PmDist::binary_split(f, r_hi)?;
    let mut checks = Vec::new();

    let margin = g.incremental_benefit(r_lo)? - g0.incremental_benefit(r_lo)? - p;
    let accepts = margin >= -tol;
    checks.push(Check {
        name: "PC",
        description: "agent accepts: c_G(r_lo) - c_0(r_lo) >= p",
        passed: accepts,
        residual: margin,
        tolerance: tol,
    });
    checks.push(Check {
        name: "PC-binding",
        description: "participation binds at the maximum",
        passed: margin.abs() <= tol,
        residual: margin,
        tolerance: tol,
    });

    let implied_u = self_generated_agent_value(env, &contract)?;
    checks.push(Check {
        name: "SG-A",
        description: "self-generated agent value equals autarky u_lo",
        passed: (implied_u - b.u_lo).abs() <= tol,
        residual: implied_u - b.u_lo,
        tolerance: tol,
    });
    let threshold = delta * implied_u;
    let atom_at_threshold = g
        .atoms()
        .iter()
        .filter(|a| (a.0 - threshold).abs() <= tol)
        .map(|a| a.1)
        .sum::<f64>();
    checks.push(Check {
        name: "OS",
        description: "stopping threshold delta*U = r_lo with no atom left indifferent",
        passed: (threshold - r_lo).abs() <= tol && atom_at_threshold == 0.0,
        residual: (threshold - r_lo).abs().max(atom_at_threshold),
        tolerance: tol,
    });

    let sgp = target_v - p - g.cdf(r_lo) * delta * target_v;
    checks.push(Check {
        name: "SG-P",
        description: "V = p + G(r_lo) delta V at V = u_hi - u_lo",
        passed: sgp.abs() <= tol,
        residual: sgp,
        tolerance: tol,
    });

    let stop_gap = g.cdf(r_lo) - f_rhi;
    checks.push(Check {
        name: "G(r_lo)",
        description: "G(r_lo) = F(r_hi)",
        passed: stop_gap.abs() <= tol,
        residual: stop_gap,
        tolerance: tol,
    });

    let dominance = is_mpc(&gstar, g, DOMINANCE_TOL);
    checks.push(Check {
        name: "c>=c*",
        description: "c_G >= c_G* pointwise",
        passed: dominance.max_violation <= DOMINANCE_TOL,
        residual: dominance.max_violation,
        tolerance: DOMINANCE_TOL,
    });
    let touch = g.incremental_benefit(r_lo)? - gstar.incremental_benefit(r_lo)?;
    checks.push(Check {
        name: "c=c*@r_lo",
        description: "c_G(r_lo) = c_G*(r_lo)",
        passed: touch.abs() <= tol,
        residual: touch,
        tolerance: tol,
    });

    let n = 256;
    let flat_dev = (0..=n)
        .map(|i| r_lo + (r_hi - r_lo) * i as f64 / n as f64)
        .chain(
            g.breakpoints()
                .into_iter()
                .filter(|x| *x >= r_lo && *x <= r_hi),
        )
        .map(|x| (g.cdf(x) - f_rhi).abs())
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "flatness",
        description: "G = F(r_hi) on [r_lo, r_hi]",
        passed: flat_dev <= tol,
        residual: flat_dev,
        tolerance: tol,
    });

    let contract_value = if accepts {
        p / (1.0 - delta * g.cdf(r_lo))
    } else {
        0.0
    };
    let oracle_value = best_binary_cutoff(env, PM_ORACLE_GRID)?.value;
    checks.push(Check {
        name: "PM",
        description: "contract value matches the best pass/fail cutoff",
        passed: accepts && contract_value >= oracle_value - PM_ORACLE_TOL,
        residual: oracle_value - contract_value,
        tolerance: PM_ORACLE_TOL,
    });

    let tangency = gstar.incremental_benefit(r_hi)? - f.incremental_benefit(r_hi)?;
    checks.push(Check {
        name: "tangency",
        description: "c_G* touches c_F at r_hi",
        passed: tangency.abs() <= DOMINANCE_TOL,
        residual: tangency,
        tolerance: DOMINANCE_TOL,
    });

    Ok(VerificationReport {
        checks,
        implied_agent_value: implied_u,
        contract_value,
        oracle_value,
    })
}

/// Residuals of both self-generation identities for a constructed solution.
pub fn self_generation_residuals(env: &Environment, eq: &EquilibriumSolution) -> (f64, f64) {
    let delta = env.delta();
    let g = &eq.contract.dist;
    let (u, v, p) = (eq.agent_value, eq.principal_value, eq.contract.price);
    let agent = u - (delta * u + g.expected_excess(delta * u) - p);
    let principal = v - (p + g.cdf(delta * u) * delta * v);
    (agent, principal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Prior;

    fn env() -> Environment {
        Environment::new(Prior::uniform(0.0, 1.0).unwrap(), 2.0 / 3.0).unwrap()
    }

    #[test]
    fn uniform_passfail_values() {
        let e = env();
        let eq = equilibrium_passfail(&e).unwrap();
        assert!((eq.agent_value - 0.5).abs() < 1e-12);
        assert!((eq.principal_value - 0.0729490169).abs() < 1e-9);
        assert!((eq.contract.price - 0.0543734).abs() < 1e-6);
        assert!((eq.cutoff - 0.3819660).abs() < 1e-7);
        let identity = eq.principal_value * (1.0 - e.delta() * eq.fail_probability);
        assert!((eq.contract.price - identity).abs() < 1e-12);
        assert!((1.0 - eq.fail_probability - 0.618034).abs() < 1e-6);
        let (a, p) = self_generation_residuals(&e, &eq);
        assert!(a.abs() <= 1e-10 && p.abs() <= 1e-10);
    }

    #[test]
    fn lower_censorship_is_payoff_equivalent() {
        let e = env();
        let pf = equilibrium_passfail(&e).unwrap();
        let lc = equilibrium_lower_censorship(&e).unwrap();
        assert!((pf.principal_value - lc.principal_value).abs() < 1e-15);
        assert!((pf.contract.price - lc.contract.price).abs() < 1e-15);
        assert!(is_mpc(&pf.contract.dist, &lc.contract.dist, MPC_TOLERANCE).holds);
        for i in 0..=50 {
            let x = lc.benchmarks.r_lo + (lc.cutoff - lc.benchmarks.r_lo) * i as f64 / 50.0;
            assert!((lc.contract.dist.cdf(x) - lc.fail_probability).abs() < 1e-12);
        }
        assert!(verify_stationary(&e, &lc.contract).unwrap().passed());
    }

    #[test]
    fn principal_value_examples() {
        let e = env();
        let eq = equilibrium_passfail(&e).unwrap();
        let v = principal_value(&e, &eq.contract.dist).unwrap();
        assert!((v - 0.0729490169).abs() < 1e-9);
        let via_r = (reservation_value(&e, &eq.contract.dist).unwrap().r - 1.0 / 3.0) / e.delta();
        assert!((v - via_r).abs() < 1e-10);
        assert_eq!(
            principal_value(&e, &PmDist::uninformative(e.prior())).unwrap(),
            0.0
        );
        let full = principal_value(&e, e.prior()).unwrap();
        // (c_F(1/3) - 1/6) / (1 - 2/9) = (2/9 - 1/6) * 9/7 = 1/14
        assert!((full - 1.0 / 14.0).abs() < 1e-12);
        assert!(full > 0.0 && full < eq.principal_value);
    }

    #[test]
    fn cutoff_oracle_finds_efficient_threshold() {
        let e = env();
        let scan = best_binary_cutoff(&e, 4096).unwrap();
        let r_hi = (3.0 - 5f64.sqrt()) / 2.0;
        assert!((scan.cutoff - r_hi).abs() <= scan.spacing);
        assert!((scan.value - 0.072949).abs() < 1e-6);
        assert!(scan.single_peaked);
        let at_rlo =
            principal_value(&e, &PmDist::binary_split(e.prior(), 1.0 / 3.0).unwrap()).unwrap();
        assert!(at_rlo < scan.value);
    }

    #[test]
    fn verification_positive_and_negative() {
        let e = env();
        let eq = equilibrium_passfail(&e).unwrap();
        let ok = verify_stationary(&e, &eq.contract).unwrap();
        assert!(ok.passed(), "{ok}");

        let over = Contract::new(&e, eq.contract.price + 0.01, eq.contract.dist.clone()).unwrap();
        let rep = verify_stationary(&e, &over).unwrap();
        assert!(!rep.check("PC").unwrap().passed);
        assert!(!rep.passed());

        let full = Contract::new(&e, eq.contract.price, PmDist::full_info(e.prior())).unwrap();
        let rep = verify_stationary(&e, &full).unwrap();
        assert!(!rep.check("flatness").unwrap().passed);
        assert!(!rep.check("PM").unwrap().passed);
        assert!(rep.check("PC").unwrap().passed);

        let at_rlo = PmDist::binary_split(e.prior(), 1.0 / 3.0).unwrap();
        let price = at_rlo.incremental_benefit(1.0 / 3.0).unwrap() - 1.0 / 6.0;
        let rep = verify_stationary(&e, &Contract::new(&e, price, at_rlo).unwrap()).unwrap();
        assert!(!rep.check("PM").unwrap().passed);
    }

    #[test]
    fn malformed_contracts() {
        let e = env();
        let g = PmDist::uninformative(e.prior());
        assert!(matches!(
            Contract::new(&e, -1.0, g.clone()),
            Err(Error::MalformedContract(_))
        ));
        let spread = PmDist::new(0.0, 1.0, &[(0.0, 0.5), (1.0, 0.5)], None).unwrap();
        assert!(Contract::new(&e, 0.0, spread).is_err());
        let other = PmDist::new(0.0, 2.0, &[(0.5, 1.0)], None).unwrap();
        assert!(Contract::new(&e, 0.0, other).is_err());
    }

    #[test]
    fn signal_posteriors() {
        let s = Signal::PassFail {
            cutoff: 0.4,
            fail_mean: 0.2,
            pass_mean: 0.7,
        };
        assert_eq!(s.posterior_mean(0.4), 0.2);
        assert_eq!(s.posterior_mean(0.41), 0.7);
        let lc = Signal::LowerCensorship {
            cutoff: 0.4,
            fail_mean: 0.2,
        };
        assert_eq!(lc.posterior_mean(0.9), 0.9);
        assert_eq!(Signal::Uninformative { mean: 0.5 }.posterior_mean(0.1), 0.5);
    }

    #[test]
    fn price_vanishes_as_patience_grows() {
        let mut last = f64::INFINITY;
        for d in [0.9, 0.99, 0.999] {
            let e = Environment::new(Prior::uniform(0.0, 1.0).unwrap(), d).unwrap();
            let eq = equilibrium_passfail(&e).unwrap();
            assert!(eq.contract.price < last);
            last = eq.contract.price;
            let id = eq.contract.price / (1.0 - d * eq.fail_probability) - eq.principal_value;
            assert!(id.abs() <= 1e-10);
        }
    }
}
