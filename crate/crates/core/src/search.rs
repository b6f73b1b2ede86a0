//! Single-agent search: reservation values and the autarky/efficient
//! benchmarks.

use crate::dist::{Distribution, PmDist, Prior};
use crate::error::{Error, Result};
use crate::roots::{bisect_decreasing, SolverOptions};

/// Prior plus common discount factor.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    prior: Prior,
    delta: f64,
    solver: SolverOptions,
}

impl Environment {
    pub fn new(prior: Prior, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidEnvironment(format!(
                "discount factor must lie in (0, 1), got {delta}"
            )));
        }
        if !prior.has_full_support() {
            return Err(Error::InvalidEnvironment(
                "the quality prior must have full support on [lo, hi]".into(),
            ));
        }
        if !(prior.hi() > 0.0) {
            return Err(Error::InvalidEnvironment(format!(
                "the highest quality must be positive, got {}",
                prior.hi()
            )));
        }
        Ok(Self {
            prior,
            delta,
            solver: SolverOptions::default(),
        })
    }

    pub fn with_solver(mut self, solver: SolverOptions) -> Self {
        self.solver = solver;
        self
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn solver(&self) -> SolverOptions {
        self.solver
    }

    /// `theta_lo < delta * E[theta]`: information has value to the agent.
    pub fn assumption_holds(&self) -> bool {
        !never_searches(self)
    }

    pub(crate) fn require_search(&self) -> Result<()> {
        if never_searches(self) {
            return Err(Error::NeverSearches {
                theta_lo: self.prior.lo(),
                threshold: self.delta * self.prior.mean(),
            });
        }
        Ok(())
    }
}

/// Agent value `u` and reservation value `r = delta * u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchValues {
    pub u: f64,
    pub r: f64,
}

/// Autarky and efficient values: `(u_lo, u_hi, r_lo, r_hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Benchmarks {
    /// Autarky payoff `max{E[theta], 0}`.
    pub u_lo: f64,
    /// Efficient surplus, the agent's value under free full information.
    pub u_hi: f64,
    pub r_lo: f64,
    pub r_hi: f64,
}

/// True when even the worst good today beats the best good tomorrow,
/// i.e. `theta_lo >= delta * E[theta]`. Ties count as never searching.
pub fn never_searches(env: &Environment) -> bool {
    env.prior.lo() >= env.delta * env.prior.mean()
}

/// Solves `r = delta / (1 - delta) * c_g(r)` by bisection on `[lo, hi]`.
pub fn reservation_value(env: &Environment, g: &dyn Distribution) -> Result<SearchValues> {
    env.require_search()?;
    let delta = env.delta;
    let ratio = delta / (1.0 - delta);
    let (lo, hi) = g.support();
    let r = bisect_decreasing(
        "reservation value",
        |r| ratio * g.expected_excess(r) - r,
        lo,
        hi,
        env.solver,
    )?;
    Ok(SearchValues { u: r / delta, r })
}

/// Residual of the agent's Bellman equation `u = delta u + c(delta u)`.
pub fn bellman_residual(env: &Environment, g: &dyn Distribution, u: f64) -> f64 {
    let r = env.delta * u;
    u - r - g.expected_excess(r)
}

pub fn benchmarks(env: &Environment) -> Result<Benchmarks> {
    env.require_search()?;
    let u_lo = env.prior.mean().max(0.0);
    let r_lo = env.delta * u_lo;
    let top = reservation_value(env, &env.prior)?;
    if !(r_lo < top.r) {
        return Err(Error::Inconsistent(format!(
            "autarky reservation value {r_lo} is not below the efficient one {}",
            top.r
        )));
    }
    Ok(Benchmarks {
        u_lo,
        u_hi: top.u,
        r_lo,
        r_hi: top.r,
    })
}

/// Autarky values obtained by solving the fixed point on the uninformative
/// distribution rather than from the closed form.
pub fn autarky_by_bisection(env: &Environment) -> Result<SearchValues> {
    reservation_value(env, &PmDist::uninformative(&env.prior))
}

/// Result of [`value_iteration_oracle`].
#[derive(Debug, Clone, PartialEq)]
pub struct ValueIteration {
    pub u: f64,
    pub iterations: usize,
    /// Largest observed ratio of successive changes; at most `delta`.
    pub max_contraction: f64,
}

/// Independent check of the agent's value: iterates
/// `u <- ∫ max{m, delta u} dG(m)` from `u = E[m]`.
///
/// The integral is taken directly over the atoms and linear segments of `g`,
/// without going through the incremental-benefit function. Iteration stops
/// once the a-posteriori bound `delta / (1 - delta) * |u_n - u_{n-1}|`
/// drops below `tol`, so the returned value is within `tol` of the fixed
/// point.
pub fn value_iteration_oracle(
    env: &Environment,
    g: &PmDist,
    max_iterations: usize,
    tol: f64,
) -> Result<ValueIteration> {
    let delta = env.delta;
    let atoms = g.atoms().to_vec();
    let knots = g.continuous_knots();
    let bellman = |u: f64| {
        let t = delta * u;
        let atom_part: f64 = atoms.iter().map(|&(m, w)| w * m.max(t)).sum();
        let cont_part: f64 = knots
            .windows(2)
            .map(|s| {
                let ((a, ya), (b, yb)) = (s[0], s[1]);
                let w = yb - ya;
                if w == 0.0 {
                    0.0
                } else if t <= a {
                    w * 0.5 * (a + b)
                } else if t >= b {
                    w * t
                } else {
                    let density = w / (b - a);
                    density * ((t - a) * t + 0.5 * (b - t) * (b + t))
                }
            })
            .sum();
        atom_part + cont_part
    };

    let mut u = g.mean();
    let mut prev_change = f64::NAN;
    let mut max_contraction: f64 = 0.0;
    for it in 1..=max_iterations {
        let next = bellman(u);
        let change = (next - u).abs();
        if prev_change > 0.0 {
            max_contraction = max_contraction.max(change / prev_change);
        }
        u = next;
        if delta / (1.0 - delta) * change < tol {
            return Ok(ValueIteration {
                u,
                iterations: it,
                max_contraction,
            });
        }
        prev_change = change;
    }
    Err(Error::NoConvergence {
        what: "value iteration",
        iterations: max_iterations,
    })
}
