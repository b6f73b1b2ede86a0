//! Monte Carlo playout of stationary contract policies.
//!
//! Each period one public outcome (if any) and one quality are drawn, the
//! agent pays the posted price, observes the posterior mean and stops iff it
//! strictly exceeds the continuation threshold `delta U`. Payoffs are
//! discounted to the first period.

use std::fs;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dist::Prior;
use crate::equilibrium::{EquilibriumSolution, Signal};
use crate::error::{Error, Result};
use crate::public::{PublicEquilibrium, PublicSignalModel};
use crate::search::Environment;

/// Episodes are cut off after this many periods.
pub const HORIZON: u64 = 10_000;

/// What is offered after one public outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub weight: f64,
    pub interim: Prior,
    pub signal: Signal,
    pub price: f64,
}

/// A stationary policy: the same menu of branches every period.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPolicy {
    delta: f64,
    threshold: f64,
    branches: Vec<Branch>,
    cumulative: Vec<f64>,
    scale: f64,
}

impl StationaryPolicy {
    /// `threshold` is the agent's stopping point `delta U`; a posterior mean
    /// equal to it means continue.
    pub fn new(delta: f64, threshold: f64, branches: Vec<Branch>) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Domain {
                what: "delta",
                value: delta,
                lo: 0.0,
                hi: 1.0,
            });
        }
        if branches.is_empty() {
            return Err(Error::InvalidModel(
                "policy needs at least one branch".into(),
            ));
        }
        let mut acc = 0.0;
        let cumulative = branches
            .iter()
            .map(|b| {
                acc += b.weight;
                acc
            })
            .collect::<Vec<_>>();
        if (acc - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidModel(format!("branch weights sum to {acc}")));
        }
        let scale = branches
            .iter()
            .map(|b| b.interim.lo().abs().max(b.interim.hi().abs()))
            .fold(0.0, f64::max);
        Ok(Self {
            delta,
            threshold,
            branches,
            cumulative,
            scale,
        })
    }

    pub fn stationary(env: &Environment, eq: &EquilibriumSolution) -> Self {
        let branch = Branch {
            weight: 1.0,
            interim: env.prior().clone(),
            signal: eq.signal,
            price: eq.contract.price,
        };
        Self::new(env.delta(), env.delta() * eq.agent_value, vec![branch])
            .expect("a single full-weight branch is valid")
    }

    pub fn public(
        env: &Environment,
        model: &PublicSignalModel,
        peq: &PublicEquilibrium,
    ) -> Result<Self> {
        let branches = model
            .outcomes()
            .iter()
            .map(|o| {
                let plan = peq
                    .outcomes
                    .iter()
                    .find(|p| p.label == o.label)
                    .ok_or_else(|| {
                        Error::InvalidModel(format!("no plan for outcome {:?}", o.label))
                    })?;
                Ok(Branch {
                    weight: o.weight,
                    interim: o.interim.clone(),
                    signal: plan.signal,
                    price: plan.price,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(env.delta(), peq.r_xi, branches)
    }

    fn branch(&self, u: f64) -> &Branch {
        let i = self.cumulative.partition_point(|&c| c <= u);
        &self.branches[i.min(self.branches.len() - 1)]
    }

    /// Plays one episode from the given generator.
    pub fn play(&self, rng: &mut impl Rng) -> EpisodeResult {
        let mut discount = 1.0;
        let mut paid = 0.0;
        let mut periods_weight = 0.0;
        for t in 1..=HORIZON {
            let b = if self.branches.len() == 1 {
                &self.branches[0]
            } else {
                self.branch(rng.gen::<f64>())
            };
            let theta = b.interim.quantile(rng.gen::<f64>());
            let m = b.signal.posterior_mean(theta);
            paid += discount * b.price;
            periods_weight += discount;
            if m > self.threshold {
                return EpisodeResult {
                    stop_period: t,
                    stopped: true,
                    agent_payoff: discount * m - paid,
                    principal_payoff: paid,
                    discounted_periods: periods_weight,
                };
            }
            discount *= self.delta;
        }
        EpisodeResult {
            stop_period: HORIZON,
            stopped: false,
            agent_payoff: -paid,
            principal_payoff: paid,
            discounted_periods: periods_weight,
        }
    }
}

/// Outcome of one simulated search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeResult {
    pub stop_period: u64,
    /// False if the horizon was reached first.
    pub stopped: bool,
    pub agent_payoff: f64,
    pub principal_payoff: f64,
    /// `sum_{t <= T} delta^(t-1)`.
    pub discounted_periods: f64,
}

/// Aggregate of many episodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub n_episodes: u64,
    pub seed: u64,
    pub agent_mean: f64,
    pub agent_se: f64,
    pub principal_mean: f64,
    pub principal_se: f64,
    pub discounted_periods_mean: f64,
    pub discounted_periods_se: f64,
    /// `stopping_histogram[t - 1]` episodes stopped in period `t`.
    pub stopping_histogram: Vec<u64>,
    /// Episodes that hit the horizon without stopping.
    pub truncated: u64,
    /// Bound on the payoff bias from truncation, `delta^HORIZON * |theta|max`.
    pub truncation_bound: f64,
}

impl SimulationReport {
    /// Share of episodes stopping in the first period and its standard error.
    pub fn first_period_stop(&self) -> (f64, f64) {
        let n = self.n_episodes as f64;
        let q = self.stopping_histogram.first().copied().unwrap_or(0) as f64 / n;
        (q, (q * (1.0 - q) / n).sqrt())
    }

    pub fn mean_stop_period(&self) -> f64 {
        let total: u64 = self
            .stopping_histogram
            .iter()
            .enumerate()
            .map(|(i, c)| (i as u64 + 1) * c)
            .sum();
        (total + self.truncated * HORIZON) as f64 / self.n_episodes as f64
    }

    /// One `statistic,value` row per field.
    pub fn to_csv(&self) -> String {
        let (q1, q1_se) = self.first_period_stop();
        let mut out = String::from("statistic,value\n");
        out += &format!("n_episodes,{}\n", self.n_episodes);
        out += &format!("seed,{}\n", self.seed);
        for (name, v) in [
            ("agent_mean", self.agent_mean),
            ("agent_se", self.agent_se),
            ("principal_mean", self.principal_mean),
            ("principal_se", self.principal_se),
            ("discounted_periods_mean", self.discounted_periods_mean),
            ("discounted_periods_se", self.discounted_periods_se),
            ("first_period_stop", q1),
            ("first_period_stop_se", q1_se),
            ("mean_stop_period", self.mean_stop_period()),
            ("truncation_bound", self.truncation_bound),
        ] {
            out += &format!("{name},{}\n", fmt_num(v));
        }
        out += &format!("truncated,{}\n", self.truncated);
        out
    }

    /// `period,count` rows up to the last nonempty period.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("period,count\n");
        for (i, c) in self.stopping_histogram.iter().enumerate() {
            out += &format!("{},{}\n", i + 1, c);
        }
        out
    }

    pub fn write_csv(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::File::create(dir.join("simulation.csv"))?.write_all(self.to_csv().as_bytes())?;
        fs::File::create(dir.join("stopping_histogram.csv"))?
            .write_all(self.histogram_csv().as_bytes())
    }
}

/// Fixed 17-significant-digit scientific notation used in every CSV.
pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Generator for episode `index`: ChaCha8 keyed by `seed`, one stream per
/// episode, so results do not depend on scheduling.
pub fn episode_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs `n` episodes of `policy` in parallel.
pub fn simulate_policy(policy: &StationaryPolicy, n: u64, seed: u64) -> Result<SimulationReport> {
    if n == 0 {
        return Err(Error::InvalidEnvironment(
            "at least one episode is required".into(),
        ));
    }
    let episodes: Vec<EpisodeResult> = (0..n)
        .into_par_iter()
        .map(|i| policy.play(&mut episode_rng(seed, i)))
        .collect();
    Ok(summarize(policy, &episodes, seed))
}

fn mean_se(xs: impl Iterator<Item = f64> + Clone, n: f64) -> (f64, f64) {
    let mean = xs.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = xs.map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn summarize(policy: &StationaryPolicy, episodes: &[EpisodeResult], seed: u64) -> SimulationReport {
    let n = episodes.len() as f64;
    let (agent_mean, agent_se) = mean_se(episodes.iter().map(|e| e.agent_payoff), n);
    let (principal_mean, principal_se) = mean_se(episodes.iter().map(|e| e.principal_payoff), n);
    let (discounted_periods_mean, discounted_periods_se) =
        mean_se(episodes.iter().map(|e| e.discounted_periods), n);
    let mut stopping_histogram = Vec::new();
    let mut truncated = 0;
    for e in episodes {
        if !e.stopped {
            truncated += 1;
            continue;
        }
        let i = (e.stop_period - 1) as usize;
        if stopping_histogram.len() <= i {
            stopping_histogram.resize(i + 1, 0);
        }
        stopping_histogram[i] += 1;
    }
    SimulationReport {
        n_episodes: episodes.len() as u64,
        seed,
        agent_mean,
        agent_se,
        principal_mean,
        principal_se,
        discounted_periods_mean,
        discounted_periods_se,
        stopping_histogram,
        truncated,
        truncation_bound: policy.delta.powf(HORIZON as f64) * policy.scale,
    }
}

/// Plays the constructed equilibrium `n` times.
pub fn simulate_stationary(
    env: &Environment,
    eq: &EquilibriumSolution,
    n: u64,
    seed: u64,
) -> Result<SimulationReport> {
    simulate_policy(&StationaryPolicy::stationary(env, eq), n, seed)
}

/// Plays the public-signal equilibrium `n` times; a fresh public outcome is
/// drawn every period.
pub fn simulate_public(
    env: &Environment,
    model: &PublicSignalModel,
    peq: &PublicEquilibrium,
    n: u64,
    seed: u64,
) -> Result<SimulationReport> {
    simulate_policy(&StationaryPolicy::public(env, model, peq)?, n, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::equilibrium_passfail;

    fn env() -> Environment {
        Environment::new(Prior::uniform(0.0, 1.0).unwrap(), 2.0 / 3.0).unwrap()
    }

    #[test]
    fn budget_identity_per_episode() {
        let e = env();
        let eq = equilibrium_passfail(&e).unwrap();
        let policy = StationaryPolicy::stationary(&e, &eq);
        for i in 0..200 {
            let r = policy.play(&mut episode_rng(7, i));
            assert!(r.stop_period >= 1 && r.stopped);
            let consumed = e.delta().powi(r.stop_period as i32 - 1) * eq.pass_mean;
            assert!((r.agent_payoff + r.principal_payoff - consumed).abs() < 1e-14);
            assert!((r.principal_payoff - eq.contract.price * r.discounted_periods).abs() < 1e-14);
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let e = env();
        let eq = equilibrium_passfail(&e).unwrap();
        let a = simulate_stationary(&e, &eq, 2000, 11).unwrap();
        let b = simulate_stationary(&e, &eq, 2000, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_csv(), b.to_csv());
        let c = simulate_stationary(&e, &eq, 2000, 12).unwrap();
        assert_ne!(a.agent_mean, c.agent_mean);
    }

    #[test]
    fn small_run_is_near_equilibrium() {
        let e = env();
        let eq = equilibrium_passfail(&e).unwrap();
        let rep = simulate_stationary(&e, &eq, 20_000, 3).unwrap();
        assert!((rep.agent_mean - 0.5).abs() < 4.0 * rep.agent_se);
        assert!((rep.principal_mean - eq.principal_value).abs() < 4.0 * rep.principal_se);
        assert_eq!(rep.truncated, 0);
    }

    #[test]
    fn never_stopping_policy_truncates() {
        let e = env();
        let branch = Branch {
            weight: 1.0,
            interim: e.prior().clone(),
            signal: Signal::FullInfo,
            price: 0.0,
        };
        let policy = StationaryPolicy::new(e.delta(), 1.0, vec![branch]).unwrap();
        let rep = simulate_policy(&policy, 3, 1).unwrap();
        assert_eq!(rep.truncated, 3);
        assert_eq!(rep.agent_mean, 0.0);
        assert!(rep.truncation_bound < 1e-300);
        assert!(rep.stopping_histogram.is_empty());
    }

    #[test]
    fn rejects_zero_episodes() {
        let e = env();
        let eq = equilibrium_passfail(&e).unwrap();
        assert!(simulate_stationary(&e, &eq, 0, 1).is_err());
    }
}
