//! Free public signals observed by both parties before contracting.
//!
//! A finite signal splits the prior into interim beliefs `F_z` with weights
//! `xi(z)`. The agent's value is pinned by the posterior-mean distribution
//! `G^xi` of the public signal alone; the principal's loss relative to full
//! extraction is the fixed point `k* = delta/(1-delta) Phi(k*)`.

use std::fmt;

use crate::dist::{is_mpc, Distribution, PmDist, Prior, MPC_TOLERANCE};
use crate::equilibrium::Signal;
use crate::error::{Error, Result};
use crate::roots::{bisect_decreasing, bisect_sup};
use crate::search::{benchmarks, reservation_value, Environment};

/// Tolerance of the Bayes-plausibility and weight checks.
pub const CONSISTENCY_TOL: f64 = 1e-9;
/// Tolerance of the self-generation identity `V = sum xi(z) psi_z`.
pub const SELF_GENERATION_TOL: f64 = 1e-9;

/// One realization of the public signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub label: String,
    pub weight: f64,
    pub interim: Prior,
}

/// A finite public signal together with the prior it splits.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicSignalModel {
    prior: Prior,
    outcomes: Vec<Outcome>,
}

impl PublicSignalModel {
    /// Validates weights, supports and Bayes plausibility
    /// (`sum xi(z) F_z = F` at every knot, hence everywhere).
    pub fn new(prior: Prior, outcomes: Vec<Outcome>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(Error::InvalidModel(
                "a public signal needs at least one outcome".into(),
            ));
        }
        for o in &outcomes {
            if !(o.weight > 0.0) || !o.weight.is_finite() {
                return Err(Error::InvalidModel(format!(
                    "outcome {:?} has weight {}, weights must be positive",
                    o.label, o.weight
                )));
            }
            if o.interim.lo() < prior.lo() || o.interim.hi() > prior.hi() {
                return Err(Error::InvalidModel(format!(
                    "interim support of {:?} leaves the prior's domain",
                    o.label
                )));
            }
        }
        for (i, o) in outcomes.iter().enumerate() {
            if outcomes[..i].iter().any(|p| p.label == o.label) {
                return Err(Error::InvalidModel(format!(
                    "duplicate outcome label {:?}",
                    o.label
                )));
            }
        }
        let total: f64 = outcomes.iter().map(|o| o.weight).sum();
        if (total - 1.0).abs() > CONSISTENCY_TOL {
            return Err(Error::InvalidModel(format!(
                "weights sum to {total}, not 1"
            )));
        }
        let mut grid: Vec<f64> = prior.knots().iter().map(|k| k.0).collect();
        for o in &outcomes {
            grid.extend(o.interim.knots().iter().map(|k| k.0));
        }
        let (lo, hi) = prior.support();
        grid.extend((0..=256).map(|i| lo + (hi - lo) * i as f64 / 256.0));
        let gap = grid
            .iter()
            .map(|&x| {
                let mix: f64 = outcomes.iter().map(|o| o.weight * o.interim.cdf(x)).sum();
                (mix - prior.cdf(x)).abs()
            })
            .fold(0.0, f64::max);
        if gap > CONSISTENCY_TOL {
            return Err(Error::InvalidModel(format!(
                "interim beliefs do not average to the prior (sup-norm gap {gap:.3e})"
            )));
        }
        Ok(Self { prior, outcomes })
    }

    /// The uninformative public signal.
    pub fn singleton(prior: Prior) -> Self {
        let outcomes = vec![Outcome {
            label: "z".into(),
            weight: 1.0,
            interim: prior.clone(),
        }];
        Self { prior, outcomes }
    }

    /// Splits the prior at `cuts` into adjacent intervals, one outcome each,
    /// labelled `z0, z1, ...` from the bottom.
    pub fn interval_split(prior: Prior, cuts: &[f64]) -> Result<Self> {
        let (lo, hi) = prior.support();
        let mut edges = vec![lo];
        for &c in cuts {
            if !(c > *edges.last().unwrap() && c < hi) {
                return Err(Error::InvalidModel(format!(
                    "cuts must be increasing and inside ({lo}, {hi})"
                )));
            }
            edges.push(c);
        }
        edges.push(hi);
        let mut outcomes = Vec::new();
        for (i, w) in edges.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            let (fa, fb) = (prior.cdf(a), prior.cdf(b));
            let mass = fb - fa;
            if !(mass > 0.0) {
                return Err(Error::InvalidModel(format!(
                    "cell [{a}, {b}] has no prior mass"
                )));
            }
            let mut knots = vec![(a, 0.0)];
            knots.extend(
                prior
                    .knots()
                    .into_iter()
                    .filter(|k| k.0 > a && k.0 < b)
                    .map(|(x, y)| (x, (y - fa) / mass)),
            );
            knots.push((b, 1.0));
            outcomes.push(Outcome {
                label: format!("z{i}"),
                weight: mass,
                interim: Prior::interim_from_knots(&knots)?,
            });
        }
        Self::new(prior, outcomes)
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn outcome(&self, label: &str) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| o.label == label)
    }
}

/// Distribution of interim means: an atom at `E[F_z]` of mass `xi(z)`.
pub fn public_posterior_mean_dist(model: &PublicSignalModel) -> Result<PmDist> {
    let (lo, hi) = model.prior.support();
    let atoms: Vec<(f64, f64)> = model
        .outcomes
        .iter()
        .map(|o| (o.interim.mean(), o.weight))
        .collect();
    let g = PmDist::new(lo, hi, &atoms, None)?;
    let report = is_mpc(&g, &model.prior, MPC_TOLERANCE);
    if !report.holds {
        return Err(Error::InvalidModel(format!(
            "interim means are not a contraction of the prior (violation {:.3e} at {})",
            report.max_violation, report.at
        )));
    }
    Ok(g)
}

/// `sup { x in [lo_z, hi_z] : E_z[theta | theta <= x] <= r_xi }`.
pub fn xbar(interim: &Prior, r_xi: f64) -> Result<f64> {
    let (lo, hi) = interim.support();
    if !(r_xi >= lo && r_xi <= hi) {
        return Err(Error::Domain {
            what: "r_xi",
            value: r_xi,
            lo,
            hi,
        });
    }
    let holds = |x: f64| match interim.conditional_mean_below(x) {
        Ok(m) => m <= r_xi,
        Err(_) => true,
    };
    Ok(bisect_sup(holds, lo, hi, Default::default()))
}

/// The four ways a principal can serve one public outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutcomeCase {
    /// Every quality beats the agent's threshold; no sale, the agent stops.
    Optimistic,
    /// No quality beats the threshold; no sale, the agent keeps searching.
    Pessimistic,
    /// The efficient cutoff `delta V + r_xi` is obedient.
    Interior,
    /// Obedience caps the cutoff at `xbar_z`.
    Capped,
}

impl OutcomeCase {
    pub fn tag(self) -> &'static str {
        match self {
            OutcomeCase::Optimistic => "Z1-optimistic",
            OutcomeCase::Pessimistic => "Z2-pessimistic",
            OutcomeCase::Interior => "Z3-interior",
            OutcomeCase::Capped => "Z4-capped",
        }
    }
}

impl fmt::Display for OutcomeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Classifies an outcome for continuation value `v`. `xbar_z` is present for
/// the two interior cases. A tie `xbar_z = delta v + r_xi` counts as interior.
pub fn classify(
    interim: &Prior,
    v: f64,
    r_xi: f64,
    delta: f64,
) -> Result<(OutcomeCase, Option<f64>)> {
    let (lo, hi) = interim.support();
    if r_xi < lo {
        return Ok((OutcomeCase::Optimistic, None));
    }
    if r_xi > hi {
        return Ok((OutcomeCase::Pessimistic, None));
    }
    let xb = xbar(interim, r_xi)?;
    let case = if xb >= delta * v + r_xi {
        OutcomeCase::Interior
    } else {
        OutcomeCase::Capped
    };
    Ok((case, Some(xb)))
}

/// The principal's value `psi_z(v)` from outcome `z` when its continuation
/// value is `v`.
pub fn psi(interim: &Prior, v: f64, r_xi: f64, delta: f64) -> Result<f64> {
    let (case, xb) = classify(interim, v, r_xi, delta)?;
    Ok(match case {
        OutcomeCase::Optimistic => 0.0,
        OutcomeCase::Pessimistic => delta * v,
        OutcomeCase::Interior => {
            interim.expected_excess(delta * v + r_xi) - uninformative_excess(interim, r_xi)
                + delta * v
        }
        OutcomeCase::Capped => interim.cdf(xb.unwrap_or(r_xi)) * delta * v,
    })
}

/// `c` of the uninformative signal for `f`, `(E_f[theta] - r)^+`.
fn uninformative_excess(f: &Prior, r: f64) -> f64 {
    (f.mean() - r).max(0.0)
}

/// `E[(m - r)^+]` for the pass/fail split of `f` at `x`.
pub fn passfail_excess(f: &Prior, x: f64, r: f64) -> f64 {
    let fail = f.cdf(x);
    let moment = f.moment_below(x);
    let mut total = 0.0;
    if fail > 0.0 {
        total += fail * (moment / fail - r).max(0.0);
    }
    if fail < 1.0 {
        total += (1.0 - fail) * ((f.mean() - moment) / (1.0 - fail) - r).max(0.0);
    }
    total
}

/// Pass/fail signal for `f` at `x`, degenerating to the uninformative one
/// when a side is empty.
pub fn passfail_signal(f: &Prior, x: f64) -> Signal {
    let fail = f.cdf(x);
    if fail <= 0.0 || fail >= 1.0 {
        return Signal::Uninformative { mean: f.mean() };
    }
    let moment = f.moment_below(x);
    Signal::PassFail {
        cutoff: x,
        fail_mean: moment / fail,
        pass_mean: (f.mean() - moment) / (1.0 - fail),
    }
}

fn check_k(k: f64, k_max: f64) -> Result<()> {
    if !(k >= 0.0 && k <= k_max) {
        return Err(Error::Domain {
            what: "k",
            value: k,
            lo: 0.0,
            hi: k_max,
        });
    }
    Ok(())
}

/// Quantities every evaluation of `Phi` needs, computed once.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiContext {
    pub r_xi: f64,
    pub r_hi: f64,
    /// `xbar_z` for outcomes with `r_xi` inside their support.
    xbars: Vec<Option<f64>>,
}

impl PhiContext {
    pub fn new(model: &PublicSignalModel, r_xi: f64, r_hi: f64) -> Result<Self> {
        let xbars = model
            .outcomes
            .iter()
            .map(|o| {
                let (lo, hi) = o.interim.support();
                if r_xi >= lo && r_xi <= hi {
                    xbar(&o.interim, r_xi).map(Some)
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<_>>()?;
        Ok(Self { r_xi, r_hi, xbars })
    }

    pub fn k_max(&self) -> f64 {
        (self.r_hi - self.r_xi).max(0.0)
    }
}

/// Efficiency-loss functional at `k in [0, r_hi - r_xi]`.
pub fn phi(model: &PublicSignalModel, ctx: &PhiContext, k: f64) -> Result<f64> {
    check_k(k, ctx.k_max())?;
    let top = ctx.r_hi - k;
    let f = &model.prior;
    let mut value = -((ctx.r_hi - top) - f.cdf_integral_between(top, ctx.r_hi));
    for (o, xb) in model.outcomes.iter().zip(&ctx.xbars) {
        if ctx.r_xi < o.interim.lo() {
            value += o.weight * o.interim.cdf_integral_between(ctx.r_xi, top);
        } else if let Some(xb) = *xb {
            if xb < top {
                let area = o.interim.cdf_integral_between(xb, top) - o.interim.cdf(xb) * (top - xb);
                value += o.weight * area;
            }
        }
    }
    Ok(value)
}

/// Convenience wrapper building the context from the environment.
pub fn phi_at(env: &Environment, model: &PublicSignalModel, k: f64) -> Result<f64> {
    let ctx = phi_context(env, model)?;
    phi(model, &ctx, k)
}

pub fn phi_context(env: &Environment, model: &PublicSignalModel) -> Result<PhiContext> {
    check_prior(env, model)?;
    let g = public_posterior_mean_dist(model)?;
    let r_xi = reservation_value(env, &g)?.r;
    PhiContext::new(model, r_xi, benchmarks(env)?.r_hi)
}

fn check_prior(env: &Environment, model: &PublicSignalModel) -> Result<()> {
    if env.prior() != model.prior() {
        return Err(Error::InvalidModel(
            "public signal model was built for a different prior".into(),
        ));
    }
    Ok(())
}

/// What the principal offers after one public outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomePlan {
    pub label: String,
    pub weight: f64,
    pub case: OutcomeCase,
    pub xbar: Option<f64>,
    /// Pass/fail cutoff `x_z = min(xbar_z, delta V + r_xi)`; absent when
    /// nothing is sold.
    pub cutoff: Option<f64>,
    pub price: f64,
    pub psi: f64,
    /// Posterior-mean rule the agent faces in this outcome.
    pub signal: Signal,
}

/// Stationary equilibrium with a public signal.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicEquilibrium {
    pub agent_value: f64,
    pub principal_value: f64,
    pub r_xi: f64,
    pub k_star: f64,
    pub r_hi: f64,
    /// `k* - delta/(1-delta) Phi(k*)`.
    pub fixed_point_residual: f64,
    /// `sum xi(z) psi_z - V`.
    pub self_generation_residual: f64,
    pub phi_at_zero: f64,
    pub phi_at_max: f64,
    pub outcomes: Vec<OutcomePlan>,
}

/// Solves the public-signal equilibrium: `U = u(G^xi)`,
/// `V = u_hi - U - k*/delta`, and one pass/fail offer per outcome.
pub fn solve_public_equilibrium(
    env: &Environment,
    model: &PublicSignalModel,
) -> Result<PublicEquilibrium> {
    let b = benchmarks(env)?;
    let ctx = phi_context(env, model)?;
    let delta = env.delta();
    let ratio = delta / (1.0 - delta);
    let k_max = ctx.k_max();
    let h = |k: f64| ratio * phi(model, &ctx, k).unwrap_or(f64::NAN) - k;
    let phi_at_zero = phi(model, &ctx, 0.0)?;
    let phi_at_max = phi(model, &ctx, k_max)?;
    let k_star = if ratio * phi_at_zero <= 0.0 {
        0.0
    } else {
        bisect_decreasing("public fixed point", h, 0.0, k_max, env.solver())?
    };
    let fixed_point_residual = k_star - ratio * phi(model, &ctx, k_star)?;

    let r_xi = ctx.r_xi;
    let agent_value = r_xi / delta;
    let v = b.u_hi - agent_value - k_star / delta;
    let mut outcomes = Vec::with_capacity(model.outcomes.len());
    for o in &model.outcomes {
        let f = &o.interim;
        let (case, xb) = classify(f, v, r_xi, delta)?;
        let value = psi(f, v, r_xi, delta)?;
        let (cutoff, price, signal) = match case {
            OutcomeCase::Optimistic | OutcomeCase::Pessimistic => {
                (None, 0.0, Signal::Uninformative { mean: f.mean() })
            }
            OutcomeCase::Interior | OutcomeCase::Capped => {
                let x = xb.unwrap_or(r_xi).min(delta * v + r_xi);
                let price = (passfail_excess(f, x, r_xi) - uninformative_excess(f, r_xi)).max(0.0);
                (Some(x), price, passfail_signal(f, x))
            }
        };
        outcomes.push(OutcomePlan {
            label: o.label.clone(),
            weight: o.weight,
            case,
            xbar: xb,
            cutoff,
            price,
            psi: value,
            signal,
        });
    }
    let total: f64 = outcomes.iter().map(|p| p.weight * p.psi).sum();
    let self_generation_residual = total - v;
    if self_generation_residual.abs() > SELF_GENERATION_TOL {
        return Err(Error::Inconsistent(format!(
            "public self-generation fails: sum xi psi - V = {self_generation_residual:.3e}"
        )));
    }
    Ok(PublicEquilibrium {
        agent_value,
        principal_value: v,
        r_xi,
        k_star,
        r_hi: b.r_hi,
        fixed_point_residual,
        self_generation_residual,
        phi_at_zero,
        phi_at_max,
        outcomes,
    })
}

/// Result of the full-extraction test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FullExtraction {
    /// Some interim belief lacks full support on the prior's domain.
    NotApplicable,
    Holds,
    Fails,
}

/// With full-support interim beliefs, the principal extracts the whole
/// surplus `u_hi - u(G^xi)` iff `E_z[theta | theta <= r_hi] <= r_xi` for all z.
pub fn full_extraction_check(
    env: &Environment,
    model: &PublicSignalModel,
) -> Result<FullExtraction> {
    check_prior(env, model)?;
    let f = env.prior();
    let covers = model
        .outcomes
        .iter()
        .all(|o| o.interim.has_full_support() && o.interim.support() == f.support());
    if !covers {
        return Ok(FullExtraction::NotApplicable);
    }
    let ctx = phi_context(env, model)?;
    for o in &model.outcomes {
        if o.interim.conditional_mean_below(ctx.r_hi)? > ctx.r_xi {
            return Ok(FullExtraction::Fails);
        }
    }
    Ok(FullExtraction::Holds)
}
