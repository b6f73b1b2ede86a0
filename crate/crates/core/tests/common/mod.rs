//! Independent oracles and fixtures shared by the integration tests.
//!
//! Oracles use only CDF evaluations and numerical quadrature, never the
//! closed-form integrals the library relies on.

#![allow(dead_code)]

use persuaded_search::public::{Outcome, PublicSignalModel};
use persuaded_search::{Distribution, Environment, PmDist, Prior};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DELTA: f64 = 2.0 / 3.0;

/// `(3 - sqrt 5) / 2`, the root of `r = (1 - r)^2` in `(0, 1)`.
pub fn uniform_r_hi() -> f64 {
    (3.0 - 5f64.sqrt()) / 2.0
}

pub fn uniform_env() -> Environment {
    Environment::new(Prior::uniform(0.0, 1.0).unwrap(), DELTA).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two-point Gauss rule on `[a, b]`, exact for linear integrands.
fn gauss2(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = 0.5 * (b - a);
    let m = 0.5 * (a + b);
    let d = h / 3f64.sqrt();
    h * (f(m - d) + f(m + d))
}

/// `∫_a^b G(m) dm` by quadrature on `pieces` subintervals per breakpoint cell.
pub fn cdf_area(g: &dyn Distribution, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut cuts: Vec<f64> = g
        .breakpoints()
        .into_iter()
        .filter(|x| *x > a && *x < b)
        .collect();
    cuts.push(a);
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let cdf = |x: f64| g.cdf(x);
    cuts.windows(2)
        .map(|w| {
            let n = 4;
            (0..n)
                .map(|i| {
                    let lo = w[0] + (w[1] - w[0]) * i as f64 / n as f64;
                    let hi = w[0] + (w[1] - w[0]) * (i + 1) as f64 / n as f64;
                    gauss2(&cdf, lo, hi)
                })
                .sum::<f64>()
        })
        .sum()
}

/// `c_G(x) = ∫_x^hi (1 - G)` by quadrature.
pub fn c_oracle(g: &dyn Distribution, x: f64) -> f64 {
    let (_, hi) = g.support();
    (hi - x) - cdf_area(g, x, hi)
}

/// Mean by quadrature: `hi - ∫_lo^hi G`.
pub fn mean_oracle(g: &dyn Distribution) -> f64 {
    let (lo, hi) = g.support();
    hi - cdf_area(g, lo, hi)
}

/// `(F(x), E[theta | theta <= x], E[theta | theta > x])`, conditional means
/// by integration by parts on the CDF.
pub fn split_oracle(f: &Prior, x: f64) -> (f64, Option<f64>, Option<f64>) {
    let (lo, _) = f.support();
    let fx = f.cdf(x);
    let below = x * fx - cdf_area(f, lo, x);
    let mean = mean_oracle(f);
    let m1 = (fx > 0.0).then(|| below / fx);
    let m2 = (fx < 1.0).then(|| (mean - below) / (1.0 - fx));
    (fx, m1, m2)
}

/// Reservation value of `g` by bisection on the quadrature `c`.
pub fn reservation_oracle(g: &dyn Distribution, delta: f64) -> f64 {
    let (mut a, mut b) = g.support();
    let ratio = delta / (1.0 - delta);
    let h = |r: f64| ratio * c_oracle(g, r) - r;
    if h(a) <= 0.0 {
        return a;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if h(m) > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Principal's stationary value from a pass/fail split of `f` at `x` sold at
/// the binding price to an agent whose threshold is `r_lo`.
pub fn binary_value_oracle(f: &Prior, x: f64, r_lo: f64, delta: f64) -> f64 {
    let (fx, m1, m2) = split_oracle(f, x);
    let mut excess = 0.0;
    let mut stay = 0.0;
    for (mass, m) in [(fx, m1), (1.0 - fx, m2)] {
        if let Some(m) = m {
            if m > r_lo {
                excess += mass * (m - r_lo);
            } else {
                stay += mass;
            }
        }
    }
    let base = (mean_oracle(f) - r_lo).max(0.0);
    (excess - base) / (1.0 - delta * stay)
}

/// Best pass/fail value for one public outcome by direct cutoff search:
/// an `n`-point grid over the outcome's support, then repeated `n`-point
/// grids on the two cells around the incumbent (ties mean continue).
pub fn psi_grid(interim: &Prior, v: f64, r_xi: f64, delta: f64, n: usize) -> f64 {
    let base = (mean_oracle(interim) - r_xi).max(0.0);
    let value = |x: f64| {
        let (fx, m1, m2) = split_oracle(interim, x);
        let mut excess = 0.0;
        let mut stay = 0.0;
        for (mass, m) in [(fx, m1), (1.0 - fx, m2)] {
            if let Some(m) = m {
                if m > r_xi {
                    excess += mass * (m - r_xi);
                } else {
                    stay += mass;
                }
            }
        }
        (excess - base).max(0.0) + stay * delta * v
    };
    let (mut a, mut b) = interim.support();
    let mut best = f64::NEG_INFINITY;
    for _ in 0..4 {
        let step = (b - a) / n as f64;
        let mut arg = a;
        for i in 0..=n {
            let x = a + step * i as f64;
            let y = value(x);
            if y > best {
                best = y;
                arg = x;
            }
        }
        let (lo, hi) = interim.support();
        a = (arg - step).max(lo);
        b = (arg + step).min(hi);
    }
    best
}

/// Random full-support piecewise-linear prior with 2..=7 segments, paired
/// with a discount factor under which the agent searches.
pub fn random_environment(rng: &mut impl Rng) -> Environment {
    loop {
        let segments = rng.gen_range(2..=7);
        let lo: f64 = rng.gen_range(-0.5..0.5);
        let width: f64 = rng.gen_range(0.5..3.0);
        let mut xs: Vec<f64> = (0..segments - 1).map(|_| rng.gen_range(0.0..1.0)).collect();
        xs.sort_by(f64::total_cmp);
        let mut ws: Vec<f64> = (0..segments).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = ws.iter().sum();
        ws.iter_mut().for_each(|w| *w /= total);
        let mut knots = vec![(lo, 0.0)];
        let mut acc = 0.0;
        for (i, x) in xs.iter().enumerate() {
            acc += ws[i];
            knots.push((lo + width * x, acc));
        }
        knots.push((lo + width, 1.0));
        knots.dedup_by(|a, b| a.0 <= b.0);
        let Ok(prior) = Prior::from_knots(&knots) else {
            continue;
        };
        let delta = rng.gen_range(0.3..0.95);
        let Ok(env) = Environment::new(prior, delta) else {
            continue;
        };
        if env.assumption_holds() {
            return env;
        }
    }
}

/// Random monotone partition of the prior: pooled cells become atoms,
/// revealed cells keep the prior's shape.
pub fn random_mpc(f: &Prior, rng: &mut impl Rng) -> PmDist {
    let (lo, hi) = f.support();
    let n = rng.gen_range(0..5);
    let mut cuts: Vec<f64> = (0..n)
        .map(|_| lo + (hi - lo) * rng.gen_range(0.02..0.98))
        .collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    let reveal: Vec<bool> = (0..=cuts.len()).map(|_| rng.gen_bool(0.4)).collect();
    PmDist::partition(f, &cuts, &reveal).unwrap()
}

pub fn half_split_model() -> PublicSignalModel {
    PublicSignalModel::new(
        Prior::uniform(0.0, 1.0).unwrap(),
        vec![
            outcome("low", 0.5, Prior::uniform(0.0, 0.5).unwrap()),
            outcome("high", 0.5, Prior::uniform(0.5, 1.0).unwrap()),
        ],
    )
    .unwrap()
}

/// 10% of the time the quality is revealed to lie in `[0.35, 0.45]`.
pub fn reveal_interval_model() -> PublicSignalModel {
    let d = 10.0 / 9.0;
    let rest =
        Prior::interim_from_knots(&[(0.0, 0.0), (0.35, 0.35 * d), (0.45, 0.35 * d), (1.0, 1.0)])
            .unwrap();
    PublicSignalModel::new(
        Prior::uniform(0.0, 1.0).unwrap(),
        vec![
            outcome("a", 0.1, Prior::uniform(0.35, 0.45).unwrap()),
            outcome("b", 0.9, rest),
        ],
    )
    .unwrap()
}

/// Full-support split where a small outcome concentrates mass just below
/// the efficient threshold.
pub fn tilted_model() -> PublicSignalModel {
    let w = 0.05;
    let f1 = [(0.0, 0.0), (0.33, 0.033), (0.38, 0.938), (1.0, 1.0)];
    let f2: Vec<(f64, f64)> = f1
        .iter()
        .map(|&(x, y)| (x, (x - w * y) / (1.0 - w)))
        .collect();
    PublicSignalModel::new(
        Prior::uniform(0.0, 1.0).unwrap(),
        vec![
            outcome("tilted", w, Prior::from_knots(&f1).unwrap()),
            outcome("rest", 1.0 - w, Prior::from_knots(&f2).unwrap()),
        ],
    )
    .unwrap()
}

pub fn outcome(label: &str, weight: f64, interim: Prior) -> Outcome {
    Outcome {
        label: label.into(),
        weight,
        interim,
    }
}
