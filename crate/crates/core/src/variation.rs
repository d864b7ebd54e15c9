//! Real-coded GA operators shared by the scalar GA and the Pareto algorithms.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qtable::{Bounds, Genotype};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub crossover_prob: f64,
    pub crossover_eta: f64,
    /// Per-variable mutation probability.
    pub mutation_prob: f64,
    pub mutation_eta: f64,
    pub tournament_size: usize,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            crossover_prob: 0.9,
            crossover_eta: 20.0,
            mutation_prob: 0.3,
            mutation_eta: 20.0,
            tournament_size: 2,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.crossover_prob) || !prob(self.mutation_prob) {
            return Err(Error::Config("GA probabilities must lie in [0, 1]".into()));
        }
        if !(self.crossover_eta > 0.0 && self.mutation_eta > 0.0) {
            return Err(Error::Config("distribution indices must be positive".into()));
        }
        if self.tournament_size == 0 {
            return Err(Error::Config("tournament size must be at least 1".into()));
        }
        Ok(())
    }
}

/// Index of the best of `k` members drawn uniformly with replacement.
/// `better(a, b)` is true when member `a` beats member `b`.
pub fn tournament_by<R, F>(n: usize, k: usize, rng: &mut R, better: F) -> Result<usize>
where
    R: Rng + ?Sized,
    F: Fn(usize, usize) -> bool,
{
    if n == 0 {
        return Err(Error::InvalidArgument("tournament on empty population".into()));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("tournament size must be at least 1".into()));
    }
    let mut best = rng.random_range(0..n);
    for _ in 1..k {
        let c = rng.random_range(0..n);
        if better(c, best) {
            best = c;
        }
    }
    Ok(best)
}

/// Tournament on scalar fitness (lower is better).
pub fn tournament_select<R: Rng + ?Sized>(fitness: &[f64], k: usize, rng: &mut R) -> Result<usize> {
    tournament_by(fitness.len(), k, rng, |a, b| fitness[a] < fitness[b])
}

/// Spread factor of SBX for a uniform draw `u`.
pub fn sbx_beta(u: f64, eta: f64) -> f64 {
    if u <= 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0))
    } else {
        (1.0 / (2.0 * (1.0 - u))).powf(1.0 / (eta + 1.0))
    }
}

/// SBX on a single gene pair for a given `u`, before clamping.
pub fn sbx_pair(p1: f64, p2: f64, u: f64, eta: f64) -> (f64, f64) {
    let b = sbx_beta(u, eta);
    (
        0.5 * ((1.0 + b) * p1 + (1.0 - b) * p2),
        0.5 * ((1.0 - b) * p1 + (1.0 + b) * p2),
    )
}

/// Simulated binary crossover. With probability `prob` every gene pair is
/// recombined with its own spread factor; otherwise the parents are copied.
pub fn sbx_crossover<R: Rng + ?Sized>(
    p1: &Genotype,
    p2: &Genotype,
    prob: f64,
    eta: f64,
    bounds: &Bounds,
    rng: &mut R,
) -> (Genotype, Genotype) {
    let mut c1 = p1.clone();
    let mut c2 = p2.clone();
    if rng.random::<f64>() < prob {
        for i in 0..p1.len() {
            let (a, b) = sbx_pair(p1[i], p2[i], rng.random(), eta);
            c1[i] = bounds.clamp(a);
            c2[i] = bounds.clamp(b);
        }
    }
    (c1, c2)
}

/// Polynomial perturbation `δ(u)` in units of the range.
pub fn pm_delta(u: f64, eta: f64) -> f64 {
    if u < 0.5 {
        (2.0 * u).powf(1.0 / (eta + 1.0)) - 1.0
    } else {
        1.0 - (2.0 * (1.0 - u)).powf(1.0 / (eta + 1.0))
    }
}

/// Polynomial mutation, each gene mutated independently with probability `prob`.
pub fn polynomial_mutation<R: Rng + ?Sized>(
    g: &Genotype,
    prob: f64,
    eta: f64,
    bounds: &Bounds,
    rng: &mut R,
) -> Genotype {
    let mut out = g.clone();
    for v in out.as_mut_slice() {
        if rng.random::<f64>() < prob {
            let d = pm_delta(rng.random(), eta);
            *v = bounds.clamp(*v + d * bounds.range());
        }
    }
    out
}

/// Builds `n` offspring by tournament, SBX and polynomial mutation.
/// `pick` draws one parent index.
pub fn make_offspring<R, F>(
    parents: &[Genotype],
    n: usize,
    cfg: &GaConfig,
    bounds: &Bounds,
    rng: &mut R,
    mut pick: F,
) -> Result<Vec<Genotype>>
where
    R: Rng + ?Sized,
    F: FnMut(&mut R) -> Result<usize>,
{
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let a = pick(rng)?;
        let b = pick(rng)?;
        let (c1, c2) = sbx_crossover(
            &parents[a],
            &parents[b],
            cfg.crossover_prob,
            cfg.crossover_eta,
            bounds,
            rng,
        );
        for c in [c1, c2] {
            out.push(polynomial_mutation(
                &c,
                cfg.mutation_prob,
                cfg.mutation_eta,
                bounds,
                rng,
            ));
        }
    }
    out.truncate(n);
    Ok(out)
}
