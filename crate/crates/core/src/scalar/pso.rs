//! Particle swarm with evolutionary-state-driven coefficient control.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qtable::{Bounds, Genotype};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsoConfig {
    pub c1: f64,
    pub c2: f64,
    pub omega0: f64,
    /// Velocity limit as a fraction of the range.
    pub vmax_frac: f64,
    pub step: f64,
    pub slight_step: f64,
    pub c_min: f64,
    pub c_max: f64,
    pub c_sum_max: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            c1: 2.0,
            c2: 2.0,
            omega0: 0.9,
            vmax_frac: 0.2,
            step: 0.05,
            slight_step: 0.025,
            c_min: 1.5,
            c_max: 2.5,
            c_sum_max: 4.0,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.vmax_frac > 0.0 && self.c_min <= self.c_max && self.c_sum_max > 0.0) {
            return Err(Error::Config("invalid PSO configuration".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvoState {
    Convergence,
    Exploitation,
    Exploration,
    JumpingOut,
}

/// Interval classification of the evolutionary factor.
pub fn classify(ef: f64) -> EvoState {
    if ef < 0.25 {
        EvoState::Convergence
    } else if ef < 0.5 {
        EvoState::Exploitation
    } else if ef < 0.75 {
        EvoState::Exploration
    } else {
        EvoState::JumpingOut
    }
}

/// Sigmoid inertia weight.
pub fn inertia(ef: f64) -> f64 {
    1.0 / (1.0 + 1.5 * (-2.6 * ef).exp())
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Mean Euclidean distance of each particle to all others.
pub fn mean_distances(positions: &[Genotype]) -> Vec<f64> {
    let n = positions.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let mut d = vec![0.0; n];
    for i in 0..n {
        for j in i + 1..n {
            let e = euclid(positions[i].as_slice(), positions[j].as_slice());
            d[i] += e;
            d[j] += e;
        }
    }
    for v in &mut d {
        *v /= (n - 1) as f64;
    }
    d
}

/// `(d_g - d_min) / (d_max - d_min)`, or 0 when all distances coincide.
// negated comparisons below also catch NaN
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn evolutionary_factor(distances: &[f64], g: usize) -> f64 {
    let min = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let max = distances.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > min) {
        return 0.0;
    }
    ((distances[g] - min) / (max - min)).clamp(0.0, 1.0)
}

/// Applies the state's acceleration-coefficient rule, then clamps and normalizes.
pub fn adjust_coefficients(c1: f64, c2: f64, state: EvoState, cfg: &PsoConfig) -> (f64, f64) {
    let (s, h) = (cfg.step, cfg.slight_step);
    let (mut a, mut b) = match state {
        EvoState::Exploration => (c1 + s, c2 - s),
        EvoState::Exploitation => (c1 + h, c2 - h),
        EvoState::Convergence => (c1 + h, c2 + h),
        EvoState::JumpingOut => (c1 - s, c2 + s),
    };
    a = a.clamp(cfg.c_min, cfg.c_max);
    b = b.clamp(cfg.c_min, cfg.c_max);
    let sum = a + b;
    if sum > cfg.c_sum_max {
        a *= cfg.c_sum_max / sum;
        b *= cfg.c_sum_max / sum;
    }
    (a, b)
}

/// Swarm state between evaluations.
#[derive(Debug, Clone)]
pub struct PsoState {
    pub positions: Vec<Genotype>,
    pub velocities: Vec<Vec<f64>>,
    pub pbest: Vec<Genotype>,
    pub pbest_fit: Vec<f64>,
    /// Index of the particle whose personal best is the global best.
    pub gbest: usize,
    pub c1: f64,
    pub c2: f64,
    pub omega: f64,
    pub ef: f64,
    pub state: EvoState,
}

impl PsoState {
    /// Swarm at evaluated initial positions with velocities uniform in `±v_max`.
    pub fn new<R: Rng + ?Sized>(
        positions: Vec<Genotype>,
        fitness: &[f64],
        cfg: &PsoConfig,
        bounds: &Bounds,
        rng: &mut R,
    ) -> Self {
        let vmax = cfg.vmax_frac * bounds.range();
        let velocities = positions
            .iter()
            .map(|p| (0..p.len()).map(|_| rng.random_range(-vmax..=vmax)).collect())
            .collect();
        let gbest = argmin(fitness);
        Self {
            pbest: positions.clone(),
            positions,
            velocities,
            pbest_fit: fitness.to_vec(),
            gbest,
            c1: cfg.c1,
            c2: cfg.c2,
            omega: cfg.omega0,
            ef: 0.0,
            state: EvoState::Exploration,
        }
    }

    pub fn gbest_fit(&self) -> f64 {
        self.pbest_fit[self.gbest]
    }

    /// Estimates the evolutionary state, adapts `c1`, `c2` and `ω`, then moves
    /// every particle. The new positions still need evaluating.
    pub fn advance<R: Rng + ?Sized>(&mut self, cfg: &PsoConfig, bounds: &Bounds, rng: &mut R) {
        let d = mean_distances(&self.positions);
        self.ef = evolutionary_factor(&d, self.gbest);
        self.state = classify(self.ef);
        (self.c1, self.c2) = adjust_coefficients(self.c1, self.c2, self.state, cfg);
        self.omega = inertia(self.ef);

        let vmax = cfg.vmax_frac * bounds.range();
        let g = self.pbest[self.gbest].clone();
        for i in 0..self.positions.len() {
            let x = self.positions[i].as_mut_slice();
            let v = &mut self.velocities[i];
            let p = self.pbest[i].as_slice();
            for k in 0..x.len() {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let nv = self.omega * v[k]
                    + self.c1 * r1 * (p[k] - x[k])
                    + self.c2 * r2 * (g[k] - x[k]);
                v[k] = nv.clamp(-vmax, vmax);
                x[k] = bounds.clamp(x[k] + v[k]);
            }
        }
    }

    /// Updates personal and global bests from the fitness of the current positions.
    pub fn absorb(&mut self, fitness: &[f64]) {
        for (i, &f) in fitness.iter().enumerate() {
            if f < self.pbest_fit[i] {
                self.pbest_fit[i] = f;
                self.pbest[i] = self.positions[i].clone();
            }
        }
        let best = argmin(&self.pbest_fit);
        if self.pbest_fit[best] < self.pbest_fit[self.gbest] {
            self.gbest = best;
        }
    }
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = i;
        }
    }
    best
}
