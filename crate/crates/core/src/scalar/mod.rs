//! Single-objective metaheuristics minimizing the scalarized fitness under a
//! fixed budget of function evaluations (NFE).
//!
//! Every loop runs while `NFE < nfe_max` and spends one population per
//! iteration, so a budget that is a multiple of the population size is used
//! exactly.

pub mod pso;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objectives::{Evaluator, ObjectiveRecord, Problem};
use crate::qtable::{random_population_with, Bounds, Genotype};
use crate::variation::{make_offspring, tournament_select};

pub use crate::variation::GaConfig;
pub use pso::{PsoConfig, PsoState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunBudget {
    pub pop_size: usize,
    pub nfe_max: usize,
    pub seed: u64,
}

impl Default for RunBudget {
    fn default() -> Self {
        Self {
            pop_size: 50,
            nfe_max: 1000,
            seed: 0,
        }
    }
}

impl RunBudget {
    pub fn validate(&self, algorithm: Algorithm) -> Result<()> {
        if algorithm == Algorithm::Ps {
            if self.nfe_max == 0 {
                return Err(Error::Config("pattern search needs nfe_max >= 1".into()));
            }
            return Ok(());
        }
        if self.pop_size == 0 {
            return Err(Error::Config("population size must be at least 1".into()));
        }
        if self.nfe_max < self.pop_size {
            return Err(Error::Config(format!(
                "nfe_max {} is smaller than the population {}",
                self.nfe_max, self.pop_size
            )));
        }
        if algorithm == Algorithm::De && self.pop_size < 4 {
            return Err(Error::Config(
                "differential evolution needs a population of at least 4".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DeConfig {
    pub cr: f64,
    pub sf_min: f64,
    pub sf_max: f64,
}

impl Default for DeConfig {
    fn default() -> Self {
        Self {
            cr: 0.2,
            sf_min: 0.5,
            sf_max: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EsConfig {
    /// Mutation standard deviation in genotype units.
    pub sigma: f64,
    /// Offspring per generation; the population size when absent.
    pub lambda: Option<usize>,
}

impl Default for EsConfig {
    fn default() -> Self {
        Self {
            sigma: 0.1 * Bounds::default().range(),
            lambda: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PsConfig {
    /// Initial step as a fraction of the range.
    pub rho: f64,
    /// Once the step falls below this fraction it is reset to `rho`, since
    /// smaller moves no longer change the rounded tables.
    pub min_rho: f64,
}

impl Default for PsConfig {
    fn default() -> Self {
        Self {
            rho: 0.5,
            min_rho: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScalarConfig {
    pub ga: GaConfig,
    pub de: DeConfig,
    pub pso: PsoConfig,
    pub es: EsConfig,
    pub ps: PsConfig,
}

impl ScalarConfig {
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        self.ga.validate()?;
        self.pso.validate()?;
        if !(0.0..=1.0).contains(&self.de.cr) {
            return Err(Error::Config("DE crossover rate must lie in [0, 1]".into()));
        }
        if !(self.de.sf_min > 0.0 && self.de.sf_min <= self.de.sf_max) {
            return Err(Error::Config("DE scale-factor interval is invalid".into()));
        }
        if !(self.es.sigma > 0.0) || self.es.lambda == Some(0) {
            return Err(Error::Config("ES needs sigma > 0 and lambda >= 1".into()));
        }
        if !(self.ps.rho > 0.0 && self.ps.rho <= 1.0 && self.ps.min_rho > 0.0 && self.ps.min_rho < self.ps.rho) {
            return Err(Error::Config("pattern search needs 0 < min_rho < rho <= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "EnMOGA")]
    Ga,
    #[serde(rename = "EnMODE")]
    De,
    #[serde(rename = "EnMOPSO")]
    Pso,
    #[serde(rename = "EnMOES")]
    Es,
    #[serde(rename = "EnMOPS")]
    Ps,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Ga,
        Algorithm::De,
        Algorithm::Pso,
        Algorithm::Es,
        Algorithm::Ps,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ga => "EnMOGA",
            Algorithm::De => "EnMODE",
            Algorithm::Pso => "EnMOPSO",
            Algorithm::Es => "EnMOES",
            Algorithm::Ps => "EnMOPS",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let l = s.to_ascii_lowercase();
        let l = l.strip_prefix("enmo").unwrap_or(&l);
        match l {
            "ga" => Ok(Algorithm::Ga),
            "de" => Ok(Algorithm::De),
            "pso" => Ok(Algorithm::Pso),
            "es" => Ok(Algorithm::Es),
            "ps" => Ok(Algorithm::Ps),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm {s:?}"))),
        }
    }
}

/// Best-so-far after a generation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub nfe: usize,
    pub best_scalar: f64,
    pub best_fs: f64,
    pub best_psnr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub algorithm: Algorithm,
    pub best: Genotype,
    pub record: ObjectiveRecord,
    /// One row after initialization and one per iteration.
    pub trace: Vec<TraceRow>,
    pub nfe: usize,
}

/// Elitist record of the best evaluated genotype.
struct Incumbent {
    genotype: Genotype,
    record: ObjectiveRecord,
    trace: Vec<TraceRow>,
}

impl Incumbent {
    fn from_batch(pop: &[Genotype], recs: &[ObjectiveRecord]) -> Self {
        let i = best_index(recs);
        Self {
            genotype: pop[i].clone(),
            record: recs[i],
            trace: Vec::new(),
        }
    }

    fn offer(&mut self, g: &Genotype, r: &ObjectiveRecord) {
        if r.scalar_value < self.record.scalar_value {
            self.genotype = g.clone();
            self.record = *r;
        }
    }

    fn offer_batch(&mut self, pop: &[Genotype], recs: &[ObjectiveRecord]) {
        let i = best_index(recs);
        self.offer(&pop[i], &recs[i]);
    }

    fn log(&mut self, nfe: usize) {
        self.trace.push(TraceRow {
            nfe,
            best_scalar: self.record.scalar_value,
            best_fs: self.record.fs_ratio,
            best_psnr: self.record.psnr_db,
        });
    }

    fn finish(self, algorithm: Algorithm, nfe: usize) -> RunResult {
        RunResult {
            algorithm,
            best: self.genotype,
            record: self.record,
            trace: self.trace,
            nfe,
        }
    }
}

fn best_index(recs: &[ObjectiveRecord]) -> usize {
    let mut best = 0;
    for (i, r) in recs.iter().enumerate() {
        if r.scalar_value < recs[best].scalar_value {
            best = i;
        }
    }
    best
}

fn scalars(recs: &[ObjectiveRecord]) -> Vec<f64> {
    recs.iter().map(|r| r.scalar_value).collect()
}

/// Runs one algorithm on `problem` with a ChaCha8 stream seeded from `budget.seed`.
pub fn run_scalar<P: Problem + ?Sized>(
    algorithm: Algorithm,
    problem: &P,
    budget: &RunBudget,
    config: &ScalarConfig,
) -> Result<RunResult> {
    budget.validate(algorithm)?;
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut ev = Evaluator::new(problem);
    match algorithm {
        Algorithm::Ga => ga(&mut ev, budget, &config.ga, &mut rng),
        Algorithm::De => de(&mut ev, budget, &config.de, &mut rng),
        Algorithm::Pso => pso_run(&mut ev, budget, &config.pso, &mut rng),
        Algorithm::Es => es(&mut ev, budget, &config.es, &mut rng),
        Algorithm::Ps => ps(&mut ev, budget, &config.ps, &mut rng),
    }
}

type Ev<'a, 'b, P> = &'a mut Evaluator<'b, P>;

fn init<P: Problem + ?Sized>(
    ev: Ev<'_, '_, P>,
    budget: &RunBudget,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<Genotype>, Vec<ObjectiveRecord>, Incumbent)> {
    let pop = random_population_with(budget.pop_size, &ev.bounds(), rng)?;
    let recs = ev.evaluate_batch(&pop)?;
    let mut inc = Incumbent::from_batch(&pop, &recs);
    inc.log(ev.nfe());
    Ok((pop, recs, inc))
}

fn ga<P: Problem + ?Sized>(
    ev: Ev<'_, '_, P>,
    budget: &RunBudget,
    cfg: &GaConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RunResult> {
    let bounds = ev.bounds();
    let (mut pop, mut recs, mut inc) = init(ev, budget, rng)?;
    while ev.nfe() < budget.nfe_max {
        let fit = scalars(&recs);
        let children = make_offspring(&pop, pop.len(), cfg, &bounds, rng, |r| {
            tournament_select(&fit, cfg.tournament_size, r)
        })?;
        recs = ev.evaluate_batch(&children)?;
        pop = children;
        inc.offer_batch(&pop, &recs);
        inc.log(ev.nfe());
    }
    Ok(inc.finish(Algorithm::Ga, ev.nfe()))
}

/// `r1 + sf·(r2 − r3)`, clamped into `bounds`.
pub fn de_mutant(r1: &Genotype, r2: &Genotype, r3: &Genotype, sf: f64, bounds: &Bounds) -> Genotype {
    Genotype::new(
        (0..r1.len())
            .map(|k| bounds.clamp(r1[k] + sf * (r2[k] - r3[k])))
            .collect(),
    )
}

/// Binomial crossover; gene `forced` always comes from the mutant.
pub fn binomial_crossover<R: Rng + ?Sized>(
    target: &Genotype,
    mutant: &Genotype,
    cr: f64,
    forced: usize,
    rng: &mut R,
) -> Genotype {
    Genotype::new(
        (0..target.len())
            .map(|k| {
                if k == forced || rng.random::<f64>() < cr {
                    mutant[k]
                } else {
                    target[k]
                }
            })
            .collect(),
    )
}

/// Three distinct indices different from `target`.
pub fn de_donors<R: Rng + ?Sized>(n: usize, target: usize, rng: &mut R) -> Result<[usize; 3]> {
    if n < 4 {
        return Err(Error::Config(
            "differential evolution needs a population of at least 4".into(),
        ));
    }
    let picks = sample(rng, n - 1, 3);
    let shift = |i: usize| if i >= target { i + 1 } else { i };
    Ok([shift(picks.index(0)), shift(picks.index(1)), shift(picks.index(2))])
}

fn de<P: Problem + ?Sized>(
    ev: Ev<'_, '_, P>,
    budget: &RunBudget,
    cfg: &DeConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RunResult> {
    let bounds = ev.bounds();
    let (mut pop, mut recs, mut inc) = init(ev, budget, rng)?;
    let n = pop.len();
    while ev.nfe() < budget.nfe_max {
        let sf = rng.random_range(cfg.sf_min..=cfg.sf_max);
        let mut trials = Vec::with_capacity(n);
        for i in 0..n {
            let [a, b, c] = de_donors(n, i, rng)?;
            let v = de_mutant(&pop[a], &pop[b], &pop[c], sf, &bounds);
            let forced = rng.random_range(0..v.len());
            trials.push(binomial_crossover(&pop[i], &v, cfg.cr, forced, rng));
        }
        let trial_recs = ev.evaluate_batch(&trials)?;
        for (i, (t, r)) in trials.into_iter().zip(trial_recs).enumerate() {
            if r.scalar_value <= recs[i].scalar_value {
                pop[i] = t;
                recs[i] = r;
            }
        }
        inc.offer_batch(&pop, &recs);
        inc.log(ev.nfe());
    }
    Ok(inc.finish(Algorithm::De, ev.nfe()))
}

fn pso_run<P: Problem + ?Sized>(
    ev: Ev<'_, '_, P>,
    budget: &RunBudget,
    cfg: &PsoConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RunResult> {
    let bounds = ev.bounds();
    let (pop, recs, mut inc) = init(ev, budget, rng)?;
    let mut swarm = PsoState::new(pop, &scalars(&recs), cfg, &bounds, rng);
    while ev.nfe() < budget.nfe_max {
        swarm.advance(cfg, &bounds, rng);
        let recs = ev.evaluate_batch(&swarm.positions)?;
        swarm.absorb(&scalars(&recs));
        inc.offer_batch(&swarm.positions, &recs);
        inc.log(ev.nfe());
    }
    Ok(inc.finish(Algorithm::Pso, ev.nfe()))
}

/// Parent plus i.i.d. `N(0, σ²)` per gene, clamped.
pub fn es_offspring<R: Rng + ?Sized>(
    parent: &Genotype,
    sigma: f64,
    bounds: &Bounds,
    rng: &mut R,
) -> Result<Genotype> {
    let normal = Normal::new(0.0, sigma)
        .map_err(|e| Error::InvalidArgument(format!("sigma {sigma}: {e}")))?;
    Ok(Genotype::new(
        parent
            .iter()
            .map(|&x| bounds.clamp(x + normal.sample(rng)))
            .collect(),
    ))
}

fn es<P: Problem + ?Sized>(
    ev: Ev<'_, '_, P>,
    budget: &RunBudget,
    cfg: &EsConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RunResult> {
    let bounds = ev.bounds();
    let (mut pop, mut recs, mut inc) = init(ev, budget, rng)?;
    let mu = pop.len();
    let lambda = cfg.lambda.unwrap_or(mu);
    while ev.nfe() < budget.nfe_max {
        let kids = (0..lambda)
            .map(|_| es_offspring(&pop[rng.random_range(0..mu)], cfg.sigma, &bounds, rng))
            .collect::<Result<Vec<_>>>()?;
        let kid_recs = ev.evaluate_batch(&kids)?;
        inc.offer_batch(&kids, &kid_recs);
        // plus-selection; the stable sort keeps parents ahead on ties
        let mut pool: Vec<(Genotype, ObjectiveRecord)> = pop
            .into_iter()
            .zip(recs)
            .chain(kids.into_iter().zip(kid_recs))
            .collect();
        pool.sort_by(|a, b| a.1.scalar_value.total_cmp(&b.1.scalar_value));
        pool.truncate(mu);
        (pop, recs) = pool.into_iter().unzip();
        inc.log(ev.nfe());
    }
    Ok(inc.finish(Algorithm::Es, ev.nfe()))
}

/// Uniformly random unit vector.
pub fn random_direction<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// `x + sign·ρ·range·u`, clamped.
pub fn ps_trial(x: &Genotype, u: &[f64], rho: f64, sign: f64, bounds: &Bounds) -> Genotype {
    let step = sign * rho * bounds.range();
    Genotype::new(
        x.iter()
            .zip(u)
            .map(|(&a, &d)| bounds.clamp(a + step * d))
            .collect(),
    )
}

/// Outcome of one exploratory move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PsMove {
    Plus,
    Minus,
    Failed,
    /// Budget ran out before the opposite direction could be tried.
    Truncated,
}

/// One exploratory move with step `rho`. `evaluate` scores a trial and
/// returns `None` when the budget is exhausted. Returns the move taken and the
/// updated step.
pub fn ps_step<R, F>(
    x: &mut Genotype,
    fx: &mut ObjectiveRecord,
    rho: f64,
    bounds: &Bounds,
    rng: &mut R,
    mut evaluate: F,
) -> Result<(PsMove, f64)>
where
    R: Rng + ?Sized,
    F: FnMut(&Genotype) -> Result<Option<ObjectiveRecord>>,
{
    let u = random_direction(x.len(), rng);
    for (sign, mv) in [(1.0, PsMove::Plus), (-1.0, PsMove::Minus)] {
        let t = ps_trial(x, &u, rho, sign, bounds);
        let Some(r) = evaluate(&t)? else {
            return Ok((PsMove::Truncated, rho));
        };
        if r.scalar_value < fx.scalar_value {
            *x = t;
            *fx = r;
            return Ok((mv, rho));
        }
    }
    Ok((PsMove::Failed, rho / 2.0))
}

fn ps<P: Problem + ?Sized>(
    ev: Ev<'_, '_, P>,
    budget: &RunBudget,
    cfg: &PsConfig,
    rng: &mut ChaCha8Rng,
) -> Result<RunResult> {
    let bounds = ev.bounds();
    let mut x = bounds.sample(rng);
    let mut fx = ev.evaluate(&x)?;
    let mut inc = Incumbent {
        genotype: x.clone(),
        record: fx,
        trace: Vec::new(),
    };
    inc.log(ev.nfe());
    let mut rho = cfg.rho;
    while ev.nfe() < budget.nfe_max {
        let nfe_max = budget.nfe_max;
        let (_, r) = ps_step(&mut x, &mut fx, rho, &bounds, rng, |t| {
            if ev.nfe() >= nfe_max {
                return Ok(None);
            }
            ev.evaluate(t).map(Some)
        })?;
        rho = if r < cfg.min_rho { cfg.rho } else { r };
        inc.offer(&x, &fx);
        inc.log(ev.nfe());
    }
    Ok(inc.finish(Algorithm::Ps, ev.nfe()))
}

/// Best of `budget.nfe_max` uniform samples, as a baseline for the optimizers.
pub fn random_search<P: Problem + ?Sized>(
    problem: &P,
    budget: &RunBudget,
) -> Result<(Genotype, ObjectiveRecord)> {
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut ev = Evaluator::new(problem);
    let pop = random_population_with(budget.nfe_max.max(1), &ev.bounds(), &mut rng)?;
    let recs = ev.evaluate_batch(&pop)?;
    let i = best_index(&recs);
    Ok((pop[i].clone(), recs[i]))
}
