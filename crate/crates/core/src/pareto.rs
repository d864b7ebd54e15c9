//! Pareto-based search over `(fs_ratio, 1/psnr)`: NSGA-II with crowding
//! distance and NSGA-III with reference-direction niching.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{hypervolume_2d, reference_point};
use crate::objectives::{Evaluator, ObjectivePoint, ObjectiveRecord, Problem};
use crate::qtable::{random_population_with, Genotype};
use crate::scalar::RunBudget;
use crate::variation::{make_offspring, tournament_by, GaConfig};

/// True iff `a` is no worse than `b` everywhere and strictly better somewhere.
pub fn dominates(a: &ObjectivePoint, b: &ObjectivePoint) -> bool {
    a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontAssignment {
    /// 1-based front index of each point.
    pub rank: Vec<usize>,
    /// Member indices of each front, best first.
    pub fronts: Vec<Vec<usize>>,
}

/// Fast non-dominated sorting.
pub fn non_dominated_sort(points: &[ObjectivePoint]) -> FrontAssignment {
    let n = points.len();
    let mut dominated_by = vec![0usize; n];
    let mut dominating: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in i + 1..n {
            if dominates(&points[i], &points[j]) {
                dominating[i].push(j);
                dominated_by[j] += 1;
            } else if dominates(&points[j], &points[i]) {
                dominating[j].push(i);
                dominated_by[i] += 1;
            }
        }
    }
    let mut rank = vec![0; n];
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| dominated_by[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            rank[i] = fronts.len() + 1;
            for &j in &dominating[i] {
                dominated_by[j] -= 1;
                if dominated_by[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    FrontAssignment { rank, fronts }
}

/// Crowding distance of each member of one front. Boundary members are
/// infinite; an objective with zero range adds nothing.
pub fn crowding_distance(front: &[ObjectivePoint]) -> Vec<f64> {
    let n = front.len();
    let mut cd = vec![0.0; n];
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    for m in 0..2 {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| front[a].get(m).total_cmp(&front[b].get(m)));
        let lo = front[idx[0]].get(m);
        let hi = front[idx[n - 1]].get(m);
        cd[idx[0]] = f64::INFINITY;
        cd[idx[n - 1]] = f64::INFINITY;
        let range = hi - lo;
        if range <= 0.0 {
            continue;
        }
        for k in 1..n - 1 {
            cd[idx[k]] += (front[idx[k + 1]].get(m) - front[idx[k - 1]].get(m)) / range;
        }
    }
    cd
}

/// Rank and crowding distance of a population member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crowded {
    pub rank: usize,
    pub distance: f64,
}

/// Lower rank wins, then larger crowding distance, then a fair coin.
/// Returns true when `a` wins.
pub fn crowded_tournament<R: Rng + ?Sized>(a: &Crowded, b: &Crowded, rng: &mut R) -> bool {
    if a.rank != b.rank {
        return a.rank < b.rank;
    }
    if a.distance != b.distance {
        return a.distance > b.distance;
    }
    rng.random_bool(0.5)
}

/// Rank and crowding distance for every member.
pub fn assign_crowding(points: &[ObjectivePoint]) -> Vec<Crowded> {
    let fa = non_dominated_sort(points);
    let mut out = vec![
        Crowded {
            rank: 0,
            distance: 0.0
        };
        points.len()
    ];
    for front in &fa.fronts {
        let pts: Vec<ObjectivePoint> = front.iter().map(|&i| points[i]).collect();
        for (&i, d) in front.iter().zip(crowding_distance(&pts)) {
            out[i] = Crowded {
                rank: fa.rank[i],
                distance: d,
            };
        }
    }
    out
}

/// NSGA-II environmental selection of `n` members from `points`: whole fronts
/// first, then the last front by descending crowding distance.
pub fn nsga2_survival(points: &[ObjectivePoint], n: usize) -> Vec<usize> {
    let fa = non_dominated_sort(points);
    let mut chosen = Vec::with_capacity(n);
    for front in fa.fronts {
        if chosen.len() + front.len() <= n {
            chosen.extend(front);
            if chosen.len() == n {
                break;
            }
            continue;
        }
        let pts: Vec<ObjectivePoint> = front.iter().map(|&i| points[i]).collect();
        let cd = crowding_distance(&pts);
        let mut order: Vec<usize> = (0..front.len()).collect();
        // stable: equal distances keep their index order
        order.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]));
        let room = n - chosen.len();
        chosen.extend(order[..room].iter().map(|&k| front[k]));
        break;
    }
    chosen
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of simplex-lattice points, `C(M + P − 1, P)`.
pub fn das_dennis_count(m: usize, p: usize) -> usize {
    binomial(m + p - 1, p)
}

/// All points of the unit simplex in `m` dimensions whose coordinates are
/// multiples of `1/p`.
pub fn das_dennis(m: usize, p: usize) -> Result<Vec<Vec<f64>>> {
    if m < 2 || p < 1 {
        return Err(Error::InvalidArgument(format!(
            "reference lattice needs M >= 2 and P >= 1, got M={m}, P={p}"
        )));
    }
    fn rec(m: usize, left: usize, p: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if cur.len() == m - 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / p as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(m, left - c, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::with_capacity(das_dennis_count(m, p));
    rec(m, p, p, &mut Vec::new(), &mut out);
    Ok(out)
}

/// Min-max normalization of a point set (zero range maps to 0).
pub fn normalize(points: &[ObjectivePoint]) -> Vec<[f64; 2]> {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in points {
        for m in 0..2 {
            lo[m] = lo[m].min(p.get(m));
            hi[m] = hi[m].max(p.get(m));
        }
    }
    points
        .iter()
        .map(|p| {
            std::array::from_fn(|m| {
                let r = hi[m] - lo[m];
                if r > 0.0 {
                    (p.get(m) - lo[m]) / r
                } else {
                    0.0
                }
            })
        })
        .collect()
}

/// Distance from `x` to the line through the origin along `w`.
pub fn perpendicular_distance(x: &[f64], w: &[f64]) -> f64 {
    let ww: f64 = w.iter().map(|v| v * v).sum();
    let t = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / ww;
    x.iter()
        .zip(w)
        .map(|(a, b)| (a - t * b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Nearest reference line and the distance to it, for each normalized point.
pub fn associate(normalized: &[[f64; 2]], refs: &[Vec<f64>]) -> Vec<(usize, f64)> {
    normalized
        .iter()
        .map(|x| {
            let mut best = (0, f64::INFINITY);
            for (j, w) in refs.iter().enumerate() {
                let d = perpendicular_distance(x, w);
                if d < best.1 {
                    best = (j, d);
                }
            }
            best
        })
        .collect()
}

/// Picks `k` members of `last_front` by niche count. `association[i]` is the
/// reference line and distance of candidate `i`; `niche` holds the counts
/// from already selected members and is updated in place.
pub fn nsga3_niching<R: Rng + ?Sized>(
    k: usize,
    last_front: &[usize],
    association: &[(usize, f64)],
    niche: &mut [usize],
    rng: &mut R,
) -> Vec<usize> {
    let mut pool: Vec<usize> = last_front.to_vec();
    let mut active = vec![true; niche.len()];
    let mut chosen = Vec::with_capacity(k);
    while chosen.len() < k && !pool.is_empty() {
        let min = (0..niche.len())
            .filter(|&j| active[j])
            .map(|j| niche[j])
            .min()
            .expect("a line with candidates stays active");
        let lines: Vec<usize> = (0..niche.len())
            .filter(|&j| active[j] && niche[j] == min)
            .collect();
        let j = *lines.choose(rng).expect("non-empty");
        let members: Vec<usize> = pool
            .iter()
            .copied()
            .filter(|&i| association[i].0 == j)
            .collect();
        if members.is_empty() {
            active[j] = false;
            continue;
        }
        let pick = if niche[j] == 0 {
            *members
                .iter()
                .min_by(|&&a, &&b| association[a].1.total_cmp(&association[b].1))
                .expect("non-empty")
        } else {
            *members.choose(rng).expect("non-empty")
        };
        chosen.push(pick);
        niche[j] += 1;
        pool.retain(|&i| i != pick);
    }
    chosen
}

/// NSGA-III environmental selection of `n` members from `points`.
pub fn nsga3_survival<R: Rng + ?Sized>(
    points: &[ObjectivePoint],
    n: usize,
    refs: &[Vec<f64>],
    rng: &mut R,
) -> Vec<usize> {
    let fa = non_dominated_sort(points);
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut last: &[usize] = &[];
    for front in &fa.fronts {
        if chosen.len() + front.len() <= n {
            chosen.extend(front);
            if chosen.len() == n {
                return chosen;
            }
        } else {
            last = front;
            break;
        }
    }
    if last.is_empty() {
        return chosen;
    }
    let st: Vec<usize> = chosen.iter().chain(last).copied().collect();
    let st_points: Vec<ObjectivePoint> = st.iter().map(|&i| points[i]).collect();
    let local = associate(&normalize(&st_points), refs);
    let mut association = vec![(0, 0.0); points.len()];
    for (&i, a) in st.iter().zip(local) {
        association[i] = a;
    }
    let mut niche = vec![0usize; refs.len()];
    for &i in &chosen {
        niche[association[i].0] += 1;
    }
    let k = n - chosen.len();
    let extra = nsga3_niching(k, last, &association, &mut niche, rng);
    chosen.extend(extra);
    chosen
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ParetoAlgorithm {
    #[serde(rename = "EnNSGAII")]
    Nsga2,
    #[serde(rename = "EnNSGAIII")]
    Nsga3,
}

impl ParetoAlgorithm {
    pub const ALL: [ParetoAlgorithm; 2] = [ParetoAlgorithm::Nsga2, ParetoAlgorithm::Nsga3];

    pub fn name(self) -> &'static str {
        match self {
            ParetoAlgorithm::Nsga2 => "EnNSGAII",
            ParetoAlgorithm::Nsga3 => "EnNSGAIII",
        }
    }
}

impl std::fmt::Display for ParetoAlgorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ParetoAlgorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let l = s.to_ascii_lowercase().replace('-', "");
        match l.strip_prefix("en").unwrap_or(&l) {
            "nsgaii" | "nsga2" => Ok(ParetoAlgorithm::Nsga2),
            "nsgaiii" | "nsga3" => Ok(ParetoAlgorithm::Nsga3),
            _ => Err(Error::InvalidArgument(format!("unknown algorithm {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParetoConfig {
    pub ga: GaConfig,
    /// NSGA-III divisions; `pop_size − 1` when absent.
    pub divisions: Option<usize>,
    /// Reference point of the hypervolume trace; `1.05 × max` of the initial
    /// population when absent.
    pub hv_reference: Option<ObjectivePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoMember {
    pub genotype: Genotype,
    pub record: ObjectiveRecord,
}

impl ParetoMember {
    pub fn point(&self) -> ObjectivePoint {
        self.record.point()
    }
}

/// A mutually non-dominated set, sorted by `f1`, without objective-space duplicates.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParetoSet {
    pub members: Vec<ParetoMember>,
}

impl ParetoSet {
    /// First front of `members`, deduplicated in objective space.
    pub fn from_members(members: Vec<ParetoMember>) -> Self {
        let pts: Vec<ObjectivePoint> = members.iter().map(ParetoMember::point).collect();
        let fa = non_dominated_sort(&pts);
        let first = fa.fronts.first().cloned().unwrap_or_default();
        let mut keep: Vec<ParetoMember> = first.iter().map(|&i| members[i].clone()).collect();
        keep.sort_by(|a, b| {
            let (p, q) = (a.point(), b.point());
            p.f1.total_cmp(&q.f1).then(p.f2.total_cmp(&q.f2))
        });
        keep.dedup_by(|a, b| a.point() == b.point());
        Self { members: keep }
    }

    pub fn points(&self) -> Vec<ObjectivePoint> {
        self.members.iter().map(ParetoMember::point).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HvRow {
    pub nfe: usize,
    pub hypervolume: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParetoRun {
    pub algorithm: ParetoAlgorithm,
    pub front: ParetoSet,
    /// First front of the initial population.
    pub initial_front: ParetoSet,
    pub reference: ObjectivePoint,
    /// Hypervolume of the population's first front after initialization and
    /// after each generation.
    pub hv_trace: Vec<HvRow>,
    pub nfe: usize,
}

impl ParetoRun {
    pub fn initial_hv(&self) -> f64 {
        self.hv_trace.first().map_or(0.0, |r| r.hypervolume)
    }

    pub fn final_hv(&self) -> f64 {
        self.hv_trace.last().map_or(0.0, |r| r.hypervolume)
    }
}

fn members(pop: &[Genotype], recs: &[ObjectiveRecord]) -> Vec<ParetoMember> {
    pop.iter()
        .zip(recs)
        .map(|(g, r)| ParetoMember {
            genotype: g.clone(),
            record: *r,
        })
        .collect()
}

/// Runs NSGA-II or NSGA-III with a ChaCha8 stream seeded from `budget.seed`.
pub fn run_pareto<P: Problem + ?Sized>(
    algorithm: ParetoAlgorithm,
    problem: &P,
    budget: &RunBudget,
    config: &ParetoConfig,
) -> Result<ParetoRun> {
    if budget.pop_size < 2 {
        return Err(Error::Config("Pareto search needs a population of at least 2".into()));
    }
    if budget.nfe_max < budget.pop_size {
        return Err(Error::Config(format!(
            "nfe_max {} is smaller than the population {}",
            budget.nfe_max, budget.pop_size
        )));
    }
    config.ga.validate()?;
    let n = budget.pop_size;
    let refs = match algorithm {
        ParetoAlgorithm::Nsga3 => das_dennis(2, config.divisions.unwrap_or(n - 1))?,
        ParetoAlgorithm::Nsga2 => Vec::new(),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut ev = Evaluator::new(problem);
    let bounds = ev.bounds();

    let mut pop = random_population_with(n, &bounds, &mut rng)?;
    let mut recs = ev.evaluate_batch(&pop)?;
    let mut pts: Vec<ObjectivePoint> = recs.iter().map(ObjectiveRecord::point).collect();
    let reference = match config.hv_reference {
        Some(r) => r,
        None => reference_point([pts.as_slice()], 1.05)?,
    };
    let initial_front = ParetoSet::from_members(members(&pop, &recs));
    let mut hv_trace = vec![HvRow {
        nfe: ev.nfe(),
        hypervolume: hypervolume_2d(&initial_front.points(), reference)?,
    }];

    while ev.nfe() < budget.nfe_max {
        let kids = match algorithm {
            ParetoAlgorithm::Nsga2 => {
                let crowd = assign_crowding(&pts);
                make_offspring(&pop, n, &config.ga, &bounds, &mut rng, |r| {
                    // two-way crowded comparison; larger tournaments chain it
                    let mut best = r.random_range(0..n);
                    for _ in 1..config.ga.tournament_size.max(2) {
                        let c = r.random_range(0..n);
                        if crowded_tournament(&crowd[c], &crowd[best], r) {
                            best = c;
                        }
                    }
                    Ok(best)
                })?
            }
            ParetoAlgorithm::Nsga3 => {
                let rank = non_dominated_sort(&pts).rank;
                make_offspring(&pop, n, &config.ga, &bounds, &mut rng, |r| {
                    tournament_by(n, config.ga.tournament_size, r, |a, b| rank[a] < rank[b])
                })?
            }
        };
        let kid_recs = ev.evaluate_batch(&kids)?;
        let all_pop: Vec<Genotype> = pop.into_iter().chain(kids).collect();
        let all_recs: Vec<ObjectiveRecord> = recs.into_iter().chain(kid_recs).collect();
        let all_pts: Vec<ObjectivePoint> = all_recs.iter().map(ObjectiveRecord::point).collect();
        let keep = match algorithm {
            ParetoAlgorithm::Nsga2 => nsga2_survival(&all_pts, n),
            ParetoAlgorithm::Nsga3 => nsga3_survival(&all_pts, n, &refs, &mut rng),
        };
        if keep.len() != n {
            return Err(Error::Invariant(format!(
                "survival kept {} of {n} members",
                keep.len()
            )));
        }
        pop = keep.iter().map(|&i| all_pop[i].clone()).collect();
        recs = keep.iter().map(|&i| all_recs[i]).collect();
        pts = keep.iter().map(|&i| all_pts[i]).collect();
        let front = ParetoSet::from_members(members(&pop, &recs));
        hv_trace.push(HvRow {
            nfe: ev.nfe(),
            hypervolume: hypervolume_2d(&front.points(), reference)?,
        });
    }
    Ok(ParetoRun {
        algorithm,
        front: ParetoSet::from_members(members(&pop, &recs)),
        initial_front,
        reference,
        hv_trace,
        nfe: ev.nfe(),
    })
}
