//! Steady-state genetic algorithm over 95-bit feature masks.
//!
//! Parents are chosen by binary tournament, children by uniform crossover and
//! per-bit mutation; each child replaces the current worst individual when it
//! is at least as fit. Fitness is supplied by the caller (typically training
//! accuracy of a classifier under the candidate mask).

use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::alphabet::ALPHABET_LEN;
use crate::corpus::FeatureVector;
use crate::error::{Error, Result};
use crate::seed::seeded_rng;

/// A 95-bit mask selecting active features.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FeatureMask {
    bits: Vec<bool>,
}

impl FeatureMask {
    pub fn from_bits(bits: Vec<bool>) -> Result<Self> {
        if bits.len() != ALPHABET_LEN {
            return Err(Error::Shape { expected: ALPHABET_LEN, got: bits.len() });
        }
        Ok(Self { bits })
    }

    pub fn all_ones() -> Self {
        Self { bits: vec![true; ALPHABET_LEN] }
    }

    pub fn all_zeros() -> Self {
        Self { bits: vec![false; ALPHABET_LEN] }
    }

    /// Each bit set with probability 1/2; an all-zero draw is repaired by
    /// setting one uniformly chosen bit.
    pub fn random(rng: &mut impl Rng) -> Self {
        let mut mask = Self { bits: (0..ALPHABET_LEN).map(|_| rng.gen_bool(0.5)).collect() };
        mask.repair(rng);
        mask
    }

    fn repair(&mut self, rng: &mut impl Rng) {
        if self.bits.iter().all(|&b| !b) {
            let j = rng.gen_range(0..ALPHABET_LEN);
            self.bits[j] = true;
        }
    }

    pub fn bit(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Number of active features.
    pub fn count_active(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Keep only the active components of a full-width row.
    pub fn select(&self, values: &[f64]) -> Vec<f64> {
        self.bits
            .iter()
            .zip(values)
            .filter_map(|(&keep, &v)| if keep { Some(v) } else { None })
            .collect()
    }

    pub fn to_bit_string(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }

    pub fn from_bit_string(s: &str) -> Result<Self> {
        let bits: Vec<bool> = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Config(format!("invalid mask bit {other:?}"))),
            })
            .collect::<Result<_>>()?;
        Self::from_bits(bits)
    }
}

impl Serialize for FeatureMask {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bit_string())
    }
}

impl<'de> Deserialize<'de> for FeatureMask {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        FeatureMask::from_bit_string(&s).map_err(serde::de::Error::custom)
    }
}

/// Elementwise product of mask and vector: inactive components become zero.
pub fn apply_mask(mask: &FeatureMask, v: &FeatureVector) -> FeatureVector {
    let values = mask
        .bits
        .iter()
        .zip(&v.values)
        .map(|(&keep, &x)| if keep { x } else { 0.0 })
        .collect();
    FeatureVector { values, doc_id: v.doc_id.clone() }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    pub mutation_rate: f64,
    pub max_evaluations: usize,
    pub target_fitness: f64,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 30,
            mutation_rate: 0.5,
            max_evaluations: 1000,
            target_fitness: 0.99754,
            seed: 0,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<()> {
        if self.population_size < 2 {
            return Err(Error::Config("population_size must be at least 2".into()));
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(Error::Config("mutation_rate must be in [0, 1]".into()));
        }
        Ok(())
    }
}

/// One population member with its cached fitness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Individual {
    pub mask: FeatureMask,
    pub fitness: f64,
    /// Evaluation counter value when this individual was scored.
    pub evaluated_at: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaRunResult {
    pub best: Individual,
    pub population: Vec<Individual>,
    pub evaluations_used: usize,
    /// (evaluation index, best fitness so far); non-decreasing in fitness.
    pub fitness_trace: Vec<(usize, f64)>,
}

/// Binary tournament: draw two distinct individuals uniformly and return the
/// fitter one (ties go to the first drawn).
pub fn binary_tournament<'a>(
    population: &'a [Individual],
    rng: &mut impl Rng,
) -> Result<&'a Individual> {
    let n = population.len();
    if n < 2 {
        return Err(Error::Selection(format!("tournament needs at least 2 individuals, got {n}")));
    }
    let i = rng.gen_range(0..n);
    let mut j = rng.gen_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    if population[j].fitness > population[i].fitness {
        Ok(&population[j])
    } else {
        Ok(&population[i])
    }
}

/// Uniform crossover: each bit copied from either parent with probability 1/2.
pub fn uniform_crossover(p1: &FeatureMask, p2: &FeatureMask, rng: &mut impl Rng) -> FeatureMask {
    let bits = p1
        .bits
        .iter()
        .zip(&p2.bits)
        .map(|(&a, &b)| if rng.gen_bool(0.5) { a } else { b })
        .collect();
    FeatureMask { bits }
}

/// Flip each bit independently with probability `rate`; an all-zero result is
/// repaired by setting one uniformly chosen bit.
pub fn mutate(mask: &FeatureMask, rate: f64, rng: &mut impl Rng) -> FeatureMask {
    let bits = mask
        .bits
        .iter()
        .map(|&b| {
            let flip = match rate {
                r if r <= 0.0 => false,
                r if r >= 1.0 => true,
                r => rng.gen_bool(r),
            };
            b ^ flip
        })
        .collect();
    let mut out = FeatureMask { bits };
    out.repair(rng);
    out
}

/// Run the steady-state GA. Every fitness call (including the initial
/// population) counts against `max_evaluations`; the run stops as soon as the
/// budget is spent or the best fitness reaches `target_fitness`, whichever
/// comes first.
pub fn run_ssga(
    config: &GaConfig,
    mut fitness_fn: impl FnMut(&FeatureMask) -> Result<f64>,
) -> Result<GaRunResult> {
    config.validate()?;
    let mut rng = seeded_rng(config.seed, "ssga");
    let mut evaluations = 0usize;
    let mut trace: Vec<(usize, f64)> = Vec::new();
    let mut population: Vec<Individual> = Vec::with_capacity(config.population_size);
    let mut best: Option<Individual> = None;
    for _ in 0..config.population_size {
        let mask = FeatureMask::random(&mut rng);
        let fitness = fitness_fn(&mask)?;
        evaluations += 1;
        let ind = Individual { mask, fitness, evaluated_at: evaluations };
        if best.as_ref().map_or(true, |b| ind.fitness > b.fitness) {
            best = Some(ind.clone());
        }
        trace.push((evaluations, best.as_ref().unwrap().fitness));
        population.push(ind);
    }
    let mut best = best.expect("population is non-empty");
    while best.fitness < config.target_fitness && evaluations < config.max_evaluations {
        let p1 = binary_tournament(&population, &mut rng)?.mask.clone();
        let p2 = binary_tournament(&population, &mut rng)?.mask.clone();
        let child_mask = mutate(&uniform_crossover(&p1, &p2, &mut rng), config.mutation_rate, &mut rng);
        let fitness = fitness_fn(&child_mask)?;
        evaluations += 1;
        let child = Individual { mask: child_mask, fitness, evaluated_at: evaluations };
        let worst = population
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| a.fitness.partial_cmp(&b.fitness).expect("finite fitness"))
            .map(|(i, _)| i)
            .expect("population is non-empty");
        if child.fitness >= population[worst].fitness {
            population[worst] = child.clone();
        }
        if child.fitness > best.fitness {
            best = child;
        }
        trace.push((evaluations, best.fitness));
    }
    Ok(GaRunResult { best, population, evaluations_used: evaluations, fitness_trace: trace })
}

/// Per-feature fraction of runs whose best mask includes the feature.
pub fn feature_consistency(runs: &[GaRunResult]) -> Result<Vec<f64>> {
    if runs.is_empty() {
        return Err(Error::Evaluation("feature consistency needs at least one run".into()));
    }
    let mut counts = vec![0usize; ALPHABET_LEN];
    for run in runs {
        for (c, &bit) in counts.iter_mut().zip(run.best.mask.bits()) {
            if bit {
                *c += 1;
            }
        }
    }
    Ok(counts.iter().map(|&c| c as f64 / runs.len() as f64).collect())
}

/// One row of the masks.json artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MaskRecord {
    pub bits: String,
    pub fitness: f64,
}

/// The masks.json payload: the final population as (bits, fitness) records.
pub fn mask_records(run: &GaRunResult) -> Vec<MaskRecord> {
    run.population
        .iter()
        .map(|ind| MaskRecord { bits: ind.mask.to_bit_string(), fitness: ind.fitness })
        .collect()
}

/// Fitness trace as CSV with an `evaluation,best_fitness` header.
pub fn trace_csv(run: &GaRunResult) -> String {
    let mut out = String::from("evaluation,best_fitness\n");
    for (eval, fitness) in &run.fitness_trace {
        let _ = writeln!(out, "{eval},{fitness}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn mask_with(set: &[usize]) -> FeatureMask {
        let mut bits = vec![false; ALPHABET_LEN];
        for &j in set {
            bits[j] = true;
        }
        FeatureMask::from_bits(bits).unwrap()
    }

    #[test]
    fn apply_mask_identity_zero_and_bound() {
        let v = FeatureVector::new((0..ALPHABET_LEN).map(|i| i as f64).collect(), "t").unwrap();
        assert_eq!(apply_mask(&FeatureMask::all_ones(), &v).values, v.values);
        assert!(apply_mask(&FeatureMask::all_zeros(), &v).values.iter().all(|&x| x == 0.0));
        let m = mask_with(&[1, 3, 5]);
        let out = apply_mask(&m, &v);
        assert!(out.values.iter().filter(|&&x| x != 0.0).count() <= 3);
    }

    #[test]
    fn count_active_examples() {
        assert_eq!(FeatureMask::all_ones().count_active(), 95);
        assert_eq!(FeatureMask::all_zeros().count_active(), 0);
        let alternating =
            FeatureMask::from_bits((0..ALPHABET_LEN).map(|i| i % 2 == 0).collect()).unwrap();
        // Direct count: indices 0,2,...,94.
        let expected = (0..ALPHABET_LEN).step_by(2).count();
        assert_eq!(alternating.count_active(), expected);
        assert_eq!(expected, 48);
    }

    #[test]
    fn tournament_always_returns_the_stronger_of_two() {
        let pop = vec![
            Individual { mask: FeatureMask::all_ones(), fitness: 0.9, evaluated_at: 1 },
            Individual { mask: FeatureMask::all_zeros(), fitness: 0.1, evaluated_at: 2 },
        ];
        let mut r = rng(3);
        for _ in 0..100 {
            assert_eq!(binary_tournament(&pop, &mut r).unwrap().fitness, 0.9);
        }
    }

    #[test]
    fn tournament_winner_at_least_as_fit_as_some_member() {
        let mut r = rng(4);
        let pop: Vec<Individual> = (0..10)
            .map(|i| Individual {
                mask: FeatureMask::all_ones(),
                fitness: i as f64 / 10.0,
                evaluated_at: i,
            })
            .collect();
        let min_fitness = 0.0;
        for _ in 0..500 {
            let w = binary_tournament(&pop, &mut r).unwrap();
            assert!(w.fitness >= min_fitness);
        }
    }

    #[test]
    fn tournament_is_uniform_under_equal_fitness() {
        // Chi-squared goodness of fit over 10,000 draws, 30 bins.
        // Critical value for df=29 at alpha=0.01 is 49.588.
        let pop: Vec<Individual> = (0..30)
            .map(|i| Individual { mask: FeatureMask::all_ones(), fitness: 0.5, evaluated_at: i })
            .collect();
        let mut r = rng(5);
        let mut counts = vec![0usize; 30];
        let draws = 10_000;
        for _ in 0..draws {
            let w = binary_tournament(&pop, &mut r).unwrap();
            counts[w.evaluated_at] += 1;
        }
        let expected = draws as f64 / 30.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 49.588, "chi2 = {chi2}");
    }

    #[test]
    fn tournament_requires_two_members() {
        let pop =
            vec![Individual { mask: FeatureMask::all_ones(), fitness: 0.5, evaluated_at: 0 }];
        assert!(matches!(binary_tournament(&pop, &mut rng(0)), Err(Error::Selection(_))));
    }

    #[test]
    fn crossover_of_identical_parents_is_identity() {
        let p = mask_with(&[0, 7, 40]);
        let child = uniform_crossover(&p, &p, &mut rng(6));
        assert_eq!(child, p);
    }

    #[test]
    fn crossover_bits_come_from_parents() {
        let p1 = FeatureMask::random(&mut rng(7));
        let p2 = FeatureMask::random(&mut rng(8));
        let child = uniform_crossover(&p1, &p2, &mut rng(9));
        for j in 0..ALPHABET_LEN {
            assert!(child.bit(j) == p1.bit(j) || child.bit(j) == p2.bit(j));
        }
    }

    #[test]
    fn crossover_of_complementary_parents_is_binomial() {
        let ones = FeatureMask::all_ones();
        let zeros = FeatureMask::all_zeros();
        let mut r = rng(10);
        let trials = 10_000;
        let mean: f64 = (0..trials)
            .map(|_| uniform_crossover(&ones, &zeros, &mut r).count_active() as f64)
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 47.5).abs() < 1.5, "mean = {mean}");
    }

    #[test]
    fn mutation_rate_zero_is_identity_and_one_is_complement() {
        let m = mask_with(&[2, 30, 94]);
        let mut r = rng(11);
        assert_eq!(mutate(&m, 0.0, &mut r), m);
        let complement = mutate(&m, 1.0, &mut r);
        for j in 0..ALPHABET_LEN {
            assert_eq!(complement.bit(j), !m.bit(j));
        }
        // Complement of all-ones is all-zeros, which must be repaired.
        let repaired = mutate(&FeatureMask::all_ones(), 1.0, &mut r);
        assert_eq!(repaired.count_active(), 1);
    }

    #[test]
    fn mutation_at_half_rate_flips_about_half_the_bits() {
        let m = FeatureMask::all_ones();
        let mut r = rng(12);
        let trials = 10_000;
        let mean: f64 = (0..trials)
            .map(|_| {
                let out = mutate(&m, 0.5, &mut r);
                (0..ALPHABET_LEN).filter(|&j| out.bit(j) != m.bit(j)).count() as f64
            })
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 47.5).abs() < 1.5, "mean = {mean}");
    }

    #[test]
    fn ga_improves_transparent_bit_count_fitness() {
        // Low per-bit mutation keeps inheritance strong enough for the GA to
        // climb the bit-count objective; at rate 0.5 every child is an
        // independent coin-flip mask and the search cannot ratchet.
        let config = GaConfig { seed: 21, mutation_rate: 0.02, ..GaConfig::default() };
        let run =
            run_ssga(&config, |m| Ok(m.count_active() as f64 / ALPHABET_LEN as f64)).unwrap();
        let initial_best = run.fitness_trace[config.population_size - 1].1;
        assert!(run.best.fitness >= initial_best);
        assert!(run.best.fitness >= 0.9, "best = {}", run.best.fitness);
        for pair in run.fitness_trace.windows(2) {
            assert!(pair[1].1 >= pair[0].1);
        }
    }

    #[test]
    fn ga_mean_fitness_strictly_improves_within_200_evaluations() {
        let config = GaConfig { seed: 22, max_evaluations: 200, ..GaConfig::default() };
        let mut initial_mean = None;
        let run = run_ssga(&config, |m| Ok(m.count_active() as f64 / ALPHABET_LEN as f64)).unwrap();
        // Reconstruct the initial mean from a fresh identical run's first
        // population: same seed gives the same initial masks.
        let run2 = run_ssga(
            &GaConfig { max_evaluations: config.population_size, ..config.clone() },
            |m| {
                let f = m.count_active() as f64 / ALPHABET_LEN as f64;
                Ok(f)
            },
        )
        .unwrap();
        let mean0: f64 = run2.population.iter().map(|i| i.fitness).sum::<f64>()
            / run2.population.len() as f64;
        initial_mean.replace(mean0);
        let mean_final: f64 =
            run.population.iter().map(|i| i.fitness).sum::<f64>() / run.population.len() as f64;
        assert!(mean_final > initial_mean.unwrap());
    }

    #[test]
    fn ga_population_minimum_never_decreases() {
        // Replacement only accepts children at least as fit as the worst.
        let config = GaConfig { seed: 23, max_evaluations: 300, ..GaConfig::default() };
        let mut mins: Vec<f64> = Vec::new();
        // Track minima by re-running with a fitness that records nothing;
        // instead verify via the final population against initial.
        let run = run_ssga(&config, |m| Ok(m.count_active() as f64 / ALPHABET_LEN as f64)).unwrap();
        let final_min =
            run.population.iter().map(|i| i.fitness).fold(f64::INFINITY, f64::min);
        let init = run_ssga(
            &GaConfig { max_evaluations: config.population_size, ..config.clone() },
            |m| Ok(m.count_active() as f64 / ALPHABET_LEN as f64),
        )
        .unwrap();
        let init_min =
            init.population.iter().map(|i| i.fitness).fold(f64::INFINITY, f64::min);
        mins.push(init_min);
        assert!(final_min >= init_min);
    }

    #[test]
    fn zero_target_stops_after_initial_population() {
        let config = GaConfig { seed: 24, target_fitness: 0.0, ..GaConfig::default() };
        let run = run_ssga(&config, |m| Ok(m.count_active() as f64 / ALPHABET_LEN as f64)).unwrap();
        assert_eq!(run.evaluations_used, config.population_size);
    }

    #[test]
    fn budget_is_respected() {
        let config = GaConfig { seed: 25, max_evaluations: 100, ..GaConfig::default() };
        let run = run_ssga(&config, |m| Ok(m.count_active() as f64 / ALPHABET_LEN as f64)).unwrap();
        assert_eq!(run.evaluations_used, 100);
        // A budget below the population size still pays the initial cost.
        let tiny = GaConfig { seed: 25, max_evaluations: 5, ..GaConfig::default() };
        let run = run_ssga(&tiny, |m| Ok(m.count_active() as f64 / ALPHABET_LEN as f64)).unwrap();
        assert_eq!(run.evaluations_used, tiny.population_size);
    }

    #[test]
    fn fixed_seed_reproduces_identical_results() {
        let config = GaConfig { seed: 26, max_evaluations: 150, ..GaConfig::default() };
        let fit = |m: &FeatureMask| Ok(m.count_active() as f64 / ALPHABET_LEN as f64);
        let a = run_ssga(&config, fit).unwrap();
        let b = run_ssga(&config, fit).unwrap();
        assert_eq!(a.best.mask, b.best.mask);
        assert_eq!(a.fitness_trace, b.fitness_trace);
        assert_eq!(
            serde_json::to_string(&mask_records(&a)).unwrap(),
            serde_json::to_string(&mask_records(&b)).unwrap()
        );
    }

    #[test]
    fn consistency_fractions_are_exact() {
        let config = GaConfig { seed: 27, max_evaluations: 60, ..GaConfig::default() };
        let fit = |m: &FeatureMask| Ok(m.count_active() as f64 / ALPHABET_LEN as f64);
        let run = run_ssga(&config, fit).unwrap();
        let identical = vec![run.clone(), run.clone(), run];
        let consistency = feature_consistency(&identical).unwrap();
        assert!(consistency.iter().all(|&c| c == 0.0 || c == 1.0));

        // A feature present in 1 of 2 bests scores 0.5.
        let mut other = identical[0].clone();
        let flipped = !other.best.mask.bit(0);
        let mut bits = other.best.mask.bits().to_vec();
        bits[0] = flipped;
        other.best.mask = FeatureMask::from_bits(bits).unwrap();
        let mixed = feature_consistency(&[identical[0].clone(), other]).unwrap();
        assert_eq!(mixed[0], 0.5);
        assert!(mixed.iter().all(|&c| (0.0..=1.0).contains(&c)));
    }

    #[test]
    fn empty_run_list_is_an_error() {
        assert!(feature_consistency(&[]).is_err());
    }

    #[test]
    fn mask_serde_round_trips_as_bit_string() {
        let m = FeatureMask::random(&mut rng(31));
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.starts_with('"'));
        assert_eq!(json.len(), ALPHABET_LEN + 2);
        let back: FeatureMask = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn trace_csv_has_header_and_rows() {
        let config = GaConfig { seed: 32, max_evaluations: 40, ..GaConfig::default() };
        let run =
            run_ssga(&config, |m| Ok(m.count_active() as f64 / ALPHABET_LEN as f64)).unwrap();
        let csv = trace_csv(&run);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("evaluation,best_fitness"));
        assert_eq!(lines.count(), run.fitness_trace.len());
    }
}
