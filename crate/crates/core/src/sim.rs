//! Monte Carlo harness: synthetic data, PD-frequency sweeps over `k`, the
//! distinct-count sampling experiment and the per-replicate ζ check.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::corr::{redraw_limit, replicate, BootstrapAverager, DataMatrix};
use crate::error::{Error, Result};
use crate::occupancy::{occupancy_cdf_vs_normal, occupancy_cdf_vs_normal_corrected};
use crate::predictor::prob_pd;
use crate::rng::{derive_seed, stream};
use crate::spectral::{eigenvalues, symmetric_spectrum};

const DATA_LABEL: u64 = 0x6461_7461; // "data"
const BOOT_LABEL: u64 = 0x626f_6f74; // "boot"

/// Synthetic data generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DataGenerator {
    /// I.i.d. `N(0, 1)` entries: ChaCha8 stream 0 of the seed, rand_distr
    /// ziggurat sampler, filled row by row.
    #[default]
    StandardNormal,
}

/// `n x t` matrix of i.i.d. standard normal entries.
pub fn generate_data(n: usize, t: usize, seed: u64) -> Result<DataMatrix> {
    let mut rng = stream(seed, 0);
    let values: Vec<f64> = (0..n * t).map(|_| StandardNormal.sample(&mut rng)).collect();
    DataMatrix::new(DMatrix::from_row_slice(n, t, &values))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub n: usize,
    pub t: usize,
    pub k_values: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub generator: DataGenerator,
}

impl SimulationConfig {
    pub fn new(n: usize, t: usize, k_values: Vec<usize>, trials: usize, seed: u64) -> Result<Self> {
        let config = SimulationConfig {
            n,
            t,
            k_values,
            trials,
            seed,
            generator: DataGenerator::StandardNormal,
        };
        config.validate()?;
        Ok(config)
    }

    /// Every `k` in `k_min..=k_max`.
    pub fn k_range(n: usize, t: usize, k_min: usize, k_max: usize, trials: usize, seed: u64) -> Result<Self> {
        if k_min > k_max {
            return Err(Error::domain(format!("k range {k_min}..={k_max} is empty")));
        }
        Self::new(n, t, (k_min..=k_max).collect(), trials, seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.t < 2 {
            return Err(Error::domain(format!(
                "simulation needs n, t >= 2, got n = {}, t = {}",
                self.n, self.t
            )));
        }
        if self.trials == 0 {
            return Err(Error::domain("simulation needs at least one trial"));
        }
        let Some(&last) = self.k_values.last() else {
            return Err(Error::domain("k_values is empty"));
        };
        if self.k_values[0] == 0 || self.k_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain("k_values must be positive and strictly increasing"));
        }
        if last > 4 * self.n {
            return Err(Error::domain(format!(
                "largest k = {last} exceeds 4n = {}",
                4 * self.n
            )));
        }
        Ok(())
    }
}

/// Aggregates for one `k` of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub k: usize,
    pub pd_count: usize,
    pub empirical_pd_frequency: f64,
    pub predicted: f64,
    pub mean_lambda0: f64,
    /// Degenerate redraws among the first `k` replicates, summed over trials.
    pub redraws: usize,
}

#[derive(Debug, Clone)]
pub struct SimulationReport {
    pub config: SimulationConfig,
    pub per_k: Vec<SweepRecord>,
    pub elapsed: Duration,
}

impl SimulationReport {
    /// Largest `|empirical - predicted|` over the sweep.
    pub fn max_abs_deviation(&self) -> f64 {
        self.per_k
            .iter()
            .map(|r| (r.empirical_pd_frequency - r.predicted).abs())
            .fold(0.0, f64::max)
    }

    /// First `k` where the empirical frequency reaches `level`, linearly
    /// interpolated between neighbouring sweep points.
    pub fn empirical_crossing(&self, level: f64) -> Option<f64> {
        let recs = &self.per_k;
        if recs.first()?.empirical_pd_frequency >= level {
            return Some(recs[0].k as f64);
        }
        recs.windows(2).find_map(|w| {
            let (a, b) = (&w[0], &w[1]);
            (a.empirical_pd_frequency < level && b.empirical_pd_frequency >= level).then(|| {
                let frac = (level - a.empirical_pd_frequency)
                    / (b.empirical_pd_frequency - a.empirical_pd_frequency);
                a.k as f64 + frac * (b.k - a.k) as f64
            })
        })
    }
}

struct TrialPoint {
    pd: bool,
    lambda0: f64,
    redraws: usize,
}

fn run_trial(config: &SimulationConfig, trial: usize) -> Result<Vec<TrialPoint>> {
    let data = generate_data(config.n, config.t, derive_seed(config.seed, DATA_LABEL, trial as u64))?;
    let boot_seed = derive_seed(config.seed, BOOT_LABEL, trial as u64);
    let k_max = *config.k_values.last().expect("validated");
    let wrap = |k: usize, e: Error| Error::Trial {
        trial,
        k,
        source: Box::new(e),
    };

    let mut avg = BootstrapAverager::new(config.n);
    let mut points = Vec::with_capacity(config.k_values.len());
    let mut targets = config.k_values.iter().copied().peekable();
    for ordinal in 0..k_max {
        let k = ordinal + 1;
        let rep = replicate(&data, boot_seed, ordinal as u64, redraw_limit(k_max)).map_err(|e| wrap(k, e))?;
        avg.push(rep);
        if targets.peek() != Some(&k) {
            continue;
        }
        targets.next();
        if avg.redraws() > redraw_limit(k) {
            return Err(wrap(
                k,
                Error::TooManyDegenerateRedraws {
                    k,
                    redraws: avg.redraws(),
                },
            ));
        }
        let spectrum = eigenvalues(&avg.mean().expect("k >= 1"))?;
        points.push(TrialPoint {
            pd: spectrum.is_positive_definite(),
            lambda0: spectrum.smallest(),
            redraws: avg.redraws(),
        });
    }
    Ok(points)
}

/// Empirical positive-definiteness frequency of the averaged matrix for each
/// requested `k`, next to the closed-form prediction.
///
/// Each trial draws fresh data. Within a trial the averages for all `k`
/// share replicates: the matrix for `k` is the mean of the first `k`
/// replicates, identical to `average_correlation` with the trial's seed.
/// Trials run on the current rayon pool; the report does not depend on the
/// number of threads.
pub fn run_pd_sweep(config: &SimulationConfig) -> Result<SimulationReport> {
    config.validate()?;
    let start = Instant::now();
    let trials: Vec<Vec<TrialPoint>> = (0..config.trials)
        .into_par_iter()
        .map(|j| run_trial(config, j))
        .collect::<Result<_>>()?;

    let per_k = config
        .k_values
        .iter()
        .enumerate()
        .map(|(idx, &k)| {
            let mut pd_count = 0;
            let mut lambda_sum = 0.0;
            let mut redraws = 0;
            for trial in &trials {
                let p = &trial[idx];
                pd_count += usize::from(p.pd);
                lambda_sum += p.lambda0;
                redraws += p.redraws;
            }
            Ok(SweepRecord {
                k,
                pd_count,
                empirical_pd_frequency: pd_count as f64 / config.trials as f64,
                predicted: prob_pd(config.n, config.t, k as f64)?,
                mean_lambda0: lambda_sum / config.trials as f64,
                redraws,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SimulationReport {
        config: config.clone(),
        per_k,
        elapsed: start.elapsed(),
    })
}

/// Distinct counts from repeated bootstrap draws and their distance to the
/// normal model.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancySweep {
    pub t: usize,
    pub unique_counts: Vec<usize>,
    /// Empirical CDF at `u = 1..=t`.
    pub ecdf: Vec<f64>,
    pub ks_distance: f64,
    /// Same comparison with a half-unit continuity correction.
    pub ks_distance_corrected: f64,
}

/// Draws `samples` bootstrap index vectors of length `t` from stream 0 of
/// `seed`.
pub fn run_occupancy_sweep(t: usize, samples: usize, seed: u64) -> Result<OccupancySweep> {
    if samples == 0 {
        return Err(Error::domain("occupancy sweep needs at least one sample"));
    }
    if t == 0 {
        return Err(Error::domain("occupancy sweep needs t >= 1"));
    }
    let mut rng = stream(seed, 0);
    let unique_counts = (0..samples)
        .map(|_| crate::corr::draw_bootstrap_index(t, &mut rng).map(|i| i.unique_count()))
        .collect::<Result<Vec<_>>>()?;
    let mut hist = vec![0usize; t + 1];
    for &u in &unique_counts {
        hist[u] += 1;
    }
    let mut running = 0;
    let ecdf = hist[1..]
        .iter()
        .map(|&c| {
            running += c;
            running as f64 / samples as f64
        })
        .collect();
    let ks_distance = occupancy_cdf_vs_normal(t, &unique_counts)?;
    let ks_distance_corrected = occupancy_cdf_vs_normal_corrected(t, &unique_counts)?;
    Ok(OccupancySweep {
        t,
        unique_counts,
        ecdf,
        ks_distance,
        ks_distance_corrected,
    })
}

/// Outcome of comparing `ζ = Σ z_i` with `(k - 1) n` for one averaged matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaRecord {
    pub zeta: usize,
    pub bound: usize,
    pub pd_observed: bool,
    pub smallest_eigenvalue: f64,
    /// Zero-eigenvalue count of each replicate, from its spectrum.
    pub zero_counts: Vec<usize>,
    pub unique_counts: Vec<usize>,
}

impl ZetaRecord {
    pub fn condition_holds(&self) -> bool {
        self.zeta <= self.bound
    }
}

/// Same replicates as `average_correlation(data, k, seed)`, with the zero
/// count of every replicate measured from its own spectrum.
pub fn check_zeta_condition(data: &DataMatrix, k: usize, seed: u64) -> Result<ZetaRecord> {
    if k == 0 {
        return Err(Error::domain("check_zeta_condition needs k >= 1"));
    }
    let limit = redraw_limit(k);
    let reps = (0..k)
        .into_par_iter()
        .map(|i| {
            let rep = replicate(data, seed, i as u64, limit)?;
            let zeros = symmetric_spectrum(rep.matrix.values())?.zero_count();
            Ok((rep, zeros))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut avg = BootstrapAverager::new(data.n());
    let mut zero_counts = Vec::with_capacity(k);
    for (rep, zeros) in reps {
        zero_counts.push(zeros);
        avg.push(rep);
    }
    if avg.redraws() > limit {
        return Err(Error::TooManyDegenerateRedraws {
            k,
            redraws: avg.redraws(),
        });
    }
    let spectrum = eigenvalues(&avg.mean().expect("k >= 1"))?;
    Ok(ZetaRecord {
        zeta: zero_counts.iter().sum(),
        bound: (k - 1) * data.n(),
        pd_observed: spectrum.is_positive_definite(),
        smallest_eigenvalue: spectrum.smallest(),
        zero_counts,
        unique_counts: avg.unique_counts().to_vec(),
    })
}
