//! Monte-Carlo density evolution of the turbo-like product-code ensemble
//! under extrinsic Chase-Pyndiah decoding, and the threshold search on top.
//!
//! The ensemble model: incoming messages are permuted before every half
//! iteration, partitioned into pseudo-constraints of n edges, and each
//! constraint draws fresh channel LLRs N(mu_ch, 2 mu_ch) conditioned on the
//! all-zero codeword. Channel values are redrawn i.i.d. per half iteration
//! rather than persisted per edge.

use crate::channel::{compose_stream_id, gaussian_samples, RngStream};
use crate::chase::{soft_output_extrinsic_with, ChaseScratch};
use crate::code::CodeSpec;
use crate::gmi::{optimize_theta_blocks, post_process, PostProcParams, SampleBlock};
use crate::product::{stream_tags, CoefficientSchedule};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DeError {
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("invalid bracket: low endpoint {}, high endpoint {}",
        if *low_converged { "converged" } else { "diverged" },
        if *high_converged { "converged" } else { "diverged" })]
    InvalidBracket {
        low_converged: bool,
        high_converged: bool,
    },
    #[error(transparent)]
    Gmi(#[from] crate::gmi::GmiError),
    #[error(transparent)]
    Chase(#[from] crate::chase::ChaseError),
}

/// Design rate of the ensemble, 2 sqrt(R) - 1 for product-code rate R.
pub fn design_rate(product_rate: f64) -> f64 {
    2.0 * product_rate.sqrt() - 1.0
}

/// Mean of the channel LLRs under the all-zero assumption,
/// mu_ch = 4 R_d Eb/N0; the variance is 2 mu_ch.
pub fn channel_llr_mean(ebn0_db: f64, design_rate: f64) -> f64 {
    4.0 * design_rate * 10f64.powf(ebn0_db / 10.0)
}

/// How theta is chosen inside the DE recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaMode {
    /// Re-optimize (gamma, delta) on the pooled population of every half
    /// iteration, mirroring the calibrated decoders.
    OptimizePerHalfIter,
    /// Use an externally supplied schedule.
    FixedSchedule(CoefficientSchedule),
}

/// How edge channel LLRs evolve across half iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    /// Each edge keeps the channel LLR it was born with; messages and their
    /// channel values travel together through the permutations, exactly as
    /// in the finite-length decoder.
    Persistent,
    /// Fresh i.i.d. channel LLRs are drawn for every half iteration.
    Redraw,
}

/// Monte-Carlo DE configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    /// Sample count N; rounded down to a multiple of the component length.
    pub samples: usize,
    pub l_max: usize,
    pub p: usize,
    pub theta_mode: ThetaMode,
    /// A run converged when the final Pr[V < 0] is <= this value; the
    /// default 0 demands zero negative samples.
    pub error_floor_eps: f64,
    pub master_seed: u64,
    /// Extra lane mixed into the permutation streams only.
    pub permute_salt: u32,
}

impl DeConfig {
    pub fn new(samples: usize, l_max: usize, p: usize) -> Self {
        Self {
            samples,
            l_max,
            p,
            theta_mode: ThetaMode::OptimizePerHalfIter,
            error_floor_eps: 0.0,
            master_seed: 0,
            permute_salt: 0,
        }
    }
}

/// Sample population of incoming messages and the extrinsic values of the
/// last update.
#[derive(Debug, Clone)]
pub struct MessagePopulation {
    pub l_in: Vec<f64>,
    pub v: Vec<f64>,
    n: usize,
}

impl MessagePopulation {
    /// Initial population: l_in distributed as the channel LLRs.
    pub fn init(spec: &CodeSpec, samples: usize, mu_ch: f64, master_seed: u64) -> Result<Self, DeError> {
        let n = spec.n();
        if samples < 10 * n {
            return Err(DeError::Configuration(format!(
                "need at least {} samples for n = {n}",
                10 * n
            )));
        }
        let groups = samples / n;
        let total = groups * n;
        let mut l_in = vec![0.0; total];
        l_in.par_chunks_mut(n).enumerate().for_each(|(g, chunk)| {
            let stream = RngStream::new(
                master_seed,
                compose_stream_id(stream_tags::DE_INIT, 0, g as u32),
            );
            let vals = gaussian_samples(n, mu_ch, 2.0 * mu_ch, &mut stream.rng());
            chunk.copy_from_slice(&vals);
        });
        Ok(Self {
            l_in,
            v: vec![0.0; total],
            n,
        })
    }

    pub fn len(&self) -> usize {
        self.l_in.len()
    }

    pub fn is_empty(&self) -> bool {
        self.l_in.is_empty()
    }

    /// Fraction of negative extrinsic values after the last update.
    pub fn error_fraction(&self) -> f64 {
        self.v.iter().filter(|&&v| v < 0.0).count() as f64 / self.len() as f64
    }
}

/// Stats of one DE half iteration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeHalfStats {
    pub half_iter: usize,
    pub error_fraction: f64,
    pub gamma: f64,
    pub delta: f64,
    pub gmi: f64,
    pub failed_fraction: f64,
}

/// One DE half iteration: permute, group, draw fresh channel LLRs, run the
/// extrinsic Chase stage per group, post-process with theta (optimized on
/// this half iteration's pooled samples when so configured), and emit
/// l_out = l_ch + v as the next incoming messages.
pub fn de_half_iteration(
    pop: &mut MessagePopulation,
    spec: &CodeSpec,
    config: &DeConfig,
    mu_ch: f64,
    half_iter: usize,
) -> Result<DeHalfStats, DeError> {
    let n = pop.n;
    let total = pop.len();
    let groups = total / n;

    // Uniform permutation of the incoming messages.
    let mut rng = RngStream::new(
        config.master_seed,
        compose_stream_id(stream_tags::DE_PERMUTE, half_iter as u32, config.permute_salt),
    )
    .rng();
    for i in (1..total).rev() {
        let j = rng.gen_range(0..=i);
        pop.l_in.swap(i, j);
    }

    // Per-group extrinsic Chase stage with fresh channel LLRs.
    struct GroupOut {
        w: Vec<f64>,
        l_ch: Vec<f64>,
        alt: Vec<bool>,
        failed: Vec<bool>,
        n_failed: usize,
    }
    let outs: Vec<GroupOut> = (0..groups)
        .into_par_iter()
        .map(|g| {
            let stream = RngStream::new(
                config.master_seed,
                compose_stream_id(stream_tags::DE_CHANNEL, half_iter as u32, g as u32),
            );
            let l_ch = gaussian_samples(n, mu_ch, 2.0 * mu_ch, &mut stream.rng());
            let l_in = &pop.l_in[g * n..(g + 1) * n];
            let mut scratch = ChaseScratch::default();
            let outcome =
                soft_output_extrinsic_with(spec, l_in, &l_ch, config.p, &mut scratch)?;
            let n_failed = outcome.failed.iter().filter(|&&f| f).count();
            Ok(GroupOut {
                w: outcome.w,
                l_ch,
                alt: outcome.alt_exists,
                failed: outcome.failed,
                n_failed,
            })
        })
        .collect::<Result<_, DeError>>()?;

    let n_failed: usize = outs.iter().map(|o| o.n_failed).sum();
    let failed_fraction = n_failed as f64 / total as f64;
    if failed_fraction > 1e-3 {
        return Err(DeError::Configuration(format!(
            "empty-candidate-list fraction {failed_fraction:.2e} exceeds 1e-3; \
             p = {} is too small for this code",
            config.p
        )));
    }

    let (theta, gmi) = match &config.theta_mode {
        ThetaMode::FixedSchedule(s) => {
            let (g, d) = s.at(half_iter);
            (PostProcParams::new(g, d), f64::NAN)
        }
        ThetaMode::OptimizePerHalfIter => {
            let mut block = SampleBlock::default();
            for o in &outs {
                for i in 0..n {
                    if o.failed[i] {
                        continue;
                    }
                    let pair = (o.w[i], o.l_ch[i]);
                    if o.alt[i] {
                        block.alt.push(pair);
                    } else {
                        block.no_alt.push(pair);
                    }
                }
            }
            let star = optimize_theta_blocks(&[&block])?;
            (star.theta, star.gmi)
        }
    };

    // Emit v and l_out per edge.
    pop.l_in
        .par_chunks_mut(n)
        .zip(pop.v.par_chunks_mut(n))
        .zip(&outs)
        .for_each(|((l_in, v), o)| {
            for i in 0..n {
                let vi = post_process(o.w[i], o.alt[i], &theta);
                v[i] = vi;
                l_in[i] = o.l_ch[i] + vi;
            }
        });

    Ok(DeHalfStats {
        half_iter,
        error_fraction: pop.error_fraction(),
        gamma: theta.gamma,
        delta: theta.delta,
        gmi,
        failed_fraction,
    })
}

/// Trajectory of one DE run at a fixed SNR.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeRun {
    pub ebn0_db: f64,
    pub mu_ch: f64,
    pub converged: bool,
    pub stats: Vec<DeHalfStats>,
}

impl DeRun {
    pub fn error_fractions(&self) -> Vec<f64> {
        self.stats.iter().map(|s| s.error_fraction).collect()
    }
}

/// Runs l_max half iterations and reports the Pr[V < 0] trajectory. The run
/// converged when the final fraction is <= error_floor_eps.
pub fn run_de(spec: &CodeSpec, ebn0_db: f64, config: &DeConfig) -> Result<DeRun, DeError> {
    if config.p == 0 || config.p > spec.n() {
        return Err(DeError::Configuration(format!(
            "p = {} outside 1..={}",
            config.p,
            spec.n()
        )));
    }
    if config.l_max < 1 {
        return Err(DeError::Configuration("l_max must be >= 1".into()));
    }
    let r_d = design_rate(spec.rate() * spec.rate());
    let mu_ch = channel_llr_mean(ebn0_db, r_d);
    let mut pop = MessagePopulation::init(spec, config.samples, mu_ch, config.master_seed)?;
    let mut stats = Vec::with_capacity(config.l_max);
    for l in 1..=config.l_max {
        stats.push(de_half_iteration(&mut pop, spec, config, mu_ch, l)?);
    }
    let converged = stats
        .last()
        .map(|s| s.error_fraction <= config.error_floor_eps)
        .unwrap_or(false);
    Ok(DeRun {
        ebn0_db,
        mu_ch,
        converged,
        stats,
    })
}

/// Iterative decoding threshold estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Lowest SNR observed to converge at the search resolution.
    pub ebn0_star_db: f64,
    /// Final bisection interval (diverging, converging).
    pub bracket: (f64, f64),
    pub resolution_db: f64,
    /// All probed runs in probe order, endpoints first.
    pub trajectory: Vec<DeRun>,
}

/// Bisection for the lowest converging SNR. The low endpoint must diverge
/// and the high endpoint converge; every probe reuses the same master seed
/// (common random numbers).
pub fn find_threshold(
    spec: &CodeSpec,
    config: &DeConfig,
    bracket_db: (f64, f64),
    resolution_db: f64,
) -> Result<ThresholdResult, DeError> {
    let (mut low, mut high) = bracket_db;
    if !(high > low) || !(resolution_db > 0.0) {
        return Err(DeError::Configuration(format!(
            "bad bracket ({low}, {high}) or resolution {resolution_db}"
        )));
    }
    let mut trajectory = Vec::new();
    let low_run = run_de(spec, low, config)?;
    let low_converged = low_run.converged;
    trajectory.push(low_run);
    let high_run = run_de(spec, high, config)?;
    let high_converged = high_run.converged;
    trajectory.push(high_run);
    if low_converged || !high_converged {
        return Err(DeError::InvalidBracket {
            low_converged,
            high_converged,
        });
    }
    while high - low > resolution_db {
        let mid = 0.5 * (low + high);
        let run = run_de(spec, mid, config)?;
        let converged = run.converged;
        trajectory.push(run);
        if converged {
            high = mid;
        } else {
            low = mid;
        }
    }
    Ok(ThresholdResult {
        ebn0_star_db: high,
        bracket: (low, high),
        resolution_db,
        trajectory,
    })
}
