//! GMI estimation for post-processed soft information and grid optimization
//! of the scaling parameters theta = (gamma, delta).
//!
//! The estimator only ever sees the scalar f_pp(w; theta) + l_ch per sample;
//! no auxiliary channel density is constructed. Samples are conditioned on
//! X = +1 (all-zero transmission).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GmiError {
    #[error("empty sample set")]
    EmptySampleSet,
    #[error("sample arrays have mismatched lengths")]
    LengthMismatch,
}

/// Post-processing parameters: gamma scales positions with an alternative
/// codeword, delta the +-1 placeholders without one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostProcParams {
    pub gamma: f64,
    pub delta: f64,
}

impl PostProcParams {
    pub fn new(gamma: f64, delta: f64) -> Self {
        Self { gamma, delta }
    }

    pub fn identity() -> Self {
        Self::new(1.0, 1.0)
    }
}

/// f_pp(w; theta) = gamma * w if an alternative exists, delta * w otherwise.
#[inline]
pub fn post_process(w: f64, alt: bool, theta: &PostProcParams) -> f64 {
    if alt {
        theta.gamma * w
    } else {
        theta.delta * w
    }
}

/// Soft outputs with their channel LLRs and alternative flags, all
/// conditioned on X = +1.
#[derive(Debug, Clone, Default)]
pub struct LabeledSampleSet {
    pub w: Vec<f64>,
    pub l_ch: Vec<f64>,
    pub alt: Vec<bool>,
}

impl LabeledSampleSet {
    pub fn from_parts(w: Vec<f64>, l_ch: Vec<f64>, alt: Vec<bool>) -> Result<Self, GmiError> {
        if w.len() != l_ch.len() || w.len() != alt.len() {
            return Err(GmiError::LengthMismatch);
        }
        Ok(Self { w, l_ch, alt })
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn push(&mut self, w: f64, l_ch: f64, alt: bool) {
        self.w.push(w);
        self.l_ch.push(l_ch);
        self.alt.push(alt);
    }

    /// Splits into per-class (w, l_ch) arrays for the separable optimizer.
    pub fn split(&self) -> SampleBlock {
        let mut block = SampleBlock::default();
        for i in 0..self.len() {
            let pair = (self.w[i], self.l_ch[i]);
            if self.alt[i] {
                block.alt.push(pair);
            } else {
                block.no_alt.push(pair);
            }
        }
        block
    }
}

/// (w, l_ch) pairs grouped by alternative-codeword class.
#[derive(Debug, Clone, Default)]
pub struct SampleBlock {
    pub alt: Vec<(f64, f64)>,
    pub no_alt: Vec<(f64, f64)>,
}

impl SampleBlock {
    pub fn len(&self) -> usize {
        self.alt.len() + self.no_alt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// log2(1 + e^v), evaluated in branches so that neither tail over- or
/// underflows. For v > 36 the correction term is below f64 resolution and
/// for v < -36 the value itself is, so both shortcuts are exact in f64.
#[inline]
fn log2_1p_exp(v: f64) -> f64 {
    if v > 36.0 {
        v * std::f64::consts::LOG2_E
    } else if v < -36.0 {
        0.0
    } else {
        v.exp().ln_1p() * std::f64::consts::LOG2_E
    }
}

/// Per-sample GMI contribution 1 - log2(1 + exp(-u)) for u = f_pp(w) + l_ch.
#[inline]
pub fn gmi_term(u: f64) -> f64 {
    1.0 - log2_1p_exp(-u)
}

/// Sum of gmi_term(scale * w + l) over per-class pairs, deterministically
/// chunked so the reduction order does not depend on thread scheduling.
fn class_sum(blocks: &[&[(f64, f64)]], scale: f64) -> f64 {
    if blocks.len() >= 8 {
        let sums: Vec<f64> = blocks
            .par_iter()
            .map(|b| b.iter().map(|&(w, l)| gmi_term(scale * w + l)).sum::<f64>())
            .collect();
        sums.iter().sum()
    } else {
        blocks
            .iter()
            .map(|b| {
                let sums: Vec<f64> = b
                    .par_chunks(1 << 14)
                    .map(|ch| ch.iter().map(|&(w, l)| gmi_term(scale * w + l)).sum::<f64>())
                    .collect();
                sums.iter().sum::<f64>()
            })
            .sum()
    }
}

/// Empirical GMI (bits/channel use) of the post-processed messages.
pub fn gmi_estimate(samples: &LabeledSampleSet, theta: &PostProcParams) -> Result<f64, GmiError> {
    if samples.is_empty() {
        return Err(GmiError::EmptySampleSet);
    }
    let n = samples.len();
    let sums: Vec<f64> = (0..n)
        .into_par_iter()
        .chunks(1 << 14)
        .map(|idx| {
            idx.iter()
                .map(|&i| {
                    gmi_term(post_process(samples.w[i], samples.alt[i], theta) + samples.l_ch[i])
                })
                .sum::<f64>()
        })
        .collect();
    Ok(sums.iter().sum::<f64>() / n as f64)
}

/// GMI over pre-split blocks.
pub fn gmi_estimate_blocks(blocks: &[&SampleBlock], theta: &PostProcParams) -> Result<f64, GmiError> {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    if n == 0 {
        return Err(GmiError::EmptySampleSet);
    }
    let alt: Vec<&[(f64, f64)]> = blocks.iter().map(|b| b.alt.as_slice()).collect();
    let no_alt: Vec<&[(f64, f64)]> = blocks.iter().map(|b| b.no_alt.as_slice()).collect();
    Ok((class_sum(&alt, theta.gamma) + class_sum(&no_alt, theta.delta)) / n as f64)
}

/// Result of the theta grid search.
#[derive(Debug, Clone, Copy)]
pub struct ThetaStar {
    pub theta: PostProcParams,
    /// GMI attained at theta.
    pub gmi: f64,
    /// Set when the corresponding class was empty and the parameter was
    /// pinned to 1 (it cannot influence the objective).
    pub gamma_degenerate: bool,
    pub delta_degenerate: bool,
}

const GRID_MAX: f64 = 4.0;
const GRID_STEP: f64 = 0.05;

/// Maximizes the class objective over [0, 4]: coarse scan at step 0.05, then
/// two refinement rounds at step/10 around the incumbent. Ties go to the
/// smaller scale. Returns (scale, objective sum).
fn optimize_class(blocks: &[&[(f64, f64)]]) -> (f64, f64) {
    let scan = |center: f64, step: f64, half_range: usize, best: &mut (f64, f64)| {
        for j in 0..=2 * half_range {
            let scale = center + (j as f64 - half_range as f64) * step;
            if !(0.0..=GRID_MAX).contains(&scale) {
                continue;
            }
            let s = class_sum(blocks, scale);
            if s > best.1 {
                *best = (scale, s);
            }
        }
    };
    let coarse_points = (GRID_MAX / GRID_STEP).round() as usize;
    let mut best = (0.0, f64::NEG_INFINITY);
    for j in 0..=coarse_points {
        let scale = j as f64 * GRID_STEP;
        let s = class_sum(blocks, scale);
        if s > best.1 {
            best = (scale, s);
        }
    }
    scan(best.0, GRID_STEP / 10.0, 10, &mut best);
    scan(best.0, GRID_STEP / 100.0, 10, &mut best);
    best
}

/// theta* = argmax of the empirical GMI, per Table-I-style calibration. The
/// objective separates per class, so each parameter gets its own scan over
/// the same fixed sample set.
pub fn optimize_theta(samples: &LabeledSampleSet) -> Result<ThetaStar, GmiError> {
    let block = samples.split();
    optimize_theta_blocks(&[&block])
}

pub fn optimize_theta_blocks(blocks: &[&SampleBlock]) -> Result<ThetaStar, GmiError> {
    let n: usize = blocks.iter().map(|b| b.len()).sum();
    if n == 0 {
        return Err(GmiError::EmptySampleSet);
    }
    let alt: Vec<&[(f64, f64)]> = blocks
        .iter()
        .map(|b| b.alt.as_slice())
        .filter(|s| !s.is_empty())
        .collect();
    let no_alt: Vec<&[(f64, f64)]> = blocks
        .iter()
        .map(|b| b.no_alt.as_slice())
        .filter(|s| !s.is_empty())
        .collect();
    let (gamma, alt_sum, gamma_degenerate) = if alt.is_empty() {
        (1.0, 0.0, true)
    } else {
        let (g, s) = optimize_class(&alt);
        (g, s, false)
    };
    let (delta, noalt_sum, delta_degenerate) = if no_alt.is_empty() {
        (1.0, 0.0, true)
    } else {
        let (d, s) = optimize_class(&no_alt);
        (d, s, false)
    };
    Ok(ThetaStar {
        theta: PostProcParams::new(gamma, delta),
        gmi: (alt_sum + noalt_sum) / n as f64,
        gamma_degenerate,
        delta_degenerate,
    })
}
