//! Product codes and their iterative decoders: the original Chase-Pyndiah
//! schedule with heuristic (alpha, beta) scaling, the extrinsic decoder used
//! for density evolution, and the modified decoder with GMI-optimized
//! (gamma, delta) post-processing, plus the two-step schedule calibration.

use crate::channel::{compose_stream_id, snr_to_sigma, zero_codeword_llrs, RngStream};
use crate::chase::{
    soft_output_extrinsic_with, soft_output_with, ChaseError, ChaseScratch,
};
use crate::code::{CodeError, CodeSpec};
use crate::gmi::{optimize_theta_blocks, post_process, GmiError, PostProcParams, SampleBlock};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("half iteration {half_iter}, line {line}: {source}")]
    Chase {
        half_iter: usize,
        line: usize,
        source: ChaseError,
    },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Gmi(#[from] GmiError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

/// Square product code built from identical row and column component codes.
#[derive(Debug, Clone)]
pub struct ProductCode {
    component: CodeSpec,
}

impl ProductCode {
    pub fn new(component: CodeSpec) -> Self {
        Self { component }
    }

    pub fn component(&self) -> &CodeSpec {
        &self.component
    }

    /// Component block length; the product code has n^2 bits.
    pub fn n(&self) -> usize {
        self.component.n()
    }

    pub fn k(&self) -> usize {
        self.component.k()
    }

    pub fn rate(&self) -> f64 {
        let r = self.component.rate();
        r * r
    }

    /// Encodes a k x k message (row-major) into an n x n codeword matrix:
    /// rows first, then columns. For linear systematic component codes the
    /// order does not matter.
    pub fn encode(&self, message: &[u8]) -> Result<Vec<u8>, DecodeError> {
        let (n, k) = (self.n(), self.k());
        if message.len() != k * k {
            return Err(DecodeError::InvalidParams(format!(
                "message must be {k}x{k}, got {} bits",
                message.len()
            )));
        }
        let mut out = vec![0u8; n * n];
        for i in 0..k {
            let row = self.component.encode(&message[i * k..(i + 1) * k])?;
            out[i * n..(i + 1) * n].copy_from_slice(&row);
        }
        let mut col = vec![0u8; k];
        for j in 0..n {
            for i in 0..k {
                col[i] = out[i * n + j];
            }
            let enc = self.component.encode(&col)?;
            for i in k..n {
                out[i * n + j] = enc[i];
            }
        }
        Ok(out)
    }

    /// Checks all 2n component constraints.
    pub fn is_codeword(&self, word: &[u8]) -> Result<bool, DecodeError> {
        let n = self.n();
        if word.len() != n * n {
            return Err(DecodeError::InvalidParams(format!(
                "word must be {n}x{n}"
            )));
        }
        for i in 0..n {
            if !self.component.is_codeword(&word[i * n..(i + 1) * n])? {
                return Ok(false);
            }
        }
        let mut col = vec![0u8; n];
        for j in 0..n {
            for i in 0..n {
                col[i] = word[i * n + j];
            }
            if !self.component.is_codeword(&col)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Decoding direction of a half iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Rows,
    Columns,
}

impl Direction {
    fn flip(self) -> Self {
        match self {
            Direction::Rows => Direction::Columns,
            Direction::Columns => Direction::Rows,
        }
    }
}

/// Per-half-iteration scaling coefficients: Pyndiah's heuristic (alpha, beta)
/// or GMI-calibrated (gamma, delta).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientSchedule {
    HeuristicAlphaBeta { entries: Vec<(f64, f64)> },
    GmiGammaDelta { entries: Vec<(f64, f64)> },
}

impl CoefficientSchedule {
    /// Pyndiah's schedule: alpha = 0.1, 0.3, 0.5, 0.7, 0.9, 1, 1, 1 and
    /// beta = 0.2, 0.4, 0.6, 0.8, 1, 1, 1, 1, both 1 afterwards.
    pub fn pyndiah_default() -> Self {
        CoefficientSchedule::HeuristicAlphaBeta {
            entries: vec![
                (0.1, 0.2),
                (0.3, 0.4),
                (0.5, 0.6),
                (0.7, 0.8),
                (0.9, 1.0),
                (1.0, 1.0),
                (1.0, 1.0),
                (1.0, 1.0),
            ],
        }
    }

    pub fn gmi(entries: Vec<(f64, f64)>) -> Self {
        CoefficientSchedule::GmiGammaDelta { entries }
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        match self {
            CoefficientSchedule::HeuristicAlphaBeta { entries } => entries,
            CoefficientSchedule::GmiGammaDelta { entries } => entries,
        }
    }

    pub fn is_gmi(&self) -> bool {
        matches!(self, CoefficientSchedule::GmiGammaDelta { .. })
    }

    /// Coefficients for 1-based half iteration `l`. Past the listed entries
    /// the heuristic schedule continues with (1, 1) and a calibrated schedule
    /// repeats its last entry.
    pub fn at(&self, l: usize) -> (f64, f64) {
        assert!(l >= 1, "half iterations are 1-based");
        let entries = self.entries();
        if l <= entries.len() {
            entries[l - 1]
        } else {
            match self {
                CoefficientSchedule::HeuristicAlphaBeta { .. } => (1.0, 1.0),
                CoefficientSchedule::GmiGammaDelta { .. } => {
                    *entries.last().expect("schedule must be nonempty")
                }
            }
        }
    }
}

/// Square f64 matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    fn gather(&self, dir: Direction, idx: usize, buf: &mut Vec<f64>) {
        buf.clear();
        match dir {
            Direction::Rows => buf.extend_from_slice(self.row(idx)),
            Direction::Columns => buf.extend((0..self.n).map(|i| self.data[i * self.n + idx])),
        }
    }

    fn scatter(&mut self, dir: Direction, idx: usize, vals: &[f64]) {
        match dir {
            Direction::Rows => self.data[idx * self.n..(idx + 1) * self.n].copy_from_slice(vals),
            Direction::Columns => {
                for (i, &v) in vals.iter().enumerate() {
                    self.data[i * self.n + idx] = v;
                }
            }
        }
    }

    fn mean_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum::<f64>() / self.data.len() as f64
    }
}

/// Counters accumulated over a frame decode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeCounters {
    /// Half iterations in which no position at all had an alternative
    /// codeword, making avg|W_I| undefined (normalizer pinned to 1).
    pub empty_alternative_sets: u64,
    /// Extrinsic per-position empty-list failures.
    pub failed_positions: u64,
}

/// Message state threaded through the half iterations.
#[derive(Debug, Clone)]
pub struct IterationState {
    l_ch: SquareMatrix,
    l_in: SquareMatrix,
    /// L_in that fed the most recent half iteration (needed by the APP rule).
    l_prev: SquareMatrix,
    avg_abs_lch: f64,
    /// Completed half iterations; the next one is half_iter + 1.
    half_iter: usize,
    direction: Direction,
    /// Modulated decisions d of the most recent half iteration.
    last_d: SquareMatrix,
    pub counters: DecodeCounters,
}

impl IterationState {
    /// Original Chase-Pyndiah initialization: L_in is the normalized channel
    /// LLR matrix (the first term of the combining rule).
    pub fn new_original(l_ch: SquareMatrix, first: Direction) -> Self {
        let avg = l_ch.mean_abs();
        let norm = if avg > 0.0 { avg } else { 1.0 };
        let l_in = SquareMatrix::from_vec(l_ch.n, l_ch.data.iter().map(|v| v / norm).collect());
        Self::init(l_ch, l_in, first)
    }

    /// Extrinsic/modified initialization: L_in = L_ch unnormalized.
    pub fn new_unnormalized(l_ch: SquareMatrix, first: Direction) -> Self {
        let l_in = l_ch.clone();
        Self::init(l_ch, l_in, first)
    }

    fn init(l_ch: SquareMatrix, l_in: SquareMatrix, first: Direction) -> Self {
        let n = l_ch.n;
        let avg = l_ch.mean_abs();
        Self {
            avg_abs_lch: if avg > 0.0 { avg } else { 1.0 },
            l_ch,
            l_in,
            l_prev: SquareMatrix::zeros(n),
            half_iter: 0,
            direction: first,
            last_d: SquareMatrix::zeros(n),
            counters: DecodeCounters::default(),
        }
    }

    pub fn half_iter(&self) -> usize {
        self.half_iter
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    pub fn l_in(&self) -> &SquareMatrix {
        &self.l_in
    }

    pub fn l_ch(&self) -> &SquareMatrix {
        &self.l_ch
    }

    /// Hard decisions from the modulated ML codewords of the most recent
    /// half iteration (the original Chase-Pyndiah rule).
    pub fn decisions_from_d(&self) -> Vec<u8> {
        self.last_d.data.iter().map(|&x| u8::from(x < 0.0)).collect()
    }

    /// Hard decisions from the a posteriori LLR v + l_ch + l_in of the most
    /// recent half iteration, which equals l_out + l_in_previous.
    pub fn decisions_from_app(&self) -> Vec<u8> {
        self.l_in
            .data
            .iter()
            .zip(&self.l_prev.data)
            .map(|(&lo, &lp)| u8::from(lo + lp < 0.0))
            .collect()
    }
}

/// Chase outputs of one half iteration, before post-processing.
pub struct StageOutput {
    pub w: SquareMatrix,
    pub alt: Vec<bool>,
    pub d: SquareMatrix,
    pub failed: Vec<(usize, usize)>,
}

impl StageOutput {
    /// (w, l_ch, alt) samples of this stage split by class, skipping failed
    /// positions.
    pub fn sample_block(&self, l_ch: &SquareMatrix) -> SampleBlock {
        let mut block = SampleBlock::default();
        let n = self.w.n;
        let mut failed_mask = vec![false; n * n];
        for &(i, j) in &self.failed {
            failed_mask[i * n + j] = true;
        }
        for idx in 0..n * n {
            if failed_mask[idx] {
                continue;
            }
            let pair = (self.w.data[idx], l_ch.data[idx]);
            if self.alt[idx] {
                block.alt.push(pair);
            } else {
                block.no_alt.push(pair);
            }
        }
        block
    }
}

/// Runs the Chase stage of the next half iteration: soft-output decoding of
/// every row (or column) of L_in. `extrinsic` switches to the per-position
/// variant fed by the channel LLRs, whose empty-list failures are recorded
/// rather than raised.
pub fn chase_stage(
    state: &IterationState,
    pc: &ProductCode,
    p: usize,
    extrinsic: bool,
) -> Result<StageOutput, DecodeError> {
    let n = pc.n();
    let dir = state.direction;
    let half_iter = state.half_iter + 1;
    let mut out = StageOutput {
        w: SquareMatrix::zeros(n),
        alt: vec![false; n * n],
        d: SquareMatrix::zeros(n),
        failed: Vec::new(),
    };
    let mut scratch = ChaseScratch::default();
    let mut l_line = Vec::with_capacity(n);
    let mut lch_line = Vec::with_capacity(n);
    for line in 0..n {
        state.l_in.gather(dir, line, &mut l_line);
        let outcome = if extrinsic {
            state.l_ch.gather(dir, line, &mut lch_line);
            soft_output_extrinsic_with(pc.component(), &l_line, &lch_line, p, &mut scratch)
        } else {
            soft_output_with(pc.component(), &l_line, p, &mut scratch)
        }
        .map_err(|source| DecodeError::Chase {
            half_iter,
            line,
            source,
        })?;
        out.w.scatter(dir, line, &outcome.w);
        out.d.scatter(dir, line, &outcome.d);
        for (pos, &alt) in outcome.alt_exists.iter().enumerate() {
            let idx = match dir {
                Direction::Rows => line * n + pos,
                Direction::Columns => pos * n + line,
            };
            out.alt[idx] = alt;
        }
        for (pos, &f) in outcome.failed.iter().enumerate() {
            if f {
                let (i, j) = match dir {
                    Direction::Rows => (line, pos),
                    Direction::Columns => (pos, line),
                };
                out.failed.push((i, j));
            }
        }
    }
    Ok(out)
}

/// Test hook: pins the two average normalizers instead of measuring them.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct NormalizerOverride {
    pub avg_abs_w: Option<f64>,
    pub avg_abs_lch: Option<f64>,
}

/// Completes an original-Chase-Pyndiah half iteration from a Chase stage:
/// V = alpha/avg|W_I| * (w or beta w), L_out = L_ch/avg|L_ch| + V.
pub(crate) fn apply_pyndiah(
    state: &mut IterationState,
    stage: StageOutput,
    alpha: f64,
    beta: f64,
    ovr: NormalizerOverride,
) {
    let n2 = state.l_ch.data.len();
    let avg_w = ovr.avg_abs_w.unwrap_or_else(|| {
        let (sum, count) = stage
            .w
            .data
            .iter()
            .zip(&stage.alt)
            .filter(|(_, &a)| a)
            .fold((0.0, 0usize), |(s, c), (w, _)| (s + w.abs(), c + 1));
        if count == 0 {
            state.counters.empty_alternative_sets += 1;
            1.0
        } else {
            sum / count as f64
        }
    });
    let lch_norm = ovr.avg_abs_lch.unwrap_or(state.avg_abs_lch);
    for idx in 0..n2 {
        let w = stage.w.data[idx];
        let v = if stage.alt[idx] {
            alpha / avg_w * w
        } else {
            alpha / avg_w * beta * w
        };
        state.l_prev.data[idx] = state.l_ch.data[idx] / lch_norm + v;
    }
    finish_half_iteration(state, stage);
}

/// Completes a GMI-post-processed half iteration: V = f_pp(W; theta),
/// L_out = L_ch + V with no normalization.
pub fn apply_gmi(state: &mut IterationState, stage: StageOutput, theta: &PostProcParams) {
    state.counters.failed_positions += stage.failed.len() as u64;
    let n2 = state.l_ch.data.len();
    for idx in 0..n2 {
        let v = post_process(stage.w.data[idx], stage.alt[idx], theta);
        state.l_prev.data[idx] = state.l_ch.data[idx] + v;
    }
    finish_half_iteration(state, stage);
}

fn finish_half_iteration(state: &mut IterationState, stage: StageOutput) {
    // l_prev currently holds L_out; swap so that l_in becomes L_out and
    // l_prev the L_in that produced it.
    std::mem::swap(&mut state.l_in, &mut state.l_prev);
    state.last_d = stage.d;
    state.half_iter += 1;
    state.direction = state.direction.flip();
}

/// One half iteration of the original Chase-Pyndiah decoder.
pub fn pyndiah_half_iteration(
    state: &mut IterationState,
    pc: &ProductCode,
    p: usize,
    schedule: &CoefficientSchedule,
) -> Result<(), DecodeError> {
    let (alpha, beta) = schedule.at(state.half_iter + 1);
    let stage = chase_stage(state, pc, p, false)?;
    apply_pyndiah(state, stage, alpha, beta, NormalizerOverride::default());
    Ok(())
}

/// One half iteration of the extrinsic decoder (per-position Chase runs,
/// post-processing by theta, unnormalized channel term).
pub fn extrinsic_half_iteration(
    state: &mut IterationState,
    pc: &ProductCode,
    p: usize,
    theta: &PostProcParams,
) -> Result<(), DecodeError> {
    let stage = chase_stage(state, pc, p, true)?;
    apply_gmi(state, stage, theta);
    Ok(())
}

/// One half iteration of the modified decoder: like the extrinsic one but
/// with a single Chase run per row/column.
pub fn mcpd_half_iteration(
    state: &mut IterationState,
    pc: &ProductCode,
    p: usize,
    theta: &PostProcParams,
) -> Result<(), DecodeError> {
    let stage = chase_stage(state, pc, p, false)?;
    apply_gmi(state, stage, theta);
    Ok(())
}

/// Which decoder processes the frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecoderVariant {
    /// Original Chase-Pyndiah with heuristic (alpha, beta).
    Original,
    /// Extrinsic Chase-Pyndiah with GMI post-processing.
    Ecpd,
    /// Modified Chase-Pyndiah with GMI post-processing.
    Mcpd,
}

/// Result of decoding one frame.
#[derive(Debug, Clone)]
pub struct DecodeResult {
    /// n x n hard decisions, row-major.
    pub decisions: Vec<u8>,
    /// BER against the reference codeword after each half iteration, when a
    /// reference was supplied.
    pub half_iter_ber: Option<Vec<f64>>,
    pub counters: DecodeCounters,
}

fn ber_against(decisions: &[u8], reference: &[u8]) -> f64 {
    let errs = decisions
        .iter()
        .zip(reference)
        .filter(|(a, b)| a != b)
        .count();
    errs as f64 / reference.len() as f64
}

fn check_decode_params(pc: &ProductCode, l_ch: &[f64], l_max: usize) -> Result<(), DecodeError> {
    let n = pc.n();
    if l_ch.len() != n * n {
        return Err(DecodeError::InvalidParams(format!(
            "channel LLR matrix must be {n}x{n}"
        )));
    }
    if l_max < 1 {
        return Err(DecodeError::InvalidParams("l_max must be >= 1".into()));
    }
    Ok(())
}

/// Original Chase-Pyndiah decoding: l_max half iterations, decisions from
/// the modulated ML codewords of the last half iteration.
pub fn original_cp_decode(
    pc: &ProductCode,
    l_ch: &[f64],
    schedule: &CoefficientSchedule,
    p: usize,
    l_max: usize,
    first: Direction,
    reference: Option<&[u8]>,
) -> Result<DecodeResult, DecodeError> {
    check_decode_params(pc, l_ch, l_max)?;
    let mut state = IterationState::new_original(
        SquareMatrix::from_vec(pc.n(), l_ch.to_vec()),
        first,
    );
    let mut trace = reference.map(|_| Vec::with_capacity(l_max));
    for _ in 0..l_max {
        pyndiah_half_iteration(&mut state, pc, p, schedule)?;
        if let (Some(trace), Some(r)) = (trace.as_mut(), reference) {
            trace.push(ber_against(&state.decisions_from_d(), r));
        }
    }
    Ok(DecodeResult {
        decisions: state.decisions_from_d(),
        half_iter_ber: trace,
        counters: state.counters,
    })
}

/// ECPD/MCPD decoding with a (gamma, delta) schedule; final decisions follow
/// the a posteriori rule l_app = v + l_ch + l_in.
pub fn gmi_cp_decode(
    pc: &ProductCode,
    l_ch: &[f64],
    theta_schedule: &CoefficientSchedule,
    p: usize,
    l_max: usize,
    variant: DecoderVariant,
    first: Direction,
    reference: Option<&[u8]>,
) -> Result<DecodeResult, DecodeError> {
    check_decode_params(pc, l_ch, l_max)?;
    let extrinsic = match variant {
        DecoderVariant::Ecpd => true,
        DecoderVariant::Mcpd => false,
        DecoderVariant::Original => {
            return Err(DecodeError::InvalidParams(
                "gmi_cp_decode expects the ECPD or MCPD variant".into(),
            ))
        }
    };
    if theta_schedule.entries().len() < l_max {
        return Err(DecodeError::InvalidParams(format!(
            "theta schedule has {} entries, need {l_max}",
            theta_schedule.entries().len()
        )));
    }
    let mut state = IterationState::new_unnormalized(
        SquareMatrix::from_vec(pc.n(), l_ch.to_vec()),
        first,
    );
    let mut trace = reference.map(|_| Vec::with_capacity(l_max));
    for l in 1..=l_max {
        let (gamma, delta) = theta_schedule.at(l);
        let theta = PostProcParams::new(gamma, delta);
        let stage = chase_stage(&state, pc, p, extrinsic)?;
        apply_gmi(&mut state, stage, &theta);
        if let (Some(trace), Some(r)) = (trace.as_mut(), reference) {
            trace.push(ber_against(&state.decisions_from_app(), r));
        }
    }
    Ok(DecodeResult {
        decisions: state.decisions_from_app(),
        half_iter_ber: trace,
        counters: state.counters,
    })
}

/// Per-half-iteration record of a calibration run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationEntry {
    pub half_iter: usize,
    pub gamma: f64,
    pub delta: f64,
    /// GMI attained by theta* on the pooled samples.
    pub gmi: f64,
    pub gamma_degenerate: bool,
    pub delta_degenerate: bool,
    pub samples: u64,
}

/// Output of the pilot phase.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub ebn0_db: f64,
    pub p: usize,
    pub pilot_frames: usize,
    pub entries: Vec<CalibrationEntry>,
}

impl CalibrationReport {
    pub fn schedule(&self) -> CoefficientSchedule {
        CoefficientSchedule::gmi(self.entries.iter().map(|e| (e.gamma, e.delta)).collect())
    }
}

/// Stream-id purpose tags used by this crate.
pub mod stream_tags {
    pub const PILOT: u8 = 1;
    pub const MEASURE: u8 = 2;
    pub const DE_INIT: u8 = 3;
    pub const DE_CHANNEL: u8 = 4;
    pub const DE_PERMUTE: u8 = 5;
}

/// Two-step calibration, pilot phase: decode `pilot_frames` all-zero frames
/// in lockstep; before each half iteration, pool this half iteration's
/// (w, l_ch, alt) samples across all frames, maximize the GMI to get
/// theta*_l, apply it everywhere, and continue. `snr_lane` keeps pilot
/// streams distinct across SNR points of one run.
#[allow(clippy::too_many_arguments)]
pub fn calibrate_schedule(
    pc: &ProductCode,
    ebn0_db: f64,
    p: usize,
    l_max: usize,
    pilot_frames: usize,
    variant: DecoderVariant,
    first: Direction,
    master_seed: u64,
    snr_lane: u32,
) -> Result<CalibrationReport, DecodeError> {
    if pilot_frames < 1 {
        return Err(DecodeError::InvalidParams(
            "pilot_frames must be >= 1".into(),
        ));
    }
    if l_max < 1 {
        return Err(DecodeError::InvalidParams("l_max must be >= 1".into()));
    }
    let extrinsic = match variant {
        DecoderVariant::Ecpd => true,
        DecoderVariant::Mcpd => false,
        DecoderVariant::Original => {
            return Err(DecodeError::InvalidParams(
                "calibration applies to the ECPD/MCPD variants".into(),
            ))
        }
    };
    let n = pc.n();
    let sigma = snr_to_sigma(ebn0_db, pc.rate())
        .map_err(|e| DecodeError::InvalidParams(e.to_string()))?;
    let mut states: Vec<IterationState> = (0..pilot_frames)
        .into_par_iter()
        .map(|f| {
            let stream = RngStream::new(
                master_seed,
                compose_stream_id(stream_tags::PILOT, snr_lane, f as u32),
            );
            let llrs = zero_codeword_llrs(n * n, sigma, &mut stream.rng());
            IterationState::new_unnormalized(SquareMatrix::from_vec(n, llrs), first)
        })
        .collect();
    let mut entries = Vec::with_capacity(l_max);
    for l in 1..=l_max {
        let staged: Vec<(StageOutput, SampleBlock)> = states
            .par_iter()
            .map(|state| {
                let stage = chase_stage(state, pc, p, extrinsic)?;
                let block = stage.sample_block(state.l_ch());
                Ok((stage, block))
            })
            .collect::<Result<_, DecodeError>>()?;
        let blocks: Vec<&SampleBlock> = staged.iter().map(|(_, b)| b).collect();
        let samples: u64 = blocks.iter().map(|b| b.len() as u64).sum();
        let star = optimize_theta_blocks(&blocks)?;
        entries.push(CalibrationEntry {
            half_iter: l,
            gamma: star.theta.gamma,
            delta: star.theta.delta,
            gmi: star.gmi,
            gamma_degenerate: star.gamma_degenerate,
            delta_degenerate: star.delta_degenerate,
            samples,
        });
        states
            .par_iter_mut()
            .zip(staged)
            .for_each(|(state, (stage, _))| {
                apply_gmi(state, stage, &star.theta);
            });
    }
    Ok(CalibrationReport {
        ebn0_db,
        p,
        pilot_frames,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelParams;
    use crate::code::CodeFamily;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn spc_pc(n: usize) -> ProductCode {
        ProductCode::new(CodeSpec::spc(n).unwrap())
    }

    fn ebch_pc(n: usize, t: usize) -> ProductCode {
        ProductCode::new(CodeSpec::ebch(n, t).unwrap())
    }

    #[test]
    fn rate_bookkeeping() {
        for (n, t, rate) in [(64, 2, 0.635), (128, 2, 0.779), (256, 2, 0.872)] {
            let pc = ebch_pc(n, t);
            assert!((pc.rate() - rate).abs() < 5e-4, "n={n}: {}", pc.rate());
        }
    }

    #[test]
    fn encode_zero_message() {
        let pc = spc_pc(3);
        assert_eq!(pc.encode(&[0; 4]).unwrap(), vec![0; 9]);
    }

    #[test]
    fn encode_spc3_hand_example() {
        let pc = spc_pc(3);
        let m = [1, 0, 0, 1];
        let cw = pc.encode(&m).unwrap();
        assert_eq!(cw, vec![1, 0, 1, 0, 1, 1, 1, 1, 0]);
        assert!(pc.is_codeword(&cw).unwrap());
    }

    #[test]
    fn encode_order_invariance() {
        // Columns-then-rows must give the same matrix.
        let pc = ebch_pc(8, 1);
        let (n, k) = (pc.n(), pc.k());
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..100 {
            let m: Vec<u8> = (0..k * k).map(|_| rng.gen_range(0..2)).collect();
            let rows_first = pc.encode(&m).unwrap();
            // Transpose message, encode, transpose back.
            let mut mt = vec![0u8; k * k];
            for i in 0..k {
                for j in 0..k {
                    mt[j * k + i] = m[i * k + j];
                }
            }
            let enc_t = pc.encode(&mt).unwrap();
            let mut cols_first = vec![0u8; n * n];
            for i in 0..n {
                for j in 0..n {
                    cols_first[j * n + i] = enc_t[i * n + j];
                }
            }
            assert_eq!(rows_first, cols_first);
            assert!(pc.is_codeword(&rows_first).unwrap());
        }
    }

    #[test]
    fn schedule_defaults_and_tail() {
        let s = CoefficientSchedule::pyndiah_default();
        let alphas: Vec<f64> = (1..=8).map(|l| s.at(l).0).collect();
        let betas: Vec<f64> = (1..=8).map(|l| s.at(l).1).collect();
        assert_eq!(alphas, vec![0.1, 0.3, 0.5, 0.7, 0.9, 1.0, 1.0, 1.0]);
        assert_eq!(betas, vec![0.2, 0.4, 0.6, 0.8, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(s.at(9), (1.0, 1.0));
        assert_eq!(s.at(30), (1.0, 1.0));
        let g = CoefficientSchedule::gmi(vec![(0.2, 0.3), (0.4, 0.5)]);
        assert_eq!(g.at(2), (0.4, 0.5));
        assert_eq!(g.at(7), (0.4, 0.5));
    }

    fn noiseless_llrs(pc: &ProductCode, cw: &[u8], mag: f64) -> Vec<f64> {
        let _ = pc;
        cw.iter().map(|&b| if b == 0 { mag } else { -mag }).collect()
    }

    #[test]
    fn noiseless_signs_survive_half_iteration() {
        let pc = ebch_pc(16, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let m: Vec<u8> = (0..pc.k() * pc.k()).map(|_| rng.gen_range(0..2)).collect();
        let cw = pc.encode(&m).unwrap();
        let l_ch = noiseless_llrs(&pc, &cw, 50.0);
        let mut state =
            IterationState::new_original(SquareMatrix::from_vec(pc.n(), l_ch), Direction::Rows);
        let sched = CoefficientSchedule::pyndiah_default();
        pyndiah_half_iteration(&mut state, &pc, 3, &sched).unwrap();
        for (idx, &v) in state.l_in().as_slice().iter().enumerate() {
            let want_neg = cw[idx] == 1;
            assert_eq!(v < 0.0, want_neg, "position {idx}");
        }
    }

    #[test]
    fn original_decodes_noiseless_and_rejects_lmax_zero() {
        let pc = ebch_pc(16, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        let m: Vec<u8> = (0..pc.k() * pc.k()).map(|_| rng.gen_range(0..2)).collect();
        let cw = pc.encode(&m).unwrap();
        let l_ch = noiseless_llrs(&pc, &cw, 30.0);
        let sched = CoefficientSchedule::pyndiah_default();
        let res =
            original_cp_decode(&pc, &l_ch, &sched, 3, 4, Direction::Rows, Some(&cw)).unwrap();
        assert_eq!(res.decisions, cw);
        assert_eq!(res.half_iter_ber.unwrap(), vec![0.0; 4]);
        assert!(matches!(
            original_cp_decode(&pc, &l_ch, &sched, 3, 0, Direction::Rows, None),
            Err(DecodeError::InvalidParams(_))
        ));
    }

    #[test]
    fn gmi_decode_noiseless_both_variants() {
        let pc = spc_pc(4);
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let m: Vec<u8> = (0..pc.k() * pc.k()).map(|_| rng.gen_range(0..2)).collect();
        let cw = pc.encode(&m).unwrap();
        let l_ch = noiseless_llrs(&pc, &cw, 25.0);
        let sched = CoefficientSchedule::gmi(vec![(1.0, 1.0); 4]);
        for variant in [DecoderVariant::Mcpd, DecoderVariant::Ecpd] {
            let res = gmi_cp_decode(&pc, &l_ch, &sched, 2, 4, variant, Direction::Rows, None)
                .unwrap();
            assert_eq!(res.decisions, cw, "{variant:?}");
        }
    }

    #[test]
    fn extrinsic_equals_mcpd_on_first_half_iteration() {
        // At l = 1 the incoming messages equal the channel LLRs, so the
        // per-position replacement is a no-op and both pipelines agree.
        let pc = ebch_pc(8, 1);
        let params = ChannelParams::from_ebn0(3.0, pc.rate()).unwrap();
        for seed in 0..5 {
            let stream = RngStream::new(77, seed);
            let l_ch = zero_codeword_llrs(pc.n() * pc.n(), params.sigma(), &mut stream.rng());
            let theta = PostProcParams::new(0.4, 0.7);
            let mut a = IterationState::new_unnormalized(
                SquareMatrix::from_vec(pc.n(), l_ch.clone()),
                Direction::Rows,
            );
            let mut b = IterationState::new_unnormalized(
                SquareMatrix::from_vec(pc.n(), l_ch),
                Direction::Rows,
            );
            extrinsic_half_iteration(&mut a, &pc, 3, &theta).unwrap();
            mcpd_half_iteration(&mut b, &pc, 3, &theta).unwrap();
            // The two paths sum the same terms in different orders.
            for (x, y) in a.l_in().as_slice().iter().zip(b.l_in().as_slice()) {
                assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn pyndiah_with_pinned_normalizers_matches_gmi_path() {
        // With both averages pinned to 1, Eq.-style post-processing with
        // (alpha, beta) equals f_pp with theta = (alpha, alpha * beta), and
        // the combining rules coincide. Cross-checks the two code paths on
        // identical Chase outcomes.
        let pc = ebch_pc(8, 1);
        let params = ChannelParams::from_ebn0(2.0, pc.rate()).unwrap();
        for (alpha, beta) in [(1.0, 1.0), (0.5, 0.7), (0.3, 0.3)] {
            let stream = RngStream::new(78, 11);
            let l_ch = zero_codeword_llrs(pc.n() * pc.n(), params.sigma(), &mut stream.rng());
            let mut a = IterationState::new_unnormalized(
                SquareMatrix::from_vec(pc.n(), l_ch.clone()),
                Direction::Rows,
            );
            let stage = chase_stage(&a, &pc, 3, false).unwrap();
            let mut b = a.clone();
            let stage_b = chase_stage(&b, &pc, 3, false).unwrap();
            apply_pyndiah(
                &mut a,
                stage,
                alpha,
                beta,
                NormalizerOverride {
                    avg_abs_w: Some(1.0),
                    avg_abs_lch: Some(1.0),
                },
            );
            apply_gmi(
                &mut b,
                stage_b,
                &PostProcParams::new(alpha, alpha * beta),
            );
            for (x, y) in a.l_in().as_slice().iter().zip(b.l_in().as_slice()) {
                assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sign_symmetry_complement() {
        // Negating L_ch corresponds to adding the all-ones codeword: the
        // decisions complement exactly.
        let pc = ebch_pc(16, 1);
        let params = ChannelParams::from_ebn0(3.0, pc.rate()).unwrap();
        let stream = RngStream::new(79, 0);
        let l_ch = zero_codeword_llrs(pc.n() * pc.n(), params.sigma(), &mut stream.rng());
        let neg: Vec<f64> = l_ch.iter().map(|v| -v).collect();
        let sched = CoefficientSchedule::pyndiah_default();
        let a = original_cp_decode(&pc, &l_ch, &sched, 3, 4, Direction::Rows, None).unwrap();
        let b = original_cp_decode(&pc, &neg, &sched, 3, 4, Direction::Rows, None).unwrap();
        let complement: Vec<u8> = a.decisions.iter().map(|&x| 1 - x).collect();
        assert_eq!(b.decisions, complement);

        let gsched = CoefficientSchedule::gmi(vec![(0.5, 0.6); 4]);
        let a = gmi_cp_decode(&pc, &l_ch, &gsched, 3, 4, DecoderVariant::Mcpd, Direction::Rows, None)
            .unwrap();
        let b = gmi_cp_decode(&pc, &neg, &gsched, 3, 4, DecoderVariant::Mcpd, Direction::Rows, None)
            .unwrap();
        let complement: Vec<u8> = a.decisions.iter().map(|&x| 1 - x).collect();
        assert_eq!(b.decisions, complement);
    }

    #[test]
    fn calibration_smoke() {
        let pc = ebch_pc(16, 1);
        let report = calibrate_schedule(
            &pc,
            4.5,
            3,
            4,
            8,
            DecoderVariant::Mcpd,
            Direction::Rows,
            123,
            0,
        )
        .unwrap();
        assert_eq!(report.entries.len(), 4);
        for e in &report.entries {
            assert!(e.gamma.is_finite() && e.delta.is_finite());
            assert!(e.gmi <= 1.0);
            assert_eq!(e.samples, 8 * (pc.n() * pc.n()) as u64);
        }
        let sched = report.schedule();
        assert_eq!(sched.entries().len(), 4);
        assert!(sched.is_gmi());
    }

    #[test]
    fn product_code_family_roundtrip() {
        let pc = ebch_pc(32, 2);
        assert_eq!(pc.component().family(), CodeFamily::Ebch);
        assert_eq!(pc.component().k(), 21);
    }
}
