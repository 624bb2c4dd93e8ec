//! biAWGN channel: SNR bookkeeping, BPSK transmission, channel LLRs, and
//! reproducible random streams.
//!
//! Streams are ChaCha8 generators keyed by (master_seed, stream_id); the same
//! pair always yields the same sequence and distinct pairs are independent,
//! which keeps results identical for any worker count. Gaussian variates come
//! from `rand_distr`'s ziggurat sampler, so sequences are reproducible for
//! the pinned crate version.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("code rate must satisfy 0 < R <= 1, got {0}")]
    InvalidRate(f64),
    #[error("sigma must be positive, got {0}")]
    InvalidSigma(f64),
}

/// sigma = sqrt(1 / (2 R 10^(EbN0/10))).
pub fn snr_to_sigma(ebn0_db: f64, rate: f64) -> Result<f64, ChannelError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(ChannelError::InvalidRate(rate));
    }
    Ok((1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt())
}

/// l = 2 y / sigma^2.
pub fn channel_llr(y: f64, sigma: f64) -> Result<f64, ChannelError> {
    if !(sigma > 0.0) {
        return Err(ChannelError::InvalidSigma(sigma));
    }
    Ok(2.0 * y / (sigma * sigma))
}

/// Channel parameters tied together by Eb/N0 = 1 / (2 R sigma^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    sigma: f64,
    ebn0_db: f64,
    rate: f64,
}

impl ChannelParams {
    pub fn from_ebn0(ebn0_db: f64, rate: f64) -> Result<Self, ChannelError> {
        Ok(Self {
            sigma: snr_to_sigma(ebn0_db, rate)?,
            ebn0_db,
            rate,
        })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn noise_var(&self) -> f64 {
        self.sigma * self.sigma
    }

    pub fn ebn0_db(&self) -> f64 {
        self.ebn0_db
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn llr(&self, y: f64) -> f64 {
        2.0 * y / self.noise_var()
    }
}

/// A reproducible random stream identified by (master_seed, stream_id).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Stream-id layout: purpose tag in the top byte, a 24-bit lane (half
/// iteration, SNR index, ...) and a 32-bit element index (frame, group, ...).
pub fn compose_stream_id(tag: u8, lane: u32, index: u32) -> u64 {
    assert!(lane < (1 << 24), "stream lane out of range");
    ((tag as u64) << 56) | ((lane as u64) << 32) | index as u64
}

/// BPSK maps bit 0 to +1 and bit 1 to -1.
pub fn modulate(bits: &[u8]) -> Vec<f64> {
    bits.iter().map(|&b| 1.0 - 2.0 * b as f64).collect()
}

/// y = x + z with z ~ N(0, sigma^2) drawn from the stream.
pub fn transmit(bits: &[u8], sigma: f64, stream: RngStream) -> Vec<f64> {
    let mut rng = stream.rng();
    bits.iter()
        .map(|&b| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (1.0 - 2.0 * b as f64) + sigma * z
        })
        .collect()
}

/// Channel LLRs for an all-zero transmission, the common simulation path:
/// l_i = 2 (1 + sigma z_i) / sigma^2.
pub fn zero_codeword_llrs(n: usize, sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let var = sigma * sigma;
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            2.0 * (1.0 + sigma * z) / var
        })
        .collect()
}

/// Gaussian samples N(mean, var), the density-evolution channel model.
pub fn gaussian_samples(n: usize, mean: f64, var: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let sd = var.sqrt();
    (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            mean + sd * z
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_to_sigma_examples() {
        assert!((snr_to_sigma(0.0, 0.5).unwrap() - 1.0).abs() < 1e-12);
        let s = snr_to_sigma(3.0103, 0.5).unwrap();
        assert!((s * s - 0.5).abs() < 1e-4);
        let s = snr_to_sigma(3.7, 0.872).unwrap();
        assert!((s * s - 1.0 / (2.0 * 0.872 * 10f64.powf(0.37))).abs() < 1e-12);
        assert!(snr_to_sigma(1.0, 0.0).is_err());
        assert!(snr_to_sigma(1.0, -0.2).is_err());
    }

    #[test]
    fn channel_llr_examples() {
        assert_eq!(channel_llr(0.0, 1.3).unwrap(), 0.0);
        assert!((channel_llr(1.0, 2f64.sqrt()).unwrap() - 1.0).abs() < 1e-12);
        assert!((channel_llr(-0.5, 1.0).unwrap() + 1.0).abs() < 1e-12);
        assert!(channel_llr(1.0, 0.0).is_err());
    }

    #[test]
    fn transmit_noiseless() {
        let bits = [0u8, 1, 1, 0];
        let y = transmit(&bits, 0.0, RngStream::new(1, 2));
        assert_eq!(y, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn noise_moments() {
        let n = 1_000_000usize;
        let sigma = 0.8;
        let bits = vec![0u8; n];
        let y = transmit(&bits, sigma, RngStream::new(42, 0));
        let mean: f64 = y.iter().map(|v| v - 1.0).sum::<f64>() / n as f64;
        let var: f64 = y.iter().map(|v| (v - 1.0 - mean).powi(2)).sum::<f64>() / n as f64;
        // 5 sigma / sqrt(n) band for the mean, 1% for the variance.
        assert!(mean.abs() < 5.0 * sigma / (n as f64).sqrt(), "mean {mean}");
        assert!((var / (sigma * sigma) - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn llr_consistency() {
        // Conditioned on X=+1 the LLRs are N(2/sigma^2, 4/sigma^2).
        let n = 500_000usize;
        let sigma = 1.1;
        let mut rng = RngStream::new(7, 3).rng();
        let l = zero_codeword_llrs(n, sigma, &mut rng);
        let mean: f64 = l.iter().sum::<f64>() / n as f64;
        let var: f64 = l.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        let mu = 2.0 / (sigma * sigma);
        assert!((mean - mu).abs() < 0.02, "mean {mean} vs {mu}");
        assert!((var / (2.0 * mu) - 1.0).abs() < 0.02, "var {var} vs {}", 2.0 * mu);
    }

    #[test]
    fn streams_reproducible_and_distinct() {
        let a1 = transmit(&[0; 32], 1.0, RngStream::new(9, 5));
        let a2 = transmit(&[0; 32], 1.0, RngStream::new(9, 5));
        let b = transmit(&[0; 32], 1.0, RngStream::new(9, 6));
        assert_eq!(a1, a2);
        assert_ne!(a1, b);
    }

    #[test]
    fn ebn0_sigma_rate_invariant() {
        let p = ChannelParams::from_ebn0(2.0, 0.635).unwrap();
        let back = 1.0 / (2.0 * p.rate() * p.noise_var());
        assert!((10.0 * back.log10() - 2.0).abs() < 1e-10);
    }
}
