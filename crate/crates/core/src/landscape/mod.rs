//! OneMax with a frozen per-point distortion.
//!
//! Every search point `x` carries one distortion `y_x ~ D` fixed for the
//! lifetime of the landscape; re-evaluating `x` always returns the same
//! `|x|_1 + y_x`. Nothing is stored per point. The distortion is drawn from a
//! SplitMix64 counter stream whose key is the first eight bytes of
//! `SHA-256(seed_le || canonical_bytes(x))`; normal draws use the polar
//! method, geometric draws use inverse transform.

mod bitstring;
mod noise;

pub use bitstring::{onemax, BitString};
pub use noise::{geometric_p_for_variance, sample_geometric, sample_normal, NoiseModel};

use rand::SeedableRng;
use rand_xoshiro::SplitMix64;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A `D`-rugged OneMax instance. Immutable; safe to share across threads.
#[derive(Clone, Debug, PartialEq)]
pub struct FrozenLandscape {
    n: usize,
    noise: NoiseModel,
    seed: u64,
}

impl FrozenLandscape {
    pub fn new(n: usize, noise: NoiseModel, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("landscape dimension must be positive"));
        }
        noise.validate()?;
        Ok(FrozenLandscape { n, noise, seed })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The distortion `y_x`. A pure function of `(seed, x)`.
    pub fn frozen_noise(&self, x: &BitString) -> f64 {
        debug_assert_eq!(x.len(), self.n, "bit string length differs from landscape");
        if self.noise == NoiseModel::None {
            return 0.0;
        }
        let mut stream = SplitMix64::from_seed(self.point_key(x));
        self.noise.sample(&mut stream)
    }

    /// `|x|_1 + y_x`.
    pub fn evaluate(&self, x: &BitString) -> f64 {
        onemax(x) as f64 + self.frozen_noise(x)
    }

    fn point_key(&self, x: &BitString) -> [u8; 8] {
        let words = x.words();
        let mut input = Vec::with_capacity(16 + 8 * words.len());
        input.extend_from_slice(&self.seed.to_le_bytes());
        input.extend_from_slice(&(x.len() as u64).to_le_bytes());
        for w in words {
            input.extend_from_slice(&w.to_le_bytes());
        }
        let digest = Sha256::digest(&input);
        let mut key = [0u8; 8];
        key.copy_from_slice(&digest[..8]);
        key
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;
    use statrs::distribution::{ContinuousCDF, Normal};

    fn landscape(noise: NoiseModel, seed: u64) -> FrozenLandscape {
        FrozenLandscape::new(64, noise, seed).unwrap()
    }

    #[test]
    fn noiseless_is_onemax() {
        let l = FrozenLandscape::new(4, NoiseModel::None, 1).unwrap();
        let x: BitString = "1110".parse().unwrap();
        assert_eq!(l.frozen_noise(&x), 0.0);
        assert_eq!(l.evaluate(&x), 3.0);
    }

    #[test]
    fn frozen_noise_is_deterministic() {
        let l = landscape(NoiseModel::normal(5.0).unwrap(), 42);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let x = BitString::random(64, &mut rng);
            let a = l.evaluate(&x) - onemax(&x) as f64;
            let b = l.evaluate(&x.clone()) - onemax(&x) as f64;
            assert_eq!(a.to_bits(), b.to_bits());
        }
        // an equal landscape built separately agrees bit for bit
        let l2 = landscape(NoiseModel::normal(5.0).unwrap(), 42);
        let x = BitString::ones(64);
        assert_eq!(l.frozen_noise(&x).to_bits(), l2.frozen_noise(&x).to_bits());
    }

    #[test]
    fn canonical_key_matches_canonical_bytes() {
        let l = landscape(NoiseModel::normal(1.0).unwrap(), 7);
        let x = BitString::random(64, &mut ChaCha8Rng::seed_from_u64(1));
        let mut input = 7u64.to_le_bytes().to_vec();
        input.extend(x.canonical_bytes());
        let digest = Sha256::digest(&input);
        assert_eq!(l.point_key(&x)[..], digest[..8]);
    }

    #[test]
    fn geometric_distortion_is_positive_integer() {
        let l = landscape(NoiseModel::geometric(0.5).unwrap(), 3);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let x = BitString::random(64, &mut rng);
            let d = l.evaluate(&x) - onemax(&x) as f64;
            assert!(d >= 1.0 && d.fract() == 0.0, "{d}");
        }
    }

    #[test]
    fn seeds_give_different_landscapes() {
        let a = landscape(NoiseModel::normal(1.0).unwrap(), 1);
        let b = landscape(NoiseModel::normal(1.0).unwrap(), 2);
        let x = BitString::zeros(64);
        assert_ne!(a.frozen_noise(&x), b.frozen_noise(&x));
    }

    #[test]
    fn rejects_empty_dimension_and_bad_noise() {
        assert!(FrozenLandscape::new(0, NoiseModel::None, 0).is_err());
        assert!(FrozenLandscape::new(5, NoiseModel::Normal { sigma2: -1.0 }, 0).is_err());
    }

    fn uniform_noise_sample(l: &FrozenLandscape, count: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| l.frozen_noise(&BitString::random(l.n(), &mut rng)))
            .collect()
    }

    #[test]
    fn keyed_normal_noise_moments() {
        let l = FrozenLandscape::new(100, NoiseModel::normal(5.0).unwrap(), 11).unwrap();
        let ys = uniform_noise_sample(&l, 100_000, 12);
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        let var = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / (ys.len() as f64 - 1.0);
        assert!(mean.abs() < 0.05, "mean {mean}");
        assert!((var - 5.0).abs() < 0.3, "variance {var}");
    }

    // One-sample Kolmogorov-Smirnov at 1% significance: D_crit = 1.628 / sqrt(N).
    fn ks_statistic(mut ys: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        ys.sort_by(f64::total_cmp);
        let n = ys.len() as f64;
        let mut d: f64 = 0.0;
        let mut i = 0;
        while i < ys.len() {
            let mut j = i;
            while j < ys.len() && ys[j] == ys[i] {
                j += 1;
            }
            let f = cdf(ys[i]);
            let f_left = cdf(ys[i] - 1e-9);
            d = d
                .max((j as f64 / n - f).abs())
                .max((f_left - i as f64 / n).abs());
            i = j;
        }
        d
    }

    #[test]
    fn keyed_noise_matches_analytic_cdf() {
        let crit = 1.628 / (100_000f64).sqrt();
        let normal = NoiseModel::normal(5.0).unwrap();
        let l = FrozenLandscape::new(100, normal, 21).unwrap();
        let reference = Normal::new(0.0, 5f64.sqrt()).unwrap();
        let d = ks_statistic(uniform_noise_sample(&l, 100_000, 22), |y| reference.cdf(y));
        assert!(d < crit, "normal KS {d} >= {crit}");

        let geo = NoiseModel::geometric_with_variance(5.0).unwrap();
        let l = FrozenLandscape::new(100, geo, 23).unwrap();
        let d = ks_statistic(uniform_noise_sample(&l, 100_000, 24), |y| geo.cdf(y));
        assert!(d < crit, "geometric KS {d} >= {crit}");
    }

    #[test]
    fn neighbour_noise_is_uncorrelated() {
        let l = FrozenLandscape::new(100, NoiseModel::normal(5.0).unwrap(), 31).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let pairs = 100_000;
        let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for _ in 0..pairs {
            let x = BitString::random(100, &mut rng);
            let mut y = x.clone();
            y.flip(rng.random_range(0..100));
            let (a, b) = (l.frozen_noise(&x), l.frozen_noise(&y));
            sa += a;
            sb += b;
            saa += a * a;
            sbb += b * b;
            sab += a * b;
        }
        let m = pairs as f64;
        let cov = sab / m - sa / m * sb / m;
        let rho = cov / ((saa / m - (sa / m).powi(2)) * (sbb / m - (sb / m).powi(2))).sqrt();
        assert!(rho.abs() < 0.01, "rho {rho}");
    }
}
