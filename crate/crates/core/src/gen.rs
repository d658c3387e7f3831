//! Seeded instance sampling, shared by the CLI and the test suites.
//!
//! The generator is ChaCha8 seeded from a 64-bit integer, so output depends
//! only on the seed and the parameters, not on the platform.

use rand::distributions::uniform::SampleRange;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::instance::{Instance, Item};

/// Probability distribution for sampled items.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbDist {
    /// `p ~ U[lo, hi)`.
    Uniform { lo: f64, hi: f64 },
    /// With probability `low_share` draw `p ~ U[0.01, 0.5)` (below one
    /// half), otherwise `p ~ U[0.5, 0.99)`.
    Mixed { low_share: f64 },
}

impl ProbDist {
    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match *self {
            ProbDist::Uniform { lo, hi } => {
                if lo == hi {
                    lo
                } else {
                    (lo..hi).sample_single(rng)
                }
            }
            ProbDist::Mixed { low_share } => {
                if rng.gen::<f64>() < low_share {
                    (0.01..0.5).sample_single(rng)
                } else {
                    (0.5..0.99).sample_single(rng)
                }
            }
        }
    }
}

impl FromStr for ProbDist {
    type Err = Error;

    /// Accepts `uniform(lo,hi)` and `mixed(q)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::BadDistributionSpec(s.to_string());
        let (name, rest) = s.split_once('(').ok_or_else(bad)?;
        let args = rest.strip_suffix(')').ok_or_else(bad)?;
        match name.trim() {
            "uniform" => {
                let (lo, hi) = args.split_once(',').ok_or_else(bad)?;
                let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                    return Err(bad());
                }
                Ok(ProbDist::Uniform { lo, hi })
            }
            "mixed" => {
                let q: f64 = args.trim().parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&q) {
                    return Err(bad());
                }
                Ok(ProbDist::Mixed { low_share: q })
            }
            _ => Err(bad()),
        }
    }
}

/// A fresh generator for a seed.
pub fn rng_for_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Samples an instance: profits uniform on `[1, cmax]`, probabilities from
/// `dist`.
pub fn sample_instance(n: usize, cmax: u64, dist: &ProbDist, rng: &mut ChaCha8Rng) -> Instance {
    let items = (0..n)
        .map(|_| Item::new(rng.gen_range(1..=cmax), dist.sample(rng)))
        .collect();
    Instance::new(items)
}

/// Samples a whole trial suite from one seed, drawing the item count of each
/// trial uniformly from `[1, n_max]`.
pub fn sample_suite(
    trials: usize,
    n_max: usize,
    cmax: u64,
    dist: &ProbDist,
    seed: u64,
) -> Vec<Instance> {
    let mut rng = rng_for_seed(seed);
    (0..trials)
        .map(|_| {
            let n = rng.gen_range(1..=n_max);
            sample_instance(n, cmax, dist, &mut rng)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_specs() {
        assert_eq!(
            "uniform(0.1,0.9)".parse::<ProbDist>().unwrap(),
            ProbDist::Uniform { lo: 0.1, hi: 0.9 }
        );
        assert_eq!(
            "mixed(0.7)".parse::<ProbDist>().unwrap(),
            ProbDist::Mixed { low_share: 0.7 }
        );
        assert!("uniform(0.9,0.1)".parse::<ProbDist>().is_err());
        assert!("uniform(0.1)".parse::<ProbDist>().is_err());
        assert!("gaussian(0.5)".parse::<ProbDist>().is_err());
        assert!("mixed(1.5)".parse::<ProbDist>().is_err());
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let dist: ProbDist = "uniform(0.1,0.9)".parse().unwrap();
        let a = sample_instance(6, 10, &dist, &mut rng_for_seed(42));
        let b = sample_instance(6, 10, &dist, &mut rng_for_seed(42));
        assert_eq!(a, b);
        let c = sample_instance(6, 10, &dist, &mut rng_for_seed(43));
        assert_ne!(a, c);
    }

    #[test]
    fn mixed_full_share_draws_only_low_probabilities() {
        let dist: ProbDist = "mixed(1.0)".parse().unwrap();
        let inst = sample_instance(50, 10, &dist, &mut rng_for_seed(7));
        assert!(inst.items.iter().all(|it| it.prob < 0.5));
        assert!(inst.validate().is_ok());
    }

    #[test]
    fn single_item_instance_is_valid() {
        let dist: ProbDist = "uniform(0.1,0.9)".parse().unwrap();
        let inst = sample_instance(1, 10, &dist, &mut rng_for_seed(1));
        assert_eq!(inst.len(), 1);
        assert!(inst.validate().is_ok());
    }
}
