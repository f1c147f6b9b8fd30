//! Sparse ternary random-index vectors for terms.

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::SemanticError;

pub const DEFAULT_DIMENSION: usize = 4096;
pub const DEFAULT_SEED_ENTRIES: usize = 16;
pub const DEFAULT_RNG_SEED: u64 = 42;

/// Shape of the random projection: `dimension` positions, `seed_entries`
/// of them non-zero per term, placed by a hash keyed with `rng_seed`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SemanticConfig {
    pub dimension: usize,
    pub seed_entries: usize,
    pub rng_seed: u64,
}

impl Default for SemanticConfig {
    fn default() -> Self {
        SemanticConfig {
            dimension: DEFAULT_DIMENSION,
            seed_entries: DEFAULT_SEED_ENTRIES,
            rng_seed: DEFAULT_RNG_SEED,
        }
    }
}

impl SemanticConfig {
    pub fn new(dimension: usize, seed_entries: usize, rng_seed: u64) -> Result<Self, SemanticError> {
        let config = SemanticConfig {
            dimension,
            seed_entries,
            rng_seed,
        };
        config.validate()?;
        Ok(config)
    }

    /// Requires `dimension ≥ seed_entries ≥ 2` with `seed_entries` even.
    pub fn validate(&self) -> Result<(), SemanticError> {
        let ok = self.seed_entries >= 2
            && self.seed_entries.is_multiple_of(2)
            && self.dimension >= self.seed_entries
            && self.dimension <= u32::MAX as usize;
        if ok {
            Ok(())
        } else {
            Err(SemanticError::InvalidConfig {
                dimension: self.dimension,
                seed_entries: self.seed_entries,
            })
        }
    }

    /// Magnitude of every non-zero entry, `1/√s`.
    pub fn entry_weight(&self) -> f64 {
        1.0 / (self.seed_entries as f64).sqrt()
    }
}

/// A term's index vector: `s/2` entries at `+1/√s`, `s/2` at `-1/√s`.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexVector {
    pub plus: Vec<u32>,
    pub minus: Vec<u32>,
    pub weight: f64,
}

impl IndexVector {
    pub fn to_dense(&self, dimension: usize) -> Vec<f64> {
        let mut dense = vec![0.0; dimension];
        for &p in &self.plus {
            dense[p as usize] = self.weight;
        }
        for &p in &self.minus {
            dense[p as usize] = -self.weight;
        }
        dense
    }
}

/// Deterministic generator of term index vectors. Holds no per-term state,
/// so it can be shared freely across threads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TermVectorStore {
    config: SemanticConfig,
}

impl TermVectorStore {
    pub fn new(config: SemanticConfig) -> Result<Self, SemanticError> {
        config.validate()?;
        Ok(TermVectorStore { config })
    }

    pub fn config(&self) -> &SemanticConfig {
        &self.config
    }

    pub fn term_vector(&self, term: &str) -> IndexVector {
        let mut hasher = Sha256::new();
        hasher.update(self.config.rng_seed.to_le_bytes());
        hasher.update(term.as_bytes());
        let seed: [u8; 32] = hasher.finalize().into();
        let mut rng = ChaCha8Rng::from_seed(seed);
        let positions = sample(&mut rng, self.config.dimension, self.config.seed_entries);
        let half = self.config.seed_entries / 2;
        let mut plus = Vec::with_capacity(half);
        let mut minus = Vec::with_capacity(half);
        for (i, position) in positions.into_iter().enumerate() {
            if i < half {
                plus.push(position as u32);
            } else {
                minus.push(position as u32);
            }
        }
        IndexVector {
            plus,
            minus,
            weight: self.config.entry_weight(),
        }
    }
}

/// Convenience wrapper over [`TermVectorStore::term_vector`] returning a
/// dense vector.
pub fn term_vector(term: &str, config: &SemanticConfig) -> Result<Vec<f64>, SemanticError> {
    let store = TermVectorStore::new(*config)?;
    Ok(store.term_vector(term).to_dense(config.dimension))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn deterministic_unit_ternary() {
        let config = SemanticConfig::default();
        let a = term_vector("coronary", &config).unwrap();
        assert_eq!(a, term_vector("coronary", &config).unwrap());
        assert_eq!(a.len(), 4096);
        assert_eq!(a.iter().filter(|&&x| x > 0.0).count(), 8);
        assert_eq!(a.iter().filter(|&&x| x < 0.0).count(), 8);
        assert!(a.iter().all(|&x| x == 0.0 || x.abs() == 0.25));
        assert!((dot(&a, &a) - 1.0).abs() < 1e-12);
        let other_seed = SemanticConfig { rng_seed: 7, ..config };
        assert_ne!(a, term_vector("coronary", &other_seed).unwrap());
    }

    #[test]
    fn invalid_configs() {
        for (d, s) in [(4096, 0), (4096, 3), (8, 16), (4096, 1)] {
            assert!(SemanticConfig::new(d, s, 1).is_err(), "{d} {s}");
        }
        assert!(SemanticConfig::new(2, 2, 1).is_ok());
    }

    #[test]
    fn distinct_terms_are_nearly_orthogonal() {
        // Monte-Carlo over the construction: two random index vectors with
        // s = 16 in d = 4096 overlap in s²/d ≈ 0.06 positions on average.
        let store = TermVectorStore::new(SemanticConfig::default()).unwrap();
        let mut within = 0;
        for i in 0..1000 {
            let a = store.term_vector(&format!("left{i}")).to_dense(4096);
            let b = store.term_vector(&format!("right{i}")).to_dense(4096);
            if dot(&a, &b).abs() <= 0.1 {
                within += 1;
            }
        }
        assert!(within >= 990, "{within}");
    }
}
