use serde::{Deserialize, Serialize};

use crate::tensor::{stream_id, RngStream};

/// Base seed for the hash-seeded text stand-in vectors.
pub const CONDITIONING_BASE_SEED: u64 = 0xC3C0_4D17;

/// Weight of the modifier vector relative to the concept vector.
const MODIFIER_WEIGHT: f64 = 0.5;

/// Prompt stand-in: `"a <modifier> <concept>"` with an optional negative concept.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConditioningSpec {
    pub concept: String,
    #[serde(default)]
    pub modifier: Option<String>,
    #[serde(default)]
    pub negative_concept: Option<String>,
}

impl ConditioningSpec {
    pub fn new(concept: impl Into<String>) -> Self {
        Self {
            concept: concept.into(),
            modifier: None,
            negative_concept: None,
        }
    }

    pub fn with_modifier(mut self, modifier: Option<impl Into<String>>) -> Self {
        self.modifier = modifier.map(Into::into);
        self
    }

    pub fn with_negative(mut self, negative: Option<impl Into<String>>) -> Self {
        self.negative_concept = negative.map(Into::into);
        self
    }

    pub fn prompt(&self) -> String {
        match &self.modifier {
            Some(m) => format!("a {m} {}", self.concept),
            None => format!("a {}", self.concept),
        }
    }
}

fn word_vector(word: &str, dim: usize, base_seed: u64) -> Vec<f64> {
    RngStream::new(base_seed, stream_id(word)).normals(dim, 1.0)
}

/// Unit-norm conditioning vector: `normalize(g(concept) + 0.5·g(modifier))`
/// with `g` a Gaussian vector seeded by the hash of the word.
pub fn embed_conditioning(spec: &ConditioningSpec, dim: usize, base_seed: u64) -> Vec<f32> {
    let mut v = word_vector(&spec.concept, dim, base_seed);
    if let Some(m) = &spec.modifier {
        for (a, b) in v.iter_mut().zip(word_vector(m, dim, base_seed)) {
            *a += MODIFIER_WEIGHT * b;
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| (x / norm) as f32).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cosine(a: &[f32], b: &[f32]) -> f64 {
        let dot: f64 = a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum();
        let na: f64 = a.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
        let nb: f64 = b.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
        dot / (na * nb)
    }

    #[test]
    fn deterministic_and_unit_norm() {
        let spec = ConditioningSpec::new("chair").with_modifier(Some("creative"));
        let a = embed_conditioning(&spec, 64, CONDITIONING_BASE_SEED);
        let b = embed_conditioning(&spec, 64, CONDITIONING_BASE_SEED);
        assert_eq!(a, b);
        let norm: f64 = a.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn modifier_moves_the_vector_partway() {
        let plain = embed_conditioning(&ConditioningSpec::new("chair"), 64, CONDITIONING_BASE_SEED);
        let creative = embed_conditioning(
            &ConditioningSpec::new("chair").with_modifier(Some("creative")),
            64,
            CONDITIONING_BASE_SEED,
        );
        let cos = cosine(&plain, &creative);
        assert!(cos > 0.3 && cos < 0.99, "{cos}");
        // Pinned from the shipped seeds.
        assert!((cos - PINNED_CHAIR_CREATIVE_COSINE).abs() < 1e-6, "{cos}");
    }

    const PINNED_CHAIR_CREATIVE_COSINE: f64 = 0.899_520_293;

    #[test]
    fn prompt_rendering() {
        let spec = ConditioningSpec::new("teddy bear").with_modifier(Some("creative"));
        assert_eq!(spec.prompt(), "a creative teddy bear");
        assert_eq!(ConditioningSpec::new("car").prompt(), "a car");
    }
}
