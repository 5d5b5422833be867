//! Seeded generator for lexical-sample corpora whose senses are separable by
//! content words.
//!
//! Each sense of each target draws its content words from a private
//! vocabulary. Context slots that are not content words hold vibhakti drawn
//! from one shared distribution, so vibhakti carry no sense signal.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Corpus, Instance};
use crate::features::Resources;
use crate::text::Token;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub targets: usize,
    pub senses: usize,
    pub instances_per_sense: usize,
    /// Content words available to each (target, sense).
    pub vocabulary_per_sense: usize,
    /// Probability that a context slot holds a vibhakti instead of a content word.
    pub vibhakti_rate: f64,
    pub min_len: usize,
    pub max_len: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            targets: 60,
            senses: 2,
            instances_per_sense: 100,
            vocabulary_per_sense: 30,
            vibhakti_rate: 0.2,
            min_len: 9,
            max_len: 16,
            seed: 7,
        }
    }
}

fn tok(s: String) -> Token {
    Token::new(&s).expect("generated tokens are well formed")
}

pub fn separable_corpus(spec: &SyntheticSpec) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vibhakti: Vec<Token> = Resources::default().vibhakti.into_iter().collect();
    let mut instances = Vec::new();
    for t in 0..spec.targets {
        let target = tok(format!("लक्ष्य{t}"));
        for s in 0..spec.senses {
            let label = format!("अर्थ{s}");
            for _ in 0..spec.instances_per_sense {
                let len = rng.gen_range(spec.min_len..=spec.max_len);
                // keep two context slots on each side where the length allows
                let target_index = if len >= 5 {
                    rng.gen_range(2..len - 2)
                } else {
                    rng.gen_range(0..len)
                };
                let tokens = (0..len)
                    .map(|i| {
                        if i == target_index {
                            target.clone()
                        } else if rng.gen_bool(spec.vibhakti_rate) {
                            vibhakti.choose(&mut rng).unwrap().clone()
                        } else {
                            let k = rng.gen_range(0..spec.vocabulary_per_sense);
                            tok(format!("श{t}x{s}y{k}"))
                        }
                    })
                    .collect();
                instances.push(Instance::new(tokens, target_index, &label).unwrap());
            }
        }
    }
    Corpus::from_instances(instances)
}
