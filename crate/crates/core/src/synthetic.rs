//! Seeded synthetic data: a toy-grammar corpus for the language model and
//! bilingual pools with a planted sentence correspondence for the
//! self-learning loops.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::corpusio::{EmbeddingStore, Key, StoreKind, TokenizedSentence};
use crate::error::Result;

const DETERMINERS: &[&str] = &["the", "a", "every", "some", "this", "that"];
const ADJECTIVES: &[&str] = &["red", "small", "old", "quiet", "bright", "heavy", "green", "quick"];
const NOUNS: &[&str] = &[
    "dog", "cat", "house", "river", "teacher", "car", "garden", "letter", "city", "child", "tree", "window",
];
const VERBS: &[&str] = &["sees", "likes", "follows", "finds", "builds", "opens", "paints", "carries"];
const PREPOSITIONS: &[&str] = &["near", "behind", "under", "with"];

/// Sentences of the shape `DET [ADJ] NOUN VERB DET [ADJ] NOUN [PREP DET NOUN]`.
pub fn grammar_corpus(n: usize, seed: u64) -> Vec<TokenizedSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick = |rng: &mut ChaCha8Rng, words: &[&str]| words.choose(rng).unwrap().to_string();
    (0..n)
        .map(|_| {
            let mut t = Vec::new();
            for part in 0..2 {
                t.push(pick(&mut rng, DETERMINERS));
                if rng.gen_bool(0.4) {
                    t.push(pick(&mut rng, ADJECTIVES));
                }
                t.push(pick(&mut rng, NOUNS));
                if part == 0 {
                    t.push(pick(&mut rng, VERBS));
                }
            }
            if rng.gen_bool(0.3) {
                t.push(pick(&mut rng, PREPOSITIONS));
                t.push(pick(&mut rng, DETERMINERS));
                t.push(pick(&mut rng, NOUNS));
            }
            TokenizedSentence::from_tokens(t)
        })
        .collect()
}

/// Two pools of translations: source sentence `i` corresponds to target
/// sentence `gold[i]`.
#[derive(Debug, Clone)]
pub struct PlantedPools {
    pub source: Vec<TokenizedSentence>,
    pub target: Vec<TokenizedSentence>,
    pub source_store: EmbeddingStore,
    pub target_store: EmbeddingStore,
    pub gold: Vec<usize>,
}

/// Word-level pools. The embedding space splits into a subspace shared by
/// both languages and a subspace where the target language is a random
/// rotation of the source. Most words put most of their energy in the
/// rotated part; "anchor" words live mostly in the shared part.
#[derive(Debug, Clone, PartialEq)]
pub struct WordPoolSpec {
    pub sentences: usize,
    pub dim: usize,
    /// Dimensions of the rotated subspace.
    pub rotated_dim: usize,
    pub vocabulary: usize,
    /// Fraction of the vocabulary that are anchor words.
    pub anchor_fraction: f64,
    /// Fraction of a content word's squared norm inside the rotated subspace.
    pub content_rotated_energy: f64,
    /// Same for anchor words.
    pub anchor_rotated_energy: f64,
    /// Fraction of sentences drawn only from anchor words.
    pub anchor_sentence_fraction: f64,
    pub min_len: usize,
    pub max_len: usize,
    /// Standard deviation of the per-coordinate noise on target words.
    pub noise: f64,
    pub seed: u64,
}

impl Default for WordPoolSpec {
    fn default() -> Self {
        Self {
            sentences: 1000,
            dim: 32,
            rotated_dim: 24,
            vocabulary: 1500,
            anchor_fraction: 0.1,
            content_rotated_energy: 0.95,
            anchor_rotated_energy: 0.2,
            anchor_sentence_fraction: 0.05,
            min_len: 4,
            max_len: 10,
            noise: 0.02,
            seed: 0,
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(&mut *rng)).collect()
}

/// Unit-norm vector with fraction `rotated_energy` of its squared norm in
/// the trailing `rotated_dim` coordinates.
fn split_vector(rng: &mut ChaCha8Rng, dim: usize, rotated_dim: usize, rotated_energy: f64) -> Vec<f64> {
    let shared = crate::vecops::normalized(&gaussian(rng, dim - rotated_dim)).unwrap_or_default();
    let rotated = crate::vecops::normalized(&gaussian(rng, rotated_dim)).unwrap_or_default();
    let (a, b) = ((1.0 - rotated_energy).sqrt(), rotated_energy.sqrt());
    shared.iter().map(|x| a * x).chain(rotated.iter().map(|x| b * x)).collect()
}

pub fn random_orthogonal(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(d, d, |_, _| StandardNormal.sample(&mut *rng));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // sign fix so the distribution is uniform
    let signs = DMatrix::from_diagonal(&r.diagonal().map(|x| if x < 0.0 { -1.0 } else { 1.0 }));
    q * signs
}

/// Lowercase spelling of `k` over a ten-letter alphabet starting at `base`,
/// so the two languages share no letters.
fn spell(k: usize, base: u8) -> String {
    let digits = k.to_string();
    let mut s: String = digits.bytes().map(|d| (base + (d - b'0')) as char).collect();
    // at least three letters, padded with the alphabet's zero
    if s.len() < 3 {
        s = format!("{}{s}", (base as char).to_string().repeat(3 - s.len()));
    }
    s
}

pub fn planted_word_pools(params: &WordPoolSpec) -> Result<PlantedPools> {
    assert!(params.rotated_dim <= params.dim && params.min_len >= 1 && params.min_len <= params.max_len);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let rotation = random_orthogonal(&mut rng, params.rotated_dim);
    let shared_dim = params.dim - params.rotated_dim;
    let n_anchor = ((params.vocabulary as f64 * params.anchor_fraction).round() as usize).clamp(1, params.vocabulary);

    let mut source_store = EmbeddingStore::new(StoreKind::StaticWord, params.dim)?;
    let mut target_store = EmbeddingStore::new(StoreKind::StaticWord, params.dim)?;
    let src_words: Vec<String> = (0..params.vocabulary).map(|k| spell(k, b'a')).collect();
    let tgt_words: Vec<String> = (0..params.vocabulary).map(|k| spell(k, b'k')).collect();
    for k in 0..params.vocabulary {
        let energy = if k < n_anchor {
            params.anchor_rotated_energy
        } else {
            params.content_rotated_energy
        };
        let x = split_vector(&mut rng, params.dim, params.rotated_dim, energy);
        let mut y = x.clone();
        for r in 0..params.rotated_dim {
            y[shared_dim + r] = (0..params.rotated_dim)
                .map(|c| rotation[(r, c)] * x[shared_dim + c])
                .sum();
        }
        for v in &mut y {
            let e: f64 = StandardNormal.sample(&mut rng);
            *v += params.noise * e;
        }
        source_store.insert(Key::Word(src_words[k].clone()), &x)?;
        target_store.insert(Key::Word(tgt_words[k].clone()), &y)?;
    }

    let mut source = Vec::with_capacity(params.sentences);
    let mut translations = Vec::with_capacity(params.sentences);
    for _ in 0..params.sentences {
        let len = rng.gen_range(params.min_len..=params.max_len);
        let anchor_only = rng.gen_bool(params.anchor_sentence_fraction);
        let ids: Vec<usize> = (0..len)
            .map(|_| {
                if anchor_only {
                    rng.gen_range(0..n_anchor)
                } else {
                    rng.gen_range(0..params.vocabulary)
                }
            })
            .collect();
        source.push(TokenizedSentence::from_tokens(ids.iter().map(|&k| src_words[k].clone()).collect()));
        translations.push(TokenizedSentence::from_tokens(ids.iter().map(|&k| tgt_words[k].clone()).collect()));
    }
    let (target, gold) = shuffle_targets(translations, &mut rng);
    Ok(PlantedPools {
        source,
        target,
        source_store,
        target_store,
        gold,
    })
}

fn shuffle_targets(translations: Vec<TokenizedSentence>, rng: &mut ChaCha8Rng) -> (Vec<TokenizedSentence>, Vec<usize>) {
    let n = translations.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    // target position p holds translation order[p]
    let mut gold = vec![0; n];
    for (p, &i) in order.iter().enumerate() {
        gold[i] = p;
    }
    let mut slots: Vec<Option<TokenizedSentence>> = translations.into_iter().map(Some).collect();
    let target = order.iter().map(|&i| slots[i].take().unwrap()).collect();
    (target, gold)
}

/// Sentence-level pools. Each pooled vector is a shared meaning vector in
/// the leading `content_dim` coordinates plus independent per-language
/// nuisance in the remaining ones, so one projection shared by both
/// languages can learn to suppress the nuisance.
#[derive(Debug, Clone, PartialEq)]
pub struct SentencePoolSpec {
    pub sentences: usize,
    pub dim: usize,
    pub content_dim: usize,
    /// Per-coordinate standard deviation of the nuisance, relative to the
    /// content coordinates.
    pub nuisance_scale: f64,
    /// Per-coordinate noise added to the target's meaning vector.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SentencePoolSpec {
    fn default() -> Self {
        Self {
            sentences: 1000,
            dim: 32,
            content_dim: 16,
            nuisance_scale: 1.5,
            noise: 0.1,
            seed: 0,
        }
    }
}

pub fn planted_sentence_pools(params: &SentencePoolSpec) -> Result<PlantedPools> {
    assert!(params.content_dim <= params.dim);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let nuisance = params.dim - params.content_dim;
    let mut src_vecs = Vec::with_capacity(params.sentences);
    let mut tgt_vecs = Vec::with_capacity(params.sentences);
    for _ in 0..params.sentences {
        let z = gaussian(&mut rng, params.content_dim);
        let x: Vec<f64> = z
            .iter()
            .copied()
            .chain(gaussian(&mut rng, nuisance).into_iter().map(|v| params.nuisance_scale * v))
            .collect();
        let y: Vec<f64> = z
            .iter()
            .map(|v| {
                let e: f64 = StandardNormal.sample(&mut rng);
                v + params.noise * e
            })
            .collect::<Vec<_>>()
            .into_iter()
            .chain(gaussian(&mut rng, nuisance).into_iter().map(|v| params.nuisance_scale * v))
            .collect();
        src_vecs.push(x);
        tgt_vecs.push(y);
    }
    let source: Vec<TokenizedSentence> = (0..params.sentences)
        .map(|i| TokenizedSentence::from_tokens(vec![spell(i, b'a')]))
        .collect();
    let translations: Vec<TokenizedSentence> = (0..params.sentences)
        .map(|i| TokenizedSentence::from_tokens(vec![spell(i, b'k')]))
        .collect();
    let (target, gold) = shuffle_targets(translations, &mut rng);
    let mut source_store = EmbeddingStore::new(StoreKind::Sentence, params.dim)?;
    let mut target_store = EmbeddingStore::new(StoreKind::Sentence, params.dim)?;
    for (i, x) in src_vecs.iter().enumerate() {
        source_store.insert(Key::Sentence(i), x)?;
        target_store.insert(Key::Sentence(gold[i]), &tgt_vecs[i])?;
    }
    Ok(PlantedPools {
        source,
        target,
        source_store,
        target_store,
        gold,
    })
}
