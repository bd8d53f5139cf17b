#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sense_embed::wsi::{Instance, KeyEntry};

pub const PSEUDO: &str = "pseudo";
pub const PSEUDO_TARGET: &str = "pseudo.n";
const FUNCTION_WORDS: [&str; 12] = [
    "the", "of", "and", "to", "in", "is", "that", "for", "with", "was", "on", "it",
];

/// Two topically disjoint synthetic languages whose anchor words are merged
/// into one pseudoword.
pub struct Synthetic {
    pub text: String,
    pub tokens: usize,
    pub heldout: Vec<Instance>,
    pub gold: Vec<KeyEntry>,
}

pub struct SyntheticSpec {
    pub tokens: usize,
    pub topic_words: usize,
    pub sentence_len: usize,
    /// Share of tokens drawn from the function-word list.
    pub function_share: f64,
    /// Probability that a sentence carries its topic's anchor.
    pub anchor_rate: f64,
    pub heldout_per_topic: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            tokens: 2_000_000,
            topic_words: 400,
            sentence_len: 15,
            function_share: 0.25,
            anchor_rate: 0.5,
            heldout_per_topic: 200,
            seed: 7,
        }
    }
}

fn topic_word(topic: usize, rank: usize) -> String {
    let prefix = ["alpha", "omega"][topic];
    format!("{prefix}{rank:04}")
}

fn sentence(spec: &SyntheticSpec, topic: usize, zipf: &WeightedIndex<f64>, anchor: bool, rng: &mut ChaCha8Rng) -> (Vec<String>, usize) {
    let mut words: Vec<String> = (0..spec.sentence_len)
        .map(|_| {
            if rng.gen::<f64>() < spec.function_share {
                FUNCTION_WORDS[rng.gen_range(0..FUNCTION_WORDS.len())].to_string()
            } else {
                topic_word(topic, zipf.sample(rng))
            }
        })
        .collect();
    let pos = rng.gen_range(0..words.len());
    if anchor {
        words[pos] = PSEUDO.to_string();
    }
    (words, pos)
}

pub fn synthetic(spec: &SyntheticSpec) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let weights: Vec<f64> = (1..=spec.topic_words).map(|r| 1.0 / r as f64).collect();
    let zipf = WeightedIndex::new(&weights).unwrap();
    let mut text = String::new();
    let mut tokens = 0;
    while tokens < spec.tokens {
        let topic = rng.gen_range(0..2);
        let anchor = rng.gen::<f64>() < spec.anchor_rate;
        let (words, _) = sentence(spec, topic, &zipf, anchor, &mut rng);
        tokens += words.len();
        text.push_str(&words.join(" "));
        text.push('\n');
    }
    let mut heldout = Vec::new();
    let mut gold = Vec::new();
    for i in 0..2 * spec.heldout_per_topic {
        let topic = i % 2;
        let (words, pos) = sentence(spec, topic, &zipf, true, &mut rng);
        let id = format!("{PSEUDO_TARGET}.{}", i + 1);
        gold.push(KeyEntry {
            target: PSEUDO_TARGET.into(),
            instance: id.clone(),
            label: format!("{PSEUDO_TARGET}.{}", ["alpha", "omega"][topic]),
        });
        heldout.push(Instance {
            id,
            target: PSEUDO_TARGET.into(),
            tokens: words,
            target_position: pos,
        });
    }
    Synthetic {
        text,
        tokens,
        heldout,
        gold,
    }
}

fn joint(gold: &[KeyEntry], pred: &[KeyEntry]) -> BTreeMap<(String, String), usize> {
    let p: HashMap<&str, &str> = pred.iter().map(|e| (e.instance.as_str(), e.label.as_str())).collect();
    let mut t = BTreeMap::new();
    for g in gold {
        *t.entry((p[g.instance.as_str()].to_string(), g.label.clone())).or_insert(0) += 1;
    }
    t
}

/// Accuracy when every induced sense maps to its majority gold sense.
pub fn many_to_one_accuracy(gold: &[KeyEntry], pred: &[KeyEntry]) -> f64 {
    let mut best: BTreeMap<String, usize> = BTreeMap::new();
    for ((sense, _), n) in joint(gold, pred) {
        let b = best.entry(sense).or_insert(0);
        *b = (*b).max(n);
    }
    best.values().sum::<usize>() as f64 / gold.len() as f64
}

/// Accuracy under the best one-to-one sense mapping (exhaustive search).
pub fn one_to_one_accuracy(gold: &[KeyEntry], pred: &[KeyEntry]) -> f64 {
    let t = joint(gold, pred);
    let mut senses: Vec<&String> = t.keys().map(|(s, _)| s).collect();
    senses.dedup();
    let mut labels: Vec<&String> = t.keys().map(|(_, g)| g).collect();
    labels.sort();
    labels.dedup();
    fn search(i: usize, senses: &[&String], labels: &[&String], used: &mut Vec<bool>, t: &BTreeMap<(String, String), usize>) -> usize {
        if i == senses.len() {
            return 0;
        }
        let mut best = search(i + 1, senses, labels, used, t);
        for (j, l) in labels.iter().enumerate() {
            if !used[j] {
                used[j] = true;
                let gain = t.get(&(senses[i].clone(), (*l).clone())).copied().unwrap_or(0);
                best = best.max(gain + search(i + 1, senses, labels, used, t));
                used[j] = false;
            }
        }
        best
    }
    let mut used = vec![false; labels.len()];
    search(0, &senses, &labels, &mut used, &t) as f64 / gold.len() as f64
}

/// Assert-style acceptance line.
pub fn report(name: &str, pass: bool, detail: &str) {
    println!("[{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}
