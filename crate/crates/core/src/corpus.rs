//! Tokenization, vocabulary, frequent-word subsampling and context windows.
//!
//! Text is read one sentence per line. Tokens are whitespace-separated,
//! lowercased, and stripped of non-alphanumeric characters at both edges.
//! Windows never cross a line boundary.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, unit_uniform, Stream};
use crate::WordId;

pub const DEFAULT_MIN_COUNT: u64 = 5;
pub const DEFAULT_WINDOW: usize = 5;
pub const DEFAULT_SUBSAMPLE: f64 = 1e-4;

/// Normalize one raw token; `None` when nothing alphanumeric remains.
pub fn normalize_token(raw: &str) -> Option<String> {
    let trimmed = raw.trim_matches(|c: char| !c.is_alphanumeric());
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_lowercase())
    }
}

pub fn tokenize(line: &str) -> impl Iterator<Item = String> + '_ {
    line.split_whitespace().filter_map(normalize_token)
}

/// Frequency-ranked token inventory.
///
/// Ids are dense and assigned in non-increasing count order, ties broken
/// lexicographically, so the multi-sense word set is always an id prefix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, WordId>,
    total_tokens: u64,
}

impl Vocabulary {
    pub fn build<I, S>(tokens: I, min_count: u64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if min_count == 0 {
            return Err(Error::Config("min_count must be positive".into()));
        }
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut total = 0u64;
        for token in tokens {
            let token = token.as_ref();
            total += 1;
            if let Some(c) = counts.get_mut(token) {
                *c += 1;
            } else {
                counts.insert(token.to_owned(), 1);
            }
        }
        if total == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(Self::from_counts(counts, min_count, total))
    }

    /// Count a plain-text corpus in one streaming pass.
    pub fn from_reader<R: BufRead>(reader: R, min_count: u64) -> Result<Self> {
        if min_count == 0 {
            return Err(Error::Config("min_count must be positive".into()));
        }
        let mut counts: HashMap<String, u64> = HashMap::new();
        let mut total = 0u64;
        for line in reader.lines() {
            for token in tokenize(&line?) {
                total += 1;
                *counts.entry(token).or_insert(0) += 1;
            }
        }
        if total == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(Self::from_counts(counts, min_count, total))
    }

    fn from_counts(counts: HashMap<String, u64>, min_count: u64, total: u64) -> Self {
        let mut entries: Vec<(String, u64)> =
            counts.into_iter().filter(|(_, c)| *c >= min_count).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        Self::from_entries(entries, total)
    }

    fn from_entries(entries: Vec<(String, u64)>, total_tokens: u64) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (w, _))| (w.clone(), i as WordId))
            .collect();
        Vocabulary {
            entries,
            index,
            total_tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.entries[id as usize].0
    }

    pub fn count(&self, id: WordId) -> u64 {
        self.entries[id as usize].1
    }

    pub fn entries(&self) -> &[(String, u64)] {
        &self.entries
    }

    /// All tokens seen while counting, pruned ones included.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn retained_tokens(&self) -> u64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn pruned_tokens(&self) -> u64 {
        self.total_tokens - self.retained_tokens()
    }

    /// Relative frequency among retained tokens.
    pub fn frequency(&self, id: WordId) -> f64 {
        self.count(id) as f64 / self.retained_tokens().max(1) as f64
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.entries.len(), self.total_tokens)?;
        for (word, count) in &self.entries {
            writeln!(out, "{word} {count}")?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R, name: &str) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::parse(name, 1, "missing header"))?;
        let mut fields = header.split_whitespace();
        let (size, total) = match (fields.next(), fields.next(), fields.next()) {
            (Some(v), Some(t), None) => (
                v.parse::<usize>()
                    .map_err(|e| Error::parse(name, 1, format!("bad size: {e}")))?,
                t.parse::<u64>()
                    .map_err(|e| Error::parse(name, 1, format!("bad token total: {e}")))?,
            ),
            _ => return Err(Error::parse(name, 1, "header must be `V total_tokens`")),
        };
        let mut entries = Vec::with_capacity(size);
        for i in 0..size {
            let line_no = i + 2;
            let line = lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::parse(name, line_no, "unexpected end of file"))?;
            let mut fields = line.split_whitespace();
            match (fields.next(), fields.next(), fields.next()) {
                (Some(w), Some(c), None) => {
                    let c = c
                        .parse::<u64>()
                        .map_err(|e| Error::parse(name, line_no, format!("bad count: {e}")))?;
                    entries.push((w.to_owned(), c));
                }
                _ => return Err(Error::parse(name, line_no, "expected `surface count`")),
            }
        }
        if let Some(extra) = lines.next().transpose()? {
            if !extra.trim().is_empty() {
                return Err(Error::parse(name, size + 2, "trailing content"));
            }
        }
        let vocab = Self::from_entries(entries, total);
        if vocab.index.len() != vocab.entries.len() {
            return Err(Error::parse(name, 1, "duplicate surface forms"));
        }
        if vocab.retained_tokens() > total {
            return Err(Error::parse(name, 1, "counts exceed token total"));
        }
        Ok(vocab)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut out = BufWriter::new(file);
        self.write(&mut out)?;
        out.flush().map_err(|e| Error::io(path, e))?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(file), &path.display().to_string())
    }
}

pub fn build_vocab<I, S>(tokens: I, min_count: u64) -> Result<Vocabulary>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    Vocabulary::build(tokens, min_count)
}

/// Keep probability for a word of relative frequency `freq` under
/// threshold `threshold`: `(sqrt(f/t) + 1) * t/f`, clamped to `[0, 1]`.
///
/// An infinite threshold disables subsampling.
pub fn subsample_keep_prob(freq: f64, threshold: f64) -> Result<f64> {
    if !(freq > 0.0 && freq <= 1.0) {
        return Err(Error::Domain(format!("word frequency {freq} not in (0, 1]")));
    }
    if !(threshold > 0.0) {
        return Err(Error::Domain(format!("subsample threshold {threshold} must be > 0")));
    }
    if threshold.is_infinite() {
        return Ok(1.0);
    }
    let ratio = threshold / freq;
    Ok((((freq / threshold).sqrt() + 1.0) * ratio).clamp(0.0, 1.0))
}

/// Encoded corpus: in-vocabulary token ids per sentence.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    sentences: Vec<Vec<WordId>>,
    starts: Vec<u64>,
    tokens: u64,
}

impl Corpus {
    pub fn from_sentences(sentences: Vec<Vec<WordId>>) -> Self {
        let mut starts = Vec::with_capacity(sentences.len());
        let mut tokens = 0u64;
        for s in &sentences {
            starts.push(tokens);
            tokens += s.len() as u64;
        }
        Corpus {
            sentences,
            starts,
            tokens,
        }
    }

    /// Encode text lines against a frozen vocabulary; unknown tokens are dropped.
    pub fn from_reader<R: BufRead>(reader: R, vocab: &Vocabulary) -> Result<Self> {
        let mut sentences = Vec::new();
        for line in reader.lines() {
            let ids: Vec<WordId> = tokenize(&line?).filter_map(|t| vocab.id(&t)).collect();
            if !ids.is_empty() {
                sentences.push(ids);
            }
        }
        Ok(Self::from_sentences(sentences))
    }

    pub fn from_text(text: &str, vocab: &Vocabulary) -> Self {
        // Reading from an in-memory buffer cannot fail.
        Self::from_reader(text.as_bytes(), vocab).expect("in-memory read")
    }

    pub fn sentences(&self) -> &[Vec<WordId>] {
        &self.sentences
    }

    /// Corpus offset of the first token of sentence `i`.
    pub fn sentence_start(&self, i: usize) -> u64 {
        self.starts[i]
    }

    pub fn num_tokens(&self) -> u64 {
        self.tokens
    }

    pub fn is_empty(&self) -> bool {
        self.tokens == 0
    }
}

/// Frequent-word subsampling with keep decisions fixed by `(seed, position)`.
#[derive(Clone, Debug)]
pub struct Subsampler {
    keep: Vec<f64>,
    seed: u64,
}

impl Subsampler {
    pub fn new(vocab: &Vocabulary, threshold: f64, seed: u64) -> Result<Self> {
        let keep = (0..vocab.len() as WordId)
            .map(|id| match vocab.count(id) {
                0 => Ok(1.0),
                _ => subsample_keep_prob(vocab.frequency(id), threshold),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Subsampler {
            keep,
            seed: derive_seed(seed, Stream::Subsample, 0),
        })
    }

    /// A decision stream for one epoch.
    pub fn for_epoch(&self, epoch: u64) -> Subsampler {
        Subsampler {
            keep: self.keep.clone(),
            seed: derive_seed(self.seed, Stream::Subsample, epoch),
        }
    }

    pub fn keep_prob(&self, id: WordId) -> f64 {
        self.keep[id as usize]
    }

    pub fn keeps(&self, id: WordId, position: u64) -> bool {
        let p = self.keep[id as usize];
        p >= 1.0 || unit_uniform(self.seed, position) < p
    }

    /// Retained `(id, corpus offset)` pairs of one sentence.
    pub fn apply(&self, sentence: &[WordId], start: u64) -> Vec<(WordId, u64)> {
        sentence
            .iter()
            .enumerate()
            .map(|(i, &id)| (id, start + i as u64))
            .filter(|&(id, pos)| self.keeps(id, pos))
            .collect()
    }
}

/// A training target with its surrounding context ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub target: WordId,
    pub context: Vec<WordId>,
    pub position: u64,
    /// Effective half-width drawn for this target.
    pub effective_size: usize,
}

/// One window per token, each with a half-width drawn uniformly from
/// `1..=window_size`.
pub fn extract_windows<R: Rng + ?Sized>(
    tokens: &[(WordId, u64)],
    window_size: usize,
    rng: &mut R,
) -> Vec<Window> {
    if window_size == 0 {
        return Vec::new();
    }
    extract_windows_with(tokens, window_size, || rng.gen_range(1..=window_size))
}

/// Like [`extract_windows`] with caller-supplied half-widths (clamped to
/// `1..=window_size`).
pub fn extract_windows_with<F>(
    tokens: &[(WordId, u64)],
    window_size: usize,
    mut effective: F,
) -> Vec<Window>
where
    F: FnMut() -> usize,
{
    let mut windows = Vec::with_capacity(tokens.len());
    if window_size == 0 {
        return windows;
    }
    for (i, &(target, position)) in tokens.iter().enumerate() {
        let size = effective().clamp(1, window_size);
        let lo = i.saturating_sub(size);
        let hi = (i + size + 1).min(tokens.len());
        let context = tokens[lo..hi]
            .iter()
            .enumerate()
            .filter(|&(j, _)| lo + j != i)
            .map(|(_, &(id, _))| id)
            .collect();
        windows.push(Window {
            target,
            context,
            position,
            effective_size: size,
        });
    }
    windows
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn counts_and_ids() {
        let v = build_vocab(["a", "b", "a"], 1).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.id("a"), Some(0));
        assert_eq!(v.count(0), 2);
        assert_eq!(v.id("b"), Some(1));
        assert_eq!(v.count(1), 1);
        assert_eq!(v.total_tokens(), 3);
    }

    #[test]
    fn pruning_records_dropped_tokens() {
        let v = build_vocab(["a", "b", "a"], 2).unwrap();
        assert_eq!(v.entries(), &[("a".to_string(), 2)]);
        assert_eq!(v.pruned_tokens(), 1);
        assert_eq!(v.total_tokens(), v.retained_tokens() + v.pruned_tokens());
    }

    #[test]
    fn empty_stream_is_rejected() {
        let none: [&str; 0] = [];
        assert!(matches!(build_vocab(none, 1), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn ties_break_lexicographically() {
        let v = build_vocab(["z", "y", "x", "y", "z"], 1).unwrap();
        let words: Vec<_> = v.entries().iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(words, ["y", "z", "x"]);
    }

    #[test]
    fn tokenizer_strips_edges_and_lowercases() {
        let toks: Vec<_> = tokenize("The \"River-bank\", (of) -- it's!").collect();
        assert_eq!(toks, ["the", "river-bank", "of", "it's"]);
    }

    #[test]
    fn keep_prob_values() {
        assert_eq!(subsample_keep_prob(1e-4, 1e-4).unwrap(), 1.0);
        let p = subsample_keep_prob(1e-2, 1e-4).unwrap();
        assert!((p - 0.11).abs() < 1e-12, "{p}");
        assert_eq!(subsample_keep_prob(1e-5, 1e-4).unwrap(), 1.0);
        assert!(subsample_keep_prob(0.0, 1e-4).is_err());
        assert!(subsample_keep_prob(-0.1, 1e-4).is_err());
        assert_eq!(subsample_keep_prob(0.5, f64::INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn keep_prob_is_non_increasing() {
        let mut last = 1.0;
        for i in 1..=1000 {
            let p = subsample_keep_prob(i as f64 / 1000.0, 1e-3).unwrap();
            assert!(p <= last + 1e-15);
            last = p;
        }
    }

    #[test]
    fn fixed_width_enumeration() {
        let toks = [(5, 0), (7, 1), (9, 2)];
        let w = extract_windows_with(&toks, 1, || 1);
        let got: Vec<_> = w.iter().map(|w| (w.target, w.context.clone())).collect();
        assert_eq!(
            got,
            vec![(5, vec![7]), (7, vec![5, 9]), (9, vec![7])]
        );
    }

    #[test]
    fn single_token_sentence() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = extract_windows(&[(3, 10)], 5, &mut rng);
        assert_eq!(w.len(), 1);
        assert!(w[0].context.is_empty());
        assert_eq!(w[0].position, 10);
        assert!(extract_windows(&[], 5, &mut rng).is_empty());
    }

    #[test]
    fn windows_match_reenumeration_oracle() {
        let toks: Vec<(WordId, u64)> = (0..10).map(|i| ((i * 3 % 7) as WordId, i)).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let windows = extract_windows(&toks, 2, &mut rng);

        let mut oracle_rng = ChaCha8Rng::seed_from_u64(42);
        for (i, w) in windows.iter().enumerate() {
            let b: usize = oracle_rng.gen_range(1..=2);
            assert_eq!(w.effective_size, b);
            let mut ctx = Vec::new();
            for j in 0..toks.len() {
                let d = (j as i64 - i as i64).unsigned_abs() as usize;
                if j != i && d <= b {
                    ctx.push(toks[j].0);
                }
            }
            assert_eq!(w.target, toks[i].0);
            assert_eq!(w.context, ctx);
        }
    }

    #[test]
    fn disabled_subsampling_keeps_everything() {
        let v = build_vocab(["a"; 50].iter().chain(["b"; 3].iter()), 1).unwrap();
        let s = Subsampler::new(&v, f64::INFINITY, 9).unwrap();
        let sentence = vec![0, 0, 1, 0];
        assert_eq!(s.apply(&sentence, 100).len(), 4);
    }

    #[test]
    fn subsampling_is_a_function_of_position() {
        let toks: Vec<&str> = (0..1000).map(|i| if i % 3 == 0 { "b" } else { "a" }).collect();
        let v = build_vocab(&toks, 1).unwrap();
        let s1 = Subsampler::new(&v, 1e-3, 5).unwrap();
        let s2 = Subsampler::new(&v, 1e-3, 5).unwrap();
        for pos in 0..500u64 {
            assert_eq!(s1.keeps(0, pos), s2.keeps(0, pos));
        }
        let sentence: Vec<WordId> = vec![0; 200];
        let kept = s1.apply(&sentence, 0);
        assert!(!kept.is_empty() && kept.len() < 200);
    }
}
