//! Count-based and clustering baselines: PPMI context vectors labeled by the
//! CRP sampler, and per-target k-means over embedding context vectors.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{extract_windows, Corpus, Subsampler, Vocabulary};
use crate::error::{Error, Result};
use crate::induction::{CrpLabeler, EpochLog, TrainLog, TrainingConfig};
use crate::rng::{derive_seed, stream_rng, Stream};
use crate::vectors::WordTable;
use crate::wsi::{self, Instance, KeyEntry, Labeled, Selection, Stoplist};
use crate::WordId;

pub const DEFAULT_KMEANS_K: usize = 3;
pub const DEFAULT_MAX_ITER: usize = 100;

/// Sparse vector with entries sorted by index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseVec {
    pub entries: Vec<(u32, f64)>,
}

impl SparseVec {
    pub fn from_map(map: HashMap<u32, f64>) -> Self {
        let mut entries: Vec<(u32, f64)> = map.into_iter().filter(|&(_, v)| v != 0.0).collect();
        entries.sort_unstable_by_key(|&(i, _)| i);
        SparseVec { entries }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: u32) -> f64 {
        self.entries
            .binary_search_by_key(&index, |&(i, _)| i)
            .map_or(0.0, |k| self.entries[k].1)
    }

    pub fn norm(&self) -> f64 {
        self.entries.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &SparseVec) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.entries, &other.entries);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Cosine similarity; zero when either vector is empty.
    pub fn cosine(&self, other: &SparseVec) -> f64 {
        let n = self.norm() * other.norm();
        if n == 0.0 {
            0.0
        } else {
            (self.dot(other) / n).clamp(-1.0, 1.0)
        }
    }

    /// Elementwise mean; the empty mean is the empty vector.
    pub fn mean<'a, I: IntoIterator<Item = &'a SparseVec>>(rows: I) -> Self {
        let mut acc: HashMap<u32, f64> = HashMap::new();
        let mut n = 0usize;
        for row in rows {
            for &(i, v) in &row.entries {
                *acc.entry(i).or_default() += v;
            }
            n += 1;
        }
        if n == 0 {
            return SparseVec::default();
        }
        acc.values_mut().for_each(|v| *v /= n as f64);
        SparseVec::from_map(acc)
    }
}

/// Positive PMI rows over symmetric window co-occurrences.
#[derive(Clone, Debug, PartialEq)]
pub struct PpmiModel {
    pub rows: Vec<SparseVec>,
    /// Row marginals N(w); empty for a model read from disk.
    pub word_counts: Vec<u64>,
    /// Column marginals N(c); empty for a model read from disk.
    pub context_counts: Vec<u64>,
    pub total: u64,
}

impl PpmiModel {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, id: WordId) -> &SparseVec {
        &self.rows[id as usize]
    }

    /// PPMI from a dense (or sparse) pair-count table.
    pub fn from_counts(vocab_size: usize, counts: &HashMap<(u32, u32), u64>, smoothing: f64) -> Self {
        let mut word_counts = vec![0u64; vocab_size];
        let mut context_counts = vec![0u64; vocab_size];
        let mut total = 0u64;
        for (&(w, c), &n) in counts {
            word_counts[w as usize] += n;
            context_counts[c as usize] += n;
            total += n;
        }
        let smoothed: Vec<f64> = context_counts.iter().map(|&c| (c as f64).powf(smoothing)).collect();
        let smoothed_total: f64 = smoothed.iter().sum();
        let mut maps: Vec<HashMap<u32, f64>> = vec![HashMap::new(); vocab_size];
        for (&(w, c), &n) in counts {
            let p_wc = n as f64 / total as f64;
            let p_w = word_counts[w as usize] as f64 / total as f64;
            let p_c = smoothed[c as usize] / smoothed_total;
            let pmi = (p_wc / (p_w * p_c)).ln();
            if pmi > 0.0 {
                maps[w as usize].insert(c, pmi);
            }
        }
        PpmiModel {
            rows: maps.into_iter().map(SparseVec::from_map).collect(),
            word_counts,
            context_counts,
            total,
        }
    }

    /// `W C` header, then `word ctx:val ...` per row, context words by surface.
    pub fn write<W: Write>(&self, vocab: &Vocabulary, mut out: W) -> Result<()> {
        writeln!(out, "{} {}", self.rows.len(), vocab.len())?;
        for (id, row) in self.rows.iter().enumerate() {
            write!(out, "{}", vocab.word(id as WordId))?;
            for &(c, v) in &row.entries {
                write!(out, " {}:{}", vocab.word(c), v)?;
            }
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R, vocab: &Vocabulary, name: &str) -> Result<Self> {
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| Error::parse(name, 1, "missing header"))??;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::parse(name, 1, "bad header")))
            .collect::<Result<_>>()?;
        let [rows_n, cols_n] = dims[..] else {
            return Err(Error::parse(name, 1, "header must be `W C`"));
        };
        if rows_n != vocab.len() || cols_n != vocab.len() {
            return Err(Error::parse(name, 1, "header does not match the vocabulary"));
        }
        let mut rows = vec![SparseVec::default(); rows_n];
        let mut seen = 0;
        for (i, line) in lines.enumerate() {
            let line = line?;
            let line_no = i + 2;
            let mut fields = line.split_whitespace();
            let Some(word) = fields.next() else { continue };
            let id = vocab
                .id(word)
                .ok_or_else(|| Error::parse(name, line_no, format!("unknown word `{word}`")))?;
            let mut map = HashMap::new();
            for f in fields {
                let (c, v) = f
                    .rsplit_once(':')
                    .ok_or_else(|| Error::parse(name, line_no, "expected ctx:val"))?;
                let c = vocab
                    .id(c)
                    .ok_or_else(|| Error::parse(name, line_no, format!("unknown context `{c}`")))?;
                let v: f64 = v.parse().map_err(|_| Error::parse(name, line_no, "bad value"))?;
                if !(v > 0.0) {
                    return Err(Error::parse(name, line_no, "stored values must be positive"));
                }
                map.insert(c, v);
            }
            rows[id as usize] = SparseVec::from_map(map);
            seen += 1;
        }
        if seen != rows_n {
            return Err(Error::parse(name, seen + 2, format!("expected {rows_n} rows, found {seen}")));
        }
        Ok(PpmiModel {
            rows,
            word_counts: Vec::new(),
            context_counts: Vec::new(),
            total: 0,
        })
    }

    pub fn save(&self, vocab: &Vocabulary, path: &Path) -> Result<()> {
        let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(f);
        self.write(vocab, &mut w)?;
        w.flush().map_err(|e| Error::io(path, e))
    }

    pub fn load(vocab: &Vocabulary, path: &Path) -> Result<Self> {
        let f = fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::read(BufReader::new(f), vocab, &path.display().to_string())
    }
}

fn count_pairs(sentences: &[Vec<WordId>], window: usize) -> HashMap<(u32, u32), u64> {
    let mut counts = HashMap::new();
    for s in sentences {
        for (i, &w) in s.iter().enumerate() {
            let lo = i.saturating_sub(window);
            let hi = (i + window + 1).min(s.len());
            for (j, &c) in s.iter().enumerate().take(hi).skip(lo) {
                if j != i {
                    *counts.entry((w, c)).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

/// Count symmetric co-occurrences within `window` and convert to PPMI.
///
/// `smoothing` is the context-distribution exponent; 1 is plain PPMI.
pub fn build_ppmi(
    corpus: &Corpus,
    vocab: &Vocabulary,
    window: usize,
    smoothing: f64,
    threads: usize,
) -> Result<PpmiModel> {
    if window == 0 {
        return Err(Error::Config("PPMI window must be at least 1".into()));
    }
    if !(smoothing > 0.0) {
        return Err(Error::Config("PPMI smoothing exponent must be positive".into()));
    }
    let sentences = corpus.sentences();
    let threads = threads.max(1);
    let counts = if threads == 1 {
        count_pairs(sentences, window)
    } else {
        let chunk = sentences.len().div_ceil(threads).max(1);
        let parts: Vec<HashMap<(u32, u32), u64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = sentences
                .chunks(chunk)
                .map(|shard| scope.spawn(move || count_pairs(shard, window)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("counting thread")).collect()
        });
        let mut merged = HashMap::new();
        for part in parts {
            for (k, v) in part {
                *merged.entry(k).or_insert(0) += v;
            }
        }
        merged
    };
    Ok(PpmiModel::from_counts(vocab.len(), &counts, smoothing))
}

/// Which vocabulary words may serve as context words under the shared
/// selection rule (length and stoplist; the target is excluded per call).
#[derive(Clone, Debug)]
pub struct ContextFilter {
    allowed: Vec<bool>,
}

impl ContextFilter {
    pub fn new(vocab: &Vocabulary, stoplist: &Stoplist) -> Self {
        ContextFilter {
            allowed: vocab
                .entries()
                .iter()
                .map(|(w, _)| w.chars().count() > wsi::MIN_WORD_LEN && !stoplist.contains(w))
                .collect(),
        }
    }

    /// Every word allowed.
    pub fn all(vocab_size: usize) -> Self {
        ContextFilter {
            allowed: vec![true; vocab_size],
        }
    }

    pub fn select(&self, target: WordId, context: &[WordId]) -> Vec<WordId> {
        context
            .iter()
            .copied()
            .filter(|&c| c != target && self.allowed[c as usize])
            .collect()
    }
}

/// Mean PPMI row of the context words.
pub fn ppmi_context_vec(context: &[WordId], model: &PpmiModel) -> SparseVec {
    SparseVec::mean(context.iter().map(|&c| model.row(c)))
}

/// A count-based sense: running sum of absorbed context vectors.
///
/// Before its first context the sense points along its initial vector.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSense {
    sum: HashMap<u32, f64>,
    norm2: f64,
    pub count: u64,
}

impl SparseSense {
    pub fn new(init: &SparseVec) -> Self {
        SparseSense {
            sum: init.entries.iter().copied().collect(),
            norm2: init.entries.iter().map(|&(_, v)| v * v).sum(),
            count: 0,
        }
    }

    pub fn absorb(&mut self, v: &SparseVec) {
        if self.count == 0 {
            *self = SparseSense::new(v);
        } else {
            for &(i, x) in &v.entries {
                let e = self.sum.entry(i).or_default();
                self.norm2 += 2.0 * *e * x + x * x;
                *e += x;
            }
        }
        self.count += 1;
    }

    pub fn cosine(&self, v: &SparseVec) -> f64 {
        let dot: f64 = v.entries.iter().map(|&(i, x)| self.sum.get(&i).copied().unwrap_or(0.0) * x).sum();
        let n = self.norm2.max(0.0).sqrt() * v.norm();
        if n == 0.0 {
            0.0
        } else {
            (dot / n).clamp(-1.0, 1.0)
        }
    }

    /// Centroid as a sparse vector (mean of absorbed contexts).
    pub fn centroid(&self) -> SparseVec {
        let scale = 1.0 / self.count.max(1) as f64;
        SparseVec::from_map(self.sum.iter().map(|(&i, &v)| (i, v * scale)).collect())
    }
}

#[derive(Clone, Debug)]
pub struct PpmiSenses {
    /// Senses of trained words; other words have their single initial sense.
    pub senses: BTreeMap<WordId, Vec<SparseSense>>,
    pub log: TrainLog,
}

impl PpmiSenses {
    pub fn count(&self, word: WordId) -> usize {
        self.senses.get(&word).map_or(1, Vec::len)
    }
}

/// CRP sense learning over frozen PPMI context vectors.
///
/// Windows are drawn exactly as in single-threaded embedding training.
/// Only multi-sense words in `restrict` (all multi-sense words when `None`)
/// are labeled; every labeling decision goes through `labeler`.
pub fn train_crp_ppmi(
    corpus: &Corpus,
    vocab: &Vocabulary,
    model: &PpmiModel,
    config: &TrainingConfig,
    filter: &ContextFilter,
    restrict: Option<&HashSet<WordId>>,
    labeler: &mut CrpLabeler,
) -> Result<PpmiSenses> {
    config.validate()?;
    if model.len() != vocab.len() {
        return Err(Error::Config("PPMI model does not match the vocabulary".into()));
    }
    let trained = |w: WordId| (w as usize) < config.multi_sense && restrict.is_none_or(|r| r.contains(&w));
    let mut senses: BTreeMap<WordId, Vec<SparseSense>> = BTreeMap::new();
    let subsampler = Subsampler::new(vocab, config.subsample, config.seed)?;
    let mut window_rng = stream_rng(config.seed, Stream::Windows, 0);
    let mut log = TrainLog::default();
    for epoch in 0..config.epochs {
        let sub = subsampler.for_epoch(epoch as u64);
        let mut stats = EpochLog {
            epoch: epoch + 1,
            tokens: 0,
            windows: 0,
            new_senses: 0,
            mean_loss: 0.0,
            capped_words: 0,
        };
        for (i, sentence) in corpus.sentences().iter().enumerate() {
            let kept = sub.apply(sentence, corpus.sentence_start(i));
            for w in extract_windows(&kept, config.window, &mut window_rng) {
                if w.context.is_empty() {
                    continue;
                }
                stats.windows += 1;
                if !trained(w.target) {
                    continue;
                }
                let v_c = ppmi_context_vec(&filter.select(w.target, &w.context), model);
                let list = senses
                    .entry(w.target)
                    .or_insert_with(|| vec![SparseSense::new(model.row(w.target))]);
                let counts: Vec<u64> = list.iter().map(|s| s.count).collect();
                let sims: Vec<f64> = list.iter().map(|s| s.cosine(&v_c)).collect();
                let label = labeler.label(w.target, &counts, &sims, true)?;
                if label.is_new {
                    list.push(SparseSense::new(&v_c));
                    stats.new_senses += 1;
                    if list.len() == labeler.max_senses {
                        stats.capped_words += 1;
                    }
                }
                list[label.sense].absorb(&v_c);
            }
            stats.tokens += sentence.len() as u64;
        }
        log.epochs.push(stats);
    }
    Ok(PpmiSenses { senses, log })
}

/// Nearest PPMI sense of an instance; fallbacks as in [`wsi::label_instance`].
pub fn label_ppmi_instance(
    instance: &Instance,
    vocab: &Vocabulary,
    model: &PpmiModel,
    senses: &PpmiSenses,
    stoplist: &Stoplist,
    selection: Selection,
) -> Labeled {
    let selected = wsi::select_context_words(instance, stoplist, selection);
    let ids: Vec<WordId> = selected.iter().filter_map(|w| vocab.id(w)).collect();
    let v = ppmi_context_vec(&ids, model);
    let mut out = Labeled {
        instance_id: instance.id.clone(),
        target: instance.target.clone(),
        sense: 0,
        similarity: 0.0,
        support: ids.len(),
        oov: selected.len() - ids.len(),
        unknown_target: false,
    };
    let Some(word) = wsi::lookup_target(instance, vocab) else {
        out.unknown_target = true;
        return out;
    };
    if ids.is_empty() {
        return out;
    }
    let initial;
    let list = match senses.senses.get(&word) {
        Some(l) => l.as_slice(),
        None => {
            initial = [SparseSense::new(model.row(word))];
            &initial[..]
        }
    };
    let mut best = (0, f64::NEG_INFINITY);
    for (k, s) in list.iter().enumerate() {
        let sim = s.cosine(&v);
        if sim > best.1 {
            best = (k, sim);
        }
    }
    out.sense = best.0;
    out.similarity = best.1 as f32;
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct KmeansResult {
    pub centroids: Vec<Vec<f64>>,
    pub assignment: Vec<usize>,
    pub inertia: f64,
    /// Inertia after every assignment step, starting with the seeding.
    pub history: Vec<f64>,
    pub iterations: usize,
    /// Clusters left empty because there were fewer points than clusters.
    pub surplus: Vec<usize>,
    /// Empty clusters re-seeded during the iterations.
    pub repairs: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid per point (lowest index on ties) and the total
/// squared distance.
pub fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut inertia = 0.0;
    let assignment = points
        .iter()
        .map(|p| {
            let mut best = (0, f64::INFINITY);
            for (k, c) in centroids.iter().enumerate() {
                let d = sq_dist(p, c);
                if d < best.1 {
                    best = (k, d);
                }
            }
            inertia += best.1;
            best.0
        })
        .collect();
    (assignment, inertia)
}

/// k-means++ seeding: indices of `min(k, n)` initial centers.
pub fn kmeans_pp_seeds<R: Rng + ?Sized>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<usize> {
    let n = points.len();
    let m = k.min(n);
    let mut chosen = Vec::with_capacity(m);
    if m == 0 {
        return chosen;
    }
    chosen.push(rng.gen_range(0..n));
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &points[chosen[0]])).collect();
    while chosen.len() < m {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.gen::<f64>() * total;
            let last = d2.iter().rposition(|&d| d > 0.0).unwrap();
            let mut pick = last;
            for (i, &d) in d2.iter().enumerate() {
                if u < d {
                    pick = i;
                    break;
                }
                u -= d;
            }
            pick
        } else {
            let free: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            free[rng.gen_range(0..free.len())]
        };
        chosen.push(next);
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &points[next]));
        }
    }
    chosen
}

/// Lloyd iterations from explicit initial centroids.
pub fn lloyd(points: &[Vec<f64>], initial: Vec<Vec<f64>>, max_iter: usize) -> KmeansResult {
    let dim = points[0].len();
    let k = initial.len();
    let mut centroids = initial;
    let (mut assignment, mut inertia) = assign(points, &centroids);
    let mut history = vec![inertia];
    let mut repairs = 0;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut sums = vec![vec![0.0; dim]; k];
        let mut sizes = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignment) {
            sizes[a] += 1;
            for (s, x) in sums[a].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut taken = HashSet::new();
        for c in 0..k {
            if sizes[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / sizes[c] as f64).collect();
            }
        }
        for c in 0..k {
            if sizes[c] == 0 {
                let far = (0..points.len())
                    .filter(|i| !taken.contains(i))
                    .max_by(|&i, &j| {
                        let di = sq_dist(&points[i], &centroids[assignment[i]]);
                        let dj = sq_dist(&points[j], &centroids[assignment[j]]);
                        di.total_cmp(&dj).then(j.cmp(&i))
                    });
                if let Some(far) = far {
                    log::warn!("k-means: re-seeding empty cluster {c} at point {far}");
                    taken.insert(far);
                    centroids[c] = points[far].clone();
                    repairs += 1;
                }
            }
        }
        let (next, next_inertia) = assign(points, &centroids);
        history.push(next_inertia);
        inertia = next_inertia;
        if next == assignment {
            break;
        }
        assignment = next;
    }
    KmeansResult {
        centroids,
        assignment,
        inertia,
        history,
        iterations,
        surplus: Vec::new(),
        repairs,
    }
}

/// Euclidean k-means with k-means++ seeding.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Result<KmeansResult> {
    if k == 0 {
        return Err(Error::Domain("k-means needs k >= 1".into()));
    }
    if points.is_empty() {
        return Err(Error::Domain("k-means needs at least one point".into()));
    }
    let dim = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::DimensionMismatch {
            left: dim,
            right: p.len(),
        });
    }
    let mut rng = stream_rng(seed, Stream::Kmeans, 0);
    let seeds = kmeans_pp_seeds(points, k, &mut rng);
    let mut result = lloyd(points, seeds.iter().map(|&i| points[i].clone()).collect(), max_iter);
    for c in seeds.len()..k {
        result.centroids.push(vec![0.0; dim]);
        result.surplus.push(c);
    }
    if !result.surplus.is_empty() {
        log::info!("k-means: {} point(s) for {k} clusters; {} left empty", points.len(), result.surplus.len());
    }
    Ok(result)
}

/// Cluster each target's instance context vectors (from global word
/// vectors) into `k` groups. Returns key entries in input order.
pub fn we_kmeans(
    instances: &[Instance],
    vocab: &Vocabulary,
    words: &WordTable,
    stoplist: &Stoplist,
    selection: Selection,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<Vec<KeyEntry>> {
    let mut by_target: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, inst) in instances.iter().enumerate() {
        by_target.entry(inst.target.as_str()).or_default().push(i);
    }
    let mut sense = vec![0usize; instances.len()];
    for (t, (_, members)) in by_target.iter().enumerate() {
        let points: Vec<Vec<f64>> = members
            .iter()
            .map(|&i| {
                let ctx = wsi::context_vec_test(&instances[i], vocab, words, stoplist, selection);
                ctx.vector.values.iter().map(|&x| x as f64).collect()
            })
            .collect();
        let result = kmeans(&points, k, derive_seed(seed, Stream::Kmeans, t as u64 + 1), max_iter)?;
        for (&i, &a) in members.iter().zip(&result.assignment) {
            sense[i] = a;
        }
    }
    Ok(instances
        .iter()
        .zip(sense)
        .map(|(inst, s)| KeyEntry::new(&inst.target, &inst.id, s))
        .collect())
}

/// Vocabulary ids of a dataset's targets.
pub fn dataset_targets(instances: &[Instance], vocab: &Vocabulary) -> HashSet<WordId> {
    instances
        .iter()
        .filter_map(|i| wsi::lookup_target(i, vocab))
        .collect()
}

/// Parameters of the PPMI baseline beyond the shared training config.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PpmiConfig {
    pub window: usize,
    pub smoothing: f64,
}

impl Default for PpmiConfig {
    fn default() -> Self {
        PpmiConfig {
            window: crate::corpus::DEFAULT_WINDOW,
            smoothing: 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_vocab;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ppmi_example() {
        let mut counts = HashMap::new();
        counts.insert((0, 0), 2);
        counts.insert((1, 1), 2);
        let m = PpmiModel::from_counts(2, &counts, 1.0);
        assert!((m.row(0).get(0) - 2f64.ln()).abs() < 1e-12);
        assert_eq!(m.row(0).get(1), 0.0);
    }

    #[test]
    fn independent_counts_give_empty_rows() {
        let mut counts = HashMap::new();
        for w in 0..3 {
            for c in 0..3 {
                counts.insert((w, c), 4);
            }
        }
        let m = PpmiModel::from_counts(3, &counts, 1.0);
        assert!(m.rows.iter().all(SparseVec::is_empty));
    }

    #[test]
    fn ppmi_is_symmetric_and_positive() {
        let text = "a b c a b d\nc d a b\nb b a c d";
        let vocab = build_vocab(text.split_whitespace(), 1).unwrap();
        let corpus = Corpus::from_text(text, &vocab);
        let m = build_ppmi(&corpus, &vocab, 2, 1.0, 1).unwrap();
        for w in 0..vocab.len() as u32 {
            for &(c, v) in &m.row(w).entries {
                assert!(v > 0.0);
                assert!((m.row(c).get(w) - v).abs() < 1e-12);
            }
        }
        assert_eq!(m, build_ppmi(&corpus, &vocab, 2, 1.0, 3).unwrap());
    }

    #[test]
    fn ppmi_round_trip() {
        let text = "a b c a b d\nc d a b\nb b a c d";
        let vocab = build_vocab(text.split_whitespace(), 1).unwrap();
        let m = build_ppmi(&Corpus::from_text(text, &vocab), &vocab, 2, 1.0, 1).unwrap();
        let mut buf = Vec::new();
        m.write(&vocab, &mut buf).unwrap();
        let back = PpmiModel::read(&buf[..], &vocab, "p").unwrap();
        assert_eq!(back.rows, m.rows);
    }

    #[test]
    fn context_vec_means() {
        let a = SparseVec { entries: vec![(0, 2.0)] };
        let b = SparseVec { entries: vec![(3, 4.0)] };
        let model = PpmiModel {
            rows: vec![a.clone(), b],
            word_counts: vec![],
            context_counts: vec![],
            total: 0,
        };
        assert_eq!(ppmi_context_vec(&[0], &model), a);
        assert_eq!(ppmi_context_vec(&[0, 1], &model).entries, vec![(0, 1.0), (3, 2.0)]);
    }

    #[test]
    fn sparse_sense_tracks_running_mean() {
        let mut s = SparseSense::new(&SparseVec { entries: vec![(9, 1.0)] });
        let a = SparseVec { entries: vec![(0, 1.0), (1, 2.0)] };
        let b = SparseVec { entries: vec![(1, 4.0)] };
        s.absorb(&a);
        s.absorb(&b);
        assert_eq!(s.centroid().entries, vec![(0, 0.5), (1, 3.0)]);
        let c = s.centroid();
        assert!((s.cosine(&a) - c.cosine(&a)).abs() < 1e-12);
    }

    #[test]
    fn kmeans_k1_is_mean() {
        let pts = vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![1.0, 3.0]];
        let r = kmeans(&pts, 1, 5, 10).unwrap();
        assert!((r.centroids[0][0] - 1.0).abs() < 1e-12);
        assert!((r.centroids[0][1] - 1.0).abs() < 1e-12);
        assert!((r.inertia - (1.0 + 1.0 + 1.0 + 1.0 + 0.0 + 4.0)).abs() < 1e-12);
    }

    #[test]
    fn kmeans_separates_pairs() {
        let pts = vec![vec![0.0, 0.0], vec![0.1, 0.0], vec![10.0, 10.0], vec![10.0, 10.1]];
        for seed in 0..20 {
            let r = kmeans(&pts, 2, seed, 50).unwrap();
            assert_eq!(r.assignment[0], r.assignment[1]);
            assert_eq!(r.assignment[2], r.assignment[3]);
            assert_ne!(r.assignment[0], r.assignment[2]);
        }
    }

    #[test]
    fn kmeans_surplus_and_errors() {
        let r = kmeans(&[vec![1.0], vec![2.0]], 3, 0, 10).unwrap();
        assert_eq!(r.surplus, vec![2]);
        assert_eq!(r.inertia, 0.0);
        assert!(kmeans(&[vec![1.0]], 0, 0, 10).is_err());
        assert!(kmeans(&[], 2, 0, 10).is_err());
    }

    #[test]
    fn seeding_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..20).map(|_| vec![rng.gen(), rng.gen()]).collect();
        let a = kmeans_pp_seeds(&pts, 4, &mut ChaCha8Rng::seed_from_u64(1));
        let b = kmeans_pp_seeds(&pts, 4, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(a, b);
        assert_eq!(a.iter().collect::<HashSet<_>>().len(), 4);
    }
}
