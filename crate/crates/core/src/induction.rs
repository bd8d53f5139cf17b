//! Joint sense-embedding training.
//!
//! Every token of the corpus is visited once per epoch. Its context vector
//! is the mean of the context words' input vectors; a sense label is chosen
//! either by nearest centroid over a fixed inventory of K senses or by
//! sampling a Chinese-restaurant-process style distribution that can open a
//! new sense; the chosen sense then absorbs the context vector into its
//! centroid and is trained by negative sampling to predict the context
//! words.
//!
//! With `shared_updates` on (the default) the global word vectors are
//! trained by plain skip-gram alongside the senses and the sense step only
//! moves the sense embedding. The global tables therefore evolve exactly as
//! in [`pretrain_skipgram`] with the same seed, whatever the sense labels.

use std::io::Write;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{self, extract_windows, Corpus, Subsampler, Vocabulary, Window};
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::sgns::{self, sgns_predictor_step, sgns_step, AtomicRows, NegativeSampler};
use crate::vectors::{
    self, AtomicMatrix, ContextVector, Sense, SenseTable, SenseVector, Similarity, WordTable,
};
use crate::WordId;

pub const DEFAULT_K: usize = 3;
pub const DEFAULT_GAMMA: f64 = 0.5;
pub const DEFAULT_SIM_FLOOR: f64 = 1e-4;
pub const DEFAULT_MAX_SENSES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Fixed,
    Crp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainingConfig {
    pub mode: Mode,
    pub dim: usize,
    /// Senses per multi-sense word in fixed mode.
    pub k: usize,
    /// New-sense weight in CRP mode.
    pub gamma: f64,
    pub window: usize,
    pub negatives: usize,
    pub lr: f64,
    /// Floor of the linear learning-rate decay, as a fraction of `lr`.
    pub min_lr_ratio: f64,
    pub epochs: usize,
    /// Subsampling threshold; `inf` disables subsampling.
    pub subsample: f64,
    pub min_count: u64,
    /// The `multi_sense` most frequent words may have more than one sense.
    pub multi_sense: usize,
    pub seed: u64,
    pub similarity: Similarity,
    /// Vector the context is compared with when choosing a sense in training.
    pub assign_with: SenseVector,
    /// Lower bound on the similarity factor of a CRP weight.
    pub sim_floor: f64,
    pub max_senses: usize,
    pub shared_updates: bool,
    pub threads: usize,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        TrainingConfig {
            mode: Mode::Fixed,
            dim: vectors::DEFAULT_DIM,
            k: DEFAULT_K,
            gamma: DEFAULT_GAMMA,
            window: corpus::DEFAULT_WINDOW,
            negatives: sgns::DEFAULT_NEGATIVES,
            lr: sgns::DEFAULT_LR,
            min_lr_ratio: 1e-4,
            epochs: 1,
            subsample: corpus::DEFAULT_SUBSAMPLE,
            min_count: corpus::DEFAULT_MIN_COUNT,
            multi_sense: vectors::DEFAULT_MULTI_SENSE,
            seed: 1,
            similarity: Similarity::Cosine,
            assign_with: SenseVector::Embedding,
            sim_floor: DEFAULT_SIM_FLOOR,
            max_senses: DEFAULT_MAX_SENSES,
            shared_updates: true,
            threads: 1,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.dim == 0 {
            return fail("dim must be at least 1");
        }
        if self.k == 0 {
            return fail("k must be at least 1");
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return fail("gamma must be finite and non-negative");
        }
        if self.window == 0 {
            return fail("window must be at least 1");
        }
        if self.negatives == 0 {
            return fail("negatives must be at least 1");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return fail("lr must be positive");
        }
        if !(self.min_lr_ratio > 0.0 && self.min_lr_ratio <= 1.0) {
            return fail("min_lr_ratio must be in (0, 1]");
        }
        if self.epochs == 0 {
            return fail("epochs must be at least 1");
        }
        if !(self.subsample > 0.0) {
            return fail("subsample threshold must be > 0 (use inf to disable)");
        }
        if self.min_count == 0 {
            return fail("min_count must be at least 1");
        }
        if !(self.sim_floor > 0.0 && self.sim_floor.is_finite()) {
            return fail("sim_floor must be positive");
        }
        if self.max_senses == 0 {
            return fail("max_senses must be at least 1");
        }
        if self.mode == Mode::Fixed && self.k > self.max_senses {
            return fail("k exceeds max_senses");
        }
        if self.threads == 0 {
            return fail("threads must be at least 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SenseLabel {
    pub word: WordId,
    /// 0-based sense index; for a new sense, the index it will occupy.
    pub sense: usize,
    pub is_new: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochLog {
    pub epoch: usize,
    pub tokens: u64,
    pub windows: u64,
    pub new_senses: u64,
    pub mean_loss: f64,
    pub capped_words: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainLog {
    pub epochs: Vec<EpochLog>,
}

impl TrainLog {
    /// One JSON object per line, one line per epoch.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.epochs {
            serde_json::to_writer(&mut out, e)?;
            writeln!(out)?;
        }
        Ok(())
    }

    pub fn total_new_senses(&self) -> u64 {
        self.epochs.iter().map(|e| e.new_senses).sum()
    }
}

#[derive(Clone, Debug)]
pub struct TrainOutput {
    pub words: WordTable,
    pub senses: SenseTable,
    pub log: TrainLog,
}

pub fn context_vec_train(window: &Window, words: &WordTable) -> ContextVector {
    ContextVector::mean(
        words.dim(),
        window.context.iter().map(|&c| words.vector(c)),
    )
}

/// Highest-similarity sense; ties go to the lowest index.
pub fn argmax_sense(senses: &[Sense], v_c: &[f32], which: SenseVector, sim: Similarity) -> (usize, f32) {
    let mut best = (0usize, f32::NEG_INFINITY);
    for (k, s) in senses.iter().enumerate() {
        let score = sim.score(s.vector(which), v_c);
        if score > best.1 {
            best = (k, score);
        }
    }
    best
}

pub fn sense_label_fix(
    word: WordId,
    v_c: &ContextVector,
    senses: &SenseTable,
    which: SenseVector,
    sim: Similarity,
) -> SenseLabel {
    let (sense, _) = argmax_sense(senses.senses(word), &v_c.values, which, sim);
    SenseLabel {
        word,
        sense,
        is_new: false,
    }
}

/// Unnormalized CRP weights: existing senses first, then the new-sense weight.
///
/// Sense `k` weighs `max(n_k, 1) · max(sim_k, floor)`; a new sense weighs
/// `gamma` when allowed and 0 otherwise.
pub fn crp_weights(counts: &[u64], sims: &[f64], gamma: f64, floor: f64, allow_new: bool) -> Vec<f64> {
    counts
        .iter()
        .zip(sims)
        .map(|(&n, &s)| n.max(1) as f64 * s.max(floor))
        .chain(std::iter::once(if allow_new { gamma } else { 0.0 }))
        .collect()
}

/// Draw a CRP outcome: `(index, is_new)`.
pub fn crp_choose<R: Rng + ?Sized>(
    counts: &[u64],
    sims: &[f64],
    gamma: f64,
    floor: f64,
    allow_new: bool,
    rng: &mut R,
) -> Result<(usize, bool)> {
    debug_assert_eq!(counts.len(), sims.len());
    let weights = crp_weights(counts, sims, gamma, floor, allow_new);
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::NoSenseOutcome);
    }
    let mut u = rng.gen::<f64>() * total;
    let last_positive = weights.iter().rposition(|&w| w > 0.0).unwrap();
    for (i, &w) in weights.iter().enumerate() {
        if u < w || i == last_positive {
            return Ok((i, i == counts.len()));
        }
        u -= w;
    }
    unreachable!()
}

/// Per-worker CRP sampler; both the embedding trainer and the PPMI baseline
/// label through this type.
pub struct CrpLabeler {
    pub gamma: f64,
    pub floor: f64,
    pub max_senses: usize,
    rng: ChaCha8Rng,
    trace: Option<Vec<CrpCall>>,
}

/// One recorded labeling decision.
#[derive(Clone, Debug, PartialEq)]
pub struct CrpCall {
    pub word: WordId,
    pub counts: Vec<u64>,
    pub sims: Vec<f64>,
    pub allow_new: bool,
    pub label: SenseLabel,
}

impl CrpLabeler {
    pub fn new(gamma: f64, floor: f64, max_senses: usize, seed: u64, worker: u64) -> Self {
        CrpLabeler {
            gamma,
            floor,
            max_senses,
            rng: stream_rng(seed, Stream::Crp, worker),
            trace: None,
        }
    }

    pub fn for_worker(config: &TrainingConfig, worker: u64) -> Self {
        Self::new(config.gamma, config.sim_floor, config.max_senses, config.seed, worker)
    }

    pub fn with_trace(mut self) -> Self {
        self.trace = Some(Vec::new());
        self
    }

    pub fn take_trace(&mut self) -> Vec<CrpCall> {
        self.trace.take().unwrap_or_default()
    }

    /// Label from precomputed similarities. `multi_sense` words below the
    /// cap may open a new sense.
    pub fn label(&mut self, word: WordId, counts: &[u64], sims: &[f64], multi_sense: bool) -> Result<SenseLabel> {
        let allow_new = multi_sense && counts.len() < self.max_senses;
        let (sense, is_new) = crp_choose(counts, sims, self.gamma, self.floor, allow_new, &mut self.rng)?;
        let label = SenseLabel { word, sense, is_new };
        if let Some(trace) = &mut self.trace {
            trace.push(CrpCall {
                word,
                counts: counts.to_vec(),
                sims: sims.to_vec(),
                allow_new,
                label,
            });
        }
        Ok(label)
    }
}

pub fn sense_label_crp(
    word: WordId,
    v_c: &ContextVector,
    senses: &SenseTable,
    labeler: &mut CrpLabeler,
    which: SenseVector,
    sim: Similarity,
) -> Result<SenseLabel> {
    let list = senses.senses(word);
    let counts: Vec<u64> = list.iter().map(|s| s.count).collect();
    let sims: Vec<f64> = list
        .iter()
        .map(|s| sim.score(s.vector(which), &v_c.values) as f64)
        .collect();
    labeler.label(word, &counts, &sims, senses.is_multi_sense(word))
}

/// Align pre-trained word vectors to `vocab` and give every word a single
/// sense initialized at its vector with a zero count.
pub fn crp_pretrain_init(
    vocab: &Vocabulary,
    pretrained_vocab: &Vocabulary,
    pretrained: &WordTable,
    multi_sense: usize,
) -> Result<(WordTable, SenseTable)> {
    let words = align_word_table(vocab, pretrained_vocab, pretrained)?;
    let senses = SenseTable::single_from(&words, multi_sense);
    Ok((words, senses))
}

fn align_word_table(vocab: &Vocabulary, from_vocab: &Vocabulary, from: &WordTable) -> Result<WordTable> {
    if vocab == from_vocab && from.len() == vocab.len() {
        return Ok(from.clone());
    }
    let dim = from.dim();
    let mut missing = Vec::new();
    let mut input = vectors::Matrix::zeros(vocab.len(), dim);
    let mut output = vectors::Matrix::zeros(vocab.len(), dim);
    for (id, (word, _)) in vocab.entries().iter().enumerate() {
        match from_vocab.id(word).filter(|&j| (j as usize) < from.len()) {
            Some(j) => {
                input.row_mut(id).copy_from_slice(from.input.row(j as usize));
                output.row_mut(id).copy_from_slice(from.output.row(j as usize));
            }
            None => missing.push(word.clone()),
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingVectors(missing));
    }
    Ok(WordTable { input, output })
}

#[derive(Default)]
struct EpochStats {
    tokens: u64,
    windows: u64,
    new_senses: u64,
    capped: u64,
    loss_sum: f64,
    loss_terms: u64,
}

struct Worker {
    window_rng: ChaCha8Rng,
    negative_index: u64,
    crp: CrpLabeler,
    negatives: Vec<usize>,
    predictor: Vec<f32>,
    stats: EpochStats,
}

impl Worker {
    fn new(config: &TrainingConfig, id: u64) -> Self {
        Worker {
            window_rng: stream_rng(config.seed, Stream::Windows, id),
            negative_index: id << 40,
            crp: CrpLabeler::for_worker(config, id),
            negatives: Vec::with_capacity(config.negatives),
            predictor: vec![0.0; config.dim],
            stats: EpochStats::default(),
        }
    }

    fn draw(&mut self, sampler: &NegativeSampler, count: usize, exclude: WordId) {
        let mut stream = sampler.stream(self.negative_index);
        stream.fill(count, exclude, &mut self.negatives);
        self.negative_index = stream.position();
    }
}

struct Shared<'a> {
    config: &'a TrainingConfig,
    corpus: &'a Corpus,
    sampler: NegativeSampler,
    subsampler: Subsampler,
    input: AtomicMatrix,
    output: AtomicMatrix,
    processed: AtomicU64,
    budget: u64,
}

impl Shared<'_> {
    fn learning_rate(&self) -> f32 {
        let done = self.processed.load(Ordering::Relaxed) as f64 / self.budget.max(1) as f64;
        (self.config.lr * (1.0 - done).max(self.config.min_lr_ratio)) as f32
    }
}

fn make_shared<'a>(
    corpus: &'a Corpus,
    vocab: &Vocabulary,
    config: &'a TrainingConfig,
    words: &WordTable,
) -> Result<Shared<'a>> {
    config.validate()?;
    if vocab.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    if words.len() != vocab.len() || words.dim() != config.dim {
        return Err(Error::Config(format!(
            "word table is {}x{}, expected {}x{}",
            words.len(),
            words.dim(),
            vocab.len(),
            config.dim
        )));
    }
    let counts: Vec<u64> = vocab.entries().iter().map(|(_, c)| *c).collect();
    let sampler = NegativeSampler::new(
        &counts,
        sgns::SAMPLING_EXPONENT,
        crate::rng::derive_seed(config.seed, Stream::Negatives, 0),
    )?;
    Ok(Shared {
        config,
        corpus,
        sampler,
        subsampler: Subsampler::new(vocab, config.subsample, config.seed)?,
        input: AtomicMatrix::from_matrix(&words.input),
        output: AtomicMatrix::from_matrix(&words.output),
        processed: AtomicU64::new(0),
        budget: corpus.num_tokens() * config.epochs as u64,
    })
}

/// Run every epoch, feeding each non-empty window to `step`.
fn drive<F>(shared: &Shared<'_>, step: F) -> TrainLog
where
    F: Fn(&Shared<'_>, &mut Worker, &Window, f32) + Sync,
{
    let config = shared.config;
    let mut workers: Vec<Worker> = (0..config.threads).map(|i| Worker::new(config, i as u64)).collect();
    let sentences = shared.corpus.sentences();
    let mut log = TrainLog::default();
    for epoch in 0..config.epochs {
        let subsampler = shared.subsampler.for_epoch(epoch as u64);
        let run_shard = |worker: &mut Worker, range: std::ops::Range<usize>| {
            worker.stats = EpochStats::default();
            for i in range {
                let lr = shared.learning_rate();
                let sentence = &sentences[i];
                let kept = subsampler.apply(sentence, shared.corpus.sentence_start(i));
                let windows = extract_windows(&kept, config.window, &mut worker.window_rng);
                for w in windows.iter().filter(|w| !w.context.is_empty()) {
                    worker.stats.windows += 1;
                    step(shared, worker, w, lr);
                }
                worker.stats.tokens += sentence.len() as u64;
                shared.processed.fetch_add(sentence.len() as u64, Ordering::Relaxed);
            }
        };
        if workers.len() == 1 {
            run_shard(&mut workers[0], 0..sentences.len());
        } else {
            let n = workers.len();
            let chunk = sentences.len().div_ceil(n);
            std::thread::scope(|scope| {
                for (i, worker) in workers.iter_mut().enumerate() {
                    let lo = (i * chunk).min(sentences.len());
                    let hi = ((i + 1) * chunk).min(sentences.len());
                    let run = &run_shard;
                    scope.spawn(move || run(worker, lo..hi));
                }
            });
        }
        let mut total = EpochStats::default();
        for w in &workers {
            total.tokens += w.stats.tokens;
            total.windows += w.stats.windows;
            total.new_senses += w.stats.new_senses;
            total.capped += w.stats.capped;
            total.loss_sum += w.stats.loss_sum;
            total.loss_terms += w.stats.loss_terms;
        }
        log.epochs.push(EpochLog {
            epoch: epoch + 1,
            tokens: total.tokens,
            windows: total.windows,
            new_senses: total.new_senses,
            mean_loss: if total.loss_terms > 0 {
                total.loss_sum / total.loss_terms as f64
            } else {
                0.0
            },
            capped_words: total.capped,
        });
        log::info!(
            "epoch {}: {} tokens, {} windows, mean loss {:.4}",
            epoch + 1,
            total.tokens,
            total.windows,
            log.epochs.last().unwrap().mean_loss
        );
    }
    log
}

fn read_context(input: &AtomicMatrix, context: &[WordId], dim: usize) -> ContextVector {
    let mut values = vec![0.0f32; dim];
    for &c in context {
        for (d, v) in values.iter_mut().enumerate() {
            *v += input.get(c as usize, d);
        }
    }
    let n = context.len() as f32;
    if !context.is_empty() {
        values.iter_mut().for_each(|v| *v /= n);
    }
    ContextVector {
        values,
        support: context.len(),
    }
}

/// Plain skip-gram with negative sampling over the whole vocabulary.
///
/// The target's input vector predicts each context word's output vector.
pub fn pretrain_skipgram(
    corpus: &Corpus,
    vocab: &Vocabulary,
    config: &TrainingConfig,
    words: WordTable,
) -> Result<(WordTable, TrainLog)> {
    let shared = make_shared(corpus, vocab, config, &words)?;
    let log = drive(&shared, |sh, worker, window, lr| {
        let target = window.target as usize;
        let mut predictor = std::mem::take(&mut worker.predictor);
        sh.input.read_row(target, &mut predictor);
        let mut out = AtomicRows(&sh.output);
        for &c in &window.context {
            worker.draw(&sh.sampler, sh.config.negatives, c);
            let loss = sgns_step(&mut predictor, c as usize, &worker.negatives, &mut out, lr);
            worker.stats.loss_sum += loss as f64;
            worker.stats.loss_terms += 1;
        }
        sh.input.write_row(target, &predictor);
        worker.predictor = predictor;
    });
    Ok((
        WordTable {
            input: shared.input.to_matrix(),
            output: shared.output.to_matrix(),
        },
        log,
    ))
}

/// Train from scratch: random tables in fixed mode; skip-gram pre-training
/// followed by single-sense initialization in CRP mode.
pub fn train(corpus: &Corpus, vocab: &Vocabulary, config: &TrainingConfig) -> Result<TrainOutput> {
    config.validate()?;
    if vocab.is_empty() || corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let init = WordTable::random(vocab.len(), config.dim, config.seed);
    match config.mode {
        Mode::Fixed => {
            let senses = SenseTable::fixed(&init, config.k, config.multi_sense, config.seed);
            train_from(corpus, vocab, config, init, senses)
        }
        Mode::Crp => {
            let (words, mut pre_log) = pretrain_skipgram(corpus, vocab, config, init)?;
            let (words, senses) = crp_pretrain_init(vocab, vocab, &words, config.multi_sense)?;
            let mut out = train_from(corpus, vocab, config, words, senses)?;
            pre_log.epochs.append(&mut out.log.epochs);
            for (i, e) in pre_log.epochs.iter_mut().enumerate() {
                e.epoch = i + 1;
            }
            out.log = pre_log;
            Ok(out)
        }
    }
}

/// Run the sense-learning loop from given tables.
pub fn train_from(
    corpus: &Corpus,
    vocab: &Vocabulary,
    config: &TrainingConfig,
    words: WordTable,
    senses: SenseTable,
) -> Result<TrainOutput> {
    let shared = make_shared(corpus, vocab, config, &words)?;
    if senses.len() != vocab.len() || senses.dim() != config.dim {
        return Err(Error::Config("sense table does not match the vocabulary".into()));
    }
    let (dim, table, multi) = senses.into_parts();
    if config.mode == Mode::Fixed {
        for (w, list) in table.iter().enumerate() {
            let want = if multi[w] { config.k } else { 1 };
            if list.len() != want {
                return Err(Error::Config(format!(
                    "fixed mode expects {want} sense(s) for word {w}, found {}",
                    list.len()
                )));
            }
        }
    }
    let locked: Vec<Mutex<Vec<Sense>>> = table.into_iter().map(Mutex::new).collect();

    let log = drive(&shared, |sh, worker, window, lr| {
        let cfg = sh.config;
        let target = window.target;
        let v_c = read_context(&sh.input, &window.context, cfg.dim);
        let mut list = locked[target as usize].lock().unwrap_or_else(|e| e.into_inner());

        let label = match cfg.mode {
            Mode::Fixed => {
                let (sense, _) = argmax_sense(&list, &v_c.values, cfg.assign_with, cfg.similarity);
                SenseLabel {
                    word: target,
                    sense,
                    is_new: false,
                }
            }
            Mode::Crp => {
                let counts: Vec<u64> = list.iter().map(|s| s.count).collect();
                let sims: Vec<f64> = list
                    .iter()
                    .map(|s| cfg.similarity.score(s.vector(cfg.assign_with), &v_c.values) as f64)
                    .collect();
                // Existing senses always carry positive weight, so this cannot fail.
                worker
                    .crp
                    .label(target, &counts, &sims, multi[target as usize])
                    .expect("non-empty sense list")
            }
        };
        if label.is_new {
            list.push(Sense::new(v_c.values.clone(), v_c.values.clone()));
            worker.stats.new_senses += 1;
            if list.len() == cfg.max_senses {
                log::info!("word {target} reached the sense cap of {}", cfg.max_senses);
                worker.stats.capped += 1;
            }
        }
        let sense = &mut list[label.sense];
        sense.absorb(&v_c.values);

        let mut out = AtomicRows(&sh.output);
        if cfg.shared_updates {
            let mut global = std::mem::take(&mut worker.predictor);
            sh.input.read_row(target as usize, &mut global);
            for &c in &window.context {
                worker.draw(&sh.sampler, cfg.negatives, c);
                let loss = sgns_predictor_step(&mut sense.embedding, c as usize, &worker.negatives, &out, lr);
                sgns_step(&mut global, c as usize, &worker.negatives, &mut out, lr);
                worker.stats.loss_sum += loss as f64;
                worker.stats.loss_terms += 1;
            }
            sh.input.write_row(target as usize, &global);
            worker.predictor = global;
        } else {
            for &c in &window.context {
                worker.draw(&sh.sampler, cfg.negatives, c);
                let loss = sgns_step(&mut sense.embedding, c as usize, &worker.negatives, &mut out, lr);
                worker.stats.loss_sum += loss as f64;
                worker.stats.loss_terms += 1;
            }
        }
    });

    let table: Vec<Vec<Sense>> = locked
        .into_iter()
        .map(|m| m.into_inner().unwrap_or_else(|e| e.into_inner()))
        .collect();
    Ok(TrainOutput {
        words: WordTable {
            input: shared.input.to_matrix(),
            output: shared.output.to_matrix(),
        },
        senses: SenseTable::from_parts(dim, table, multi)?,
        log,
    })
}
