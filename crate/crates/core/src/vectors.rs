//! Word and sense tables, similarity, and their on-disk formats.
//!
//! A model is stored either as a directory of whitespace-separated text files
//! (interchange) or as a single little-endian binary file starting with the
//! magic bytes `SEWSI1`. Both formats reproduce every `f32` bit-exactly.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU32, Ordering};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};
use crate::WordId;

pub const DEFAULT_DIM: usize = 300;
pub const DEFAULT_MULTI_SENSE: usize = 6000;
pub const MAGIC: &[u8; 6] = b"SEWSI1";

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T = f32> {
    rows: usize,
    dim: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Matrix<T> {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        Matrix {
            rows,
            dim,
            data: vec![T::default(); rows * dim],
        }
    }
}

impl<T: Copy> Matrix<T> {
    pub fn from_vec(rows: usize, dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * dim {
            return Err(Error::DimensionMismatch {
                left: data.len(),
                right: rows * dim,
            });
        }
        Ok(Matrix { rows, dim, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }
}

/// Global word embeddings shared by every word's sense model.
///
/// `input` rows are the vectors averaged into context vectors; `output`
/// rows are the context-prediction vectors of the negative-sampling
/// objective.
#[derive(Clone, Debug, PartialEq)]
pub struct WordTable {
    pub input: Matrix,
    pub output: Matrix,
}

impl WordTable {
    /// Inputs uniform in `[-0.5/D, 0.5/D]`, outputs zero.
    pub fn random(vocab_size: usize, dim: usize, seed: u64) -> Self {
        let mut rng = stream_rng(seed, Stream::Init, 0);
        let scale = 0.5 / dim as f32;
        let data = (0..vocab_size * dim)
            .map(|_| rng.gen_range(-scale..=scale))
            .collect();
        WordTable {
            input: Matrix {
                rows: vocab_size,
                dim,
                data,
            },
            output: Matrix::zeros(vocab_size, dim),
        }
    }

    pub fn len(&self) -> usize {
        self.input.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.input.rows() == 0
    }

    pub fn dim(&self) -> usize {
        self.input.dim()
    }

    pub fn vector(&self, id: WordId) -> &[f32] {
        self.input.row(id as usize)
    }

    pub fn is_finite(&self) -> bool {
        self.input.as_slice().iter().all(|x| x.is_finite())
            && self.output.as_slice().iter().all(|x| x.is_finite())
    }
}

/// One induced sense of a word.
#[derive(Clone, Debug, PartialEq)]
pub struct Sense {
    /// Sense embedding; it predicts context words during training and is
    /// the vector test instances are compared against.
    pub embedding: Vec<f32>,
    /// Running mean of the context vectors assigned to this sense.
    pub centroid: Vec<f32>,
    pub count: u64,
}

impl Sense {
    pub fn new(embedding: Vec<f32>, centroid: Vec<f32>) -> Self {
        Sense {
            embedding,
            centroid,
            count: 0,
        }
    }

    /// Fold one context vector into the centroid by exact running mean.
    pub fn absorb(&mut self, context: &[f32]) {
        let n = self.count as f32;
        let denom = n + 1.0;
        for (c, &x) in self.centroid.iter_mut().zip(context) {
            *c = (n * *c + x) / denom;
        }
        self.count += 1;
    }

    pub fn vector(&self, which: SenseVector) -> &[f32] {
        match which {
            SenseVector::Centroid => &self.centroid,
            SenseVector::Embedding => &self.embedding,
        }
    }
}

/// Which per-sense vector a similarity is computed against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SenseVector {
    #[default]
    Centroid,
    Embedding,
}

/// Per-word sense inventories.
#[derive(Clone, Debug, PartialEq)]
pub struct SenseTable {
    dim: usize,
    words: Vec<Vec<Sense>>,
    multi_sense: Vec<bool>,
}

impl SenseTable {
    pub fn from_parts(dim: usize, words: Vec<Vec<Sense>>, multi_sense: Vec<bool>) -> Result<Self> {
        if words.len() != multi_sense.len() {
            return Err(Error::DimensionMismatch {
                left: words.len(),
                right: multi_sense.len(),
            });
        }
        for (w, senses) in words.iter().enumerate() {
            if senses.is_empty() {
                return Err(Error::Config(format!("word {w} has no senses")));
            }
            if !multi_sense[w] && senses.len() != 1 {
                return Err(Error::Config(format!(
                    "word {w} is single-sense but has {} senses",
                    senses.len()
                )));
            }
            for s in senses {
                if s.embedding.len() != dim || s.centroid.len() != dim {
                    return Err(Error::DimensionMismatch {
                        left: s.embedding.len().max(s.centroid.len()),
                        right: dim,
                    });
                }
            }
        }
        Ok(SenseTable {
            dim,
            words,
            multi_sense,
        })
    }

    /// Fixed-K initialization.
    ///
    /// Sense 1 of every word copies its input vector; the remaining senses
    /// of multi-sense words add a uniform `[-0.5/D, 0.5/D]` perturbation.
    /// Centroids start at zero.
    pub fn fixed(words: &WordTable, k: usize, multi_sense_size: usize, seed: u64) -> Self {
        let dim = words.dim();
        let scale = 0.5 / dim as f32;
        let mut rng = stream_rng(seed, Stream::Init, 1);
        let multi_sense: Vec<bool> = (0..words.len()).map(|w| w < multi_sense_size).collect();
        let table = (0..words.len())
            .map(|w| {
                let base = words.input.row(w);
                let n = if multi_sense[w] { k.max(1) } else { 1 };
                (0..n)
                    .map(|i| {
                        let embedding = if i == 0 {
                            base.to_vec()
                        } else {
                            base.iter().map(|&x| x + rng.gen_range(-scale..=scale)).collect()
                        };
                        Sense::new(embedding, vec![0.0; dim])
                    })
                    .collect()
            })
            .collect();
        SenseTable {
            dim,
            words: table,
            multi_sense,
        }
    }

    /// One sense per word with embedding and centroid both set to the word's
    /// input vector and a zero count.
    pub fn single_from(words: &WordTable, multi_sense_size: usize) -> Self {
        let dim = words.dim();
        let table = (0..words.len())
            .map(|w| {
                let v = words.input.row(w).to_vec();
                vec![Sense::new(v.clone(), v)]
            })
            .collect();
        SenseTable {
            dim,
            words: table,
            multi_sense: (0..words.len()).map(|w| w < multi_sense_size).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn senses(&self, word: WordId) -> &[Sense] {
        &self.words[word as usize]
    }

    pub fn senses_mut(&mut self, word: WordId) -> &mut Vec<Sense> {
        &mut self.words[word as usize]
    }

    pub fn is_multi_sense(&self, word: WordId) -> bool {
        self.multi_sense[word as usize]
    }

    pub fn multi_sense_flags(&self) -> &[bool] {
        &self.multi_sense
    }

    pub fn total_senses(&self) -> usize {
        self.words.iter().map(Vec::len).sum()
    }

    pub fn into_parts(self) -> (usize, Vec<Vec<Sense>>, Vec<bool>) {
        (self.dim, self.words, self.multi_sense)
    }

    pub fn is_finite(&self) -> bool {
        self.words.iter().flatten().all(|s| {
            s.embedding.iter().chain(&s.centroid).all(|x| x.is_finite())
        })
    }
}

/// Mean of the input vectors of a set of context words.
#[derive(Clone, Debug, PartialEq)]
pub struct ContextVector {
    pub values: Vec<f32>,
    pub support: usize,
}

impl ContextVector {
    pub fn zeros(dim: usize) -> Self {
        ContextVector {
            values: vec![0.0; dim],
            support: 0,
        }
    }

    pub fn mean<'a, I>(dim: usize, rows: I) -> Self
    where
        I: IntoIterator<Item = &'a [f32]>,
    {
        let mut values = vec![0.0f32; dim];
        let mut support = 0usize;
        for row in rows {
            for (acc, &x) in values.iter_mut().zip(row) {
                *acc += x;
            }
            support += 1;
        }
        if support > 0 {
            let inv = support as f32;
            values.iter_mut().for_each(|x| *x /= inv);
        }
        ContextVector { values, support }
    }
}

/// Standard cosine similarity; zero when either vector has zero norm.
pub fn cosine<T: Float>(a: &[T], b: &[T]) -> Result<T> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(cosine_unchecked(a, b))
}

#[inline]
pub(crate) fn cosine_unchecked<T: Float>(a: &[T], b: &[T]) -> T {
    let mut dot = T::zero();
    let mut na = T::zero();
    let mut nb = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        dot = dot + x * y;
        na = na + x * x;
        nb = nb + y * y;
    }
    if na == T::zero() || nb == T::zero() {
        return T::zero();
    }
    let c = dot / (na.sqrt() * nb.sqrt());
    c.max(-T::one()).min(T::one())
}

#[inline]
pub fn dot<T: Float>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Similarity function used for sense assignment and labeling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Similarity {
    #[default]
    Cosine,
    Dot,
}

impl Similarity {
    #[inline]
    pub fn score(self, a: &[f32], b: &[f32]) -> f32 {
        match self {
            Similarity::Cosine => cosine_unchecked(a, b),
            Similarity::Dot => dot(a, b),
        }
    }
}

/// Shared-memory matrix for lock-free parallel training.
///
/// Rows are read and written with relaxed atomics, so concurrent updates to
/// the same row may interleave but never tear a single value.
pub struct AtomicMatrix {
    rows: usize,
    dim: usize,
    data: Vec<AtomicU32>,
}

impl AtomicMatrix {
    pub fn from_matrix(m: &Matrix) -> Self {
        AtomicMatrix {
            rows: m.rows,
            dim: m.dim,
            data: m.data.iter().map(|x| AtomicU32::new(x.to_bits())).collect(),
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            dim: self.dim,
            data: self
                .data
                .iter()
                .map(|x| f32::from_bits(x.load(Ordering::Relaxed)))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f32 {
        f32::from_bits(self.data[row * self.dim + col].load(Ordering::Relaxed))
    }

    #[inline]
    pub fn set(&self, row: usize, col: usize, value: f32) {
        self.data[row * self.dim + col].store(value.to_bits(), Ordering::Relaxed);
    }

    #[inline]
    pub fn row_cells(&self, row: usize) -> &[AtomicU32] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn read_row(&self, row: usize, out: &mut [f32]) {
        for (o, cell) in out.iter_mut().zip(self.row_cells(row)) {
            *o = f32::from_bits(cell.load(Ordering::Relaxed));
        }
    }

    pub fn write_row(&self, row: usize, values: &[f32]) {
        for (cell, v) in self.row_cells(row).iter().zip(values) {
            cell.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

/// Everything a trained model persists.
#[derive(Clone, Debug, PartialEq)]
pub struct Tables {
    pub vocab: Vocabulary,
    pub words: WordTable,
    pub senses: SenseTable,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Text,
    Binary,
}

impl TableFormat {
    /// `.bin` paths are binary files, anything else a text directory.
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin") => TableFormat::Binary,
            _ => TableFormat::Text,
        }
    }
}

pub const VOCAB_FILE: &str = "vocab.txt";
pub const WORDS_FILE: &str = "words.txt";
pub const CONTEXT_FILE: &str = "context.txt";
pub const SENSES_FILE: &str = "senses.txt";
pub const CLUSTERS_FILE: &str = "clusters.txt";
pub const MULTI_SENSE_FILE: &str = "multisense.txt";

fn check_consistent(vocab: &Vocabulary, words: &WordTable, senses: &SenseTable) -> Result<()> {
    if words.len() != vocab.len() || senses.len() != vocab.len() {
        return Err(Error::Config(format!(
            "table sizes disagree: vocabulary {}, words {}, senses {}",
            vocab.len(),
            words.len(),
            senses.len()
        )));
    }
    if words.output.rows() != words.len() || words.output.dim() != words.dim() {
        return Err(Error::Config("input and output word tables disagree".into()));
    }
    if senses.dim() != words.dim() {
        return Err(Error::DimensionMismatch {
            left: senses.dim(),
            right: words.dim(),
        });
    }
    Ok(())
}

pub fn save_tables(
    path: &Path,
    vocab: &Vocabulary,
    words: &WordTable,
    senses: &SenseTable,
) -> Result<()> {
    check_consistent(vocab, words, senses)?;
    match TableFormat::for_path(path) {
        TableFormat::Binary => {
            let file = File::create(path).map_err(|e| Error::io(path, e))?;
            let mut out = BufWriter::new(file);
            write_binary(&mut out, vocab, words, senses).map_err(|e| Error::io(path, e))?;
            out.flush().map_err(|e| Error::io(path, e))?;
            Ok(())
        }
        TableFormat::Text => write_text_dir(path, vocab, words, senses),
    }
}

pub fn load_tables(path: &Path) -> Result<Tables> {
    let tables = match TableFormat::for_path(path) {
        TableFormat::Binary => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            read_binary(BufReader::new(file))?
        }
        TableFormat::Text => read_text_dir(path)?,
    };
    check_consistent(&tables.vocab, &tables.words, &tables.senses)?;
    Ok(tables)
}

fn write_floats<W: Write>(out: &mut W, values: &[f32]) -> io::Result<()> {
    for v in values {
        write!(out, " {v}")?;
    }
    writeln!(out)
}

fn write_text_dir(
    dir: &Path,
    vocab: &Vocabulary,
    words: &WordTable,
    senses: &SenseTable,
) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let create = |name: &str| -> Result<BufWriter<File>> {
        let p = dir.join(name);
        Ok(BufWriter::new(File::create(&p).map_err(|e| Error::io(&p, e))?))
    };

    let mut out = create(VOCAB_FILE)?;
    vocab.write(&mut out)?;
    out.flush()?;

    for (name, matrix) in [(WORDS_FILE, &words.input), (CONTEXT_FILE, &words.output)] {
        let mut out = create(name)?;
        writeln!(out, "{} {}", matrix.rows(), matrix.dim())?;
        for id in 0..matrix.rows() {
            write!(out, "{}", vocab.word(id as WordId))?;
            write_floats(&mut out, matrix.row(id))?;
        }
        out.flush()?;
    }

    for (name, which) in [
        (SENSES_FILE, SenseVector::Embedding),
        (CLUSTERS_FILE, SenseVector::Centroid),
    ] {
        let mut out = create(name)?;
        writeln!(out, "{} {}", senses.total_senses(), senses.dim())?;
        for id in 0..senses.len() {
            let w = vocab.word(id as WordId);
            for (k, s) in senses.senses(id as WordId).iter().enumerate() {
                write!(out, "{w}#{} {}", k + 1, s.count)?;
                write_floats(&mut out, s.vector(which))?;
            }
        }
        out.flush()?;
    }

    let mut out = create(MULTI_SENSE_FILE)?;
    for id in 0..senses.len() {
        if senses.is_multi_sense(id as WordId) {
            writeln!(out, "{}", vocab.word(id as WordId))?;
        }
    }
    out.flush()?;
    Ok(())
}

struct TextFile {
    name: String,
    lines: io::Lines<BufReader<File>>,
    line_no: usize,
}

impl TextFile {
    fn open(dir: &Path, name: &str) -> Result<Self> {
        let p = dir.join(name);
        let file = File::open(&p).map_err(|e| Error::io(&p, e))?;
        Ok(TextFile {
            name: p.display().to_string(),
            lines: BufReader::new(file).lines(),
            line_no: 0,
        })
    }

    fn next_line(&mut self) -> Result<Option<String>> {
        self.line_no += 1;
        Ok(self.lines.next().transpose()?)
    }

    fn expect_line(&mut self) -> Result<String> {
        self.next_line()?
            .ok_or_else(|| Error::parse(&self.name, self.line_no, "unexpected end of file"))
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::parse(&self.name, self.line_no, message)
    }

    fn header(&mut self) -> Result<(usize, usize)> {
        let line = self.expect_line()?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [a, b] => Ok((
                a.parse().map_err(|_| self.err("bad header count"))?,
                b.parse().map_err(|_| self.err("bad header dimension"))?,
            )),
            _ => Err(self.err("header must have two fields")),
        }
    }

    fn floats(&self, fields: &[&str], dim: usize) -> Result<Vec<f32>> {
        if fields.len() != dim {
            return Err(self.err(format!("expected {dim} values, found {}", fields.len())));
        }
        fields
            .iter()
            .map(|f| {
                let v: f32 = f.parse().map_err(|_| self.err(format!("bad value `{f}`")))?;
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(self.err("non-finite value"))
                }
            })
            .collect()
    }

    fn finish(&mut self) -> Result<()> {
        while let Some(line) = self.next_line()? {
            if !line.trim().is_empty() {
                return Err(self.err("trailing content"));
            }
        }
        Ok(())
    }
}

fn read_text_dir(dir: &Path) -> Result<Tables> {
    let vocab = Vocabulary::load(&dir.join(VOCAB_FILE))?;

    let read_matrix = |name: &str| -> Result<Matrix> {
        let mut f = TextFile::open(dir, name)?;
        let (rows, dim) = f.header()?;
        if rows != vocab.len() {
            return Err(f.err(format!("{rows} rows but vocabulary has {}", vocab.len())));
        }
        let mut data = Vec::with_capacity(rows * dim);
        for id in 0..rows {
            let line = f.expect_line()?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.first() != Some(&vocab.word(id as WordId)) {
                return Err(f.err(format!("expected word `{}`", vocab.word(id as WordId))));
            }
            data.extend(f.floats(&fields[1..], dim)?);
        }
        f.finish()?;
        Matrix::from_vec(rows, dim, data)
    };
    let input = read_matrix(WORDS_FILE)?;
    let output = read_matrix(CONTEXT_FILE)?;
    let dim = input.dim();

    let read_senses = |name: &str| -> Result<Vec<Vec<(u64, Vec<f32>)>>> {
        let mut f = TextFile::open(dir, name)?;
        let (total, d) = f.header()?;
        if d != dim {
            return Err(f.err(format!("dimension {d} but word table has {dim}")));
        }
        let mut per_word: Vec<Vec<(u64, Vec<f32>)>> = vec![Vec::new(); vocab.len()];
        let mut last: Option<WordId> = None;
        for _ in 0..total {
            let line = f.expect_line()?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 2 {
                return Err(f.err("expected `surface#k n_k values...`"));
            }
            let (surface, k) = fields[0]
                .rsplit_once('#')
                .ok_or_else(|| f.err("sense label lacks `#k`"))?;
            let k: usize = k.parse().map_err(|_| f.err("bad sense index"))?;
            let id = vocab
                .id(surface)
                .ok_or_else(|| f.err(format!("unknown word `{surface}`")))?;
            if last.is_some_and(|l| id < l) {
                return Err(f.err("senses out of word order"));
            }
            last = Some(id);
            let slot = &mut per_word[id as usize];
            if k != slot.len() + 1 {
                return Err(f.err(format!("sense index {k} out of sequence")));
            }
            let count: u64 = fields[1].parse().map_err(|_| f.err("bad sense count"))?;
            slot.push((count, f.floats(&fields[2..], dim)?));
        }
        f.finish()?;
        Ok(per_word)
    };
    let embeddings = read_senses(SENSES_FILE)?;
    let centroids = read_senses(CLUSTERS_FILE)?;

    let mut f = TextFile::open(dir, MULTI_SENSE_FILE)?;
    let mut multi_sense = vec![false; vocab.len()];
    while let Some(line) = f.next_line()? {
        let w = line.trim();
        if w.is_empty() {
            continue;
        }
        let id = vocab.id(w).ok_or_else(|| f.err(format!("unknown word `{w}`")))?;
        multi_sense[id as usize] = true;
    }

    let mut table = Vec::with_capacity(vocab.len());
    for (id, (emb, cen)) in embeddings.into_iter().zip(centroids).enumerate() {
        if emb.len() != cen.len() {
            return Err(Error::parse(
                dir.join(CLUSTERS_FILE).display().to_string(),
                0,
                format!("word `{}` has mismatched sense counts", vocab.word(id as WordId)),
            ));
        }
        table.push(
            emb.into_iter()
                .zip(cen)
                .map(|((count, embedding), (_, centroid))| Sense {
                    embedding,
                    centroid,
                    count,
                })
                .collect(),
        );
    }
    let senses = SenseTable::from_parts(dim, table, multi_sense)?;
    Ok(Tables {
        vocab,
        words: WordTable { input, output },
        senses,
    })
}

fn write_binary<W: Write>(
    out: &mut W,
    vocab: &Vocabulary,
    words: &WordTable,
    senses: &SenseTable,
) -> io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_u32::<LittleEndian>(vocab.len() as u32)?;
    out.write_u32::<LittleEndian>(words.dim() as u32)?;
    out.write_u64::<LittleEndian>(vocab.total_tokens())?;
    for (w, c) in vocab.entries() {
        out.write_u32::<LittleEndian>(w.len() as u32)?;
        out.write_all(w.as_bytes())?;
        out.write_u64::<LittleEndian>(*c)?;
    }
    for m in [&words.input, &words.output] {
        for &v in m.as_slice() {
            out.write_f32::<LittleEndian>(v)?;
        }
    }
    for id in 0..senses.len() {
        let id = id as WordId;
        out.write_u8(senses.is_multi_sense(id) as u8)?;
        let list = senses.senses(id);
        out.write_u32::<LittleEndian>(list.len() as u32)?;
        for s in list {
            out.write_u64::<LittleEndian>(s.count)?;
            for &v in s.embedding.iter().chain(&s.centroid) {
                out.write_f32::<LittleEndian>(v)?;
            }
        }
    }
    Ok(())
}

/// Reader that tracks the byte offset for error reports.
struct Counting<R> {
    inner: R,
    offset: u64,
}

impl<R: Read> Read for Counting<R> {
    fn read(&mut self, buf: &mut [u8]) -> io::Result<usize> {
        let n = self.inner.read(buf)?;
        self.offset += n as u64;
        Ok(n)
    }
}

impl<R: Read> Counting<R> {
    fn corrupt(&self, message: impl Into<String>) -> Error {
        Error::Corrupt {
            offset: self.offset,
            message: message.into(),
        }
    }

    fn wrap(&self, e: io::Error) -> Error {
        if e.kind() == io::ErrorKind::UnexpectedEof {
            self.corrupt("truncated file")
        } else {
            Error::RawIo(e)
        }
    }

    fn u8(&mut self) -> Result<u8> {
        self.read_u8().map_err(|e| self.wrap(e))
    }

    fn u32(&mut self) -> Result<u32> {
        self.read_u32::<LittleEndian>().map_err(|e| self.wrap(e))
    }

    fn u64(&mut self) -> Result<u64> {
        self.read_u64::<LittleEndian>().map_err(|e| self.wrap(e))
    }

    fn floats(&mut self, n: usize) -> Result<Vec<f32>> {
        let mut v = vec![0f32; n];
        self.read_f32_into::<LittleEndian>(&mut v)
            .map_err(|e| self.wrap(e))?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(self.corrupt("non-finite value"));
        }
        Ok(v)
    }
}

fn read_binary<R: Read>(reader: R) -> Result<Tables> {
    let mut r = Counting {
        inner: reader,
        offset: 0,
    };
    let mut magic = [0u8; 6];
    r.read_exact(&mut magic).map_err(|e| r.wrap(e))?;
    if &magic != MAGIC {
        return Err(Error::Corrupt {
            offset: 0,
            message: "bad magic bytes".into(),
        });
    }
    let v = r.u32()? as usize;
    let dim = r.u32()? as usize;
    let total = r.u64()?;

    let mut text = Vec::with_capacity(v * 16);
    writeln!(text, "{v} {total}")?;
    for _ in 0..v {
        let len = r.u32()? as usize;
        let mut bytes = vec![0u8; len];
        r.read_exact(&mut bytes).map_err(|e| r.wrap(e))?;
        let w = String::from_utf8(bytes).map_err(|_| r.corrupt("word is not UTF-8"))?;
        let c = r.u64()?;
        writeln!(text, "{w} {c}")?;
    }
    let vocab = Vocabulary::read(&text[..], "binary vocabulary").map_err(|e| r.corrupt(e.to_string()))?;
    let input = Matrix::from_vec(v, dim, r.floats(v * dim)?)?;
    let output = Matrix::from_vec(v, dim, r.floats(v * dim)?)?;

    let mut words = Vec::with_capacity(v);
    let mut multi_sense = Vec::with_capacity(v);
    for _ in 0..v {
        let flag = r.u8()?;
        if flag > 1 {
            return Err(r.corrupt("bad multi-sense flag"));
        }
        multi_sense.push(flag == 1);
        let n = r.u32()? as usize;
        let mut list = Vec::with_capacity(n);
        for _ in 0..n {
            let count = r.u64()?;
            let embedding = r.floats(dim)?;
            let centroid = r.floats(dim)?;
            list.push(Sense {
                embedding,
                centroid,
                count,
            });
        }
        words.push(list);
    }
    let mut probe = [0u8; 1];
    if r.inner.read(&mut probe)? != 0 {
        return Err(r.corrupt("trailing bytes"));
    }
    let senses = SenseTable::from_parts(dim, words, multi_sense).map_err(|e| r.corrupt(e.to_string()))?;
    Ok(Tables {
        vocab,
        words: WordTable { input, output },
        senses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_vocab;

    fn small_model() -> Tables {
        let vocab = build_vocab(["bank", "river", "bank", "money", "bank", "river"], 1).unwrap();
        let mut words = WordTable::random(3, 4, 7);
        words.output.row_mut(1).copy_from_slice(&[1.5, -0.0, 1e-30, -2.25]);
        let mut senses = SenseTable::fixed(&words, 2, 2, 7);
        senses.senses_mut(0)[1].absorb(&[0.1, 0.2, 0.3, 0.4]);
        Tables {
            vocab,
            words,
            senses,
        }
    }

    #[test]
    fn cosine_examples() {
        assert_eq!(cosine(&[1.0f64, 0.0], &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(cosine(&[1.0f64, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine(&[1.0f64, 2.0], &[2.0, 1.0]).unwrap();
        assert!((c - 0.8).abs() < 1e-12);
        assert_eq!(cosine(&[0.0f64, 0.0], &[1.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(
            cosine(&[1.0f64], &[1.0, 2.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn running_mean_centroid() {
        let mut s = Sense::new(vec![0.0; 2], vec![0.0; 2]);
        s.absorb(&[2.0, 0.0]);
        s.absorb(&[0.0, 4.0]);
        assert_eq!(s.centroid, vec![1.0, 2.0]);
        assert_eq!(s.count, 2);
    }

    #[test]
    fn fixed_init_shape() {
        let words = WordTable::random(5, 3, 1);
        let t = SenseTable::fixed(&words, 3, 2, 1);
        assert_eq!(t.senses(0).len(), 3);
        assert_eq!(t.senses(1).len(), 3);
        assert_eq!(t.senses(4).len(), 1);
        assert_eq!(t.senses(0)[0].embedding, words.vector(0));
        assert_ne!(t.senses(0)[1].embedding, words.vector(0));
        assert!(t.senses(0).iter().all(|s| s.centroid == vec![0.0; 3] && s.count == 0));
        let bound = 0.5 / 3.0 + 1e-6;
        assert!(words.input.as_slice().iter().all(|x| x.abs() <= bound));
    }

    #[test]
    fn binary_round_trip() {
        let m = small_model();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.bin");
        save_tables(&p, &m.vocab, &m.words, &m.senses).unwrap();
        let back = load_tables(&p).unwrap();
        assert_eq!(back, m);
        assert_eq!(&fs::read(&p).unwrap()[..6], MAGIC);
    }

    #[test]
    fn text_round_trip_and_idempotence() {
        let m = small_model();
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        let b = dir.path().join("b");
        save_tables(&a, &m.vocab, &m.words, &m.senses).unwrap();
        let back = load_tables(&a).unwrap();
        assert_eq!(back, m);
        save_tables(&b, &back.vocab, &back.words, &back.senses).unwrap();
        for name in [VOCAB_FILE, WORDS_FILE, CONTEXT_FILE, SENSES_FILE, CLUSTERS_FILE, MULTI_SENSE_FILE] {
            assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
        }
        let head = fs::read_to_string(a.join(SENSES_FILE)).unwrap();
        assert!(head.starts_with("5 4\nbank#1 0 "));
    }

    #[test]
    fn truncated_binary_reports_offset() {
        let m = small_model();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.bin");
        save_tables(&p, &m.vocab, &m.words, &m.senses).unwrap();
        let bytes = fs::read(&p).unwrap();
        let cut = bytes.len() - 10;
        fs::write(&p, &bytes[..cut]).unwrap();
        match load_tables(&p) {
            Err(Error::Corrupt { offset, .. }) => assert!(offset <= cut as u64 && offset > 0),
            other => panic!("expected corruption error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_text_reports_line() {
        let m = small_model();
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a");
        save_tables(&a, &m.vocab, &m.words, &m.senses).unwrap();
        let words = fs::read_to_string(a.join(WORDS_FILE)).unwrap();
        let broken: Vec<&str> = words.lines().take(2).collect();
        fs::write(a.join(WORDS_FILE), broken.join("\n") + "\nriver 1 2 x 4\n").unwrap();
        match load_tables(&a) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
