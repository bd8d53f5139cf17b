//! Skip-gram negative-sampling objective and its SGD step.
//!
//! For a predictor `v`, a positive output row `u_pos` and negative rows
//! `u_n`, the loss is
//!
//! ```text
//! L = -log σ(u_pos·v) - Σ_n log σ(-u_n·v)
//! ```
//!
//! The kernels are generic over the float type so the gradient can be
//! checked in double precision while training runs in `f32`.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::rng::unit_uniform;
use crate::vectors::{AtomicMatrix, Matrix};
use crate::WordId;

pub const DEFAULT_NEGATIVES: usize = 5;
pub const DEFAULT_LR: f64 = 0.025;
pub const SAMPLING_EXPONENT: f64 = 0.75;

/// Output rows the kernels read and update.
pub trait RowStore<T> {
    fn dim(&self) -> usize;
    fn dot(&self, row: usize, v: &[T]) -> T;
    /// `acc += alpha * row`
    fn accumulate(&self, row: usize, alpha: T, acc: &mut [T]);
    /// `row += alpha * x`
    fn add_scaled(&mut self, row: usize, alpha: T, x: &[T]);
}

impl<T: Float> RowStore<T> for Matrix<T> {
    fn dim(&self) -> usize {
        Matrix::dim(self)
    }

    #[inline]
    fn dot(&self, row: usize, v: &[T]) -> T {
        self.row(row)
            .iter()
            .zip(v)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
    }

    #[inline]
    fn accumulate(&self, row: usize, alpha: T, acc: &mut [T]) {
        for (a, &u) in acc.iter_mut().zip(self.row(row)) {
            *a = *a + alpha * u;
        }
    }

    #[inline]
    fn add_scaled(&mut self, row: usize, alpha: T, x: &[T]) {
        for (u, &xi) in self.row_mut(row).iter_mut().zip(x) {
            *u = *u + alpha * xi;
        }
    }
}

/// Shared view of an [`AtomicMatrix`] for lock-free training.
#[derive(Clone, Copy)]
pub struct AtomicRows<'a>(pub &'a AtomicMatrix);

impl RowStore<f32> for AtomicRows<'_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    #[inline]
    fn dot(&self, row: usize, v: &[f32]) -> f32 {
        let mut acc = 0.0f32;
        for (c, &b) in v.iter().enumerate() {
            acc += self.0.get(row, c) * b;
        }
        acc
    }

    #[inline]
    fn accumulate(&self, row: usize, alpha: f32, acc: &mut [f32]) {
        for (c, a) in acc.iter_mut().enumerate() {
            *a += alpha * self.0.get(row, c);
        }
    }

    #[inline]
    fn add_scaled(&mut self, row: usize, alpha: f32, x: &[f32]) {
        for (c, &xi) in x.iter().enumerate() {
            let u = self.0.get(row, c);
            self.0.set(row, c, u + alpha * xi);
        }
    }
}

#[inline]
pub fn sigmoid<T: Float>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// `-log σ(x)`, stable for large `|x|`.
#[inline]
pub fn neg_log_sigmoid<T: Float>(x: T) -> T {
    if x >= T::zero() {
        (-x).exp().ln_1p()
    } else {
        -x + x.exp().ln_1p()
    }
}

pub fn sgns_loss<T: Float, S: RowStore<T>>(
    predictor: &[T],
    positive: usize,
    negatives: &[usize],
    outputs: &S,
) -> T {
    let mut loss = neg_log_sigmoid(outputs.dot(positive, predictor));
    for &n in negatives {
        loss = loss + neg_log_sigmoid(-outputs.dot(n, predictor));
    }
    loss
}

/// Analytic gradient of [`sgns_loss`].
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<T> {
    pub predictor: Vec<T>,
    /// Per distinct output row, duplicates summed.
    pub outputs: Vec<(usize, Vec<T>)>,
}

pub fn sgns_gradients<T: Float, S: RowStore<T>>(
    predictor: &[T],
    positive: usize,
    negatives: &[usize],
    outputs: &S,
) -> Gradients<T> {
    let coeffs = coefficients(predictor, positive, negatives, outputs);
    let mut grad = vec![T::zero(); predictor.len()];
    let mut rows: Vec<(usize, Vec<T>)> = Vec::new();
    for &(row, g, _) in &coeffs {
        outputs.accumulate(row, g, &mut grad);
        let slot = match rows.iter().position(|(r, _)| *r == row) {
            Some(i) => i,
            None => {
                rows.push((row, vec![T::zero(); predictor.len()]));
                rows.len() - 1
            }
        };
        for (acc, &v) in rows[slot].1.iter_mut().zip(predictor) {
            *acc = *acc + g * v;
        }
    }
    Gradients {
        predictor: grad,
        outputs: rows,
    }
}

/// `(row, dL/d(u·v), loss term)` for the positive and each negative.
#[inline]
fn coefficients<T: Float, S: RowStore<T>>(
    predictor: &[T],
    positive: usize,
    negatives: &[usize],
    outputs: &S,
) -> Vec<(usize, T, T)> {
    let mut out = Vec::with_capacity(negatives.len() + 1);
    let d = outputs.dot(positive, predictor);
    out.push((positive, sigmoid(d) - T::one(), neg_log_sigmoid(d)));
    for &n in negatives {
        let d = outputs.dot(n, predictor);
        out.push((n, sigmoid(d), neg_log_sigmoid(-d)));
    }
    out
}

/// One SGD step on the predictor and every involved output row.
///
/// All coefficients are computed from the pre-step values, so the update is
/// exactly `-lr · ∇L` even when a negative id repeats. Returns the pre-step
/// loss.
pub fn sgns_step<T: Float, S: RowStore<T>>(
    predictor: &mut [T],
    positive: usize,
    negatives: &[usize],
    outputs: &mut S,
    lr: T,
) -> T {
    let coeffs = coefficients(predictor, positive, negatives, outputs);
    let mut delta = vec![T::zero(); predictor.len()];
    let mut loss = T::zero();
    for &(row, g, l) in &coeffs {
        outputs.accumulate(row, g, &mut delta);
        loss = loss + l;
    }
    for &(row, g, _) in &coeffs {
        outputs.add_scaled(row, -lr * g, predictor);
    }
    for (p, d) in predictor.iter_mut().zip(&delta) {
        *p = *p - lr * *d;
    }
    loss
}

/// Like [`sgns_step`] but only the predictor moves; output rows are read.
pub fn sgns_predictor_step<T: Float, S: RowStore<T>>(
    predictor: &mut [T],
    positive: usize,
    negatives: &[usize],
    outputs: &S,
    lr: T,
) -> T {
    let coeffs = coefficients(predictor, positive, negatives, outputs);
    let mut delta = vec![T::zero(); predictor.len()];
    let mut loss = T::zero();
    for &(row, g, l) in &coeffs {
        outputs.accumulate(row, g, &mut delta);
        loss = loss + l;
    }
    for (p, d) in predictor.iter_mut().zip(&delta) {
        *p = *p - lr * *d;
    }
    loss
}

/// Unigram^0.75 noise distribution, sampled by inverse CDF.
///
/// Draw `i` is a pure function of `(seed, i)`.
#[derive(Clone, Debug)]
pub struct NegativeSampler {
    cumulative: Vec<f64>,
    seed: u64,
}

impl NegativeSampler {
    pub fn new(counts: &[u64], exponent: f64, seed: u64) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::Domain(format!(
                "negative sampling needs at least 2 words, vocabulary has {}",
                counts.len()
            )));
        }
        let weights: Vec<f64> = counts.iter().map(|&c| (c as f64).powf(exponent)).collect();
        if weights.iter().filter(|&&w| w > 0.0).count() < 2 {
            return Err(Error::Domain(
                "negative sampling needs two words with positive counts".into(),
            ));
        }
        let total: f64 = weights.iter().sum();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect();
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(NegativeSampler { cumulative, seed })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    pub fn probability(&self, id: WordId) -> f64 {
        let i = id as usize;
        self.cumulative[i] - if i == 0 { 0.0 } else { self.cumulative[i - 1] }
    }

    #[inline]
    pub fn sample(&self, index: u64) -> WordId {
        let u = unit_uniform(self.seed, index);
        self.cumulative.partition_point(|&c| c <= u).min(self.len() - 1) as WordId
    }

    /// Cursor over the draw index space starting at `start`.
    pub fn stream(&self, start: u64) -> NegativeStream<'_> {
        NegativeStream {
            sampler: self,
            next: start,
        }
    }
}

/// Sequential draws from a [`NegativeSampler`].
pub struct NegativeStream<'a> {
    sampler: &'a NegativeSampler,
    next: u64,
}

impl NegativeStream<'_> {
    /// Fill `out` with `count` draws, resampling any equal to `exclude`.
    pub fn fill(&mut self, count: usize, exclude: WordId, out: &mut Vec<usize>) {
        out.clear();
        while out.len() < count {
            let id = self.sampler.sample(self.next);
            self.next += 1;
            if id != exclude {
                out.push(id as usize);
            }
        }
    }

    pub fn position(&self) -> u64 {
        self.next
    }
}

pub fn draw_negatives(stream: &mut NegativeStream<'_>, count: usize, exclude: WordId) -> Vec<WordId> {
    let mut out = Vec::with_capacity(count);
    stream.fill(count, exclude, &mut out);
    out.into_iter().map(|i| i as WordId).collect()
}
