mod common;

use std::collections::HashMap;

use common::*;
use sense_embed::baselines::{self, ContextFilter, PpmiModel, SparseVec};
use sense_embed::corpus::{Corpus, Vocabulary};
use sense_embed::induction::{CrpLabeler, Mode, TrainingConfig};
use sense_embed::wsi::Stoplist;

fn lloyd_oracle(points: &[Vec<f64>], mut centroids: Vec<Vec<f64>>) -> (Vec<usize>, Vec<Vec<f64>>) {
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
    let mut assign = vec![usize::MAX; points.len()];
    loop {
        let next: Vec<usize> = points
            .iter()
            .map(|p| {
                let mut best = 0;
                for k in 1..centroids.len() {
                    if dist(p, &centroids[k]) < dist(p, &centroids[best]) {
                        best = k;
                    }
                }
                best
            })
            .collect();
        if next == assign {
            return (assign, centroids);
        }
        assign = next;
        for (k, c) in centroids.iter_mut().enumerate() {
            let members: Vec<&Vec<f64>> = points.iter().zip(&assign).filter(|(_, &a)| a == k).map(|(p, _)| p).collect();
            for d in 0..c.len() {
                c[d] = members.iter().map(|p| p[d]).sum::<f64>() / members.len() as f64;
            }
        }
    }
}

#[test]
fn lloyd_matches_hand_oracle_on_twelve_points() {
    let points: Vec<Vec<f64>> = [
        (0.0, 0.0), (0.5, 0.2), (0.1, 0.8), (0.7, 0.6),
        (5.0, 5.0), (5.5, 4.8), (4.6, 5.3), (5.2, 5.9),
        (0.0, 9.0), (0.4, 9.5), (-0.3, 8.7), (0.2, 8.1),
    ]
    .iter()
    .map(|&(x, y)| vec![x, y])
    .collect();
    let initial = vec![points[0].clone(), points[1].clone(), points[4].clone()];
    let result = baselines::lloyd(&points, initial.clone(), 100);
    let (assign, centroids) = lloyd_oracle(&points, initial);
    assert_eq!(result.assignment, assign);
    for (a, b) in result.centroids.iter().zip(&centroids) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12);
        }
    }
    assert!(result.history.windows(2).all(|w| w[1] <= w[0] + 1e-12));

    let seeded = baselines::kmeans(&points, 3, 4, 100).unwrap();
    let groups: Vec<usize> = seeded.assignment.chunks(4).map(|c| c[0]).collect();
    assert!(seeded.assignment.chunks(4).zip(&groups).all(|(c, &g)| c.iter().all(|&a| a == g)));
    let mut distinct = groups.clone();
    distinct.sort();
    distinct.dedup();
    assert_eq!(distinct.len(), 3);
}

/// Dense PPMI computed cell by cell.
fn dense_ppmi(v: usize, counts: &HashMap<(u32, u32), u64>, smoothing: f64) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; v]; v];
    for (&(w, c), &n) in counts {
        m[w as usize][c as usize] = n as f64;
    }
    let total: f64 = m.iter().flatten().sum();
    let row: Vec<f64> = m.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..v).map(|c| m.iter().map(|r| r[c]).sum()).collect();
    let col_s: Vec<f64> = col.iter().map(|x| x.powf(smoothing)).collect();
    let col_total: f64 = col_s.iter().sum();
    let mut out = vec![vec![0.0; v]; v];
    for w in 0..v {
        for c in 0..v {
            if m[w][c] > 0.0 {
                let pmi = ((m[w][c] / total) / ((row[w] / total) * (col_s[c] / col_total))).ln();
                out[w][c] = pmi.max(0.0);
            }
        }
    }
    out
}

#[test]
fn ppmi_rows_and_means_match_dense_oracle() {
    let mut counts = HashMap::new();
    let pairs = [(0, 1, 4), (1, 0, 4), (0, 2, 1), (2, 0, 1), (1, 2, 3), (2, 1, 3), (3, 1, 2), (1, 3, 2), (3, 3, 1)];
    for (w, c, n) in pairs {
        counts.insert((w, c), n);
    }
    for smoothing in [1.0, 0.75] {
        let model = PpmiModel::from_counts(4, &counts, smoothing);
        let dense = dense_ppmi(4, &counts, smoothing);
        for w in 0..4u32 {
            for c in 0..4u32 {
                assert!((model.row(w).get(c) - dense[w as usize][c as usize]).abs() < 1e-12);
            }
        }
        let mean = baselines::ppmi_context_vec(&[0, 1, 3], &model);
        for c in 0..4u32 {
            let want = (dense[0][c as usize] + dense[1][c as usize] + dense[3][c as usize]) / 3.0;
            assert!((mean.get(c) - want).abs() < 1e-12);
        }
    }
    let empty = SparseVec::mean(std::iter::empty());
    assert!(empty.is_empty());
}

#[test]
fn crp_ppmi_decisions_replay_through_a_fresh_labeler() {
    let syn = synthetic(&SyntheticSpec {
        tokens: 80_000,
        heldout_per_topic: 10,
        ..Default::default()
    });
    let vocab = Vocabulary::from_reader(syn.text.as_bytes(), 5).unwrap();
    let corpus = Corpus::from_text(&syn.text, &vocab);
    let model = baselines::build_ppmi(&corpus, &vocab, 5, 1.0, 2).unwrap();
    let single = baselines::build_ppmi(&corpus, &vocab, 5, 1.0, 1).unwrap();
    assert_eq!(model, single);

    let config = TrainingConfig {
        mode: Mode::Crp,
        gamma: 0.5,
        ..Default::default()
    };
    let filter = ContextFilter::new(&vocab, &Stoplist::default());
    let targets = baselines::dataset_targets(&syn.heldout, &vocab);
    let mut labeler = CrpLabeler::for_worker(&config, 0).with_trace();
    let senses = baselines::train_crp_ppmi(&corpus, &vocab, &model, &config, &filter, Some(&targets), &mut labeler).unwrap();
    let trace = labeler.take_trace();
    assert!(!trace.is_empty());

    let pseudo = vocab.id(PSEUDO).unwrap();
    assert!(trace.iter().all(|c| c.word == pseudo));
    let opened = trace.iter().filter(|c| c.label.is_new).count();
    assert_eq!(senses.count(pseudo), 1 + opened);
    assert_eq!(senses.log.total_new_senses(), opened as u64);

    let mut fresh = CrpLabeler::for_worker(&config, 0);
    for call in &trace {
        let label = fresh.label(call.word, &call.counts, &call.sims, true).unwrap();
        assert_eq!(label, call.label);
        assert_eq!(call.allow_new, call.counts.len() < config.max_senses);
    }
    // Counts seen by successive calls grow by exactly the absorbed context.
    for pair in trace.windows(2) {
        let mut expected = pair[0].counts.clone();
        if pair[0].label.is_new {
            expected.push(0);
        }
        expected[pair[0].label.sense] += 1;
        assert_eq!(pair[1].counts, expected);
    }
}

#[test]
fn we_kmeans_keys_cover_every_instance() {
    let syn = synthetic(&SyntheticSpec {
        tokens: 80_000,
        heldout_per_topic: 15,
        ..Default::default()
    });
    let vocab = Vocabulary::from_reader(syn.text.as_bytes(), 5).unwrap();
    let corpus = Corpus::from_text(&syn.text, &vocab);
    let config = TrainingConfig {
        dim: 20,
        ..Default::default()
    };
    let out = sense_embed::induction::train(&corpus, &vocab, &config).unwrap();
    let stop = Stoplist::default();
    let run = |seed| {
        baselines::we_kmeans(&syn.heldout, &vocab, &out.words, &stop, Default::default(), 2, seed, 50).unwrap()
    };
    let a = run(3);
    assert_eq!(a, run(3));
    assert_eq!(a.len(), syn.heldout.len());
    assert!(a.iter().zip(&syn.heldout).all(|(k, i)| k.instance == i.id));
    let labels: std::collections::BTreeSet<&str> = a.iter().map(|k| k.label.as_str()).collect();
    assert_eq!(labels.len(), 2);
}
