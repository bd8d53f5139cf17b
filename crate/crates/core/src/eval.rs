//! WSI clustering metrics: V-Measure, paired F-score, supervised 80-20
//! recall/F-score and average cluster count, with per-target aggregation.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{mix, stream_rng, Stream};
use crate::wsi::KeyEntry;

pub const DEFAULT_SPLITS: usize = 5;
pub const DEFAULT_FRACTION: f64 = 0.8;
/// Smallest universe that can be split.
pub const MIN_SPLIT_UNIVERSE: usize = 5;
/// Discrepancies listed in a universe-mismatch error.
pub const MAX_LISTED: usize = 10;

/// Instance id → opaque label, over an ordered universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clustering {
    ids: Vec<String>,
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Clustering {
    pub fn from_pairs<I, A, B>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (A, B)>,
        A: Into<String>,
        B: Into<String>,
    {
        let mut c = Clustering {
            ids: Vec::new(),
            labels: Vec::new(),
            index: HashMap::new(),
        };
        for (id, label) in pairs {
            let id = id.into();
            if c.index.contains_key(&id) {
                return Err(Error::Domain(format!("instance `{id}` labeled twice")));
            }
            c.index.insert(id.clone(), c.ids.len());
            c.ids.push(id);
            c.labels.push(label.into());
        }
        Ok(c)
    }

    /// Ids `0..n` labeled in order.
    pub fn from_labels<L: ToString>(labels: &[L]) -> Self {
        Self::from_pairs(labels.iter().enumerate().map(|(i, l)| (i.to_string(), l.to_string())))
            .expect("ids are distinct")
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn universe(&self) -> &[String] {
        &self.ids
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, id: &str) -> Option<&str> {
        self.index.get(id).map(|&i| self.labels[i].as_str())
    }

    pub fn distinct_labels(&self) -> usize {
        self.labels.iter().collect::<HashSet<_>>().len()
    }

    /// Restriction to `ids`, in that order.
    pub fn restrict(&self, ids: &[String]) -> Result<Clustering> {
        Clustering::from_pairs(ids.iter().map(|id| {
            let label = self.label(id).unwrap_or_default().to_owned();
            (id.clone(), label)
        }))
    }
}

/// Differences between two universes: `missing:` ids are only in `gold`,
/// `extra:` ids only in `pred`.
pub fn universe_discrepancies(gold: &[String], pred: &[String]) -> Vec<String> {
    let g: BTreeSet<&String> = gold.iter().collect();
    let p: BTreeSet<&String> = pred.iter().collect();
    g.difference(&p)
        .map(|id| format!("missing: {id}"))
        .chain(p.difference(&g).map(|id| format!("extra: {id}")))
        .collect()
}

fn mismatch(discrepancies: Vec<String>) -> Error {
    Error::UniverseMismatch {
        count: discrepancies.len(),
        first: discrepancies.into_iter().take(MAX_LISTED).collect(),
    }
}

/// Gold and predicted labels as dense codes in gold universe order.
fn codes(gold: &Clustering, pred: &Clustering) -> Result<(Vec<usize>, Vec<usize>)> {
    if gold.len() != pred.len() || gold.ids.iter().any(|id| !pred.index.contains_key(id)) {
        return Err(mismatch(universe_discrepancies(&gold.ids, &pred.ids)));
    }
    let mut gmap = HashMap::new();
    let mut pmap = HashMap::new();
    let mut g = Vec::with_capacity(gold.len());
    let mut p = Vec::with_capacity(gold.len());
    for (id, gl) in gold.ids.iter().zip(&gold.labels) {
        let pl = pred.label(id).unwrap();
        let n = gmap.len();
        g.push(*gmap.entry(gl.as_str()).or_insert(n));
        let n = pmap.len();
        p.push(*pmap.entry(pl).or_insert(n));
    }
    Ok((g, p))
}

fn contingency(g: &[usize], p: &[usize]) -> Vec<Vec<u64>> {
    let ng = g.iter().max().map_or(0, |m| m + 1);
    let np = p.iter().max().map_or(0, |m| m + 1);
    let mut t = vec![vec![0u64; np]; ng];
    for (&a, &b) in g.iter().zip(p) {
        t[a][b] += 1;
    }
    t
}

fn entropy(counts: impl Iterator<Item = u64>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let q = c as f64 / n;
            -q * q.ln()
        })
        .sum()
}

/// H(rows | columns) over a joint count table.
fn conditional_entropy(table: &[Vec<u64>], n: f64) -> f64 {
    let cols = table.first().map_or(0, Vec::len);
    let col_sums: Vec<u64> = (0..cols).map(|j| table.iter().map(|r| r[j]).sum()).collect();
    let mut h = 0.0;
    for row in table {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                h -= c as f64 / n * (c as f64 / col_sums[j] as f64).ln();
            }
        }
    }
    h
}

fn transpose(t: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let cols = t.first().map_or(0, Vec::len);
    (0..cols).map(|j| t.iter().map(|r| r[j]).collect()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VMeasure {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
}

pub fn v_measure(gold: &Clustering, pred: &Clustering) -> Result<VMeasure> {
    let (g, p) = codes(gold, pred)?;
    Ok(v_measure_codes(&g, &p))
}

fn v_measure_codes(g: &[usize], p: &[usize]) -> VMeasure {
    let n = g.len() as f64;
    let table = contingency(g, p);
    let t = transpose(&table);
    let hg = entropy(table.iter().map(|r| r.iter().sum()), n);
    let hp = entropy(t.iter().map(|r| r.iter().sum()), n);
    let homogeneity = if hg == 0.0 {
        1.0
    } else {
        1.0 - conditional_entropy(&table, n) / hg
    };
    let completeness = if hp == 0.0 {
        1.0
    } else {
        1.0 - conditional_entropy(&t, n) / hp
    };
    let v_measure = if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    };
    VMeasure {
        homogeneity,
        completeness,
        v_measure,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairedF {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

pub fn paired_fscore(gold: &Clustering, pred: &Clustering) -> Result<PairedF> {
    let (g, p) = codes(gold, pred)?;
    Ok(paired_fscore_codes(&g, &p))
}

fn pairs(c: u64) -> u64 {
    c * c.saturating_sub(1) / 2
}

fn paired_fscore_codes(g: &[usize], p: &[usize]) -> PairedF {
    let table = contingency(g, p);
    let common: u64 = table.iter().flatten().map(|&c| pairs(c)).sum();
    let gold_pairs: u64 = table.iter().map(|r| pairs(r.iter().sum())).sum();
    let pred_pairs: u64 = transpose(&table).iter().map(|r| pairs(r.iter().sum())).sum();
    let ratio = |a: u64, b: u64| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(common, pred_pairs);
    let recall = ratio(common, gold_pairs);
    let f = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    PairedF { precision, recall, f }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub mapping: Vec<String>,
    pub test: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub splits: Vec<Split>,
    pub fraction: f64,
    pub seed: u64,
}

/// `n_splits` seeded shuffles of `universe`; the first `fraction` of each is
/// the mapping set. With `fraction == 1.0` the test set is the whole
/// universe as well.
pub fn make_splits(universe: &[String], n_splits: usize, fraction: f64, seed: u64) -> Result<SplitPlan> {
    if universe.len() < MIN_SPLIT_UNIVERSE {
        return Err(Error::Domain(format!(
            "cannot split {} instances (need at least {MIN_SPLIT_UNIVERSE})",
            universe.len()
        )));
    }
    if n_splits == 0 {
        return Err(Error::Domain("n_splits must be positive".into()));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Domain(format!("split fraction {fraction} outside (0, 1]")));
    }
    let n = universe.len();
    let splits = (0..n_splits)
        .map(|s| {
            let mut ids = universe.to_vec();
            ids.shuffle(&mut stream_rng(seed, Stream::Splits, s as u64));
            if fraction == 1.0 {
                return Split {
                    mapping: ids.clone(),
                    test: ids,
                };
            }
            let m = ((n as f64 * fraction).round() as usize).clamp(1, n - 1);
            let test = ids.split_off(m);
            Split { mapping: ids, test }
        })
        .collect();
    Ok(SplitPlan {
        splits,
        fraction,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Supervised {
    pub recall: f64,
    pub fscore: f64,
}

/// Cluster → gold sense by majority over `mapping`; ties go to the gold sense
/// more frequent in the whole gold clustering, then to the smaller label.
pub fn majority_mapping<'a>(
    gold: &'a Clustering,
    pred: &Clustering,
    mapping: &[String],
) -> (BTreeMap<String, &'a str>, &'a str) {
    let mut global: HashMap<&str, u64> = HashMap::new();
    for l in &gold.labels {
        *global.entry(l).or_default() += 1;
    }
    let best = |counts: &HashMap<&'a str, u64>| -> &'a str {
        counts
            .iter()
            .max_by(|a, b| {
                a.1.cmp(b.1)
                    .then(global[a.0].cmp(&global[b.0]))
                    .then(b.0.cmp(a.0))
            })
            .map(|(l, _)| *l)
            .unwrap_or("")
    };
    let mut per_cluster: BTreeMap<String, HashMap<&'a str, u64>> = BTreeMap::new();
    let mut overall: HashMap<&'a str, u64> = HashMap::new();
    for id in mapping {
        let g = gold.label(id).unwrap_or_default();
        let p = pred.label(id).unwrap_or_default();
        *per_cluster.entry(p.to_owned()).or_default().entry(g).or_default() += 1;
        *overall.entry(g).or_default() += 1;
    }
    let map = per_cluster.iter().map(|(c, counts)| (c.clone(), best(counts))).collect();
    (map, best(&overall))
}

/// Mean recall and micro-averaged F over the splits of `plan`.
pub fn supervised_eval(gold: &Clustering, pred: &Clustering, plan: &SplitPlan) -> Result<Supervised> {
    codes(gold, pred)?;
    let mut recall = 0.0;
    let mut fscore = 0.0;
    for (i, split) in plan.splits.iter().enumerate() {
        if split.test.is_empty() {
            return Err(Error::EmptyTestSet(i));
        }
        let (map, fallback) = majority_mapping(gold, pred, &split.mapping);
        let mut tp: HashMap<&str, u64> = HashMap::new();
        let mut predicted: HashMap<&str, u64> = HashMap::new();
        let mut actual: HashMap<&str, u64> = HashMap::new();
        for id in &split.test {
            let g = gold
                .label(id)
                .ok_or_else(|| mismatch(vec![format!("missing: {id}")]))?;
            let p = pred.label(id).unwrap_or_default();
            let m = map.get(p).copied().unwrap_or(fallback);
            *predicted.entry(m).or_default() += 1;
            *actual.entry(g).or_default() += 1;
            if m == g {
                *tp.entry(g).or_default() += 1;
            }
        }
        let tp: u64 = tp.values().sum();
        let predicted: u64 = predicted.values().sum();
        let actual: u64 = actual.values().sum();
        let p = tp as f64 / predicted as f64;
        let r = tp as f64 / actual as f64;
        recall += r;
        fscore += if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
    }
    let n = plan.splits.len() as f64;
    Ok(Supervised {
        recall: recall / n,
        fscore: fscore / n,
    })
}

/// Unweighted mean over targets of the labels each target uses.
pub fn avg_clusters(pred_by_target: &BTreeMap<String, Clustering>) -> Result<f64> {
    if pred_by_target.is_empty() {
        return Err(Error::Domain("no targets".into()));
    }
    let total: usize = pred_by_target.values().map(Clustering::distinct_labels).sum();
    Ok(total as f64 / pred_by_target.len() as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Every target counts once.
    #[default]
    Target,
    /// Targets weighted by their instance counts.
    Instance,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalOptions {
    pub n_splits: usize,
    pub fraction: f64,
    pub seed: u64,
    pub weighting: Weighting,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            n_splits: DEFAULT_SPLITS,
            fraction: DEFAULT_FRACTION,
            seed: 1,
            weighting: Weighting::Target,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetScores {
    pub target: String,
    pub instances: usize,
    pub gold_senses: usize,
    pub clusters: usize,
    pub v_measure: VMeasure,
    pub paired: PairedF,
    /// `None` below [`MIN_SPLIT_UNIVERSE`] instances.
    pub supervised: Option<Supervised>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Row {
    pub name: String,
    pub targets: usize,
    pub instances: usize,
    pub v_measure: f64,
    pub homogeneity: f64,
    pub completeness: f64,
    pub paired_precision: f64,
    pub paired_recall: f64,
    pub paired_f: f64,
    pub supervised_recall: f64,
    pub supervised_f: f64,
    pub supervised_targets: usize,
    pub clusters: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub options: EvalOptions,
    pub rows: Vec<Row>,
    pub targets: Vec<TargetScores>,
}

pub fn pos_of(target: &str) -> Option<&str> {
    target.rsplit_once('.').map(|(_, p)| p)
}

fn group_by_target(entries: &[KeyEntry], name: &str) -> Result<BTreeMap<String, Vec<(String, String)>>> {
    let mut seen = HashSet::new();
    let mut out: BTreeMap<String, Vec<(String, String)>> = BTreeMap::new();
    for e in entries {
        if !seen.insert(e.instance.as_str()) {
            return Err(Error::Domain(format!("{name}: instance `{}` listed twice", e.instance)));
        }
        out.entry(e.target.clone())
            .or_default()
            .push((e.instance.clone(), e.label.clone()));
    }
    Ok(out)
}

/// Discrepancies between two key files, including instances filed under a
/// different target.
pub fn key_discrepancies(gold: &[KeyEntry], pred: &[KeyEntry]) -> Vec<String> {
    let g: HashMap<&str, &str> = gold.iter().map(|e| (e.instance.as_str(), e.target.as_str())).collect();
    let p: HashMap<&str, &str> = pred.iter().map(|e| (e.instance.as_str(), e.target.as_str())).collect();
    let mut out = Vec::new();
    for e in gold {
        match p.get(e.instance.as_str()) {
            None => out.push(format!("missing: {}", e.instance)),
            Some(t) if *t != e.target => {
                out.push(format!("target: {} ({} vs {t})", e.instance, e.target))
            }
            _ => {}
        }
    }
    for e in pred {
        if !g.contains_key(e.instance.as_str()) {
            out.push(format!("extra: {}", e.instance));
        }
    }
    out
}

/// Score a predicted key file against a gold key file.
pub fn evaluate(gold: &[KeyEntry], pred: &[KeyEntry], opts: &EvalOptions) -> Result<Report> {
    let gold_t = group_by_target(gold, "gold")?;
    let pred_t = group_by_target(pred, "pred")?;
    let disc = key_discrepancies(gold, pred);
    if !disc.is_empty() {
        return Err(mismatch(disc));
    }
    if gold_t.is_empty() {
        return Err(Error::Domain("empty key file".into()));
    }
    let mut targets = Vec::new();
    for (i, (target, gpairs)) in gold_t.iter().enumerate() {
        let g = Clustering::from_pairs(gpairs.iter().cloned())?;
        let p = Clustering::from_pairs(pred_t[target].iter().cloned())?;
        let (gc, pc) = codes(&g, &p)?;
        let supervised = if g.len() >= MIN_SPLIT_UNIVERSE {
            let plan = make_splits(g.universe(), opts.n_splits, opts.fraction, mix(opts.seed, i as u64))?;
            Some(supervised_eval(&g, &p, &plan)?)
        } else {
            None
        };
        targets.push(TargetScores {
            target: target.clone(),
            instances: g.len(),
            gold_senses: g.distinct_labels(),
            clusters: p.distinct_labels(),
            v_measure: v_measure_codes(&gc, &pc),
            paired: paired_fscore_codes(&gc, &pc),
            supervised,
        });
    }
    let rows = [("All", None), ("Noun", Some("n")), ("Verb", Some("v"))]
        .into_iter()
        .map(|(name, pos)| {
            let members: Vec<&TargetScores> = targets
                .iter()
                .filter(|t| pos.is_none() || pos_of(&t.target) == pos)
                .collect();
            aggregate(name, &members, opts.weighting)
        })
        .collect();
    Ok(Report {
        options: *opts,
        rows,
        targets,
    })
}

fn weighted_mean<I>(items: I) -> f64
where
    I: Iterator<Item = (f64, f64)>,
{
    let (sum, w) = items.fold((0.0, 0.0), |(s, w), (x, wt)| (s + x * wt, w + wt));
    if w == 0.0 {
        0.0
    } else {
        sum / w
    }
}

fn aggregate(name: &str, members: &[&TargetScores], weighting: Weighting) -> Row {
    let w = |t: &TargetScores| match weighting {
        Weighting::Target => 1.0,
        Weighting::Instance => t.instances as f64,
    };
    let mean = |f: &dyn Fn(&TargetScores) -> f64| weighted_mean(members.iter().map(|t| (f(t), w(t))));
    let sup: Vec<(&TargetScores, Supervised)> =
        members.iter().filter_map(|t| t.supervised.map(|s| (*t, s))).collect();
    Row {
        name: name.to_owned(),
        targets: members.len(),
        instances: members.iter().map(|t| t.instances).sum(),
        v_measure: mean(&|t| t.v_measure.v_measure),
        homogeneity: mean(&|t| t.v_measure.homogeneity),
        completeness: mean(&|t| t.v_measure.completeness),
        paired_precision: mean(&|t| t.paired.precision),
        paired_recall: mean(&|t| t.paired.recall),
        paired_f: mean(&|t| t.paired.f),
        supervised_recall: weighted_mean(sup.iter().map(|(t, s)| (s.recall, w(t)))),
        supervised_f: weighted_mean(sup.iter().map(|(t, s)| (s.fscore, w(t)))),
        supervised_targets: sup.len(),
        clusters: weighted_mean(members.iter().map(|t| (t.clusters as f64, w(t)))),
    }
}

fn pct(x: f64) -> f64 {
    100.0 * x
}

impl Report {
    pub fn row(&self, name: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.name == name)
    }

    /// Fixed-width table; metrics in percent.
    pub fn table(&self) -> String {
        let mut s = String::new();
        writeln!(
            s,
            "{:<6} {:>7} {:>7} {:>7} {:>7} {:>7} {:>7} {:>6} {:>8}",
            "", "VM", "PF-P", "PF-R", "PF-F", "SR", "FS", "#CI", "targets"
        )
        .unwrap();
        for r in &self.rows {
            writeln!(
                s,
                "{:<6} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>7.2} {:>6.2} {:>8}",
                r.name,
                pct(r.v_measure),
                pct(r.paired_precision),
                pct(r.paired_recall),
                pct(r.paired_f),
                pct(r.supervised_recall),
                pct(r.supervised_f),
                r.clusters,
                r.targets
            )
            .unwrap();
        }
        s
    }

    /// Machine-readable form with metrics in percent.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                serde_json::json!({
                    "name": r.name,
                    "targets": r.targets,
                    "instances": r.instances,
                    "vm": pct(r.v_measure),
                    "homogeneity": pct(r.homogeneity),
                    "completeness": pct(r.completeness),
                    "pf_precision": pct(r.paired_precision),
                    "pf_recall": pct(r.paired_recall),
                    "pf_f": pct(r.paired_f),
                    "sr": pct(r.supervised_recall),
                    "fs": pct(r.supervised_f),
                    "supervised_targets": r.supervised_targets,
                    "clusters": r.clusters,
                })
            })
            .collect();
        let targets: Vec<serde_json::Value> = self
            .targets
            .iter()
            .map(|t| {
                serde_json::json!({
                    "target": t.target,
                    "instances": t.instances,
                    "gold_senses": t.gold_senses,
                    "clusters": t.clusters,
                    "vm": pct(t.v_measure.v_measure),
                    "pf_f": pct(t.paired.f),
                    "sr": t.supervised.map(|s| pct(s.recall)),
                    "fs": t.supervised.map(|s| pct(s.fscore)),
                })
            })
            .collect();
        serde_json::json!({ "options": self.options, "rows": rows, "targets": targets })
    }
}
