//! Test-time sense induction: instance context vectors, nearest-sense
//! labeling, and SemEval key files.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::corpus::{normalize_token, Vocabulary};
use crate::error::{Error, Result};
use crate::vectors::{ContextVector, SenseVector, Similarity, Tables, WordTable};
use crate::WordId;

/// Default English function-word stoplist (127 entries).
pub const DEFAULT_STOPLIST: &str = include_str!("../data/stoplist.txt");

/// Minimum length (exclusive) of a selected context word.
pub const MIN_WORD_LEN: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub id: String,
    /// `lemma.pos`, e.g. `bank.n`.
    pub target: String,
    pub tokens: Vec<String>,
    pub target_position: usize,
}

impl Instance {
    pub fn lemma(&self) -> &str {
        split_target(&self.target).0
    }

    pub fn pos(&self) -> Option<&str> {
        split_target(&self.target).1
    }
}

fn split_target(target: &str) -> (&str, Option<&str>) {
    match target.rsplit_once('.') {
        Some((lemma, pos)) if !lemma.is_empty() && !pos.is_empty() => (lemma, Some(pos)),
        _ => (target, None),
    }
}

fn check_unique(instances: &[Instance], name: &str) -> Result<()> {
    let mut seen = HashSet::new();
    for (i, inst) in instances.iter().enumerate() {
        if !seen.insert(inst.id.as_str()) {
            return Err(Error::parse(name, i + 1, format!("duplicate instance id `{}`", inst.id)));
        }
    }
    Ok(())
}

/// `instance_id<TAB>lemma.pos<TAB>target_index<TAB>token token ...`
pub fn read_tsv<R: BufRead>(reader: R, name: &str) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.splitn(4, '\t').collect();
        if fields.len() != 4 {
            return Err(Error::parse(name, line_no, "expected 4 tab-separated fields"));
        }
        let tokens: Vec<String> = fields[3].split_whitespace().map(str::to_owned).collect();
        let target_position: usize = fields[2]
            .trim()
            .parse()
            .map_err(|_| Error::parse(name, line_no, "bad target index"))?;
        if target_position >= tokens.len() {
            return Err(Error::parse(
                name,
                line_no,
                format!("target index {target_position} outside {} tokens", tokens.len()),
            ));
        }
        out.push(Instance {
            id: fields[0].trim().to_owned(),
            target: fields[1].trim().to_owned(),
            tokens,
            target_position,
        });
    }
    check_unique(&out, name)?;
    Ok(out)
}

pub fn write_tsv<W: Write>(instances: &[Instance], mut out: W) -> Result<()> {
    for inst in instances {
        writeln!(
            out,
            "{}\t{}\t{}\t{}",
            inst.id,
            inst.target,
            inst.target_position,
            inst.tokens.join(" ")
        )?;
    }
    Ok(())
}

/// Senseval-style XML: `<instance id=".." lemma="lemma.pos">.. <head>w</head> ..</instance>`.
///
/// Without a `lemma` attribute the target is the id minus its last dotted
/// component (`cheat.v.12` → `cheat.v`). Without `<head>` the target is the
/// first token starting with the lemma, else token 0.
pub fn read_xml(text: &str, name: &str) -> Result<Vec<Instance>> {
    let instance_re = Regex::new(r#"(?s)<instance\b([^>]*)>(.*?)</instance>"#).unwrap();
    let attr_re = Regex::new(r#"(\w+)\s*=\s*"([^"]*)""#).unwrap();
    let head_re = Regex::new(r#"(?s)<head>(.*?)</head>"#).unwrap();
    let tag_re = Regex::new(r#"<[^>]*>"#).unwrap();
    let mut out = Vec::new();
    for cap in instance_re.captures_iter(text) {
        let line = text[..cap.get(0).unwrap().start()].matches('\n').count() + 1;
        let mut id = None;
        let mut lemma = None;
        for a in attr_re.captures_iter(&cap[1]) {
            match &a[1] {
                "id" => id = Some(a[2].to_owned()),
                "lemma" => lemma = Some(a[2].to_owned()),
                _ => {}
            }
        }
        let id = id.ok_or_else(|| Error::parse(name, line, "instance without id"))?;
        let target = match lemma {
            Some(l) => l,
            None => match id.rsplit_once('.') {
                Some((t, _)) => t.to_owned(),
                None => return Err(Error::parse(name, line, "cannot derive target from id")),
            },
        };
        let body = &cap[2];
        let mut tokens = Vec::new();
        let mut position = None;
        let mut rest = body;
        while let Some(h) = head_re.captures(rest) {
            let m = h.get(0).unwrap();
            tokens.extend(tag_re.replace_all(&rest[..m.start()], " ").split_whitespace().map(str::to_owned));
            if position.is_none() {
                position = Some(tokens.len());
            }
            tokens.extend(tag_re.replace_all(&h[1], " ").split_whitespace().map(str::to_owned));
            rest = &rest[m.end()..];
        }
        tokens.extend(tag_re.replace_all(rest, " ").split_whitespace().map(str::to_owned));
        if tokens.is_empty() {
            return Err(Error::parse(name, line, format!("instance `{id}` has no text")));
        }
        let lemma = split_target(&target).0.to_lowercase();
        let position = position.unwrap_or_else(|| {
            tokens
                .iter()
                .position(|t| normalize_token(t).is_some_and(|n| n.starts_with(&lemma)))
                .unwrap_or(0)
        });
        let target_position = position.min(tokens.len() - 1);
        out.push(Instance {
            id,
            target,
            tokens,
            target_position,
        });
    }
    check_unique(&out, name)?;
    Ok(out)
}

/// Load a dataset; `.xml` files are parsed as XML, anything else as TSV.
pub fn load_dataset(path: &Path) -> Result<Vec<Instance>> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("xml") => read_xml(&text, &name),
        _ => read_tsv(text.as_bytes(), &name),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stoplist {
    words: HashSet<String>,
}

impl Default for Stoplist {
    fn default() -> Self {
        Self::parse(DEFAULT_STOPLIST)
    }
}

impl Stoplist {
    /// One word per line; blank lines and `#` comments ignored.
    pub fn parse(text: &str) -> Self {
        let words = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .filter_map(normalize_token)
            .collect();
        Stoplist { words }
    }

    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Stoplist {
            words: words.into_iter().filter_map(|w| normalize_token(w.as_ref())).collect(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        normalize_token(word).is_some_and(|w| self.words.contains(&w))
    }
}

/// How the three context-word filters combine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Long enough, not the target, and not a stopword.
    #[default]
    Conjunctive,
    /// Any one of the three filters suffices.
    Disjunctive,
}

/// Normalized context words that pass the selection filters.
pub fn select_context_words(instance: &Instance, stoplist: &Stoplist, selection: Selection) -> Vec<String> {
    let target = instance.lemma().to_lowercase();
    instance
        .tokens
        .iter()
        .filter_map(|t| normalize_token(t))
        .filter(|t| {
            let long = t.chars().count() > MIN_WORD_LEN;
            let not_target = *t != target;
            let not_stop = !stoplist.words.contains(t);
            match selection {
                Selection::Conjunctive => long && not_target && not_stop,
                Selection::Disjunctive => long || not_target || not_stop,
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct TestContext {
    pub vector: ContextVector,
    pub oov: usize,
}

pub fn context_vec_test(
    instance: &Instance,
    vocab: &Vocabulary,
    words: &WordTable,
    stoplist: &Stoplist,
    selection: Selection,
) -> TestContext {
    let selected = select_context_words(instance, stoplist, selection);
    let ids: Vec<WordId> = selected.iter().filter_map(|w| vocab.id(w)).collect();
    TestContext {
        oov: selected.len() - ids.len(),
        vector: ContextVector::mean(words.dim(), ids.iter().map(|&id| words.vector(id))),
    }
}

/// Vocabulary id of an instance's target: `lemma.pos` first, then the bare lemma.
pub fn lookup_target(instance: &Instance, vocab: &Vocabulary) -> Option<WordId> {
    let full = instance.target.to_lowercase();
    vocab.id(&full).or_else(|| vocab.id(&instance.lemma().to_lowercase()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LabelOptions {
    pub selection: Selection,
    pub label_with: SenseVector,
    pub similarity: Similarity,
}

impl Default for LabelOptions {
    fn default() -> Self {
        LabelOptions {
            selection: Selection::Conjunctive,
            label_with: SenseVector::Embedding,
            similarity: Similarity::Cosine,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Labeled {
    pub instance_id: String,
    pub target: String,
    /// 0-based sense index.
    pub sense: usize,
    pub similarity: f32,
    pub support: usize,
    pub oov: usize,
    pub unknown_target: bool,
}

impl Labeled {
    pub fn zero_support(&self) -> bool {
        self.support == 0
    }

    pub fn key_entry(&self) -> KeyEntry {
        KeyEntry::new(&self.target, &self.instance_id, self.sense)
    }
}

/// Nearest sense of the instance's target word.
///
/// Zero-support contexts and unknown targets fall back to sense 1 with
/// similarity 0; the outcome carries the corresponding flag.
pub fn label_instance(
    instance: &Instance,
    tables: &Tables,
    stoplist: &Stoplist,
    opts: &LabelOptions,
) -> Labeled {
    let ctx = context_vec_test(instance, &tables.vocab, &tables.words, stoplist, opts.selection);
    let mut out = Labeled {
        instance_id: instance.id.clone(),
        target: instance.target.clone(),
        sense: 0,
        similarity: 0.0,
        support: ctx.vector.support,
        oov: ctx.oov,
        unknown_target: false,
    };
    let Some(word) = lookup_target(instance, &tables.vocab) else {
        out.unknown_target = true;
        return out;
    };
    if ctx.vector.support == 0 {
        return out;
    }
    let (sense, sim) = crate::induction::argmax_sense(
        tables.senses.senses(word),
        &ctx.vector.values,
        opts.label_with,
        opts.similarity,
    );
    out.sense = sense;
    out.similarity = sim;
    out
}

/// Like [`label_instance`], but an unknown target is an error.
pub fn label_instance_strict(
    instance: &Instance,
    tables: &Tables,
    stoplist: &Stoplist,
    opts: &LabelOptions,
) -> Result<Labeled> {
    let l = label_instance(instance, tables, stoplist, opts);
    if l.unknown_target {
        Err(Error::UnknownTarget(instance.target.clone()))
    } else {
        Ok(l)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct LabelSummary {
    pub instances: usize,
    pub oov_context_words: usize,
    pub zero_support: usize,
    pub unknown_targets: Vec<String>,
    /// Distinct senses used per target.
    pub senses_used: BTreeMap<String, usize>,
}

impl LabelSummary {
    pub fn from_labels(labels: &[Labeled]) -> Self {
        let mut used: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
        let mut unknown = BTreeSet::new();
        let mut s = LabelSummary {
            instances: labels.len(),
            ..Default::default()
        };
        for l in labels {
            s.oov_context_words += l.oov;
            s.zero_support += l.zero_support() as usize;
            if l.unknown_target {
                unknown.insert(l.target.clone());
            }
            used.entry(l.target.clone()).or_default().insert(l.sense);
        }
        s.unknown_targets = unknown.into_iter().collect();
        s.senses_used = used.into_iter().map(|(t, set)| (t, set.len())).collect();
        s
    }
}

/// Label instances in input order.
pub fn label_dataset(
    instances: &[Instance],
    tables: &Tables,
    stoplist: &Stoplist,
    opts: &LabelOptions,
) -> Vec<Labeled> {
    instances
        .iter()
        .map(|i| label_instance(i, tables, stoplist, opts))
        .collect()
}

/// One key-file line: `lemma.pos instance_id label`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KeyEntry {
    pub target: String,
    pub instance: String,
    pub label: String,
}

impl KeyEntry {
    /// Entry for 0-based `sense`, written as `lemma.pos.s{sense+1}`.
    pub fn new(target: &str, instance: &str, sense: usize) -> Self {
        KeyEntry {
            target: target.to_owned(),
            instance: instance.to_owned(),
            label: format!("{target}.s{}", sense + 1),
        }
    }
}

pub fn write_key<W: Write>(entries: &[KeyEntry], mut out: W) -> Result<()> {
    for e in entries {
        writeln!(out, "{} {} {}", e.target, e.instance, e.label)?;
    }
    Ok(())
}

pub fn key_bytes(entries: &[KeyEntry]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_key(entries, &mut buf).expect("in-memory write");
    buf
}

/// Parse a key file. Lines with several labels keep the first; a
/// `label/weight` suffix is dropped.
pub fn read_key<R: BufRead>(reader: R, name: &str) -> Result<Vec<KeyEntry>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            [] => continue,
            [target, instance, label, ..] => {
                let label = label.split('/').next().unwrap_or(label);
                out.push(KeyEntry {
                    target: (*target).to_owned(),
                    instance: (*instance).to_owned(),
                    label: label.to_owned(),
                });
            }
            _ => return Err(Error::parse(name, i + 1, "expected `target instance label`")),
        }
    }
    Ok(out)
}

pub fn load_key(path: &Path) -> Result<Vec<KeyEntry>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_key(text.as_bytes(), &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::build_vocab;
    use crate::vectors::{Matrix, Sense, SenseTable};

    fn inst(target: &str, text: &str) -> Instance {
        Instance {
            id: "i1".into(),
            target: target.into(),
            tokens: text.split_whitespace().map(str::to_owned).collect(),
            target_position: 0,
        }
    }

    #[test]
    fn stoplist_has_127_words() {
        assert_eq!(Stoplist::default().len(), 127);
        assert!(Stoplist::default().contains("The"));
    }

    #[test]
    fn selection_examples() {
        let stop = Stoplist::from_words(["the", "of"]);
        let i = inst("bank.n", "the bank river of");
        assert_eq!(select_context_words(&i, &stop, Selection::Conjunctive), ["river"]);
        let short = inst("bank.n", "a an of to");
        assert!(select_context_words(&short, &stop, Selection::Conjunctive).is_empty());
        let t = inst("banks.n", "banks river");
        assert_eq!(select_context_words(&t, &stop, Selection::Conjunctive), ["river"]);
        let d = select_context_words(&i, &stop, Selection::Disjunctive);
        assert_eq!(d, ["the", "bank", "river", "of"]);
    }

    fn tables() -> Tables {
        let vocab = build_vocab(["bank", "bank", "bank", "river", "river", "money"], 1).unwrap();
        let input = Matrix::from_vec(3, 2, vec![0.5, 0.5, 0.0, 1.0, 1.0, 0.0]).unwrap();
        let words = WordTable {
            input,
            output: Matrix::zeros(3, 2),
        };
        let senses = vec![
            vec![
                Sense::new(vec![1.0, 0.1], vec![0.0; 2]),
                Sense::new(vec![0.1, 1.0], vec![0.0; 2]),
            ],
            vec![Sense::new(vec![0.0, 1.0], vec![0.0; 2])],
            vec![Sense::new(vec![1.0, 0.0], vec![0.0; 2])],
        ];
        Tables {
            vocab,
            words,
            senses: SenseTable::from_parts(2, senses, vec![true, false, false]).unwrap(),
        }
    }

    #[test]
    fn oov_words_are_skipped_and_counted() {
        let t = tables();
        let i = inst("bank.n", "bank river zzzzz");
        let ctx = context_vec_test(&i, &t.vocab, &t.words, &Stoplist::default(), Selection::Conjunctive);
        assert_eq!(ctx.vector.support, 1);
        assert_eq!(ctx.oov, 1);
        assert_eq!(ctx.vector.values, vec![0.0, 1.0]);
    }

    #[test]
    fn labels_collinear_sense() {
        let t = tables();
        let l = label_instance(&inst("bank.n", "bank river"), &t, &Stoplist::default(), &LabelOptions::default());
        assert_eq!(l.sense, 1);
        assert!(!l.unknown_target && !l.zero_support());
        let l = label_instance(&inst("bank.n", "bank money"), &t, &Stoplist::default(), &LabelOptions::default());
        assert_eq!(l.sense, 0);
    }

    #[test]
    fn fallbacks_are_flagged() {
        let t = tables();
        let z = label_instance(&inst("bank.n", "bank of the"), &t, &Stoplist::default(), &LabelOptions::default());
        assert_eq!((z.sense, z.similarity), (0, 0.0));
        assert!(z.zero_support());
        let u = label_instance(&inst("castle.n", "river money"), &t, &Stoplist::default(), &LabelOptions::default());
        assert!(u.unknown_target);
        assert_eq!(u.sense, 0);
        assert!(label_instance_strict(&inst("castle.n", "river"), &t, &Stoplist::default(), &LabelOptions::default()).is_err());
    }

    #[test]
    fn tsv_parsing_and_validation() {
        let good = "a.1\tbank.n\t1\tthe bank of the river\n\nb.2\tbank.n\t0\tbank loans\n";
        let v = read_tsv(good.as_bytes(), "t").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].lemma(), "bank");
        assert_eq!(v[0].pos(), Some("n"));
        assert!(read_tsv("a\tbank.n\t9\tx y\n".as_bytes(), "t").is_err());
        assert!(read_tsv("a\tbank.n\t0\tx\na\tbank.n\t0\ty\n".as_bytes(), "t").is_err());
        let mut buf = Vec::new();
        write_tsv(&v, &mut buf).unwrap();
        assert_eq!(read_tsv(&buf[..], "t").unwrap(), v);
    }

    #[test]
    fn xml_parsing() {
        let xml = r#"<corpus>
<instance id="bank.n.1" lemma="bank.n">Money in the <head>bank</head> vault.</instance>
<instance id="bank.n.2">The river bank flooded.</instance>
</corpus>"#;
        let v = read_xml(xml, "x").unwrap();
        assert_eq!(v[0].target, "bank.n");
        assert_eq!(v[0].tokens[v[0].target_position], "bank");
        assert_eq!(v[1].target, "bank.n");
        assert_eq!(v[1].target_position, 2);
    }

    #[test]
    fn key_format() {
        let e = vec![KeyEntry::new("bank.n", "bank.n.1", 1), KeyEntry::new("bank.n", "bank.n.2", 0)];
        let bytes = key_bytes(&e);
        assert_eq!(String::from_utf8(bytes.clone()).unwrap(), "bank.n bank.n.1 bank.n.s2\nbank.n bank.n.2 bank.n.s1\n");
        assert_eq!(read_key(&bytes[..], "k").unwrap(), e);
        let gold = read_key("bank.n bank.n.1 bank.n.3/0.7 bank.n.1/0.3\n".as_bytes(), "k").unwrap();
        assert_eq!(gold[0].label, "bank.n.3");
        assert!(key_bytes(&[]).is_empty());
    }
}
