//! Response records, per-type aggregation, priors, train/test splits and
//! synthetic cohorts.
//!
//! All randomness comes from ChaCha8 (`rand_chacha::ChaCha8Rng`) seeded with
//! `seed_from_u64`, owned by the call that uses it.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ClassPrior, ExpertModel, FineClass, Pcm, N_TYPES};

/// Items in the decimal comparison test.
pub const N_ITEMS: usize = 24;

/// One student's test: correctness of each of the 24 items.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DctRecord {
    pub student_id: String,
    pub answers: Vec<bool>,
    pub expert_label: Option<FineClass>,
}

/// Which item type each test item belongs to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ItemMap(Vec<usize>);

impl ItemMap {
    /// Items numbered consecutively by type: the first `counts[0]` items are
    /// type 1, the next `counts[1]` type 2, and so on.
    pub fn contiguous(item_counts: &[usize; N_TYPES]) -> Self {
        ItemMap(item_counts.iter().enumerate().flat_map(|(t, &n)| std::iter::repeat_n(t + 1, n)).collect())
    }

    pub fn new(types: Vec<usize>, item_counts: &[usize; N_TYPES]) -> Result<Self> {
        let mut per_type = [0usize; N_TYPES];
        for &t in &types {
            if !(1..=N_TYPES).contains(&t) {
                return Err(Error::input(format!("item map refers to unknown type {t}")));
            }
            per_type[t - 1] += 1;
        }
        if &per_type != item_counts {
            return Err(Error::input(format!(
                "item map gives per-type counts {per_type:?}, roster expects {item_counts:?}"
            )));
        }
        Ok(ItemMap(types))
    }

    /// Parses a list of type ids separated by commas or whitespace.
    pub fn parse(text: &str, item_counts: &[usize; N_TYPES]) -> Result<Self> {
        let types = text
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<usize>().map_err(|_| Error::input(format!("bad type id `{s}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(types, item_counts)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn type_of(&self, item: usize) -> usize {
        self.0[item]
    }
}

/// A student's correct-count per item type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeScores {
    pub student_id: String,
    pub counts: [usize; N_TYPES],
    pub label: Option<FineClass>,
}

impl TypeScores {
    pub fn new(student_id: impl Into<String>, counts: [usize; N_TYPES]) -> Self {
        TypeScores { student_id: student_id.into(), counts, label: None }
    }

    /// Digits form, e.g. `541233`.
    pub fn digits(&self) -> String {
        self.counts.iter().map(|c| c.to_string()).collect()
    }
}

pub fn aggregate(record: &DctRecord, map: &ItemMap) -> TypeScores {
    let mut counts = [0; N_TYPES];
    for (i, &correct) in record.answers.iter().enumerate() {
        if correct {
            counts[map.type_of(i) - 1] += 1;
        }
    }
    TypeScores { student_id: record.student_id.clone(), counts, label: record.expert_label }
}

fn dct_header(labelled: bool) -> Vec<String> {
    let mut h = vec!["student_id".to_string()];
    h.extend((1..=N_ITEMS).map(|i| format!("i{i:02}")));
    if labelled {
        h.push("expert_class".into());
    }
    h
}

fn parse_label(cell: &str, row: usize) -> Result<Option<FineClass>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    cell.parse().map(Some).map_err(|e: Error| Error::Parse { row, message: e.to_string() })
}

/// Parses `student_id,i01..i24[,expert_class]` rows of 0/1 flags.
/// Reported row numbers are file line numbers (the header is line 1).
pub fn parse_dct(text: &str) -> Result<Vec<DctRecord>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let labelled = match header.len() {
        n if n == N_ITEMS + 1 => false,
        n if n == N_ITEMS + 2 => true,
        n => {
            return Err(Error::Parse {
                row: 1,
                message: format!("header has {n} columns, expected {} or {}", N_ITEMS + 1, N_ITEMS + 2),
            })
        }
    };
    if header != dct_header(labelled) {
        return Err(Error::Parse { row: 1, message: "header must be student_id,i01..i24[,expert_class]".into() });
    }
    let mut records = Vec::new();
    for result in reader.records() {
        let rec = result?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != header.len() {
            return Err(Error::Parse {
                row,
                message: format!("row has {} columns, expected {}", rec.len(), header.len()),
            });
        }
        let answers = (1..=N_ITEMS)
            .map(|i| match &rec[i] {
                "0" => Ok(false),
                "1" => Ok(true),
                other => Err(Error::Parse { row, message: format!("item i{i:02} flag `{other}` is not 0 or 1") }),
            })
            .collect::<Result<Vec<_>>>()?;
        let expert_label = if labelled { parse_label(&rec[N_ITEMS + 1], row)? } else { None };
        records.push(DctRecord { student_id: rec[0].to_string(), answers, expert_label });
    }
    Ok(records)
}

pub fn write_dct(records: &[DctRecord]) -> Result<String> {
    let labelled = records.iter().any(|r| r.expert_label.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(dct_header(labelled))?;
    for r in records {
        let mut row = vec![r.student_id.clone()];
        row.extend(r.answers.iter().map(|&a| if a { "1" } else { "0" }.to_string()));
        if labelled {
            row.push(r.expert_label.map(|c| c.to_string()).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::input(e.to_string()))?).expect("csv output is utf-8"))
}

/// Parses `student_id,t1..t6[,label]` rows.
pub fn parse_scores(text: &str) -> Result<Vec<TypeScores>> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let labelled = header.len() == N_TYPES + 2;
    let expected: Vec<String> =
        std::iter::once("student_id".to_string()).chain((1..=N_TYPES).map(|t| format!("t{t}"))).collect();
    if !(header.len() == N_TYPES + 1 || labelled) || header[..=N_TYPES] != expected[..] {
        return Err(Error::Parse { row: 1, message: "header must be student_id,t1..t6[,label]".into() });
    }
    let mut out = Vec::new();
    for result in reader.records() {
        let rec = result?;
        let row = rec.position().map_or(0, |p| p.line() as usize);
        if rec.len() != header.len() {
            return Err(Error::Parse {
                row,
                message: format!("row has {} columns, expected {}", rec.len(), header.len()),
            });
        }
        let mut counts = [0; N_TYPES];
        for t in 0..N_TYPES {
            counts[t] = rec[t + 1].parse().map_err(|_| Error::Parse {
                row,
                message: format!("t{} value `{}` is not a count", t + 1, &rec[t + 1]),
            })?;
        }
        let label = if labelled { parse_label(&rec[N_TYPES + 1], row)? } else { None };
        out.push(TypeScores { student_id: rec[0].to_string(), counts, label });
    }
    Ok(out)
}

pub fn write_scores(scores: &[TypeScores]) -> Result<String> {
    let labelled = scores.iter().any(|s| s.label.is_some());
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["student_id".to_string()];
    header.extend((1..=N_TYPES).map(|t| format!("t{t}")));
    if labelled {
        header.push("label".into());
    }
    w.write_record(&header)?;
    for s in scores {
        let mut row = vec![s.student_id.clone()];
        row.extend(s.counts.iter().map(|c| c.to_string()));
        if labelled {
            row.push(s.label.map(|c| c.to_string()).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner().map_err(|e| Error::input(e.to_string()))?).expect("csv output is utf-8"))
}

/// Relative class frequencies, optionally smoothed by `epsilon` per class.
pub fn empirical_priors(labels: &[FineClass], epsilon: f64) -> Result<ClassPrior> {
    if labels.is_empty() {
        return Err(Error::input("cannot derive priors from an empty label list"));
    }
    let mut counts = [0u64; FineClass::COUNT];
    for l in labels {
        counts[l.index()] += 1;
    }
    ClassPrior::from_counts(&counts, epsilon)
}

/// Random train/test splits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub k: usize,
    pub test_fraction: f64,
}

impl Default for SplitPlan {
    /// Five 80/20 splits.
    fn default() -> Self {
        SplitPlan { seed: 0, k: 5, test_fraction: 0.2 }
    }
}

/// Indices of one train/test partition, each sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

impl Split {
    pub fn select<'a, T>(&self, data: &'a [T]) -> (Vec<&'a T>, Vec<&'a T>) {
        (self.train.iter().map(|&i| &data[i]).collect(), self.test.iter().map(|&i| &data[i]).collect())
    }
}

/// `plan.k` independent random partitions of `0..n`, each with
/// `round(test_fraction * n)` test indices.
pub fn make_splits(n: usize, plan: &SplitPlan) -> Result<Vec<Split>> {
    if n == 0 {
        return Err(Error::input("cannot split an empty dataset"));
    }
    if plan.k == 0 || !(plan.test_fraction > 0.0 && plan.test_fraction < 1.0) {
        return Err(Error::input("split plan needs k >= 1 and 0 < test_fraction < 1"));
    }
    let test_size = (plan.test_fraction * n as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    Ok((0..plan.k)
        .map(|_| {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            let mut test = idx[..test_size].to_vec();
            let mut train = idx[test_size..].to_vec();
            test.sort_unstable();
            train.sort_unstable();
            Split { train, test }
        })
        .collect())
}

/// A synthetic student and the class that generated it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulatedStudent {
    pub record: DctRecord,
    pub class: FineClass,
}

/// Draws a class from a distribution by inverse CDF.
pub(crate) fn sample_index(probs: &[f64], rng: &mut impl Rng) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last_positive = i;
        }
        cum += p;
        if u < cum {
            return i;
        }
    }
    last_positive
}

/// Simulates a cohort from the expert model: each student's class is drawn
/// from `priors`, then each item is answered correctly with the class's
/// per-item success probability for that item's type.
pub fn simulate_cohort(
    model: &ExpertModel,
    priors: &ClassPrior,
    pcm: Pcm,
    n: usize,
    seed: u64,
    map: &ItemMap,
) -> Result<Vec<SimulatedStudent>> {
    if n == 0 {
        return Err(Error::input("cohort size must be at least 1"));
    }
    let mut success = [[0.0; N_TYPES]; FineClass::COUNT];
    for c in FineClass::ALL {
        for t in 1..=N_TYPES {
            success[c.index()][t - 1] = model.correct_prob(c, t, pcm)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let width = n.to_string().len().max(4);
    Ok((0..n)
        .map(|i| {
            let class = FineClass::ALL[sample_index(priors.probs(), &mut rng)];
            let answers =
                (0..map.len()).map(|item| rng.gen::<f64>() < success[class.index()][map.type_of(item) - 1]).collect();
            SimulatedStudent {
                record: DctRecord { student_id: format!("s{:0width$}", i + 1), answers, expert_label: None },
                class,
            }
        })
        .collect())
}
