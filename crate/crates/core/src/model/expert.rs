use serde::{Deserialize, Serialize};

use super::classes::{band_of, Band, CoarseClass, Expectation, FineClass, Pcm, ValueScheme};
use super::student::{ClassPrior, StudentNet};
use crate::error::{Error, Result};

/// Number of item types in the test.
pub const N_TYPES: usize = 6;

const TABLE1_TOML: &str = include_str!("../../data/table1.toml");

/// The expert expectation table together with the item roster and the
/// fine-to-coarse mapping. Everything the student network is generated from.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpertModel {
    patterns: [[Expectation; N_TYPES]; FineClass::COUNT],
    item_counts: [usize; N_TYPES],
    coarse: [CoarseClass; FineClass::COUNT],
}

impl Default for ExpertModel {
    fn default() -> Self {
        Self::table1()
    }
}

#[derive(Serialize, Deserialize)]
struct ConfigDocument {
    item_counts: Vec<usize>,
    classes: Vec<ClassEntry>,
}

#[derive(Serialize, Deserialize)]
struct ClassEntry {
    name: String,
    pattern: String,
    coarse: String,
}

impl ExpertModel {
    /// The compiled-in decimal-comparison table.
    pub fn table1() -> Self {
        Self::from_toml(TABLE1_TOML).expect("bundled table1.toml is valid")
    }

    /// Source text of the bundled default configuration.
    pub fn table1_toml() -> &'static str {
        TABLE1_TOML
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let doc: ConfigDocument = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if doc.item_counts.len() != N_TYPES {
            return Err(Error::Config(format!(
                "item_counts must list {N_TYPES} types, found {}",
                doc.item_counts.len()
            )));
        }
        if doc.item_counts.contains(&0) {
            return Err(Error::Config("every item type needs at least one item".into()));
        }
        let mut patterns = [[Expectation::Unknown; N_TYPES]; FineClass::COUNT];
        let mut coarse = [CoarseClass::Un; FineClass::COUNT];
        let mut seen = [false; FineClass::COUNT];
        for entry in &doc.classes {
            let class: FineClass = entry.name.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
            if std::mem::replace(&mut seen[class.index()], true) {
                return Err(Error::Config(format!("class {class} listed twice")));
            }
            let symbols: Vec<Expectation> = entry
                .pattern
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| {
                    Expectation::from_symbol(c)
                        .ok_or_else(|| Error::Config(format!("class {class}: bad pattern symbol `{c}`")))
                })
                .collect::<Result<_>>()?;
            if symbols.len() != N_TYPES {
                return Err(Error::Config(format!(
                    "class {class}: pattern has {} entries, expected {N_TYPES}",
                    symbols.len()
                )));
            }
            patterns[class.index()].copy_from_slice(&symbols);
            coarse[class.index()] = entry.coarse.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        }
        if let Some(missing) = FineClass::ALL.iter().find(|c| !seen[c.index()]) {
            return Err(Error::Config(format!("class {missing} missing from table")));
        }
        let mut item_counts = [0; N_TYPES];
        item_counts.copy_from_slice(&doc.item_counts);
        Ok(ExpertModel { patterns, item_counts, coarse })
    }

    pub fn to_toml(&self) -> String {
        let doc = ConfigDocument {
            item_counts: self.item_counts.to_vec(),
            classes: FineClass::ALL
                .iter()
                .map(|&c| ClassEntry {
                    name: c.label().to_string(),
                    pattern: self.patterns[c.index()]
                        .iter()
                        .map(|e| e.symbol().to_string())
                        .collect::<Vec<_>>()
                        .join(" "),
                    coarse: self.coarse[c.index()].label().to_string(),
                })
                .collect(),
        };
        toml::to_string(&doc).expect("config serializes")
    }

    /// Overrides the coarse group of one class.
    pub fn with_coarse(mut self, class: FineClass, group: CoarseClass) -> Self {
        self.coarse[class.index()] = group;
        self
    }

    pub fn item_counts(&self) -> &[usize; N_TYPES] {
        &self.item_counts
    }

    pub fn total_items(&self) -> usize {
        self.item_counts.iter().sum()
    }

    pub fn item_count(&self, type_id: usize) -> Result<usize> {
        check_type(type_id)?;
        Ok(self.item_counts[type_id - 1])
    }

    pub fn pattern(&self, class: FineClass) -> &[Expectation; N_TYPES] {
        &self.patterns[class.index()]
    }

    pub fn expectation_of(&self, class: FineClass, type_id: usize) -> Result<Expectation> {
        check_type(type_id)?;
        Ok(self.patterns[class.index()][type_id - 1])
    }

    /// Per-item probability of a correct answer. Careless slips are symmetric:
    /// a High-expected item is missed with probability `pcm` and a
    /// Low-expected one is answered correctly with probability `pcm`.
    pub fn correct_prob(&self, class: FineClass, type_id: usize, pcm: Pcm) -> Result<f64> {
        Ok(match self.expectation_of(class, type_id)? {
            Expectation::High => 1.0 - pcm.value(),
            Expectation::Low => pcm.value(),
            Expectation::Unknown => 0.5,
        })
    }

    /// Binomial distribution of the correct-count, indexed by count `0..=N`.
    pub fn count_distribution(&self, class: FineClass, type_id: usize, pcm: Pcm) -> Result<Vec<f64>> {
        let p = self.correct_prob(class, type_id, pcm)?;
        Ok(binomial_pmf(self.item_count(type_id)?, p))
    }

    /// Count distribution accumulated per band, as `[High, Medium, Low]`.
    pub fn band_distribution(&self, class: FineClass, type_id: usize, pcm: Pcm) -> Result<[f64; 3]> {
        let n = self.item_count(type_id)?;
        let counts = self.count_distribution(class, type_id, pcm)?;
        let mut bands = [0.0; 3];
        for (k, p) in counts.into_iter().enumerate() {
            bands[band_of(k, n)?.index()] += p;
        }
        Ok(bands)
    }

    /// Bands reachable for a type, in H, M, L order.
    pub fn band_states(&self, type_id: usize) -> Result<Vec<Band>> {
        let n = self.item_count(type_id)?;
        Ok(Band::ALL.into_iter().filter(|b| (0..=n).any(|k| band_of(k, n).ok() == Some(*b))).collect())
    }

    pub fn coarse_of(&self, fine: FineClass) -> CoarseClass {
        self.coarse[fine.index()]
    }

    pub fn check_scores(&self, counts: &[usize; N_TYPES]) -> Result<()> {
        for (t, (&c, &n)) in counts.iter().zip(&self.item_counts).enumerate() {
            if c > n {
                return Err(Error::input(format!("type {} score {c} exceeds {n} items", t + 1)));
            }
        }
        Ok(())
    }

    pub fn band_pattern(&self, counts: &[usize; N_TYPES]) -> Result<[Band; N_TYPES]> {
        self.check_scores(counts)?;
        let mut bands = [Band::Low; N_TYPES];
        for t in 0..N_TYPES {
            bands[t] = band_of(counts[t], self.item_counts[t])?;
        }
        Ok(bands)
    }

    /// Renders a score vector in banded form, e.g. `541233` → `HHLMHH`.
    pub fn band_string(&self, counts: &[usize; N_TYPES]) -> Result<String> {
        Ok(self.band_pattern(counts)?.iter().map(|b| b.symbol()).collect())
    }

    /// The experts' rule classification.
    ///
    /// Fully specified rows are tried first, in canonical order; a row matches
    /// when every H/L entry equals the student's band exactly, so a Medium
    /// band on a constrained type matches nothing. Failing that, the
    /// partially specified rows are tried on their specified entries (types 1
    /// and 2 for the default table). Anything left is UN.
    pub fn expert_classify(&self, counts: &[usize; N_TYPES]) -> Result<FineClass> {
        let bands = self.band_pattern(counts)?;
        let matches = |class: &FineClass| {
            self.patterns[class.index()].iter().zip(&bands).all(|(e, b)| match e {
                Expectation::High => *b == Band::High,
                Expectation::Low => *b == Band::Low,
                Expectation::Unknown => true,
            })
        };
        let unknowns =
            |class: &FineClass| self.patterns[class.index()].iter().filter(|e| **e == Expectation::Unknown).count();
        let tier1 = FineClass::ALL.iter().filter(|c| unknowns(c) == 0);
        let tier2 = FineClass::ALL.iter().filter(|c| (1..N_TYPES).contains(&unknowns(c)));
        Ok(tier1.chain(tier2).find(|c| matches(c)).copied().unwrap_or(FineClass::Un))
    }

    /// Generates the expert-elicited student network.
    pub fn build_student_net(&self, scheme: ValueScheme, pcm: Pcm, priors: &ClassPrior) -> Result<StudentNet> {
        StudentNet::build(self, scheme, pcm, priors)
    }
}

fn check_type(type_id: usize) -> Result<()> {
    if (1..=N_TYPES).contains(&type_id) {
        Ok(())
    } else {
        Err(Error::input(format!("unknown item type {type_id}")))
    }
}

/// `P(k) = C(n, k) p^k (1-p)^(n-k)` for `k = 0..=n`.
pub fn binomial_pmf(n: usize, p: f64) -> Vec<f64> {
    let mut coeff = 1.0;
    (0..=n)
        .map(|k| {
            if k > 0 {
                coeff = coeff * (n - k + 1) as f64 / k as f64;
            }
            coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
        })
        .collect()
}
