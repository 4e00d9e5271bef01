use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::classes::{band_of, Band, CoarseClass, FineClass, Pcm, ValueScheme};
use super::expert::{ExpertModel, N_TYPES};
use crate::bn::{BayesNet, Evidence, Posterior, Variable};
use crate::error::{Error, Result};

pub const CLASS_VAR: &str = "fineClass";
pub const COARSE_VAR: &str = "coarseClass";

/// Node name of item type `type_id` (1-based).
pub fn type_var(type_id: usize) -> String {
    format!("type{type_id}")
}

/// Prior distribution over the twelve fine classes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ClassPrior([f64; FineClass::COUNT]);

impl ClassPrior {
    pub fn new(probs: [f64; FineClass::COUNT]) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::input("prior contains a negative or non-finite entry"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::input(format!("prior sums to {sum}, not 1")));
        }
        Ok(ClassPrior(probs))
    }

    pub fn uniform() -> Self {
        ClassPrior([1.0 / FineClass::COUNT as f64; FineClass::COUNT])
    }

    pub fn point_mass(class: FineClass) -> Self {
        let mut p = [0.0; FineClass::COUNT];
        p[class.index()] = 1.0;
        ClassPrior(p)
    }

    /// Relative frequencies of per-class counts, with an optional additive
    /// smoothing `epsilon` per class.
    pub fn from_counts(counts: &[u64; FineClass::COUNT], epsilon: f64) -> Result<Self> {
        if epsilon < 0.0 {
            return Err(Error::input("smoothing epsilon must be non-negative"));
        }
        let total = counts.iter().sum::<u64>() as f64 + epsilon * FineClass::COUNT as f64;
        if total <= 0.0 {
            return Err(Error::input("cannot derive priors from zero observations"));
        }
        let mut p = [0.0; FineClass::COUNT];
        for (slot, &c) in p.iter_mut().zip(counts) {
            *slot = (c as f64 + epsilon) / total;
        }
        Ok(ClassPrior(p))
    }

    /// Frequencies of the expert-rule classes in the 2437-student cohort
    /// (row totals of the published comparison grid).
    pub fn table2() -> Self {
        let counts = crate::eval::fixtures::table2_row_totals();
        Self::from_counts(&counts, 0.0).expect("fixture totals are positive")
    }

    pub fn probs(&self) -> &[f64; FineClass::COUNT] {
        &self.0
    }

    pub fn get(&self, class: FineClass) -> f64 {
        self.0[class.index()]
    }

    /// Parses `CLASS:probability` lines (blank lines and `#` comments ignored).
    pub fn parse_document(text: &str) -> Result<Self> {
        let mut p = [0.0; FineClass::COUNT];
        let mut seen = [false; FineClass::COUNT];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, value) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse { row: i + 1, message: "expected CLASS:probability".into() })?;
            let class: FineClass =
                name.parse().map_err(|e: Error| Error::Parse { row: i + 1, message: e.to_string() })?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::Parse { row: i + 1, message: format!("bad probability `{}`", value.trim()) })?;
            if std::mem::replace(&mut seen[class.index()], true) {
                return Err(Error::Parse { row: i + 1, message: format!("{class} listed twice") });
            }
            p[class.index()] = value;
        }
        Self::new(p)
    }

    pub fn to_document(&self) -> String {
        let mut out = String::new();
        for c in FineClass::ALL {
            writeln!(out, "{}:{}", c, self.0[c.index()]).unwrap();
        }
        out
    }
}

impl TryFrom<Vec<f64>> for ClassPrior {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        let arr: [f64; FineClass::COUNT] = v.try_into().map_err(|_| Error::input("prior must have 12 entries"))?;
        ClassPrior::new(arr)
    }
}

impl From<ClassPrior> for Vec<f64> {
    fn from(p: ClassPrior) -> Self {
        p.0.to_vec()
    }
}

/// A student network together with the value scheme of its type nodes.
///
/// Variable layout: `fineClass`, `coarseClass`, then `type1`..`type6`. Count
/// nodes have states `"0"..="N"`; band nodes have `"H"`, `"M"`, `"L"` with
/// `"M"` dropped for types where it cannot occur.
#[derive(Clone, Debug, PartialEq)]
pub struct StudentNet {
    net: BayesNet,
    scheme: ValueScheme,
    item_counts: [usize; N_TYPES],
}

impl StudentNet {
    pub(crate) fn build(model: &ExpertModel, scheme: ValueScheme, pcm: Pcm, priors: &ClassPrior) -> Result<Self> {
        let item_counts = *model.item_counts();
        let mut variables = vec![
            Variable::new(CLASS_VAR, FineClass::ALL.iter().map(|c| c.label())),
            Variable::new(COARSE_VAR, CoarseClass::ALL.iter().map(|c| c.label())),
        ];
        let mut parents = vec![vec![], vec![0]];
        let mut cpts = vec![
            vec![priors.probs().to_vec()],
            FineClass::ALL
                .iter()
                .map(|&f| {
                    let mut row = vec![0.0; CoarseClass::ALL.len()];
                    row[model.coarse_of(f) as usize] = 1.0;
                    row
                })
                .collect(),
        ];
        for t in 1..=N_TYPES {
            variables.push(Variable::new(type_var(t), type_states(scheme, item_counts[t - 1])));
            parents.push(vec![0]);
            let rows = FineClass::ALL
                .iter()
                .map(|&c| match scheme {
                    ValueScheme::Count => model.count_distribution(c, t, pcm),
                    ValueScheme::Band => {
                        let bands = model.band_distribution(c, t, pcm)?;
                        Ok(model.band_states(t)?.iter().map(|b| bands[b.index()]).collect())
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            cpts.push(rows);
        }
        let net = BayesNet::new(variables, parents, cpts)?;
        Ok(StudentNet { net, scheme, item_counts })
    }

    /// Wraps an arbitrary network (for example one with learned CPTs or a
    /// learned structure) whose class and type nodes follow the layout above.
    pub fn from_net(net: BayesNet, scheme: ValueScheme, item_counts: [usize; N_TYPES]) -> Result<Self> {
        let class = net.require(CLASS_VAR)?;
        let class_states: Vec<&str> = FineClass::ALL.iter().map(|c| c.label()).collect();
        if net.variable(class).states != class_states {
            return Err(Error::input("fineClass states do not match the class vocabulary"));
        }
        for t in 1..=N_TYPES {
            let v = net.require(&type_var(t))?;
            if net.variable(v).states != type_states(scheme, item_counts[t - 1]) {
                return Err(Error::input(format!("{} states do not match the {scheme} scheme", type_var(t))));
            }
        }
        Ok(StudentNet { net, scheme, item_counts })
    }

    pub fn net(&self) -> &BayesNet {
        &self.net
    }

    pub fn into_net(self) -> BayesNet {
        self.net
    }

    pub fn scheme(&self) -> ValueScheme {
        self.scheme
    }

    pub fn item_counts(&self) -> &[usize; N_TYPES] {
        &self.item_counts
    }

    /// Current prior of the class node. Only meaningful when `fineClass` is
    /// a root, as in every expert net.
    pub fn class_prior(&self) -> Result<Vec<f64>> {
        Ok(self.net.posterior(&Evidence::new(), CLASS_VAR)?.probs)
    }

    pub fn type_states(&self, type_id: usize) -> Result<&[String]> {
        let v = self.net.require(&type_var(type_id))?;
        Ok(&self.net.variable(v).states)
    }

    /// State label observed when a student scores `count` on `type_id`.
    pub fn observation_label(&self, type_id: usize, count: usize) -> Result<String> {
        if !(1..=N_TYPES).contains(&type_id) {
            return Err(Error::input(format!("unknown item type {type_id}")));
        }
        let n = self.item_counts[type_id - 1];
        Ok(match self.scheme {
            ValueScheme::Count => {
                if count > n {
                    return Err(Error::input(format!("type {type_id} score {count} exceeds {n} items")));
                }
                count.to_string()
            }
            ValueScheme::Band => band_of(count, n)?.label().to_string(),
        })
    }

    /// Evidence on all six type nodes for a score vector.
    pub fn evidence_for(&self, counts: &[usize; N_TYPES]) -> Result<Evidence> {
        (1..=N_TYPES).map(|t| Ok((type_var(t), self.observation_label(t, counts[t - 1])?))).collect()
    }

    pub fn classify(&self, counts: &[usize; N_TYPES]) -> Result<Posterior> {
        self.net.posterior(&self.evidence_for(counts)?, CLASS_VAR)
    }

    /// MAP fine class for a score vector.
    pub fn map_class(&self, counts: &[usize; N_TYPES]) -> Result<FineClass> {
        let p = self.classify(counts)?;
        Ok(FineClass::ALL[p.map_index()])
    }

    pub fn coarse_posterior(&self, evidence: &Evidence) -> Result<Posterior> {
        self.net.posterior(evidence, COARSE_VAR)
    }

    /// Predicts type `target` from the student's other five types.
    pub fn holdout_predict(&self, counts: &[usize; N_TYPES], target: usize) -> Result<Posterior> {
        if !(1..=N_TYPES).contains(&target) {
            return Err(Error::input(format!("unknown item type {target}")));
        }
        self.net.holdout_predict(&self.evidence_for(counts)?, &type_var(target))
    }

    /// Replaces the class prior by its posterior given `evidence`.
    pub fn absorb(&self, evidence: &Evidence) -> Result<StudentNet> {
        Ok(StudentNet {
            net: self.net.absorb_round(CLASS_VAR, evidence)?,
            scheme: self.scheme,
            item_counts: self.item_counts,
        })
    }

    pub fn with_class_prior(&self, prior: &[f64]) -> Result<StudentNet> {
        let v = self.net.require(CLASS_VAR)?;
        if !self.net.parents(v).is_empty() {
            return Err(Error::input("fineClass is not a root in this network"));
        }
        Ok(StudentNet {
            net: self.net.with_cpt(v, vec![prior.to_vec()])?,
            scheme: self.scheme,
            item_counts: self.item_counts,
        })
    }
}

/// State labels of a type node with `n` items under `scheme`.
pub fn type_states(scheme: ValueScheme, n: usize) -> Vec<String> {
    match scheme {
        ValueScheme::Count => (0..=n).map(|k| k.to_string()).collect(),
        ValueScheme::Band => Band::ALL
            .into_iter()
            .filter(|b| (0..=n).any(|k| band_of(k, n).ok() == Some(*b)))
            .map(|b| b.label().to_string())
            .collect(),
    }
}
