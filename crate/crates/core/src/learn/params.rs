use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::bn::BayesNet;
use crate::error::{Error, Result};

/// Occurrence counts per (variable, parent assignment, state).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    counts: Vec<Vec<Vec<u64>>>,
}

impl CountTable {
    /// Counts `data` against the structure of `net`. Columns are matched by
    /// variable name and must carry identical state lists.
    pub fn collect(net: &BayesNet, data: &Dataset) -> Result<Self> {
        let columns = column_map(net, data)?;
        let mut counts: Vec<Vec<Vec<u64>>> =
            (0..net.len()).map(|v| vec![vec![0; net.cardinality(v)]; net.row_count(v)]).collect();
        let mut buf = Vec::new();
        for row in data.rows() {
            for v in 0..net.len() {
                buf.clear();
                buf.extend(net.parents(v).iter().map(|&p| row[columns[p]]));
                let r = net.row_index(v, &buf);
                counts[v][r][row[columns[v]]] += 1;
            }
        }
        Ok(CountTable { counts })
    }

    pub fn rows(&self, v: usize) -> &[Vec<u64>] {
        &self.counts[v]
    }
}

/// Dataset column of each network variable.
pub(crate) fn column_map(net: &BayesNet, data: &Dataset) -> Result<Vec<usize>> {
    net.variables()
        .iter()
        .map(|var| {
            let c = data.column(&var.name).ok_or_else(|| Error::input(format!("data has no column `{}`", var.name)))?;
            if data.variables()[c].states != var.states {
                return Err(Error::input(format!("state lists of `{}` differ between data and structure", var.name)));
            }
            Ok(c)
        })
        .collect()
}

/// A CPT row with no observations and no pseudocounts, set to uniform.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmptyRowWarning {
    pub variable: String,
    pub row: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearnedNet {
    pub net: BayesNet,
    pub counts: CountTable,
    pub warnings: Vec<EmptyRowWarning>,
}

/// Re-estimates every CPT of `structure` from `data` with Dirichlet
/// pseudocount `alpha`: `(count + alpha) / (row_total + alpha * states)`.
pub fn learn_cpts(structure: &BayesNet, data: &Dataset, alpha: f64) -> Result<LearnedNet> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::input("pseudocount must be a non-negative number"));
    }
    let counts = CountTable::collect(structure, data)?;
    let mut warnings = Vec::new();
    let mut cpts = Vec::with_capacity(structure.len());
    for v in 0..structure.len() {
        let k = structure.cardinality(v) as f64;
        let rows = counts
            .rows(v)
            .iter()
            .enumerate()
            .map(|(r, row)| {
                let total = row.iter().sum::<u64>() as f64 + alpha * k;
                if total == 0.0 {
                    log::warn!("no data for row {r} of `{}`; using uniform", structure.variable(v).name);
                    warnings.push(EmptyRowWarning { variable: structure.variable(v).name.clone(), row: r });
                    vec![1.0 / k; row.len()]
                } else {
                    row.iter().map(|&c| (c as f64 + alpha) / total).collect()
                }
            })
            .collect();
        cpts.push(rows);
    }
    let net = BayesNet::new(structure.variables().to_vec(), structure.all_parents().to_vec(), cpts)?;
    Ok(LearnedNet { net, counts, warnings })
}

/// Penalised log-likelihood of a network on complete data.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructureScore {
    /// Σ over records of ln P(record); `-inf` if some record is impossible.
    pub loglik: f64,
    pub parameters: usize,
    pub records: usize,
    /// `loglik - parameters/2 * ln(records)`.
    pub score: f64,
}

impl StructureScore {
    pub fn new(loglik: f64, parameters: usize, records: usize) -> Self {
        let penalty = if records > 0 { parameters as f64 / 2.0 * (records as f64).ln() } else { 0.0 };
        StructureScore { loglik, parameters, records, score: loglik - penalty }
    }
}

pub fn bic_score(net: &BayesNet, data: &Dataset) -> Result<StructureScore> {
    let columns = column_map(net, data)?;
    let mut loglik = 0.0;
    let mut buf = Vec::new();
    for row in data.rows() {
        for v in 0..net.len() {
            buf.clear();
            buf.extend(net.parents(v).iter().map(|&p| row[columns[p]]));
            loglik += net.prob(v, &buf, row[columns[v]]).ln();
        }
    }
    Ok(StructureScore::new(loglik, net.parameter_count(), data.len()))
}
