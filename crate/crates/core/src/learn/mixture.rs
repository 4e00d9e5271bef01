use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Latent-class model: a hidden class with conditionally independent
/// discrete observations.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    pub weights: Vec<f64>,
    /// `components[class][variable][state]`.
    pub components: Vec<Vec<Vec<f64>>>,
    /// Per-record posterior class membership.
    pub responsibilities: Vec<Vec<f64>>,
    pub loglik: f64,
    /// Log-likelihood after each E step.
    pub trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl MixtureModel {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    /// Free parameters: `(k-1) + k * Σ(states-1)`.
    pub fn parameter_count(&self) -> usize {
        let per_class: usize = self.components[0].iter().map(|d| d.len() - 1).sum();
        self.k() - 1 + self.k() * per_class
    }

    /// Most responsible class per record, or `None` when the largest
    /// responsibility is below `threshold`.
    pub fn assignments(&self, threshold: f64) -> Vec<Option<usize>> {
        self.responsibilities
            .iter()
            .map(|r| {
                let best = crate::bn::argmax(r);
                (r[best] >= threshold).then_some(best)
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub restarts: usize,
    pub unclassified_threshold: f64,
}

impl Default for EmConfig {
    fn default() -> Self {
        EmConfig { max_iters: 500, tol: 1e-6, restarts: 5, unclassified_threshold: 0.5 }
    }
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Distinct rows with multiplicities; EM works on these.
struct Patterns {
    rows: Vec<Vec<usize>>,
    weights: Vec<f64>,
    /// Pattern index of every record.
    of_record: Vec<usize>,
}

impl Patterns {
    fn new(data: &Dataset) -> Self {
        let mut index: HashMap<&[usize], usize> = HashMap::new();
        let mut rows = Vec::new();
        let mut weights = Vec::new();
        let mut of_record = Vec::with_capacity(data.len());
        for row in data.rows() {
            let i = *index.entry(row.as_slice()).or_insert_with(|| {
                rows.push(row.clone());
                weights.push(0.0);
                rows.len() - 1
            });
            weights[i] += 1.0;
            of_record.push(i);
        }
        Patterns { rows, weights, of_record }
    }
}

fn m_step(
    patterns: &Patterns,
    cards: &[usize],
    n: f64,
    resp: &[Vec<f64>],
    prev: Option<&(Vec<f64>, Vec<Vec<Vec<f64>>>)>,
) -> (Vec<f64>, Vec<Vec<Vec<f64>>>) {
    let k = resp[0].len();
    let mut mass = vec![0.0; k];
    let mut comps: Vec<Vec<Vec<f64>>> = (0..k).map(|_| cards.iter().map(|&c| vec![0.0; c]).collect()).collect();
    for ((row, r), &w) in patterns.rows.iter().zip(resp).zip(&patterns.weights) {
        for c in 0..k {
            let m = w * r[c];
            mass[c] += m;
            for (v, &s) in row.iter().enumerate() {
                comps[c][v][s] += m;
            }
        }
    }
    for c in 0..k {
        if mass[c] <= 0.0 {
            // empty class keeps its old distributions, or uniform on the first step
            comps[c] = match prev {
                Some((_, old)) => old[c].clone(),
                None => cards.iter().map(|&s| vec![1.0 / s as f64; s]).collect(),
            };
        } else {
            for dist in &mut comps[c] {
                dist.iter_mut().for_each(|p| *p /= mass[c]);
            }
        }
    }
    (mass.iter().map(|m| m / n).collect(), comps)
}

fn e_step(patterns: &Patterns, weights: &[f64], comps: &[Vec<Vec<f64>>]) -> (Vec<Vec<f64>>, f64) {
    let k = weights.len();
    let log_w: Vec<f64> = weights.iter().map(|w| w.ln()).collect();
    let log_c: Vec<Vec<Vec<f64>>> =
        comps.iter().map(|vars| vars.iter().map(|d| d.iter().map(|p| p.ln()).collect()).collect()).collect();
    let mut loglik = 0.0;
    let mut resp = Vec::with_capacity(patterns.rows.len());
    let mut logs = vec![0.0; k];
    for (row, &w) in patterns.rows.iter().zip(&patterns.weights) {
        for c in 0..k {
            logs[c] = log_w[c] + row.iter().enumerate().map(|(v, &s)| log_c[c][v][s]).sum::<f64>();
        }
        let total = log_sum_exp(&logs);
        loglik += w * total;
        resp.push(logs.iter().map(|l| (l - total).exp()).collect());
    }
    (resp, loglik)
}

/// One EM run from random responsibilities drawn with `seed`.
pub fn em_fit(data: &Dataset, k: usize, seed: u64, max_iters: usize, tol: f64) -> Result<MixtureModel> {
    if k == 0 {
        return Err(Error::input("number of classes must be positive"));
    }
    if k > data.len() {
        return Err(Error::input(format!("{k} classes requested for {} records", data.len())));
    }
    let patterns = Patterns::new(data);
    let cards = data.cardinalities();
    let n = data.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut resp: Vec<Vec<f64>> = (0..patterns.rows.len())
        .map(|_| {
            let draw: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().max(f64::MIN_POSITIVE).ln()).collect();
            let s: f64 = draw.iter().sum();
            draw.into_iter().map(|d| d / s).collect()
        })
        .collect();

    let mut params: Option<(Vec<f64>, Vec<Vec<Vec<f64>>>)> = None;
    let mut trace: Vec<f64> = Vec::new();
    let mut converged = false;
    for _ in 0..max_iters.max(1) {
        let next = m_step(&patterns, &cards, n, &resp, params.as_ref());
        let (r, loglik) = e_step(&patterns, &next.0, &next.1);
        resp = r;
        params = Some(next);
        let done = trace.last().is_some_and(|&prev| (loglik - prev).abs() < tol);
        trace.push(loglik);
        if done {
            converged = true;
            break;
        }
    }
    let (weights, components) = params.expect("at least one iteration");
    Ok(MixtureModel {
        weights,
        components,
        responsibilities: patterns.of_record.iter().map(|&i| resp[i].clone()).collect(),
        loglik: *trace.last().expect("at least one iteration"),
        iterations: trace.len(),
        trace,
        converged,
    })
}

/// Best of `config.restarts` EM runs by log-likelihood.
pub fn em_fit_restarts(data: &Dataset, k: usize, seed: u64, config: &EmConfig) -> Result<MixtureModel> {
    let runs: Vec<MixtureModel> = (0..config.restarts.max(1) as u64)
        .into_par_iter()
        .map(|r| em_fit(data, k, seed.wrapping_add(r.wrapping_mul(0x9E37_79B9)), config.max_iters, config.tol))
        .collect::<Result<_>>()?;
    Ok(runs.into_iter().reduce(|best, m| if m.loglik > best.loglik { m } else { best }).expect("at least one run"))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCountScore {
    pub k: usize,
    pub loglik: f64,
    pub parameters: usize,
    /// `-loglik + parameters/2 * ln N`; lower is better.
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassSelection {
    pub best: MixtureModel,
    pub scores: Vec<ClassCountScore>,
    /// Class per record, `None` for records below the threshold.
    pub assignments: Vec<Option<usize>>,
}

impl ClassSelection {
    pub fn k(&self) -> usize {
        self.best.k()
    }

    pub fn unclassified(&self) -> usize {
        self.assignments.iter().filter(|a| a.is_none()).count()
    }
}

/// Fits every candidate class count and keeps the lowest penalised score.
pub fn select_classes(data: &Dataset, candidates: &[usize], seed: u64, config: &EmConfig) -> Result<ClassSelection> {
    if candidates.is_empty() {
        return Err(Error::input("no candidate class counts"));
    }
    let ln_n = (data.len() as f64).ln();
    let fits: Vec<MixtureModel> = candidates
        .par_iter()
        .map(|&k| em_fit_restarts(data, k, seed.wrapping_add(k as u64 * 1000), config))
        .collect::<Result<_>>()?;
    let mut best: Option<(f64, MixtureModel)> = None;
    let mut scores = Vec::new();
    for (&k, model) in candidates.iter().zip(fits) {
        let parameters = model.parameter_count();
        let score = -model.loglik + parameters as f64 / 2.0 * ln_n;
        log::info!("k={k} loglik={:.3} score={score:.3}", model.loglik);
        scores.push(ClassCountScore { k, loglik: model.loglik, parameters, score });
        if best.as_ref().is_none_or(|(s, _)| score < *s) {
            best = Some((score, model));
        }
    }
    let best = best.expect("non-empty candidates").1;
    let assignments = best.assignments(config.unclassified_threshold);
    Ok(ClassSelection { best, scores, assignments })
}

/// Fraction of records on which `assigned` agrees with `truth` under the
/// best one-to-one relabelling of the clusters. Unassigned records count
/// as disagreements.
pub fn best_permutation_agreement(assigned: &[Option<usize>], truth: &[usize]) -> f64 {
    if assigned.is_empty() {
        return 0.0;
    }
    let k = assigned.iter().flatten().map(|&a| a + 1).max().unwrap_or(0);
    let m = truth.iter().map(|&t| t + 1).max().unwrap_or(0);
    let mut table = vec![vec![0usize; m]; k];
    for (a, &t) in assigned.iter().zip(truth) {
        if let Some(a) = a {
            table[*a][t] += 1;
        }
    }
    // exhaustive search over injective maps; cluster counts are small
    fn search(table: &[Vec<usize>], row: usize, used: &mut Vec<bool>) -> usize {
        if row == table.len() {
            return 0;
        }
        let mut best = search(table, row + 1, used);
        for t in 0..used.len() {
            if !used[t] {
                used[t] = true;
                best = best.max(table[row][t] + search(table, row + 1, used));
                used[t] = false;
            }
        }
        best
    }
    search(&table, 0, &mut vec![false; m]) as f64 / assigned.len() as f64
}

/// Most frequent reference label inside each cluster; ties go to the
/// smallest label index.
pub fn majority_labels(assigned: &[Option<usize>], truth: &[usize], k: usize, n_labels: usize) -> Vec<Option<usize>> {
    let mut table = vec![vec![0usize; n_labels]; k];
    for (a, &t) in assigned.iter().zip(truth) {
        if let Some(a) = a {
            table[*a][t] += 1;
        }
    }
    table
        .iter()
        .map(|row| {
            let best = row.iter().enumerate().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))?;
            (*best.1 > 0).then_some(best.0)
        })
        .collect()
}
