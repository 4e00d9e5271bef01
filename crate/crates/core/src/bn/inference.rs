use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::factor::Factor;
use super::net::BayesNet;
use crate::error::{Error, Result};

/// Observed states, keyed by variable name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Evidence(BTreeMap<String, String>);

impl Evidence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, variable: impl Into<String>, state: impl Into<String>) -> Self {
        self.insert(variable, state);
        self
    }

    pub fn insert(&mut self, variable: impl Into<String>, state: impl Into<String>) {
        self.0.insert(variable.into(), state.into());
    }

    pub fn remove(&mut self, variable: &str) -> Option<String> {
        self.0.remove(variable)
    }

    pub fn get(&self, variable: &str) -> Option<&str> {
        self.0.get(variable).map(String::as_str)
    }

    pub fn contains(&self, variable: &str) -> bool {
        self.0.contains_key(variable)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Resolves names and labels to `(variable, state)` indices.
    pub fn resolve(&self, net: &BayesNet) -> Result<Vec<(usize, usize)>> {
        self.iter()
            .map(|(name, label)| {
                let v = net.require(name)?;
                let s = net
                    .variable(v)
                    .state_index(label)
                    .ok_or_else(|| Error::UnknownState { variable: name.to_string(), state: label.to_string() })?;
                Ok((v, s))
            })
            .collect()
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for Evidence {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Evidence(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

/// Posterior distribution of one variable given some evidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Posterior {
    pub variable: String,
    pub states: Vec<String>,
    pub probs: Vec<f64>,
    pub evidence: Evidence,
}

impl Posterior {
    pub fn prob_of(&self, state: &str) -> Option<f64> {
        self.states.iter().position(|s| s == state).map(|i| self.probs[i])
    }

    /// Index of the most probable state; ties go to the earlier state.
    pub fn map_index(&self) -> usize {
        argmax(&self.probs)
    }

    pub fn map_state(&self) -> &str {
        &self.states[self.map_index()]
    }

    /// States sorted by descending probability, ties in state order.
    pub fn ranked(&self) -> Vec<(String, f64)> {
        rank_classes(self)
    }

    /// Shannon entropy in nats.
    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }
}

/// Joint posterior over several variables; `probs` is row-major over
/// `variables` in the order requested.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPosterior {
    pub variables: Vec<usize>,
    pub cards: Vec<usize>,
    pub probs: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum InferenceMethod {
    #[default]
    VariableElimination,
    Enumeration,
}

pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

pub fn entropy(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

/// States of `p` in descending probability; the head is the MAP state.
pub fn rank_classes(p: &Posterior) -> Vec<(String, f64)> {
    let mut order: Vec<usize> = (0..p.probs.len()).collect();
    // stable sort keeps canonical order among ties
    order.sort_by(|&a, &b| p.probs[b].total_cmp(&p.probs[a]));
    order.into_iter().map(|i| (p.states[i].clone(), p.probs[i])).collect()
}

/// Posterior-to-prior ratio per state. A zero prior with positive posterior
/// gives `f64::INFINITY`; 0/0 is taken as 1.
pub fn change_ratios(prior: &[f64], post: &[f64]) -> Result<Vec<f64>> {
    if prior.len() != post.len() {
        return Err(Error::input("prior and posterior have different supports"));
    }
    Ok(prior
        .iter()
        .zip(post)
        .map(|(&a, &b)| match (a > 0.0, b > 0.0) {
            (true, _) => b / a,
            (false, true) => f64::INFINITY,
            (false, false) => 1.0,
        })
        .collect())
}

impl BayesNet {
    /// Exact `P(query | evidence)` by variable elimination.
    pub fn posterior(&self, evidence: &Evidence, query: &str) -> Result<Posterior> {
        self.posterior_with(InferenceMethod::VariableElimination, evidence, query)
    }

    pub fn posterior_with(&self, method: InferenceMethod, evidence: &Evidence, query: &str) -> Result<Posterior> {
        let q = self.require(query)?;
        let joint = match method {
            InferenceMethod::VariableElimination => self.joint_posterior(evidence, &[q])?,
            InferenceMethod::Enumeration => self.joint_by_enumeration(evidence, &[q])?,
        };
        Ok(Posterior {
            variable: query.to_string(),
            states: self.variable(q).states.clone(),
            probs: joint.probs,
            evidence: evidence.clone(),
        })
    }

    /// Exact joint posterior of `query` (distinct variable indices) by
    /// variable elimination with a min-fill ordering.
    pub fn joint_posterior(&self, evidence: &Evidence, query: &[usize]) -> Result<JointPosterior> {
        let observed = evidence.resolve(self)?;
        let mut obs_state = vec![None; self.len()];
        for &(v, s) in &observed {
            obs_state[v] = Some(s);
        }
        let free_query: Vec<usize> = query.iter().copied().filter(|&q| obs_state[q].is_none()).collect();

        // Variables that are neither queried, observed, nor ancestors of
        // either sum to one and can be dropped.
        let relevant = self.ancestral_set(query.iter().copied().chain(observed.iter().map(|&(v, _)| v)));

        let mut factors: Vec<Factor> = Vec::new();
        for v in (0..self.len()).filter(|&v| relevant[v]) {
            let mut f = self.cpt_factor(v);
            for &u in f.vars.clone().iter() {
                if let Some(s) = obs_state[u] {
                    f = f.reduce(u, s);
                }
            }
            factors.push(f);
        }

        let mut to_eliminate: Vec<usize> =
            (0..self.len()).filter(|&v| relevant[v] && obs_state[v].is_none() && !free_query.contains(&v)).collect();
        while !to_eliminate.is_empty() {
            let pick = min_fill_choice(&factors, &to_eliminate, |v| self.cardinality(v));
            let var = to_eliminate.swap_remove(pick);
            let (touching, rest): (Vec<Factor>, Vec<Factor>) =
                factors.into_iter().partition(|f| f.position(var).is_some());
            factors = rest;
            if let Some(prod) = touching.into_iter().reduce(|a, b| a.product(&b)) {
                factors.push(prod.sum_out(var));
            }
        }
        let result = factors.into_iter().fold(Factor::scalar(1.0), |acc, f| acc.product(&f)).permute(&free_query);

        self.finish_joint(query, &obs_state, &free_query, result.values)
    }

    /// Reference inference by summing the full joint distribution.
    pub fn joint_by_enumeration(&self, evidence: &Evidence, query: &[usize]) -> Result<JointPosterior> {
        let observed = evidence.resolve(self)?;
        let mut obs_state = vec![None; self.len()];
        for &(v, s) in &observed {
            obs_state[v] = Some(s);
        }
        let free_query: Vec<usize> = query.iter().copied().filter(|&q| obs_state[q].is_none()).collect();
        let cards: Vec<usize> = free_query.iter().map(|&q| self.cardinality(q)).collect();
        let mut acc = vec![0.0; cards.iter().product()];

        let order = self.topological_order();
        let n = self.len();
        let mut assignment = vec![0usize; n];
        for &(v, s) in &observed {
            assignment[v] = s;
        }
        let free: Vec<usize> = (0..n).filter(|&v| obs_state[v].is_none()).collect();
        let mut parent_buf = Vec::new();
        loop {
            let mut p = 1.0;
            for &v in &order {
                parent_buf.clear();
                parent_buf.extend(self.parents(v).iter().map(|&u| assignment[u]));
                p *= self.prob(v, &parent_buf, assignment[v]);
                if p == 0.0 {
                    break;
                }
            }
            let idx = free_query.iter().zip(&cards).fold(0, |acc, (&q, &c)| acc * c + assignment[q]);
            acc[idx] += p;

            // next assignment of the free variables
            let mut d = free.len();
            loop {
                if d == 0 {
                    return self.finish_joint(query, &obs_state, &free_query, acc);
                }
                d -= 1;
                let v = free[d];
                assignment[v] += 1;
                if assignment[v] < self.cardinality(v) {
                    break;
                }
                assignment[v] = 0;
            }
        }
    }

    /// Normalizes the unobserved-query table and embeds observed query
    /// variables as point masses.
    fn finish_joint(
        &self,
        query: &[usize],
        obs_state: &[Option<usize>],
        free_query: &[usize],
        mut values: Vec<f64>,
    ) -> Result<JointPosterior> {
        let total: f64 = values.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InconsistentEvidence);
        }
        values.iter_mut().for_each(|x| *x /= total);

        let cards: Vec<usize> = query.iter().map(|&q| self.cardinality(q)).collect();
        let size: usize = cards.iter().product();
        let mut probs = vec![0.0; size];
        let free_cards: Vec<usize> = free_query.iter().map(|&q| self.cardinality(q)).collect();
        let mut assignment = vec![0usize; query.len()];
        for (i, &q) in query.iter().enumerate() {
            if let Some(s) = obs_state[q] {
                assignment[i] = s;
            }
        }
        for (fi, &value) in values.iter().enumerate() {
            // decode free-query index
            let mut rem = fi;
            for (k, &q) in free_query.iter().enumerate().rev() {
                let pos = query.iter().position(|&x| x == q).unwrap();
                assignment[pos] = rem % free_cards[k];
                rem /= free_cards[k];
            }
            let idx = assignment.iter().zip(&cards).fold(0, |acc, (&a, &c)| acc * c + a);
            probs[idx] = value;
        }
        Ok(JointPosterior { variables: query.to_vec(), cards, probs })
    }

    fn cpt_factor(&self, v: usize) -> Factor {
        let mut vars = self.parents(v).to_vec();
        vars.push(v);
        let cards = vars.iter().map(|&u| self.cardinality(u)).collect();
        let values = self.cpt(v).iter().flatten().copied().collect();
        Factor { vars, cards, values }
    }

    /// Replaces the distribution of root variable `root` with its posterior
    /// given `evidence`. Every other CPT is carried over unchanged.
    pub fn absorb_round(&self, root: &str, evidence: &Evidence) -> Result<BayesNet> {
        let r = self.require(root)?;
        if !self.parents(r).is_empty() {
            return Err(Error::input(format!("`{root}` is not a root variable")));
        }
        if evidence.contains(root) {
            return Err(Error::input(format!("evidence may not observe `{root}` itself")));
        }
        if evidence.is_empty() {
            return Ok(self.clone());
        }
        let post = self.posterior(evidence, root)?;
        self.with_cpt(r, vec![post.probs])
    }

    /// Hides `target` from a full observation and predicts it from the rest.
    pub fn holdout_predict(&self, observation: &Evidence, target: &str) -> Result<Posterior> {
        self.require(target)?;
        let mut evidence = observation.clone();
        evidence.remove(target);
        self.posterior(&evidence, target)
    }
}

/// Picks the variable whose elimination adds the fewest fill edges, breaking
/// ties by the size of the resulting factor and then by position.
fn min_fill_choice(factors: &[Factor], candidates: &[usize], card: impl Fn(usize) -> usize) -> usize {
    let mut best = (usize::MAX, usize::MAX, 0);
    for (i, &v) in candidates.iter().enumerate() {
        let mut neighbours: Vec<usize> = factors
            .iter()
            .filter(|f| f.position(v).is_some())
            .flat_map(|f| f.vars.iter().copied())
            .filter(|&u| u != v)
            .collect();
        neighbours.sort_unstable();
        neighbours.dedup();
        let mut fill = 0;
        for (a, &x) in neighbours.iter().enumerate() {
            for &y in &neighbours[a + 1..] {
                let adjacent = factors.iter().any(|f| f.position(x).is_some() && f.position(y).is_some());
                if !adjacent {
                    fill += 1;
                }
            }
        }
        let weight: usize = neighbours.iter().map(|&u| card(u)).product();
        if (fill, weight) < (best.0, best.1) {
            best = (fill, weight, i);
        }
    }
    best.2
}
