use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::Mutex;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{learn_cpts, Dataset, EmptyRowWarning, StructureScore};
use crate::bn::{is_ancestor, topological_order, BayesNet};
use crate::error::{Error, Result};

/// Forbids any directed path from a listed descendant back to `root`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingConstraint {
    pub root: usize,
    pub descendants: Vec<usize>,
}

impl OrderingConstraint {
    /// `root` may not be reached from any of `descendants`, all named by column.
    pub fn by_name(data: &Dataset, root: &str, descendants: &[&str]) -> Result<Self> {
        let col = |name: &str| data.column(name).ok_or_else(|| Error::input(format!("data has no column `{name}`")));
        Ok(OrderingConstraint {
            root: col(root)?,
            descendants: descendants.iter().map(|d| col(d)).collect::<Result<_>>()?,
        })
    }

    pub fn allows(&self, parents: &[Vec<usize>]) -> bool {
        self.descendants.iter().all(|&d| !is_ancestor(parents, d, self.root))
    }

    /// Whether `root` is an ancestor of every descendant in `net`.
    pub fn root_reaches_all(&self, net: &BayesNet) -> bool {
        self.descendants.iter().all(|&d| net.is_ancestor(self.root, d))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub seed: u64,
    /// Extra climbs from perturbed copies of the first optimum.
    pub restarts: usize,
    /// Random moves applied before each restart.
    pub perturbation: usize,
    pub max_parents: Option<usize>,
    /// Pseudocount for the final CPTs.
    pub alpha: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { seed: 0, restarts: 5, perturbation: 4, max_parents: None, alpha: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructureResult {
    pub net: BayesNet,
    /// Score of the structure under maximum-likelihood parameters.
    pub score: StructureScore,
    pub arcs: usize,
    pub arcs_per_node: f64,
    pub parameters: usize,
    pub warnings: Vec<EmptyRowWarning>,
    /// Every graph accepted by a hill-climbing step, as parent lists.
    pub visited: Vec<Vec<Vec<usize>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum MoveKind {
    Add,
    Delete,
    Reverse,
}

#[derive(Clone, Copy, Debug)]
struct Move {
    kind: MoveKind,
    from: usize,
    to: usize,
}

impl Move {
    fn apply(self, parents: &mut [Vec<usize>]) {
        match self.kind {
            MoveKind::Add => insert_sorted(&mut parents[self.to], self.from),
            MoveKind::Delete => parents[self.to].retain(|&p| p != self.from),
            MoveKind::Reverse => {
                parents[self.to].retain(|&p| p != self.from);
                insert_sorted(&mut parents[self.from], self.to);
            }
        }
    }

    fn touched(self) -> [usize; 2] {
        [self.to, self.from]
    }
}

fn insert_sorted(v: &mut Vec<usize>, x: usize) {
    if let Err(pos) = v.binary_search(&x) {
        v.insert(pos, x);
    }
}

#[derive(Clone, Copy, Debug)]
struct Family {
    loglik: f64,
    parameters: usize,
}

impl Family {
    fn bic(self, ln_n: f64) -> f64 {
        self.loglik - self.parameters as f64 / 2.0 * ln_n
    }
}

struct Scorer<'a> {
    data: &'a Dataset,
    cards: Vec<usize>,
    ln_n: f64,
    cache: Mutex<HashMap<(usize, Vec<usize>), Family>>,
}

impl<'a> Scorer<'a> {
    fn new(data: &'a Dataset) -> Self {
        let ln_n = if data.is_empty() { 0.0 } else { (data.len() as f64).ln() };
        Scorer { data, cards: data.cardinalities(), ln_n, cache: Mutex::new(HashMap::new()) }
    }

    fn family(&self, v: usize, parents: &[usize]) -> Family {
        let key = (v, parents.to_vec());
        if let Some(f) = self.cache.lock().expect("score cache").get(&key) {
            return *f;
        }
        let r = self.cards[v];
        let mut counts: HashMap<u64, Vec<u32>> = HashMap::new();
        for row in self.data.rows() {
            let cfg = parents.iter().fold(0u64, |acc, &p| acc * self.cards[p] as u64 + row[p] as u64);
            counts.entry(cfg).or_insert_with(|| vec![0; r])[row[v]] += 1;
        }
        let mut loglik = 0.0;
        for row in counts.values() {
            let total: u32 = row.iter().sum();
            for &c in row.iter().filter(|&&c| c > 0) {
                loglik += c as f64 * (c as f64 / total as f64).ln();
            }
        }
        let q = parents.iter().fold(1usize, |acc, &p| acc.saturating_mul(self.cards[p]));
        let fam = Family { loglik, parameters: (r - 1).saturating_mul(q) };
        self.cache.lock().expect("score cache").insert(key, fam);
        fam
    }

    fn total(&self, parents: &[Vec<usize>]) -> (f64, usize, f64) {
        let mut score = 0.0;
        let mut params = 0;
        let mut loglik = 0.0;
        for (v, ps) in parents.iter().enumerate() {
            let f = self.family(v, ps);
            score += f.bic(self.ln_n);
            params += f.parameters;
            loglik += f.loglik;
        }
        (score, params, loglik)
    }
}

fn legal_moves(
    parents: &[Vec<usize>],
    constraint: Option<&OrderingConstraint>,
    max_parents: Option<usize>,
) -> Vec<Move> {
    let n = parents.len();
    let mut moves = Vec::new();
    for from in 0..n {
        for to in 0..n {
            if from == to {
                continue;
            }
            let candidates: &[MoveKind] = if parents[to].contains(&from) {
                &[MoveKind::Delete, MoveKind::Reverse]
            } else if parents[from].contains(&to) {
                &[]
            } else {
                &[MoveKind::Add]
            };
            for &kind in candidates {
                let m = Move { kind, from, to };
                let mut next = parents.to_vec();
                m.apply(&mut next);
                let grows = match kind {
                    MoveKind::Add => next[to].len(),
                    MoveKind::Reverse => next[from].len(),
                    MoveKind::Delete => 0,
                };
                if max_parents.is_some_and(|cap| grows > cap) {
                    continue;
                }
                if kind != MoveKind::Delete && topological_order(&next).is_none() {
                    continue;
                }
                if constraint.is_some_and(|c| !c.allows(&next)) {
                    continue;
                }
                moves.push(m);
            }
        }
    }
    moves
}

/// Steepest-ascent hill climbing from `start`. Ties within 1e-9 prefer the
/// smaller resulting parameter count, then the smaller `(from, to)` arc.
fn climb(
    scorer: &Scorer,
    mut parents: Vec<Vec<usize>>,
    config: &SearchConfig,
    constraint: Option<&OrderingConstraint>,
    visited: &mut Vec<Vec<Vec<usize>>>,
) -> Vec<Vec<usize>> {
    let ln_n = scorer.ln_n;
    loop {
        let (_, current_params, _) = scorer.total(&parents);
        let mut best: Option<(f64, usize, Move)> = None;
        for m in legal_moves(&parents, constraint, config.max_parents) {
            let mut next = parents.clone();
            m.apply(&mut next);
            let mut delta = 0.0;
            let mut params = current_params as isize;
            for v in m.touched() {
                let old = scorer.family(v, &parents[v]);
                let new = scorer.family(v, &next[v]);
                delta += new.bic(ln_n) - old.bic(ln_n);
                params += new.parameters as isize - old.parameters as isize;
            }
            let params = params.max(0) as usize;
            let better = match &best {
                None => true,
                Some((bd, bp, bm)) => {
                    if (delta - bd).abs() > 1e-9 {
                        delta > *bd
                    } else {
                        params.cmp(bp).then((m.from, m.to, m.kind).cmp(&(bm.from, bm.to, bm.kind))) == Ordering::Less
                    }
                }
            };
            if better {
                best = Some((delta, params, m));
            }
        }
        match best {
            Some((delta, _, m)) if delta > 1e-9 => {
                m.apply(&mut parents);
                visited.push(parents.clone());
            }
            _ => return parents,
        }
    }
}

fn perturb(
    parents: &[Vec<usize>],
    steps: usize,
    rng: &mut ChaCha8Rng,
    config: &SearchConfig,
    constraint: Option<&OrderingConstraint>,
) -> Vec<Vec<usize>> {
    let mut next = parents.to_vec();
    for _ in 0..steps {
        let moves = legal_moves(&next, constraint, config.max_parents);
        match moves.choose(rng) {
            Some(m) => m.apply(&mut next),
            None => break,
        }
    }
    next
}

/// Greedy score-based structure search over arc additions, deletions and
/// reversals, followed by CPT estimation on the chosen graph.
pub fn greedy_structure_search(
    data: &Dataset,
    constraint: Option<&OrderingConstraint>,
    config: &SearchConfig,
) -> Result<StructureResult> {
    let n = data.variables().len();
    if n == 0 {
        return Err(Error::input("dataset has no variables"));
    }
    if let Some(c) = constraint {
        if c.root >= n || c.descendants.iter().any(|&d| d >= n || d == c.root) {
            return Err(Error::input("ordering constraint names an invalid column"));
        }
    }
    let scorer = Scorer::new(data);
    let mut visited = Vec::new();
    let first = climb(&scorer, vec![Vec::new(); n], config, constraint, &mut visited);
    let restarts: Vec<(Vec<Vec<usize>>, Vec<Vec<Vec<usize>>>)> = (0..config.restarts as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(r));
            let start = perturb(&first, config.perturbation, &mut rng, config, constraint);
            let mut seen = Vec::new();
            let end = climb(&scorer, start, config, constraint, &mut seen);
            (end, seen)
        })
        .collect();

    let mut best = first;
    let mut best_key = scorer.total(&best);
    for (cand, seen) in restarts {
        visited.extend(seen);
        let key = scorer.total(&cand);
        if key.0 > best_key.0 + 1e-9 || ((key.0 - best_key.0).abs() <= 1e-9 && key.1 < best_key.1) {
            best = cand;
            best_key = key;
        }
    }
    let (_, parameters, loglik) = best_key;

    let cpts = best
        .iter()
        .enumerate()
        .map(|(v, ps)| {
            let rows = ps.iter().map(|&p| data.variables()[p].cardinality()).product::<usize>();
            let k = data.variables()[v].cardinality();
            vec![vec![1.0 / k as f64; k]; rows]
        })
        .collect();
    let skeleton = BayesNet::new(data.variables().to_vec(), best, cpts)?;
    let learned = learn_cpts(&skeleton, data, config.alpha)?;
    let arcs = learned.net.arc_count();
    Ok(StructureResult {
        score: StructureScore::new(loglik, parameters, data.len()),
        arcs,
        arcs_per_node: arcs as f64 / n as f64,
        parameters,
        warnings: learned.warnings,
        net: learned.net,
        visited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bn::Variable;

    fn binary(names: &[&str], rows: Vec<Vec<usize>>) -> Dataset {
        Dataset::new(names.iter().map(|n| Variable::new(*n, ["0", "1"])).collect(), rows).unwrap()
    }

    #[test]
    fn single_variable_has_no_arcs() {
        let data = binary(&["a"], vec![]);
        let r = greedy_structure_search(&data, None, &SearchConfig::default()).unwrap();
        assert_eq!(r.arcs, 0);
        assert_eq!(r.net.cpt(0), &[vec![0.5, 0.5]]);
    }

    #[test]
    fn finds_dependence() {
        let rows: Vec<Vec<usize>> = (0..200)
            .map(|i| {
                let a = i % 2;
                let b = if i % 10 == 0 { 1 - a } else { a };
                vec![a, b, (i / 2) % 2]
            })
            .collect();
        let data = binary(&["a", "b", "c"], rows);
        let r = greedy_structure_search(&data, None, &SearchConfig::default()).unwrap();
        assert_eq!(r.arcs, 1);
        // equal scores in both directions; tie-break picks a -> b
        assert_eq!(r.net.arcs(), vec![(0, 1)]);
    }

    #[test]
    fn constraint_blocks_paths_into_root() {
        let rows: Vec<Vec<usize>> = (0..200)
            .map(|i| {
                let a = i % 2;
                let b = if i % 10 == 0 { 1 - a } else { a };
                vec![b, a]
            })
            .collect();
        let data = binary(&["r", "x"], rows);
        let c = OrderingConstraint::by_name(&data, "r", &["x"]).unwrap();
        let r = greedy_structure_search(&data, Some(&c), &SearchConfig::default()).unwrap();
        assert_eq!(r.net.arcs(), vec![(0, 1)]);
        assert!(c.root_reaches_all(&r.net));
    }
}
