//! Reference computations written independently of the library.
#![allow(dead_code)]

use dct_bn::bn::{BayesNet, Evidence, Variable};
use dct_bn::model::{Expectation, ExpertModel, FineClass, ValueScheme};
use rand::Rng;

pub fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// P(k correct of n), indexed by k.
pub fn binom(n: usize, p: f64) -> Vec<f64> {
    (0..=n).map(|k| choose(n, k) * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)).collect()
}

/// 0 = High, 1 = Medium, 2 = Low.
pub fn band_index(k: usize, n: usize) -> usize {
    if n <= 2 {
        return if k == 0 {
            2
        } else if k == n {
            0
        } else {
            1
        };
    }
    if k <= 1 {
        2
    } else if k + 1 >= n {
        0
    } else {
        1
    }
}

pub fn success_prob(model: &ExpertModel, class: FineClass, type_id: usize, pcm: f64) -> f64 {
    match model.pattern(class)[type_id - 1] {
        Expectation::High => 1.0 - pcm,
        Expectation::Low => pcm,
        Expectation::Unknown => 0.5,
    }
}

/// P(observed label on type | class).
pub fn likelihood(
    model: &ExpertModel,
    scheme: ValueScheme,
    pcm: f64,
    class: FineClass,
    type_id: usize,
    label: &str,
) -> f64 {
    let n = model.item_counts()[type_id - 1];
    let dist = binom(n, success_prob(model, class, type_id, pcm));
    match scheme {
        ValueScheme::Count => dist[label.parse::<usize>().expect("count label")],
        ValueScheme::Band => {
            let want = match label {
                "H" => 0,
                "M" => 1,
                "L" => 2,
                other => panic!("bad band label {other}"),
            };
            (0..=n).filter(|&k| band_index(k, n) == want).map(|k| dist[k]).sum()
        }
    }
}

/// Class posterior under conditional independence, in log space.
pub fn naive_bayes(
    model: &ExpertModel,
    scheme: ValueScheme,
    pcm: f64,
    prior: &[f64],
    obs: &[(usize, String)],
) -> Option<Vec<f64>> {
    let logs: Vec<f64> = FineClass::ALL
        .iter()
        .map(|&c| {
            prior[c.index()].ln() + obs.iter().map(|(t, l)| likelihood(model, scheme, pcm, c, *t, l).ln()).sum::<f64>()
        })
        .collect();
    let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return None;
    }
    let w: Vec<f64> = logs.iter().map(|l| (l - m).exp()).collect();
    let s: f64 = w.iter().sum();
    Some(w.into_iter().map(|x| x / s).collect())
}

pub fn entropy(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// Expected entropy reduction of `target` from observing one more variable,
/// by enumerating its outcomes: `lik[v][c] = P(outcome v | class c)`.
pub fn brute_force_gain(prior: &[f64], lik: &[Vec<f64>]) -> f64 {
    let mut expected = 0.0;
    for row in lik {
        let joint: Vec<f64> = prior.iter().zip(row).map(|(p, l)| p * l).collect();
        let pv: f64 = joint.iter().sum();
        if pv > 0.0 {
            let post: Vec<f64> = joint.iter().map(|x| x / pv).collect();
            expected += pv * entropy(&post);
        }
    }
    entropy(prior) - expected
}

/// Random DAG over nodes in index order with random CPTs; `zero_prob` is
/// the chance that a CPT entry is forced to zero.
pub fn random_net(rng: &mut impl Rng, max_nodes: usize, max_states: usize, zero_prob: f64) -> BayesNet {
    loop {
        let n = rng.gen_range(1..=max_nodes);
        let cards: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=max_states)).collect();
        if cards.iter().map(|&c| c as f64).product::<f64>() > 300_000.0 {
            continue;
        }
        let parents: Vec<Vec<usize>> = (0..n)
            .map(|v| {
                let mut ps: Vec<usize> = (0..v).filter(|_| rng.gen_bool(0.35)).collect();
                ps.truncate(3);
                ps
            })
            .collect();
        let cpts = (0..n)
            .map(|v| {
                let rows: usize = parents[v].iter().map(|&p| cards[p]).product();
                (0..rows)
                    .map(|_| loop {
                        let raw: Vec<f64> = (0..cards[v])
                            .map(|_| if rng.gen_bool(zero_prob) { 0.0 } else { rng.gen_range(0.01..1.0) })
                            .collect();
                        let s: f64 = raw.iter().sum();
                        if s > 0.0 {
                            break raw.into_iter().map(|x| x / s).collect::<Vec<f64>>();
                        }
                    })
                    .collect()
            })
            .collect();
        let vars = (0..n).map(|v| Variable::new(format!("x{v}"), (0..cards[v]).map(|s| format!("s{s}")))).collect();
        return BayesNet::new(vars, parents, cpts).expect("valid random net");
    }
}

/// Random evidence on a random subset of nodes other than `query`.
pub fn random_evidence(rng: &mut impl Rng, net: &BayesNet, query: usize) -> (Evidence, Vec<(usize, usize)>) {
    let mut ev = Evidence::new();
    let mut raw = Vec::new();
    for v in 0..net.len() {
        if v != query && rng.gen_bool(0.4) {
            let s = rng.gen_range(0..net.cardinality(v));
            ev.insert(net.variable(v).name.clone(), net.variable(v).states[s].clone());
            raw.push((v, s));
        }
    }
    (ev, raw)
}

/// P(query | evidence) by summing the full joint; `None` if the evidence
/// has probability zero.
pub fn enumerate(net: &BayesNet, evidence: &[(usize, usize)], query: usize) -> Option<Vec<f64>> {
    let n = net.len();
    let cards: Vec<usize> = (0..n).map(|v| net.cardinality(v)).collect();
    let mut acc = vec![0.0; cards[query]];
    let mut x = vec![0usize; n];
    loop {
        if evidence.iter().all(|&(v, s)| x[v] == s) {
            let mut p = 1.0;
            for v in 0..n {
                let ps: Vec<usize> = net.parents(v).iter().map(|&q| x[q]).collect();
                // mixed radix, first parent most significant
                let row = ps.iter().zip(net.parents(v)).fold(0, |r, (&s, &q)| r * cards[q] + s);
                p *= net.cpt(v)[row][x[v]];
            }
            acc[x[query]] += p;
        }
        let mut i = 0;
        loop {
            if i == n {
                let total: f64 = acc.iter().sum();
                return (total > 0.0).then(|| acc.iter().map(|a| a / total).collect());
            }
            x[i] += 1;
            if x[i] < cards[i] {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

/// Random probability vector; roughly a third of entries zero when `sparse`.
pub fn random_simplex(rng: &mut impl Rng, n: usize, sparse: bool) -> Vec<f64> {
    loop {
        let raw: Vec<f64> = (0..n)
            .map(|_| if sparse && rng.gen_bool(0.3) { 0.0 } else { -rng.gen_range(1e-12f64..1.0).ln() })
            .collect();
        let s: f64 = raw.iter().sum();
        if s > 0.0 {
            return raw.into_iter().map(|x| x / s).collect();
        }
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
