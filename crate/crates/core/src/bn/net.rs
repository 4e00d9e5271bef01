use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on CPT row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// A named discrete variable with an ordered list of state labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub states: Vec<String>,
}

impl Variable {
    pub fn new<S: Into<String>>(name: impl Into<String>, states: impl IntoIterator<Item = S>) -> Self {
        Variable { name: name.into(), states: states.into_iter().map(Into::into).collect() }
    }

    pub fn cardinality(&self) -> usize {
        self.states.len()
    }

    pub fn state_index(&self, label: &str) -> Option<usize> {
        self.states.iter().position(|s| s == label)
    }
}

/// First violated invariant found by [`BayesNet::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Diagnostic {
    Empty,
    DuplicateVariable(String),
    TooFewStates(String),
    DuplicateState { variable: String, state: String },
    BadParent { variable: String, parent: usize },
    RepeatedParent { variable: String, parent: String },
    Cycle(Vec<String>),
    RowCount { variable: String, expected: usize, found: usize },
    RowWidth { variable: String, row: usize, expected: usize, found: usize },
    BadEntry { variable: String, row: usize, value: f64 },
    RowSum { variable: String, row: usize, sum: f64 },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Diagnostic::Empty => write!(f, "network has no variables"),
            Diagnostic::DuplicateVariable(v) => write!(f, "duplicate variable name `{v}`"),
            Diagnostic::TooFewStates(v) => write!(f, "variable `{v}` has fewer than 2 states"),
            Diagnostic::DuplicateState { variable, state } => {
                write!(f, "variable `{variable}` repeats state `{state}`")
            }
            Diagnostic::BadParent { variable, parent } => {
                write!(f, "variable `{variable}` has out-of-range parent index {parent}")
            }
            Diagnostic::RepeatedParent { variable, parent } => {
                write!(f, "variable `{variable}` lists parent `{parent}` twice or as itself")
            }
            Diagnostic::Cycle(path) => write!(f, "cycle: {}", path.join(" -> ")),
            Diagnostic::RowCount { variable, expected, found } => {
                write!(f, "cpt of `{variable}` has {found} rows, expected {expected}")
            }
            Diagnostic::RowWidth { variable, row, expected, found } => {
                write!(f, "cpt of `{variable}` row {row} has {found} entries, expected {expected}")
            }
            Diagnostic::BadEntry { variable, row, value } => {
                write!(f, "cpt of `{variable}` row {row} contains invalid entry {value}")
            }
            Diagnostic::RowSum { variable, row, sum } => {
                write!(f, "cpt of `{variable}` row {row} sums to {sum}, not 1")
            }
        }
    }
}

/// A discrete Bayesian network.
///
/// Each variable owns a CPT with one row per joint parent assignment. Rows
/// are ordered by the mixed-radix index of the parent states taken in
/// parent-list order, first parent most significant; each row is a
/// distribution over the variable's own states.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesNet {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    cpts: Vec<Vec<Vec<f64>>>,
    index: HashMap<String, usize>,
}

impl BayesNet {
    /// Builds and validates a network.
    pub fn new(variables: Vec<Variable>, parents: Vec<Vec<usize>>, cpts: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let net = Self::from_parts_unchecked(variables, parents, cpts);
        net.validate().map_err(Error::InvalidNet)?;
        Ok(net)
    }

    /// Assembles a network without checking any invariant. Call
    /// [`validate`](Self::validate) before running inference on it.
    pub fn from_parts_unchecked(variables: Vec<Variable>, parents: Vec<Vec<usize>>, cpts: Vec<Vec<Vec<f64>>>) -> Self {
        let mut index = HashMap::with_capacity(variables.len());
        for (i, v) in variables.iter().enumerate() {
            index.entry(v.name.clone()).or_insert(i);
        }
        BayesNet { variables, parents, cpts, index }
    }

    pub fn validate(&self) -> Result<(), Diagnostic> {
        if self.variables.is_empty() {
            return Err(Diagnostic::Empty);
        }
        let n = self.variables.len();
        let mut seen = HashSet::new();
        for v in &self.variables {
            if !seen.insert(v.name.as_str()) {
                return Err(Diagnostic::DuplicateVariable(v.name.clone()));
            }
            if v.states.len() < 2 {
                return Err(Diagnostic::TooFewStates(v.name.clone()));
            }
            let mut states = HashSet::new();
            for s in &v.states {
                if !states.insert(s.as_str()) {
                    return Err(Diagnostic::DuplicateState { variable: v.name.clone(), state: s.clone() });
                }
            }
        }
        if self.parents.len() != n || self.cpts.len() != n {
            return Err(Diagnostic::RowCount {
                variable: self.variables[0].name.clone(),
                expected: n,
                found: self.parents.len().min(self.cpts.len()),
            });
        }
        for (v, ps) in self.parents.iter().enumerate() {
            let mut uniq = HashSet::new();
            for &p in ps {
                if p >= n {
                    return Err(Diagnostic::BadParent { variable: self.variables[v].name.clone(), parent: p });
                }
                if p == v || !uniq.insert(p) {
                    return Err(Diagnostic::RepeatedParent {
                        variable: self.variables[v].name.clone(),
                        parent: self.variables[p].name.clone(),
                    });
                }
            }
        }
        if let Some(cycle) = find_cycle(&self.parents) {
            return Err(Diagnostic::Cycle(cycle.into_iter().map(|i| self.variables[i].name.clone()).collect()));
        }
        for v in 0..n {
            let name = &self.variables[v].name;
            let expected = self.row_count(v);
            let rows = &self.cpts[v];
            if rows.len() != expected {
                return Err(Diagnostic::RowCount { variable: name.clone(), expected, found: rows.len() });
            }
            let width = self.variables[v].cardinality();
            for (r, row) in rows.iter().enumerate() {
                if row.len() != width {
                    return Err(Diagnostic::RowWidth {
                        variable: name.clone(),
                        row: r,
                        expected: width,
                        found: row.len(),
                    });
                }
                if let Some(&bad) = row.iter().find(|x| !x.is_finite() || **x < 0.0) {
                    return Err(Diagnostic::BadEntry { variable: name.clone(), row: r, value: bad });
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(Diagnostic::RowSum { variable: name.clone(), row: r, sum });
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, v: usize) -> &Variable {
        &self.variables[v]
    }

    pub fn cardinality(&self, v: usize) -> usize {
        self.variables[v].cardinality()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub(crate) fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn all_parents(&self) -> &[Vec<usize>] {
        &self.parents
    }

    pub fn cpt(&self, v: usize) -> &[Vec<f64>] {
        &self.cpts[v]
    }

    /// Number of CPT rows, i.e. the product of the parent cardinalities.
    pub fn row_count(&self, v: usize) -> usize {
        self.parents[v].iter().map(|&p| self.cardinality(p)).product()
    }

    /// Mixed-radix row index for the given parent states (parent-list order).
    pub fn row_index(&self, v: usize, parent_states: &[usize]) -> usize {
        debug_assert_eq!(parent_states.len(), self.parents[v].len());
        self.parents[v].iter().zip(parent_states).fold(0, |acc, (&p, &s)| acc * self.cardinality(p) + s)
    }

    /// `P(v = state | parents = parent_states)`.
    pub fn prob(&self, v: usize, parent_states: &[usize], state: usize) -> f64 {
        self.cpts[v][self.row_index(v, parent_states)][state]
    }

    pub fn arc_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Free parameters: Σ_v (states_v − 1) · rows_v.
    pub fn parameter_count(&self) -> usize {
        (0..self.len()).map(|v| (self.cardinality(v) - 1) * self.row_count(v)).sum()
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs: Vec<_> =
            self.parents.iter().enumerate().flat_map(|(child, ps)| ps.iter().map(move |&p| (p, child))).collect();
        arcs.sort_unstable();
        arcs
    }

    /// Returns a copy with the CPT of `v` replaced, re-validated.
    pub fn with_cpt(&self, v: usize, rows: Vec<Vec<f64>>) -> Result<BayesNet> {
        let mut cpts = self.cpts.clone();
        cpts[v] = rows;
        BayesNet::new(self.variables.clone(), self.parents.clone(), cpts)
    }

    /// Variables in an order where every parent precedes its children.
    pub fn topological_order(&self) -> Vec<usize> {
        topological_order(&self.parents).expect("validated network is acyclic")
    }

    /// True if `a` is an ancestor of `b` (a != b).
    pub fn is_ancestor(&self, a: usize, b: usize) -> bool {
        is_ancestor(&self.parents, a, b)
    }

    /// Indices of `targets` and all their ancestors.
    pub fn ancestral_set(&self, targets: impl IntoIterator<Item = usize>) -> Vec<bool> {
        let mut keep = vec![false; self.len()];
        let mut stack: Vec<usize> = targets.into_iter().collect();
        while let Some(v) = stack.pop() {
            if !keep[v] {
                keep[v] = true;
                stack.extend(self.parents[v].iter().copied());
            }
        }
        keep
    }

    pub fn to_document(&self) -> NetDocument {
        NetDocument {
            variables: self
                .variables
                .iter()
                .enumerate()
                .map(|(v, var)| NodeDocument {
                    name: var.name.clone(),
                    states: var.states.clone(),
                    parents: self.parents[v].iter().map(|&p| self.variables[p].name.clone()).collect(),
                    cpt: self.cpts[v].clone(),
                })
                .collect(),
        }
    }

    pub fn from_document(doc: NetDocument) -> Result<Self> {
        let names: HashMap<&str, usize> = doc.variables.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
        let mut parents = Vec::with_capacity(doc.variables.len());
        for node in &doc.variables {
            let ps = node
                .parents
                .iter()
                .map(|p| names.get(p.as_str()).copied().ok_or_else(|| Error::UnknownVariable(p.clone())))
                .collect::<Result<Vec<_>>>()?;
            parents.push(ps);
        }
        let (variables, cpts) =
            doc.variables.into_iter().map(|n| (Variable { name: n.name, states: n.states }, n.cpt)).unzip();
        BayesNet::new(variables, parents, cpts)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("net document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_document(serde_json::from_str(text)?)
    }
}

/// Serialized form of a network: one entry per variable with its states,
/// parent names and CPT rows in mixed-radix order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetDocument {
    pub variables: Vec<NodeDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDocument {
    pub name: String,
    pub states: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    pub cpt: Vec<Vec<f64>>,
}

pub(crate) fn topological_order(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = parents.len();
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (c, ps) in parents.iter().enumerate() {
        for &p in ps {
            children[p].push(c);
        }
    }
    let mut ready: Vec<usize> = (0..n).rev().filter(|&v| indegree[v] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(v) = ready.pop() {
        order.push(v);
        for &c in children[v].iter().rev() {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(c);
            }
        }
    }
    (order.len() == n).then_some(order)
}

pub(crate) fn is_ancestor(parents: &[Vec<usize>], a: usize, b: usize) -> bool {
    let mut seen = vec![false; parents.len()];
    let mut stack = parents[b].clone();
    while let Some(v) = stack.pop() {
        if v == a {
            return true;
        }
        if !seen[v] {
            seen[v] = true;
            stack.extend(parents[v].iter().copied());
        }
    }
    false
}

fn find_cycle(parents: &[Vec<usize>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }
    fn visit(v: usize, parents: &[Vec<usize>], marks: &mut [Mark], path: &mut Vec<usize>) -> Option<Vec<usize>> {
        marks[v] = Mark::Active;
        path.push(v);
        for &p in &parents[v] {
            match marks[p] {
                Mark::Active => {
                    let start = path.iter().position(|&x| x == p).unwrap();
                    // path follows child -> parent links; reverse to read along arcs
                    let mut cycle: Vec<usize> = path[start..].to_vec();
                    cycle.reverse();
                    cycle.push(cycle[0]);
                    return Some(cycle);
                }
                Mark::New => {
                    if let Some(c) = visit(p, parents, marks, path) {
                        return Some(c);
                    }
                }
                Mark::Done => {}
            }
        }
        path.pop();
        marks[v] = Mark::Done;
        None
    }
    let mut marks = vec![Mark::New; parents.len()];
    for v in 0..parents.len() {
        if marks[v] == Mark::New {
            if let Some(c) = visit(v, parents, &mut marks, &mut Vec::new()) {
                return Some(c);
            }
        }
    }
    None
}
