use crate::bn::Variable;
use crate::data::{DctRecord, TypeScores, N_ITEMS};
use crate::error::{Error, Result};
use crate::model::{
    type_states, type_var, CoarseClass, ExpertModel, FineClass, StudentNet, ValueScheme, CLASS_VAR, COARSE_VAR, N_TYPES,
};

/// Complete discrete data: one row of state indices per record.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    variables: Vec<Variable>,
    rows: Vec<Vec<usize>>,
    ids: Vec<String>,
}

impl Dataset {
    pub fn new(variables: Vec<Variable>, rows: Vec<Vec<usize>>) -> Result<Self> {
        let ids = (1..=rows.len()).map(|i| i.to_string()).collect();
        Self::with_ids(variables, rows, ids)
    }

    pub fn with_ids(variables: Vec<Variable>, rows: Vec<Vec<usize>>, ids: Vec<String>) -> Result<Self> {
        if ids.len() != rows.len() {
            return Err(Error::input("one id per row required"));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != variables.len() {
                return Err(Error::input(format!(
                    "row {} has {} values, expected {}",
                    r + 1,
                    row.len(),
                    variables.len()
                )));
            }
            for (v, &s) in row.iter().enumerate() {
                if s >= variables[v].cardinality() {
                    return Err(Error::input(format!(
                        "row {} value {s} out of range for `{}`",
                        r + 1,
                        variables[v].name
                    )));
                }
            }
        }
        Ok(Dataset { variables, rows, ids })
    }

    /// The 24 item flags as binary variables `i01..i24` with states `0`, `1`.
    pub fn from_items(records: &[DctRecord]) -> Result<Self> {
        let variables = (1..=N_ITEMS).map(|i| Variable::new(format!("i{i:02}"), ["0", "1"])).collect();
        let mut rows = Vec::with_capacity(records.len());
        for r in records {
            if r.answers.len() != N_ITEMS {
                return Err(Error::input(format!("record {} has {} answers", r.student_id, r.answers.len())));
            }
            rows.push(r.answers.iter().map(|&a| a as usize).collect());
        }
        Self::with_ids(variables, rows, records.iter().map(|r| r.student_id.clone()).collect())
    }

    /// Type nodes only (`type1..type6`) under the given value scheme.
    pub fn from_scores(scores: &[TypeScores], scheme: ValueScheme, item_counts: &[usize; N_TYPES]) -> Result<Self> {
        Self::build(scores, scheme, item_counts, None, false)
    }

    /// `fineClass` followed by the six type nodes; every record needs a label.
    pub fn labelled(scores: &[TypeScores], scheme: ValueScheme, item_counts: &[usize; N_TYPES]) -> Result<Self> {
        Self::build(scores, scheme, item_counts, None, true)
    }

    /// Columns for every node of the expert student net, including the
    /// coarse class derived from each label.
    pub fn for_student_net(scores: &[TypeScores], net: &StudentNet, model: &ExpertModel) -> Result<Self> {
        Self::build(scores, net.scheme(), net.item_counts(), Some(model), true)
    }

    fn build(
        scores: &[TypeScores],
        scheme: ValueScheme,
        item_counts: &[usize; N_TYPES],
        coarse: Option<&ExpertModel>,
        with_class: bool,
    ) -> Result<Self> {
        let mut variables = Vec::new();
        if with_class {
            variables.push(Variable::new(CLASS_VAR, FineClass::ALL.iter().map(|c| c.label())));
        }
        if coarse.is_some() {
            variables.push(Variable::new(COARSE_VAR, CoarseClass::ALL.iter().map(|c| c.label())));
        }
        let type_columns: Vec<Variable> =
            (1..=N_TYPES).map(|t| Variable::new(type_var(t), type_states(scheme, item_counts[t - 1]))).collect();
        variables.extend(type_columns.iter().cloned());

        let mut rows = Vec::with_capacity(scores.len());
        for s in scores {
            let mut row = Vec::with_capacity(variables.len());
            if with_class {
                let label =
                    s.label.ok_or_else(|| Error::input(format!("student {} has no class label", s.student_id)))?;
                row.push(label.index());
                if let Some(model) = coarse {
                    row.push(model.coarse_of(label) as usize);
                }
            }
            for t in 0..N_TYPES {
                let n = item_counts[t];
                let c = s.counts[t];
                if c > n {
                    return Err(Error::input(format!("student {} type {} score {c} exceeds {n}", s.student_id, t + 1)));
                }
                let label = match scheme {
                    ValueScheme::Count => c.to_string(),
                    ValueScheme::Band => crate::model::band_of(c, n)?.label().to_string(),
                };
                row.push(type_columns[t].state_index(&label).expect("state list covers every score"));
            }
            rows.push(row);
        }
        Self::with_ids(variables, rows, scores.iter().map(|s| s.student_id.clone()).collect())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.rows
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(Variable::cardinality).collect()
    }

    /// Rows at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            variables: self.variables.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            ids: indices.iter().map(|&i| self.ids[i].clone()).collect(),
        }
    }
}
