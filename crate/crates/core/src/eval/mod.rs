//! Comparison, prediction and adaptiveness evaluations.
//!
//! A comparison grid counts students by (reference class, model class). Its
//! off-diagonal cells are judged by a [`ChangePolicy`]: moving a borderline
//! "U" student into a specific class of the same group is desirable, and so
//! is moving UN into anything. Every other change is undesirable.

pub mod fixtures;

use std::fmt::Write as _;
use std::marker::PhantomData;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bn::{Evidence, Posterior};
use crate::data::TypeScores;
use crate::error::{Error, Result};
use crate::model::{ClassLabel, CoarseClass, FineClass, StudentNet, N_TYPES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChangeKind {
    Match,
    Desirable,
    Undesirable,
}

pub trait ChangePolicy<L> {
    fn kind(&self, from: L, to: L) -> ChangeKind;
}

/// Change policy over fine classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FinePolicy {
    /// Whether AU → MIS counts as desirable (MIS sits in the A group).
    pub au_to_mis_desirable: bool,
}

impl Default for FinePolicy {
    fn default() -> Self {
        FinePolicy { au_to_mis_desirable: true }
    }
}

impl ChangePolicy<FineClass> for FinePolicy {
    fn kind(&self, from: FineClass, to: FineClass) -> ChangeKind {
        use FineClass::*;
        if from == to {
            return ChangeKind::Match;
        }
        let desirable = match from {
            Lu => matches!(to, Lwh | Lze | Lrv),
            Su => matches!(to, Sdf | Srn),
            Au => matches!(to, Ate | Amo) || (to == Mis && self.au_to_mis_desirable),
            Un => true,
            _ => false,
        };
        if desirable {
            ChangeKind::Desirable
        } else {
            ChangeKind::Undesirable
        }
    }
}

/// Change policy over coarse classes: only UN → {A, S, L} is desirable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CoarsePolicy;

impl ChangePolicy<CoarseClass> for CoarsePolicy {
    fn kind(&self, from: CoarseClass, to: CoarseClass) -> ChangeKind {
        if from == to {
            ChangeKind::Match
        } else if from == CoarseClass::Un {
            ChangeKind::Desirable
        } else {
            ChangeKind::Undesirable
        }
    }
}

/// Fine-class change kind under the default policy.
pub fn change_kind(from: FineClass, to: FineClass) -> ChangeKind {
    FinePolicy::default().kind(from, to)
}

/// Square count matrix: rows are the reference classification, columns the
/// model's.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComparisonGrid<L> {
    counts: Vec<Vec<u64>>,
    _labels: PhantomData<L>,
}

impl<L: ClassLabel> Default for ComparisonGrid<L> {
    fn default() -> Self {
        Self::new()
    }
}

impl<L: ClassLabel> ComparisonGrid<L> {
    pub fn new() -> Self {
        let n = L::all().len();
        ComparisonGrid { counts: vec![vec![0; n]; n], _labels: PhantomData }
    }

    pub fn add(&mut self, reference: L, model: L) {
        self.add_count(reference, model, 1);
    }

    pub fn add_count(&mut self, reference: L, model: L, n: u64) {
        self.counts[ClassLabel::index(reference)][ClassLabel::index(model)] += n;
    }

    pub fn get(&self, reference: L, model: L) -> u64 {
        self.counts[ClassLabel::index(reference)][ClassLabel::index(model)]
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn row_total(&self, reference: L) -> u64 {
        self.counts[ClassLabel::index(reference)].iter().sum()
    }

    /// Sums another grid into this one.
    pub fn merge(&mut self, other: &ComparisonGrid<L>) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    /// Matrix form: header `reference,<labels...>`, one row per reference class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("reference");
        for l in L::all() {
            write!(out, ",{l}").unwrap();
        }
        out.push('\n');
        for (r, row) in L::all().iter().zip(&self.counts) {
            write!(out, "{r}").unwrap();
            for c in row {
                write!(out, ",{c}").unwrap();
            }
            out.push('\n');
        }
        out
    }

    /// Fixed-width table; desirable cells are wrapped in `*..*` and
    /// undesirable ones in `[..]`.
    pub fn render_table(&self, policy: &impl ChangePolicy<L>) -> String {
        let mut out = format!("{:>6}", "");
        for l in L::all() {
            write!(out, "{:>8}", l.to_string().to_lowercase()).unwrap();
        }
        out.push('\n');
        for &r in L::all() {
            write!(out, "{:>6}", r.to_string().to_lowercase()).unwrap();
            for &c in L::all() {
                let n = self.get(r, c);
                let cell = match (n, policy.kind(r, c)) {
                    (0, _) | (_, ChangeKind::Match) => n.to_string(),
                    (_, ChangeKind::Desirable) => format!("*{n}*"),
                    (_, ChangeKind::Undesirable) => format!("[{n}]"),
                };
                write!(out, "{cell:>8}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

pub fn comparison_grid<L: ClassLabel>(reference: &[L], model: &[L]) -> Result<ComparisonGrid<L>> {
    if reference.len() != model.len() {
        return Err(Error::input(format!("label lists differ in length ({} vs {})", reference.len(), model.len())));
    }
    let mut grid = ComparisonGrid::new();
    for (&r, &m) in reference.iter().zip(model) {
        grid.add(r, m);
    }
    Ok(grid)
}

/// Percentages of students per change kind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSummary {
    pub match_pct: f64,
    pub desirable_pct: f64,
    pub undesirable_pct: f64,
    pub matches: u64,
    pub desirable: u64,
    pub undesirable: u64,
    pub total: u64,
}

impl GridSummary {
    /// `key: value` lines with two-decimal percentages.
    pub fn to_document(&self) -> String {
        format!(
            "match_pct: {:.2}\ndesirable_pct: {:.2}\nundesirable_pct: {:.2}\nmatches: {}\ndesirable: {}\nundesirable: {}\ntotal: {}\n",
            self.match_pct, self.desirable_pct, self.undesirable_pct, self.matches, self.desirable, self.undesirable, self.total
        )
    }
}

pub fn grid_summary<L: ClassLabel>(grid: &ComparisonGrid<L>, policy: &impl ChangePolicy<L>) -> Result<GridSummary> {
    let total = grid.total();
    if total == 0 {
        return Err(Error::input("cannot summarise an empty grid"));
    }
    let mut tally = [0u64; 3];
    for &r in L::all() {
        for &c in L::all() {
            let slot = match policy.kind(r, c) {
                ChangeKind::Match => 0,
                ChangeKind::Desirable => 1,
                ChangeKind::Undesirable => 2,
            };
            tally[slot] += grid.get(r, c);
        }
    }
    let pct = |n: u64| 100.0 * n as f64 / total as f64;
    Ok(GridSummary {
        match_pct: pct(tally[0]),
        desirable_pct: pct(tally[1]),
        undesirable_pct: pct(tally[2]),
        matches: tally[0],
        desirable: tally[1],
        undesirable: tally[2],
        total,
    })
}

/// Hold-one-type-out prediction quality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictionReport {
    /// Mean of 1/0 scores for the MAP state matching the actual answer.
    pub avg_accuracy: f64,
    /// Mean posterior probability given to the actual answer.
    pub avg_prob: f64,
    pub per_type: Vec<TypePrediction>,
    pub students: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypePrediction {
    pub type_id: usize,
    pub accuracy: f64,
    pub prob: f64,
}

impl PredictionReport {
    pub fn to_document(&self) -> String {
        let mut out = format!(
            "students: {}\navg_accuracy: {:.4}\navg_prob: {:.4}\n",
            self.students, self.avg_accuracy, self.avg_prob
        );
        for t in &self.per_type {
            writeln!(out, "type{}_accuracy: {:.4}\ntype{}_prob: {:.4}", t.type_id, t.accuracy, t.type_id, t.prob)
                .unwrap();
        }
        out
    }
}

/// For every student and every type, hides that type, predicts it from the
/// other five, and scores the prediction.
pub fn prediction_eval(net: &StudentNet, data: &[TypeScores]) -> Result<PredictionReport> {
    if data.is_empty() {
        return Err(Error::input("prediction evaluation needs at least one student"));
    }
    let per_student: Vec<[(f64, f64); N_TYPES]> = data
        .par_iter()
        .map(|s| {
            let mut out = [(0.0, 0.0); N_TYPES];
            for t in 1..=N_TYPES {
                let post = net.holdout_predict(&s.counts, t)?;
                let actual = net.observation_label(t, s.counts[t - 1])?;
                let hit = if post.map_state() == actual { 1.0 } else { 0.0 };
                let prob = post.prob_of(&actual).unwrap_or(0.0);
                out[t - 1] = (hit, prob);
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let n = data.len() as f64;
    let per_type: Vec<TypePrediction> = (0..N_TYPES)
        .map(|t| TypePrediction {
            type_id: t + 1,
            accuracy: per_student.iter().map(|s| s[t].0).sum::<f64>() / n,
            prob: per_student.iter().map(|s| s[t].1).sum::<f64>() / n,
        })
        .collect();
    Ok(PredictionReport {
        avg_accuracy: per_type.iter().map(|t| t.accuracy).sum::<f64>() / N_TYPES as f64,
        avg_prob: per_type.iter().map(|t| t.prob).sum::<f64>() / N_TYPES as f64,
        per_type,
        students: data.len(),
    })
}

/// Folds prior absorption over `rounds`, recording the class posterior
/// after each round.
pub fn adaptive_trajectory(net: &StudentNet, rounds: &[Evidence]) -> Result<Vec<Posterior>> {
    let mut current = net.clone();
    let mut out = Vec::with_capacity(rounds.len());
    for (i, e) in rounds.iter().enumerate() {
        let wrap = |err| Error::Round { round: i + 1, source: Box::new(err) };
        let post = current.net().posterior(e, crate::model::CLASS_VAR).map_err(wrap)?;
        current = current.with_class_prior(&post.probs).map_err(wrap)?;
        out.push(post);
    }
    Ok(out)
}

/// Classifies every student with the network.
pub fn classify_all(net: &StudentNet, data: &[TypeScores]) -> Result<Vec<FineClass>> {
    data.par_iter().map(|s| net.map_class(&s.counts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ClassPrior, ExpertModel, Pcm, ValueScheme};

    #[test]
    fn policy_examples() {
        use FineClass::*;
        assert_eq!(change_kind(Au, Ate), ChangeKind::Desirable);
        assert_eq!(change_kind(Lrv, Lwh), ChangeKind::Undesirable);
        assert_eq!(change_kind(Su, Ate), ChangeKind::Undesirable);
        assert_eq!(change_kind(Au, Mis), ChangeKind::Desirable);
        assert_eq!(change_kind(Lu, Un), ChangeKind::Undesirable);
        assert_eq!(change_kind(Sdf, Su), ChangeKind::Undesirable);
        assert_eq!(change_kind(Un, Lu), ChangeKind::Desirable);
        assert_eq!(change_kind(Lu, Su), ChangeKind::Undesirable);
        let strict = FinePolicy { au_to_mis_desirable: false };
        assert_eq!(strict.kind(Au, Mis), ChangeKind::Undesirable);
    }

    #[test]
    fn every_pair_has_one_kind() {
        for &a in &FineClass::ALL {
            for &b in &FineClass::ALL {
                let k = change_kind(a, b);
                assert_eq!(k == ChangeKind::Match, a == b);
            }
        }
    }

    #[test]
    fn grids_from_labels() {
        let labels = vec![FineClass::Ate, FineClass::Lwh, FineClass::Un];
        let g = comparison_grid(&labels, &labels).unwrap();
        assert_eq!(g.total(), 3);
        assert_eq!(g.get(FineClass::Lwh, FineClass::Lwh), 1);
        let s = grid_summary(&g, &FinePolicy::default()).unwrap();
        assert_eq!((s.match_pct, s.desirable_pct, s.undesirable_pct), (100.0, 0.0, 0.0));

        let empty: ComparisonGrid<FineClass> = comparison_grid(&[], &[]).unwrap();
        assert_eq!(empty.total(), 0);
        assert!(grid_summary(&empty, &FinePolicy::default()).is_err());
        assert!(comparison_grid(&labels, &labels[..2]).is_err());

        let un = comparison_grid(&[FineClass::Un; 4], &[FineClass::Ate; 4]).unwrap();
        let s = grid_summary(&un, &FinePolicy::default()).unwrap();
        assert_eq!((s.match_pct, s.desirable_pct, s.undesirable_pct), (0.0, 100.0, 0.0));
    }

    #[test]
    fn table2_fixture_reconstructs() {
        let (r, m) = fixtures::table2_label_lists();
        assert_eq!(r.len(), 2437);
        let g = comparison_grid(&r, &m).unwrap();
        assert_eq!(g, fixtures::table2_grid());
        assert_eq!(g.get(FineClass::Au, FineClass::Ate), 63);
        assert_eq!(g.get(FineClass::Lrv, FineClass::Lwh), 10);
        assert_eq!(g.row_total(FineClass::Ate), 1050);
    }

    #[test]
    fn coarse_policy() {
        assert_eq!(CoarsePolicy.kind(CoarseClass::Un, CoarseClass::A), ChangeKind::Desirable);
        assert_eq!(CoarsePolicy.kind(CoarseClass::A, CoarseClass::Un), ChangeKind::Undesirable);
        assert_eq!(CoarsePolicy.kind(CoarseClass::L, CoarseClass::L), ChangeKind::Match);
    }

    #[test]
    fn rendering_marks_change_kinds() {
        let g = fixtures::table2_grid();
        let table = g.render_table(&FinePolicy::default());
        assert!(table.contains("*63*"));
        assert!(table.contains("[10]"));
        let csv = g.to_csv();
        assert!(csv.starts_with("reference,ATE,AMO"));
        assert!(csv.lines().any(|l| l == "ATE,1050,0,0,0,0,0,0,0,0,0,0,0"));
    }

    #[test]
    fn perfect_prediction_on_deterministic_net() {
        let m = ExpertModel::table1();
        let net = m
            .build_student_net(ValueScheme::Count, Pcm::new(0.0).unwrap(), &ClassPrior::point_mass(FineClass::Ate))
            .unwrap();
        let data = vec![TypeScores::new("a", [5, 5, 4, 4, 3, 3]); 3];
        let r = prediction_eval(&net, &data).unwrap();
        assert_eq!(r.avg_accuracy, 1.0);
        assert_eq!(r.avg_prob, 1.0);
    }

    #[test]
    fn trajectory_edges() {
        let m = ExpertModel::table1();
        let net = m.build_student_net(ValueScheme::Band, Pcm::MID, &ClassPrior::uniform()).unwrap();
        assert!(adaptive_trajectory(&net, &[]).unwrap().is_empty());
        let e = net.evidence_for(&[0, 5, 0, 4, 3, 3]).unwrap();
        let one = adaptive_trajectory(&net, std::slice::from_ref(&e)).unwrap();
        let direct = net.classify(&[0, 5, 0, 4, 3, 3]).unwrap();
        assert_eq!(one[0].probs, direct.probs);
        let bad = Evidence::new().with("type9", "H");
        assert!(matches!(adaptive_trajectory(&net, &[e, bad]), Err(Error::Round { round: 2, .. })));
    }
}
