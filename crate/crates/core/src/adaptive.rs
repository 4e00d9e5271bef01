//! Item-type selection and per-student diagnosis sessions.
//!
//! A session keeps the student net with the class prior replaced by the
//! posterior after each answered type. The next type is picked by a
//! sequencing tactic; every tactic asks each type once before any repeats.

use std::fmt;
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::bn::{change_ratios, entropy, BayesNet, Evidence, Posterior};
use crate::error::{Error, Result};
use crate::model::{type_var, ClassPrior, ExpertModel, Pcm, StudentNet, ValueScheme, CLASS_VAR, N_TYPES};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequencingTactic {
    EasyFirst,
    HardFirst,
    Alternating,
    #[default]
    MaxGain,
}

impl SequencingTactic {
    pub const ALL: [SequencingTactic; 4] = [
        SequencingTactic::EasyFirst,
        SequencingTactic::HardFirst,
        SequencingTactic::Alternating,
        SequencingTactic::MaxGain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SequencingTactic::EasyFirst => "easy_first",
            SequencingTactic::HardFirst => "hard_first",
            SequencingTactic::Alternating => "alternating",
            SequencingTactic::MaxGain => "max_gain",
        }
    }
}

impl FromStr for SequencingTactic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        Self::ALL.into_iter().find(|t| t.name() == key).ok_or_else(|| Error::input(format!("unknown tactic `{s}`")))
    }
}

impl fmt::Display for SequencingTactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Mutual information (nats) between `target` and an unobserved
/// `candidate` given `evidence`, from their exact joint posterior.
pub fn expected_info_gain(net: &BayesNet, evidence: &Evidence, target: &str, candidate: &str) -> Result<f64> {
    if evidence.contains(candidate) {
        return Err(Error::input(format!("`{candidate}` is already observed")));
    }
    let t = net.require(target)?;
    let c = net.require(candidate)?;
    let joint = net.joint_posterior(evidence, &[t, c])?;
    let (nt, nc) = (joint.cards[0], joint.cards[1]);
    let cell = |i: usize, j: usize| joint.probs[i * nc + j];
    let pt: Vec<f64> = (0..nt).map(|i| (0..nc).map(|j| cell(i, j)).sum()).collect();
    let pc: Vec<f64> = (0..nc).map(|j| (0..nt).map(|i| cell(i, j)).sum()).collect();
    // a point mass on either side carries no information
    if pt.iter().filter(|&&p| p > 0.0).count() <= 1 || pc.iter().filter(|&&p| p > 0.0).count() <= 1 {
        return Ok(0.0);
    }
    let conditional: f64 = (0..nc)
        .filter(|&j| pc[j] > 0.0)
        .map(|j| {
            let row: Vec<f64> = (0..nt).map(|i| cell(i, j) / pc[j]).collect();
            pc[j] * entropy(&row)
        })
        .sum();
    Ok((entropy(&pt) - conditional).max(0.0))
}

/// Expected information gain of every type node about the fine class, in
/// type order.
pub fn type_gains(net: &StudentNet) -> Result<[f64; N_TYPES]> {
    let mut gains = [0.0; N_TYPES];
    for (t, g) in gains.iter_mut().enumerate() {
        *g = expected_info_gain(net.net(), &Evidence::new(), CLASS_VAR, &type_var(t + 1))?;
    }
    Ok(gains)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub tactic: SequencingTactic,
    pub scheme: ValueScheme,
    pub pcm: Pcm,
    pub prior: ClassPrior,
    /// Type ids from easiest to hardest.
    pub difficulty_order: [usize; N_TYPES],
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            tactic: SequencingTactic::MaxGain,
            scheme: ValueScheme::Band,
            pcm: Pcm::MID,
            prior: ClassPrior::table2(),
            difficulty_order: [1, 2, 3, 4, 5, 6],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistoryEntry {
    pub type_id: usize,
    pub state: String,
    pub timestamp_ms: u64,
}

/// Result of one observation, committed or hypothetical.
#[derive(Clone, Debug, PartialEq)]
pub struct StepView {
    pub posterior: Posterior,
    pub coarse: Posterior,
    pub ratios: Vec<f64>,
    pub recommendation: usize,
}

#[derive(Clone, Debug)]
pub struct Session {
    id: String,
    config: SessionConfig,
    net: StudentNet,
    history: Vec<HistoryEntry>,
    coverage: [usize; N_TYPES],
    last_ratios: Vec<f64>,
}

/// Serialized session: enough to rebuild it by replaying the history.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionDocument {
    pub session_id: String,
    pub config: SessionConfig,
    pub history: Vec<HistoryEntry>,
    /// Class prior after the last absorbed answer.
    pub current_prior: Vec<f64>,
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

impl Session {
    pub fn new(id: impl Into<String>, config: SessionConfig, model: &ExpertModel) -> Result<Self> {
        let net = model.build_student_net(config.scheme, config.pcm, &config.prior)?;
        Self::with_net(id, config, net)
    }

    /// A session over an existing student net; its class prior is used as-is.
    pub fn with_net(id: impl Into<String>, config: SessionConfig, net: StudentNet) -> Result<Self> {
        let mut order = config.difficulty_order;
        order.sort_unstable();
        if order != [1, 2, 3, 4, 5, 6] {
            return Err(Error::input("difficulty order must be a permutation of types 1-6"));
        }
        Ok(Session {
            id: id.into(),
            config,
            net,
            history: Vec::new(),
            coverage: [0; N_TYPES],
            last_ratios: vec![1.0; crate::model::FineClass::COUNT],
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn net(&self) -> &StudentNet {
        &self.net
    }

    pub fn history(&self) -> &[HistoryEntry] {
        &self.history
    }

    pub fn coverage(&self) -> &[usize; N_TYPES] {
        &self.coverage
    }

    /// Change ratios from the last committed step; all ones before any.
    pub fn last_ratios(&self) -> &[f64] {
        &self.last_ratios
    }

    pub fn posterior(&self) -> Result<Posterior> {
        self.net.net().posterior(&Evidence::new(), CLASS_VAR)
    }

    pub fn coarse_posterior(&self) -> Result<Posterior> {
        self.net.coarse_posterior(&Evidence::new())
    }

    pub fn next_item(&self) -> usize {
        next_for(&self.net, self.config.tactic, &self.config.difficulty_order, &self.coverage)
    }

    fn evidence(&self, type_id: usize, state: &str) -> Result<Evidence> {
        if !(1..=N_TYPES).contains(&type_id) {
            return Err(Error::input(format!("unknown item type {type_id}")));
        }
        let states = self.net.type_states(type_id)?;
        if !states.iter().any(|s| s == state) {
            return Err(Error::UnknownState { variable: type_var(type_id), state: state.to_string() });
        }
        Ok(Evidence::new().with(type_var(type_id), state))
    }

    fn project(&self, type_id: usize, state: &str) -> Result<(StudentNet, StepView)> {
        let evidence = self.evidence(type_id, state)?;
        let prior = self.net.class_prior()?;
        let posterior = self.net.net().posterior(&evidence, CLASS_VAR)?;
        let next = self.net.absorb(&evidence)?;
        let ratios = change_ratios(&prior, &posterior.probs)?;
        let mut coverage = self.coverage;
        coverage[type_id - 1] += 1;
        let recommendation = next_for(&next, self.config.tactic, &self.config.difficulty_order, &coverage);
        let coarse = next.coarse_posterior(&Evidence::new())?;
        Ok((next, StepView { posterior, coarse, ratios, recommendation }))
    }

    /// Posterior after a hypothetical answer; the session is not modified.
    pub fn what_if(&self, type_id: usize, state: &str) -> Result<StepView> {
        Ok(self.project(type_id, state)?.1)
    }

    pub fn step(&mut self, type_id: usize, state: &str) -> Result<StepView> {
        self.step_at(type_id, state, now_ms())
    }

    /// Absorbs one answer. On error the session is left unchanged.
    pub fn step_at(&mut self, type_id: usize, state: &str, timestamp_ms: u64) -> Result<StepView> {
        let (next, view) = self.project(type_id, state)?;
        self.net = next;
        self.coverage[type_id - 1] += 1;
        self.last_ratios = view.ratios.clone();
        self.history.push(HistoryEntry { type_id, state: state.to_string(), timestamp_ms });
        Ok(view)
    }

    pub fn to_document(&self) -> Result<SessionDocument> {
        Ok(SessionDocument {
            session_id: self.id.clone(),
            config: self.config.clone(),
            history: self.history.clone(),
            current_prior: self.net.class_prior()?,
        })
    }

    /// Rebuilds a session from its configuration by replaying the history.
    pub fn replay(doc: &SessionDocument, model: &ExpertModel) -> Result<Self> {
        let mut session = Session::new(doc.session_id.clone(), doc.config.clone(), model)?;
        for (round, h) in doc.history.iter().enumerate() {
            session
                .step_at(h.type_id, &h.state, h.timestamp_ms)
                .map_err(|e| Error::Round { round: round + 1, source: Box::new(e) })?;
        }
        Ok(session)
    }
}

fn next_for(
    net: &StudentNet,
    tactic: SequencingTactic,
    order: &[usize; N_TYPES],
    coverage: &[usize; N_TYPES],
) -> usize {
    let uncovered = |t: &usize| coverage[t - 1] == 0;
    let by_tactic = match tactic {
        SequencingTactic::EasyFirst => order.iter().copied().find(uncovered),
        SequencingTactic::HardFirst => order.iter().rev().copied().find(uncovered),
        SequencingTactic::Alternating => {
            let mut alt = Vec::with_capacity(N_TYPES);
            for i in 0..N_TYPES / 2 {
                alt.push(order[i]);
                alt.push(order[N_TYPES - 1 - i]);
            }
            alt.into_iter().find(uncovered)
        }
        SequencingTactic::MaxGain => None,
    };
    if let Some(t) = by_tactic {
        return t;
    }
    let any_uncovered = coverage.contains(&0);
    let candidates: Vec<usize> = (1..=N_TYPES).filter(|t| !any_uncovered || uncovered(t)).collect();
    let gains = match type_gains(net) {
        Ok(g) => g,
        Err(e) => {
            log::warn!("information gain failed: {e}");
            return candidates[0];
        }
    };
    let mut best = candidates[0];
    for &t in &candidates[1..] {
        if gains[t - 1] > gains[best - 1] {
            best = t;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::FineClass;

    fn session(tactic: SequencingTactic, prior: ClassPrior) -> Session {
        let config = SessionConfig { tactic, prior, ..SessionConfig::default() };
        Session::new("s", config, &ExpertModel::table1()).unwrap()
    }

    #[test]
    fn tactic_names_round_trip() {
        for t in SequencingTactic::ALL {
            assert_eq!(t.name().parse::<SequencingTactic>().unwrap(), t);
        }
        assert!("random".parse::<SequencingTactic>().is_err());
    }

    #[test]
    fn easy_first_starts_with_type_one() {
        assert_eq!(session(SequencingTactic::EasyFirst, ClassPrior::uniform()).next_item(), 1);
        assert_eq!(session(SequencingTactic::HardFirst, ClassPrior::uniform()).next_item(), 6);
    }

    #[test]
    fn alternating_visits_both_ends() {
        let mut s = session(SequencingTactic::Alternating, ClassPrior::uniform());
        let mut seen = Vec::new();
        for _ in 0..N_TYPES {
            let t = s.next_item();
            seen.push(t);
            s.step_at(t, "H", 0).unwrap();
        }
        assert_eq!(seen, vec![1, 6, 2, 5, 3, 4]);
    }

    #[test]
    fn point_mass_has_zero_gain() {
        let s = session(SequencingTactic::MaxGain, ClassPrior::point_mass(FineClass::Lwh));
        assert_eq!(type_gains(s.net()).unwrap(), [0.0; N_TYPES]);
        assert_eq!(s.next_item(), 1);
    }

    #[test]
    fn modal_answer_raises_class() {
        let mut s = session(SequencingTactic::MaxGain, ClassPrior::uniform());
        // ATE expects High on type 1
        let view = s.step_at(1, "H", 0).unwrap();
        assert!(view.ratios[FineClass::Ate.index()] > 1.0);
        assert_eq!(s.history().len(), 1);
    }

    #[test]
    fn what_if_leaves_session_alone() {
        let s = session(SequencingTactic::MaxGain, ClassPrior::table2());
        let before = s.to_document().unwrap();
        let a = s.what_if(2, "L").unwrap();
        let b = s.what_if(2, "L").unwrap();
        assert_eq!(a, b);
        assert_eq!(s.to_document().unwrap(), before);
    }

    #[test]
    fn bad_state_leaves_session_alone() {
        let mut s = session(SequencingTactic::MaxGain, ClassPrior::table2());
        assert!(s.step_at(5, "M", 0).is_err());
        assert!(s.step_at(7, "H", 0).is_err());
        assert!(s.history().is_empty());
    }

    #[test]
    fn replay_reproduces_posterior() {
        let mut s = session(SequencingTactic::MaxGain, ClassPrior::table2());
        for (t, st) in [(1, "L"), (3, "H"), (1, "L"), (6, "H")] {
            s.step_at(t, st, 42).unwrap();
        }
        let doc = s.to_document().unwrap();
        let r = Session::replay(&doc, &ExpertModel::table1()).unwrap();
        assert_eq!(r.posterior().unwrap().probs, s.posterior().unwrap().probs);
        let json = serde_json::to_string(&doc).unwrap();
        assert_eq!(serde_json::from_str::<SessionDocument>(&json).unwrap(), doc);
    }
}
