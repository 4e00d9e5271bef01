//! Runs an adaptive session against a simulated student of a chosen class.
//!
//! `cargo run --example adaptive_session -- [class] [tactic] [steps]`

use dct_bn::adaptive::{SequencingTactic, Session, SessionConfig};
use dct_bn::data::{aggregate, simulate_cohort, ItemMap};
use dct_bn::model::{ClassPrior, ExpertModel, FineClass};

fn main() -> dct_bn::Result<()> {
    let mut args = std::env::args().skip(1);
    let truth: FineClass = args.next().as_deref().unwrap_or("LWH").parse()?;
    let tactic: SequencingTactic = args.next().as_deref().unwrap_or("max_gain").parse()?;
    let steps: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);

    let model = ExpertModel::table1();
    let config = SessionConfig { tactic, ..SessionConfig::default() };
    let pcm = config.pcm;
    let mut session = Session::new("demo", config, &model)?;
    // one simulated response sheet per step, so repeated types get fresh answers
    let map = ItemMap::contiguous(model.item_counts());
    let sheets = simulate_cohort(&model, &ClassPrior::point_mass(truth), pcm, steps.max(1), 42, &map)?;

    for step in 1..=steps {
        let t = session.next_item();
        let counts = aggregate(&sheets[step - 1].record, &map).counts;
        let answer = session.net().observation_label(t, counts[t - 1])?;
        let view = session.step_at(t, &answer, 0)?;
        let (best, p) = &view.posterior.ranked()[0];
        println!("step {step:>2}: type{t} -> {} | leading {best} {p:.4} | next type{}", answer, view.recommendation);
    }
    println!("coverage {:?}", session.coverage());
    Ok(())
}
