//! Predicts each item type from the other five at the three pcm presets.

use dct_bn::data::{aggregate, simulate_cohort, ItemMap};
use dct_bn::eval::prediction_eval;
use dct_bn::model::{ClassPrior, ExpertModel, Pcm, ValueScheme};

fn main() -> dct_bn::Result<()> {
    let model = ExpertModel::table1();
    let map = ItemMap::contiguous(model.item_counts());
    let cohort: Vec<_> = simulate_cohort(&model, &ClassPrior::table2(), Pcm::MID, 1000, 1, &map)?
        .iter()
        .map(|s| aggregate(&s.record, &map))
        .collect();
    for scheme in [ValueScheme::Count, ValueScheme::Band] {
        for pcm in [Pcm::LOW, Pcm::MID, Pcm::HIGH] {
            let net = model.build_student_net(scheme, pcm, &ClassPrior::table2())?;
            let r = prediction_eval(&net, &cohort)?;
            println!("{scheme:?} pcm={pcm}: accuracy {:.4}, probability {:.4}", r.avg_accuracy, r.avg_prob);
        }
    }
    Ok(())
}
