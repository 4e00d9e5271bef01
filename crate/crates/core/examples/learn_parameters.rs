//! Learns the expert structure's tables from simulated students on 80/20
//! splits and reports how close they come to the generating tables.

use dct_bn::data::{aggregate, make_splits, simulate_cohort, ItemMap, SplitPlan};
use dct_bn::learn::{learn_cpts, Dataset};
use dct_bn::model::{ClassPrior, ExpertModel, Pcm, StudentNet, ValueScheme};

fn main() -> dct_bn::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let model = ExpertModel::table1();
    let prior = ClassPrior::table2();
    let truth = model.build_student_net(ValueScheme::Count, Pcm::MID, &prior)?;
    let map = ItemMap::contiguous(model.item_counts());
    let scores: Vec<_> = simulate_cohort(&model, &prior, Pcm::MID, n, 2024, &map)?
        .into_iter()
        .map(|s| {
            let mut t = aggregate(&s.record, &map);
            t.label = Some(s.class);
            t
        })
        .collect();
    let data = Dataset::for_student_net(&scores, &truth, &model)?;

    for (i, split) in make_splits(n, &SplitPlan { seed: 1, ..SplitPlan::default() })?.iter().enumerate() {
        let learned = learn_cpts(truth.net(), &data.subset(&split.train), 1.0)?;
        let mut worst: f64 = 0.0;
        for v in 0..truth.net().len() {
            for (a, b) in truth.net().cpt(v).iter().zip(learned.net.cpt(v)) {
                worst = worst.max(a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum());
            }
        }
        let relearned = StudentNet::from_net(learned.net, ValueScheme::Count, *model.item_counts())?;
        let mut agree = 0;
        for &j in &split.test {
            if relearned.map_class(&scores[j].counts)? == truth.map_class(&scores[j].counts)? {
                agree += 1;
            }
        }
        println!(
            "split {}: worst row L1 {worst:.3}, MAP agreement {:.2}%",
            i + 1,
            100.0 * agree as f64 / split.test.len() as f64
        );
    }
    Ok(())
}
