//! Recovers latent classes from raw item responses with EM, choosing the
//! class count by penalised likelihood.

use dct_bn::data::{simulate_cohort, ItemMap};
use dct_bn::learn::{best_permutation_agreement, select_classes, Dataset, EmConfig};
use dct_bn::model::{ClassPrior, ExpertModel, FineClass, Pcm};

fn main() -> dct_bn::Result<()> {
    let model = ExpertModel::table1();
    let mut p = [0.0; FineClass::COUNT];
    for c in [FineClass::Ate, FineClass::Lwh, FineClass::Sdf, FineClass::Mis] {
        p[c.index()] = 0.25;
    }
    let map = ItemMap::contiguous(model.item_counts());
    let cohort = simulate_cohort(&model, &ClassPrior::new(p)?, Pcm::new(0.02)?, 2000, 4, &map)?;
    let records: Vec<_> = cohort.iter().map(|s| s.record.clone()).collect();
    let truth: Vec<usize> = cohort.iter().map(|s| s.class.index()).collect();

    let sel = select_classes(&Dataset::from_items(&records)?, &[2, 3, 4, 5, 6], 17, &EmConfig::default())?;
    println!("k   loglik        params  score");
    for s in &sel.scores {
        println!("{:<3} {:<13.2} {:<7} {:.2}", s.k, s.loglik, s.parameters, s.score);
    }
    println!("selected k = {}, {} unclassified", sel.k(), sel.unclassified());
    println!("agreement with generating classes {:.2}%", 100.0 * best_permutation_agreement(&sel.assignments, &truth));
    for (i, w) in sel.best.weights.iter().enumerate() {
        println!("class {}: weight {w:.3}", i + 1);
    }
    Ok(())
}
