//! Writes a simulated cohort as item responses and as type scores.

use dct_bn::data::{aggregate, simulate_cohort, write_dct, write_scores, ItemMap};
use dct_bn::model::{ClassPrior, ExpertModel, Pcm};

fn main() -> dct_bn::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let model = ExpertModel::table1();
    let map = ItemMap::contiguous(model.item_counts());
    let cohort = simulate_cohort(&model, &ClassPrior::table2(), Pcm::MID, n, 0, &map)?;
    let records: Vec<_> = cohort
        .iter()
        .map(|s| {
            let mut r = s.record.clone();
            r.expert_label = Some(s.class);
            r
        })
        .collect();
    print!("{}", write_dct(&records)?);
    println!();
    print!("{}", write_scores(&records.iter().map(|r| aggregate(r, &map)).collect::<Vec<_>>())?);
    Ok(())
}
