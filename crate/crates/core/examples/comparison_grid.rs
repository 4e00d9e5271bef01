//! Compares expert-rule labels with network labels on a simulated cohort,
//! then prints the frozen published grid summary for reference.

use dct_bn::data::{aggregate, simulate_cohort, ItemMap};
use dct_bn::eval::{classify_all, comparison_grid, fixtures, grid_summary, FinePolicy};
use dct_bn::model::{ClassPrior, ExpertModel, Pcm, ValueScheme};

fn main() -> dct_bn::Result<()> {
    let model = ExpertModel::table1();
    let map = ItemMap::contiguous(model.item_counts());
    let scores: Vec<_> = simulate_cohort(&model, &ClassPrior::table2(), Pcm::MID, 2437, 7, &map)?
        .iter()
        .map(|s| aggregate(&s.record, &map))
        .collect();
    let reference = scores.iter().map(|s| model.expert_classify(&s.counts)).collect::<dct_bn::Result<Vec<_>>>()?;
    let net = model.build_student_net(ValueScheme::Band, Pcm::MID, &ClassPrior::table2())?;
    let predicted = classify_all(&net, &scores)?;

    let policy = FinePolicy::default();
    let grid = comparison_grid(&reference, &predicted)?;
    println!("simulated cohort, rules (rows) vs network (columns)\n{}", grid.render_table(&policy));
    print!("{}", grid_summary(&grid, &policy)?.to_document());

    println!("\npublished grid");
    print!("{}", grid_summary(&fixtures::table2_grid(), &policy)?.to_document());
    Ok(())
}
