//! Searches for a network structure over fineClass and the six type nodes,
//! with and without keeping fineClass ancestral to every type.

use dct_bn::data::{aggregate, simulate_cohort, ItemMap};
use dct_bn::learn::{greedy_structure_search, Dataset, OrderingConstraint, SearchConfig};
use dct_bn::model::{type_var, ClassPrior, ExpertModel, Pcm, ValueScheme, CLASS_VAR, N_TYPES};

fn main() -> dct_bn::Result<()> {
    let model = ExpertModel::table1();
    let map = ItemMap::contiguous(model.item_counts());
    let scores: Vec<_> = simulate_cohort(&model, &ClassPrior::table2(), Pcm::MID, 5000, 77, &map)?
        .into_iter()
        .map(|s| {
            let mut t = aggregate(&s.record, &map);
            t.label = Some(s.class);
            t
        })
        .collect();
    let data = Dataset::labelled(&scores, ValueScheme::Band, model.item_counts())?;
    let types: Vec<String> = (1..=N_TYPES).map(type_var).collect();
    let names: Vec<&str> = types.iter().map(String::as_str).collect();
    let constraint = OrderingConstraint::by_name(&data, CLASS_VAR, &names)?;

    for (label, c) in [("unconstrained", None), ("constrained", Some(&constraint))] {
        let r = greedy_structure_search(&data, c, &SearchConfig::default())?;
        println!(
            "{label}: {} arcs, {:.2} arcs/node, {} parameters, BIC {:.1}",
            r.arcs, r.arcs_per_node, r.parameters, r.score.score
        );
        for (a, b) in r.net.arcs() {
            println!("  {} -> {}", r.net.variable(a).name, r.net.variable(b).name);
        }
    }
    Ok(())
}
