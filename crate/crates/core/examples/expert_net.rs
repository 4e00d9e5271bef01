//! Builds the expert student network and prints its conditional tables.
//!
//! `cargo run --example expert_net -- [count|band] [pcm]`

use dct_bn::model::{ClassPrior, ExpertModel, FineClass, ValueScheme, N_TYPES};

fn main() -> dct_bn::Result<()> {
    let mut args = std::env::args().skip(1);
    let scheme: ValueScheme = args.next().as_deref().unwrap_or("band").parse()?;
    let pcm = args.next().as_deref().unwrap_or("mid").parse()?;

    let model = ExpertModel::table1();
    let net = model.build_student_net(scheme, pcm, &ClassPrior::table2())?;
    println!(
        "{} nodes, {} arcs, {} free parameters",
        net.net().len(),
        net.net().arc_count(),
        net.net().parameter_count()
    );

    for t in 1..=N_TYPES {
        let states = net.type_states(t)?;
        println!("\ntype{t} ({} items): states {}", model.item_counts()[t - 1], states.join(" "));
        let v = net.net().index_of(&dct_bn::model::type_var(t)).expect("type node");
        for c in FineClass::ALL {
            let row: Vec<String> = net.net().cpt(v)[c.index()].iter().map(|p| format!("{p:.3}")).collect();
            println!("  {:<4} {}  {}", c.label(), model.pattern(c)[t - 1].symbol(), row.join(" "));
        }
    }
    Ok(())
}
