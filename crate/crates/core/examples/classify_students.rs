//! Classifies a few score vectors with the expert rules and with the network.

use dct_bn::model::{ClassPrior, ExpertModel, Pcm, ValueScheme};

fn main() -> dct_bn::Result<()> {
    let model = ExpertModel::table1();
    let net = model.build_student_net(ValueScheme::Band, Pcm::MID, &ClassPrior::table2())?;
    let students: [[usize; 6]; 5] =
        [[5, 4, 4, 3, 3, 2], [4, 5, 0, 4, 3, 3], [0, 5, 0, 4, 3, 3], [5, 0, 4, 0, 3, 3], [2, 3, 2, 2, 1, 2]];

    println!("{:<8} {:<8} {:<6} {:<5} top three", "scores", "bands", "rules", "net");
    for s in students {
        let rules = model.expert_classify(&s)?;
        let post = net.classify(&s)?;
        let top: Vec<String> = post.ranked().iter().take(3).map(|(c, p)| format!("{c} {p:.3}")).collect();
        let digits: String = s.iter().map(|d| d.to_string()).collect();
        println!("{digits:<8} {:<8} {:<6} {:<5} {}", model.band_string(&s)?, rules, post.map_state(), top.join(", "));
    }
    Ok(())
}
