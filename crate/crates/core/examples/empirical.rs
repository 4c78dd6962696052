//! Six-node centipede tree: expected gains of each exit strategy against
//! experimental frequencies, and the limit distribution over stopping nodes.

use limit_qre::choice::ChoiceModel;
use limit_qre::library::centipede_mp6;
use limit_qre::path::{evolutionary_path, PathOptions};
use limit_qre::tables::table_t1;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for row in table_t1()? {
        let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.1}")).collect::<Vec<_>>().join(" ");
        println!(
            "{:>5}: player 1 [{}] player 2 [{}]",
            row.dataset,
            fmt(&row.player_1),
            fmt(&row.player_2)
        );
    }

    let tree = centipede_mp6(false);
    let res = evolutionary_path(&tree.game, ChoiceModel::Logit, &PathOptions::default())?;
    let nodes = tree.tree.terminal_node_distribution(&res.p_star)?;
    let shares: Vec<String> = nodes.iter().map(|x| format!("{:.2}", x)).collect();
    println!(
        "beta*={} stopping-node distribution: {}",
        res.beta_star,
        shares.join(" ")
    );
    Ok(())
}
