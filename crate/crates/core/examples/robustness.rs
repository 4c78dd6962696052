//! Sensitivity of the limit precision and distribution to the step ν, and the
//! satisficing response model.

use limit_qre::choice::ChoiceModel;
use limit_qre::library::four_action_game;
use limit_qre::path::{evolutionary_path, nu_robustness, PathOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = four_action_game(0.7)?;
    for row in nu_robustness(&g, ChoiceModel::Logit, 0.04, 3, &PathOptions::default())? {
        println!("nu={:.4}: beta*={} drift={:.2e}", row.nu, row.beta_star, row.drift);
    }
    for c in [1.0, 1.5, 2.0] {
        let res = evolutionary_path(&g, ChoiceModel::satisficing(c)?, &PathOptions::default())?;
        let p: Vec<String> = res.p_star.p1.iter().map(|x| format!("{x:.3}")).collect();
        println!("satisficing c={c}: beta*={} p*=[{}]", res.beta_star, p.join(", "));
    }
    Ok(())
}
