//! Evolutionary path on the four-action game for several values of θ.

use limit_qre::choice::ChoiceModel;
use limit_qre::library::four_action_game;
use limit_qre::path::{evolutionary_path, thick_barrier_scan, BarrierScanOptions, PathOptions, Termination};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for theta in [0.49, 0.5, 0.7, 0.9] {
        let g = four_action_game(theta)?;
        let res = evolutionary_path(&g, ChoiceModel::Logit, &PathOptions::default())?;
        let barrier = match res.termination {
            Termination::BetaCapReached => None,
            _ => thick_barrier_scan(&g, &res, ChoiceModel::Logit, &BarrierScanOptions::default())?,
        };
        let p: Vec<String> = res.p_star.p1.iter().map(|x| format!("{x:.3}")).collect();
        println!(
            "theta={theta}: beta*={} ({}), p*=[{}], restabilizes at {}",
            res.beta_star,
            res.termination,
            p.join(", "),
            barrier.map_or("-".to_string(), |b| format!("{b:.2}")),
        );
    }
    Ok(())
}
