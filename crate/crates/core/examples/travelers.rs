//! Traveler's dilemma: limit precision as the penalty grows.

use limit_qre::choice::ChoiceModel;
use limit_qre::game::{argmax, label_mean};
use limit_qre::library::{travelers_claims, travelers_dilemma};
use limit_qre::path::{evolutionary_path, PathOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let claims = travelers_claims(80, 200, 1);
    for delta in [5.0, 10.0, 25.0, 50.0, 80.0] {
        let g = travelers_dilemma(delta, &claims)?;
        let res = evolutionary_path(&g, ChoiceModel::Logit, &PathOptions::default())?;
        println!(
            "delta={delta}: beta*={} mode={} mean={:.1}",
            res.beta_star,
            g.labels_1()[argmax(&res.p_star.p1)],
            label_mean(g.labels_1(), &res.p_star.p1)?
        );
    }
    Ok(())
}
