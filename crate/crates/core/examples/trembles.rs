//! Game over targets: trembles around intended claims in the traveler's
//! dilemma, and the induced distribution over realized claims.

use limit_qre::choice::ChoiceModel;
use limit_qre::game::{argmax, Label};
use limit_qre::library::{travelers_claims, travelers_dilemma};
use limit_qre::path::{evolutionary_path, PathOptions};
use limit_qre::trembles::{induced_alternative_distribution, target_game, tremble_kernel, TrembleModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = travelers_dilemma(10.0, &travelers_claims(80, 200, 1))?;

    let kernel = tremble_kernel(g.labels_1(), &Label::Num(160.0), &TrembleModel::labels(0.6)?)?;
    let near: Vec<String> = (78..=82)
        .map(|i| format!("{}:{:.3}", g.labels_1()[i], kernel[i]))
        .collect();
    println!("realized claims around target 160 (q=0.6): {}", near.join(" "));

    for q in [0.0, 0.6, 0.8] {
        let m = TrembleModel::labels(q)?;
        let t = target_game(&g, &m)?;
        let res = evolutionary_path(&t, ChoiceModel::Logit, &PathOptions::default())?;
        let induced = induced_alternative_distribution(&res.p_star, g.labels_1(), g.labels_2(), &m)?;
        println!(
            "q={q}: beta*={} target mode={} induced mode={}",
            res.beta_star,
            t.labels_1()[argmax(&res.p_star.p1)],
            g.labels_1()[argmax(&induced.p1)]
        );
    }
    Ok(())
}
