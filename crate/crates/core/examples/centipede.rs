//! Linear-pie centipede: limit distribution, best-response cycle and the
//! precision at which the dynamics restabilize.

use limit_qre::choice::ChoiceModel;
use limit_qre::dynamics::{best_response_cycle, CycleOptions};
use limit_qre::game::{argmax, label_mean};
use limit_qre::library::{centipede, CentipedeSpec};
use limit_qre::path::{evolutionary_path, thick_barrier_scan, BarrierScanOptions, PathOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = centipede(&CentipedeSpec::linear(0.7))?;
    let res = evolutionary_path(&g, ChoiceModel::Logit, &PathOptions::default())?;
    println!(
        "beta*={} mode={} mean={:.2}",
        res.beta_star,
        g.labels_1()[argmax(&res.p_star.p1)],
        label_mean(g.labels_1(), &res.p_star.p1)?
    );

    let cycle = best_response_cycle(&g, &res.p_star, 0.5, ChoiceModel::Logit, &CycleOptions::default())?;
    let labels: Vec<String> = cycle
        .labels_1(&g)
        .unwrap_or_default()
        .iter()
        .map(|l| l.to_string())
        .collect();
    println!("best-response cycle at beta=0.5: {}", labels.join(", "));

    let scan = BarrierScanOptions {
        step: Some(0.5),
        refine_rounds: 4,
        ..BarrierScanOptions::default()
    };
    let barrier = thick_barrier_scan(&g, &res, ChoiceModel::Logit, &scan)?;
    println!("restabilization: {barrier:?}");

    let asym = g.rescale_payoffs(1.0, 0.5)?;
    let res = evolutionary_path(&asym, ChoiceModel::Logit, &PathOptions::default())?;
    println!(
        "player 2 payoffs halved: mean exit {:.2} / {:.2}",
        label_mean(asym.labels_1(), &res.p_star.p1)?,
        label_mean(asym.labels_2(), &res.p_star.p2)?
    );
    Ok(())
}
