//! Jacobian, spectral radius and stability along the principal QRE branch of
//! rock-paper-scissors.

use limit_qre::choice::ChoiceModel;
use limit_qre::dynamics::{classify_stability, finite_difference_jacobian, jacobian, StabilityOptions};
use limit_qre::library::rock_paper_scissors;
use limit_qre::path::{branch_radius, first_unstable_beta};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = rock_paper_scissors();
    let p = g.uniform_profile();
    for beta in [0.5, 1.0, 1.5, 2.0, 2.5] {
        let report = classify_stability(&g, &p, beta, ChoiceModel::Logit, &StabilityOptions::default())?;
        println!(
            "beta={beta}: radius={:.4} stable={}",
            report.spectral_radius, report.stable
        );
    }

    let j = jacobian(&g, &p, 1.0)?;
    let fd = finite_difference_jacobian(&g, &p, 1.0, ChoiceModel::Logit, 1e-6)?;
    let gap = j
        .as_slice()
        .iter()
        .zip(fd.as_slice())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("analytic vs finite-difference Jacobian: {gap:.2e}");

    let betas: Vec<f64> = (1..=300).map(|k| k as f64 * 0.01).collect();
    let branch = branch_radius(&g, ChoiceModel::Logit, &betas, 0.5, 1e-12, 100_000)?;
    println!(
        "first unstable precision on the branch: {:?}",
        first_unstable_beta(&branch)
    );
    Ok(())
}
