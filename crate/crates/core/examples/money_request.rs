//! 11-20 money-request game: basic version and the costless version with
//! stubborn players.

use limit_qre::choice::ChoiceModel;
use limit_qre::game::argmax;
use limit_qre::library::{money_request, MoneyRequestSpec, MoneyRequestVersion, Variant};
use limit_qre::path::{evolutionary_path, PathOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = money_request(&MoneyRequestSpec::basic())?;
    let res = evolutionary_path(&g, ChoiceModel::Logit, &PathOptions::default())?;
    let shares: Vec<String> = g
        .labels_1()
        .iter()
        .zip(&res.p_star.p1)
        .map(|(l, p)| format!("{l}:{:.0}%", 100.0 * p))
        .collect();
    println!("basic: beta*={} {}", res.beta_star, shares.join(" "));

    for pi in [0.0, 0.05, 0.1, 0.15, 0.2] {
        let g = money_request(&MoneyRequestSpec::new(MoneyRequestVersion::Costless, pi, Variant::Two))?;
        let res = evolutionary_path(&g, ChoiceModel::Logit, &PathOptions::default())?;
        let (u1, _) = g.expected_values(&res.p_star)?;
        println!(
            "costless, pi={pi}: mode={} strategic payoff={u1:.3}",
            g.labels_1()[argmax(&res.p_star.p1)]
        );
    }
    Ok(())
}
