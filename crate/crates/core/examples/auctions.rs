//! First-price and all-pay auctions over linear bid-shading strategies.

use limit_qre::auctions::{auction_payoff_matrix, expected_shading, AuctionFormat, AuctionSpec, BidFunction};
use limit_qre::choice::ChoiceModel;
use limit_qre::game::{argmax, DEFAULT_TIE_TOL};
use limit_qre::path::{evolutionary_path, PathOptions};

fn run(name: &str, spec: AuctionSpec) -> Result<(), Box<dyn std::error::Error>> {
    let g = auction_payoff_matrix(&spec)?;
    let res = evolutionary_path(&g, ChoiceModel::Logit, &PathOptions::default())?;
    let nash: Vec<String> = g
        .pure_nash_equilibria(DEFAULT_TIE_TOL)
        .into_iter()
        .filter(|(i, j)| i == j)
        .map(|(i, _)| g.labels_1()[i].to_string())
        .collect();
    let shading = expected_shading(g.labels_1(), &res.p_star.p1).map_or("-".to_string(), |s| format!("{s:.3}"));
    println!(
        "{name}: beta*={} mode={} shading={shading} grid Nash=[{}]",
        res.beta_star,
        g.labels_1()[argmax(&res.p_star.p1)],
        nash.join(", ")
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run(
        "first-price sigma=0.05",
        AuctionSpec::new(AuctionFormat::FirstPrice, 0.05, 0.05),
    )?;
    run(
        "first-price sigma=0.4",
        AuctionSpec::new(AuctionFormat::FirstPrice, 0.4, 0.05),
    )?;
    run(
        "first-price, uncertain dispersion",
        AuctionSpec::dispersion_uncertainty(0.05),
    )?;
    run(
        "all-pay sigma=0.3 with b^eq",
        AuctionSpec::new(AuctionFormat::AllPay, 0.3, 0.1).with_extra(BidFunction::bayesian_allpay(0.3)),
    )?;
    Ok(())
}
