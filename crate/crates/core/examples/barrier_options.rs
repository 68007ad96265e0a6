// Up-and-in / up-and-out call prices under Black-Scholes and Heston, with
// the in-out parity checked path by path.

use control_neighbors::applications::{payoff, price_option, vanilla_payoff, BarrierKind, OptionContract};
use control_neighbors::estimator::Method;
use control_neighbors::spaces::{simulate_paths, MarketModel};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let maturity = 2.0 / 12.0;
    let models = [
        MarketModel::BlackScholes {
            s0: 100.0,
            rate: 0.1,
            sigma: 0.3,
            maturity,
        },
        MarketModel::Heston {
            s0: 100.0,
            rate: 0.1,
            v0: 0.1,
            theta: 0.02,
            kappa: 4.0,
            xi: 0.9,
            rho: 0.8,
            maturity,
        },
    ];
    let steps = 60;
    for model in &models {
        for kind in [BarrierKind::UpIn, BarrierKind::UpOut] {
            let contract = OptionContract {
                kind,
                strike: 100.0,
                barrier: 130.0,
                maturity,
                rate: 0.1,
            };
            for method in [Method::Mc, Method::Cvnn] {
                let rec = price_option(&contract, model, 400, steps, method, 17, 4000)?;
                println!(
                    "{:>7} {:>6} {:>4}: {:.4}",
                    model.label(),
                    kind.label(),
                    method,
                    rec.estimate
                );
            }
        }
    }

    let paths = simulate_paths(&models[0], 1000, steps, 5)?;
    let up = |kind| OptionContract {
        kind,
        strike: 100.0,
        barrier: 130.0,
        maturity,
        rate: 0.1,
    };
    let mut worst: f64 = 0.0;
    for path in paths.points() {
        let parity = payoff(&up(BarrierKind::UpIn), path)? + payoff(&up(BarrierKind::UpOut), path)?;
        worst = worst.max((parity - vanilla_payoff(100.0, path)?).abs());
    }
    println!("largest in-out parity violation over 1000 paths: {worst:e}");
    Ok(())
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
