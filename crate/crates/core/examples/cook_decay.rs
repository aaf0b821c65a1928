//! Cook integrand of the default model and its power-law fit.

use euclid_rp::green_models::FourPointModel;
use euclid_rp::scatter::{cook_scan_with_fast, disconnected_cancellation, fit_decay, geometric_grid, AsymptoticState, CookConfig};

fn main() -> euclid_rp::Result<()> {
    let model = FourPointModel::default_interacting(1.0)?;
    let state = AsymptoticState::head_on(0.2, 0.4, 1.0)?;
    // the coarse grid keeps this quick; the default grid is converged
    let cfg = CookConfig::coarse();
    let times = geometric_grid(20.0, 200.0, 8)?;
    let scan = cook_scan_with_fast(&state, &model, &times, &cfg)?;
    for (s, f) in scan.samples.iter().zip(&scan.fast) {
        println!("t = {:7.2}  integrand {:.6e}  reduced {:.6e}", s.t, s.integrand_value, f);
    }
    let fit = fit_decay(scan.samples)?;
    println!("slope {:.4}, residual {:.2e}, certified {}", fit.slope, fit.residual, fit.certified);
    let c = disconnected_cancellation(&state, &model, 0.0, &cfg)?;
    println!("disconnected / connected = {:.2e}", c.ratio);
    Ok(())
}
