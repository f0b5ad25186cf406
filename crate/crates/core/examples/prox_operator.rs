// Closed-form proximal operator of the cubic penalty, checked against a
// dense grid search on `[0, 1]`.

use binopt::cubic::{prox_scalar, ProxRegime};
use binopt::metrics::grid_prox_oracle;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!(
        "{:>6} {:>6} {:>10} {:>22} {:>10}",
        "z", "tau", "branch", "candidates", "grid"
    );
    for &tau in &[0.05, 0.1, 1.0 / 6.0, 0.5] {
        for &z in &[-0.2, 0.1, 0.4, 0.5, 0.6, 0.9, 1.3] {
            let prox = prox_scalar(z, tau)?;
            let grid = grid_prox_oracle(z, tau, 1e-5)?;
            let branch = format!("{:?}", ProxRegime::new(tau)?.branch());
            let cands: Vec<String> = prox.candidates().iter().map(|c| format!("{c:.5}")).collect();
            // every closed-form candidate lies next to a grid minimizer
            for c in prox.candidates() {
                let near = grid.iter().any(|w| (w - c).abs() < 2e-5);
                if !near {
                    return Err(format!("candidate {c} at z={z}, tau={tau} is not a grid minimizer").into());
                }
            }
            println!(
                "{z:>6.2} {tau:>6.3} {branch:>10} {:>22} {:>10.5}",
                cands.join(", "),
                grid[0]
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
