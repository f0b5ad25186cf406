// Plugging a user-defined smooth objective into the solver and watching the
// penalty schedule through the iteration observer.
//
// The objective here is a least-squares fit to a fractional target, whose
// binary minimizer is the rounded target.

use binopt::appa::{solve_observed, AppaConfig};
use binopt::objectives::Objective;

struct Target(Vec<f64>);

impl Objective for Target {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.0).map(|(a, t)| 0.5 * (a - t) * (a - t)).sum()
    }

    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, a), t) in out.iter_mut().zip(x).zip(&self.0) {
            *o = a - t;
        }
    }

    fn lambda_bar_bound(&self) -> Option<f64> {
        Some(self.0.iter().map(|t| t.abs().max((1.0 - t).abs())).fold(0.0, f64::max) / 3.0)
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let target = Target(vec![0.2, 0.9, 0.45, 0.7, 0.05]);
    let cfg = AppaConfig {
        lambda0: 0.01,
        k0: 5,
        pi: 2.0,
        theta: 10.0,
        ..AppaConfig::default()
    };
    let report = solve_observed(&target, &[0.5; 5], &cfg, |rec| {
        if rec.k % 5 == 0 {
            println!(
                "k={:<3} lambda={:<8.4} tau={:<6} x={:.3?}",
                rec.k, rec.lambda, rec.tau, rec.x_next
            );
        }
    })?;
    println!("final {:?} after {} iterations", report.x_final, report.iterations);
    assert_eq!(report.x_final, vec![0.0, 1.0, 0.0, 1.0, 0.0]);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
