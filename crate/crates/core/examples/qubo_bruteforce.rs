// Synthetic QUBO instances small enough to enumerate: APPA against the
// exhaustive optimum.

use binopt::experiment::{run_trial, GenParams, RunSpec};
use binopt::instances::Task;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut within = 0;
    let total = 10;
    for seed in 0..total {
        let params = GenParams {
            n: 14,
            case_id: 1 + (seed as usize % 5),
            ..GenParams::defaults_for(Task::Qubo)
        };
        let spec = RunSpec::generated(Task::Qubo, params, 1, seed);
        let (rec, _) = run_trial(&spec, 0)?;
        let gap = rec.metrics.gap_percent.unwrap_or(f64::NAN);
        if gap <= 5.0 {
            within += 1;
        }
        println!(
            "{:<28} appa {:>10.2}  optimum {:>10.2}  gap {:>6.2}%  iters {:>4}",
            rec.instance,
            rec.metrics.objective,
            rec.reference_objective.unwrap_or(f64::NAN),
            gap,
            rec.report.iterations
        );
        assert!(rec.metrics.is_binary);
    }
    println!("{within}/{total} instances within 5% of the optimum");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
