// Recovering a sparse binary signal from `b = Ax* + nf·ε` with the
// `ℓq` loss, for a few exponents and noise levels.

use binopt::appa::solve;
use binopt::instances::{generate_recovery, RecoveryParams};
use binopt::metrics::accuracy;
use binopt::presets::{recovery_config, MatrixNorm};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for (q, nf) in [(2.0, 0.0), (2.0, 0.05), (1.5, 0.0), (3.0, 0.0)] {
        let inst = generate_recovery(&RecoveryParams {
            m: 120,
            n: 240,
            s: 20,
            q,
            noise_factor: nf,
            seed: 7,
        })?;
        let obj = inst.objective()?;
        let cfg = recovery_config(&inst.a, &inst.b, inst.params.s, MatrixNorm::MaxAbs);
        let report = solve(&obj, &vec![0.0; inst.params.n], &cfg)?;
        println!(
            "q={q:<4} nf={nf:<5} acc={:.4} iters={:<4} stop={:?}",
            accuracy(&report.x_final, &inst.x_star)?,
            report.iterations,
            report.terminated_by
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
