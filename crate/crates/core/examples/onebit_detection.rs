// Detection from sign-quantized observations. The likelihood needs `log Φ`
// deep in the lower tail, where a naive `ln(erfc)` underflows.

use binopt::appa::solve;
use binopt::instances::{generate_onebit, OneBitParams};
use binopt::metrics::bit_error_rate;
use binopt::objectives::normal::{inv_mills, log_ncdf};
use binopt::presets::{apply_theta_rule, onebit_config, MatrixNorm, ThetaRule};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for u in [-40.0, -8.0, -1.0] {
        println!("log Phi({u}) = {:.6}, phi/Phi = {:.6}", log_ncdf(u), inv_mills(u));
    }
    for snr in [0.0, 10.0, 20.0] {
        let inst = generate_onebit(&OneBitParams {
            m: 128,
            n: 64,
            snr_db: snr,
            seed: 1,
        })?;
        let obj = inst.objective()?;
        let mut cfg = onebit_config(&inst.h, &inst.y, MatrixNorm::MaxAbs);
        apply_theta_rule(&mut cfg, &obj, ThetaRule::Safeguarded);
        let report = solve(&obj, &vec![0.0; 64], &cfg)?;
        println!(
            "snr={snr:>4} dB  BER={:.4}  iters={}  theta={:.1}",
            bit_error_rate(&report.x_final, &inst.x_star())?,
            report.iterations,
            cfg.theta
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
