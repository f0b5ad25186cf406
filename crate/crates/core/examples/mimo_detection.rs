// Classical MIMO detection with QPSK symbols on iid and correlated channels.

use binopt::experiment::{run_trials, summarize, GenParams, RunSpec};
use binopt::instances::Task;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:>6} {:>6} {:>10}", "corr", "snr", "mean BER");
    for corr in [0.0, 0.2] {
        for snr in [0.0, 5.0, 10.0] {
            let params = GenParams {
                m: 32,
                n: 32,
                snr_db: snr,
                corr,
                ..GenParams::defaults_for(Task::Mimo)
            };
            let records = run_trials(&RunSpec::generated(Task::Mimo, params, 4, 100))?;
            let s = summarize(Task::Mimo, &records);
            println!("{corr:>6.1} {snr:>6.1} {:>10.4}", s.ber.map_or(f64::NAN, |b| b.mean));
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
