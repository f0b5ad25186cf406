// OR-Library `bqp` instances. Solves every instance found under
// `$BINOPT_BEASLEY_DIR` (or `data/beasley`) and reports the gap to the best
// known value; without a corpus it round-trips a synthetic instance through
// the file format instead.

use binopt::appa::solve;
use binopt::experiment::InitPolicy;
use binopt::instances::{beasley, generate_synthetic_qubo, SyntheticQuboParams};
use binopt::metrics::gap;
use binopt::presets::{apply_theta_rule, qubo_config, MatrixNorm, ThetaRule};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let names: Vec<String> = beasley::best_known_names()
        .into_iter()
        .filter(|n| n.starts_with("bqp100-"))
        .collect();
    if beasley::corpus_dir().is_some() {
        for name in names {
            let inst = match beasley::load_named(&name) {
                Ok(i) => i,
                Err(e) => {
                    println!("{name}: {e}");
                    continue;
                }
            };
            let obj = inst.objective()?;
            let mut cfg = qubo_config(&inst.q, MatrixNorm::MaxAbs);
            apply_theta_rule(&mut cfg, &obj, ThetaRule::Safeguarded);
            let r = solve(&obj, &InitPolicy::Half.point(inst.dim(), 0), &cfg)?;
            let best = inst.best_known.expect("sidecar value");
            println!(
                "{name:<10} obj {:>10.0} best {best:>10.0} gap {:.2}%",
                r.objective_value,
                gap(r.objective_value, best)?
            );
        }
        return Ok(());
    }

    println!("no corpus; set {} to a directory of bqp files", beasley::CORPUS_ENV);
    let inst = generate_synthetic_qubo(&SyntheticQuboParams {
        n: 12,
        case_id: 3,
        seed: 4,
    })?;
    let mut text = Vec::new();
    beasley::write_beasley(&inst.q, &mut text)?;
    let back = beasley::parse_beasley_str(std::str::from_utf8(&text)?)?;
    assert_eq!(back[0], inst.q);
    let head: Vec<&str> = std::str::from_utf8(&text)?.lines().take(4).collect();
    println!("round-tripped {} bytes; first lines:\n{}", text.len(), head.join("\n"));
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
